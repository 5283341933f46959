//! Drive profiles and the elementary time-dependent scalars.
//!
//! A [`DriveProfile`] describes one period of a piecewise-constant modulation
//! of the squared frequency, `ω̃²(t) = ω₀²[1 − δ(t)]`, together with a
//! piecewise-constant damping rate `γ(t)`. The period repeats `n_periods`
//! times. Segments are right-open: a time sitting exactly on a boundary
//! belongs to the segment that starts there.
//!
//! The accumulated damping factor `β(t) = exp(−∫₀ᵗ γ)` is evaluated in closed
//! form from per-segment exposures, never by quadrature.

use crate::error::{Error, Result};

/// Relative tolerance on `Σ durations = τ`.
const PERIOD_SUM_TOL: f64 = 1e-12;

/// Times closer than this many ulps (relative to the period) to a segment
/// boundary are snapped onto it.
const BOUNDARY_SNAP: f64 = 8.0 * f64::EPSILON;

/// One constant piece of the modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl Segment {
    pub fn new(duration: f64, delta: f64, gamma: f64) -> Self {
        Segment {
            duration,
            delta,
            gamma,
        }
    }
}

/// A validated, periodic, piecewise-constant drive.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProfile {
    omega0: f64,
    tau: f64,
    segments: Vec<Segment>,
    n_periods: usize,
    // starts[i] is the offset of segment i inside the period; starts[len] = τ.
    starts: Vec<f64>,
    // exposure accumulated before segment i inside one period.
    exposure_before: Vec<f64>,
    exposure_per_period: f64,
}

impl DriveProfile {
    pub fn new(omega0: f64, tau: f64, segments: Vec<Segment>, n_periods: usize) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::profile("omega0", format!("must be finite and > 0, got {omega0}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::profile("tau", format!("must be finite and > 0, got {tau}")));
        }
        if n_periods == 0 {
            return Err(Error::profile("n_periods", "must be a positive integer"));
        }
        if segments.is_empty() {
            return Err(Error::profile("segments", "at least one segment is required"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::profile(
                    format!("segments[{i}].duration"),
                    format!("must be finite and > 0, got {}", s.duration),
                ));
            }
            if !(s.delta.is_finite() && s.delta.abs() < 1.0) {
                return Err(Error::profile(
                    format!("segments[{i}].delta"),
                    format!("|delta| must be < 1, got {}", s.delta),
                ));
            }
            if !(s.gamma.is_finite() && s.gamma >= 0.0) {
                return Err(Error::profile(
                    format!("segments[{i}].gamma"),
                    format!("must be finite and >= 0, got {}", s.gamma),
                ));
            }
        }
        let total: f64 = segments.iter().map(|s| s.duration).sum();
        if ((total - tau) / tau).abs() > PERIOD_SUM_TOL {
            return Err(Error::profile(
                "segments",
                format!("durations sum to {total}, expected tau = {tau}"),
            ));
        }

        let mut starts = Vec::with_capacity(segments.len() + 1);
        let mut exposure_before = Vec::with_capacity(segments.len());
        let (mut offset, mut exposure) = (0.0, 0.0);
        for s in &segments {
            starts.push(offset);
            exposure_before.push(exposure);
            offset += s.duration;
            exposure += s.gamma * s.duration;
        }
        starts.push(tau);

        Ok(DriveProfile {
            omega0,
            tau,
            segments,
            n_periods,
            starts,
            exposure_before,
            exposure_per_period: exposure,
        })
    }

    /// Unmodulated profile with a constant damping rate.
    pub fn constant(omega0: f64, tau: f64, delta: f64, gamma: f64, n_periods: usize) -> Result<Self> {
        Self::new(omega0, tau, vec![Segment::new(tau, delta, gamma)], n_periods)
    }

    /// Square-wave modulation: `+delta` on the first half period, `−delta` on
    /// the second, with a constant damping rate.
    pub fn square_wave(omega0: f64, tau: f64, delta: f64, gamma: f64, n_periods: usize) -> Result<Self> {
        let half = 0.5 * tau;
        Self::new(
            omega0,
            tau,
            vec![Segment::new(half, delta, gamma), Segment::new(tau - half, -delta, gamma)],
            n_periods,
        )
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    /// End of the simulated range, `n_periods · τ`.
    pub fn t_end(&self) -> f64 {
        self.n_periods as f64 * self.tau
    }

    /// `ω₀τ`, the dimensionless product that decides band membership.
    pub fn omega0_tau(&self) -> f64 {
        self.omega0 * self.tau
    }

    /// Same shape and rates, with the period stretched so that `ω₀τ = x`.
    /// Segment durations keep their fractions of the period.
    pub fn with_omega0_tau(&self, x: f64) -> Result<Self> {
        let tau = x / self.omega0;
        let scale = tau / self.tau;
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.duration * scale, s.delta, s.gamma))
            .collect();
        Self::new(self.omega0, tau, segments, self.n_periods)
    }

    pub fn with_n_periods(&self, n_periods: usize) -> Result<Self> {
        Self::new(self.omega0, self.tau, self.segments.clone(), n_periods)
    }

    /// Same shape and period, with every damping rate replaced by `gamma`.
    pub fn with_uniform_gamma(&self, gamma: f64) -> Result<Self> {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.duration, s.delta, gamma))
            .collect();
        Self::new(self.omega0, self.tau, segments, self.n_periods)
    }

    /// True frequency on a segment, `ω₀√(1 − δ)`.
    pub fn segment_omega_tilde(&self, seg: &Segment) -> f64 {
        self.omega0 * (1.0 - seg.delta).sqrt()
    }

    /// Arithmetic average of `ω̃(t)` over one period.
    pub fn omega_tilde_avg(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.duration * self.segment_omega_tilde(s))
            .sum::<f64>()
            / self.tau
    }

    /// `∫₀^τ γ dt`, the damping exposure of one full period.
    pub fn exposure_per_period(&self) -> f64 {
        self.exposure_per_period
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let end = self.t_end();
        if !t.is_finite() || t < 0.0 || t > end * (1.0 + PERIOD_SUM_TOL) {
            return Err(Error::Domain(format!("t = {t} outside simulated range [0, {end}]")));
        }
        Ok(())
    }

    /// Period index, segment index and offset within the period for `t`.
    pub(crate) fn locate(&self, t: f64) -> Locus {
        let snap = BOUNDARY_SNAP * self.tau.max(t);
        let mut period = (t / self.tau).floor().max(0.0) as usize;
        let mut offset = t - period as f64 * self.tau;
        if offset < 0.0 {
            period = period.saturating_sub(1);
            offset += self.tau;
        }
        if self.tau - offset <= snap {
            period += 1;
            offset = 0.0;
        }
        // right-open segments: last start that is <= offset (after snapping)
        let n = self.segments.len();
        let seg = self.starts[..n].partition_point(|&s| s <= offset + snap) - 1;
        Locus {
            period,
            segment: seg,
            offset: offset.max(self.starts[seg]),
        }
    }

    fn exposure_at(&self, t: f64) -> f64 {
        let loc = self.locate(t);
        let seg = &self.segments[loc.segment];
        loc.period as f64 * self.exposure_per_period
            + self.exposure_before[loc.segment]
            + seg.gamma * (loc.offset - self.starts[loc.segment])
    }

    /// Segment active at `t`.
    pub fn segment_at(&self, t: f64) -> Result<&Segment> {
        self.check_range(t)?;
        Ok(&self.segments[self.locate(t).segment])
    }

    /// Splits `[t0, t1]` into pieces that each lie inside a single segment.
    pub(crate) fn pieces(&self, t0: f64, t1: f64) -> Vec<Piece<'_>> {
        let mut out = Vec::new();
        if t1 <= t0 {
            return out;
        }
        let n = self.segments.len();
        let snap = BOUNDARY_SNAP * self.tau.max(t1);
        let loc = self.locate(t0);
        let (mut period, mut seg) = (loc.period, loc.segment);
        let mut cur = t0;
        loop {
            let seg_end = period as f64 * self.tau + self.starts[seg + 1];
            if seg_end >= t1 - snap {
                if t1 > cur {
                    out.push(Piece {
                        segment: &self.segments[seg],
                        start: cur,
                        duration: t1 - cur,
                    });
                }
                break;
            }
            if seg_end > cur {
                out.push(Piece {
                    segment: &self.segments[seg],
                    start: cur,
                    duration: seg_end - cur,
                });
            }
            cur = seg_end;
            seg += 1;
            if seg == n {
                seg = 0;
                period += 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Locus {
    pub period: usize,
    pub segment: usize,
    pub offset: f64,
}

/// A stretch of time inside one constant segment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece<'a> {
    pub segment: &'a Segment,
    pub start: f64,
    pub duration: f64,
}

/// The elementary scalars at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePoint {
    pub t: f64,
    /// Accumulated damping factor, in `(0, 1]`.
    pub beta: f64,
    /// True frequency `ω̃`.
    pub omega_tilde: f64,
    /// Stretched frequency `ω̃/β`.
    pub omega: f64,
}

impl TimePoint {
    /// Builds a time point from its primitive parts; `omega` is derived.
    pub fn new(t: f64, beta: f64, omega_tilde: f64) -> Self {
        TimePoint {
            t,
            beta,
            omega_tilde,
            omega: omega_tilde / beta,
        }
    }

    /// The energy quantum `βω̃`.
    pub fn beta_omega_tilde(&self) -> f64 {
        self.beta * self.omega_tilde
    }
}

/// `β(t) = exp(−∫₀ᵗ γ)`.
pub fn beta_at(profile: &DriveProfile, t: f64) -> Result<f64> {
    profile.check_range(t)?;
    Ok((-profile.exposure_at(t)).exp())
}

/// `β` accumulated over `[t0, t1]` alone, i.e. `β(t1)/β(t0)`.
pub fn beta_between(profile: &DriveProfile, t0: f64, t1: f64) -> Result<f64> {
    profile.check_range(t0)?;
    profile.check_range(t1)?;
    Ok((profile.exposure_at(t0) - profile.exposure_at(t1)).exp())
}

pub fn frequencies_at(profile: &DriveProfile, t: f64) -> Result<TimePoint> {
    profile.check_range(t)?;
    let seg = &profile.segments[profile.locate(t).segment];
    let beta = (-profile.exposure_at(t)).exp();
    Ok(TimePoint::new(t, beta, profile.segment_omega_tilde(seg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_step() -> DriveProfile {
        DriveProfile::new(
            1.0,
            2.0,
            vec![Segment::new(1.0, 0.2, 0.2), Segment::new(1.0, -0.2, 0.0)],
            5,
        )
        .unwrap()
    }

    #[test]
    fn beta_without_dissipation_is_one() {
        let p = DriveProfile::square_wave(1.3, 2.0, 0.3, 0.0, 4).unwrap();
        for t in [0.0, 0.7, 1.0, 3.99, 8.0] {
            assert_eq!(beta_at(&p, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn beta_constant_rate() {
        let p = DriveProfile::constant(1.0, 1.0, 0.0, 0.1, 10).unwrap();
        assert_relative_eq!(beta_at(&p, 10.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn beta_two_segments_matches_quadrature() {
        let p = two_step();
        // midpoint rule on a fine grid; γ is piecewise constant so this is
        // exact up to the cells straddling a boundary
        let n = 300_000;
        let h = 3.0 / n as f64;
        let integral: f64 = (0..n)
            .map(|k| {
                let t = (k as f64 + 0.5) * h;
                p.segment_at(t).unwrap().gamma * h
            })
            .sum();
        // [0,1) and [2,3) are damped: exposure 0.4, not the 0.3 reached at t = 2.5
        assert_relative_eq!(integral, 0.4, max_relative = 1e-9);
        assert_relative_eq!(beta_at(&p, 3.0).unwrap(), (-integral).exp(), max_relative = 1e-9);
        assert_relative_eq!(beta_at(&p, 3.0).unwrap(), 0.670_320_046_035_639_3, max_relative = 1e-13);
        assert_relative_eq!(beta_at(&p, 2.5).unwrap(), 0.740_818_220_681_717_8, max_relative = 1e-13);
    }

    #[test]
    fn beta_is_multiplicative() {
        let p = two_step();
        let (t1, t2) = (1.3, 2.45);
        let whole = beta_at(&p, t1 + t2).unwrap();
        let split = beta_at(&p, t1).unwrap() * beta_between(&p, t1, t1 + t2).unwrap();
        assert_relative_eq!(whole, split, max_relative = 1e-14);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let p = two_step();
        assert!(matches!(beta_at(&p, -0.1), Err(Error::Domain(_))));
        assert!(matches!(beta_at(&p, 10.5), Err(Error::Domain(_))));
        assert!(beta_at(&p, 10.0).is_ok());
    }

    #[test]
    fn boundary_resolves_to_next_segment() {
        let p = two_step();
        assert_eq!(p.segment_at(1.0).unwrap().delta, -0.2);
        assert_eq!(p.segment_at(2.0).unwrap().delta, 0.2);
        assert_eq!(p.segment_at(3.0 * 2.0).unwrap().delta, 0.2);
        assert_eq!(p.segment_at(0.999).unwrap().delta, 0.2);
        // k·τ with a τ that is not exactly representable
        let q = DriveProfile::square_wave(1.0, 0.1, 0.3, 0.0, 50).unwrap();
        for k in 0..50 {
            assert_eq!(q.segment_at(k as f64 * 0.1).unwrap().delta, 0.3, "k = {k}");
        }
    }

    #[test]
    fn frequency_examples() {
        let p = DriveProfile::constant(1.0, 1.0, 0.0, 0.0, 3).unwrap();
        let tp = frequencies_at(&p, 1.7).unwrap();
        assert_eq!((tp.omega_tilde, tp.omega), (1.0, 1.0));

        let p = DriveProfile::constant(1.0, 1.0, 0.36, 0.0, 3).unwrap();
        assert_relative_eq!(frequencies_at(&p, 0.2).unwrap().omega_tilde, 0.8, max_relative = 1e-15);

        // δ = −0.5, ω₀ = 2 and γ chosen so that β(1) = 0.5
        let g = std::f64::consts::LN_2;
        let p = DriveProfile::constant(2.0, 1.0, -0.5, g, 3).unwrap();
        let tp = frequencies_at(&p, 1.0).unwrap();
        assert_relative_eq!(tp.beta, 0.5, max_relative = 1e-15);
        assert_relative_eq!(tp.omega_tilde, 6f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(tp.omega, 4.898_979_485_566_356, max_relative = 1e-14);
        assert_eq!(tp.omega, tp.omega_tilde / tp.beta);
    }

    #[test]
    fn frequencies_are_periodic() {
        let p = two_step();
        for t in [0.1, 0.5, 1.2, 1.9] {
            let a = frequencies_at(&p, t).unwrap();
            let b = frequencies_at(&p, t + 2.0 * p.tau()).unwrap();
            assert_eq!(a.omega_tilde, b.omega_tilde);
            assert!(b.beta < a.beta);
        }
    }

    #[test]
    fn rejects_invalid_profiles() {
        let bad = |segs, tau| DriveProfile::new(1.0, tau, segs, 1);
        assert!(matches!(
            bad(vec![Segment::new(1.0, 1.0, 0.0)], 1.0),
            Err(Error::InvalidProfile { field, .. }) if field == "segments[0].delta"
        ));
        assert!(matches!(
            bad(vec![Segment::new(1.0, 0.0, -0.1)], 1.0),
            Err(Error::InvalidProfile { field, .. }) if field == "segments[0].gamma"
        ));
        assert!(bad(vec![Segment::new(0.5, 0.0, 0.0)], 1.0).is_err());
        assert!(DriveProfile::constant(0.0, 1.0, 0.0, 0.0, 1).is_err());
        assert!(DriveProfile::constant(1.0, 1.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn pieces_tile_the_interval() {
        let p = two_step();
        let pieces = p.pieces(0.25, 5.5);
        let total: f64 = pieces.iter().map(|pc| pc.duration).sum();
        assert_relative_eq!(total, 5.25, max_relative = 1e-14);
        assert_eq!(pieces.len(), 6);
        assert_eq!(pieces[0].segment.delta, 0.2);
        assert_eq!(pieces[1].segment.delta, -0.2);
    }

    #[test]
    fn rescaling_keeps_shape() {
        let p = two_step().with_omega0_tau(7.0).unwrap();
        assert_relative_eq!(p.omega0_tau(), 7.0, max_relative = 1e-15);
        assert_relative_eq!(p.segments()[0].duration, 3.5, max_relative = 1e-15);
    }
}
