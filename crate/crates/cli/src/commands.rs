use std::path::{Path, PathBuf};

use paramres::classical::{
    propagate_ermakov, propagate_linear, sample_grid, scan_bands, OscState, Trajectory,
};
use paramres::model::{frequencies_at, DriveProfile};
use paramres::spectra::{
    asymptotic_moments, build_distribution, energy_stddev, gamma_displaced, gamma_squeezed, mean_energy_with_error,
    EnergyDistribution, GammaValue, Regime,
};
use rayon::prelude::*;

use crate::config::{equilibrium_width, BandsSpec, FigureKind, FiguresSpec, PerturbationTarget, ScenarioConfig, SpectrumSpec};
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

const UNITS_NOTE: &str = "natural units: hbar = mass = 1; times in the same unit as 1/omega0";

/// Initial state of the active auxiliary function.
pub fn initial_state(cfg: &ScenarioConfig) -> OscState {
    let eps = cfg.perturbation.magnitude;
    match cfg.perturbation.target {
        PerturbationTarget::Alpha => OscState::new(eps, 0.0),
        PerturbationTarget::AlphaRate => OscState::new(0.0, eps),
        PerturbationTarget::Rho => OscState::new(equilibrium_width(&cfg.profile) + eps, 0.0),
        PerturbationTarget::RhoRate => OscState::new(equilibrium_width(&cfg.profile), eps),
    }
}

fn propagate(cfg: &ScenarioConfig, times: &[f64]) -> Result<Trajectory> {
    let init = initial_state(cfg);
    let tr = match cfg.regime {
        Regime::Displaced => propagate_linear(&cfg.profile, init, times).map(Trajectory::into_alpha),
        Regime::Squeezed => propagate_ermakov(&cfg.profile, init, times),
    };
    tr.map_err(|e| CliError::numerical("propagating the auxiliary function", e))
}

/// Γ for the active regime at one propagated state.
fn gamma_at(cfg: &ScenarioConfig, tp: &paramres::model::TimePoint, state: OscState) -> paramres::Result<GammaValue> {
    match cfg.regime {
        Regime::Displaced => gamma_displaced(state, tp, cfg.profile.omega_tilde_avg()),
        Regime::Squeezed => gamma_squeezed(state, tp),
    }
}

/// One row of the moments summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub sample: usize,
    pub t: f64,
    pub m: usize,
    pub gamma: f64,
    pub e_cl: f64,
    pub mean: f64,
    pub mean_error: f64,
    pub stddev: f64,
    pub asymptotic_mean: f64,
    pub asymptotic_stddev: f64,
}

impl MomentRow {
    fn from_distribution(sample: usize, t: f64, dist: &EnergyDistribution) -> Self {
        let g = dist.gamma;
        let (mean, mean_error) = mean_energy_with_error(dist);
        let (asymptotic_mean, asymptotic_stddev) =
            asymptotic_moments(dist.m, g.regime, g.e_cl, g.beta_omega_tilde).unwrap_or((f64::NAN, f64::NAN));
        MomentRow {
            sample,
            t,
            m: dist.m,
            gamma: g.gamma,
            e_cl: g.e_cl,
            mean,
            mean_error,
            stddev: energy_stddev(dist),
            asymptotic_mean,
            asymptotic_stddev,
        }
    }

    fn cells(&self) -> Vec<Cell> {
        let ratio = |a: f64, b: f64| if b != 0.0 { a / b } else { f64::NAN };
        vec![
            self.sample.into(),
            self.t.into(),
            self.m.into(),
            self.gamma.into(),
            self.e_cl.into(),
            self.mean.into(),
            self.mean_error.into(),
            self.stddev.into(),
            ratio(self.mean, self.e_cl).into(),
            ratio(self.stddev, self.e_cl).into(),
            self.asymptotic_mean.into(),
            self.asymptotic_stddev.into(),
            (ratio(self.mean, self.asymptotic_mean) - 1.0).into(),
            (ratio(self.stddev, self.asymptotic_stddev) - 1.0).into(),
        ]
    }
}

const MOMENT_COLUMNS: [(&str, &str); 14] = [
    ("sample", "index"),
    ("t", "time"),
    ("m", "index"),
    ("gamma", "1"),
    ("e_cl", "energy"),
    ("mean_energy", "energy"),
    ("mean_energy_error", "energy"),
    ("energy_stddev", "energy"),
    ("mean_over_e_cl", "1"),
    ("stddev_over_e_cl", "1"),
    ("asymptotic_mean", "energy"),
    ("asymptotic_stddev", "energy"),
    ("mean_rel_dev", "1"),
    ("stddev_rel_dev", "1"),
];

/// Files written by a scenario run and the moments they summarize.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub files: Vec<PathBuf>,
    pub moments: Vec<MomentRow>,
}

/// Propagates the auxiliary function, forms Γ at each sample time, builds
/// every `(m, sample)` distribution and writes the result bundle:
///
/// * `trajectory.csv`: the auxiliary function on a fine grid,
/// * `gamma.csv`: Γ, the classical energy and `β`, `ω̃` per sample time,
/// * `distributions/m{m}_s{k}.csv`: one distribution per `(m, sample)`,
/// * `moments.csv`: means, spreads and their asymptotic predictions.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let out = &cfg.output_dir;
    let mut files = Vec::new();
    let header = scenario_header(cfg);

    let fine = sample_grid(&cfg.profile, cfg.trajectory_per_period);
    let traj = propagate(cfg, &fine)?;
    let mut t = Table::new(
        &[header.clone(), format!("auxiliary function: {}", traj.kind.as_str())],
        &[
            ("t", "time"),
            ("value", "length"),
            ("derivative", "length/time"),
            ("beta", "1"),
            ("omega_tilde", "1/time"),
        ],
    );
    let t0 = frequencies_at(&cfg.profile, 0.0).map_err(|e| CliError::numerical("t = 0", e))?;
    let init = initial_state(cfg);
    let rows = std::iter::once((t0, init)).chain(traj.samples.iter().copied());
    for (tp, s) in rows {
        t.row(vec![tp.t.into(), s.value.into(), s.derivative.into(), tp.beta.into(), tp.omega_tilde.into()]);
    }
    files.push(t.write_to(&out.join("trajectory.csv"))?);

    let snapshots = snapshot_states(cfg)?;
    let gammas = snapshots
        .iter()
        .enumerate()
        .map(|(k, (tp, s))| {
            gamma_at(cfg, tp, *s).map_err(|e| CliError::numerical(format!("sample {k} (t = {})", tp.t), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        &[header.clone()],
        &[
            ("sample", "index"),
            ("t", "time"),
            ("gamma", "1"),
            ("e_cl", "energy"),
            ("beta", "1"),
            ("omega_tilde", "1/time"),
            ("beta_omega_tilde", "energy"),
        ],
    );
    for (k, ((tp, _), g)) in snapshots.iter().zip(&gammas).enumerate() {
        t.row(vec![
            k.into(),
            tp.t.into(),
            g.gamma.into(),
            g.e_cl.into(),
            tp.beta.into(),
            tp.omega_tilde.into(),
            g.beta_omega_tilde.into(),
        ]);
    }
    files.push(t.write_to(&out.join("gamma.csv"))?);

    let jobs: Vec<(usize, usize)> = (0..snapshots.len())
        .flat_map(|k| cfg.m_list.iter().map(move |&m| (k, m)))
        .collect();
    let dists = jobs
        .par_iter()
        .map(|&(k, m)| {
            build_distribution(m, &gammas[k], cfg.tail_tol).map_err(|e| {
                CliError::numerical(format!("distribution m = {m} at sample {k} (t = {})", snapshots[k].0.t), e)
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut moments = Vec::with_capacity(dists.len());
    for (&(k, m), dist) in jobs.iter().zip(&dists) {
        let t = snapshots[k].0.t;
        let path = out.join("distributions").join(format!("m{m}_s{k}.csv"));
        files.push(distribution_table(dist, &[header.clone(), format!("sample {k}, t = {}", crate::table::fmt_f64(t))]).write_to(&path)?);
        moments.push(MomentRow::from_distribution(k, t, dist));
    }
    let mut t = Table::new(&[header], &MOMENT_COLUMNS);
    for row in &moments {
        t.row(row.cells());
    }
    files.push(t.write_to(&out.join("moments.csv"))?);
    Ok(ScenarioOutput { files, moments })
}

fn snapshot_states(cfg: &ScenarioConfig) -> Result<Vec<(paramres::model::TimePoint, OscState)>> {
    // a leading t = 0 sample is the initial state itself
    let (zero, rest): (Vec<f64>, Vec<f64>) = cfg.sample_times.iter().partition(|&&t| t == 0.0);
    let mut states = Vec::with_capacity(cfg.sample_times.len());
    if !zero.is_empty() {
        let tp = frequencies_at(&cfg.profile, 0.0).map_err(|e| CliError::numerical("t = 0", e))?;
        states.push((tp, initial_state(cfg)));
    }
    if !rest.is_empty() {
        states.extend(propagate(cfg, &rest)?.samples);
    }
    Ok(states)
}

fn scenario_header(cfg: &ScenarioConfig) -> String {
    format!(
        "regime = {}, omega0 = {}, tau = {}, n_periods = {}, perturbation = {} {}; {UNITS_NOTE}",
        cfg.regime,
        cfg.profile.omega0(),
        cfg.profile.tau(),
        cfg.profile.n_periods(),
        cfg.perturbation.target.as_str(),
        cfg.perturbation.magnitude
    )
}

/// `n, P, cumulative` with the distribution's metadata in the comments.
pub fn distribution_table(dist: &EnergyDistribution, extra: &[String]) -> Table {
    let f = crate::table::fmt_f64;
    let mut comments = extra.to_vec();
    comments.push(format!(
        "m = {}, gamma = {}, regime = {}, beta_omega_tilde = {}, n_max = {}, tail_mass = {}",
        dist.m,
        f(dist.gamma.gamma),
        dist.gamma.regime,
        f(dist.gamma.beta_omega_tilde),
        dist.n_max,
        f(dist.tail_mass)
    ));
    let mut t = Table::new(&comments, &[("n", "index"), ("P", "probability"), ("cumulative", "probability")]);
    for (n, (p, c)) in dist.probs.iter().zip(dist.cumulative()).enumerate() {
        t.row(vec![n.into(), (*p).into(), c.into()]);
    }
    t
}

/// Distributions at explicitly given Γ values, without any dynamics.
pub fn run_spectrum(spec: &SpectrumSpec, out: &Path) -> Result<Vec<PathBuf>> {
    let regime = Regime::from(spec.regime);
    let jobs: Vec<(usize, usize)> = (0..spec.gammas.len())
        .flat_map(|k| spec.m_list.iter().map(move |&m| (k, m)))
        .collect();
    let dists = jobs
        .par_iter()
        .map(|&(k, m)| {
            let g = spec.gammas[k];
            let gv = match regime {
                Regime::Displaced => GammaValue::displaced(g, spec.beta_omega_tilde),
                Regime::Squeezed => GammaValue::squeezed(g, spec.beta_omega_tilde),
            }
            .and_then(|gv| build_distribution(m, &gv, spec.tail_tol));
            gv.map_err(|e| CliError::numerical(format!("spectrum m = {m}, gamma = {g}"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    let mut t = Table::new(&[format!("regime = {regime}; {UNITS_NOTE}")], &MOMENT_COLUMNS);
    for (&(k, m), dist) in jobs.iter().zip(&dists) {
        let path = out.join("spectrum").join(format!("m{m}_g{k}.csv"));
        files.push(distribution_table(dist, &[UNITS_NOTE.to_owned()]).write_to(&path)?);
        t.row(MomentRow::from_distribution(k, 0.0, dist).cells());
    }
    files.push(t.write_to(&out.join("spectrum_moments.csv"))?);
    Ok(files)
}

/// Band scan of `template` as two tables: the grid and the refined edges.
pub fn scan_bands_cmd(template: &DriveProfile, spec: &BandsSpec) -> Result<(Table, Table)> {
    let scan = scan_bands(template, (spec.omega0_tau_min, spec.omega0_tau_max), spec.n_points)
        .map_err(|e| CliError::numerical("band scan", e))?;
    let header = format!(
        "band scan over omega0*tau in [{}, {}], {} points, {} band(s); segment fractions and rates held fixed; {UNITS_NOTE}",
        spec.omega0_tau_min,
        spec.omega0_tau_max,
        spec.n_points,
        scan.band_count()
    );
    let mut grid = Table::new(
        &[header.clone()],
        &[("omega0_tau", "1"), ("growth_exponent", "1/time"), ("in_band", "bool")],
    );
    for p in &scan.points {
        grid.row(vec![p.omega0_tau.into(), p.growth_exponent.into(), p.in_band.into()]);
    }
    let mut edges = Table::new(&[header], &[("edge", "index"), ("omega0_tau", "1")]);
    for (i, e) in scan.edges.iter().enumerate() {
        edges.row(vec![i.into(), (*e).into()]);
    }
    Ok((grid, edges))
}

/// Squeezed Γ of a width at rest with classical energy `e_cl`, for
/// `β = ω̃ = 1`.
pub fn squeezed_at_turning_point(e_cl: f64) -> paramres::Result<GammaValue> {
    let unit = paramres::model::TimePoint::new(0.0, 1.0, 1.0);
    gamma_squeezed(OscState::new((2.0 * e_cl).sqrt(), 0.0), &unit)
}

/// Figure data as a CSV table, computed analytically from Γ with `β = ω̃ = 1`.
///
/// * `fig1a`: displaced `⟨𝓗⟩_m/E` against Γ, with asymptote 1.
/// * `fig1b`: squeezed `⟨𝓗⟩_m/𝓔` against `𝓔/ω̃`, with asymptote `m + ½`.
/// * `fig2`: squeezed `σ_m/𝓔` against `m` for each requested `𝓔/ω̃`, with
///   asymptote `√((m+1)² − m)/√2`.
///
/// In the squeezed figures the packet sits at a turning point of its width,
/// `ρ' = 0` and `ρ = √(2𝓔)/ω̃`, so Γ keeps its `1/(4ωρ²)` term.
pub fn emit_figure_data(kind: FigureKind, spec: &FiguresSpec) -> Result<Table> {
    let ms: Vec<usize> = (0..=spec.m_max).collect();
    let dist = |regime: Regime, x: f64, m: usize| -> Result<EnergyDistribution> {
        let gv = match regime {
            Regime::Displaced => GammaValue::displaced(x, 1.0),
            Regime::Squeezed => squeezed_at_turning_point(x),
        };
        gv.and_then(|g| build_distribution(m, &g, spec.tail_tol))
            .map_err(|e| CliError::numerical(format!("{} at x = {x}, m = {m}", kind.as_str()), e))
    };
    let note = format!("{}; {UNITS_NOTE}; beta = omega_tilde = 1", kind.as_str());
    match kind {
        FigureKind::Fig1a | FigureKind::Fig1b => {
            let (regime, grid, xname) = if kind == FigureKind::Fig1a {
                (Regime::Displaced, &spec.gamma_grid, "gamma")
            } else {
                (Regime::Squeezed, &spec.energy_grid, "e_cl_over_omega_tilde")
            };
            let jobs: Vec<(f64, usize)> = grid.iter().flat_map(|&x| ms.iter().map(move |&m| (x, m))).collect();
            let rows = jobs
                .par_iter()
                .map(|&(x, m)| {
                    let d = dist(regime, x, m)?;
                    let ratio = paramres::spectra::mean_energy(&d) / d.gamma.e_cl;
                    let asym = match regime {
                        Regime::Displaced => 1.0,
                        Regime::Squeezed => m as f64 + 0.5,
                    };
                    Ok(vec![x.into(), m.into(), d.gamma.gamma.into(), ratio.into(), asym.into()])
                })
                .collect::<Result<Vec<Vec<Cell>>>>()?;
            let mut t = Table::new(
                &[note],
                &[(xname, "1"), ("m", "index"), ("gamma", "1"), ("mean_over_e_cl", "1"), ("asymptote", "1")],
            );
            rows.into_iter().for_each(|r| t.row(r));
            Ok(t)
        }
        FigureKind::Fig2 => {
            let names: Vec<String> = spec.fig2_energies.iter().map(|e| format!("sigma_over_e_cl_at_{e}")).collect();
            let mut cols: Vec<(&str, &str)> = vec![("m", "index")];
            cols.extend(names.iter().map(|n| (n.as_str(), "1")));
            cols.push(("asymptote", "1"));
            let rows = ms
                .par_iter()
                .map(|&m| {
                    let mut row: Vec<Cell> = vec![m.into()];
                    for &e in &spec.fig2_energies {
                        let d = dist(Regime::Squeezed, e, m)?;
                        row.push((energy_stddev(&d) / d.gamma.e_cl).into());
                    }
                    let mf = m as f64;
                    row.push((((mf + 1.0) * (mf + 1.0) - mf) / 2.0).sqrt().into());
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(&[note], &cols);
            rows.into_iter().for_each(|r| t.row(r));
            Ok(t)
        }
    }
}
