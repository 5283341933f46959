//! TOML configuration.
//!
//! A single file may carry sections for every subcommand; each command reads
//! only the ones it needs. [`Config`] mirrors the file literally and
//! round-trips through [`Config::to_toml`]. The `validated_*` methods turn
//! it into checked run descriptions, reporting problems by dotted field
//! path.
//!
//! ```toml
//! output_dir = "out/squeezed"
//!
//! [profile]
//! omega0 = 1.0
//! tau = 3.0
//! n_periods = 40
//! segments = [
//!     { duration = 1.5, delta = 0.3, gamma = 0.0 },
//!     { duration = 1.5, delta = -0.3, gamma = 0.0 },
//! ]
//!
//! [scenario]
//! regime = "squeezed"
//! m_list = [0, 1, 2]
//! perturbation = { target = "rho_rate", magnitude = 1e-6 }
//! samples = { stride = 10, count = 4 }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use paramres::model::{DriveProfile, Segment};
use paramres::spectra::{LinearPhase, Regime, DEFAULT_TAIL_TOL};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_OUTPUT_DIR: &str = "out";
pub const DEFAULT_PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<BandsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figures: Option<FiguresSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selftest: Option<SelftestSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub omega0: f64,
    pub tau: f64,
    pub n_periods: usize,
    pub segments: Vec<SegmentSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub duration: f64,
    pub delta: f64,
    #[serde(default)]
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeTag {
    Displaced,
    Squeezed,
}

impl From<RegimeTag> for Regime {
    fn from(tag: RegimeTag) -> Self {
        match tag {
            RegimeTag::Displaced => Regime::Displaced,
            RegimeTag::Squeezed => Regime::Squeezed,
        }
    }
}

/// Which initial quantity receives the small kick that seeds the growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationTarget {
    /// Initial centre `α(0)`.
    Alpha,
    /// Initial centre velocity `α'(0)`.
    AlphaRate,
    /// Offset of `ρ(0)` from the equilibrium width.
    Rho,
    /// Initial width velocity `ρ'(0)`.
    RhoRate,
}

impl PerturbationTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            PerturbationTarget::Alpha => "alpha",
            PerturbationTarget::AlphaRate => "alpha_rate",
            PerturbationTarget::Rho => "rho",
            PerturbationTarget::RhoRate => "rho_rate",
        }
    }

    fn regime(&self) -> Regime {
        match self {
            PerturbationTarget::Alpha | PerturbationTarget::AlphaRate => Regime::Displaced,
            PerturbationTarget::Rho | PerturbationTarget::RhoRate => Regime::Squeezed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub target: PerturbationTarget,
    #[serde(default = "default_perturbation")]
    pub magnitude: f64,
}

fn default_perturbation() -> f64 {
    DEFAULT_PERTURBATION
}

/// Snapshot times, either listed or every `stride` periods `count` times.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub regime: RegimeTag,
    pub m_list: Vec<usize>,
    pub perturbation: Perturbation,
    pub samples: SampleSpec,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_per_period")]
    pub trajectory_per_period: usize,
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

fn default_per_period() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSpec {
    #[serde(default = "default_band_lo")]
    pub omega0_tau_min: f64,
    #[serde(default = "default_band_hi")]
    pub omega0_tau_max: f64,
    #[serde(default = "default_band_points")]
    pub n_points: usize,
}

fn default_band_lo() -> f64 {
    0.5
}

fn default_band_hi() -> f64 {
    20.0
}

fn default_band_points() -> usize {
    400
}

impl Default for BandsSpec {
    fn default() -> Self {
        BandsSpec {
            omega0_tau_min: default_band_lo(),
            omega0_tau_max: default_band_hi(),
            n_points: default_band_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub regime: RegimeTag,
    pub gammas: Vec<f64>,
    pub m_list: Vec<usize>,
    #[serde(default = "default_quantum")]
    pub beta_omega_tilde: f64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_quantum() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Fig1a,
    Fig1b,
    Fig2,
}

impl FigureKind {
    pub const ALL: [FigureKind; 3] = [FigureKind::Fig1a, FigureKind::Fig1b, FigureKind::Fig2];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureKind::Fig1a => "fig1a",
            FigureKind::Fig1b => "fig1b",
            FigureKind::Fig2 => "fig2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiguresSpec {
    #[serde(default = "default_kinds")]
    pub kinds: Vec<FigureKind>,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    /// Displaced Γ values for the mean-energy ratio curves.
    #[serde(default = "default_grid")]
    pub gamma_grid: Vec<f64>,
    /// Squeezed `𝓔/ω̃` values for the mean-energy ratio curves.
    #[serde(default = "default_grid")]
    pub energy_grid: Vec<f64>,
    /// `𝓔/ω̃` values at which the spread ratio is tabulated against `m`.
    #[serde(default = "default_fig2_energies")]
    pub fig2_energies: Vec<f64>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_kinds() -> Vec<FigureKind> {
    FigureKind::ALL.to_vec()
}

fn default_m_max() -> usize {
    5
}

fn default_grid() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0]
}

fn default_fig2_energies() -> Vec<f64> {
    vec![10.0, 100.0]
}

impl Default for FiguresSpec {
    fn default() -> Self {
        FiguresSpec {
            kinds: default_kinds(),
            m_max: default_m_max(),
            gamma_grid: default_grid(),
            energy_grid: default_grid(),
            fig2_energies: default_fig2_energies(),
            tail_tol: default_tail_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseTag {
    Unsquared,
    Squared,
}

impl From<PhaseTag> for LinearPhase {
    fn from(tag: PhaseTag) -> Self {
        match tag {
            PhaseTag::Unsquared => LinearPhase::Unsquared,
            PhaseTag::Squared => LinearPhase::Squared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestSpec {
    #[serde(default = "default_selftest_index")]
    pub max_index: usize,
    #[serde(default = "default_phase")]
    pub linear_phase: PhaseTag,
}

fn default_selftest_index() -> usize {
    8
}

fn default_phase() -> PhaseTag {
    PhaseTag::Unsquared
}

impl Default for SelftestSpec {
    fn default() -> Self {
        SelftestSpec {
            max_index: default_selftest_index(),
            linear_phase: default_phase(),
        }
    }
}

/// A validated scenario for [`crate::run_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub profile: DriveProfile,
    pub regime: Regime,
    pub m_list: Vec<usize>,
    pub perturbation: Perturbation,
    pub sample_times: Vec<f64>,
    pub tail_tol: f64,
    pub trajectory_per_period: usize,
    pub output_dir: PathBuf,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config("<toml>", e.to_string().trim_end().to_owned()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::config("<toml>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `--out` if given, else `output_dir`, else `out`.
    pub fn output_dir(&self, cli_out: Option<&Path>) -> PathBuf {
        cli_out
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn validated_profile(&self) -> Result<DriveProfile> {
        let spec = self
            .profile
            .as_ref()
            .ok_or_else(|| CliError::config("profile", "section is required for this command"))?;
        spec.build()
    }

    pub fn validated_scenario(&self, cli_out: Option<&Path>) -> Result<ScenarioConfig> {
        let profile = self.validated_profile()?;
        let s = self
            .scenario
            .as_ref()
            .ok_or_else(|| CliError::config("scenario", "section is required for this command"))?;
        let regime = Regime::from(s.regime);
        if s.perturbation.target.regime() != regime {
            return Err(CliError::config(
                "scenario.perturbation.target",
                format!(
                    "a {regime} scenario perturbs {}",
                    match regime {
                        Regime::Displaced => "'alpha' or 'alpha_rate'",
                        Regime::Squeezed => "'rho' or 'rho_rate'",
                    }
                ),
            ));
        }
        let mag = s.perturbation.magnitude;
        if !mag.is_finite() {
            return Err(CliError::config("scenario.perturbation.magnitude", format!("must be finite, got {mag}")));
        }
        if s.perturbation.target == PerturbationTarget::Rho && !(mag > -equilibrium_width(&profile)) {
            return Err(CliError::config(
                "scenario.perturbation.magnitude",
                "a width offset must leave the initial width positive",
            ));
        }
        check_m_list("scenario.m_list", &s.m_list)?;
        check_tail_tol("scenario.tail_tol", s.tail_tol)?;
        if s.trajectory_per_period == 0 {
            return Err(CliError::config("scenario.trajectory_per_period", "must be >= 1"));
        }
        let sample_times = sample_times(&s.samples, &profile)?;
        Ok(ScenarioConfig {
            profile,
            regime,
            m_list: s.m_list.clone(),
            perturbation: s.perturbation,
            sample_times,
            tail_tol: s.tail_tol,
            trajectory_per_period: s.trajectory_per_period,
            output_dir: self.output_dir(cli_out),
        })
    }

    pub fn validated_bands(&self) -> Result<(DriveProfile, BandsSpec)> {
        let profile = self.validated_profile()?;
        let b = self.bands.clone().unwrap_or_default();
        if !(b.omega0_tau_min > 0.0 && b.omega0_tau_max > b.omega0_tau_min && b.omega0_tau_max.is_finite()) {
            return Err(CliError::config(
                "bands.omega0_tau_min",
                format!("need 0 < min < max, got [{}, {}]", b.omega0_tau_min, b.omega0_tau_max),
            ));
        }
        if b.n_points < 2 {
            return Err(CliError::config("bands.n_points", "must be >= 2"));
        }
        Ok((profile, b))
    }

    pub fn validated_spectrum(&self) -> Result<SpectrumSpec> {
        let s = self
            .spectrum
            .clone()
            .ok_or_else(|| CliError::config("spectrum", "section is required for this command"))?;
        if s.gammas.is_empty() {
            return Err(CliError::config("spectrum.gammas", "must not be empty"));
        }
        let floor = match Regime::from(s.regime) {
            Regime::Displaced => 0.0,
            Regime::Squeezed => 1.0,
        };
        for (i, &g) in s.gammas.iter().enumerate() {
            if !(g >= floor && g.is_finite()) {
                return Err(CliError::config(
                    format!("spectrum.gammas[{i}]"),
                    format!("must be finite and >= {floor} for the {} regime, got {g}", Regime::from(s.regime)),
                ));
            }
        }
        check_m_list("spectrum.m_list", &s.m_list)?;
        if !(s.beta_omega_tilde > 0.0 && s.beta_omega_tilde.is_finite()) {
            return Err(CliError::config("spectrum.beta_omega_tilde", "must be finite and > 0"));
        }
        check_tail_tol("spectrum.tail_tol", s.tail_tol)?;
        Ok(s)
    }

    pub fn validated_figures(&self) -> Result<FiguresSpec> {
        let f = self.figures.clone().unwrap_or_default();
        if f.kinds.is_empty() {
            return Err(CliError::config("figures.kinds", "must not be empty"));
        }
        for (name, grid) in [
            ("figures.gamma_grid", &f.gamma_grid),
            ("figures.energy_grid", &f.energy_grid),
            ("figures.fig2_energies", &f.fig2_energies),
        ] {
            if grid.is_empty() {
                return Err(CliError::config(name, "must not be empty"));
            }
            for (i, &x) in grid.iter().enumerate() {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(CliError::config(format!("{name}[{i}]"), format!("must be finite and > 0, got {x}")));
                }
            }
        }
        check_tail_tol("figures.tail_tol", f.tail_tol)?;
        Ok(f)
    }

    pub fn validated_selftest(&self) -> Result<SelftestSpec> {
        let s = self.selftest.clone().unwrap_or_default();
        if s.max_index > paramres::spectra::ORACLE_MAX_INDEX {
            return Err(CliError::config(
                "selftest.max_index",
                format!("must be <= {}", paramres::spectra::ORACLE_MAX_INDEX),
            ));
        }
        Ok(s)
    }
}

impl ProfileSpec {
    pub fn build(&self) -> Result<DriveProfile> {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.duration, s.delta, s.gamma))
            .collect();
        DriveProfile::new(self.omega0, self.tau, segments, self.n_periods).map_err(|e| match e {
            paramres::Error::InvalidProfile { field, reason } => CliError::config(format!("profile.{field}"), reason),
            other => CliError::numerical("profile", other),
        })
    }
}

/// Width at which the first segment holds `ρ` static, `ω̃(0)^{−1/2}`.
pub fn equilibrium_width(profile: &DriveProfile) -> f64 {
    profile.segment_omega_tilde(&profile.segments()[0]).powf(-0.5)
}

fn check_m_list(path: &str, m_list: &[usize]) -> Result<()> {
    if m_list.is_empty() {
        return Err(CliError::config(path, "must not be empty"));
    }
    for (i, m) in m_list.iter().enumerate() {
        if m_list[..i].contains(m) {
            return Err(CliError::config(format!("{path}[{i}]"), format!("duplicate index {m}")));
        }
    }
    Ok(())
}

fn check_tail_tol(path: &str, tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must lie in (0, 1e-6], got {tol}")))
    }
}

fn sample_times(spec: &SampleSpec, profile: &DriveProfile) -> Result<Vec<f64>> {
    match (&spec.times, spec.stride, spec.count) {
        (Some(times), None, None) => {
            if times.is_empty() {
                return Err(CliError::config("scenario.samples.times", "must not be empty"));
            }
            let end = profile.t_end();
            for (i, &t) in times.iter().enumerate() {
                if !(t >= 0.0 && t <= end) {
                    return Err(CliError::config(
                        format!("scenario.samples.times[{i}]"),
                        format!("must lie in [0, {end}], got {t}"),
                    ));
                }
                if i > 0 && !(t > times[i - 1]) {
                    return Err(CliError::config(
                        format!("scenario.samples.times[{i}]"),
                        "times must be strictly increasing",
                    ));
                }
            }
            Ok(times.clone())
        }
        (None, Some(stride), Some(count)) => {
            if stride == 0 || count == 0 {
                return Err(CliError::config("scenario.samples", "stride and count must be >= 1"));
            }
            if stride.checked_mul(count).is_none_or(|p| p > profile.n_periods()) {
                return Err(CliError::config(
                    "scenario.samples.count",
                    format!(
                        "stride x count = {stride} x {count} exceeds n_periods = {}",
                        profile.n_periods()
                    ),
                ));
            }
            Ok((1..=count).map(|k| (k * stride) as f64 * profile.tau()).collect())
        }
        _ => Err(CliError::config(
            "scenario.samples",
            "give either `times` or both `stride` and `count`",
        )),
    }
}
