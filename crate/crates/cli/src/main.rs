use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paramres_cli::config::Config;
use paramres_cli::{emit_figure_data, run_scenario, run_spectrum, scan_bands_cmd, selftest, CliError, Result};

/// Parametric resonance of a damped oscillator: bands, auxiliary dynamics
/// and energy distributions, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "paramres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output_dir` in the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Floquet band scan over ω₀τ for the configured profile.
    Bands,
    /// Run a scenario: trajectory, Γ(t), distributions and moments.
    Evolve,
    /// Distributions at explicitly listed Γ values.
    Spectrum,
    /// Data for the mean-energy and spread figures.
    Figures,
    /// Check the closed-form laws against quadrature and identities.
    Selftest,
}

fn load(path: Option<&Path>, required: bool) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None if required => Err(CliError::config("--config", "this command needs a configuration file")),
        None => Ok(Config::default()),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config_path = cli.config.as_deref();
    let out = cli.out.as_deref();
    match cli.command {
        Command::Bands => {
            let cfg = load(config_path, true)?;
            let (profile, spec) = cfg.validated_bands()?;
            let dir = cfg.output_dir(out);
            let (grid, edges) = scan_bands_cmd(&profile, &spec)?;
            grid.write_to(&dir.join("bands.csv"))?;
            edges.write_to(&dir.join("band_edges.csv"))?;
            println!("wrote {}", dir.display());
        }
        Command::Evolve => {
            let cfg = load(config_path, true)?;
            let scenario = cfg.validated_scenario(out)?;
            let result = run_scenario(&scenario)?;
            println!("wrote {} files to {}", result.files.len(), scenario.output_dir.display());
        }
        Command::Spectrum => {
            let cfg = load(config_path, true)?;
            let spec = cfg.validated_spectrum()?;
            let dir = cfg.output_dir(out);
            let files = run_spectrum(&spec, &dir)?;
            println!("wrote {} files to {}", files.len(), dir.display());
        }
        Command::Figures => {
            let cfg = load(config_path, false)?;
            let spec = cfg.validated_figures()?;
            let dir = cfg.output_dir(out);
            for &kind in &spec.kinds {
                emit_figure_data(kind, &spec)?.write_to(&dir.join(format!("{}.csv", kind.as_str())))?;
            }
            println!("wrote {}", dir.display());
        }
        Command::Selftest => {
            let cfg = load(config_path, false)?;
            let spec = cfg.validated_selftest()?;
            let checks = selftest::run_selftest(spec.max_index, spec.linear_phase.into())?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            for c in &checks {
                println!("{}", c.line());
            }
            if failed > 0 {
                return Err(CliError::Selftest(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: could not start {} worker threads: {e}", cli.threads);
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
