//! Scenario runner for `paramres`.
//!
//! Every subcommand of the `paramres` binary is a thin shell around a
//! function here, so the same work can be driven from tests or other tools:
//!
//! | command    | function                     | reads sections           |
//! |------------|------------------------------|--------------------------|
//! | `bands`    | [`scan_bands_cmd`]           | `profile`, `bands`       |
//! | `evolve`   | [`run_scenario`]             | `profile`, `scenario`    |
//! | `spectrum` | [`run_spectrum`]             | `spectrum`               |
//! | `figures`  | [`emit_figure_data`]         | `figures`                |
//! | `selftest` | [`selftest::run_selftest`]   | `selftest`               |
//!
//! Output is deterministic: the same configuration always produces
//! byte-identical files, whatever the thread count.

pub mod commands;
pub mod config;
pub mod error;
pub mod selftest;
pub mod table;

pub use commands::{emit_figure_data, run_scenario, run_spectrum, scan_bands_cmd, MomentRow, ScenarioOutput};
pub use config::{Config, FigureKind, ScenarioConfig};
pub use error::{CliError, Result};
