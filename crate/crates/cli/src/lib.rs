//! Library side of the `gqest` command-line tool.

pub mod commands;
pub mod config;
pub mod data;
pub mod selftest;

pub use commands::{cmd_estimate, cmd_experiment, render_plotdata, EstimateOutput, EstimateParams};
pub use config::{parse_config, parse_config_str, CliConfig, OutputFormat};
pub use data::{parse_measurements, read_measurements};
