//! Scenario configuration files and CSV output.

mod config;
mod table;

pub use config::{Config, ConfigFile, SWEEP_PARAMETERS};
pub use table::{format_float, Table};
