//! Batch front end for the `ringsqueeze` models: flat configuration files,
//! parameter sweeps and CSV tables.

pub mod app;
pub mod commands;
pub mod config;
pub mod table;

pub use commands::{run_command, Command, Device};
pub use config::{parse_config, resolve, ConfigError, Entries, RunConfig};
pub use table::{write_table, ResultTable, Row};
