//! File formats, experiment configs and report generation on top of
//! `corrspec-core`. The `corrspec` binary is a thin shell over
//! [`experiment`].

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use experiment::exit;
