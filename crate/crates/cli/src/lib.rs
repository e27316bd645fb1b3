//! Scenario files, CSV datasets and plots for stroboscopic measurement runs.

pub mod commands;
pub mod csv_io;
pub mod error;
pub mod plot;
pub mod scenario;

pub use error::{CliError, Outcome};
