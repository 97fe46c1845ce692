//! File formats, Monte Carlo experiments and the command-line front end built
//! on [`slereg_core`].

pub mod error;
pub mod experiments;
pub mod format;
pub mod io;
pub mod manifest;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentKind, Outcome, Report};
pub use runner::Runner;
