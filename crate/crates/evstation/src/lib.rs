//! File formats, Monte Carlo batch orchestration and the command line for
//! the `evstation-core` simulator.

pub mod batch;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;

pub use error::{Error, Result};
