//! Simulation core for a hybrid EV fast-charging station whose battery is
//! split into independently switchable strings.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the power and
//! energy model, both inverter setpoint strategies, the string allocation
//! heuristic, scenario generation from tabulated distributions, the
//! single-run engine with its KPIs, and box-plot statistics. File formats,
//! batch orchestration and the command line live in the `evstation` crate.

#![no_std]

extern crate alloc;

pub mod config;
pub mod ems;
pub mod engine;
pub mod physics;
pub mod scenario;
pub mod seed;
pub mod stats;
pub mod types;

pub use config::{ConfigError, SystemConfig};
pub use ems::Strategy;
pub use engine::{run_simulation, simulate, RunError, RunOptions, RunOutput, RunResult, TraceRow};
pub use scenario::{Scenario, ScenarioError, ScenarioSpec};
pub use stats::{summarize, BoxStats};
pub use types::{AllocationMap, ChargingSession, ComponentId, Outcome, PowerFlows, StringState};
