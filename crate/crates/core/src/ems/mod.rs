//! Energy management: inverter setpoint, PV forecast, re-allocation
//! triggers and the string allocation heuristic.

pub mod allocation;
pub mod forecast;
pub mod setpoint;
pub mod triggers;

pub use allocation::{
    allocate_strings, deviation_responsibility_select, AllocationDecision, AllocationRequest,
};
pub use forecast::{pv_energy_forecast, PerfectForesight, PvForecast};
pub use setpoint::{
    base_droop, clip_setpoint_to_grid, deadband_lower, deadband_upper, enhanced_setpoint, setpoint,
    Strategy, UnknownStrategy,
};
pub use triggers::{check_triggers, StepEvents, Timer};

use crate::config::SystemConfig;
use crate::types::AllocationMap;

/// Decision state of the EMS within one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmsState {
    pub strategy: Strategy,
    /// Upper deadband edge last computed (enhanced only).
    pub soe_db_up: f64,
    /// Lower deadband edge last computed (enhanced only).
    pub soe_db_low: f64,
    /// Forecast PV energy over the horizon (kWh).
    pub e_pv_fc: f64,
    pub timer: Timer,
    pub proposed: AllocationMap,
    /// Inverter AC setpoint after grid clipping (kW).
    pub p_inv_set: f64,
}

impl EmsState {
    pub fn new(cfg: &SystemConfig, strategy: Strategy) -> Self {
        Self {
            strategy,
            soe_db_up: cfg.soe_max,
            soe_db_low: cfg.db_low_max,
            e_pv_fc: 0.0,
            timer: Timer::new(cfg.timer_period),
            proposed: AllocationMap::new(cfg.n_str),
            p_inv_set: 0.0,
        }
    }

    /// Updates forecast, deadbands and the unclipped setpoint for the
    /// current mean SOE. Returns the proposed AC setpoint.
    pub fn propose_setpoint(&mut self, cfg: &SystemConfig, mean_soe: f64, e_pv_fc: f64) -> f64 {
        self.e_pv_fc = e_pv_fc;
        if self.strategy == Strategy::Enhanced {
            self.soe_db_up = deadband_upper(cfg, e_pv_fc);
            self.soe_db_low = deadband_lower(cfg, e_pv_fc);
        }
        setpoint(cfg, self.strategy, mean_soe, e_pv_fc)
    }
}
