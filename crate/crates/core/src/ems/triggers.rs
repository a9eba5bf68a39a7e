//! Re-allocation triggers.

use crate::config::SystemConfig;

/// Events observed during one step that may trigger a re-allocation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepEvents {
    /// An EV connected or disconnected at a charger.
    pub ev_connection_changed: bool,
    /// PV production crossed the producing threshold in either direction.
    pub pv_switched: bool,
    /// The BMS force-detached a string.
    pub bms_detach: bool,
}

/// Fixed-cadence countdown starting at run start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timer {
    period: u32,
    countdown: u32,
}

impl Timer {
    pub fn new(period: u32) -> Self {
        Self {
            period,
            countdown: period,
        }
    }

    /// Minutes until the timer next elapses.
    pub fn countdown(&self) -> u32 {
        self.countdown
    }

    /// Advances by `dt` minutes; returns true when the period elapsed.
    pub fn tick(&mut self, dt: u32) -> bool {
        if dt >= self.countdown {
            self.countdown = self.period - (dt - self.countdown) % self.period;
            true
        } else {
            self.countdown -= dt;
            false
        }
    }
}

/// Whether the string allocation must be recomputed this step.
pub fn check_triggers(
    cfg: &SystemConfig,
    events: &StepEvents,
    timer_elapsed: bool,
    soes: &[f64],
) -> bool {
    events.ev_connection_changed
        || events.pv_switched
        || events.bms_detach
        || (timer_elapsed && soes.iter().any(|&s| s > cfg.timer_hi || s < cfg.timer_lo))
}
