//! Power and energy bookkeeping for one step: string losses and SOE
//! integration, inverter conversion, auxiliary consumption, grid balance and
//! BMS limit enforcement.

use alloc::vec::Vec;

use crate::config::SystemConfig;
use crate::types::{AllocationMap, ComponentId, StringState};

/// String efficiency at terminal power `p` (kW).
///
/// Linear in `|p|`: 1 at 0 kW, `eff_anchor_eta` at `eff_anchor_power`, and
/// extrapolated along the same line beyond the anchor.
pub fn string_efficiency(cfg: &SystemConfig, p: f64) -> f64 {
    1.0 - (1.0 - cfg.eff_anchor_eta) / cfg.eff_anchor_power * libm::fabs(p)
}

/// Internal (stored-energy side) power for a terminal power.
///
/// Discharging draws `p / eta` from storage; charging stores `p * eta`.
pub fn internal_power(cfg: &SystemConfig, p_terminal: f64) -> f64 {
    if p_terminal > 0.0 {
        p_terminal / string_efficiency(cfg, p_terminal)
    } else if p_terminal < 0.0 {
        p_terminal * string_efficiency(cfg, p_terminal)
    } else {
        0.0
    }
}

/// Heat dissipated in a string at `p_terminal` (kW, >= 0).
pub fn string_loss(cfg: &SystemConfig, p_terminal: f64) -> f64 {
    internal_power(cfg, p_terminal) - p_terminal
}

/// SOE after `dt` minutes at constant terminal power.
pub fn integrate_soe(cfg: &SystemConfig, soe: f64, p_terminal: f64, dt: u32) -> f64 {
    let p_int = internal_power(cfg, p_terminal);
    soe - p_int * (f64::from(dt) / 60.0) / cfg.e_cap_str
}

/// Result of passing DC power through the inverter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverterFlow {
    /// DC power after rating clip (kW, positive = export).
    pub p_dc: f64,
    /// AC power (kW, positive = export).
    pub p_ac: f64,
    /// The requested DC power exceeded the rating.
    pub clipped: bool,
}

impl InverterFlow {
    /// Conversion loss (kW, >= 0).
    pub fn loss(&self) -> f64 {
        self.p_dc - self.p_ac
    }
}

/// AC side of the inverter for a DC-side power.
///
/// The same efficiency applies in both directions. Standby consumption is
/// booked under auxiliary power, not here.
pub fn inverter_ac_power(cfg: &SystemConfig, p_dc: f64) -> InverterFlow {
    let limit = cfg.p_r_inverter;
    let clipped = libm::fabs(p_dc) > limit;
    let p_dc = p_dc.clamp(-limit, limit);
    let p_ac = if p_dc >= 0.0 {
        p_dc * cfg.eta_inv
    } else {
        p_dc / cfg.eta_inv
    };
    InverterFlow {
        p_dc,
        p_ac,
        clipped,
    }
}

/// DC power that yields `p_ac` on the AC side (inverse of
/// [`inverter_ac_power`] before clipping).
pub fn inverter_dc_power(cfg: &SystemConfig, p_ac: f64) -> f64 {
    if p_ac >= 0.0 {
        p_ac / cfg.eta_inv
    } else {
        p_ac * cfg.eta_inv
    }
}

/// Auxiliary consumption: constant base, inverter standby and the thermal
/// management load needed to remove `heat_load` kW of losses.
pub fn aux_power(cfg: &SystemConfig, heat_load: f64) -> f64 {
    cfg.aux_base + cfg.p_standby_inv + heat_load / cfg.hvac_cop
}

/// Power at the grid connection point (positive = export).
pub fn grid_power(p_inv_ac: f64, p_aux: f64) -> f64 {
    p_inv_ac - p_aux
}

/// Whether the BMS lets a string at `soe` carry `p_terminal`: no further
/// discharge at or below the lower limit, no further charge at or above the
/// upper one.
pub fn bms_permits(cfg: &SystemConfig, soe: f64, p_terminal: f64) -> bool {
    if p_terminal > 0.0 {
        soe > cfg.soe_min
    } else if p_terminal < 0.0 {
        soe < cfg.soe_max
    } else {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoeLimit {
    Lower,
    Upper,
}

/// A string forcibly disconnected by the BMS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetachEvent {
    pub string: usize,
    /// Component the string was serving.
    pub from: ComponentId,
    pub limit: SoeLimit,
    pub soe: f64,
}

/// Detaches every attached string whose SOE left `[soe_min, soe_max]`
/// during this step (`soe_before` inside, current SOE outside), clearing
/// its EV lock. Strings already outside keep their attachment; the
/// [`bms_permits`] guard stops flows that would push them further out.
/// Returns one event per detached string; callers treat each as a
/// re-allocation trigger.
pub fn enforce_bms_limits(
    cfg: &SystemConfig,
    states: &mut [StringState],
    soe_before: &[f64],
    map: &mut AllocationMap,
) -> Vec<DetachEvent> {
    let inside = |soe: f64| (cfg.soe_min..=cfg.soe_max).contains(&soe);
    let mut events = Vec::new();
    for (s, &before) in states.iter_mut().zip(soe_before) {
        let limit = if !inside(before) {
            continue;
        } else if s.soe < cfg.soe_min {
            SoeLimit::Lower
        } else if s.soe > cfg.soe_max {
            SoeLimit::Upper
        } else {
            continue;
        };
        let from = map.get(s.id);
        if from == ComponentId::Idle {
            continue;
        }
        map.detach(s.id);
        s.attached = ComponentId::Idle;
        s.locked_to_ev = false;
        events.push(DetachEvent {
            string: s.id,
            from,
            limit,
            soe: s.soe,
        });
    }
    events
}

/// Energy dissipated or consumed inside the station over a run (kWh).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossLedger {
    pub e_loss_strings: f64,
    pub e_loss_inverter: f64,
    pub e_aux: f64,
}

impl LossLedger {
    pub fn book(&mut self, loss_strings: f64, loss_inverter: f64, aux: f64, hours: f64) {
        self.e_loss_strings += loss_strings * hours;
        self.e_loss_inverter += loss_inverter * hours;
        self.e_aux += aux * hours;
    }

    pub fn losses(&self) -> f64 {
        self.e_loss_strings + self.e_loss_inverter
    }
}
