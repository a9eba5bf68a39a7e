//! Inverter setpoint laws: symmetric SOE droop and the forecast-driven
//! deadband variant.

use core::fmt;
use core::str::FromStr;

use crate::config::SystemConfig;

/// Inverter setpoint strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Strategy {
    /// Droop on mean SOE around the reference.
    Base,
    /// Droop with PV-forecast-dependent deadbands around the reference.
    Enhanced,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Base, Strategy::Enhanced];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Base => "base",
            Self::Enhanced => "enhanced",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy;

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("strategy must be `base` or `enhanced`")
    }
}

impl core::error::Error for UnknownStrategy {}

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Self::Base),
            "enhanced" => Ok(Self::Enhanced),
            _ => Err(UnknownStrategy),
        }
    }
}

/// Base droop: zero at `soe_ref`, saturating at full grid import at
/// `droop_lo` and full export at `droop_hi`. Positive = export.
pub fn base_droop(cfg: &SystemConfig, mean_soe: f64) -> f64 {
    let dev = mean_soe - cfg.soe_ref;
    let ratio = if dev >= 0.0 {
        dev / (cfg.droop_hi - cfg.soe_ref)
    } else {
        dev / (cfg.soe_ref - cfg.droop_lo)
    };
    cfg.p_r_grid * ratio.clamp(-1.0, 1.0)
}

/// Upper deadband edge for a forecast PV energy `e_pv_fc` (kWh).
///
/// Starts at `soe_max` and drops by the forecast's share of fleet capacity,
/// scaled by the PV-to-grid rating ratio, never below `soe_ref`.
pub fn deadband_upper(cfg: &SystemConfig, e_pv_fc: f64) -> f64 {
    let drop = e_pv_fc / cfg.fleet_capacity() * (cfg.p_r_pv / cfg.p_r_grid);
    (cfg.soe_max - drop).clamp(cfg.soe_ref, cfg.soe_max)
}

/// Lower deadband edge for a forecast PV energy `e_pv_fc` (kWh).
///
/// Ramps from `db_low_max` down to `droop_lo` as the forecast grows to what
/// the grid could deliver over the forecast horizon.
pub fn deadband_lower(cfg: &SystemConfig, e_pv_fc: f64) -> f64 {
    let horizon_h = f64::from(cfg.fc_horizon) / 60.0;
    let slope = (cfg.db_low_max - cfg.droop_lo) / (cfg.p_r_grid * horizon_h);
    (cfg.db_low_max - slope * e_pv_fc).clamp(cfg.droop_lo, cfg.db_low_max)
}

/// Enhanced setpoint: zero inside `[deadband_lower, deadband_upper]`,
/// otherwise the base droop value.
pub fn enhanced_setpoint(cfg: &SystemConfig, mean_soe: f64, e_pv_fc: f64) -> f64 {
    let lo = deadband_lower(cfg, e_pv_fc);
    let hi = deadband_upper(cfg, e_pv_fc);
    if (lo..=hi).contains(&mean_soe) {
        0.0
    } else {
        base_droop(cfg, mean_soe)
    }
}

/// Proposed inverter AC setpoint for `strategy`.
pub fn setpoint(cfg: &SystemConfig, strategy: Strategy, mean_soe: f64, e_pv_fc: f64) -> f64 {
    match strategy {
        Strategy::Base => base_droop(cfg, mean_soe),
        Strategy::Enhanced => enhanced_setpoint(cfg, mean_soe, e_pv_fc),
    }
}

/// Clamps an AC setpoint so the grid exchange `p_inv - p_aux` stays within
/// the grid rating. Zero when no string is attached to the inverter.
pub fn clip_setpoint_to_grid(
    cfg: &SystemConfig,
    p_set: f64,
    p_aux: f64,
    inverter_attached: bool,
) -> f64 {
    if !inverter_attached {
        return 0.0;
    }
    p_set.clamp(-cfg.p_r_grid + p_aux, cfg.p_r_grid + p_aux)
}
