//! Station ratings, battery limits and control parameters.

use core::fmt;

/// Static description of the station: ratings, capacities, efficiencies,
/// SOE limits and EMS tuning. SOE values are fractions in `[0, 1]`; powers
/// in kW, energies in kWh, durations in whole minutes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SystemConfig {
    /// Number of battery strings.
    pub n_str: usize,
    /// Nominal energy capacity of one string (kWh).
    pub e_cap_str: f64,
    /// PV peak rating (kWp).
    pub p_r_pv: f64,
    /// Grid connection limit (kW).
    pub p_r_grid: f64,
    /// Rating of each of the two charger outlets (kW).
    pub p_r_charger: f64,
    /// Grid-tie inverter rating, DC side (kW).
    pub p_r_inverter: f64,
    pub soe_min: f64,
    pub soe_max: f64,
    /// Droop reference SOE (zero inverter setpoint).
    pub soe_ref: f64,
    /// SOE where the droop saturates at full import.
    pub droop_lo: f64,
    /// SOE where the droop saturates at full export.
    pub droop_hi: f64,
    /// Ceiling of the lower deadband edge of the enhanced strategy.
    pub db_low_max: f64,
    /// Inverter conversion efficiency, both directions.
    pub eta_inv: f64,
    /// Inverter standby draw, booked as auxiliary (kW).
    pub p_standby_inv: f64,
    /// String efficiency falls linearly from 1 at 0 kW to `eff_anchor_eta`
    /// at `eff_anchor_power`.
    pub eff_anchor_power: f64,
    pub eff_anchor_eta: f64,
    /// PV energy forecast horizon (minutes).
    pub fc_horizon: u32,
    /// Simulation step (minutes).
    pub step: u32,
    /// Constant auxiliary consumption (electronics, fans) (kW).
    pub aux_base: f64,
    /// Coefficient of performance of the thermal management system.
    pub hvac_cop: f64,
    /// Re-allocation timer period (minutes).
    pub timer_period: u32,
    pub timer_hi: f64,
    pub timer_lo: f64,
    /// PV counts as producing above this power (kW).
    pub pv_threshold: f64,
    /// Initial SOE of every string.
    pub soe_init: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_str: 3,
            e_cap_str: 104.0,
            p_r_pv: 61.0,
            p_r_grid: 43.0,
            p_r_charger: 175.0,
            p_r_inverter: 66.0,
            soe_min: 0.10,
            soe_max: 0.90,
            soe_ref: 0.50,
            droop_lo: 0.30,
            droop_hi: 0.70,
            db_low_max: 0.40,
            eta_inv: 0.98,
            p_standby_inv: 0.10,
            eff_anchor_power: 120.0,
            eff_anchor_eta: 0.90,
            fc_horizon: 60,
            step: 1,
            aux_base: 0.5,
            hvac_cop: 3.0,
            timer_period: 10,
            timer_hi: 0.80,
            timer_lo: 0.20,
            pv_threshold: 0.1,
            soe_init: 0.50,
        }
    }
}

/// A violated [`SystemConfig`] invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// The SOE thresholds are not strictly ordered as
    /// `0 <= soe_min < droop_lo < soe_ref < droop_hi <= soe_max <= 1`.
    SoeOrdering,
    /// `droop_lo <= db_low_max < soe_ref` does not hold.
    DeadbandOrdering,
    /// `soe_min <= timer_lo < timer_hi <= soe_max` does not hold.
    TimerThresholds,
    /// Initial SOE outside `[soe_min, soe_max]`.
    InitialSoe,
    /// A rating, capacity or coefficient that must be strictly positive is not.
    NonPositive(&'static str),
    /// An efficiency outside `(0, 1]`.
    Efficiency(&'static str),
    /// `step` does not divide `timer_period` (or `fc_horizon`).
    StepDivisibility(&'static str),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SoeOrdering => f.write_str(
                "soe ordering violated: need 0 <= soe_min < droop_lo < soe_ref < droop_hi <= soe_max <= 1",
            ),
            Self::DeadbandOrdering => {
                f.write_str("deadband ordering violated: need droop_lo <= db_low_max < soe_ref")
            }
            Self::TimerThresholds => {
                f.write_str("timer thresholds violated: need soe_min <= timer_lo < timer_hi <= soe_max")
            }
            Self::InitialSoe => f.write_str("soe_init must lie within [soe_min, soe_max]"),
            Self::NonPositive(name) => write!(f, "{name} must be strictly positive"),
            Self::Efficiency(name) => write!(f, "{name} must lie in (0, 1]"),
            Self::StepDivisibility(name) => write!(f, "step must divide {name}"),
        }
    }
}

impl core::error::Error for ConfigError {}

impl SystemConfig {
    /// Checks every invariant and returns the config unchanged if all hold.
    /// The first violated invariant is reported.
    pub fn validate(self) -> Result<Self, ConfigError> {
        let positive: [(&'static str, f64); 8] = [
            ("e_cap_str", self.e_cap_str),
            ("p_r_pv", self.p_r_pv),
            ("p_r_grid", self.p_r_grid),
            ("p_r_charger", self.p_r_charger),
            ("p_r_inverter", self.p_r_inverter),
            ("eff_anchor_power", self.eff_anchor_power),
            ("hvac_cop", self.hvac_cop),
            ("pv_threshold", self.pv_threshold),
        ];
        if self.n_str == 0 {
            return Err(ConfigError::NonPositive("n_str"));
        }
        for (name, v) in positive {
            // NaN fails this too
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if self.step == 0 {
            return Err(ConfigError::NonPositive("step"));
        }
        if self.timer_period == 0 {
            return Err(ConfigError::NonPositive("timer_period"));
        }
        if self.fc_horizon == 0 {
            return Err(ConfigError::NonPositive("fc_horizon"));
        }
        if !(self.aux_base >= 0.0) {
            return Err(ConfigError::NonPositive("aux_base"));
        }
        if !(self.p_standby_inv >= 0.0) {
            return Err(ConfigError::NonPositive("p_standby_inv"));
        }
        let ordered = 0.0 <= self.soe_min
            && self.soe_min < self.droop_lo
            && self.droop_lo < self.soe_ref
            && self.soe_ref < self.droop_hi
            && self.droop_hi <= self.soe_max
            && self.soe_max <= 1.0;
        if !ordered {
            return Err(ConfigError::SoeOrdering);
        }
        if !(self.droop_lo <= self.db_low_max && self.db_low_max < self.soe_ref) {
            return Err(ConfigError::DeadbandOrdering);
        }
        if !(self.soe_min <= self.timer_lo
            && self.timer_lo < self.timer_hi
            && self.timer_hi <= self.soe_max)
        {
            return Err(ConfigError::TimerThresholds);
        }
        if !(self.soe_min <= self.soe_init && self.soe_init <= self.soe_max) {
            return Err(ConfigError::InitialSoe);
        }
        if !(self.eta_inv > 0.0 && self.eta_inv <= 1.0) {
            return Err(ConfigError::Efficiency("eta_inv"));
        }
        // The linear curve must stay positive up to the charger rating.
        let eta_at_rating =
            1.0 - (1.0 - self.eff_anchor_eta) / self.eff_anchor_power * self.p_r_charger;
        if !(self.eff_anchor_eta > 0.0 && self.eff_anchor_eta <= 1.0) || !(eta_at_rating > 0.0) {
            return Err(ConfigError::Efficiency("eff_anchor_eta"));
        }
        if self.timer_period % self.step != 0 {
            return Err(ConfigError::StepDivisibility("timer_period"));
        }
        if self.fc_horizon % self.step != 0 {
            return Err(ConfigError::StepDivisibility("fc_horizon"));
        }
        Ok(self)
    }

    /// Total nominal battery capacity (kWh).
    pub fn fleet_capacity(&self) -> f64 {
        self.n_str as f64 * self.e_cap_str
    }

    /// Step length in hours.
    pub fn step_hours(&self) -> f64 {
        f64::from(self.step) / 60.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_accepted() {
        let cfg = SystemConfig::default().validate().unwrap();
        assert_eq!(cfg.n_str, 3);
        assert_eq!(cfg.e_cap_str, 104.0);
        assert_eq!(cfg.p_r_pv, 61.0);
        assert_eq!(cfg.p_r_grid, 43.0);
        assert_eq!(cfg.p_r_charger, 175.0);
        assert_eq!(cfg.p_r_inverter, 66.0);
        assert_eq!(cfg.fleet_capacity(), 312.0);
    }

    #[test]
    fn soe_min_above_reference_is_rejected() {
        let cfg = SystemConfig {
            soe_min: 0.95,
            ..Default::default()
        };
        assert_eq!(cfg.validate(), Err(ConfigError::SoeOrdering));
    }

    #[test]
    fn step_must_divide_timer() {
        let cfg = SystemConfig {
            step: 7,
            ..Default::default()
        };
        assert_eq!(
            cfg.validate(),
            Err(ConfigError::StepDivisibility("timer_period"))
        );
    }

    #[test]
    fn non_positive_rating_is_named() {
        let cfg = SystemConfig {
            p_r_grid: 0.0,
            ..Default::default()
        };
        assert_eq!(cfg.validate(), Err(ConfigError::NonPositive("p_r_grid")));
        let cfg = SystemConfig {
            n_str: 0,
            ..Default::default()
        };
        assert_eq!(cfg.validate(), Err(ConfigError::NonPositive("n_str")));
    }

    #[test]
    fn nan_is_rejected() {
        let cfg = SystemConfig {
            e_cap_str: f64::NAN,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
