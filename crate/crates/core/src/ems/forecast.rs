//! Rolling PV energy forecast.

use crate::types::Minute;

/// Source of the PV energy expected over the coming horizon.
pub trait PvForecast {
    /// Expected PV energy (kWh) over `[t_now, t_now + horizon)` minutes.
    fn energy(&self, t_now: Minute, horizon: u32) -> f64;
}

/// Perfect foresight over a 1-minute PV power series (kW).
#[derive(Debug, Clone, Copy)]
pub struct PerfectForesight<'a> {
    pub pv: &'a [f64],
}

impl PvForecast for PerfectForesight<'_> {
    fn energy(&self, t_now: Minute, horizon: u32) -> f64 {
        pv_energy_forecast(t_now, self.pv, horizon)
    }
}

/// Integral of PV power magnitude over the next `horizon` minutes of a
/// 1-minute series, zero-padded past its end.
pub fn pv_energy_forecast(t_now: Minute, pv: &[f64], horizon: u32) -> f64 {
    let start = (t_now as usize).min(pv.len());
    let end = (t_now as usize + horizon as usize).min(pv.len());
    pv[start..end].iter().map(|p| p.abs()).sum::<f64>() / 60.0
}
