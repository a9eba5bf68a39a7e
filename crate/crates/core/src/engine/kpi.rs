//! Run-level key performance indicators.

/// Share of delivered EV energy not drawn from the grid, in `[0, 1]`.
///
/// Without EV demand the station is fully self-sufficient only if it
/// imported nothing at all.
pub fn kpi_self_sufficiency(e_import: f64, e_ev_delivered: f64) -> f64 {
    if e_ev_delivered <= 0.0 {
        return if e_import <= 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - e_import / e_ev_delivered).clamp(0.0, 1.0)
}

/// Equivalent full cycles: total absolute internal throughput of all
/// strings over twice the fleet capacity.
pub fn kpi_full_cycles(abs_throughput_kwh: f64, n_str: usize, e_cap_str: f64) -> f64 {
    abs_throughput_kwh / (2.0 * n_str as f64 * e_cap_str)
}

/// Time average of per-step mean string SOE. Zero for an empty trace.
pub fn kpi_mean_soe(mean_soe_trace: &[f64]) -> f64 {
    if mean_soe_trace.is_empty() {
        return 0.0;
    }
    mean_soe_trace.iter().sum::<f64>() / mean_soe_trace.len() as f64
}
