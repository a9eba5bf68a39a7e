//! Box-plot statistics over KPI samples.
//!
//! Quartiles interpolate linearly between order statistics at rank
//! `p * (n + 1)` (1-based, clamped to the sample range). Whiskers sit
//! 1.5 IQR beyond the quartiles, clamped to the observed extremes.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub min: f64,
    pub max: f64,
}

/// Quantile `p` of an ascending sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p * (n as f64 + 1.0)).clamp(1.0, n as f64);
    let lo = libm::floor(rank) as usize;
    let frac = rank - lo as f64;
    if lo >= n {
        return sorted[n - 1];
    }
    sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
}

/// Summary of a non-empty sample; `None` if `values` is empty. Result is
/// independent of input order.
pub fn summarize(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // Sum in sorted order so the mean does not depend on input order.
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (min, max) = (sorted[0], sorted[n - 1]);
    Some(BoxStats {
        n,
        mean,
        median,
        q1,
        q3,
        whisker_lo: (q1 - 1.5 * iqr).max(min),
        whisker_hi: (q3 + 1.5 * iqr).min(max),
        min,
        max,
    })
}
