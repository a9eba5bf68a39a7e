//! PV power series: synthetic seasonal profiles and resampling of measured
//! series to one-minute resolution.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use rand::Rng;

use super::sessions::MINUTES_PER_DAY;

/// Shape of a synthetic PV season. The bundled presets are rough
/// placeholders, not site measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PvPreset {
    /// Clear-sky power at solar noon (kW).
    pub peak_kw: f64,
    /// Hours between sunrise and sunset, centred on 12:00.
    pub daylight_hours: f64,
    /// Cloud variability in `[0, 1]`; 0 gives clear-sky days, 1 lets the
    /// cloud factor reach down to 0.2.
    pub variability: f64,
}

impl PvPreset {
    pub const JUNE: PvPreset = PvPreset {
        peak_kw: 55.0,
        daylight_hours: 17.0,
        variability: 0.5,
    };
    pub const SEPTEMBER: PvPreset = PvPreset {
        peak_kw: 45.0,
        daylight_hours: 13.0,
        variability: 0.5,
    };
    pub const NOVEMBER: PvPreset = PvPreset {
        peak_kw: 15.0,
        daylight_hours: 8.0,
        variability: 0.5,
    };

    /// Built-in preset for a season tag (`june`, `september`, `november`).
    pub fn for_season(tag: &str) -> Option<PvPreset> {
        match tag {
            "june" => Some(Self::JUNE),
            "september" => Some(Self::SEPTEMBER),
            "november" => Some(Self::NOVEMBER),
            _ => None,
        }
    }
}

/// Lowest cloud factor at full variability.
pub const CLOUD_FLOOR: f64 = 0.2;

/// Minutes between random cloud knots.
const CLOUD_KNOT_MINUTES: u32 = 30;

/// Clear-sky half-sine power at `minute_of_day`.
pub fn clear_sky(preset: &PvPreset, minute_of_day: u32) -> f64 {
    let daylight = preset.daylight_hours * 60.0;
    let sunrise = 720.0 - daylight / 2.0;
    let x = (f64::from(minute_of_day) - sunrise) / daylight;
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        preset.peak_kw * libm::sin(PI * x)
    }
}

/// Synthetic PV series of `days` days at one-minute resolution (kW).
///
/// Each day is a clear-sky half-sine scaled by a cloud factor in
/// `[1 - 0.8 * variability, 1]`, interpolated smoothly (cosine) between
/// random knots every 30 minutes.
pub fn synth_pv<R: Rng>(preset: &PvPreset, days: u32, rng: &mut R) -> Vec<f64> {
    let minutes = days * MINUTES_PER_DAY;
    let n_knots = (minutes / CLOUD_KNOT_MINUTES + 2) as usize;
    let depth = (1.0 - CLOUD_FLOOR) * preset.variability.clamp(0.0, 1.0);
    let knots: Vec<f64> = (0..n_knots)
        .map(|_| 1.0 - depth * rng.random::<f64>())
        .collect();
    (0..minutes)
        .map(|m| {
            let sky = clear_sky(preset, m % MINUTES_PER_DAY);
            if sky == 0.0 {
                return 0.0;
            }
            let k = (m / CLOUD_KNOT_MINUTES) as usize;
            let frac = f64::from(m % CLOUD_KNOT_MINUTES) / f64::from(CLOUD_KNOT_MINUTES);
            let w = 0.5 - 0.5 * libm::cos(PI * frac);
            sky * (knots[k] * (1.0 - w) + knots[k + 1] * w)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PvSeriesError {
    Empty,
    /// Cadence is not 2 s, 60 s or 3600 s (row index of the second sample).
    UnsupportedCadence {
        row: usize,
        seconds: i64,
    },
    /// Spacing differs from the series cadence at this row.
    NonUniform {
        row: usize,
    },
    /// Negative or non-finite production at this row.
    BadPower {
        row: usize,
    },
}

impl fmt::Display for PvSeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("PV series is empty"),
            Self::UnsupportedCadence { row, seconds } => {
                write!(
                    f,
                    "row {row}: unsupported cadence of {seconds} s (need 2, 60 or 3600)"
                )
            }
            Self::NonUniform { row } => write!(f, "row {row}: gap or non-uniform spacing"),
            Self::BadPower { row } => write!(f, "row {row}: negative or invalid power"),
        }
    }
}

impl core::error::Error for PvSeriesError {}

/// Converts `(unix seconds, kW)` samples at a uniform 2-s, 1-min or 1-h
/// cadence to a 1-minute series: 2-s samples are averaged per minute,
/// hourly values are held for 60 minutes, 1-min samples pass through.
/// Row numbers in errors are 0-based sample indices.
pub fn resample_to_minutes(samples: &[(i64, f64)]) -> Result<Vec<f64>, PvSeriesError> {
    if samples.is_empty() {
        return Err(PvSeriesError::Empty);
    }
    for (row, &(_, p)) in samples.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(PvSeriesError::BadPower { row });
        }
    }
    if samples.len() == 1 {
        return Ok(alloc::vec![samples[0].1]);
    }
    let cadence = samples[1].0 - samples[0].0;
    if !matches!(cadence, 2 | 60 | 3600) {
        return Err(PvSeriesError::UnsupportedCadence {
            row: 1,
            seconds: cadence,
        });
    }
    for (row, w) in samples.windows(2).enumerate() {
        if w[1].0 - w[0].0 != cadence {
            return Err(PvSeriesError::NonUniform { row: row + 1 });
        }
    }
    let out = match cadence {
        60 => samples.iter().map(|s| s.1).collect(),
        3600 => samples
            .iter()
            .flat_map(|s| core::iter::repeat_n(s.1, 60))
            .collect(),
        _ => {
            let per_minute = (60 / cadence) as usize;
            samples
                .chunks(per_minute)
                .map(|c| c.iter().map(|s| s.1).sum::<f64>() / c.len() as f64)
                .collect()
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_for;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clear_days_without_variability() {
        let p = PvPreset {
            variability: 0.0,
            ..PvPreset::JUNE
        };
        let series = synth_pv(&p, 2, &mut rng_for(1, &[]));
        for m in 0..2 * MINUTES_PER_DAY {
            assert_eq!(series[m as usize], clear_sky(&p, m % MINUTES_PER_DAY));
        }
        assert_abs_diff_eq!(series[720], 55.0, epsilon = 1e-12);
    }

    #[test]
    fn noon_scaled_by_cloud_factor() {
        let series = synth_pv(&PvPreset::JUNE, 3, &mut rng_for(7, &[]));
        for day in 0..3 {
            let noon = series[(day * MINUTES_PER_DAY + 720) as usize];
            let factor = noon / 55.0;
            assert!((1.0 - 0.8 * 0.5..=1.0).contains(&factor), "{factor}");
        }
    }

    #[test]
    fn nights_are_zero() {
        let series = synth_pv(&PvPreset::NOVEMBER, 2, &mut rng_for(3, &[]));
        // 8 h daylight: 08:00 - 16:00
        for m in (0..480).chain(960..1440) {
            assert_eq!(series[m], 0.0);
            assert_eq!(series[1440 + m], 0.0);
        }
        assert!(series[720] > 0.0);
        assert!(series.iter().all(|p| (0.0..=15.0).contains(p)));
    }

    #[test]
    fn two_second_samples_averaged() {
        let samples: Vec<(i64, f64)> = (0..30).map(|i| (1000 + 2 * i, 10.0)).collect();
        assert_eq!(resample_to_minutes(&samples).unwrap(), [10.0]);
        let samples: Vec<(i64, f64)> = (0..60)
            .map(|i| (2 * i, if i < 30 { f64::from(i as u8) } else { 4.0 }))
            .collect();
        let out = resample_to_minutes(&samples).unwrap();
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(out[0], 14.5, epsilon = 1e-12);
        assert_eq!(out[1], 4.0);
    }

    #[test]
    fn hourly_samples_held() {
        let out = resample_to_minutes(&[(0, 12.0), (3600, 3.0)]).unwrap();
        assert_eq!(out.len(), 120);
        assert!(out[..60].iter().all(|&p| p == 12.0));
        assert!(out[60..].iter().all(|&p| p == 3.0));
    }

    #[test]
    fn minute_samples_pass_through() {
        let out = resample_to_minutes(&[(0, 1.0), (60, 2.0), (120, 3.0)]).unwrap();
        assert_eq!(out, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn malformed_series_rejected() {
        assert_eq!(resample_to_minutes(&[]), Err(PvSeriesError::Empty));
        assert_eq!(
            resample_to_minutes(&[(0, 1.0), (60, 1.0), (180, 1.0)]),
            Err(PvSeriesError::NonUniform { row: 2 })
        );
        assert_eq!(
            resample_to_minutes(&[(0, 1.0), (60, -1.0)]),
            Err(PvSeriesError::BadPower { row: 1 })
        );
        assert_eq!(
            resample_to_minutes(&[(0, 1.0), (5, 1.0)]),
            Err(PvSeriesError::UnsupportedCadence { row: 1, seconds: 5 })
        );
    }
}
