//! Piecewise-linear probability densities from tabulated support points,
//! sampled by exact inversion of their CDF.

use alloc::vec::Vec;
use core::fmt;

/// Unit of a distribution's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DomainUnit {
    Hours,
    Minutes,
    Kwh,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PdfError {
    TooFewPoints,
    /// Support values must be finite and strictly increasing; index of the
    /// first offending point.
    NotIncreasing(usize),
    /// Density negative or non-finite at this index.
    BadDensity(usize),
    /// Total mass is zero.
    ZeroMass,
    /// Conversion between incompatible units.
    UnitMismatch {
        from: DomainUnit,
        to: DomainUnit,
    },
}

impl fmt::Display for PdfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewPoints => f.write_str("distribution needs at least 2 support points"),
            Self::NotIncreasing(i) => {
                write!(f, "support value at point {i} is not strictly increasing")
            }
            Self::BadDensity(i) => write!(f, "density at point {i} is negative or not finite"),
            Self::ZeroMass => f.write_str("distribution integrates to zero"),
            Self::UnitMismatch { from, to } => write!(f, "cannot convert {from:?} to {to:?}"),
        }
    }
}

impl core::error::Error for PdfError {}

/// Density given at ordered support points, linear in between and zero
/// outside. Normalized to unit mass on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPdf {
    xs: Vec<f64>,
    dens: Vec<f64>,
    /// CDF at each support point; `cdf[0] = 0`, last = 1.
    cdf: Vec<f64>,
    unit: DomainUnit,
}

impl TabulatedPdf {
    /// Builds and normalizes a density from `(value, density)` points.
    pub fn new(points: &[(f64, f64)], unit: DomainUnit) -> Result<Self, PdfError> {
        if points.len() < 2 {
            return Err(PdfError::TooFewPoints);
        }
        for (i, &(x, d)) in points.iter().enumerate() {
            if !x.is_finite() || (i > 0 && !(x > points[i - 1].0)) {
                return Err(PdfError::NotIncreasing(i));
            }
            if !d.is_finite() || d < 0.0 {
                return Err(PdfError::BadDensity(i));
            }
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut dens: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        for i in 1..xs.len() {
            let area = 0.5 * (dens[i - 1] + dens[i]) * (xs[i] - xs[i - 1]);
            cdf.push(cdf[i - 1] + area);
        }
        let mass = *cdf.last().unwrap();
        if !(mass > 0.0) {
            return Err(PdfError::ZeroMass);
        }
        dens.iter_mut().for_each(|d| *d /= mass);
        cdf.iter_mut().for_each(|c| *c /= mass);
        *cdf.last_mut().unwrap() = 1.0;
        Ok(Self {
            xs,
            dens,
            cdf,
            unit,
        })
    }

    pub fn unit(&self) -> DomainUnit {
        self.unit
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.dens.iter().copied())
    }

    /// Trapezoid integral of the stored density (1 after normalization).
    pub fn mass(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.dens.windows(2))
            .map(|(x, d)| 0.5 * (d[0] + d[1]) * (x[1] - x[0]))
            .sum()
    }

    /// Mean of the piecewise-linear density.
    pub fn mean(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.dens.windows(2))
            .map(|(x, d)| {
                (x[1] - x[0]) * (d[0] * (2.0 * x[0] + x[1]) + d[1] * (x[0] + 2.0 * x[1])) / 6.0
            })
            .sum()
    }

    /// Re-expresses the density in another unit of the same dimension.
    pub fn converted(&self, to: DomainUnit) -> Result<Self, PdfError> {
        let factor = match (self.unit, to) {
            (a, b) if a == b => 1.0,
            (DomainUnit::Hours, DomainUnit::Minutes) => 60.0,
            (DomainUnit::Minutes, DomainUnit::Hours) => 1.0 / 60.0,
            (from, to) => return Err(PdfError::UnitMismatch { from, to }),
        };
        let points: Vec<(f64, f64)> = self
            .xs
            .iter()
            .zip(&self.dens)
            .map(|(&x, &d)| (x * factor, d / factor))
            .collect();
        Self::new(&points, to)
    }

    /// Value at which the CDF reaches `u`, for `u` in `[0, 1)`.
    ///
    /// Within a segment the density is linear, so the CDF is quadratic and
    /// is inverted in closed form.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.xs[0];
        }
        if u >= 1.0 {
            return *self.xs.last().unwrap();
        }
        // First segment whose upper CDF exceeds u.
        let seg = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, self.xs.len() - 1)
            - 1;
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (f0, f1) = (self.dens[seg], self.dens[seg + 1]);
        let h = x1 - x0;
        let r = u - self.cdf[seg];
        let slope = (f1 - f0) / h;
        // Solve f0 t + slope t^2 / 2 = r for t in [0, h]; stable root form.
        let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
        let denom = f0 + libm::sqrt(disc);
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        x0 + t.clamp(0.0, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_cdf_origin_is_left_edge() {
        let pdf =
            TabulatedPdf::new(&[(3.0, 0.0), (5.0, 2.0), (9.0, 1.0)], DomainUnit::Kwh).unwrap();
        assert_eq!(pdf.inverse_cdf(0.0), 3.0);
    }

    #[test]
    fn uniform_median() {
        let pdf = TabulatedPdf::new(&[(0.0, 1.0), (10.0, 1.0)], DomainUnit::Kwh).unwrap();
        assert_abs_diff_eq!(pdf.inverse_cdf(0.5), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pdf.mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn triangular_quantile() {
        // density x/2 on [0, 2]: CDF x^2/4
        let pdf = TabulatedPdf::new(&[(0.0, 0.0), (2.0, 1.0)], DomainUnit::Hours).unwrap();
        assert_abs_diff_eq!(pdf.inverse_cdf(0.25), 1.0, epsilon = 1e-12);
        for u in [0.01, 0.3, 0.64, 0.99] {
            assert_abs_diff_eq!(pdf.inverse_cdf(u), 2.0 * u.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn normalizes_mass() {
        let pdf =
            TabulatedPdf::new(&[(0.0, 3.0), (1.0, 5.0), (4.0, 0.5)], DomainUnit::Kwh).unwrap();
        assert_abs_diff_eq!(pdf.mass(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn flat_zero_segment_skipped() {
        let pdf = TabulatedPdf::new(
            &[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (3.0, 1.0)],
            DomainUnit::Kwh,
        )
        .unwrap();
        let x = pdf.inverse_cdf(1e-9);
        assert!(x > 1.0 && x < 2.0, "{x}");
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(
            TabulatedPdf::new(&[(0.0, 1.0)], DomainUnit::Kwh),
            Err(PdfError::TooFewPoints)
        );
        assert_eq!(
            TabulatedPdf::new(&[(0.0, 1.0), (0.0, 1.0)], DomainUnit::Kwh),
            Err(PdfError::NotIncreasing(1))
        );
        assert_eq!(
            TabulatedPdf::new(&[(0.0, 1.0), (1.0, -1.0)], DomainUnit::Kwh),
            Err(PdfError::BadDensity(1))
        );
        assert_eq!(
            TabulatedPdf::new(&[(0.0, 0.0), (1.0, 0.0)], DomainUnit::Kwh),
            Err(PdfError::ZeroMass)
        );
    }

    #[test]
    fn unit_conversion_preserves_quantiles() {
        let h =
            TabulatedPdf::new(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)], DomainUnit::Hours).unwrap();
        let m = h.converted(DomainUnit::Minutes).unwrap();
        assert_abs_diff_eq!(
            m.inverse_cdf(0.3),
            60.0 * h.inverse_cdf(0.3),
            epsilon = 1e-9
        );
        assert!(h.converted(DomainUnit::Kwh).is_err());
    }

    #[test]
    fn analytic_mean() {
        let tri = TabulatedPdf::new(&[(0.0, 0.0), (2.0, 1.0)], DomainUnit::Kwh).unwrap();
        assert_abs_diff_eq!(tri.mean(), 4.0 / 3.0, epsilon = 1e-12);
    }
}
