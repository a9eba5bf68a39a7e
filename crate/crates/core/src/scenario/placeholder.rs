//! Built-in PLACEHOLDER charging-behaviour tables.
//!
//! These are hand-shaped stand-ins (midday-peaked arrivals, duration mode
//! around 20 min, energy mode around 20 kWh) and are NOT measured data.
//! Real studies should load their own tables; every output produced with
//! them is flagged as placeholder-based.

use super::pdf::{DomainUnit, TabulatedPdf};
use super::sessions::Distributions;

/// Arrival time of day (hours, density).
pub const ARRIVAL_HOURS: [(f64, f64); 25] = [
    (0.0, 0.30),
    (1.0, 0.20),
    (2.0, 0.15),
    (3.0, 0.10),
    (4.0, 0.10),
    (5.0, 0.20),
    (6.0, 0.60),
    (7.0, 1.20),
    (8.0, 2.00),
    (9.0, 2.80),
    (10.0, 3.60),
    (11.0, 4.30),
    (12.0, 4.60),
    (13.0, 4.50),
    (14.0, 4.20),
    (15.0, 4.00),
    (16.0, 3.90),
    (17.0, 3.80),
    (18.0, 3.30),
    (19.0, 2.60),
    (20.0, 1.90),
    (21.0, 1.30),
    (22.0, 0.80),
    (23.0, 0.50),
    (24.0, 0.30),
];

/// Plug-in duration (minutes, density).
pub const DURATION_MINUTES: [(f64, f64); 14] = [
    (0.0, 0.0),
    (5.0, 0.5),
    (10.0, 2.0),
    (15.0, 3.6),
    (20.0, 4.0),
    (25.0, 3.9),
    (30.0, 3.4),
    (40.0, 2.4),
    (50.0, 1.6),
    (60.0, 1.0),
    (75.0, 0.55),
    (90.0, 0.3),
    (120.0, 0.1),
    (180.0, 0.0),
];

/// Requested energy (kWh, density).
pub const ENERGY_KWH: [(f64, f64); 14] = [
    (0.0, 0.0),
    (5.0, 0.8),
    (10.0, 2.4),
    (15.0, 3.6),
    (20.0, 3.9),
    (25.0, 3.5),
    (30.0, 2.8),
    (40.0, 1.7),
    (50.0, 1.0),
    (60.0, 0.6),
    (75.0, 0.3),
    (90.0, 0.12),
    (110.0, 0.03),
    (120.0, 0.0),
];

/// The placeholder tables as normalized distributions.
pub fn placeholder_distributions() -> Distributions {
    let pdf = |pts: &[(f64, f64)], unit| {
        TabulatedPdf::new(pts, unit).expect("built-in placeholder tables are well formed")
    };
    Distributions {
        arrival: pdf(&ARRIVAL_HOURS, DomainUnit::Hours),
        duration: pdf(&DURATION_MINUTES, DomainUnit::Minutes),
        energy: pdf(&ENERGY_KWH, DomainUnit::Kwh),
        placeholder: true,
    }
}
