//! Stochastic scenario assembly: EV sessions from tabulated distributions
//! and the PV series for one run.

pub mod pdf;
pub mod placeholder;
pub mod pv;
pub mod sessions;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use pdf::{DomainUnit, PdfError, TabulatedPdf};
pub use placeholder::placeholder_distributions;
pub use pv::{resample_to_minutes, synth_pv, PvPreset, PvSeriesError};
pub use sessions::{
    assign_to_chargers, sample_day_sessions, ChargerPlan, CountModel, Distributions, SessionDraft,
    MINUTES_PER_DAY,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    /// No valid session found within the resample cap; the distribution
    /// tables cannot produce sessions within the charger rating.
    ResampleCapExceeded {
        day: u32,
    },
    BadRate(f64),
    /// PV series length does not match the horizon.
    PvLength {
        expected: usize,
        found: usize,
    },
    NegativePv {
        minute: usize,
    },
    Pdf(PdfError),
    Pv(PvSeriesError),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ResampleCapExceeded { day } => write!(
                f,
                "day {day}: no session within the charger rating after {} draws; check the distribution tables",
                sessions::RESAMPLE_CAP
            ),
            Self::BadRate(r) => write!(f, "invalid EV arrival rate {r}"),
            Self::PvLength { expected, found } => {
                write!(f, "PV series has {found} minutes, horizon needs {expected}")
            }
            Self::NegativePv { minute } => write!(f, "PV series negative at minute {minute}"),
            Self::Pdf(e) => write!(f, "distribution table: {e}"),
            Self::Pv(e) => write!(f, "PV series: {e}"),
        }
    }
}

impl core::error::Error for ScenarioError {}

impl From<PdfError> for ScenarioError {
    fn from(e: PdfError) -> Self {
        Self::Pdf(e)
    }
}

impl From<PvSeriesError> for ScenarioError {
    fn from(e: PvSeriesError) -> Self {
        Self::Pv(e)
    }
}

/// Everything needed to generate the inputs of one run.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub season: Arc<str>,
    /// Mean number of EV arrivals per day.
    pub evs_per_day: f64,
    pub count_model: CountModel,
    /// PV production, one-minute resolution, kW (stored unsigned).
    pub pv: Arc<[f64]>,
    pub dists: Arc<Distributions>,
    pub horizon_days: u32,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn horizon_minutes(&self) -> u32 {
        self.horizon_days * MINUTES_PER_DAY
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.evs_per_day >= 0.0) || !self.evs_per_day.is_finite() {
            return Err(ScenarioError::BadRate(self.evs_per_day));
        }
        let expected = self.horizon_minutes() as usize;
        if self.pv.len() != expected {
            return Err(ScenarioError::PvLength {
                expected,
                found: self.pv.len(),
            });
        }
        if let Some(minute) = self.pv.iter().position(|p| !(*p >= 0.0)) {
            return Err(ScenarioError::NegativePv { minute });
        }
        Ok(())
    }

    /// Draws every day's sessions and assigns them to chargers.
    pub fn realize(&self, p_r_charger: f64) -> Result<Scenario, ScenarioError> {
        self.validate()?;
        let mut drafts: Vec<SessionDraft> = Vec::new();
        for day in 0..self.horizon_days {
            drafts.extend(sample_day_sessions(
                day,
                self.evs_per_day,
                self.count_model,
                &self.dists,
                p_r_charger,
                self.seed,
            )?);
        }
        drafts.sort_by_key(|d| d.t_arrival);
        Ok(Scenario {
            pv: self.pv.clone(),
            plan: assign_to_chargers(&drafts),
        })
    }
}

/// Concrete inputs of one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub pv: Arc<[f64]>,
    pub plan: ChargerPlan,
}
