//! EV session generation and charger assignment.

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::pdf::TabulatedPdf;
use super::ScenarioError;
use crate::seed::rng_for;
use crate::types::{ChargingSession, ComponentId, Minute, Outcome};

pub const MINUTES_PER_DAY: u32 = 1440;

/// Maximum draws for one session before giving up on the tables.
pub const RESAMPLE_CAP: u32 = 1000;

/// Arrival (hours of day), duration (minutes) and energy (kWh) densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Distributions {
    pub arrival: TabulatedPdf,
    pub duration: TabulatedPdf,
    pub energy: TabulatedPdf,
    /// Built from the bundled placeholder tables.
    pub placeholder: bool,
}

/// How many sessions a day gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CountModel {
    /// Poisson with mean `evs_per_day`.
    #[default]
    Poisson,
    /// Exactly `round(evs_per_day)`.
    Fixed,
}

/// A sampled EV visit before charger assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionDraft {
    pub t_arrival: Minute,
    pub duration: u32,
    pub e_requested: f64,
}

impl SessionDraft {
    pub fn power(&self) -> f64 {
        self.e_requested / (f64::from(self.duration) / 60.0)
    }
}

fn draw_session<R: Rng>(
    day: u32,
    dists: &Distributions,
    p_max: f64,
    rng: &mut R,
) -> Result<SessionDraft, ScenarioError> {
    for _ in 0..RESAMPLE_CAP {
        let hour = dists.arrival.inverse_cdf(rng.random::<f64>());
        let duration = dists.duration.inverse_cdf(rng.random::<f64>());
        let energy = dists.energy.inverse_cdf(rng.random::<f64>());
        let minute_of_day = ((hour * 60.0) as u32).min(MINUTES_PER_DAY - 1);
        let draft = SessionDraft {
            t_arrival: day * MINUTES_PER_DAY + minute_of_day,
            duration: (libm::round(duration) as u32).max(1),
            e_requested: energy,
        };
        if draft.e_requested > 0.0 && draft.power() <= p_max {
            return Ok(draft);
        }
    }
    Err(ScenarioError::ResampleCapExceeded { day })
}

/// Sessions arriving on `day`, drawn from the stream `(seed, day)`.
///
/// Arrival, duration and energy are sampled independently; a draw whose
/// average power exceeds `p_max` is discarded and redrawn entirely.
pub fn sample_day_sessions(
    day: u32,
    evs_per_day: f64,
    count_model: CountModel,
    dists: &Distributions,
    p_max: f64,
    seed: u64,
) -> Result<Vec<SessionDraft>, ScenarioError> {
    let mut rng = rng_for(seed, &[u64::from(day)]);
    let count = if evs_per_day <= 0.0 {
        0
    } else {
        match count_model {
            CountModel::Poisson => {
                let poisson =
                    Poisson::new(evs_per_day).map_err(|_| ScenarioError::BadRate(evs_per_day))?;
                poisson.sample(&mut rng) as usize
            }
            CountModel::Fixed => libm::round(evs_per_day) as usize,
        }
    };
    (0..count)
        .map(|_| draw_session(day, dists, p_max, &mut rng))
        .collect()
}

/// Sessions served by the chargers plus those turned away.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChargerPlan {
    /// Assigned sessions in arrival order.
    pub sessions: Vec<ChargingSession>,
    /// Arrivals that found both chargers occupied.
    pub blocked: Vec<ChargingSession>,
}

impl ChargerPlan {
    /// Sessions assigned to one charger, in arrival order.
    pub fn timeline(&self, charger: ComponentId) -> impl Iterator<Item = &ChargingSession> {
        self.sessions.iter().filter(move |s| s.charger == charger)
    }
}

/// First-free charger assignment without queueing: Charger1 if free at
/// arrival, else Charger2, else blocked. A charger is free again at the
/// departure minute of its previous session.
pub fn assign_to_chargers(drafts: &[SessionDraft]) -> ChargerPlan {
    let mut busy_until: [Minute; 2] = [0; 2];
    let mut plan = ChargerPlan::default();
    for d in drafts {
        let session = |charger, outcome| ChargingSession {
            charger,
            t_arrival: d.t_arrival,
            duration: d.duration,
            e_requested: d.e_requested,
            e_delivered: 0.0,
            outcome,
        };
        match busy_until.iter().position(|&t| t <= d.t_arrival) {
            Some(c) => {
                busy_until[c] = d.t_arrival + d.duration;
                plan.sessions.push(session(ComponentId::charger(c), None));
            }
            None => plan
                .blocked
                .push(session(ComponentId::Idle, Some(Outcome::Blocked))),
        }
    }
    plan
}
