//! Domain types shared by the physics, EMS and engine layers.
//!
//! Sign convention: consumption (EV charging, grid export, losses,
//! auxiliary) is positive, intake (PV generation, grid import) is negative.
//! A string's terminal power is positive while it discharges.

use alloc::vec::Vec;
use core::fmt;

/// Minutes since simulation start.
pub type Minute = u32;

/// Power component a string can be attached to through the busbar matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ComponentId {
    Pv,
    Charger1,
    Charger2,
    Inverter,
    Idle,
}

impl ComponentId {
    pub const CHARGERS: [ComponentId; 2] = [ComponentId::Charger1, ComponentId::Charger2];

    pub fn is_charger(self) -> bool {
        matches!(self, Self::Charger1 | Self::Charger2)
    }

    /// Charger index (0 or 1) for charger outlets.
    pub fn charger_index(self) -> Option<usize> {
        match self {
            Self::Charger1 => Some(0),
            Self::Charger2 => Some(1),
            _ => None,
        }
    }

    pub fn charger(index: usize) -> ComponentId {
        Self::CHARGERS[index]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pv => "pv",
            Self::Charger1 => "charger1",
            Self::Charger2 => "charger2",
            Self::Inverter => "inverter",
            Self::Idle => "idle",
        }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State of one battery string.
#[derive(Debug, Clone, PartialEq)]
pub struct StringState {
    pub id: usize,
    /// State of energy as a fraction of nominal capacity.
    pub soe: f64,
    pub attached: ComponentId,
    /// Terminal power of the last step (kW, positive = discharge).
    pub p_terminal: f64,
    /// Held by an EV session; the EMS may not move it.
    pub locked_to_ev: bool,
}

impl StringState {
    pub fn new(id: usize, soe: f64) -> Self {
        Self {
            id,
            soe,
            attached: ComponentId::Idle,
            p_terminal: 0.0,
            locked_to_ev: false,
        }
    }
}

/// Attempted to attach two strings to the same component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocationConflict {
    pub component: ComponentId,
    pub holder: usize,
}

impl fmt::Display for AllocationConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} already held by string {}",
            self.component, self.holder
        )
    }
}

/// Busbar assignment of strings to components, indexed by string id.
///
/// No two strings share a non-idle component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationMap {
    targets: Vec<ComponentId>,
}

impl AllocationMap {
    /// All strings idle.
    pub fn new(n_str: usize) -> Self {
        Self {
            targets: alloc::vec![ComponentId::Idle; n_str],
        }
    }

    /// Builds a map from explicit targets, rejecting duplicates.
    pub fn from_targets(targets: Vec<ComponentId>) -> Result<Self, AllocationConflict> {
        let mut map = Self::new(targets.len());
        for (id, c) in targets.into_iter().enumerate() {
            map.assign(id, c)?;
        }
        Ok(map)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn get(&self, id: usize) -> ComponentId {
        self.targets[id]
    }

    pub fn targets(&self) -> &[ComponentId] {
        &self.targets
    }

    /// The string attached to `component`, if any. Always `None` for `Idle`.
    pub fn string_on(&self, component: ComponentId) -> Option<usize> {
        if component == ComponentId::Idle {
            return None;
        }
        self.targets.iter().position(|&c| c == component)
    }

    /// Attaches string `id` to `component`. Fails if another string already
    /// holds it; the map is unchanged in that case.
    pub fn assign(&mut self, id: usize, component: ComponentId) -> Result<(), AllocationConflict> {
        if let Some(holder) = self.string_on(component) {
            if holder != id {
                return Err(AllocationConflict { component, holder });
            }
        }
        self.targets[id] = component;
        Ok(())
    }

    pub fn detach(&mut self, id: usize) {
        self.targets[id] = ComponentId::Idle;
    }

    /// True when no non-idle component appears twice.
    pub fn is_injective(&self) -> bool {
        self.targets
            .iter()
            .enumerate()
            .all(|(i, &c)| c == ComponentId::Idle || !self.targets[i + 1..].contains(&c))
    }
}

/// Final state of a charging session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Outcome {
    /// More than 99 % of the requested energy delivered.
    Success,
    Incomplete,
    /// Rejected at arrival: no charger or no string available.
    Blocked,
    /// Still connected at the end of the horizon; excluded from KPIs.
    Truncated,
}

/// Delivered share above which a session counts as successful.
pub const SUCCESS_SHARE: f64 = 0.99;

/// One EV visit at a charger.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChargingSession {
    pub charger: ComponentId,
    pub t_arrival: Minute,
    /// Plug-in duration (minutes, >= 1).
    pub duration: u32,
    pub e_requested: f64,
    pub e_delivered: f64,
    pub outcome: Option<Outcome>,
}

impl ChargingSession {
    pub fn t_departure(&self) -> Minute {
        self.t_arrival + self.duration
    }

    /// Constant average charging power over the session (kW).
    pub fn power(&self) -> f64 {
        self.e_requested / (f64::from(self.duration) / 60.0)
    }

    /// Outcome implied by delivered energy.
    pub fn judge(&self) -> Outcome {
        if self.e_delivered > SUCCESS_SHARE * self.e_requested {
            Outcome::Success
        } else {
            Outcome::Incomplete
        }
    }
}

/// Power flows of one step (kW, station sign convention).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerFlows {
    /// Available PV production (positive magnitude).
    pub p_pv: f64,
    /// PV production not captured by any string.
    pub p_pv_curtailed: f64,
    pub p_ev1: f64,
    pub p_ev2: f64,
    /// Inverter AC power, positive = export.
    pub p_inv: f64,
    pub p_aux: f64,
    /// Grid exchange, positive = export.
    pub p_grid: f64,
}
