//! Single-run simulation loop.
//!
//! Each step runs in a fixed order:
//!
//! 1. read PV power for the step;
//! 2. process EV departures and arrivals;
//! 3. check triggers and re-allocate strings if any fired;
//! 4. forecast PV, compute the inverter setpoint and clip it to the grid;
//! 5. resolve terminal powers (EV strings serve the session power, the PV
//!    string absorbs production, the inverter string follows the setpoint);
//! 6. integrate every string's SOE;
//! 7. let the BMS detach strings that left their SOE window (this arms a
//!    trigger for the next step);
//! 8. balance the grid connection point;
//! 9. book energies.
//!
//! Auxiliary consumption lags the losses by one step: the thermal system
//! responds to the heat released in the previous step. That keeps the
//! auxiliary power known when the setpoint is clipped, so the grid limit
//! holds exactly.

pub mod kpi;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::config::SystemConfig;
use crate::ems::{
    allocate_strings, check_triggers, clip_setpoint_to_grid, AllocationRequest, EmsState,
    PerfectForesight, PvForecast, StepEvents, Strategy,
};
use crate::physics::{
    aux_power, bms_permits, enforce_bms_limits, grid_power, integrate_soe, internal_power,
    inverter_ac_power, inverter_dc_power, InverterFlow, LossLedger,
};
use crate::scenario::{Scenario, ScenarioError, ScenarioSpec, MINUTES_PER_DAY};
use crate::types::{
    AllocationMap, ChargingSession, ComponentId, Minute, Outcome, PowerFlows, StringState,
};

pub use kpi::{kpi_full_cycles, kpi_mean_soe, kpi_self_sufficiency};

/// Largest per-step energy balance residual tolerated (kWh).
pub const STEP_BALANCE_TOLERANCE: f64 = 1e-6;

/// Slack on the grid limit for floating-point rounding (kW).
const GRID_SLACK: f64 = 1e-9;

/// KPIs and energy totals of one run. Energies in kWh.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult {
    /// `n_success / max(1, n_sessions)`.
    pub success_rate: f64,
    /// Completed sessions (success + incomplete); blocked and truncated
    /// sessions are not included.
    pub n_sessions: u32,
    pub n_success: u32,
    pub n_incomplete: u32,
    pub n_blocked: u32,
    /// Still charging when the horizon ended.
    pub n_truncated: u32,
    pub self_sufficiency: f64,
    /// Equivalent full cycles over the whole run.
    pub fec: f64,
    pub fec_per_day: f64,
    pub mean_soe: f64,
    pub e_import: f64,
    pub e_export: f64,
    /// Available PV energy.
    pub e_pv: f64,
    pub e_pv_curtailed: f64,
    pub e_ev_delivered: f64,
    /// String and inverter losses.
    pub e_losses: f64,
    pub e_aux: f64,
    /// Cumulative energy balance residual.
    pub energy_residual: f64,
    pub inverter_clip_events: u32,
    pub bms_detach_events: u32,
}

/// One row of the optional per-step trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub minute: Minute,
    pub soes: Vec<f64>,
    pub allocation: Vec<ComponentId>,
    pub flows: PowerFlows,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record a [`TraceRow`] per step.
    pub trace: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    /// Every session including blocked ones, in arrival order.
    pub sessions: Vec<ChargingSession>,
    pub trace: Option<Vec<TraceRow>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Scenario(ScenarioError),
    /// An internal invariant broke; the run is aborted.
    Invariant {
        minute: Minute,
        what: &'static str,
        value: f64,
    },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scenario(e) => write!(f, "scenario: {e}"),
            Self::Invariant {
                minute,
                what,
                value,
            } => {
                write!(
                    f,
                    "minute {minute}: invariant violated: {what} (value {value})"
                )
            }
        }
    }
}

impl core::error::Error for RunError {}

impl From<ScenarioError> for RunError {
    fn from(e: ScenarioError) -> Self {
        Self::Scenario(e)
    }
}

/// Generates the scenario for `spec` and simulates it.
pub fn run_simulation(
    cfg: &SystemConfig,
    spec: &ScenarioSpec,
    strategy: Strategy,
    opts: RunOptions,
) -> Result<RunOutput, RunError> {
    let scenario = spec.realize(cfg.p_r_charger)?;
    simulate(cfg, &scenario, spec.horizon_days, strategy, opts)
}

/// Simulates a realized scenario over `horizon_days`.
pub fn simulate(
    cfg: &SystemConfig,
    scenario: &Scenario,
    horizon_days: u32,
    strategy: Strategy,
    opts: RunOptions,
) -> Result<RunOutput, RunError> {
    let horizon = horizon_days * MINUTES_PER_DAY;
    if scenario.pv.len() < horizon as usize {
        return Err(ScenarioError::PvLength {
            expected: horizon as usize,
            found: scenario.pv.len(),
        }
        .into());
    }
    let mut station = Station::new(cfg, scenario, strategy, opts.trace);
    let mut t = 0;
    while t < horizon {
        station.step(t)?;
        t += cfg.step;
    }
    Ok(station.finish(horizon, horizon_days))
}

#[derive(Debug, Default)]
struct Totals {
    e_import: f64,
    e_export: f64,
    e_pv: f64,
    e_pv_curtailed: f64,
    e_ev: f64,
    losses: LossLedger,
    abs_throughput: f64,
    residual: f64,
    clip_events: u32,
    detach_events: u32,
}

struct Station<'a> {
    cfg: &'a SystemConfig,
    pv: &'a [f64],
    sessions: Vec<ChargingSession>,
    /// Arrivals turned away because both chargers were busy.
    planned_blocked: Vec<ChargingSession>,
    next_arrival: usize,
    /// Session index at each charger.
    active: [Option<usize>; 2],
    strings: Vec<StringState>,
    map: AllocationMap,
    ems: EmsState,
    pv_active: bool,
    /// Auxiliary power for the current step (kW).
    p_aux: f64,
    pending_bms: bool,
    first_step: bool,
    totals: Totals,
    mean_soe: Vec<f64>,
    trace: Option<Vec<TraceRow>>,
}

impl<'a> Station<'a> {
    fn new(cfg: &'a SystemConfig, scenario: &'a Scenario, strategy: Strategy, trace: bool) -> Self {
        let strings = (0..cfg.n_str)
            .map(|i| StringState::new(i, cfg.soe_init))
            .collect();
        Self {
            cfg,
            pv: &scenario.pv,
            sessions: scenario.plan.sessions.clone(),
            planned_blocked: scenario.plan.blocked.clone(),
            next_arrival: 0,
            active: [None; 2],
            strings,
            map: AllocationMap::new(cfg.n_str),
            ems: EmsState::new(cfg, strategy),
            pv_active: false,
            p_aux: aux_power(cfg, 0.0),
            pending_bms: false,
            first_step: true,
            totals: Totals::default(),
            mean_soe: Vec::new(),
            trace: trace.then(Vec::new),
        }
    }

    fn soes(&self) -> Vec<f64> {
        self.strings.iter().map(|s| s.soe).collect()
    }

    fn mean_soe_now(&self) -> f64 {
        self.strings.iter().map(|s| s.soe).sum::<f64>() / self.strings.len() as f64
    }

    fn stored_energy(&self) -> f64 {
        self.strings.iter().map(|s| s.soe).sum::<f64>() * self.cfg.e_cap_str
    }

    fn violation(minute: Minute, what: &'static str, value: f64) -> RunError {
        RunError::Invariant {
            minute,
            what,
            value,
        }
    }

    fn step(&mut self, t: Minute) -> Result<(), RunError> {
        let cfg = self.cfg;
        let k = cfg.step;
        let h = cfg.step_hours();

        // (1) inputs
        let end = ((t + k) as usize).min(self.pv.len());
        let window = &self.pv[t as usize..end];
        let p_pv = window.iter().sum::<f64>() / window.len() as f64;

        // (2) departures, then arrivals
        let mut plugged = [false; 2];
        let mut unplugged = [false; 2];
        for c in 0..2 {
            if let Some(i) = self.active[c] {
                if self.sessions[i].t_departure() <= t {
                    let s = &mut self.sessions[i];
                    s.outcome.get_or_insert(s.judge());
                    self.active[c] = None;
                    unplugged[c] = true;
                }
            }
        }
        while self.next_arrival < self.sessions.len()
            && self.sessions[self.next_arrival].t_arrival <= t
        {
            let i = self.next_arrival;
            self.next_arrival += 1;
            let c = self.sessions[i]
                .charger
                .charger_index()
                .expect("planned sessions have a charger");
            if let Some(prev) = self.active[c].replace(i) {
                let s = &mut self.sessions[prev];
                s.outcome.get_or_insert(s.judge());
                unplugged[c] = true;
            }
            plugged[c] = true;
        }

        // (3) triggers and allocation
        let pv_active = p_pv > cfg.pv_threshold;
        let events = StepEvents {
            ev_connection_changed: plugged.iter().chain(&unplugged).any(|&e| e),
            pv_switched: pv_active != self.pv_active,
            bms_detach: self.pending_bms,
        };
        let timer_elapsed = t > 0 && self.ems.timer.tick(k);
        let soes = self.soes();
        if self.first_step || check_triggers(cfg, &events, timer_elapsed, &soes) {
            let locked: Vec<bool> = self.strings.iter().map(|s| s.locked_to_ev).collect();
            let decision = allocate_strings(
                cfg,
                &AllocationRequest {
                    current: &self.map,
                    soes: &soes,
                    locked: &locked,
                    plugged,
                    unplugged,
                    pv_active,
                    p_pv,
                },
            );
            for (c, &blocked) in decision.blocked.iter().enumerate() {
                if blocked {
                    if let Some(i) = self.active[c].take() {
                        self.sessions[i].outcome = Some(Outcome::Blocked);
                    }
                }
            }
            for s in &mut self.strings {
                s.attached = decision.map.get(s.id);
                s.locked_to_ev = decision.locked[s.id];
            }
            self.map = decision.map;
            self.ems.proposed = self.map.clone();
        }
        self.first_step = false;
        self.pending_bms = false;
        self.pv_active = pv_active;
        if !self.map.is_injective() {
            return Err(Self::violation(t, "allocation map not injective", 0.0));
        }

        // (4) setpoint
        let mean_soe = self.mean_soe_now();
        let e_fc = PerfectForesight { pv: self.pv }.energy(t, cfg.fc_horizon);
        let p_set = self.ems.propose_setpoint(cfg, mean_soe, e_fc);
        let inverter = self.map.string_on(ComponentId::Inverter);
        let p_inv_ac = clip_setpoint_to_grid(cfg, p_set, self.p_aux, inverter.is_some());
        self.ems.p_inv_set = p_inv_ac;

        // (5) terminal powers
        let n = self.strings.len();
        let mut p_term = vec![0.0; n];
        let mut p_ev = [0.0; 2];
        for c in 0..2 {
            let Some(i) = self.active[c] else { continue };
            if self.sessions[i].outcome.is_some() {
                continue;
            }
            let Some(sid) = self.map.string_on(ComponentId::charger(c)) else {
                return Err(Self::violation(
                    t,
                    "charging session without string",
                    i as f64,
                ));
            };
            let session = &self.sessions[i];
            let remaining = (session.e_requested - session.e_delivered).max(0.0);
            let p = session.power().min(remaining / h);
            if bms_permits(cfg, self.strings[sid].soe, p) {
                p_term[sid] = p;
                p_ev[c] = p;
            } else {
                self.bms_detach(sid);
                self.sessions[i].outcome = Some(Outcome::Incomplete);
            }
        }
        let mut p_captured = 0.0;
        if let Some(sid) = self.map.string_on(ComponentId::Pv) {
            if bms_permits(cfg, self.strings[sid].soe, -p_pv) {
                p_term[sid] = -p_pv;
                p_captured = p_pv;
            }
        }
        let mut inv = InverterFlow {
            p_dc: 0.0,
            p_ac: 0.0,
            clipped: false,
        };
        if let Some(sid) = inverter {
            let flow = inverter_ac_power(cfg, inverter_dc_power(cfg, p_inv_ac));
            if flow.clipped {
                self.totals.clip_events += 1;
            }
            if bms_permits(cfg, self.strings[sid].soe, flow.p_dc) {
                p_term[sid] = flow.p_dc;
                inv = flow;
            }
        }

        // (6) integration
        let stored_before = self.stored_energy();
        let soe_before = self.soes();
        let mut loss_strings = 0.0;
        for (s, &p) in self.strings.iter_mut().zip(&p_term) {
            let p_int = internal_power(cfg, p);
            loss_strings += p_int - p;
            self.totals.abs_throughput += p_int.abs() * h;
            s.soe = integrate_soe(cfg, s.soe, p, k);
            s.p_terminal = p;
        }
        let stored_after = self.stored_energy();

        // (7) BMS limits
        let detached = enforce_bms_limits(cfg, &mut self.strings, &soe_before, &mut self.map);
        for ev in &detached {
            self.totals.detach_events += 1;
            if let Some(c) = ev.from.charger_index() {
                if let Some(i) = self.active[c] {
                    self.sessions[i].outcome.get_or_insert(Outcome::Incomplete);
                }
            }
        }
        self.pending_bms |= !detached.is_empty();

        // (8) grid balance
        let p_grid = grid_power(inv.p_ac, self.p_aux);
        if p_grid.abs() > cfg.p_r_grid + GRID_SLACK {
            return Err(Self::violation(t, "grid limit exceeded", p_grid));
        }
        // rounding in the clip can overshoot by an ulp or two
        let p_grid = p_grid.clamp(-cfg.p_r_grid, cfg.p_r_grid);

        // (9) ledgers
        for c in 0..2 {
            if let Some(i) = self.active[c] {
                self.sessions[i].e_delivered += p_ev[c] * h;
            }
        }
        let e_ev = (p_ev[0] + p_ev[1]) * h;
        let e_export = p_grid.max(0.0) * h;
        let e_import = (-p_grid).max(0.0) * h;
        let tot = &mut self.totals;
        tot.e_pv += p_pv * h;
        tot.e_pv_curtailed += (p_pv - p_captured) * h;
        tot.e_ev += e_ev;
        tot.e_export += e_export;
        tot.e_import += e_import;
        tot.losses.book(loss_strings, inv.loss(), self.p_aux, h);

        let residual = (p_captured * h + e_import)
            - (e_ev
                + e_export
                + (stored_after - stored_before)
                + (loss_strings + inv.loss()) * h
                + self.p_aux * h);
        if residual.abs() > STEP_BALANCE_TOLERANCE {
            return Err(Self::violation(t, "energy balance residual", residual));
        }
        tot.residual += residual;

        self.mean_soe.push(self.mean_soe_now());
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRow {
                minute: t,
                soes: self.strings.iter().map(|s| s.soe).collect(),
                allocation: self.map.targets().to_vec(),
                flows: PowerFlows {
                    p_pv,
                    p_pv_curtailed: p_pv - p_captured,
                    p_ev1: p_ev[0],
                    p_ev2: p_ev[1],
                    p_inv: inv.p_ac,
                    p_aux: self.p_aux,
                    p_grid,
                },
            });
        }

        self.p_aux = aux_power(cfg, loss_strings + inv.loss());
        Ok(())
    }

    /// Disconnects a string ahead of a flow the BMS refuses.
    fn bms_detach(&mut self, sid: usize) {
        self.map.detach(sid);
        let s = &mut self.strings[sid];
        s.attached = ComponentId::Idle;
        s.locked_to_ev = false;
        self.pending_bms = true;
        self.totals.detach_events += 1;
    }

    fn finish(mut self, horizon: Minute, horizon_days: u32) -> RunOutput {
        let cfg = self.cfg;
        for c in 0..2 {
            if let Some(i) = self.active[c] {
                let s = &mut self.sessions[i];
                if s.outcome.is_none() {
                    s.outcome = Some(if s.t_departure() <= horizon {
                        s.judge()
                    } else {
                        Outcome::Truncated
                    });
                }
            }
        }
        let count = |o: Outcome| {
            self.sessions
                .iter()
                .filter(|s| s.outcome == Some(o))
                .count() as u32
        };
        let n_success = count(Outcome::Success);
        let n_incomplete = count(Outcome::Incomplete);
        let n_blocked = count(Outcome::Blocked) + self.planned_blocked.len() as u32;
        let n_truncated = count(Outcome::Truncated);
        let n_sessions = n_success + n_incomplete;
        let t = &self.totals;
        let fec = kpi_full_cycles(t.abs_throughput, cfg.n_str, cfg.e_cap_str);
        let result = RunResult {
            success_rate: f64::from(n_success) / f64::from(n_sessions.max(1)),
            n_sessions,
            n_success,
            n_incomplete,
            n_blocked,
            n_truncated,
            self_sufficiency: kpi_self_sufficiency(t.e_import, t.e_ev),
            fec,
            fec_per_day: fec / f64::from(horizon_days.max(1)),
            mean_soe: kpi_mean_soe(&self.mean_soe),
            e_import: t.e_import,
            e_export: t.e_export,
            e_pv: t.e_pv,
            e_pv_curtailed: t.e_pv_curtailed,
            e_ev_delivered: t.e_ev,
            e_losses: t.losses.losses(),
            e_aux: t.losses.e_aux,
            energy_residual: t.residual,
            inverter_clip_events: t.clip_events,
            bms_detach_events: t.detach_events,
        };
        let mut sessions = self.sessions;
        sessions.append(&mut self.planned_blocked);
        sessions.sort_by_key(|s| s.t_arrival);
        RunOutput {
            result,
            sessions,
            trace: self.trace,
        }
    }
}
