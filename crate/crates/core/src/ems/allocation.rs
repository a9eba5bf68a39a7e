//! String allocation heuristic.
//!
//! Strings serving an EV are locked to their charger until the EV unplugs
//! or the BMS disconnects them. The remaining strings are distributed
//! between PV and inverter:
//!
//! * without PV production, the string most responsible for the mean SOE
//!   deviating from the reference goes to the inverter;
//! * with two EVs charging, the remaining string goes to PV and the
//!   inverter stays unallocated;
//! * with PV above the grid rating, the lowest-SOE string goes to PV first
//!   and the inverter is chosen from the rest;
//! * otherwise the inverter is chosen first and the lowest-SOE remaining
//!   string goes to PV.
//!
//! A string at or above `soe_max` is never put on PV, since it could not
//! absorb anything.

use alloc::vec::Vec;

use crate::config::SystemConfig;
use crate::types::{AllocationMap, ComponentId};

/// Inputs to one allocation round.
#[derive(Debug, Clone, Copy)]
pub struct AllocationRequest<'a> {
    pub current: &'a AllocationMap,
    pub soes: &'a [f64],
    /// EV lock per string before this round.
    pub locked: &'a [bool],
    /// An EV plugged in at charger `i` this step.
    pub plugged: [bool; 2],
    /// The EV at charger `i` unplugged this step.
    pub unplugged: [bool; 2],
    pub pv_active: bool,
    pub p_pv: f64,
}

/// Outcome of one allocation round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationDecision {
    pub map: AllocationMap,
    pub locked: Vec<bool>,
    /// Plug-in at charger `i` found no string to serve it.
    pub blocked: [bool; 2],
}

/// Picks the candidate most responsible for the mean SOE deviating from
/// `soe_ref`: the argmax of `(soe - soe_ref) * sgn(mean_soe - soe_ref)`,
/// with `sgn(0) = +1` and ties going to the lowest id.
///
/// # Panics
///
/// Panics if `candidates` is empty.
pub fn deviation_responsibility_select(
    candidates: &[(usize, f64)],
    mean_soe: f64,
    soe_ref: f64,
) -> usize {
    let sign = if mean_soe - soe_ref >= 0.0 { 1.0 } else { -1.0 };
    let mut best: Option<(usize, f64)> = None;
    for &(id, soe) in candidates {
        let score = (soe - soe_ref) * sign;
        best = match best {
            Some((bid, bs)) if bs > score || (bs == score && bid < id) => Some((bid, bs)),
            _ => Some((id, score)),
        };
    }
    best.expect("deviation selection needs at least one candidate")
        .0
}

/// Lowest-SOE string among `ids` (ties to the lowest id).
fn lowest_soe(ids: &[usize], soes: &[f64]) -> Option<usize> {
    ids.iter()
        .copied()
        .reduce(|a, b| if soes[b] < soes[a] { b } else { a })
}

/// Highest-SOE string among `ids` (ties to the lowest id).
fn highest_soe(ids: &[usize], soes: &[f64]) -> Option<usize> {
    ids.iter()
        .copied()
        .reduce(|a, b| if soes[b] > soes[a] { b } else { a })
}

fn select_for_inverter(ids: &[usize], soes: &[f64], mean: f64, soe_ref: f64) -> Option<usize> {
    if ids.is_empty() {
        return None;
    }
    let candidates: Vec<(usize, f64)> = ids.iter().map(|&i| (i, soes[i])).collect();
    Some(deviation_responsibility_select(&candidates, mean, soe_ref))
}

fn without(ids: &[usize], drop: Option<usize>) -> Vec<usize> {
    ids.iter().copied().filter(|&i| Some(i) != drop).collect()
}

/// Proposes a new allocation.
pub fn allocate_strings(cfg: &SystemConfig, req: &AllocationRequest<'_>) -> AllocationDecision {
    let n = req.soes.len();
    let soes = req.soes;
    let mut locked = req.locked.to_vec();
    let mut map = AllocationMap::new(n);
    let mut blocked = [false; 2];

    // Keep EV strings where they are, releasing those whose EV left.
    for id in 0..n {
        if !locked[id] {
            continue;
        }
        let target = req.current.get(id);
        match target.charger_index() {
            Some(c) if !req.unplugged[c] => {
                map.assign(id, target)
                    .expect("locked strings hold distinct chargers");
            }
            _ => locked[id] = false,
        }
    }

    for (c, &plugged) in req.plugged.iter().enumerate() {
        if !plugged {
            continue;
        }
        let charger = ComponentId::charger(c);
        if let Some(holder) = map.string_on(charger) {
            // A new EV replaces one that left this same step.
            locked[holder] = false;
            map.detach(holder);
        }
        let available: Vec<usize> = (0..n).filter(|&i| !locked[i]).collect();
        match highest_soe(&available, soes) {
            Some(id) => {
                map.assign(id, charger).expect("charger freed above");
                locked[id] = true;
            }
            None => blocked[c] = true,
        }
    }

    let available: Vec<usize> = (0..n).filter(|&i| !locked[i]).collect();
    let chargeable = |i: &usize| soes[*i] < cfg.soe_max;
    let mean = soes.iter().sum::<f64>() / n as f64;
    let evs_charging = locked.iter().filter(|&&l| l).count();

    let (pv, inverter) = if !req.pv_active {
        (
            None,
            select_for_inverter(&available, soes, mean, cfg.soe_ref),
        )
    } else if evs_charging >= 2 {
        let pv = lowest_soe(&available, soes).filter(chargeable);
        (pv, None)
    } else if req.p_pv > cfg.p_r_grid {
        let pv = lowest_soe(&available, soes).filter(chargeable);
        let rest = without(&available, pv);
        (pv, select_for_inverter(&rest, soes, mean, cfg.soe_ref))
    } else {
        let inv = select_for_inverter(&available, soes, mean, cfg.soe_ref);
        let rest = without(&available, inv);
        match lowest_soe(&rest, soes).filter(chargeable) {
            Some(pv) => (Some(pv), inv),
            None => {
                // The inverter took the only string that could absorb PV.
                let pv = lowest_soe(&available, soes).filter(chargeable);
                let rest = without(&available, pv);
                (pv, select_for_inverter(&rest, soes, mean, cfg.soe_ref))
            }
        }
    };

    if let Some(id) = pv {
        map.assign(id, ComponentId::Pv).expect("pv unassigned");
    }
    if let Some(id) = inverter {
        map.assign(id, ComponentId::Inverter)
            .expect("inverter unassigned");
    }
    AllocationDecision {
        map,
        locked,
        blocked,
    }
}
