//! Deterministic parking simulator.
//!
//! Cars arrive in order. Each one probes its preferred spot first and, if
//! that spot is full, follows its [`MovementPolicy`]. A spot is full when its
//! residual capacity is zero; obstructed spots start full.

use serde::{Deserialize, Serialize};

use crate::error::{ParkError, Result};
use crate::rule::{check_prefs, MovementPolicy, ParkingOutcome, PreferenceList, RuleSpec};

pub(crate) trait ProbeSink {
    fn probe(&mut self, spot: usize);
}

impl ProbeSink for () {
    #[inline(always)]
    fn probe(&mut self, _: usize) {}
}

impl ProbeSink for Vec<usize> {
    fn probe(&mut self, spot: usize) {
        self.push(spot);
    }
}

#[inline]
fn block_free(residual: &[usize], start: usize, size: usize) -> bool {
    start >= 1
        && start + size - 1 <= residual.len()
        && residual[start - 1..start - 1 + size].iter().all(|&r| r > 0)
}

#[inline]
fn occupy(residual: &mut [usize], start: usize, size: usize) -> Option<usize> {
    for r in &mut residual[start - 1..start - 1 + size] {
        *r -= 1;
    }
    Some(start)
}

/// First block start at or after `from` with `size` free spots.
#[inline]
fn scan_forward<S: ProbeSink>(
    residual: &mut [usize],
    from: usize,
    size: usize,
    sink: &mut S,
) -> Option<usize> {
    let m = residual.len();
    let mut t = from;
    while t + size - 1 <= m {
        sink.probe(t);
        if block_free(residual, t, size) {
            return occupy(residual, t, size);
        }
        t += 1;
    }
    None
}

/// Whether a coin-flip car would flip at this moment: its preference is full
/// and a spot behind it exists.
#[inline]
pub(crate) fn coin_flip_needed(residual: &[usize], pref: usize, policy: MovementPolicy) -> bool {
    policy == MovementPolicy::CoinBackOne && pref >= 2 && residual[pref - 1] == 0
}

/// Places one car and returns the spot (block start) it took, or `None` if it
/// leaves. `heads` is only read by [`MovementPolicy::CoinBackOne`].
#[inline]
pub(crate) fn place_car<S: ProbeSink>(
    residual: &mut [usize],
    pref: usize,
    size: usize,
    policy: MovementPolicy,
    heads: bool,
    sink: &mut S,
) -> Option<usize> {
    use MovementPolicy::*;
    match policy {
        ForwardOnly => scan_forward(residual, pref, size, sink),
        SingleTeleportForward(k) => {
            sink.probe(pref);
            if block_free(residual, pref, size) {
                return occupy(residual, pref, size);
            }
            let landing = pref + k;
            if landing + size - 1 > residual.len() {
                return None;
            }
            sink.probe(landing);
            if block_free(residual, landing, size) {
                occupy(residual, landing, size)
            } else {
                None
            }
        }
        BackUpTo(b) => {
            sink.probe(pref);
            if residual[pref - 1] > 0 {
                return occupy(residual, pref, 1);
            }
            for back in (pref.saturating_sub(b).max(1)..pref).rev() {
                sink.probe(back);
                if residual[back - 1] > 0 {
                    return occupy(residual, back, 1);
                }
            }
            scan_forward(residual, pref + 1, 1, sink)
        }
        TeleportBack(k) => {
            sink.probe(pref);
            if residual[pref - 1] > 0 {
                return occupy(residual, pref, 1);
            }
            if k >= pref {
                return None;
            }
            scan_forward(residual, pref - k, 1, sink)
        }
        CoinBackOne => {
            sink.probe(pref);
            if residual[pref - 1] > 0 {
                return occupy(residual, pref, 1);
            }
            if heads && pref >= 2 {
                sink.probe(pref - 1);
                if residual[pref - 2] > 0 {
                    return occupy(residual, pref - 1, 1);
                }
            }
            scan_forward(residual, pref + 1, 1, sink)
        }
    }
}

/// Reusable simulator for one rule. Holds scratch buffers so the hot
/// enumeration loop does not allocate.
#[derive(Clone, Debug)]
pub struct Simulator<'r> {
    rule: &'r RuleSpec,
    initial: Vec<usize>,
    residual: Vec<usize>,
    assignment: Vec<usize>,
}

impl<'r> Simulator<'r> {
    /// Fails on an invalid rule or one containing a coin-flip car.
    pub fn new(rule: &'r RuleSpec) -> Result<Self> {
        rule.validated()?;
        if let Some(car) = rule.first_randomized_car() {
            return Err(ParkError::RandomizedPolicy { car });
        }
        let initial = rule.lot.initial_residual();
        Ok(Simulator {
            rule,
            residual: initial.clone(),
            initial,
            assignment: vec![0; rule.cars()],
        })
    }

    pub fn rule(&self) -> &RuleSpec {
        self.rule
    }

    /// Runs `prefs` (already range-checked). Returns the assignment, or the
    /// 1-based index of the first car that failed.
    #[inline]
    pub fn run(&mut self, prefs: &[usize]) -> std::result::Result<&[usize], usize> {
        debug_assert!(check_prefs(prefs, self.rule).is_ok());
        self.residual.copy_from_slice(&self.initial);
        let fleet = &self.rule.fleet;
        for (i, &pref) in prefs.iter().enumerate() {
            match place_car(
                &mut self.residual,
                pref,
                fleet.sizes[i],
                fleet.policies[i],
                false,
                &mut (),
            ) {
                Some(spot) => self.assignment[i] = spot,
                None => return Err(i + 1),
            }
        }
        Ok(&self.assignment)
    }

    /// Residual capacity per spot after the most recent run.
    pub fn residual(&self) -> &[usize] {
        &self.residual
    }
}

/// Simulates one preference list under a deterministic rule.
pub fn park(prefs: &PreferenceList, rule: &RuleSpec) -> Result<ParkingOutcome> {
    park_slice(prefs.as_slice(), rule)
}

pub fn park_slice(prefs: &[usize], rule: &RuleSpec) -> Result<ParkingOutcome> {
    let mut sim = Simulator::new(rule)?;
    check_prefs(prefs, rule)?;
    Ok(match sim.run(prefs) {
        Ok(a) => ParkingOutcome::Success {
            assignment: a.to_vec(),
        },
        Err(first_fail) => ParkingOutcome::Failure { first_fail },
    })
}

/// What happened to one car.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub car: usize,
    pub preferred: usize,
    /// Spots examined in order (block starts for sized cars), including the
    /// one finally taken.
    pub probes: Vec<usize>,
    /// `None` when the car left without parking.
    pub parked: Option<usize>,
}

/// Like [`park`], but records every probe. Stops after the first failing car.
pub fn trace(prefs: &PreferenceList, rule: &RuleSpec) -> Result<Vec<StepRecord>> {
    Simulator::new(rule)?;
    check_prefs(prefs.as_slice(), rule)?;
    let mut residual = rule.lot.initial_residual();
    let mut steps = Vec::with_capacity(prefs.len());
    for (i, &pref) in prefs.as_slice().iter().enumerate() {
        let mut probes = Vec::new();
        let parked = place_car(
            &mut residual,
            pref,
            rule.fleet.sizes[i],
            rule.fleet.policies[i],
            false,
            &mut probes,
        );
        steps.push(StepRecord {
            car: i + 1,
            preferred: pref,
            probes,
            parked,
        });
        if parked.is_none() {
            break;
        }
    }
    Ok(steps)
}

/// Rebuilds the outcome a trace describes.
pub fn replay(steps: &[StepRecord], cars: usize) -> ParkingOutcome {
    let mut assignment = Vec::with_capacity(cars);
    for step in steps {
        match step.parked {
            Some(s) => assignment.push(s),
            None => return ParkingOutcome::Failure { first_fail: step.car },
        }
    }
    debug_assert_eq!(assignment.len(), cars);
    ParkingOutcome::Success { assignment }
}

/// Residual capacities and occupants of the lot after a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotState {
    pub remaining: Vec<usize>,
    /// Cars present in each spot (sized cars appear in every spot they cover).
    pub occupied_by: Vec<Vec<usize>>,
}

/// Runs `prefs` and returns the outcome with the final lot state. On failure
/// the state is the one the failing car saw.
pub fn park_with_state(prefs: &PreferenceList, rule: &RuleSpec) -> Result<(ParkingOutcome, LotState)> {
    let mut sim = Simulator::new(rule)?;
    check_prefs(prefs.as_slice(), rule)?;
    let outcome = match sim.run(prefs.as_slice()) {
        Ok(a) => ParkingOutcome::Success {
            assignment: a.to_vec(),
        },
        Err(first_fail) => ParkingOutcome::Failure { first_fail },
    };
    let parked = match outcome {
        ParkingOutcome::Success { .. } => rule.cars(),
        ParkingOutcome::Failure { first_fail } => first_fail - 1,
    };
    let mut occupied_by = vec![Vec::new(); rule.spots()];
    for car in 0..parked {
        let start = sim.assignment[car];
        for s in start..start + rule.fleet.sizes[car] {
            occupied_by[s - 1].push(car + 1);
        }
    }
    Ok((
        outcome,
        LotState {
            remaining: sim.residual.clone(),
            occupied_by,
        },
    ))
}
