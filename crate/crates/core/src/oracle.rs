//! Reference implementation for differential tests.
//!
//! Written as a direct, unoptimized transcription of the parking rules. It
//! shares no code with [`crate::engine`]: the lot is a list of parked cars per
//! spot and every check is spelled out. Slow on purpose.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{ParkError, Result};
use crate::rule::{MovementPolicy, ParkingOutcome, PreferenceList, RuleSpec};

/// Largest domain the oracle will walk.
pub const ORACLE_LIMIT: u64 = 1_000_000;

struct Street<'a> {
    rule: &'a RuleSpec,
    /// cars parked in each spot, index 0 unused
    parked: Vec<Vec<usize>>,
}

impl<'a> Street<'a> {
    fn new(rule: &'a RuleSpec) -> Self {
        Street {
            rule,
            parked: vec![Vec::new(); rule.lot.spots + 1],
        }
    }

    fn exists(&self, spot: i64) -> bool {
        spot >= 1 && spot <= self.rule.lot.spots as i64
    }

    fn has_room(&self, spot: i64) -> bool {
        if !self.exists(spot) {
            return false;
        }
        let s = spot as usize;
        !self.rule.lot.obstructed.contains(&s)
            && self.parked[s].len() < self.rule.lot.capacities[s - 1]
    }

    fn park_at(&mut self, car: usize, spot: i64, size: usize) -> Option<usize> {
        for s in spot as usize..spot as usize + size {
            self.parked[s].push(car);
        }
        Some(spot as usize)
    }

    fn block_has_room(&self, start: i64, size: usize) -> bool {
        (0..size as i64).all(|j| self.has_room(start + j))
    }

    /// Drive forward from `from`, taking the first spot with room.
    fn drive_forward(&mut self, car: usize, from: i64) -> Option<usize> {
        let mut spot = from;
        while self.exists(spot) {
            if self.has_room(spot) {
                return self.park_at(car, spot, 1);
            }
            spot += 1;
        }
        None
    }

    fn arrive(&mut self, car: usize, preferred: usize, heads: bool) -> Option<usize> {
        let size = self.rule.fleet.sizes[car - 1];
        let a = preferred as i64;
        match self.rule.fleet.policies[car - 1] {
            MovementPolicy::ForwardOnly => {
                let mut start = a;
                while start + size as i64 - 1 <= self.rule.lot.spots as i64 {
                    if self.block_has_room(start, size) {
                        return self.park_at(car, start, size);
                    }
                    start += 1;
                }
                None
            }
            MovementPolicy::BackUpTo(b) => {
                if self.has_room(a) {
                    return self.park_at(car, a, 1);
                }
                for step in 1..=b as i64 {
                    let behind = a - step;
                    if !self.exists(behind) {
                        break;
                    }
                    if self.has_room(behind) {
                        return self.park_at(car, behind, 1);
                    }
                }
                self.drive_forward(car, a + 1)
            }
            MovementPolicy::TeleportBack(k) => {
                if self.has_room(a) {
                    return self.park_at(car, a, 1);
                }
                let landing = a - k as i64;
                if landing < 1 {
                    return None;
                }
                if self.has_room(landing) {
                    return self.park_at(car, landing, 1);
                }
                self.drive_forward(car, landing + 1)
            }
            MovementPolicy::SingleTeleportForward(k) => {
                let fits = |start: i64| start + size as i64 - 1 <= self.rule.lot.spots as i64;
                if fits(a) && self.block_has_room(a, size) {
                    return self.park_at(car, a, size);
                }
                let landing = a + k as i64;
                if !fits(landing) {
                    return None;
                }
                if self.block_has_room(landing, size) {
                    self.park_at(car, landing, size)
                } else {
                    None
                }
            }
            MovementPolicy::CoinBackOne => {
                if self.has_room(a) {
                    return self.park_at(car, a, 1);
                }
                if heads && self.has_room(a - 1) {
                    return self.park_at(car, a - 1, 1);
                }
                self.drive_forward(car, a + 1)
            }
        }
    }

    /// Whether this car would flip a coin right now.
    fn flips(&self, car: usize, preferred: usize) -> bool {
        self.rule.fleet.policies[car - 1] == MovementPolicy::CoinBackOne
            && !self.has_room(preferred as i64)
            && self.exists(preferred as i64 - 1)
    }
}

fn check(prefs: &[usize], rule: &RuleSpec) -> Result<()> {
    let violations = rule.validate();
    if !violations.is_empty() {
        return Err(ParkError::InvalidRule(violations));
    }
    if prefs.len() != rule.fleet.cars {
        return Err(ParkError::LengthMismatch {
            expected: rule.fleet.cars,
            got: prefs.len(),
        });
    }
    for (i, &p) in prefs.iter().enumerate() {
        if p == 0 || p > rule.lot.spots {
            return Err(ParkError::PreferenceOutOfRange {
                car: i + 1,
                value: p,
                spots: rule.lot.spots,
            });
        }
    }
    Ok(())
}

/// Same contract as [`crate::engine::park`].
pub fn naive_park(prefs: &PreferenceList, rule: &RuleSpec) -> Result<ParkingOutcome> {
    check(prefs.as_slice(), rule)?;
    for (i, p) in rule.fleet.policies.iter().enumerate() {
        if *p == MovementPolicy::CoinBackOne {
            return Err(ParkError::RandomizedPolicy { car: i + 1 });
        }
    }
    let mut street = Street::new(rule);
    let mut assignment = Vec::new();
    for (i, &a) in prefs.as_slice().iter().enumerate() {
        match street.arrive(i + 1, a, false) {
            Some(spot) => assignment.push(spot),
            None => return Ok(ParkingOutcome::Failure { first_fail: i + 1 }),
        }
    }
    Ok(ParkingOutcome::Success { assignment })
}

/// Every list in `[m]^n`, in lexicographic order.
pub fn all_lists(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        let mut longer = Vec::new();
        for l in &lists {
            for v in 1..=m {
                let mut x = l.clone();
                x.push(v);
                longer.push(x);
            }
        }
        lists = longer;
    }
    lists
}

fn check_size(rule: &RuleSpec) -> Result<()> {
    let required = rule.domain_size();
    if required > BigUint::from(ORACLE_LIMIT) {
        return Err(ParkError::BudgetExceeded {
            required,
            budget: ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// Counts parking lists by calling [`naive_park`] on every list.
pub fn naive_count(rule: &RuleSpec) -> Result<BigUint> {
    check_size(rule)?;
    let mut count = BigUint::zero();
    for list in all_lists(rule.lot.spots, rule.fleet.cars) {
        if naive_park(&list.into(), rule)?.is_success() {
            count += 1u32;
        }
    }
    Ok(count)
}

/// Fair-coin parking probability by brute force over all `2^n` coin
/// vectors: car `j` uses bit `j` if it gets to flip. Each vector weighs
/// `2^-n`.
pub fn naive_coin_probability(prefs: &PreferenceList, rule: &RuleSpec) -> Result<BigRational> {
    check(prefs.as_slice(), rule)?;
    let n = prefs.len();
    assert!(n < 24, "2^n coin vectors");
    let mut parked_vectors = 0u64;
    for bits in 0u64..(1 << n) {
        let mut street = Street::new(rule);
        let mut ok = true;
        for (i, &a) in prefs.as_slice().iter().enumerate() {
            let heads = street.flips(i + 1, a) && (bits >> i) & 1 == 1;
            if street.arrive(i + 1, a, heads).is_none() {
                ok = false;
                break;
            }
        }
        if ok {
            parked_vectors += 1;
        }
    }
    Ok(BigRational::new(
        parked_vectors.into(),
        BigUint::from(1u64 << n).into(),
    ))
}
