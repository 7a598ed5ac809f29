//! Domain model: the lot, the fleet, and how each car moves after a bump.
//!
//! Every parking variant is described as data. A [`RuleSpec`] pairs a
//! [`LotSpec`] (spots, per-spot capacity, obstructions) with a [`FleetSpec`]
//! (car count, car sizes, one [`MovementPolicy`] per car), and the engine is a
//! single interpreter over it. Spots and cars are numbered from 1.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{ParkError, Result};

/// The preferred spot of each car, in arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PreferenceList(Vec<usize>);

impl PreferenceList {
    pub fn new(entries: Vec<usize>) -> Self {
        PreferenceList(entries)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Checks length against the fleet and every entry against the lot.
    pub fn check_against(&self, rule: &RuleSpec) -> Result<()> {
        check_prefs(&self.0, rule)
    }
}

pub(crate) fn check_prefs(prefs: &[usize], rule: &RuleSpec) -> Result<()> {
    if prefs.len() != rule.cars() {
        return Err(ParkError::LengthMismatch {
            expected: rule.cars(),
            got: prefs.len(),
        });
    }
    for (i, &value) in prefs.iter().enumerate() {
        if value < 1 || value > rule.spots() {
            return Err(ParkError::PreferenceOutOfRange {
                car: i + 1,
                value,
                spots: rule.spots(),
            });
        }
    }
    Ok(())
}

impl From<Vec<usize>> for PreferenceList {
    fn from(v: Vec<usize>) -> Self {
        PreferenceList(v)
    }
}

impl From<&[usize]> for PreferenceList {
    fn from(v: &[usize]) -> Self {
        PreferenceList(v.to_vec())
    }
}

impl fmt::Display for PreferenceList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PreferenceList {
    type Err = String;

    /// Parses a comma-separated list such as `1,2,4,2,2`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{}` is not a spot number", t.trim()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PreferenceList)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotSpec {
    pub spots: usize,
    pub capacities: Vec<usize>,
    pub obstructed: BTreeSet<usize>,
}

impl LotSpec {
    /// `spots` spots of capacity one, none obstructed.
    pub fn new(spots: usize) -> Self {
        Self::with_capacity(spots, 1)
    }

    pub fn with_capacity(spots: usize, capacity: usize) -> Self {
        LotSpec {
            spots,
            capacities: vec![capacity; spots],
            obstructed: BTreeSet::new(),
        }
    }

    pub fn obstruct(mut self, spots: impl IntoIterator<Item = usize>) -> Self {
        self.obstructed.extend(spots);
        self
    }

    /// Residual capacity of each spot before any car arrives; obstructed
    /// spots start full.
    pub fn initial_residual(&self) -> Vec<usize> {
        self.capacities
            .iter()
            .enumerate()
            .map(|(i, &c)| if self.obstructed.contains(&(i + 1)) { 0 } else { c })
            .collect()
    }
}

/// What a car does when the spot it prefers is full.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MovementPolicy {
    /// Scan forward from the preferred spot.
    ForwardOnly,
    /// Check up to `b` spots behind the preference, nearest first, then
    /// scan forward from the spot after the preference.
    BackUpTo(usize),
    /// Jump `k` spots back; leaving the lot is a failure. Otherwise park at
    /// the landing spot or scan forward from just past it.
    TeleportBack(usize),
    /// Sized cars: try the block at the preference, then exactly one jump of
    /// `k` spots forward.
    SingleTeleportForward(usize),
    /// Flip a fair coin on a bump: heads checks one spot back first, tails
    /// scans forward. Only the probability module runs this policy.
    CoinBackOne,
}

impl MovementPolicy {
    pub fn is_randomized(self) -> bool {
        matches!(self, MovementPolicy::CoinBackOne)
    }
}

impl fmt::Display for MovementPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MovementPolicy::ForwardOnly => f.write_str("forward"),
            MovementPolicy::BackUpTo(b) => write!(f, "back({b})"),
            MovementPolicy::TeleportBack(k) => write!(f, "teleport_back({k})"),
            MovementPolicy::SingleTeleportForward(k) => write!(f, "single_teleport({k})"),
            MovementPolicy::CoinBackOne => f.write_str("coin_back"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub cars: usize,
    pub sizes: Vec<usize>,
    pub policies: Vec<MovementPolicy>,
}

impl FleetSpec {
    /// `cars` unit-size cars sharing one policy.
    pub fn uniform(cars: usize, policy: MovementPolicy) -> Self {
        FleetSpec {
            cars,
            sizes: vec![1; cars],
            policies: vec![policy; cars],
        }
    }

    pub fn with_policies(policies: Vec<MovementPolicy>) -> Self {
        FleetSpec {
            cars: policies.len(),
            sizes: vec![1; policies.len()],
            policies,
        }
    }

    pub fn sized(mut self, sizes: Vec<usize>) -> Self {
        self.sizes = sizes;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub lot: LotSpec,
    pub fleet: FleetSpec,
}

impl RuleSpec {
    pub fn new(lot: LotSpec, fleet: FleetSpec) -> Self {
        RuleSpec { lot, fleet }
    }

    pub fn spots(&self) -> usize {
        self.lot.spots
    }

    pub fn cars(&self) -> usize {
        self.fleet.cars
    }

    /// Every invariant violation; empty iff the rule is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    /// Returns the rule back if it is well-formed.
    pub fn validated(&self) -> Result<&Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(ParkError::InvalidRule(v))
        }
    }

    pub fn is_randomized(&self) -> bool {
        self.fleet.policies.iter().any(|p| p.is_randomized())
    }

    /// First car (1-based) with a randomized policy.
    pub fn first_randomized_car(&self) -> Option<usize> {
        self.fleet
            .policies
            .iter()
            .position(|p| p.is_randomized())
            .map(|i| i + 1)
    }

    /// `m^n`, the number of preference lists in the enumeration domain.
    pub fn domain_size(&self) -> BigUint {
        BigUint::from(self.spots()).pow(self.cars() as u32)
    }
}

/// A single broken invariant of a [`RuleSpec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSpots,
    NoCars,
    CapacityLength { spots: usize, got: usize },
    ZeroCapacity { spot: usize },
    ObstructedOutOfRange { spot: usize },
    SizeLength { cars: usize, got: usize },
    PolicyLength { cars: usize, got: usize },
    ZeroSize { car: usize },
    SizedCarPolicy { car: usize, size: usize, policy: MovementPolicy },
    SizedCarCapacity { spot: usize, capacity: usize },
    ZeroJump { car: usize, policy: MovementPolicy },
    TooFewFreeSpots { free_capacity: usize, demand: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoSpots => f.write_str("spots: lot must have at least one spot"),
            NoCars => f.write_str("cars: fleet must have at least one car"),
            CapacityLength { spots, got } => {
                write!(f, "capacities: {got} entries for {spots} spots")
            }
            ZeroCapacity { spot } => write!(f, "capacities: spot {spot} has capacity 0"),
            ObstructedOutOfRange { spot } => {
                write!(f, "obstructed: spot {spot} is not in the lot")
            }
            SizeLength { cars, got } => write!(f, "sizes: {got} entries for {cars} cars"),
            PolicyLength { cars, got } => write!(f, "policy: {got} entries for {cars} cars"),
            ZeroSize { car } => write!(f, "sizes: car {car} has size 0"),
            SizedCarPolicy { car, size, policy } => write!(
                f,
                "sizes: car {car} has size {size} but policy {policy}; sized cars must be forward or single_teleport"
            ),
            SizedCarCapacity { spot, capacity } => write!(
                f,
                "capacities: spot {spot} has capacity {capacity} but the fleet contains sized cars"
            ),
            ZeroJump { car, policy } => {
                write!(f, "policy: car {car} uses {policy} with a zero jump")
            }
            TooFewFreeSpots {
                free_capacity,
                demand,
            } => write!(
                f,
                "obstructed: {free_capacity} unobstructed capacity for {demand} units of car size"
            ),
        }
    }
}

pub fn validate(rule: &RuleSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let lot = &rule.lot;
    let fleet = &rule.fleet;

    if lot.spots == 0 {
        out.push(Violation::NoSpots);
    }
    if fleet.cars == 0 {
        out.push(Violation::NoCars);
    }
    if lot.capacities.len() != lot.spots {
        out.push(Violation::CapacityLength {
            spots: lot.spots,
            got: lot.capacities.len(),
        });
    }
    for (i, &c) in lot.capacities.iter().enumerate() {
        if c == 0 {
            out.push(Violation::ZeroCapacity { spot: i + 1 });
        }
    }
    for &s in &lot.obstructed {
        if s < 1 || s > lot.spots {
            out.push(Violation::ObstructedOutOfRange { spot: s });
        }
    }
    if fleet.sizes.len() != fleet.cars {
        out.push(Violation::SizeLength {
            cars: fleet.cars,
            got: fleet.sizes.len(),
        });
    }
    if fleet.policies.len() != fleet.cars {
        out.push(Violation::PolicyLength {
            cars: fleet.cars,
            got: fleet.policies.len(),
        });
    }

    for (i, (&size, &policy)) in fleet.sizes.iter().zip(&fleet.policies).enumerate() {
        let car = i + 1;
        if size == 0 {
            out.push(Violation::ZeroSize { car });
        }
        if size > 1
            && !matches!(
                policy,
                MovementPolicy::ForwardOnly | MovementPolicy::SingleTeleportForward(_)
            )
        {
            out.push(Violation::SizedCarPolicy { car, size, policy });
        }
    }
    for (i, &policy) in fleet.policies.iter().enumerate() {
        if matches!(
            policy,
            MovementPolicy::TeleportBack(0) | MovementPolicy::SingleTeleportForward(0)
        ) {
            out.push(Violation::ZeroJump { car: i + 1, policy });
        }
    }

    if fleet.sizes.iter().any(|&s| s > 1) {
        for (i, &c) in lot.capacities.iter().enumerate() {
            if c > 1 {
                out.push(Violation::SizedCarCapacity {
                    spot: i + 1,
                    capacity: c,
                });
            }
        }
    }

    // Obstructions may not starve the fleet outright.
    if !lot.obstructed.is_empty() && lot.capacities.len() == lot.spots {
        let free_capacity: usize = lot.initial_residual().iter().sum();
        let demand: usize = fleet.sizes.iter().sum();
        if free_capacity < demand {
            out.push(Violation::TooFewFreeSpots {
                free_capacity,
                demand,
            });
        }
    }

    out
}

/// Result of running one preference list through a deterministic rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ParkingOutcome {
    /// `assignment[i]` is the spot car `i + 1` parked in (the first spot of
    /// its block for sized cars).
    Success { assignment: Vec<usize> },
    /// The first car (1-based) that left without parking.
    Failure { first_fail: usize },
}

impl ParkingOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ParkingOutcome::Success { .. })
    }

    pub fn assignment(&self) -> Option<&[usize]> {
        match self {
            ParkingOutcome::Success { assignment } => Some(assignment),
            ParkingOutcome::Failure { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical(n: usize) -> RuleSpec {
        RuleSpec::new(
            LotSpec::new(n),
            FleetSpec::uniform(n, MovementPolicy::ForwardOnly),
        )
    }

    #[test]
    fn classical_is_valid() {
        assert!(classical(3).validate().is_empty());
    }

    #[test]
    fn capacity_length_mismatch() {
        let mut rule = classical(2);
        rule.lot.capacities = vec![1];
        assert_eq!(
            rule.validate(),
            vec![Violation::CapacityLength { spots: 2, got: 1 }]
        );
    }

    #[test]
    fn sized_car_with_back_policy() {
        let rule = RuleSpec::new(
            LotSpec::new(3),
            FleetSpec::uniform(1, MovementPolicy::BackUpTo(1)).sized(vec![2]),
        );
        let v = rule.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::SizedCarPolicy { car: 1, size: 2, .. }));
    }

    #[test]
    fn obstruction_outside_lot_and_starvation() {
        let rule = RuleSpec::new(
            LotSpec::new(2).obstruct([2, 5]),
            FleetSpec::uniform(2, MovementPolicy::ForwardOnly),
        );
        let v = rule.validate();
        assert!(v.contains(&Violation::ObstructedOutOfRange { spot: 5 }));
        assert!(v.contains(&Violation::TooFewFreeSpots {
            free_capacity: 1,
            demand: 2
        }));
    }

    #[test]
    fn zero_jumps_rejected() {
        let rule = RuleSpec::new(
            LotSpec::new(2),
            FleetSpec::with_policies(vec![
                MovementPolicy::TeleportBack(0),
                MovementPolicy::SingleTeleportForward(0),
            ]),
        );
        assert_eq!(rule.validate().len(), 2);
    }

    #[test]
    fn prefs_parse_and_check() {
        let p: PreferenceList = "1, 2,4".parse().unwrap();
        assert_eq!(p.as_slice(), &[1, 2, 4]);
        assert_eq!(p.to_string(), "1,2,4");
        assert!(matches!(
            p.check_against(&classical(3)),
            Err(ParkError::PreferenceOutOfRange { car: 3, value: 4, .. })
        ));
        assert!(matches!(
            p.check_against(&classical(2)),
            Err(ParkError::LengthMismatch { .. })
        ));
        assert!("1,x".parse::<PreferenceList>().is_err());
    }

    #[test]
    fn domain_size_is_exact() {
        assert_eq!(classical(7).domain_size(), BigUint::from(823_543u32));
        assert_eq!(
            classical(30).domain_size(),
            BigUint::from(30u32).pow(30)
        );
    }
}
