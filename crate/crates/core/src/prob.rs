//! Parking probabilities for rules with coin-flip cars.
//!
//! A coin-flip car flips at most once: when its preferred spot is full and a
//! spot behind it exists. Heads checks that spot before scanning forward;
//! tails scans forward straight away. Other cars follow their deterministic
//! policy. [`exact_park_probability`] walks the full decision tree;
//! [`mc_park_probability`] samples it.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{coin_flip_needed, place_car};
use crate::enumerate::{check_domain, CountOptions, ShardPlan};
use crate::error::{ParkError, Result};
use crate::exec::map_reduce;
use crate::rule::{check_prefs, PreferenceList, RuleSpec};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5E_ED0F_C01B;

/// Trials per random stream. Fixed so results do not depend on scheduling.
const MC_BATCH: u64 = 4096;

/// Exact parking probability under a fair coin, `numerator / denominator`
/// in lowest terms with a power-of-two denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactProbability {
    numerator: BigUint,
    denominator: BigUint,
}

impl ExactProbability {
    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn to_f64(&self) -> f64 {
        self.as_ratio().to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> BigRational {
        BigRational::new(self.numerator.clone().into(), self.denominator.clone().into())
    }

    fn from_ratio(r: &BigRational) -> Self {
        ExactProbability {
            numerator: r.numer().to_biguint().expect("probability is non-negative"),
            denominator: r.denom().to_biguint().expect("denominator is positive"),
        }
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Validates a rule for the probability routines; coin cars are unit-size
/// by rule validation.
fn check_rule(rule: &RuleSpec) -> Result<()> {
    rule.validated().map(|_| ())
}

fn tree_probability(
    residual: &mut Vec<usize>,
    car: usize,
    prefs: &[usize],
    rule: &RuleSpec,
    heads: &BigRational,
    tails: &BigRational,
) -> BigRational {
    if car == prefs.len() {
        return BigRational::one();
    }
    let pref = prefs[car];
    let size = rule.fleet.sizes[car];
    let policy = rule.fleet.policies[car];

    if coin_flip_needed(residual, pref, policy) {
        let mut total = BigRational::zero();
        let mut branch = residual.clone();
        if place_car(&mut branch, pref, size, policy, true, &mut ()).is_some() {
            total += heads * tree_probability(&mut branch, car + 1, prefs, rule, heads, tails);
        }
        if place_car(residual, pref, size, policy, false, &mut ()).is_some() {
            total += tails * tree_probability(residual, car + 1, prefs, rule, heads, tails);
        }
        total
    } else if place_car(residual, pref, size, policy, false, &mut ()).is_some() {
        tree_probability(residual, car + 1, prefs, rule, heads, tails)
    } else {
        BigRational::zero()
    }
}

/// Probability that every car parks when coin-flip cars flip a fair coin.
pub fn exact_park_probability(prefs: &PreferenceList, rule: &RuleSpec) -> Result<ExactProbability> {
    let half = BigRational::new(1.into(), 2.into());
    let p = exact_park_probability_weighted(prefs, rule, &half)?;
    Ok(ExactProbability::from_ratio(&p))
}

/// As [`exact_park_probability`] with a coin that lands heads with
/// probability `heads`.
pub fn exact_park_probability_weighted(
    prefs: &PreferenceList,
    rule: &RuleSpec,
    heads: &BigRational,
) -> Result<BigRational> {
    check_rule(rule)?;
    check_prefs(prefs.as_slice(), rule)?;
    check_heads(heads)?;
    let tails = BigRational::one() - heads;
    let mut residual = rule.lot.initial_residual();
    Ok(tree_probability(&mut residual, 0, prefs.as_slice(), rule, heads, &tails))
}

fn check_heads(heads: &BigRational) -> Result<()> {
    if heads < &BigRational::zero() || heads > &BigRational::one() {
        Err(ParkError::BadCoin(heads.to_string()))
    } else {
        Ok(())
    }
}

/// Expected number of lists in `[m]^n` that park, under a fair coin. With
/// no coin-flip cars this is exactly the parking count.
pub fn expected_park_count(rule: &RuleSpec, opts: &CountOptions) -> Result<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    expected_park_count_weighted(rule, opts, &half)
}

pub fn expected_park_count_weighted(
    rule: &RuleSpec,
    opts: &CountOptions,
    heads: &BigRational,
) -> Result<BigRational> {
    check_domain(rule, opts.budget)?;
    check_heads(heads)?;
    let tails = BigRational::one() - heads;
    let initial = rule.lot.initial_residual();
    let plan = ShardPlan::new(rule.spots(), rule.cars());
    Ok(map_reduce(
        plan.shards,
        opts.workers,
        |shard| {
            let mut sum = BigRational::zero();
            plan.walk(shard, |prefs| {
                let mut residual = initial.clone();
                sum += tree_probability(&mut residual, 0, prefs, rule, heads, &tails);
                true
            });
            sum
        },
        BigRational::zero,
        |a, b| a + b,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub seed: u64,
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Probability of heads.
    pub heads: f64,
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            heads: 0.5,
            workers: None,
        }
    }
}

/// Monte Carlo estimate with a fair coin.
pub fn mc_park_probability(
    prefs: &PreferenceList,
    rule: &RuleSpec,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    mc_park_probability_with(prefs, rule, &McConfig::new(trials, seed))
}

/// Trials are grouped in fixed batches; batch `b` draws from ChaCha stream
/// `b` of `seed`, so the estimate is the same for any worker count.
pub fn mc_park_probability_with(
    prefs: &PreferenceList,
    rule: &RuleSpec,
    cfg: &McConfig,
) -> Result<McEstimate> {
    check_rule(rule)?;
    check_prefs(prefs.as_slice(), rule)?;
    if cfg.trials == 0 {
        return Err(ParkError::ZeroTrials);
    }
    if !(0.0..=1.0).contains(&cfg.heads) {
        return Err(ParkError::BadCoin(cfg.heads.to_string()));
    }
    let prefs = prefs.as_slice();
    let initial = rule.lot.initial_residual();
    let batches = cfg.trials.div_ceil(MC_BATCH);

    let successes = map_reduce(
        batches,
        cfg.workers,
        |batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(batch);
            let len = MC_BATCH.min(cfg.trials - batch * MC_BATCH);
            let mut residual = initial.clone();
            let mut hits = 0u64;
            for _ in 0..len {
                residual.copy_from_slice(&initial);
                let parked = prefs.iter().enumerate().all(|(i, &pref)| {
                    let policy = rule.fleet.policies[i];
                    let heads =
                        coin_flip_needed(&residual, pref, policy) && rng.random_bool(cfg.heads);
                    place_car(&mut residual, pref, rule.fleet.sizes[i], policy, heads, &mut ())
                        .is_some()
                });
                hits += parked as u64;
            }
            hits
        },
        || 0,
        |a, b| a + b,
    );

    let estimate = successes as f64 / cfg.trials as f64;
    Ok(McEstimate {
        trials: cfg.trials,
        successes,
        estimate,
        seed: cfg.seed,
        standard_error: (estimate * (1.0 - estimate) / cfg.trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::Preset;

    fn coin(n: usize) -> RuleSpec {
        Preset::Coin { n }.expand().unwrap()
    }

    fn exact(prefs: &[usize]) -> String {
        exact_park_probability(&prefs.to_vec().into(), &coin(prefs.len()))
            .unwrap()
            .to_string()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact(&[2, 1]), "1/1");
        assert_eq!(exact(&[2, 2]), "1/2");
        assert_eq!(exact(&[2, 2, 2]), "3/4");
        assert_eq!(exact(&[1, 1]), "1/1");
    }

    #[test]
    fn expected_counts() {
        let opts = CountOptions::default();
        assert_eq!(expected_park_count(&coin(1), &opts).unwrap(), BigRational::one());
        assert_eq!(
            expected_park_count(&coin(2), &opts).unwrap(),
            BigRational::new(7.into(), 2.into())
        );
        let classical = Preset::Classical { n: 4 }.expand().unwrap();
        assert_eq!(
            expected_park_count(&classical, &opts).unwrap(),
            BigRational::from_integer(125.into())
        );
    }

    #[test]
    fn weighted_coin() {
        let rule = coin(2);
        let always = exact_park_probability_weighted(&vec![2, 2].into(), &rule, &BigRational::one())
            .unwrap();
        assert_eq!(always, BigRational::one());
        let third = BigRational::new(1.into(), 3.into());
        let p = exact_park_probability_weighted(&vec![2, 2].into(), &rule, &third).unwrap();
        assert_eq!(p, third);
        assert!(exact_park_probability_weighted(
            &vec![2, 2].into(),
            &rule,
            &BigRational::from_integer(2.into())
        )
        .is_err());
    }

    #[test]
    fn mc_examples() {
        let e = mc_park_probability(&vec![2, 1].into(), &coin(2), 1000, 7).unwrap();
        assert_eq!(e.estimate, 1.0);
        let e = mc_park_probability(&vec![2, 2].into(), &coin(2), 100_000, DEFAULT_SEED).unwrap();
        assert!((e.estimate - 0.5).abs() < 0.01, "{e:?}");
        let e = mc_park_probability(&vec![2, 2, 2].into(), &coin(3), 100_000, DEFAULT_SEED).unwrap();
        assert!((e.estimate - 0.75).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn mc_is_schedule_independent() {
        let rule = coin(4);
        let prefs: PreferenceList = vec![3, 3, 3, 2].into();
        let mut cfg = McConfig::new(50_000, 42);
        cfg.workers = Some(1);
        let one = mc_park_probability_with(&prefs, &rule, &cfg).unwrap();
        cfg.workers = Some(5);
        let five = mc_park_probability_with(&prefs, &rule, &cfg).unwrap();
        assert_eq!(one, five);
    }

    #[test]
    fn mc_errors() {
        assert!(matches!(
            mc_park_probability(&vec![1].into(), &coin(1), 0, 1),
            Err(ParkError::ZeroTrials)
        ));
        let mut cfg = McConfig::new(10, 1);
        cfg.heads = 1.5;
        assert!(matches!(
            mc_park_probability_with(&vec![1].into(), &coin(1), &cfg),
            Err(ParkError::BadCoin(_))
        ));
    }
}
