//! Exhaustive search over `[m]^n`.
//!
//! The domain is split into shards by fixing a prefix of the preference
//! list. Each shard walks its suffixes with an odometer and a private
//! [`Simulator`]; shard results are merged by integer addition.

use std::fmt::Display;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::engine::Simulator;
use crate::error::{ParkError, Result};
use crate::exec::map_reduce;
use crate::preset::Preset;
use crate::rule::{MovementPolicy, RuleSpec};
use crate::stats::AggregateStatistics;

/// Default cap on the number of lists a single search may simulate.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Aim for at least this many shards so work spreads across threads.
const MIN_SHARDS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// `None` = all available threads.
    pub workers: Option<usize>,
    pub budget: u64,
    /// Count forward-only unit-size rules with the suffix-capacity bound
    /// instead of simulating every list.
    pub prune: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: None,
            budget: DEFAULT_BUDGET,
            prune: false,
        }
    }
}

impl CountOptions {
    pub fn workers(mut self, w: Option<usize>) -> Self {
        self.workers = w;
        self
    }

    pub fn budget(mut self, b: u64) -> Self {
        self.budget = b;
        self
    }

    pub fn prune(mut self, p: bool) -> Self {
        self.prune = p;
        self
    }
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub rule: RuleSpec,
    pub domain_size: BigUint,
    pub parking_count: BigUint,
    pub elapsed: Duration,
    /// True when the count came from the pruned search.
    pub pruned: bool,
    pub stats_aggregate: Option<AggregateStatistics>,
}

/// Checks the rule and the budget, returning `m^n`.
pub(crate) fn check_domain(rule: &RuleSpec, budget: u64) -> Result<u64> {
    rule.validated()?;
    let required = rule.domain_size();
    match u64::try_from(&required) {
        Ok(d) if d <= budget => Ok(d),
        _ => Err(ParkError::BudgetExceeded { required, budget }),
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct ShardPlan {
    pub m: usize,
    pub n: usize,
    pub prefix_len: usize,
    pub shards: u64,
}

impl ShardPlan {
    pub fn new(m: usize, n: usize) -> Self {
        let mut prefix_len = 0;
        let mut shards = 1u64;
        while prefix_len < n && shards < MIN_SHARDS {
            shards *= m as u64;
            prefix_len += 1;
        }
        ShardPlan {
            m,
            n,
            prefix_len,
            shards,
        }
    }

    /// Writes the prefix of shard `index` into `prefs[..prefix_len]`, most
    /// significant coordinate first, and resets the suffix to all ones.
    pub fn seed(&self, index: u64, prefs: &mut [usize]) {
        let mut rest = index;
        for slot in prefs[..self.prefix_len].iter_mut().rev() {
            *slot = (rest % self.m as u64) as usize + 1;
            rest /= self.m as u64;
        }
        for slot in &mut prefs[self.prefix_len..] {
            *slot = 1;
        }
    }

    /// Calls `f` on every list of shard `index` in lexicographic order until
    /// it returns `false`.
    pub fn walk(&self, index: u64, mut f: impl FnMut(&[usize]) -> bool) {
        let mut prefs = vec![1; self.n];
        self.seed(index, &mut prefs);
        loop {
            if !f(&prefs) {
                return;
            }
            // odometer over the suffix
            let mut pos = self.n;
            loop {
                if pos == self.prefix_len {
                    return;
                }
                pos -= 1;
                if prefs[pos] < self.m {
                    prefs[pos] += 1;
                    break;
                }
                prefs[pos] = 1;
            }
        }
    }
}

/// Runs `step` on every successful list and merges the per-shard
/// accumulators.
pub(crate) fn fold_successes<A, Z, S, R>(
    rule: &RuleSpec,
    opts: &CountOptions,
    zero: Z,
    step: S,
    merge: R,
) -> Result<A>
where
    A: Send,
    Z: Fn() -> A + Sync + Send,
    S: Fn(&mut A, &[usize], &[usize]) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    check_domain(rule, opts.budget)?;
    let template = Simulator::new(rule)?;
    let plan = ShardPlan::new(rule.spots(), rule.cars());
    Ok(map_reduce(
        plan.shards,
        opts.workers,
        |shard| {
            let mut sim = template.clone();
            let mut acc = zero();
            plan.walk(shard, |prefs| {
                if let Ok(assignment) = sim.run(prefs) {
                    step(&mut acc, prefs, assignment);
                }
                true
            });
            acc
        },
        &zero,
        &merge,
    ))
}

/// Whether the suffix-capacity bound decides this rule exactly: every car
/// is unit size and only moves forward.
pub fn prunable(rule: &RuleSpec) -> bool {
    rule.fleet.sizes.iter().all(|&s| s == 1)
        && rule
            .fleet
            .policies
            .iter()
            .all(|&p| p == MovementPolicy::ForwardOnly)
}

/// Forward-only unit cars all park iff, for every spot `v`, the number of
/// cars preferring a spot `>= v` is at most the free capacity in `v..=m`.
/// Counts by depth-first search over prefixes, cutting any prefix that
/// already breaks the bound.
fn pruned_count(rule: &RuleSpec, workers: Option<usize>) -> u64 {
    let m = rule.spots();
    let n = rule.cars();
    // suffix[v] = free capacity in spots v..=m, v in 1..=m
    let mut suffix = vec![0usize; m + 2];
    let residual = rule.lot.initial_residual();
    for v in (1..=m).rev() {
        suffix[v] = suffix[v + 1] + residual[v - 1];
    }

    fn push(value: usize, at_least: &mut [usize], suffix: &[usize]) -> bool {
        if (1..=value).any(|v| at_least[v] + 1 > suffix[v]) {
            return false;
        }
        for c in &mut at_least[1..=value] {
            *c += 1;
        }
        true
    }

    fn pop(value: usize, at_least: &mut [usize]) {
        for c in &mut at_least[1..=value] {
            *c -= 1;
        }
    }

    fn dfs(depth: usize, n: usize, m: usize, at_least: &mut [usize], suffix: &[usize]) -> u64 {
        if depth == n {
            return 1;
        }
        let mut total = 0;
        for a in 1..=m {
            // if `a` breaks the bound, every larger value does too
            if !push(a, at_least, suffix) {
                break;
            }
            total += dfs(depth + 1, n, m, at_least, suffix);
            pop(a, at_least);
        }
        total
    }

    let plan = ShardPlan::new(m, n);
    map_reduce(
        plan.shards,
        workers,
        |shard| {
            let mut prefix = vec![1; n];
            plan.seed(shard, &mut prefix);
            let mut at_least = vec![0usize; m + 2];
            for &a in &prefix[..plan.prefix_len] {
                if !push(a, &mut at_least, &suffix) {
                    return 0;
                }
            }
            dfs(plan.prefix_len, n, m, &mut at_least, &suffix)
        },
        || 0,
        |a, b| a + b,
    )
}

/// Counts the lists in `[m]^n` under which every car parks.
pub fn count_parking(rule: &RuleSpec) -> Result<CountReport> {
    count_parking_with(rule, &CountOptions::default())
}

pub fn count_parking_with(rule: &RuleSpec, opts: &CountOptions) -> Result<CountReport> {
    let start = Instant::now();
    let domain = check_domain(rule, opts.budget)?;
    if let Some(car) = rule.first_randomized_car() {
        return Err(ParkError::RandomizedPolicy { car });
    }
    let pruned = opts.prune && prunable(rule);
    let count = if pruned {
        pruned_count(rule, opts.workers)
    } else {
        fold_successes(rule, opts, || 0u64, |c, _, _| *c += 1, |a, b| a + b)?
    };
    Ok(CountReport {
        rule: rule.clone(),
        domain_size: BigUint::from(domain),
        parking_count: BigUint::from(count),
        elapsed: start.elapsed(),
        pruned,
        stats_aggregate: None,
    })
}

/// Count plus aggregate statistics in one pass.
pub fn count_with_stats(rule: &RuleSpec, opts: &CountOptions) -> Result<CountReport> {
    let start = Instant::now();
    let agg = crate::stats::aggregate_stats_with(rule, opts)?;
    Ok(CountReport {
        rule: rule.clone(),
        domain_size: rule.domain_size(),
        parking_count: BigUint::from(agg.list_count),
        elapsed: start.elapsed(),
        pruned: false,
        stats_aggregate: Some(agg),
    })
}

/// Calls `visitor(prefs, assignment)` once per successful list, possibly
/// from several threads at once. The first visitor error stops the search.
/// Returns the number of visits.
pub fn enumerate_parking<F, E>(rule: &RuleSpec, opts: &CountOptions, visitor: F) -> Result<u64>
where
    F: Fn(&[usize], &[usize]) -> std::result::Result<(), E> + Sync + Send,
    E: Display,
{
    check_domain(rule, opts.budget)?;
    let template = Simulator::new(rule)?;
    let plan = ShardPlan::new(rule.spots(), rule.cars());
    let stop = AtomicBool::new(false);
    let failure: Mutex<Option<String>> = Mutex::new(None);

    let visited = map_reduce(
        plan.shards,
        opts.workers,
        |shard| {
            let mut sim = template.clone();
            let mut visits = 0u64;
            if stop.load(Ordering::Relaxed) {
                return 0;
            }
            plan.walk(shard, |prefs| {
                if let Ok(assignment) = sim.run(prefs) {
                    if let Err(e) = visitor(prefs, assignment) {
                        stop.store(true, Ordering::Relaxed);
                        failure.lock().unwrap().get_or_insert_with(|| e.to_string());
                        return false;
                    }
                    visits += 1;
                }
                !stop.load(Ordering::Relaxed)
            });
            visits
        },
        || 0,
        |a, b| a + b,
    );

    match failure.into_inner().unwrap() {
        Some(message) => Err(ParkError::VisitorAborted { visited, message }),
        None => Ok(visited),
    }
}

/// Sequential variant of [`enumerate_parking`]: one thread, lexicographic
/// order, and a visitor that may hold mutable state.
pub fn enumerate_parking_serial<F, E>(rule: &RuleSpec, budget: u64, mut visitor: F) -> Result<u64>
where
    F: FnMut(&[usize], &[usize]) -> std::result::Result<(), E>,
    E: Display,
{
    check_domain(rule, budget)?;
    let mut sim = Simulator::new(rule)?;
    let plan = ShardPlan::new(rule.spots(), rule.cars());
    let mut visited = 0u64;
    let mut failure = None;
    for shard in 0..plan.shards {
        plan.walk(shard, |prefs| {
            if let Ok(assignment) = sim.run(prefs) {
                if let Err(e) = visitor(prefs, assignment) {
                    failure = Some(e.to_string());
                    return false;
                }
                visited += 1;
            }
            true
        });
        if let Some(message) = failure {
            return Err(ParkError::VisitorAborted { visited, message });
        }
    }
    Ok(visited)
}

/// A preset family swept over a parameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Classical,
    Naples,
    Countdown,
    OddBackEvenForward,
    Clown,
    Scooter,
    Obstructed,
    Teleport,
    Futuristic,
}

/// Values for each grid axis. Axes a family does not use are ignored;
/// `blocked` and `sizes` are held fixed across the sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamGrid {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub d: Vec<usize>,
    pub k: Vec<usize>,
    pub blocked: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Classical => "classical",
            Family::Naples => "naples",
            Family::Countdown => "countdown",
            Family::OddBackEvenForward => "odd_back_even_forward",
            Family::Clown => "clown",
            Family::Scooter => "scooter",
            Family::Obstructed => "obstructed",
            Family::Teleport => "teleport",
            Family::Futuristic => "futuristic",
        }
    }

    /// Swept axes, outermost first.
    pub fn axes(self) -> &'static [&'static str] {
        match self {
            Family::Classical | Family::Countdown | Family::OddBackEvenForward => &["n"],
            Family::Naples | Family::Teleport => &["n", "k"],
            Family::Clown | Family::Scooter => &["m", "d", "n"],
            Family::Obstructed => &["m", "n"],
            Family::Futuristic => &["m", "k"],
        }
    }

    /// Grid points in row-major order over [`Family::axes`].
    pub fn points(self, grid: &ParamGrid) -> Result<Vec<Preset>> {
        let axis = |name: &str| -> Result<&Vec<usize>> {
            let v = match name {
                "n" => &grid.n,
                "m" => &grid.m,
                "d" => &grid.d,
                _ => &grid.k,
            };
            if v.is_empty() {
                Err(ParkError::PresetParams {
                    preset: self.name().to_string(),
                    reason: format!("sweep needs values for `{name}`"),
                })
            } else {
                Ok(v)
            }
        };
        let mut cells: Vec<Vec<usize>> = vec![Vec::new()];
        for name in self.axes() {
            let values = axis(name)?;
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        Ok(cells
            .into_iter()
            .map(|c| match self {
                Family::Classical => Preset::Classical { n: c[0] },
                Family::Countdown => Preset::Countdown { n: c[0] },
                Family::OddBackEvenForward => Preset::OddBackEvenForward { n: c[0] },
                Family::Naples => Preset::Naples { n: c[0], k: c[1] },
                Family::Teleport => Preset::Teleport { n: c[0], k: c[1] },
                Family::Clown => Preset::Clown { m: c[0], d: c[1], n: c[2] },
                Family::Scooter => Preset::Scooter { m: c[0], d: c[1], n: c[2] },
                Family::Obstructed => Preset::Obstructed {
                    m: c[0],
                    n: c[1],
                    blocked: grid.blocked.clone(),
                },
                Family::Futuristic => Preset::Futuristic {
                    m: c[0],
                    sizes: grid.sizes.clone(),
                    k: c[1],
                },
            })
            .collect())
    }
}

impl FromStr for Family {
    type Err = ParkError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "classical" => Family::Classical,
            "naples" => Family::Naples,
            "countdown" => Family::Countdown,
            "odd_back_even_forward" => Family::OddBackEvenForward,
            "clown" => Family::Clown,
            "scooter" => Family::Scooter,
            "obstructed" => Family::Obstructed,
            "teleport" => Family::Teleport,
            "futuristic" => Family::Futuristic,
            other => return Err(ParkError::UnknownPreset(other.to_string())),
        })
    }
}

#[derive(Debug)]
pub struct SweepRow {
    pub preset: Preset,
    pub result: Result<CountReport>,
}

/// One count per grid point, in grid order. A failing cell does not stop
/// the rest.
pub fn sweep(points: &[Preset], opts: &CountOptions) -> Vec<SweepRow> {
    points
        .iter()
        .map(|p| SweepRow {
            preset: p.clone(),
            result: p.expand().and_then(|rule| count_parking_with(&rule, opts)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(p: Preset) -> u64 {
        let r = count_parking(&p.expand().unwrap()).unwrap();
        u64::try_from(&r.parking_count).unwrap()
    }

    #[test]
    fn spec_counts() {
        assert_eq!(count(Preset::Classical { n: 3 }), 16);
        assert_eq!(count(Preset::Naples { n: 2, k: 1 }), 4);
        assert_eq!(count(Preset::Clown { m: 2, d: 2, n: 4 }), 11);
        assert_eq!(count(Preset::Scooter { m: 2, d: 2, n: 4 }), 16);
        assert_eq!(count(Preset::Obstructed { m: 3, n: 2, blocked: vec![3] }), 7);
        assert_eq!(count(Preset::Obstructed { m: 3, n: 2, blocked: vec![1] }), 9);
        assert_eq!(count(Preset::OddBackEvenForward { n: 2 }), 3);
        assert_eq!(count(Preset::Teleport { n: 2, k: 1 }), 3);
        assert_eq!(count(Preset::Teleport { n: 2, k: 2 }), 2);
        assert_eq!(count(Preset::Futuristic { m: 2, sizes: vec![1, 1], k: 1 }), 3);
        assert_eq!(count(Preset::Futuristic { m: 3, sizes: vec![2, 1], k: 1 }), 3);
    }

    #[test]
    fn walk_covers_domain_in_order() {
        for (m, n) in [(1, 1), (3, 1), (2, 5), (3, 4), (9, 3)] {
            let plan = ShardPlan::new(m, n);
            let mut all = Vec::new();
            for s in 0..plan.shards {
                plan.walk(s, |p| {
                    all.push(p.to_vec());
                    true
                });
            }
            assert_eq!(all.len(), m.pow(n as u32));
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn budget_refusal_reports_domain() {
        let rule = Preset::Classical { n: 9 }.expand().unwrap();
        match count_parking_with(&rule, &CountOptions::default().budget(1000)) {
            Err(ParkError::BudgetExceeded { required, budget }) => {
                assert_eq!(required, BigUint::from(387_420_489u64));
                assert_eq!(budget, 1000);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coin_rule_is_rejected() {
        let rule = Preset::Coin { n: 2 }.expand().unwrap();
        assert!(matches!(count_parking(&rule), Err(ParkError::RandomizedPolicy { .. })));
    }

    #[test]
    fn pruned_matches_unpruned() {
        let rules = [
            Preset::Classical { n: 6 }.expand().unwrap(),
            Preset::Clown { m: 3, d: 2, n: 5 }.expand().unwrap(),
            RuleSpec::new(
                crate::rule::LotSpec::new(5).obstruct([2]),
                crate::rule::FleetSpec::uniform(4, MovementPolicy::ForwardOnly),
            ),
        ];
        for rule in rules {
            let full = count_parking(&rule).unwrap();
            let pruned = count_parking_with(&rule, &CountOptions::default().prune(true)).unwrap();
            assert!(pruned.pruned);
            assert_eq!(full.parking_count, pruned.parking_count);
        }
        // not prunable: falls back to simulation
        let naples = Preset::Naples { n: 3, k: 1 }.expand().unwrap();
        assert!(!count_parking_with(&naples, &CountOptions::default().prune(true)).unwrap().pruned);
    }

    #[test]
    fn enumerate_visits_successes() {
        let rule = Preset::Classical { n: 2 }.expand().unwrap();
        let seen = Mutex::new(Vec::new());
        let visits = enumerate_parking(&rule, &CountOptions::default(), |p, _| {
            seen.lock().unwrap().push(p.to_vec());
            Ok::<_, String>(())
        })
        .unwrap();
        let mut seen = seen.into_inner().unwrap();
        seen.sort();
        assert_eq!(visits, 3);
        assert_eq!(seen, vec![vec![1, 1], vec![1, 2], vec![2, 1]]);

        let rule = Preset::Teleport { n: 2, k: 1 }.expand().unwrap();
        let mut seen = Vec::new();
        enumerate_parking_serial(&rule, DEFAULT_BUDGET, |p, _| {
            seen.push(p.to_vec());
            Ok::<_, String>(())
        })
        .unwrap();
        assert_eq!(seen, vec![vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn visitor_failure_aborts() {
        let rule = Preset::Classical { n: 4 }.expand().unwrap();
        let mut n = 0;
        let err = enumerate_parking_serial(&rule, DEFAULT_BUDGET, |_, _| {
            n += 1;
            if n == 10 {
                Err("full")
            } else {
                Ok(())
            }
        })
        .unwrap_err();
        assert!(matches!(err, ParkError::VisitorAborted { visited: 9, .. }));

        let err = enumerate_parking(&rule, &CountOptions::default(), |p, _| {
            if p == [1, 1, 1, 1] {
                Err("stop")
            } else {
                Ok(())
            }
        })
        .unwrap_err();
        assert!(matches!(err, ParkError::VisitorAborted { .. }));
    }

    #[test]
    fn sweep_in_grid_order() {
        let grid = ParamGrid {
            n: vec![2],
            k: vec![0, 1],
            ..Default::default()
        };
        let rows = sweep(&Family::Naples.points(&grid).unwrap(), &CountOptions::default());
        let counts: Vec<u64> = rows
            .iter()
            .map(|r| u64::try_from(&r.result.as_ref().unwrap().parking_count).unwrap())
            .collect();
        assert_eq!(counts, vec![3, 4]);

        let grid = ParamGrid {
            n: vec![1, 2, 3, 4],
            ..Default::default()
        };
        let rows = sweep(&Family::Classical.points(&grid).unwrap(), &CountOptions::default());
        let counts: Vec<u64> = rows
            .iter()
            .map(|r| u64::try_from(&r.result.as_ref().unwrap().parking_count).unwrap())
            .collect();
        assert_eq!(counts, vec![1, 3, 16, 125]);
    }

    #[test]
    fn sweep_keeps_going_after_bad_cell() {
        let grid = ParamGrid {
            m: vec![2, 3],
            n: vec![2],
            blocked: vec![3],
            ..Default::default()
        };
        let rows = sweep(&Family::Obstructed.points(&grid).unwrap(), &CountOptions::default());
        assert!(rows[0].result.is_err());
        assert_eq!(
            u64::try_from(&rows[1].result.as_ref().unwrap().parking_count).unwrap(),
            7
        );
        assert!(Family::Naples.points(&ParamGrid { n: vec![2], ..Default::default() }).is_err());
    }
}
