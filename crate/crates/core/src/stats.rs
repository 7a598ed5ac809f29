//! Per-list and aggregate statistics: lucky cars, displacement, ascents,
//! descents, ties, peaks and valleys.

use serde::{Deserialize, Serialize};

use crate::enumerate::{fold_successes, CountOptions};
use crate::error::{ParkError, Result};
use crate::rule::{ParkingOutcome, RuleSpec};

/// Shape statistics that depend only on the preference list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceStatistics {
    pub ascents: usize,
    pub descents: usize,
    pub ties: usize,
    pub peaks: usize,
    pub valleys: usize,
}

pub fn sequence_stats(prefs: &[usize]) -> SequenceStatistics {
    let mut s = SequenceStatistics::default();
    for w in prefs.windows(2) {
        match w[0].cmp(&w[1]) {
            std::cmp::Ordering::Less => s.ascents += 1,
            std::cmp::Ordering::Greater => s.descents += 1,
            std::cmp::Ordering::Equal => s.ties += 1,
        }
    }
    // strict on both sides; plateaus are neither
    for w in prefs.windows(3) {
        if w[0] < w[1] && w[2] < w[1] {
            s.peaks += 1;
        } else if w[0] > w[1] && w[2] > w[1] {
            s.valleys += 1;
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListStatistics {
    pub lucky_count: usize,
    pub lucky_mask: Vec<bool>,
    /// Sum over cars of parked spot minus preferred spot.
    pub total_displacement_signed: i64,
    pub total_displacement_abs: u64,
    /// Cars that did not park at their preference.
    pub bump_count: usize,
    pub ascents: usize,
    pub descents: usize,
    pub ties: usize,
    pub peaks: usize,
    pub valleys: usize,
}

/// Statistics for a list that parked. A failed outcome is an error.
pub fn list_stats(prefs: &[usize], outcome: &ParkingOutcome) -> Result<ListStatistics> {
    match outcome {
        ParkingOutcome::Success { assignment } => Ok(stats_for(prefs, assignment)),
        ParkingOutcome::Failure { first_fail } => Err(ParkError::FailedOutcome {
            first_fail: *first_fail,
        }),
    }
}

pub(crate) fn stats_for(prefs: &[usize], assignment: &[usize]) -> ListStatistics {
    debug_assert_eq!(prefs.len(), assignment.len());
    let seq = sequence_stats(prefs);
    let lucky_mask: Vec<bool> = prefs.iter().zip(assignment).map(|(a, p)| a == p).collect();
    let lucky_count = lucky_mask.iter().filter(|&&l| l).count();
    let mut signed = 0i64;
    let mut abs = 0u64;
    for (&a, &p) in prefs.iter().zip(assignment) {
        let d = p as i64 - a as i64;
        signed += d;
        abs += d.unsigned_abs();
    }
    ListStatistics {
        lucky_count,
        lucky_mask,
        total_displacement_signed: signed,
        total_displacement_abs: abs,
        bump_count: prefs.len() - lucky_count,
        ascents: seq.ascents,
        descents: seq.descents,
        ties: seq.ties,
        peaks: seq.peaks,
        valleys: seq.valleys,
    }
}

/// Totals over a set of parking lists plus per-position histograms.
///
/// `lucky_at[i]` counts lists where car `i + 1` was lucky; `ascent_at[i]`
/// (and the descent/tie histograms) count lists with an ascent at position
/// `i + 1`. Dividing a histogram by `list_count` gives the positional
/// probability over a uniformly random parking list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateStatistics {
    pub cars: usize,
    pub list_count: u64,
    pub lucky: u64,
    pub bumps: u64,
    pub displacement_signed: i64,
    pub displacement_abs: u64,
    pub ascents: u64,
    pub descents: u64,
    pub ties: u64,
    pub peaks: u64,
    pub valleys: u64,
    pub lucky_at: Vec<u64>,
    pub ascent_at: Vec<u64>,
    pub descent_at: Vec<u64>,
    pub tie_at: Vec<u64>,
}

impl AggregateStatistics {
    pub fn new(cars: usize) -> Self {
        AggregateStatistics {
            cars,
            lucky_at: vec![0; cars],
            ascent_at: vec![0; cars.saturating_sub(1)],
            descent_at: vec![0; cars.saturating_sub(1)],
            tie_at: vec![0; cars.saturating_sub(1)],
            ..Default::default()
        }
    }

    /// Adds one successful list.
    pub fn add(&mut self, prefs: &[usize], assignment: &[usize]) {
        self.list_count += 1;
        for (i, (&a, &p)) in prefs.iter().zip(assignment).enumerate() {
            if a == p {
                self.lucky += 1;
                self.lucky_at[i] += 1;
            } else {
                self.bumps += 1;
            }
            let d = p as i64 - a as i64;
            self.displacement_signed += d;
            self.displacement_abs += d.unsigned_abs();
        }
        for (i, w) in prefs.windows(2).enumerate() {
            match w[0].cmp(&w[1]) {
                std::cmp::Ordering::Less => {
                    self.ascents += 1;
                    self.ascent_at[i] += 1;
                }
                std::cmp::Ordering::Greater => {
                    self.descents += 1;
                    self.descent_at[i] += 1;
                }
                std::cmp::Ordering::Equal => {
                    self.ties += 1;
                    self.tie_at[i] += 1;
                }
            }
        }
        let seq = sequence_stats(prefs);
        self.peaks += seq.peaks as u64;
        self.valleys += seq.valleys as u64;
    }

    pub fn merge(mut self, other: AggregateStatistics) -> Self {
        if self.list_count == 0 && self.cars == 0 {
            return other;
        }
        self.list_count += other.list_count;
        self.lucky += other.lucky;
        self.bumps += other.bumps;
        self.displacement_signed += other.displacement_signed;
        self.displacement_abs += other.displacement_abs;
        self.ascents += other.ascents;
        self.descents += other.descents;
        self.ties += other.ties;
        self.peaks += other.peaks;
        self.valleys += other.valleys;
        for (dst, src) in [
            (&mut self.lucky_at, &other.lucky_at),
            (&mut self.ascent_at, &other.ascent_at),
            (&mut self.descent_at, &other.descent_at),
            (&mut self.tie_at, &other.tie_at),
        ] {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        self
    }

    /// Probability that car `i + 1` parks at its preference, per position.
    pub fn lucky_probability(&self) -> Vec<f64> {
        self.lucky_at
            .iter()
            .map(|&c| c as f64 / self.list_count.max(1) as f64)
            .collect()
    }
}

/// Aggregates [`list_stats`] over every parking list of `rule`.
pub fn aggregate_stats(rule: &RuleSpec) -> Result<AggregateStatistics> {
    aggregate_stats_with(rule, &CountOptions::default())
}

pub fn aggregate_stats_with(rule: &RuleSpec, opts: &CountOptions) -> Result<AggregateStatistics> {
    let n = rule.cars();
    fold_successes(
        rule,
        opts,
        || AggregateStatistics::new(n),
        |agg, prefs, assignment| agg.add(prefs, assignment),
        AggregateStatistics::merge,
    )
}
