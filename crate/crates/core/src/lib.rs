//! Generalized parking functions.
//!
//! `n` cars with preferred spots arrive one at a time at a street of `m`
//! spots. A [`RuleSpec`] says how big the spots and cars are and what each
//! car does when its spot is taken: drive forward, back up a few spots,
//! teleport, or flip a coin. A preference list is a parking function for the
//! rule when every car parks.
//!
//! The crate simulates single lists ([`engine`]), counts parking functions by
//! exhaustive search ([`enumerate`]), computes list statistics ([`stats`]) and
//! parking probabilities for coin-flip cars ([`prob`]). [`oracle`] is a slow
//! independent reimplementation used to cross-check the rest.
//!
//! Searches run on rayon when the default `parallel` feature is enabled and
//! sequentially otherwise; results are identical either way.
//!
//! ```
//! use parkfn::{count_parking, park, Preset};
//!
//! let rule = Preset::Naples { n: 2, k: 1 }.expand().unwrap();
//! assert!(park(&vec![2, 2].into(), &rule).unwrap().is_success());
//! assert_eq!(count_parking(&rule).unwrap().parking_count, 4u32.into());
//! ```

pub mod classical;
pub mod document;
pub mod engine;
pub mod enumerate;
pub mod error;
mod exec;
pub mod oracle;
pub mod preset;
pub mod prob;
pub mod rule;
pub mod stats;

pub use classical::{kw_count, stanley_check};
pub use document::RuleDocument;
pub use engine::{park, trace, Simulator, StepRecord};
pub use enumerate::{
    count_parking, count_parking_with, enumerate_parking, sweep, CountOptions, CountReport,
    Family, ParamGrid,
};
pub use error::{ParkError, Result};
pub use exec::PARALLEL;
pub use preset::{expand_preset, Preset};
pub use prob::{exact_park_probability, mc_park_probability, ExactProbability, McEstimate};
pub use rule::{
    FleetSpec, LotSpec, MovementPolicy, ParkingOutcome, PreferenceList, RuleSpec, Violation,
};
pub use stats::{aggregate_stats, list_stats, AggregateStatistics, ListStatistics};
