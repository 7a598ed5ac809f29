use num_bigint::BigUint;
use thiserror::Error;

use crate::rule::Violation;

#[derive(Debug, Error)]
pub enum ParkError {
    #[error("invalid rule: {}", join_violations(.0))]
    InvalidRule(Vec<Violation>),

    #[error("car {car} uses the coin-flip policy, which the deterministic engine cannot run")]
    RandomizedPolicy { car: usize },

    #[error("preference list has {got} entries but the fleet has {expected} cars")]
    LengthMismatch { expected: usize, got: usize },

    #[error("car {car} prefers spot {value}, outside 1..={spots}")]
    PreferenceOutOfRange { car: usize, value: usize, spots: usize },

    #[error("search space has {required} lists, over the budget of {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("bad parameters for preset `{preset}`: {reason}")]
    PresetParams { preset: String, reason: String },

    #[error("visitor aborted after {visited} lists: {message}")]
    VisitorAborted { visited: u64, message: String },

    #[error("statistics need a successful outcome; car {first_fail} failed to park")]
    FailedOutcome { first_fail: usize },

    #[error("trial count must be positive")]
    ZeroTrials,

    #[error("heads probability {0} is outside [0, 1]")]
    BadCoin(String),

    #[error("rule document: {0}")]
    Document(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = ParkError> = std::result::Result<T, E>;
