//! JSON rule documents.
//!
//! ```json
//! {
//!   "spots": 5,
//!   "capacities": 1,
//!   "obstructed": [2, 4],
//!   "cars": 3,
//!   "sizes": 1,
//!   "policy": { "kind": "back", "k": 1 }
//! }
//! ```
//!
//! `capacities` and `sizes` take either one integer for every spot/car or a
//! full array; both default to 1. `policy` takes exactly one of:
//!
//! * `kind` (`forward`, `back`, `teleport_back`, `single_teleport`,
//!   `coin_back`) with `k` where the kind needs one, applied to every car;
//! * `per_car`, an array of `{ "kind": ..., "k": ... }`, one per car;
//! * `preset`, a per-car pattern: `forward`, `countdown`,
//!   `odd_back_even_forward`, `coin`, or `naples` (with `k`).
//!
//! Documents written by [`RuleDocument::from_rule`] always use the fully
//! expanded form (arrays and `per_car`), so reading one back yields the same
//! rule.

use serde::{Deserialize, Serialize};

use crate::error::{ParkError, Result};
use crate::rule::{FleetSpec, LotSpec, MovementPolicy, RuleSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntOrList {
    Int(usize),
    List(Vec<usize>),
}

impl IntOrList {
    fn expand(&self, len: usize) -> Vec<usize> {
        match self {
            IntOrList::Int(v) => vec![*v; len],
            IntOrList::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEntry {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_car: Option<Vec<PolicyEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub spots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacities: Option<IntOrList>,
    #[serde(default)]
    pub obstructed: Vec<usize>,
    pub cars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<IntOrList>,
    pub policy: PolicyDocument,
}

fn doc_err(msg: impl Into<String>) -> ParkError {
    ParkError::Document(msg.into())
}

fn parse_kind(kind: &str, k: Option<usize>, field: &str) -> Result<MovementPolicy> {
    let need_k = || k.ok_or_else(|| doc_err(format!("{field}: kind `{kind}` needs `k`")));
    Ok(match kind {
        "forward" => MovementPolicy::ForwardOnly,
        "back" => MovementPolicy::BackUpTo(need_k()?),
        "teleport_back" => MovementPolicy::TeleportBack(need_k()?),
        "single_teleport" => MovementPolicy::SingleTeleportForward(need_k()?),
        "coin_back" => MovementPolicy::CoinBackOne,
        other => return Err(doc_err(format!("{field}.kind: unknown kind `{other}`"))),
    })
}

fn entry_for(policy: MovementPolicy) -> PolicyEntry {
    let (kind, k) = match policy {
        MovementPolicy::ForwardOnly => ("forward", None),
        MovementPolicy::BackUpTo(b) => ("back", Some(b)),
        MovementPolicy::TeleportBack(k) => ("teleport_back", Some(k)),
        MovementPolicy::SingleTeleportForward(k) => ("single_teleport", Some(k)),
        MovementPolicy::CoinBackOne => ("coin_back", None),
    };
    PolicyEntry {
        kind: kind.to_string(),
        k,
    }
}

impl RuleDocument {
    /// Parses a document; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                doc_err(e.inner().to_string())
            } else {
                doc_err(format!("{path}: {}", e.inner()))
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rule documents always serialize")
    }

    /// Fully expanded document for `rule`.
    pub fn from_rule(rule: &RuleSpec) -> Self {
        RuleDocument {
            spots: rule.lot.spots,
            capacities: Some(IntOrList::List(rule.lot.capacities.clone())),
            obstructed: rule.lot.obstructed.iter().copied().collect(),
            cars: rule.fleet.cars,
            sizes: Some(IntOrList::List(rule.fleet.sizes.clone())),
            policy: PolicyDocument {
                per_car: Some(rule.fleet.policies.iter().map(|&p| entry_for(p)).collect()),
                ..Default::default()
            },
        }
    }

    /// Builds the rule. The result is not validated.
    pub fn to_rule(&self) -> Result<RuleSpec> {
        let n = self.cars;
        let p = &self.policy;
        let given = [p.kind.is_some(), p.per_car.is_some(), p.preset.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            return Err(doc_err(
                "policy: give exactly one of `kind`, `per_car`, `preset`",
            ));
        }

        let policies = if let Some(kind) = &p.kind {
            vec![parse_kind(kind, p.k, "policy")?; n]
        } else if let Some(entries) = &p.per_car {
            entries
                .iter()
                .enumerate()
                .map(|(i, e)| parse_kind(&e.kind, e.k, &format!("policy.per_car[{i}]")))
                .collect::<Result<Vec<_>>>()?
        } else {
            let preset = p.preset.as_deref().unwrap_or_default();
            match preset {
                "forward" | "classical" => vec![MovementPolicy::ForwardOnly; n],
                "naples" => {
                    let k = p.k.ok_or_else(|| doc_err("policy: preset `naples` needs `k`"))?;
                    vec![MovementPolicy::BackUpTo(k); n]
                }
                "countdown" => (1..=n).map(|i| MovementPolicy::BackUpTo(n - i + 1)).collect(),
                "odd_back_even_forward" => (1..=n)
                    .map(|i| {
                        if i % 2 == 1 {
                            MovementPolicy::BackUpTo(1)
                        } else {
                            MovementPolicy::ForwardOnly
                        }
                    })
                    .collect(),
                "coin" => vec![MovementPolicy::CoinBackOne; n],
                other => return Err(doc_err(format!("policy.preset: unknown preset `{other}`"))),
            }
        };

        let lot = LotSpec {
            spots: self.spots,
            capacities: self
                .capacities
                .as_ref()
                .map_or_else(|| vec![1; self.spots], |c| c.expand(self.spots)),
            obstructed: self.obstructed.iter().copied().collect(),
        };
        let fleet = FleetSpec {
            cars: n,
            sizes: self.sizes.as_ref().map_or_else(|| vec![1; n], |s| s.expand(n)),
            policies,
        };
        Ok(RuleSpec::new(lot, fleet))
    }
}
