//! Named rule families and their `name:params` spelling.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ParkError, Result};
use crate::rule::{FleetSpec, LotSpec, MovementPolicy, RuleSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Preset {
    Classical { n: usize },
    Naples { n: usize, k: usize },
    /// Car `i` may back up `n - i + 1` spots.
    Countdown { n: usize },
    /// Odd-indexed cars back up one spot, even-indexed cars only go forward.
    OddBackEvenForward { n: usize },
    Clown { m: usize, d: usize, n: usize },
    Scooter { m: usize, d: usize, n: usize },
    Obstructed { m: usize, n: usize, blocked: Vec<usize> },
    Teleport { n: usize, k: usize },
    Futuristic { m: usize, sizes: Vec<usize>, k: usize },
    /// Classical lot where every car flips a coin on a bump.
    Coin { n: usize },
}

pub const PRESET_NAMES: &[&str] = &[
    "classical",
    "naples",
    "countdown",
    "odd_back_even_forward",
    "clown",
    "scooter",
    "obstructed",
    "teleport",
    "futuristic",
    "coin",
];

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Classical { .. } => "classical",
            Preset::Naples { .. } => "naples",
            Preset::Countdown { .. } => "countdown",
            Preset::OddBackEvenForward { .. } => "odd_back_even_forward",
            Preset::Clown { .. } => "clown",
            Preset::Scooter { .. } => "scooter",
            Preset::Obstructed { .. } => "obstructed",
            Preset::Teleport { .. } => "teleport",
            Preset::Futuristic { .. } => "futuristic",
            Preset::Coin { .. } => "coin",
        }
    }

    /// Parameter names and values in spelling order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[usize]| {
            format!(
                "[{}]",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            )
        };
        match self {
            Preset::Classical { n }
            | Preset::Countdown { n }
            | Preset::OddBackEvenForward { n }
            | Preset::Coin { n } => vec![("n", n.to_string())],
            Preset::Naples { n, k } | Preset::Teleport { n, k } => {
                vec![("n", n.to_string()), ("k", k.to_string())]
            }
            Preset::Clown { m, d, n } | Preset::Scooter { m, d, n } => vec![
                ("m", m.to_string()),
                ("d", d.to_string()),
                ("n", n.to_string()),
            ],
            Preset::Obstructed { m, n, blocked } => vec![
                ("m", m.to_string()),
                ("n", n.to_string()),
                ("blocked", list(blocked)),
            ],
            Preset::Futuristic { m, sizes, k } => vec![
                ("m", m.to_string()),
                ("sizes", list(sizes)),
                ("k", k.to_string()),
            ],
        }
    }

    pub fn expand(&self) -> Result<RuleSpec> {
        let rule = self.build()?;
        let violations = rule.validate();
        if violations.is_empty() {
            Ok(rule)
        } else {
            Err(ParkError::InvalidRule(violations))
        }
    }

    fn build(&self) -> Result<RuleSpec> {
        use MovementPolicy::*;
        let bad = |reason: String| ParkError::PresetParams {
            preset: self.name().to_string(),
            reason,
        };
        let rule = match *self {
            Preset::Classical { n } => unit_lot(n, FleetSpec::uniform(n, ForwardOnly)),
            Preset::Naples { n, k } => unit_lot(n, FleetSpec::uniform(n, BackUpTo(k))),
            Preset::Countdown { n } => unit_lot(
                n,
                FleetSpec::with_policies((1..=n).map(|i| BackUpTo(n - i + 1)).collect()),
            ),
            Preset::OddBackEvenForward { n } => unit_lot(
                n,
                FleetSpec::with_policies(
                    (1..=n)
                        .map(|i| if i % 2 == 1 { BackUpTo(1) } else { ForwardOnly })
                        .collect(),
                ),
            ),
            Preset::Clown { m, d, n } => RuleSpec::new(
                LotSpec::with_capacity(m, d),
                FleetSpec::uniform(n, ForwardOnly),
            ),
            Preset::Scooter { m, d, n } => RuleSpec::new(
                LotSpec::with_capacity(m, d),
                FleetSpec::uniform(n, BackUpTo(1)),
            ),
            Preset::Obstructed { m, n, ref blocked } => {
                if m <= n {
                    return Err(bad(format!("needs more spots than cars, got m={m}, n={n}")));
                }
                let lot = LotSpec::new(m).obstruct(blocked.iter().copied());
                if lot.obstructed.len() != m - n {
                    return Err(bad(format!(
                        "needs exactly m-n={} distinct obstructed spots, got {}",
                        m - n,
                        lot.obstructed.len()
                    )));
                }
                RuleSpec::new(lot, FleetSpec::uniform(n, BackUpTo(1)))
            }
            Preset::Teleport { n, k } => unit_lot(n, FleetSpec::uniform(n, TeleportBack(k))),
            Preset::Futuristic { m, ref sizes, k } => RuleSpec::new(
                LotSpec::new(m),
                FleetSpec::uniform(sizes.len(), SingleTeleportForward(k)).sized(sizes.clone()),
            ),
            Preset::Coin { n } => unit_lot(n, FleetSpec::uniform(n, CoinBackOne)),
        };
        Ok(rule)
    }
}

fn unit_lot(n: usize, fleet: FleetSpec) -> RuleSpec {
    RuleSpec::new(LotSpec::new(n), fleet)
}

/// Expands a preset given by name and its comma-separated parameters,
/// e.g. `expand_preset("naples", "4,2")`.
pub fn expand_preset(name: &str, params: &str) -> Result<RuleSpec> {
    format!("{name}:{params}").parse::<Preset>()?.expand()
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().into_iter().map(|(_, v)| v).collect();
        write!(f, "{}:{}", self.name(), params.join(","))
    }
}

enum Arg {
    Int(usize),
    List(Vec<usize>),
}

fn split_args(s: &str) -> std::result::Result<Vec<Arg>, String> {
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut pieces = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1).ok_or("unbalanced `]`")?,
            ',' if depth == 0 => {
                pieces.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced `[`".into());
    }
    pieces.push(&s[start..]);
    for p in pieces {
        let p = p.trim();
        if p.is_empty() {
            return Err("empty parameter".into());
        }
        if let Some(inner) = p.strip_prefix('[').and_then(|q| q.strip_suffix(']')) {
            let items = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad integer `{t}`")))
                    .collect::<std::result::Result<_, _>>()?
            };
            args.push(Arg::List(items));
        } else {
            args.push(Arg::Int(
                p.parse().map_err(|_| format!("bad integer `{p}`"))?,
            ));
        }
    }
    Ok(args)
}

impl FromStr for Preset {
    type Err = ParkError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim();
        if !PRESET_NAMES.contains(&name) {
            return Err(ParkError::UnknownPreset(name.to_string()));
        }
        let bad = |reason: String| ParkError::PresetParams {
            preset: name.to_string(),
            reason,
        };
        let args = split_args(rest).map_err(bad)?;

        let int = |a: &Arg, what: &str| match a {
            Arg::Int(v) => Ok(*v),
            Arg::List(_) => Err(bad(format!("`{what}` must be an integer"))),
        };
        let list = |a: &Arg, what: &str| match a {
            Arg::List(v) => Ok(v.clone()),
            Arg::Int(_) => Err(bad(format!("`{what}` must be a bracketed list"))),
        };
        let arity = |want: usize, spelled: &str| {
            if args.len() == want {
                Ok(())
            } else {
                Err(bad(format!("expected {name}:{spelled}, got {} parameters", args.len())))
            }
        };

        let preset = match name {
            "classical" => {
                arity(1, "n")?;
                Preset::Classical { n: int(&args[0], "n")? }
            }
            "naples" => {
                arity(2, "n,k")?;
                Preset::Naples {
                    n: int(&args[0], "n")?,
                    k: int(&args[1], "k")?,
                }
            }
            "countdown" => {
                arity(1, "n")?;
                Preset::Countdown { n: int(&args[0], "n")? }
            }
            "odd_back_even_forward" => {
                arity(1, "n")?;
                Preset::OddBackEvenForward { n: int(&args[0], "n")? }
            }
            "clown" | "scooter" => {
                arity(3, "m,d,n")?;
                let (m, d, n) = (int(&args[0], "m")?, int(&args[1], "d")?, int(&args[2], "n")?);
                if name == "clown" {
                    Preset::Clown { m, d, n }
                } else {
                    Preset::Scooter { m, d, n }
                }
            }
            "obstructed" => {
                arity(3, "m,n,[blocked]")?;
                Preset::Obstructed {
                    m: int(&args[0], "m")?,
                    n: int(&args[1], "n")?,
                    blocked: list(&args[2], "blocked")?,
                }
            }
            "teleport" => {
                arity(2, "n,k")?;
                Preset::Teleport {
                    n: int(&args[0], "n")?,
                    k: int(&args[1], "k")?,
                }
            }
            "futuristic" => {
                arity(3, "m,[sizes],k")?;
                Preset::Futuristic {
                    m: int(&args[0], "m")?,
                    sizes: list(&args[1], "sizes")?,
                    k: int(&args[2], "k")?,
                }
            }
            "coin" => {
                arity(1, "n")?;
                Preset::Coin { n: int(&args[0], "n")? }
            }
            _ => unreachable!(),
        };
        Ok(preset)
    }
}
