//! `parkfn`: simulate, count and analyse generalized parking functions.
//!
//! Exit codes: 0 success (or the list parked), 1 a valid run whose answer is
//! negative (the list does not park), 2 bad input.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use parkfn::enumerate::{count_parking_with, count_with_stats, sweep, DEFAULT_BUDGET};
use parkfn::prob::{
    exact_park_probability, exact_park_probability_weighted, expected_park_count,
    expected_park_count_weighted, mc_park_probability_with, McConfig, DEFAULT_SEED,
};
use parkfn::stats::{list_stats, sequence_stats};
use parkfn::{
    park, trace, CountOptions, Family, ParamGrid, ParkError, ParkingOutcome, PreferenceList,
    Preset, RuleDocument, RuleSpec,
};
use serde_json::{json, Value};

use crate::output::{big, print_csv, print_json, OutputRecord};

#[derive(Parser)]
#[command(name = "parkfn", version, about = "Generalized parking-function engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one preference list through a rule.
    Simulate {
        #[command(flatten)]
        rule: RuleSource,
        /// Comma-separated preferred spots, e.g. 1,2,4,2,2
        #[arg(long)]
        prefs: String,
        /// Include every probe of every car.
        #[arg(long)]
        trace: bool,
    },
    /// Count the parking functions of a rule by exhaustive search.
    Count {
        #[command(flatten)]
        rule: RuleSource,
        #[command(flatten)]
        exec: ExecArgs,
        /// Use the suffix-capacity bound for forward-only rules.
        #[arg(long)]
        prune: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Statistics for one list (--prefs) or aggregated over all parking lists.
    Stats {
        #[command(flatten)]
        rule: RuleSource,
        #[arg(long)]
        prefs: Option<String>,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Parking probability under coin-flip cars.
    Prob {
        #[command(flatten)]
        rule: RuleSource,
        /// Without --prefs and with --exact, the expected number of parking lists.
        #[arg(long)]
        prefs: Option<String>,
        /// Exact branch-tree evaluation instead of Monte Carlo.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Probability of heads; a fraction like 1/3 is exact with --exact.
        #[arg(long, default_value = "1/2")]
        heads: String,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Count a preset family over a parameter grid.
    Sweep {
        #[arg(long)]
        family: String,
        /// Values as `a..b` (inclusive), `a,b,c` or a single integer.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        k: Option<String>,
        /// Fixed obstruction set for the obstructed family, e.g. 1,4
        #[arg(long)]
        blocked: Option<String>,
        /// Fixed car sizes for the futuristic family, e.g. 2,1
        #[arg(long)]
        sizes: Option<String>,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct RuleSource {
    /// Named preset, e.g. classical:5, naples:4,2, obstructed:5,3,[1,4]
    #[arg(long)]
    preset: Option<String>,
    /// JSON rule document.
    #[arg(long)]
    rule_file: Option<PathBuf>,
}

#[derive(Args)]
struct ExecArgs {
    /// Worker threads (default: all cores).
    #[arg(long, env = "PARKFN_WORKERS")]
    workers: Option<usize>,
    /// Largest number of lists a search may simulate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl ExecArgs {
    fn options(&self) -> CountOptions {
        CountOptions::default()
            .workers(self.workers)
            .budget(self.budget)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Input problem; reported on stderr with exit status 2.
struct Usage(String);

impl From<ParkError> for Usage {
    fn from(e: ParkError) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Usage>;

fn load_rule(src: &RuleSource) -> Result<RuleSpec, Usage> {
    let rule = if let Some(p) = &src.preset {
        p.parse::<Preset>()
            .and_then(|p| p.expand())
            .map_err(|e| Usage(format!("--preset: {e}")))?
    } else {
        let path = src.rule_file.as_ref().expect("clap enforces one source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("--rule-file {}: {e}", path.display())))?;
        RuleDocument::from_json(&text)
            .and_then(|d| d.to_rule())
            .map_err(|e| Usage(format!("--rule-file {}: {e}", path.display())))?
    };
    rule.validated()?;
    Ok(rule)
}

fn load_prefs(text: &str, rule: &RuleSpec) -> Result<PreferenceList, Usage> {
    let prefs: PreferenceList = text.parse().map_err(|e| Usage(format!("--prefs: {e}")))?;
    prefs
        .check_against(rule)
        .map_err(|e| Usage(format!("--prefs: {e}")))?;
    Ok(prefs)
}

fn parse_values(flag: &str, text: &Option<String>) -> Result<Vec<usize>, Usage> {
    let Some(text) = text else {
        return Ok(Vec::new());
    };
    let bad = || Usage(format!("--{flag}: expected `a..b`, `a,b,c` or an integer, got `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

fn outcome_json(outcome: &ParkingOutcome) -> Value {
    serde_json::to_value(outcome).expect("outcome serializes")
}

fn exit_for(outcome: &ParkingOutcome) -> ExitCode {
    if outcome.is_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn elapsed_ms(d: std::time::Duration) -> Value {
    json!(d.as_secs_f64() * 1000.0)
}

fn cmd_simulate(src: &RuleSource, prefs: &str, with_trace: bool) -> CmdResult {
    let rule = load_rule(src)?;
    let prefs = load_prefs(prefs, &rule)?;
    let outcome = park(&prefs, &rule)?;
    let mut payload = json!({
        "prefs": prefs.as_slice(),
        "outcome": outcome_json(&outcome),
    });
    if with_trace {
        payload["trace"] = serde_json::to_value(trace(&prefs, &rule)?).expect("trace serializes");
    }
    print_json(&OutputRecord::new("simulate", &rule, payload));
    Ok(exit_for(&outcome))
}

fn cmd_count(src: &RuleSource, exec: &ExecArgs, prune: bool, format: Format) -> CmdResult {
    let rule = load_rule(src)?;
    let report = count_parking_with(&rule, &exec.options().prune(prune))?;
    match format {
        Format::Json => print_json(&OutputRecord::new(
            "count",
            &rule,
            json!({
                "domain_size": big(&report.domain_size),
                "parking_count": big(&report.parking_count),
                "pruned": report.pruned,
                "elapsed_ms": elapsed_ms(report.elapsed),
            }),
        )),
        Format::Csv => print_csv(
            &["domain_size".into(), "parking_count".into()],
            &[vec![
                report.domain_size.to_string(),
                report.parking_count.to_string(),
            ]],
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(src: &RuleSource, prefs: &Option<String>, exec: &ExecArgs, format: Format) -> CmdResult {
    let rule = load_rule(src)?;

    if let Some(text) = prefs {
        let prefs = load_prefs(text, &rule)?;
        let outcome = park(&prefs, &rule)?;
        let (stats, code) = match list_stats(prefs.as_slice(), &outcome) {
            Ok(s) => (serde_json::to_value(s).expect("stats serialize"), ExitCode::SUCCESS),
            // failed lists still have shape statistics
            Err(_) => (
                serde_json::to_value(sequence_stats(prefs.as_slice())).expect("stats serialize"),
                ExitCode::from(1),
            ),
        };
        match format {
            Format::Json => print_json(&OutputRecord::new(
                "stats",
                &rule,
                json!({
                    "prefs": prefs.as_slice(),
                    "outcome": outcome_json(&outcome),
                    "stats": stats,
                }),
            )),
            Format::Csv => {
                let obj = stats.as_object().expect("stats are an object");
                let keys: Vec<String> = obj
                    .keys()
                    .filter(|k| *k != "lucky_mask")
                    .cloned()
                    .collect();
                let row = keys.iter().map(|k| obj[k].to_string()).collect();
                print_csv(&keys, &[row]);
            }
        }
        return Ok(code);
    }

    let report = count_with_stats(&rule, &exec.options())?;
    let agg = report.stats_aggregate.as_ref().expect("count_with_stats fills stats");
    match format {
        Format::Json => print_json(&OutputRecord::new(
            "stats",
            &rule,
            json!({
                "domain_size": big(&report.domain_size),
                "parking_count": big(&report.parking_count),
                "aggregate": agg,
                "elapsed_ms": elapsed_ms(report.elapsed),
            }),
        )),
        Format::Csv => {
            let header = ["position", "lists", "lucky", "ascents", "descents", "ties", "peaks", "valleys"]
                .map(String::from)
                .to_vec();
            let mut rows = vec![vec![
                "total".to_string(),
                agg.list_count.to_string(),
                agg.lucky.to_string(),
                agg.ascents.to_string(),
                agg.descents.to_string(),
                agg.ties.to_string(),
                agg.peaks.to_string(),
                agg.valleys.to_string(),
            ]];
            let at = |v: &[u64], i: usize| v.get(i).map(|x| x.to_string()).unwrap_or_default();
            for i in 0..agg.cars {
                rows.push(vec![
                    (i + 1).to_string(),
                    agg.list_count.to_string(),
                    at(&agg.lucky_at, i),
                    at(&agg.ascent_at, i),
                    at(&agg.descent_at, i),
                    at(&agg.tie_at, i),
                    String::new(),
                    String::new(),
                ]);
            }
            print_csv(&header, &rows);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_heads(text: &str) -> Result<(num_rational::BigRational, f64), Usage> {
    use num_traits::ToPrimitive;
    let bad = || Usage(format!("--heads: expected a probability like 0.5 or 1/3, got `{text}`"));
    let ratio = if let Some((a, b)) = text.split_once('/') {
        let a: BigUint = a.trim().parse().map_err(|_| bad())?;
        let b: BigUint = b.trim().parse().map_err(|_| bad())?;
        if b == BigUint::from(0u32) {
            return Err(bad());
        }
        num_rational::BigRational::new(a.into(), b.into())
    } else {
        let f: f64 = text.trim().parse().map_err(|_| bad())?;
        num_rational::BigRational::from_float(f).ok_or_else(bad)?
    };
    let f = ratio.to_f64().ok_or_else(bad)?;
    Ok((ratio, f))
}

fn ratio_string(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[allow(clippy::too_many_arguments)]
fn cmd_prob(
    src: &RuleSource,
    prefs: &Option<String>,
    exact: bool,
    trials: u64,
    seed: u64,
    heads: &str,
    exec: &ExecArgs,
) -> CmdResult {
    let rule = load_rule(src)?;
    let (heads_ratio, heads_f) = parse_heads(heads)?;
    let fair = heads_ratio == num_rational::BigRational::new(1.into(), 2.into());

    let payload = match (prefs, exact) {
        (Some(text), true) => {
            let prefs = load_prefs(text, &rule)?;
            let p = if fair {
                exact_park_probability(&prefs, &rule)?.as_ratio()
            } else {
                exact_park_probability_weighted(&prefs, &rule, &heads_ratio)?
            };
            json!({
                "prefs": prefs.as_slice(),
                "heads": ratio_string(&heads_ratio),
                "probability": ratio_string(&p),
            })
        }
        (None, true) => {
            let e = if fair {
                expected_park_count(&rule, &exec.options())?
            } else {
                expected_park_count_weighted(&rule, &exec.options(), &heads_ratio)?
            };
            json!({
                "heads": ratio_string(&heads_ratio),
                "domain_size": big(&rule.domain_size()),
                "expected_park_count": ratio_string(&e),
            })
        }
        (Some(text), false) => {
            let prefs = load_prefs(text, &rule)?;
            let cfg = McConfig {
                trials,
                seed,
                heads: heads_f,
                workers: exec.workers,
            };
            let est = mc_park_probability_with(&prefs, &rule, &cfg)?;
            json!({
                "prefs": prefs.as_slice(),
                "heads": heads_f,
                "mc": est,
            })
        }
        (None, false) => {
            return Err(Usage(
                "--prefs: Monte Carlo needs a preference list (or pass --exact)".into(),
            ))
        }
    };
    print_json(&OutputRecord::new("prob", &rule, payload));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    family: &str,
    n: &Option<String>,
    m: &Option<String>,
    d: &Option<String>,
    k: &Option<String>,
    blocked: &Option<String>,
    sizes: &Option<String>,
    exec: &ExecArgs,
    format: Format,
) -> CmdResult {
    let family: Family = family
        .parse()
        .map_err(|_| Usage(format!("--family: unknown family `{family}`")))?;
    let grid = ParamGrid {
        n: parse_values("n", n)?,
        m: parse_values("m", m)?,
        d: parse_values("d", d)?,
        k: parse_values("k", k)?,
        blocked: parse_values("blocked", blocked)?,
        sizes: parse_values("sizes", sizes)?,
    };
    let points = family.points(&grid)?;
    let rows = sweep(&points, &exec.options());

    let cell = |preset: &Preset, axis: &str| {
        preset
            .params()
            .into_iter()
            .find(|(name, _)| *name == axis)
            .map(|(_, v)| v)
            .unwrap_or_default()
    };

    match format {
        Format::Csv => {
            let mut header: Vec<String> = family.axes().iter().map(|s| s.to_string()).collect();
            header.extend(["domain_size", "parking_count", "error"].map(String::from));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let mut r: Vec<String> =
                        family.axes().iter().map(|a| cell(&row.preset, a)).collect();
                    match &row.result {
                        Ok(rep) => r.extend([
                            rep.domain_size.to_string(),
                            rep.parking_count.to_string(),
                            String::new(),
                        ]),
                        Err(e) => r.extend([String::new(), String::new(), e.to_string()]),
                    }
                    r
                })
                .collect();
            print_csv(&header, &table);
        }
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let params: serde_json::Map<String, Value> = row
                        .preset
                        .params()
                        .into_iter()
                        .map(|(k, v)| {
                            let v = v.parse::<u64>().map(Value::from).unwrap_or(Value::from(v));
                            (k.to_string(), v)
                        })
                        .collect();
                    match &row.result {
                        Ok(rep) => serde_json::to_value(OutputRecord::new(
                            "sweep",
                            &rep.rule,
                            json!({
                                "preset": row.preset.to_string(),
                                "params": params,
                                "domain_size": big(&rep.domain_size),
                                "parking_count": big(&rep.parking_count),
                                "elapsed_ms": elapsed_ms(rep.elapsed),
                            }),
                        ))
                        .expect("record serializes"),
                        Err(e) => json!({
                            "schema_version": output::SCHEMA_VERSION,
                            "command": "sweep",
                            "rule": Value::Null,
                            "payload": {
                                "preset": row.preset.to_string(),
                                "params": params,
                                "error": e.to_string(),
                            },
                        }),
                    }
                })
                .collect();
            print_json(&records);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { rule, prefs, trace } => cmd_simulate(rule, prefs, *trace),
        Command::Count {
            rule,
            exec,
            prune,
            format,
        } => cmd_count(rule, exec, *prune, *format),
        Command::Stats {
            rule,
            prefs,
            exec,
            format,
        } => cmd_stats(rule, prefs, exec, *format),
        Command::Prob {
            rule,
            prefs,
            exact,
            trials,
            seed,
            heads,
            exec,
        } => cmd_prob(rule, prefs, *exact, *trials, *seed, heads, exec),
        Command::Sweep {
            family,
            n,
            m,
            d,
            k,
            blocked,
            sizes,
            exec,
            format,
        } => cmd_sweep(family, n, m, d, k, blocked, sizes, exec, *format),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
