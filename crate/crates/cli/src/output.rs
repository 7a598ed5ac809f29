use std::io::Write;

use num_bigint::BigUint;
use parkfn::{RuleDocument, RuleSpec};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// One self-describing result: the fully expanded rule travels with the
/// payload so it can be fed back in with `--rule-file`.
#[derive(Serialize)]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub rule: RuleDocument,
    pub payload: Value,
}

impl OutputRecord {
    pub fn new(command: &'static str, rule: &RuleSpec, payload: Value) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command,
            rule: RuleDocument::from_rule(rule),
            payload,
        }
    }
}

/// Integers that fit in a u64 are JSON numbers; anything larger is a
/// decimal string.
pub fn big(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(x) => Value::from(x),
        Err(_) => Value::from(v.to_string()),
    }
}

pub fn print_json<T: Serialize>(value: &T) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value).expect("stdout");
    writeln!(out).expect("stdout");
}

pub fn print_csv(header: &[String], rows: &[Vec<String>]) {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(header).expect("stdout");
    for r in rows {
        w.write_record(r).expect("stdout");
    }
    w.flush().expect("stdout");
}
