use std::process::{Command, Output};

use serde_json::Value;

fn parkfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parkfn"))
        .args(args)
        .env_remove("PARKFN_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn nums(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn simulate_success_and_failure() {
    let out = parkfn(&["simulate", "--preset", "classical:5", "--prefs", "1,2,4,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "simulate");
    assert_eq!(v["payload"]["outcome"]["result"], "success");
    assert_eq!(nums(&v["payload"]["outcome"]["assignment"]), [1, 2, 4, 3, 5]);

    let out = parkfn(&["simulate", "--preset", "classical:5", "--prefs", "1,2,2,5,5"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["payload"]["outcome"]["result"], "failure");
    assert_eq!(v["payload"]["outcome"]["first_fail"], 5);

    let out = parkfn(&["simulate", "--preset", "naples:2,1", "--prefs", "2,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(nums(&json(&out)["payload"]["outcome"]["assignment"]), [2, 1]);
}

#[test]
fn simulate_trace() {
    let out = parkfn(&["simulate", "--preset", "naples:3,1", "--prefs", "2,2,2", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let steps = v["payload"]["trace"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(nums(&steps[1]["probes"]), [2, 1]);
}

#[test]
fn count_json_and_csv() {
    let v = json(&parkfn(&["count", "--preset", "classical:3"]));
    assert_eq!(v["payload"]["parking_count"], 16);
    assert_eq!(v["payload"]["domain_size"], 27);
    assert!(v["payload"]["elapsed_ms"].is_number());

    let out = parkfn(&["count", "--preset", "classical:4", "--prune", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "domain_size,parking_count\n256,125\n");
}

#[test]
fn prob_exact_and_mc() {
    let v = json(&parkfn(&["prob", "--preset", "coin:2", "--prefs", "2,2", "--exact"]));
    assert_eq!(v["payload"]["probability"], "1/2");

    let v = json(&parkfn(&["prob", "--preset", "coin:2", "--exact"]));
    assert_eq!(v["payload"]["expected_park_count"], "7/2");

    let v = json(&parkfn(&[
        "prob", "--preset", "coin:2", "--prefs", "2,2", "--trials", "20000", "--seed", "7",
    ]));
    let est = v["payload"]["mc"]["estimate"].as_f64().unwrap();
    assert!((est - 0.5).abs() < 0.02, "{est}");
    assert_eq!(v["payload"]["mc"]["seed"], 7);

    let out = parkfn(&["prob", "--preset", "coin:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_rows() {
    let out = parkfn(&["sweep", "--family", "naples", "--n", "2", "--k", "0..1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,k,domain_size,parking_count,error\n2,0,4,3,\n2,1,4,4,\n"
    );

    let v = json(&parkfn(&[
        "sweep", "--family", "classical", "--n", "1,3", "--format", "json",
    ]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["payload"]["parking_count"], 16);
    assert_eq!(rows[1]["payload"]["params"]["n"], 3);
}

#[test]
fn stats_single_and_aggregate() {
    let out = parkfn(&["stats", "--preset", "classical:5", "--prefs", "1,2,4,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let s = &json(&out)["payload"]["stats"];
    assert_eq!(s["lucky_count"], 3);
    assert_eq!(s["total_displacement_abs"], 4);
    assert_eq!(s["peaks"], 1);

    let out = parkfn(&["stats", "--preset", "classical:2", "--prefs", "2,2"]);
    assert_eq!(out.status.code(), Some(1));

    let v = json(&parkfn(&["stats", "--preset", "classical:2"]));
    let a = &v["payload"]["aggregate"];
    assert_eq!(a["list_count"], 3);
    assert_eq!(a["lucky"], 5);
    assert_eq!(nums(&a["lucky_at"]), [3, 2]);
}

#[test]
fn rule_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("parkfn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for preset in ["obstructed:5,3,[1,4]", "futuristic:4,[2,1],1", "countdown:3", "clown:2,2,3"] {
        let v = json(&parkfn(&["count", "--preset", preset]));
        let path = dir.join("rule.json");
        std::fs::write(&path, v["rule"].to_string()).unwrap();
        let w = json(&parkfn(&["count", "--rule-file", path.to_str().unwrap()]));
        assert_eq!(v["rule"], w["rule"], "{preset}");
        assert_eq!(v["payload"]["parking_count"], w["payload"]["parking_count"], "{preset}");
    }

    let path = dir.join("short.json");
    std::fs::write(
        &path,
        r#"{"spots": 3, "cars": 3, "policy": {"preset": "naples", "k": 1}}"#,
    )
    .unwrap();
    let v = json(&parkfn(&["count", "--rule-file", path.to_str().unwrap()]));
    let p = json(&parkfn(&["count", "--preset", "naples:3,1"]));
    assert_eq!(v["payload"]["parking_count"], p["payload"]["parking_count"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_input_exits_2_naming_the_field() {
    let dir = std::env::temp_dir().join(format!("parkfn-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"spots": 3, "cars": "two", "policy": {"kind": "forward"}}"#).unwrap();

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["simulate", "--preset", "classical:3", "--prefs", "1,4,1"], "--prefs"),
        (vec!["simulate", "--preset", "classical:3", "--prefs", "1,1"], "--prefs"),
        (vec!["simulate", "--preset", "classical:3", "--prefs", "1,x,1"], "--prefs"),
        (vec!["count", "--preset", "warp:3"], "--preset"),
        (vec!["count", "--preset", "obstructed:4,2,[1]"], "--preset"),
        (vec!["count", "--rule-file", path.to_str().unwrap()], "cars"),
        (vec!["count", "--preset", "classical:9", "--budget", "1000"], "budget"),
        (vec!["simulate", "--preset", "coin:2", "--prefs", "1,1"], "coin"),
        (vec!["sweep", "--family", "naples", "--n", "3..1"], "--n"),
        (vec!["prob", "--preset", "coin:2", "--prefs", "1,1", "--heads", "2/0"], "--heads"),
    ];
    for (args, needle) in cases {
        let out = parkfn(&args);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {err}");
        assert!(err.contains(needle), "{args:?}: {err}");
    }

    let out = parkfn(&["count"]);
    assert_eq!(out.status.code(), Some(2));
    let out = parkfn(&["count", "--preset", "classical:2", "--rule-file", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn workers_from_env_match_flag() {
    let via_env = Command::new(env!("CARGO_BIN_EXE_parkfn"))
        .args(["count", "--preset", "naples:5,2", "--format", "csv"])
        .env("PARKFN_WORKERS", "1")
        .output()
        .unwrap();
    let via_flag = parkfn(&["count", "--preset", "naples:5,2", "--format", "csv", "--workers", "3"]);
    assert_eq!(via_env.stdout, via_flag.stdout);
}
