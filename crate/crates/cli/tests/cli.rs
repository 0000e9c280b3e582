use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperaccel"));
    cmd.args(args).env_remove("HYPERACCEL_CATALOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hyperaccel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn verify_all_families() {
    let o = run(&["verify", "--all", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let fams: Vec<&Value> = recs.iter().filter(|r| r["record"] == "verify").collect();
    assert_eq!(fams.len(), 10);
    assert!(fams.iter().all(|r| r["pass"] == true && r["certificate"] == "holds"));
    let published = fams.iter().filter(|r| r["recursion"] == "matches-published").count();
    assert_eq!(published, 5);
    let last = recs.last().unwrap();
    assert_eq!(last["record"], "summary");
    assert_eq!(last["failed"], 0);
}

#[test]
fn evaluate_reaches_requested_digits() {
    let o = run(&["evaluate", "--entry", "n2n-768-over-pi", "--digits", "30", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &records(&o)[0];
    assert_eq!(r["entry"], "n2n-768-over-pi");
    assert!(r["digits"].as_u64().unwrap() >= 30);
    assert!(r["value"].as_str().unwrap().starts_with("244.4619925891512357410054605401"));
}

#[test]
fn text_output_is_readable() {
    let o = run(&["evaluate", "--entry", "cubed-567-zeta3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("cubed-567-zeta3") && s.contains("PASS"), "{s}");
    assert!(s.trim_end().ends_with("1 passed, 0 failed"));
}

#[test]
fn unknown_selector_is_a_usage_error() {
    let o = run(&["evaluate", "--entry", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown entry `bogus`"));
    assert_eq!(run(&["verify", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--all", "--digits", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn too_few_terms_fails_the_check() {
    let o = run(&["evaluate", "--entry", "ramanujan-4-over-pi", "--terms", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn machine_output_is_stable_and_sorted() {
    let args = ["evaluate", "--family", "n2n", "--entry", "chu-105-pi", "--format", "machine"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ids: Vec<String> = records(&a)
        .iter()
        .filter(|r| r["record"] == "evaluate")
        .map(|r| r["entry"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(ids.len() >= 4);
}

#[test]
fn emit_reports_display_alignment() {
    let o = run(&["emit", "--entry", "ramanujan-4-over-pi", "--entry", "guillera-pi-squared", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let by_id = |id: &str| recs.iter().find(|r| r["entry"] == id).unwrap().clone();
    let r = by_id("ramanujan-4-over-pi");
    assert_eq!((r["shift"].as_i64(), r["scale"].as_str()), (Some(-1), Some("1/4")));
    assert!(r["series"].as_str().unwrap().contains("[3/2, 3/2, 3/2; 1, 2, 2]_j"));
    let g = by_id("guillera-pi-squared");
    assert_eq!((g["shift"].as_i64(), g["scale"].as_str()), (Some(0), Some("2")));
}

#[test]
fn compare_shows_the_acceleration() {
    let o = run(&["compare", "--entry", "ramanujan-4-over-pi", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let result = recs.iter().find(|r| r["record"] == "compare-result").unwrap();
    let acc = result["accelerated_digits"].as_u64().unwrap();
    let naive = result["naive_digits"].as_u64().unwrap();
    assert!(acc >= 30 && naive <= 5, "{acc} vs {naive}");
    let rows = recs.iter().filter(|r| r["record"] == "compare").count();
    assert!(rows >= 5);
}

#[test]
fn bench_reports_digits_per_term() {
    let o = run(&["bench", "--entry", "2n3n-14175pi-over-8", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = &records(&o)[0];
    let dpt = r["digits_per_term"].as_f64().unwrap();
    let rate = r["rate_digits_per_term"].as_f64().unwrap();
    // 108/3125 gains about 1.46 digits a term
    assert!((rate - 1.4613).abs() < 1e-3, "{rate}");
    assert!(dpt > 1.0, "{dpt}");
    assert!(r["wall_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn catalog_from_environment() {
    let good = "hyperaccel-catalog v1\n\n[entry pi-leibniz-fast]\ntarget = pi\nrate = 1/2\nupper = 1\nlower = 3/2\nsummand = 2\nflags = numeric-only\n";
    let path = scratch_file("good.cat", good);
    let o = run_env(&["evaluate", "--all", "--format", "machine"], &[("HYPERACCEL_CATALOG", path.to_str().unwrap())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(records(&o)[0]["entry"], "pi-leibniz-fast");

    // wrong closed form: a check failure, not a usage error
    let wrong = scratch_file("wrong.cat", &good.replace("target = pi", "target = 22/7"));
    let o = run(&["evaluate", "--all", "--catalog", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let broken = scratch_file("broken.cat", &good.replace("rate = 1/2", "rate = 1/"));
    let o = run(&["list", "--catalog", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
}

#[test]
fn list_is_sorted() {
    let o = run(&["list", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let fams: Vec<&str> = recs
        .iter()
        .filter(|r| r["record"] == "family")
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    let mut sorted = fams.clone();
    sorted.sort();
    assert_eq!(fams, sorted);
    assert_eq!(recs.iter().filter(|r| r["record"] == "entry").count(), 51);
}
