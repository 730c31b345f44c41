use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use anypro_core::fixtures::{flat, pair_conflict};
use anypro_core::topology::save_topology;
use serde_json::Value;

fn anypro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anypro")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = anypro(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stage(r: &Value, name: &str) -> f64 {
    r["stages"][name]["normalized_objective"].as_f64().unwrap()
}

#[test]
fn trivial_topology_has_nothing_to_optimize() {
    let tmp = tempfile::tempdir().unwrap();
    let topo = tmp.path().join("one.json");
    fs::write(&topo, save_topology(&flat(&[(1, 5), (5, 9), (5, 8)], &[1], &[8, 9]))).unwrap();
    let out = tmp.path().join("out");
    ok(&["run", "--topo", topo.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let r = report(&out);
    assert_eq!(stage(&r, "all-zero"), stage(&r, "preliminary"));
    assert_eq!(stage(&r, "preliminary"), stage(&r, "finalized"));
    assert_eq!(r["budget"]["adjustments"], 2);
    for f in ["report.json", "mappings.csv", "workflow.jsonl", "cdf_baseline.csv", "cdf_final.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join(".anypro.lock").exists());
    let csv = fs::read_to_string(out.join("mappings.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("client,desired,assigned,rtt_ms"));
    assert_eq!(csv.lines().count(), 3);
    let cdf = fs::read_to_string(out.join("cdf_final.csv")).unwrap();
    assert!(cdf.starts_with("rtt_ms,fraction\n"));
}

#[test]
fn resolvable_contradiction_improves_final_objective() {
    let tmp = tempfile::tempdir().unwrap();
    let topo = tmp.path().join("pair.json");
    fs::write(&topo, save_topology(&pair_conflict(5, 3, 9, 3))).unwrap();
    let desired = tmp.path().join("desired.json");
    fs::write(&desired, r#"{"9": 0, "8": 1}"#).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "run",
        "--topo",
        topo.to_str().unwrap(),
        "--desired",
        desired.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let r = report(&out);
    assert_eq!(r["contradictions"], 1);
    assert_eq!(r["resolved"], 1);
    assert!(stage(&r, "all-zero") <= stage(&r, "preliminary"));
    assert!(stage(&r, "preliminary") <= stage(&r, "finalized"));
    assert_eq!(stage(&r, "finalized"), 1.0);
    let log = fs::read_to_string(out.join("workflow.jsonl")).unwrap();
    let steps: Vec<u64> = log
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["step"].as_u64().unwrap())
        .collect();
    assert_eq!(steps.first(), Some(&1));
    assert!(steps.contains(&5) && steps.contains(&7));
    assert_eq!(steps.last(), Some(&8));
}

#[test]
fn identical_configs_give_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["run", "--gen", "4,15,10,0.25", "--seed", "11", "--max", "5", "--out", d.to_str().unwrap()]);
    }
    for f in ["report.json", "mappings.csv", "workflow.jsonl"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn subset_restricts_report_to_enabled_ingresses() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    ok(&["run", "--gen", "5,20,10,0.25", "--seed", "2", "--enable", "1,3", "--out", out.to_str().unwrap()]);
    let r = report(&out);
    assert_eq!(r["enabled"], serde_json::json!([1, 3]));
    assert_eq!(r["budget"]["polling_adjustments"], 4);
    let regions: Vec<&String> = r["per_region"].as_object().unwrap().keys().collect();
    assert!(!regions.is_empty() && regions.iter().all(|r| *r == "pop-1" || *r == "pop-3"), "{regions:?}");
    let csv = fs::read_to_string(out.join("mappings.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let assigned = line.split(',').nth(2).unwrap();
        assert!(assigned == "1" || assigned == "3", "{line}");
    }
}

#[test]
fn locked_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join(".anypro.lock"), "").unwrap();
    let out = anypro(&["run", "--gen", "2,4,4,0.5", "--out", tmp.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("locked"));
}

#[test]
fn stage_tagged_errors() {
    let out = anypro(&["run", "--out", "unused"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("topology"));
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let out = anypro(&["run", "--topo", bad.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: topology"));
    let out = anypro(&["run", "--gen", "3,4,4,0.5", "--enable", "7", "--out", tmp.path().to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn gen_topo_output_loads_back() {
    let tmp = tempfile::tempdir().unwrap();
    let topo = tmp.path().join("t.json");
    ok(&["gen-topo", "--gen", "3,6,6,0.3", "--seed", "5", "--out", topo.to_str().unwrap()]);
    let printed = ok(&["gen-topo", "--gen", "3,6,6,0.3", "--seed", "5"]);
    assert_eq!(fs::read_to_string(&topo).unwrap(), printed);
    let out = tmp.path().join("out");
    ok(&["run", "--topo", topo.to_str().unwrap(), "--max", "3", "--out", out.to_str().unwrap()]);
}

#[test]
fn verify_reports_and_guards() {
    let text = ok(&["verify", "--topologies", "3"]);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
    // policy mode may fail properties; that is report content, not an error
    let gr = ok(&["verify", "--topologies", "3", "--mode", "gr"]);
    assert_eq!(gr.lines().count(), 4);
    let out = anypro(&["verify", "--max-ingresses", "6", "--max", "9"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn sweep_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let text = ok(&["sweep", "--regional", "4,6", "--seed", "3", "--configs", "8", "--out", out.to_str().unwrap()]);
    assert!(text.contains("pearson(objective, mean rtt)"));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8 + 1);
    assert!(csv.lines().last().unwrap().starts_with("optimized,"));
}

#[test]
fn third_party_fixture_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    ok(&["run", "--fixture", "third-party", "--max", "3", "--out", out.to_str().unwrap()]);
    let poll: Value = serde_json::from_str(&fs::read_to_string(out.join("poll.json")).unwrap()).unwrap();
    assert_eq!(poll["baseline"]["assignment"]["9"], 1);
}
