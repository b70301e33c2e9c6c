use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramp-storage")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn error_of(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line on stderr");
    serde_json::from_str::<Value>(line).unwrap()["error"].clone()
}

/// One small invocation per subcommand.
fn sample_runs() -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("thresholds", s(&["--config", &fixture("thresholds.toml")])),
        ("simulate", s(&["--seed", "1", "--n-paths", "200", "--trajectories", "2"])),
        ("competitive-ratio", s(&["--input", &fixture("two_point_month.csv"), "--source", "past-days", "--past-days", "5"])),
        ("value-sweep", s(&["--ns", "1,2", "--sigmas", "0,10"])),
        ("bound", s(&["--n", "9"])),
        ("two-point", s(&["--mean", "0.3", "--n", "3"])),
        ("stationary", s(&["--chain-steps", "1000", "--seed", "2"])),
        ("phase-map", s(&["--n", "5"])),
        ("elasticity", s(&["--seed", "1", "--n-paths", "300"])),
        ("reserves", s(&["--seed", "1", "--n-periods", "1000", "--pilot-periods", "1000"])),
    ]
}

#[test]
fn every_json_report_matches_its_schema() {
    for (command, args) in sample_runs() {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{command}.schema.json"));
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let validator = jsonschema::validator_for(&schema).unwrap();
        let mut argv = vec![command];
        argv.extend(args.iter().map(String::as_str));
        let report = json(&argv);
        let errors: Vec<String> = validator.iter_errors(&report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{command}: {errors:?}");
    }
}

#[test]
fn bound_prints_the_closed_form() {
    let text = stdout(&["bound", "--vbar", "1", "--n", "9", "--lo", "0", "--hi", "1"]);
    assert_eq!(text.lines().last(), Some("0.45"));
    assert!(text.lines().any(|l| l.starts_with("# config: ")));
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = run(&["competitive-ratio", "--input", "no/such/prices.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_of(&out);
    assert_eq!(err["kind"], "input_not_found");
    assert!(err["message"].as_str().unwrap().contains("input not found"));

    let out = run(&["bound", "--config", "no/such/experiment.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "input_not_found");
}

#[test]
fn bad_flags_and_bad_configs_exit_two() {
    let out = run(&["bound", "--nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "usage");

    let out = run(&["bound", "--lo", "2", "--hi", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "config");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[bound]\nvbarr = 2.0\n").unwrap();
    let out = run(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_of(&out)["message"].as_str().unwrap().contains("vbarr"));
}

#[test]
fn computation_failures_exit_one() {
    let out = run(&["stationary", "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_of(&out)["kind"], "computation");
}

#[test]
fn thresholds_from_fixture_config_are_byte_identical() {
    let args = ["thresholds", "--config", &fixture("thresholds.toml")];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    assert!(first.contains("stage,segment,threshold,intercept\n"));
    // 17 stages of 5 segments after the header
    assert_eq!(first.lines().filter(|l| !l.starts_with('#')).count(), 1 + 17 * 5);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    stdout(&["thresholds", "--config", &fixture("thresholds.toml"), "--output", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), first);
}

#[test]
fn seeded_reports_are_reproducible_across_thread_counts() {
    for (command, args) in sample_runs() {
        let mut argv = vec![command];
        argv.extend(args.iter().map(String::as_str));
        let first = stdout(&argv);
        argv.extend(["--threads", "1"]);
        assert_eq!(first, stdout(&argv), "{command}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let report = json(&["thresholds", "--config", &fixture("thresholds.toml"), "--n", "2", "--hi", "80"]);
    let cfg = &report["config"];
    assert_eq!(cfg["n"], 2);
    assert_eq!(cfg["n_stages"], 16);
    assert_eq!(cfg["prices"]["kind"], "two-point");
    assert_eq!(cfg["prices"]["lo"], 20.0);
    assert_eq!(cfg["prices"]["hi"], 80.0);
}

#[test]
fn missing_seed_is_generated_and_reported() {
    let out = run(&["simulate", "--n-paths", "10", "--n-stages", "3", "--format", "json"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let seed = report["seed"].as_u64().expect("seed recorded");
    let note: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().next().unwrap()).unwrap();
    assert_eq!(note["seed"].as_u64(), Some(seed));
}

#[test]
fn sweep_zero_sigma_column_is_zero() {
    let report = json(&["value-sweep", "--ns", "1,5", "--sigmas", "0,10"]);
    for row in report["rows"].as_array().unwrap() {
        if row["sigma"] == 0.0 {
            assert_eq!(row["value"], 0.0);
        } else {
            assert!(row["value"].as_f64().unwrap() > 0.0);
        }
    }
}

#[test]
fn known_two_point_law_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("known.toml");
    std::fs::write(
        &cfg,
        format!(
            "[competitive-ratio]\ninput = {:?}\nsource = \"known\"\n[competitive-ratio.known]\nkind = \"two-point\"\nlo = 20.0\nhi = 60.0\n",
            fixture("two_point_month.csv")
        ),
    )
    .unwrap();
    let report = json(&["competitive-ratio", "--config", cfg.to_str().unwrap()]);
    assert_eq!(report["summary"]["day_count"], 30);
    assert!(report["summary"]["mean_ratio"].as_f64().unwrap() >= 0.9);
}

#[test]
fn reserve_histograms_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("hist");
    stdout(&[
        "reserves",
        "--market-config",
        &fixture("market.toml"),
        "--seed",
        "4",
        "--n-periods",
        "500",
        "--pilot-periods",
        "500",
        "--histograms",
        h.to_str().unwrap(),
    ]);
    for name in ["generation_reserve_histogram.csv", "demand_reserve_histogram.csv"] {
        let text = std::fs::read_to_string(h.join(name)).unwrap();
        assert_eq!(text.lines().next(), Some("draw_mwh,count"));
    }
}
