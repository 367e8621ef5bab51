use std::path::Path;
use std::process::Command;

use qsh_core::forms::{equal, Sampler};
use qsh_core::swann::{beta_of_f, solution_family, SolutionConstants};
use qsh_lab::ingest::parse_user_f;
use qsh_lab::{run, solution_to_json, CliError, RunConfig, Suite};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsh-lab"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn zero_kappa_is_a_usage_error() {
    let out = bin()
        .args(["--suites", "curvature", "--kappa", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    for args in [
        vec!["--n", "1"],
        vec!["--trials", "0"],
        vec!["--tolerance", "-1"],
        vec!["--suites", "nonsense"],
        vec!["--kappa", "x"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn violating_input_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "F.json", r#"{"F1":"h0","F2":"0","F3":"0"}"#);
    let report = dir.path().join("report.json");
    let status = bin()
        .args(["--suites", "flat", "--seed", "3", "--input"])
        .arg(&input)
        .arg("--output")
        .arg(&report)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["status"], "fail");
    let checks = json["checks"].as_array().unwrap();
    let user = checks
        .iter()
        .find(|c| c["name"] == "user_solution_closed")
        .unwrap();
    assert_eq!(user["status"], "fail");
    assert_eq!(user["witness"]["residual"], 1);
    assert_eq!(user["witness"]["point"].as_array().unwrap().len(), 4);
    assert!((user["residual"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let others_pass = checks
        .iter()
        .filter(|c| c["name"] != "user_solution_closed")
        .all(|c| c["status"] == "pass");
    assert!(others_pass);
}

#[test]
fn closed_input_passes_and_is_classified() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "F.json", r#"{"F1":"h1","F2":"-h2","F3":"0"}"#);
    let out = bin()
        .args(["--suites", "flat", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let user = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "user_solution_closed")
        .unwrap()
        .clone();
    assert_eq!(user["witness"]["torsion"], "X57");
}

#[test]
fn ingest_examples() {
    let p = Path::new("F.json");
    let sol = parse_user_f(r#"{"F1":"h1","F2":"-h2","F3":"0"}"#, p).unwrap();
    assert_eq!(sol.f[0].to_string(), "h1");
    assert!(matches!(
        parse_user_f(r#"{"F1":"exp(2*s1*h0)"}"#, p),
        Err(CliError::Input { .. })
    ));
    let err = parse_user_f(r#"{"F1":"h1 +","F2":"0","F3":"0"}"#, p).unwrap_err();
    assert!(err.to_string().contains("column"), "{err}");
    let err = parse_user_f(r#"{"F1":"x","F2":"0","F3":"0"}"#, p).unwrap_err();
    assert!(err.to_string().contains("unknown variable"), "{err}");
    assert!(parse_user_f(r#"{"F1":"0","F2":"0","F3":"0","F4":"1"}"#, p).is_err());
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let out = bin()
        .args(["--suites", "flat", "--input", "/nonexistent/F.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solution_family_round_trips_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        let sol = solution_family(&SolutionConstants::random(&mut rng)).unwrap();
        let text = solution_to_json(&sol);
        let back = parse_user_f(&text, Path::new("family.json")).unwrap();
        let rep = equal(
            &beta_of_f(&sol),
            &beta_of_f(&back),
            &Sampler::default(),
            1e-8,
            &mut rng,
        )
        .unwrap();
        assert!(rep.equal, "{rep:?}");
    }
}

fn quick_config(seed: u64) -> RunConfig {
    RunConfig {
        ns: vec![2],
        seed,
        trials: 20,
        suites: [
            Suite::Model,
            Suite::Liealg,
            Suite::Fiber,
            Suite::Flat,
            Suite::Symspace,
        ]
        .into_iter()
        .collect(),
        ..RunConfig::default()
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run(&quick_config(9)).unwrap();
    let b = run(&quick_config(9)).unwrap();
    assert!(a.all_passed());
    assert_eq!(a.to_json_without_timing(), b.to_json_without_timing());
    let c = run(&quick_config(10)).unwrap();
    assert_ne!(a.to_json_without_timing(), c.to_json_without_timing());
}

#[test]
fn every_check_has_an_anchor() {
    let r = run(&quick_config(1)).unwrap();
    assert!(!r.checks.is_empty());
    assert!(r.checks.iter().all(|c| !c.anchor.is_empty()));
}

#[test]
fn markdown_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.md");
    let status = bin()
        .env("QSH_LAB_THREADS", "1")
        .args([
            "--suites",
            "model,fiber",
            "--n",
            "2",
            "--trials",
            "10",
            "--format",
            "markdown",
            "--output",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# qsh-lab report"));
    assert!(text.contains("| model | 2 | quaternion_relations | pass |"));
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}
