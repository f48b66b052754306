use std::path::Path;
use std::process::{Command, Output};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemann_cli::spec::{self, PolymerFields, StateSpec, TrafficFields};
use riemann_cli::{FanDocument, ProblemSpec};
use riemann_core::{random_riemann, solve_riemann, Family, ModelKind, State, WaveKind};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rough-riemann"))
}

fn run(verb: &str, spec: &Value, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("spec.json");
    std::fs::write(&path, serde_json::to_string_pretty(spec).unwrap()).unwrap();
    bin()
        .arg(verb)
        .arg("--spec")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

/// `k = 1`, `gamma = 1.5`: `w_l = 0.5 + 1.5 = 2`, and `rho_m = (w_l - v_r)^(2/3) = 1`.
fn worked_traffic() -> Value {
    json!({
        "model": "traffic",
        "params": { "traffic": { "gamma": 1.5 } },
        "problem": { "riemann": {
            "left": { "rho": 1.5f64.powf(1.0 / 1.5), "v": 0.5, "k": 1.0 },
            "right": { "rho": 0.5, "v": 1.0, "k": 1.0 }
        } }
    })
}

#[test]
fn worked_traffic_example_has_unit_middle_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("solve", &worked_traffic(), dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: FanDocument = serde_json::from_str(&read(dir.path(), "fan.json")).unwrap();
    let shape: Vec<_> = doc.waves.iter().map(|w| (w.family, w.kind)).collect();
    assert_eq!(
        shape,
        vec![
            (Family::V, WaveKind::Rarefaction),
            (Family::Rho, WaveKind::Contact)
        ]
    );
    let mid = doc.waves[0].right.traffic().unwrap();
    assert!((mid.rho - 1.0).abs() <= 1e-12, "{mid:?}");
    assert_eq!(mid.v, 1.0);
    assert_eq!(doc.cases, vec!["equal_k", "no_vacuum"]);
    assert!(doc.residuals.passes(1e-9));
}

#[test]
fn equal_states_give_an_empty_document() {
    let dir = tempfile::tempdir().unwrap();
    let st = json!({ "s": 0.4, "c": 0.3, "k": 1.0 });
    let spec = json!({ "model": "polymer", "problem": { "riemann": { "left": st, "right": st } } });
    let out = run("solve", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc: FanDocument = serde_json::from_str(&read(dir.path(), "fan.json")).unwrap();
    assert!(doc.waves.is_empty());
}

#[test]
fn fan_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in ModelKind::ALL {
        let model = kind.default_model();
        for _ in 0..25 {
            let (l, r) = random_riemann(&model, &mut rng);
            let doc = FanDocument::new(&model, &solve_riemann(&model, l, r).unwrap(), 1e-9);
            let text = serde_json::to_string_pretty(&doc).unwrap();
            assert_eq!(serde_json::from_str::<FanDocument>(&text).unwrap(), doc);
        }
    }
}

#[test]
fn problem_specs_round_trip() {
    let specs = [
        ProblemSpec::riemann(
            ModelKind::PolymerGravity,
            StateSpec::Polymer(PolymerFields {
                s: 0.3,
                c: 0.1,
                k: 0.7,
            }),
            StateSpec::Polymer(PolymerFields {
                s: 0.9,
                c: 0.6,
                k: 1.2,
            }),
        ),
        spec::parse(&worked_traffic().to_string()).unwrap(),
        spec::parse(&front_tracking_spec().to_string()).unwrap(),
    ];
    for s in specs {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(spec::parse(&text).unwrap(), s);
    }
    let t = StateSpec::Traffic(TrafficFields {
        rho: 0.2,
        v: 1.0,
        k: 1.0,
    });
    assert_eq!(
        ProblemSpec::riemann(ModelKind::Traffic, t, t)
            .riemann_states()
            .unwrap()
            .0,
        State::Traffic(riemann_core::TrafficState::new(0.2, 1.0, 1.0))
    );
}

#[test]
fn schema_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json!({ "model": "polymer", "problem": { "riemann": { "left": { "s": 0.4, "c": 0.3, "k": 1.0 }, "right": { "s": "x" } } } });
    let out = run("solve", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("line") && err.contains("problem.riemann.right"),
        "{err}"
    );

    let bad = json!({ "model": "polymer", "problem": { "riemann": { "left": { "s": 1.4, "c": 0.3, "k": 1.0 }, "right": { "s": 0.2, "c": 0.3, "k": 1.0 } } } });
    assert_eq!(run("solve", &bad, dir.path(), &[]).status.code(), Some(2));
    assert_eq!(
        run("solve", &worked_traffic(), dir.path(), &["--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    let missing = bin()
        .args(["solve", "--spec", "/nonexistent/spec.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn front_tracking_is_traffic_only() {
    let dir = tempfile::tempdir().unwrap();
    let st = json!({ "s": 0.4, "c": 0.3, "k": 1.0 });
    let spec = json!({ "model": "polymer", "problem": { "cauchy": {
        "breakpoints": [0.0], "states": [st, st], "T": 1.0, "method": "front_tracking" } } });
    let out = run("simulate", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("problem.cauchy.method"));
}

fn front_tracking_spec() -> Value {
    let st = |rho: f64, v: f64| json!({ "rho": rho, "v": v, "k": 1.0 });
    json!({
        "model": "traffic",
        "problem": { "cauchy": {
            "breakpoints": [-1.0, 0.0, 0.5, 1.5],
            "states": [st(0.9, 1.0), st(0.4, 1.1), st(1.0, 0.9), st(0.3, 1.05), st(0.8, 0.95)],
            "T": 5.0,
            "method": "front_tracking"
        } },
        "output": { "profile": { "t": 5.0, "xs": { "min": -4.0, "max": 8.0, "count": 121 } } }
    })
}

#[test]
fn event_log_strength_never_grows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("simulate", &front_tracking_spec(), dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let log = read(dir.path(), "events.csv");
    let mut lines = log.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "total_strength").unwrap();
    let strengths: Vec<f64> = lines
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect();
    assert!(!strengths.is_empty());
    assert!(
        strengths.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "{strengths:?}"
    );
    let profile = read(dir.path(), "profile.csv");
    assert!(profile.starts_with("time,x,rho,v,k\n"));
    assert_eq!(profile.lines().count(), 122);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut spec = worked_traffic();
    spec["output"] = json!({ "profile": { "t": 1.0, "xs": { "min": -2.0, "max": 3.0, "count": 51 } }, "decoupling_report": true });
    for dir in [&a, &b] {
        assert!(run("solve", &spec, dir.path(), &[]).status.success());
        assert!(run("simulate", &front_tracking_spec(), dir.path(), &[])
            .status
            .success());
    }
    for name in ["fan.json", "profile.csv", "decoupling.json", "events.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn compare_reports_the_viscous_distance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json!({
        "model": "polymer",
        "problem": { "riemann": { "left": { "s": 0.8, "c": 0.2, "k": 1.0 }, "right": { "s": 0.2, "c": 0.7, "k": 1.5 } } },
        "compare": { "grid": { "eps": 2e-3, "cells": 4096, "x_min": -3.0, "x_max": 3.0 }, "t": 1.0, "threshold": 0.05 }
    });
    let out = run("compare", &spec, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&read(dir.path(), "compare.json")).unwrap();
    assert_eq!(report["variables"], json!(["s", "c", "k"]));
    assert!(report["primary_distance"].as_f64().unwrap() <= 0.05);

    let mut strict = spec.clone();
    strict["compare"]["threshold"] = json!(1e-9);
    assert_eq!(
        run("compare", &strict, dir.path(), &[]).status.code(),
        Some(3)
    );
}

#[test]
fn validate_sweeps_random_problems() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        "validate",
        &worked_traffic(),
        dir.path(),
        &["--seed", "17", "--count", "40"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&read(dir.path(), "validate.json")).unwrap();
    assert_eq!(report["sweep"]["problems"], 40);
    assert_eq!(report["sweep"]["failed"], 0);
    assert!(
        report["decoupling"]["report"]["max_value_dev_along_phi"]
            .as_f64()
            .unwrap()
            <= 1e-6
    );
}
