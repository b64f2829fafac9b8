//! End-to-end checks of the command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphforms"))
}

#[test]
fn every_command_passes_on_a_suitable_preset() {
    let runs = [
        ("betti", "c3-standard"),
        ("betti", "c3-magnetic-2pi"),
        ("index", "k4-standard"),
        ("hodge", "c4-standard"),
        ("spectrum", "octahedron-standard"),
        ("relations", "c6-standard"),
        ("metric-kernel", "c3-standard"),
        ("metric-spectrum", "interval-neumann"),
        ("metric-spectrum", "loop-standard"),
        ("scatter", "c3-standard"),
        ("curvature", "k4-standard"),
        ("fuzz", "c4-standard"),
    ];
    for (cmd, preset) in runs {
        let out = bin().args([cmd, preset]).output().unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(
            out.status.success(),
            "{cmd} {preset} failed:\n{stdout}\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout.contains("verdict : PASS"), "{cmd} {preset}:\n{stdout}");
    }
}

#[test]
fn json_output_is_machine_readable() {
    let out = bin()
        .args(["betti", "c3-standard", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "betti");
    assert_eq!(v["results"]["b0"], 1);
    assert_eq!(v["results"]["b1"], 1);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert!(v.get("timings_ms").is_none());
}

#[test]
fn unknown_problem_lists_presets() {
    let out = bin().args(["betti", "no-such-problem"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("c3-standard"), "{err}");
}

#[test]
fn schema_violations_exit_with_error() {
    let dir = std::env::temp_dir().join("graphforms-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    // 2x2 projection at a degree-1 vertex.
    std::fs::write(
        &path,
        r#"{
            "graph": {"vertices": ["a", "b"], "edges": [{"src": "a", "dst": "b"}]},
            "space": {"kind": "custom",
                      "projections": {"a": [[[1,0],[0,0]],[[0,0],[0,0]]],
                                       "b": [[[0,0]]]}}
        }"#,
    )
    .unwrap();
    let out = bin().args(["betti", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degree"), "{err}");
}

#[test]
fn relations_skip_inapplicable_graphs() {
    // The loop preset has a self-loop: line graph and subdivision are
    // skipped, the dual relation still runs.
    let out = bin()
        .args(["relations", "loop-standard", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let skipped = v["results"]["skipped"].as_array().unwrap();
    assert_eq!(skipped.len(), 2);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"zero_form_dual_relation"));
}

#[test]
fn timings_are_opt_in() {
    let with = bin()
        .args(["index", "c3-standard", "--format", "json", "--timings"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&with.stdout).unwrap();
    assert!(v.get("timings_ms").is_some());
}

#[test]
fn fuzz_matches_spec_example() {
    // K4 with standard space: dims all 1, index -2, every trial agrees.
    let out = bin()
        .args([
            "fuzz",
            "k4-standard",
            "--trials",
            "50",
            "--seed",
            "7",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["expected_index"], -2);
    assert_eq!(v["results"]["matching_trials"], "50/50");
    assert_eq!(v["seed"], 7);
}

#[test]
fn metric_spectrum_digits_match_analytics() {
    let out = bin()
        .args(["metric-spectrum", "interval-dirichlet", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eigs = v["results"]["eigenvalues"].as_array().unwrap();
    let pi = std::f64::consts::PI;
    for (k, e) in eigs.iter().take(3).enumerate() {
        let lambda = e["lambda"].as_f64().unwrap();
        let expect = ((k + 1) as f64 * pi).powi(2);
        assert!((lambda - expect).abs() <= 1e-8 * expect);
    }
}
