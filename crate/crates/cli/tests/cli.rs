//! End-to-end runs of the `casorati` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casorati"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v =
        serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (code(&out), v)
}

#[test]
fn extremum_reports_the_closed_form_and_the_oracle() {
    let (c, v) = json(&["extremum", "--r", "3", "--lambda1", "3", "--k", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["schema"], "casorati-report/1");
    assert_eq!(v["command"], "extremum");
    let z: Vec<f64> = serde_json::from_value(v["result"]["minimizer"].clone()).unwrap();
    for (a, b) in z.iter().zip([1.0, 1.0, 2.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(v["result"]["oracle_agrees"], true);

    let out = run(&["extremum", "--r", "4", "--lambda1", "2", "--k", "1"]);
    assert_eq!(code(&out), 6);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn verify_on_the_sphere_immersion_holds() {
    let (c, v) = json(&[
        "verify",
        "--theorem",
        "map-general",
        "--geometry",
        "sphere-immersion-S3",
    ]);
    assert_eq!(c, 0);
    let reps = v["result"]["reports"].as_array().unwrap();
    assert!(!reps.is_empty());
    let residual = reps[0]["residual"].as_f64().unwrap();
    assert!((residual - 1.0 / 6.0).abs() < 1e-6, "{residual}");
    assert!(v["result"]["first_counterexample"].is_null());
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let hopf = run(&[
        "verify",
        "--theorem",
        "sub-hor-general",
        "--geometry",
        "complex-hopf-S3-S2",
    ]);
    assert_eq!(code(&hopf), 4);
    assert_eq!(
        code(&run(&[
            "invariants",
            "--geometry",
            "sphere-immersion-S3",
            "--point",
            "5,5,5"
        ])),
        2
    );
    assert_eq!(code(&run(&["invariants", "--geometry", "no-such-geometry"])), 64);
    assert_eq!(code(&run(&["verify", "--theorem", "no-such-theorem"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--tolerance", "-1", "catalog"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn counterexamples_exit_with_one() {
    let (c, v) = json(&[
        "verify",
        "--theorem",
        "sub-hor-general",
        "--geometry",
        "quaternionic-hopf-S7-S4",
    ]);
    assert_eq!(c, 1);
    assert_eq!(v["exit_code"], 1);
    let first = &v["result"]["first_counterexample"];
    assert_eq!(first["theorem"], "sub-hor-general");
    assert!(first["residual"].as_f64().unwrap() < 0.0);
}

#[test]
fn catalog_filters_by_tag() {
    let (c, v) = json(&["catalog", "--tag", "sub-vert-general"]);
    assert_eq!(c, 0);
    let list = v["result"].as_array().unwrap();
    assert!(!list.is_empty());
    for e in list {
        let tags: Vec<&str> = e["tags"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t.as_str().unwrap())
            .collect();
        assert!(tags.contains(&"sub-vert-general"), "{e}");
    }
    let (_, all) = json(&["catalog"]);
    assert!(all["result"].as_array().unwrap().len() > list.len());
}

#[test]
fn invariants_of_the_quaternionic_hopf_fibration() {
    let (c, v) = json(&["invariants", "--geometry", "quaternionic-hopf-S7-S4"]);
    assert_eq!(c, 0);
    let sections = v["result"]["sections"].as_array().unwrap();
    let hor = sections.iter().find(|s| s["setting"] == "horizontal").unwrap();
    assert!((hor["rho_left"].as_f64().unwrap() - 4.0).abs() < 1e-3);
    assert!((hor["norm_squared"].as_f64().unwrap() - 12.0).abs() < 1e-2);
}

#[test]
fn output_is_deterministic_and_matches_the_output_file() {
    let args = [
        "--json",
        "--seed",
        "3",
        "--samples",
        "3",
        "verify",
        "--theorem",
        "all",
        "--geometry",
        "warped-product-R-x-R3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let dir = std::env::temp_dir().join(format!("casorati-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let mut with_file: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    with_file.splice(0..0, ["--output", p.as_str()]);
    let c = run(&with_file);
    assert_eq!(code(&c), code(&a));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn geometry_files_are_usable_by_id() {
    let dir = std::env::temp_dir().join(format!("casorati-geom-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flat.json");
    std::fs::write(
        &path,
        r#"{"id": "flat-5-to-3", "builtin": "euclidean-projection", "params": {"dim": 5, "keep": [0, 1, 2]}}"#,
    )
    .unwrap();
    let file = path.to_str().unwrap();
    let (c, v) = json(&["--geometry-file", file, "verify", "--geometry", "flat-5-to-3"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["result"]["geometry"], "flat-5-to-3");
    let (_, cat) = json(&["--geometry-file", file, "catalog"]);
    assert!(cat["result"]
        .as_array()
        .unwrap()
        .iter()
        .any(|e| e["id"] == "flat-5-to-3"));

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(code(&run(&["--geometry-file", file, "catalog"])), 64);
    std::fs::remove_dir_all(&dir).unwrap();
}
