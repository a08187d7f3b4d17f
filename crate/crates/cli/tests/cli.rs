use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn arad(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arad"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn c(re: f64, im: f64) -> Value {
    json!({ "re": re, "im": im })
}

fn real(rows: &[&[f64]]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|&x| c(x, 0.0)).collect()))
            .collect(),
    )
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let s: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn assert_valid(name: &str, text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    let validator = schema(name);
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

/// A = I on C^2, T the nilpotent Jordan block.
fn nilpotent(dir: &Path) -> PathBuf {
    write(
        dir,
        "nilpotent.json",
        &json!({ "A": real(&[&[1.0, 0.0], &[0.0, 1.0]]), "operators": { "T": real(&[&[0.0, 1.0], &[0.0, 0.0]]) } }),
    )
}

/// A = diag(1, 0) with a non-member `T` and the identity `I`.
fn degenerate(dir: &Path) -> PathBuf {
    write(
        dir,
        "degenerate.json",
        &json!({
            "A": real(&[&[1.0, 0.0], &[0.0, 0.0]]),
            "operators": {
                "T": real(&[&[1.0, 1.0], &[0.0, 1.0]]),
                "I": real(&[&[1.0, 0.0], &[0.0, 1.0]])
            }
        }),
    )
}

#[test]
fn radius_of_jordan_block_is_one_half() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    let o = arad(dir.path(), &["compute", f.to_str().unwrap(), "radius"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0.500000000000\n");
}

#[test]
fn membership_false_is_not_an_error() {
    let dir = TempDir::new().unwrap();
    let f = degenerate(dir.path());
    let o = arad(dir.path(), &["compute", f.to_str().unwrap(), "member"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn non_member_radius_and_range_are_domain_errors() {
    let dir = TempDir::new().unwrap();
    let f = degenerate(dir.path());
    let f = f.to_str().unwrap();
    for q in ["radius", "crawford", "m_a", "sharp"] {
        assert_eq!(code(&arad(dir.path(), &["compute", f, q])), 3, "{q}");
    }
    assert_eq!(code(&arad(dir.path(), &["range", f])), 3);
    // The seminorm is finite for every operator.
    let o = arad(dir.path(), &["compute", f, "seminorm"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1.00000000000\n");
}

#[test]
fn sharp_of_identity_is_range_projector() {
    let dir = TempDir::new().unwrap();
    let f = degenerate(dir.path());
    let o = arad(
        dir.path(),
        &[
            "--json",
            "compute",
            f.to_str().unwrap(),
            "sharp",
            "--op",
            "I",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_valid("compute", &stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let expect = [[1.0, 0.0], [0.0, 0.0]];
    for i in 0..2 {
        for j in 0..2 {
            let z = &v["value"][i][j];
            assert!((z["re"].as_f64().unwrap() - expect[i][j]).abs() < 1e-12);
            assert!(z["im"].as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn operator_choice_needs_op_when_ambiguous() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "two.json",
        &json!({ "A": real(&[&[1.0]]), "operators": { "P": real(&[&[2.0]]), "R": real(&[&[3.0]]) } }),
    );
    let f = f.to_str().unwrap();
    assert_eq!(code(&arad(dir.path(), &["compute", f, "radius"])), 2);
    let o = arad(dir.path(), &["compute", f, "radius", "--op", "R"]);
    assert_eq!(stdout(&o), "3.00000000000\n");
    assert_eq!(
        code(&arad(dir.path(), &["compute", f, "radius", "--op", "Z"])),
        2
    );
}

#[test]
fn rank_zero_weight_gives_zero_quantities() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "zero.json",
        &json!({ "A": real(&[&[0.0, 0.0], &[0.0, 0.0]]), "operators": { "T": real(&[&[1.0, 2.0], &[3.0, 4.0]]) } }),
    );
    for q in ["seminorm", "radius", "crawford"] {
        let o = arad(dir.path(), &["compute", f.to_str().unwrap(), q]);
        assert_eq!(code(&o), 0, "{q}");
        assert_eq!(stdout(&o), "0.00000000000\n", "{q}");
    }
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    let f = f.to_str().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &json!({ "A": real(&[&[1.0, 0.0]]), "operators": {} }),
    );
    let cases: Vec<Vec<&str>> = vec![
        vec!["compute", "missing.json", "radius"],
        vec!["compute", bad.to_str().unwrap(), "radius"],
        vec!["compute", f, "volume"],
        vec!["check", f, "R99"],
        vec!["--grid", "4", "compute", f, "radius"],
        vec!["check", f, "R13", "--z1", "one"],
        vec!["fuzz", "--profile", "nope", "--count", "1"],
        vec!["fuzz", "--count", "0"],
        vec!["range", f, "--points", "2"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = arad(dir.path(), &args);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn help_and_version_exit_zero() {
    let dir = TempDir::new().unwrap();
    for flag in ["--help", "--version"] {
        let o = arad(dir.path(), &[flag]);
        assert_eq!(code(&o), 0);
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn check_all_skips_missing_operators_without_failing() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    let o = arad(dir.path(), &["--json", "check", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_valid("check-report", &stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 31);
    let r7 = outcomes.iter().find(|o| o["relation"] == "R7").unwrap();
    assert_eq!(r7["verdict"], "skipped");
    assert_eq!(r7["missing"], json!(["T1", "T2", "T3", "T4"]));
    let r1 = outcomes.iter().find(|o| o["relation"] == "R1").unwrap();
    assert_eq!(r1["verdict"], "pass");
    let s = &v["summary"];
    assert_eq!(s["evaluated"], 31);
    assert_eq!(s["fail"], 0);
    assert_eq!(
        s["pass"].as_u64().unwrap() + s["skipped"].as_u64().unwrap(),
        31
    );

    // Named explicitly, a relation with missing operators is an input error.
    assert_eq!(
        code(&arad(dir.path(), &["check", f.to_str().unwrap(), "R7"])),
        2
    );
}

#[test]
fn check_on_non_member_named_relation_is_domain_error() {
    let dir = TempDir::new().unwrap();
    let f = degenerate(dir.path());
    let o = arad(dir.path(), &["--json", "check", f.to_str().unwrap(), "R1"]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcomes"][0]["verdict"], "skipped");
    assert_eq!(v["outcomes"][0]["non_member"], json!(["T"]));
}

#[test]
fn r13_scalars_from_flags_match_closed_form() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    for (z1, z2, e1, e2) in [
        ("1+0i", "-1+0i", c(1.0, 0.0), c(-1.0, 0.0)),
        ("3+4i", "-2.5i", c(3.0, 4.0), c(0.0, -2.5)),
    ] {
        let o = arad(
            dir.path(),
            &[
                "--json",
                "check",
                f.to_str().unwrap(),
                "R13",
                "--z1",
                z1,
                "--z2",
                z2,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["config"]["z1"], e1);
        assert_eq!(v["config"]["z2"], e2);
        let out = &v["outcomes"][0];
        assert_eq!(out["verdict"], "pass");
        assert!(out["slack"].as_f64().unwrap() <= 1e-8);
        // Largest singular value of [[|z1|, 1], [0, |z2|]], since ||T||_A = 1.
        let (a, b) = (
            e1["re"].as_f64().unwrap().hypot(e1["im"].as_f64().unwrap()),
            e2["re"].as_f64().unwrap().hypot(e2["im"].as_f64().unwrap()),
        );
        let expect = 0.5 * (((a + b).powi(2) + 1.0).sqrt() + ((a - b).powi(2) + 1.0).sqrt());
        for side in ["lhs", "rhs"] {
            let x = out[side].as_f64().unwrap();
            assert!(
                (x - expect).abs() <= 1e-8 * expect,
                "{side} {x} vs {expect}"
            );
        }
    }
}

#[test]
fn out_flag_writes_the_json_report() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    let o = arad(
        dir.path(),
        &[
            "--json",
            "--out",
            "reports/r.json",
            "check",
            f.to_str().unwrap(),
            "R1",
            "R3",
        ],
    );
    assert_eq!(code(&o), 0);
    let written = fs::read_to_string(dir.path().join("reports/r.json")).unwrap();
    assert_eq!(written, stdout(&o));
}

#[test]
fn injected_fault_exits_one_with_replayable_witness() {
    let dir = TempDir::new().unwrap();
    let o = arad(
        dir.path(),
        &[
            "--json",
            "fuzz",
            "--count",
            "4",
            "--relations",
            "R1,R14",
            "--corpus",
            "wit",
            "--inject-fault",
            "negate-slack",
        ],
    );
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert_valid("fuzz-report", &text);
    let v: Value = serde_json::from_str(&text).unwrap();
    let failures = v["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert_eq!(v["config"]["injected_fault"], "negate-slack");
    for f in failures {
        let name = f["witness"].as_str().unwrap();
        let path = dir.path().join("wit").join(name);
        let body = fs::read_to_string(&path).unwrap();
        assert_valid("instance", &body);
        assert!(f["witness_dim"].as_u64().unwrap() <= f["dim"].as_u64().unwrap());
        // Without the fault the witness passes.
        let relation = f["relation"].as_str().unwrap();
        let replay = arad(dir.path(), &["check", path.to_str().unwrap(), relation]);
        assert_eq!(code(&replay), 0);
    }
    // No temporary files are left behind.
    for entry in fs::read_dir(dir.path().join("wit")).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(name.ends_with(".json") && !name.starts_with('.'), "{name}");
    }
}

#[test]
fn fuzz_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |corpus: &str| {
        let o = arad(
            dir.path(),
            &[
                "--json", "--seed", "77", "fuzz", "--count", "6", "--corpus", corpus,
            ],
        );
        assert_eq!(code(&o), 0);
        o.stdout
    };
    let (a, b) = (run("c1"), run("c2"));
    assert_eq!(a, b);
    assert_valid("fuzz-report", std::str::from_utf8(&a).unwrap());
    let mut names: Vec<_> = fs::read_dir(dir.path().join("c1"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for n in names {
        let x = fs::read(dir.path().join("c1").join(&n)).unwrap();
        let y = fs::read(dir.path().join("c2").join(&n)).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn fuzz_reports_plain_reading_as_report_only() {
    let dir = TempDir::new().unwrap();
    let o = arad(
        dir.path(),
        &[
            "--json",
            "fuzz",
            "--count",
            "20",
            "--relations",
            "R17,R28,R29",
            "--corpus",
            "c",
        ],
    );
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["plain_variants"], json!(["R17-plain"]));
    let labels: Vec<&str> = v["relations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["relation"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["R17", "R28", "R29", "R17-plain"]);
    for f in v["report_only"].as_array().unwrap() {
        assert!(dir
            .path()
            .join("c")
            .join(f["witness"].as_str().unwrap())
            .exists());
    }
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn generated_witnesses_validate_against_instance_schema() {
    let dir = TempDir::new().unwrap();
    let o = arad(
        dir.path(),
        &[
            "fuzz",
            "--count",
            "1",
            "--relations",
            "R1",
            "--corpus",
            "w",
            "--inject-fault",
            "negate-slack",
        ],
    );
    assert_eq!(code(&o), 1);
    for entry in fs::read_dir(dir.path().join("w")).unwrap() {
        let body = fs::read_to_string(entry.unwrap().path()).unwrap();
        assert_valid("instance", &body);
    }
}

#[test]
fn range_of_identity_is_the_point_one() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "id.json",
        &json!({ "A": real(&[&[2.0, 0.0], &[0.0, 5.0]]), "operators": { "T": real(&[&[1.0, 0.0], &[0.0, 1.0]]) } }),
    );
    let o = arad(
        dir.path(),
        &["range", f.to_str().unwrap(), "--points", "16"],
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "# w_A = 1.00000000000, c_A = 1.00000000000"
    );
    assert_eq!(lines.next().unwrap(), "theta,re,im");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 16);
    for r in rows {
        assert!((r[1] - 1.0).abs() < 1e-12 && r[2].abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn range_of_normal_matrix_traces_the_hull_segment() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "diag.json",
        &json!({
            "A": real(&[&[1.0, 0.0], &[0.0, 1.0]]),
            "operators": { "T": [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]] }
        }),
    );
    let o = arad(
        dir.path(),
        &[
            "--out",
            "b.json",
            "range",
            f.to_str().unwrap(),
            "--points",
            "64",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_valid("range", &text);
    let v: Value = serde_json::from_str(&text).unwrap();
    let pts: Vec<(f64, f64)> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["re"].as_f64().unwrap(), p["im"].as_f64().unwrap()))
        .collect();
    for &(re, im) in &pts {
        assert!((re + im - 1.0).abs() < 1e-9, "({re}, {im}) off the segment");
        assert!((-1e-9..=1.0 + 1e-9).contains(&re));
    }
    let near = |x: f64, y: f64| pts.iter().any(|&(re, im)| (re - x).hypot(im - y) < 1e-9);
    assert!(near(1.0, 0.0) && near(0.0, 1.0));
    assert!((v["w_a"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["c_a"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn range_max_modulus_matches_radius() {
    let dir = TempDir::new().unwrap();
    // Non-normal, rank-deficient weight.
    let f = write(
        dir.path(),
        "g.json",
        &json!({
            "A": real(&[&[2.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]),
            "operators": { "T": [
                [c(0.3, 1.0), c(1.2, -0.4), c(0.0, 0.0)],
                [c(-0.7, 0.2), c(0.5, 0.5), c(0.0, 0.0)],
                [c(2.0, 1.0), c(-1.0, 3.0), c(4.0, 0.0)]
            ] }
        }),
    );
    let o = arad(
        dir.path(),
        &["--json", "range", f.to_str().unwrap(), "--points", "4096"],
    );
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let w = v["w_a"].as_f64().unwrap();
    let max = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["re"].as_f64().unwrap().hypot(p["im"].as_f64().unwrap()))
        .fold(0.0, f64::max);
    assert!(max <= w + 1e-9);
    assert!(w - max <= 2e-6 * w, "{w} {max}");
}

#[test]
fn compute_json_validates_for_every_quantity() {
    let dir = TempDir::new().unwrap();
    let f = nilpotent(dir.path());
    for q in ["seminorm", "radius", "crawford", "m_a", "sharp", "member"] {
        let o = arad(dir.path(), &["--json", "compute", f.to_str().unwrap(), q]);
        assert_eq!(code(&o), 0, "{q}");
        assert_valid("compute", &stdout(&o));
    }
}
