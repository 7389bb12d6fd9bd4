use std::path::PathBuf;
use std::process::{Command, Output};

use loja_core::cli::report::ReportDocument;

fn loja(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loja"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn prints_exponents() {
    let o = loja(&["y^2-x^3", "x^2*y"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "7/2\n");
    assert_eq!(stdout(&loja(&["x*y"])), "inf\n");
    assert!(stdout(&loja(&["--json", "x", "y"])).contains(r#""exponent":"1""#));
}

#[test]
fn golden_reports() {
    let cases: [(&str, &[&str]); 8] = [
        ("identity.json", &["x", "y"]),
        ("cusp_x2y.json", &["y^2 - x^3", "x^2*y"]),
        ("cusp_x2.json", &["y^2 - x^3", "x^2"]),
        ("two_cusps.json", &["y^2 - x^3", "x^2 - y^3"]),
        ("single_node.json", &["x*y"]),
        ("two_pairs.json", &["(y^2 - x^3)^2 - 4*x^5*y - x^7", "x"]),
        ("gaussian.json", &["--input", "tests/data/gaussian.json"]),
        ("irrational_tangents.json", &["x^2 - 2*y^2", "y^3"]),
    ];
    for (file, args) in cases {
        let mut full = vec!["--json", "--seed", "0"];
        full.extend_from_slice(args);
        let o = loja(&full);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
        assert_eq!(stdout(&o), golden(file), "{file}");
    }
}

#[test]
fn reports_round_trip() {
    for file in ["cusp_x2y.json", "gaussian.json", "irrational_tangents.json"] {
        let text = golden(file);
        let doc = ReportDocument::from_json(&text).unwrap();
        assert_eq!(format!("{}\n", doc.to_json()), text);
    }
    let o = loja(&["--json", "--verify", "--seed", "3", "y^2 - x^3", "x^2*y"]);
    let doc = ReportDocument::from_json(&stdout(&o)).unwrap();
    assert_eq!(ReportDocument::from_json(&doc.to_json()).unwrap(), doc);
    let numeric = doc.numeric.unwrap();
    assert!(numeric.passed);
    assert_eq!(numeric.seed, 3);
}

#[test]
fn verification_is_deterministic() {
    let args = ["--json", "--verify", "--seed", "11", "y^2 - x^3", "x^2 - y^3"];
    let a = loja(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&loja(&args)));
}

#[test]
fn shear_override_keeps_the_exponent() {
    for c in ["2", "-1/2", "5", "7/3"] {
        let o = loja(&["--json", "--shear", c, "y^2 - x^3", "x^2*y"]);
        assert_eq!(o.status.code(), Some(0), "{c}: {}", stderr(&o));
        let doc = ReportDocument::from_json(&stdout(&o)).unwrap();
        assert_eq!(doc.exponent, "7/2");
        assert_eq!(doc.shear.as_deref(), Some(c));
    }
    let o = loja(&["--shear", "0", "y^2 - x^3", "x^2*y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shear"));
}

#[test]
fn table_output() {
    let text = stdout(&loja(&["--table", "y^2 - x^3", "x^2*y"]));
    assert!(text.starts_with("7/2\n"));
    assert!(text.contains("lambda"));
    assert!(text.contains("inf 7"));
    assert!(text.contains("witness: branch"));
}

#[test]
fn exit_codes() {
    let o = loja(&["x + 1", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not vanish"));

    let o = loja(&["x", "y +* x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("component 1: 1:4"));

    assert_eq!(loja(&["i*x", "y"]).status.code(), Some(2));
    assert_eq!(loja(&["--field", "gaussian", "i*x", "y"]).status.code(), Some(0));
    assert_eq!(loja(&[]).status.code(), Some(2));
    assert_eq!(loja(&["--bogus"]).status.code(), Some(2));

    let o = loja(&["--max-tower-degree", "2", "y^5 - 2*x^5", "x^7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("limit 2"));

    // The asymptotic regime of a badly scaled map starts below the sampled radii.
    let o = loja(&["--verify", "x", "y^2 - 1000000000000*x^3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("verify: FAIL"));
}

#[test]
fn input_documents() {
    let o = loja(&["--input", "tests/data/gaussian.json"]);
    assert_eq!(stdout(&o), "inf\n");
    let o = loja(&["--input", "tests/data/missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = loja(&["--input", "tests/data/gaussian.json", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn witness_degree_controls_truncation() {
    let o = loja(&["--json", "--witness-degree", "4", "y^2 - x^3", "x^2*y"]);
    let doc = ReportDocument::from_json(&stdout(&o)).unwrap();
    let w = doc.witness.unwrap();
    assert_eq!(w.degree, 4);
    assert_eq!(w.y, "t^3 + 3/2*t^4");
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = loja_core::cli::run(["loja", "--json", "x", "y"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), golden("identity.json"));
}
