use std::path::Path;
use std::process::{Command, Output};

use nag_cli::manifest::MANIFEST_SCHEMA;
use nag_cli::output::{format_real, parse_real, to_json, CsvTable, Real};
use nag_cli::records::{ConditionRecord, ExperimentRecord, NormRecord, PvRecord, SolveRecord};
use nag_core::document::Term;
use nag_core::{Field, PolyDocument};
use proptest::prelude::*;

fn nag(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nag")).args(args).current_dir(dir).output().expect("spawn nag")
}

fn ok_stdout(dir: &Path, args: &[&str]) -> String {
    let out = nag(dir, args);
    assert!(out.status.success(), "nag {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const C3: &str = r#"{"field":"real","n":1,"degrees":[3],"terms":[[0,[3,0],1,0],[0,[1,2],-3,0]]}"#;
const CIRCLE: &str = r#"{"field":"real","n":2,"degrees":[2],"terms":[[0,[0,2,0],1,0],[0,[0,0,2],1,0],[0,[2,0,0],-0.25,0]]}"#;
const QUAD: &str = r#"{"field":"complex","n":2,"degrees":[2,2],"terms":[[0,[2,0,0],1,0.5],[0,[0,2,0],-1,0],[0,[1,0,1],0.3,0],[1,[0,1,1],1,0],[1,[2,0,0],-0.7,0.2],[1,[0,0,2],0.4,0]]}"#;

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c3.json", C3);
    write(dir.path(), "circle.json", CIRCLE);
    write(dir.path(), "quad.json", QUAD);
    dir
}

#[test]
fn norm_of_c3_brackets_one() {
    let dir = setup();
    let text = ok_stdout(dir.path(), &["norm", "--poly", "c3.json", "--k", "7"]);
    let rec: NormRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.schema_version, 1);
    assert!(rec.upper.0 >= 1.0 && rec.upper.0 <= 1.0 / (1.0 - 2f64.powi(-7)), "{rec:?}");
    assert!(rec.lower.0 <= 1.0);
    assert!((rec.weyl.0 - 2.0).abs() < 1e-12);
    // Emitted JSON reparsed equals the record, and re-emits identically.
    assert_eq!(to_json(&rec).unwrap(), text);
}

#[test]
fn missing_file_exits_2_naming_the_path() {
    let dir = setup();
    let out = nag(dir.path(), &["norm", "--poly", "no_such_file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_file.json"));
}

#[test]
fn schema_violations_exit_2() {
    let dir = setup();
    write(dir.path(), "bad.json", r#"{"field":"real","n":1,"degrees":[2],"terms":[[0,[3,0],1,0]]}"#);
    let out = nag(dir.path(), &["norm", "--poly", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.json") && msg.contains("total degree"), "{msg}");
    write(dir.path(), "imag.json", r#"{"field":"real","n":1,"degrees":[1],"terms":[[0,[1,0],1,0.5]]}"#);
    assert_eq!(nag(dir.path(), &["norm", "--poly", "imag.json"]).status.code(), Some(2));
    write(dir.path(), "garbage.json", "{not json");
    assert_eq!(nag(dir.path(), &["norm", "--poly", "garbage.json"]).status.code(), Some(2));
    assert_eq!(nag(dir.path(), &["norm"]).status.code(), Some(2));
}

#[test]
fn grid_guard_exits_3_and_names_the_guard() {
    let dir = setup();
    let out = nag(dir.path(), &["--max-grid", "10", "norm", "--poly", "circle.json"]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("grid points") && msg.contains("limit 10"), "{msg}");
}

#[test]
fn numerical_failures_exit_4() {
    let dir = setup();
    // x² has a singular zero, so no depth suffices.
    write(dir.path(), "sq.json", r#"{"field":"real","n":1,"degrees":[2],"terms":[[0,[0,2],1,0]]}"#);
    let out = nag(dir.path(), &["pv", "--poly", "sq.json", "--max-depth", "3", "--boxes", "b.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max depth 3"));
    let t = CsvTable::read(&dir.path().join("b.csv")).unwrap();
    assert!(!t.rows.is_empty() && t.rows.iter().all(|r| r[2] == "unresolved"));
}

#[test]
fn solve_is_byte_identical_across_runs_and_threads() {
    let dir = setup();
    let a = ok_stdout(dir.path(), &["solve", "--poly", "quad.json", "--seed", "1"]);
    let b = ok_stdout(dir.path(), &["solve", "--poly", "quad.json", "--seed", "1"]);
    let c = ok_stdout(dir.path(), &["--threads", "1", "solve", "--poly", "quad.json", "--seed", "1"]);
    let d = ok_stdout(dir.path(), &["--threads", "8", "solve", "--poly", "quad.json", "--seed", "1"]);
    assert_eq!(a, b);
    assert_eq!(c, d);
    assert_eq!(a, c);
    let rec: SolveRecord = serde_json::from_str(&a).unwrap();
    assert!(rec.accepted && rec.residual.0 < 1e-10);
    assert_eq!(rec.path_norm, "quadratic");
    let other = ok_stdout(dir.path(), &["solve", "--poly", "quad.json", "--seed", "2"]);
    assert_ne!(a, other);
}

#[test]
fn trace_and_box_csv_rows_match_headers() {
    let dir = setup();
    ok_stdout(dir.path(), &["solve", "--poly", "quad.json", "--seed", "3", "--trace", "trace.csv"]);
    let trace = CsvTable::read(&dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.header, ["step", "t", "dt", "m", "norm_upper", "norm_lower", "displacement"]);
    assert!(trace.rows.iter().all(|r| r.len() == trace.header.len()));
    let text = ok_stdout(dir.path(), &["pv", "--poly", "circle.json", "--boxes", "boxes.csv"]);
    let rec: PvRecord = serde_json::from_str(&text).unwrap();
    let boxes = CsvTable::read(&dir.path().join("boxes.csv")).unwrap();
    assert_eq!(boxes.header, ["c1", "c2", "width", "clause", "depth"]);
    assert_eq!(boxes.rows.len() as u64, rec.accepted);
    assert_eq!(rec.value_clause + rec.gradient_clause, rec.accepted);
    for r in &boxes.rows {
        assert_eq!(r.len(), 5);
        assert!(r[..3].iter().all(|v| parse_real(v).is_some()));
    }
}

#[test]
fn singular_points_serialize_infinity_as_strings() {
    let dir = setup();
    // [1:0:0] makes both quadrics' tangent derivatives vanish together.
    let text = ok_stdout(dir.path(), &["condition", "--poly", "quad.json", "--point", "1,0,0,0,0,0"]);
    assert!(text.contains("\"kappa\":\"inf\""), "{text}");
    let rec: ConditionRecord = serde_json::from_str(&text).unwrap();
    assert!(rec.points[0].kappa.0.is_infinite() && rec.points[0].k_value.0.is_infinite());
    assert_eq!(to_json(&rec).unwrap(), text);
}

#[test]
fn condition_reports_kappa_and_k_at_a_regular_point() {
    let dir = setup();
    let text = ok_stdout(dir.path(), &["condition", "--poly", "circle.json", "--point", "2,1,0", "--point", "1,0,0"]);
    let rec: ConditionRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.points.len(), 2);
    for p in &rec.points {
        assert!(p.k_value.0 >= 1.0 && p.kappa.0 >= 1.0);
        let norm: f64 = p.point.iter().map(|[re, im]| re.0 * re.0 + im.0 * im.0).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }
}

#[test]
fn manifest_records_seed_validates_and_reruns_identically() {
    let dir = setup();
    ok_stdout(dir.path(), &["solve", "--poly", "quad.json", "--seed", "77", "--trace", "t.csv", "--out", "s.json"]);
    let first = std::fs::read(dir.path().join("s.json")).unwrap();
    let first_trace = std::fs::read(dir.path().join("t.csv")).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["config"]["seed"], 77);
    assert_eq!(manifest["command"], "solve");
    assert!(manifest["bounds"]["step_bound"].is_number());
    let schema: serde_json::Value = serde_json::from_str(MANIFEST_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&manifest).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");

    std::fs::remove_file(dir.path().join("s.json")).unwrap();
    std::fs::remove_file(dir.path().join("t.csv")).unwrap();
    ok_stdout(dir.path(), &["rerun", "s.json.manifest.json"]);
    assert_eq!(std::fs::read(dir.path().join("s.json")).unwrap(), first);
    assert_eq!(std::fs::read(dir.path().join("t.csv")).unwrap(), first_trace);

    let printed: serde_json::Value = serde_json::from_str(&ok_stdout(dir.path(), &["schema"])).unwrap();
    assert_eq!(printed, schema);
}

#[test]
fn schema_rejects_a_manifest_without_seed() {
    let schema: serde_json::Value = serde_json::from_str(MANIFEST_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let bad = serde_json::json!({"schema_version": 1, "command": "solve"});
    assert!(!validator.is_valid(&bad));
}

#[test]
fn experiment_emits_summary_with_bound_and_trial_csv() {
    let dir = setup();
    let args = ["experiment", "--kind", "ratio", "--n", "2", "--d", "2", "--trials", "60", "--seed", "4", "--csv", "r.csv"];
    let text = ok_stdout(dir.path(), &args);
    let rec: ExperimentRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(rec.degrees, vec![2, 2]);
    assert!(rec.bounds["ratio_mean_bound"].0 > rec.metrics["mean"].0);
    assert!(rec.holds);
    let t = CsvTable::read(&dir.path().join("r.csv")).unwrap();
    assert_eq!(t.header, ["trial", "value"]);
    assert_eq!(t.rows.len(), 60);
    let csv_mean: f64 = t.rows.iter().map(|r| parse_real(&r[1]).unwrap()).sum::<f64>() / 60.0;
    assert!((csv_mean - rec.metrics["mean"].0).abs() <= 1e-12 * csv_mean);
    let mut threaded = vec!["--threads", "8"];
    threaded.extend(args);
    assert_eq!(ok_stdout(dir.path(), &threaded), text);
}

#[test]
fn in_process_run_matches_binary() {
    let dir = setup();
    let out = dir.path().join("n.json");
    let poly = dir.path().join("c3.json");
    let code = nag_cli::run(["nag", "--out", out.to_str().unwrap(), "norm", "--poly", poly.to_str().unwrap()]);
    assert_eq!(code, 0);
    let from_binary = ok_stdout(dir.path(), &["norm", "--poly", "c3.json"]);
    assert_eq!(std::fs::read_to_string(out).unwrap(), from_binary);
    assert_eq!(nag_cli::run(["nag", "norm", "--poly", "/nonexistent/p.json"]), 2);
}

fn finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |x| x.is_finite())
}

proptest! {
    #[test]
    fn real_round_trips_every_bit_pattern(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        let back: Real = serde_json::from_str(&to_json(&Real(x)).unwrap()).unwrap();
        prop_assert_eq!(back, Real(x));
        let parsed = parse_real(&format_real(x)).unwrap();
        prop_assert!(parsed.to_bits() == x.to_bits() || (x.is_nan() && parsed.is_nan()));
    }

    #[test]
    fn polynomial_documents_round_trip_exactly(
        coeffs in prop::collection::vec((finite(), finite()), 1..6),
    ) {
        // Distinct monomials of degree 5 in two variables.
        let terms: Vec<Term> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &(re, im))| Term(0, vec![5 - j as u32, j as u32], re, im))
            .collect();
        let doc = PolyDocument { field: Field::Complex, n: 1, degrees: vec![5], terms };
        let text = to_json(&doc).unwrap();
        let back: PolyDocument = serde_json::from_str(&text).unwrap();
        for (a, b) in doc.terms.iter().zip(&back.terms) {
            prop_assert_eq!(a.2.to_bits(), b.2.to_bits());
            prop_assert_eq!(a.3.to_bits(), b.3.to_bits());
        }
        let sys = back.to_system().unwrap();
        let again = match &sys {
            nag_core::AnySystem::Complex(f) => PolyDocument::from_system(f),
            nag_core::AnySystem::Real(f) => PolyDocument::from_system(f),
        };
        let nonzero: Vec<&Term> = doc.terms.iter().filter(|t| t.2 != 0.0 || t.3 != 0.0).collect();
        prop_assert_eq!(again.terms.iter().collect::<Vec<_>>(), nonzero);
    }

    #[test]
    fn csv_tables_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<f64>(), 3), 0..20)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = CsvTable::new(["a", "b", "c"]);
        for r in &rows {
            t.push(r.iter().map(|&x| format_real(x)).collect());
        }
        t.write(&path).unwrap();
        let back = CsvTable::read(&path).unwrap();
        prop_assert_eq!(&back, &t);
        for (r, orig) in back.rows.iter().zip(&rows) {
            prop_assert_eq!(r.len(), back.header.len());
            for (s, x) in r.iter().zip(orig) {
                let y = parse_real(s).unwrap();
                prop_assert!(y.to_bits() == x.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }
}
