use std::io::{Cursor, Write};
use std::process::{Command, Stdio};

use jsray_cli::{run, Output};

const TWO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/two_cylinders.surf");
const SCALED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/two_cylinders_scaled.surf");
const SPLIT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/split_gluing.surf");

fn jsray(args: &[&str]) -> Output {
    jsray_stdin(args, "")
}

fn jsray_stdin(args: &[&str], stdin: &str) -> Output {
    let mut all = vec!["jsray"];
    all.extend_from_slice(args);
    run(all, &mut Cursor::new(stdin.as_bytes().to_vec()))
}

fn value<'a>(out: &'a Output, key: &str) -> &'a str {
    out.stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {}", out.stdout))
}

fn number(out: &Output, key: &str) -> f64 {
    value(out, key).split(" ; ").next().unwrap().parse().unwrap()
}

#[test]
fn limit_distance_example() {
    let out = jsray(&["limit-distance", "--m", "1,2", "--mp", "2,2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "limit = 0.34657359027997264 ; cite = Thm-main\n");
    assert_eq!(number(&out, "limit"), 0.5 * 2f64.ln());
}

#[test]
fn detour_of_equal_vectors_is_zero() {
    let out = jsray(&["detour", "--m", "1,2", "--mp", "1,2"]);
    assert_eq!(out.stdout, "detour = 0 ; cite = Thm-detour\n");
}

#[test]
fn classify_positive_intersection_diverges() {
    let out = jsray(&["classify", "--relation", "not-top-equiv-positive"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("verdict = Divergent ; cite = Ivanov\n"), "{}", out.stdout);
}

#[test]
fn classify_from_surfaces() {
    let out = jsray(&["classify", TWO, SCALED]);
    assert_eq!(value(&out, "verdict"), "Asymptotic ; cite = Cor-asymptotic");
    assert_eq!(value(&out, "lambda"), "3 ; cite = Def-modular");
    let out = jsray(&["classify", TWO, SPLIT]);
    assert_eq!(value(&out, "verdict"), "BoundedNotAsymptotic ; cite = Cor-asymptotic");
    let out = jsray(&["classify", "--m", "1,2", "--mp", "2,4"]);
    assert_eq!(value(&out, "verdict"), "BoundedNotAsymptotic ; cite = Cor-asymptotic");
    let out = jsray(&["classify", "--m", "1,2", "--mp", "2,4", "--endpoints-equal"]);
    assert_eq!(value(&out, "verdict"), "Asymptotic ; cite = Cor-asymptotic");
}

#[test]
fn inconsistent_flags_are_validation_errors() {
    let out = jsray(&["classify", "--relation", "not-top-equiv-zero", "--modular", "true"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("error = InconsistentFlags ; message = "), "{}", out.stdout);
    assert_eq!(out.stdout.lines().count(), 1);
}

#[test]
fn optimal_shift_and_detour_agree() {
    let shift = jsray(&["optimal-shift", "--m", "1,2,5", "--mp", "2,2,1"]);
    let detour = jsray(&["detour", "--m", "1,2,5", "--mp", "2,2,1"]);
    assert!((number(&shift, "min_value") - number(&detour, "detour") / 2.0).abs() < 1e-15);
}

#[test]
fn fixture_has_moduli_one_and_two() {
    let out = jsray(&["flow", TWO, "--t", "0"]);
    assert_eq!((number(&out, "c1.modulus"), number(&out, "c2.modulus")), (1.0, 2.0));
}

#[test]
fn flow_doubles_time() {
    let out = jsray(&["flow", TWO, "--t", &std::f64::consts::LN_2.to_string()]);
    assert_eq!(number(&out, "c1.circumference"), 0.5);
    assert_eq!(number(&out, "c1.modulus"), 4.0);
    assert_eq!(number(&out, "c2.modulus"), 8.0);
    assert_eq!(number(&out, "area"), 3.0);
    assert_eq!(jsray(&["flow", TWO, "--t", "-1"]).code, 1);
}

#[test]
fn endpoints() {
    let out = jsray(&["endpoint", TWO]);
    assert!(out.stdout.contains("endpoint v1\nnode 0 label=c1 disks=lower,upper\n"));
    let eq = |a: &str, b: &str, extra: &[&str]| {
        let mut args = vec!["endpoints-equal", a, b];
        args.extend_from_slice(extra);
        value(&jsray(&args), "endpoints_equal").to_string()
    };
    assert_eq!(eq(TWO, SCALED, &[]), "true ; cite = Prop-endpoint");
    assert_eq!(eq(TWO, TWO, &["--t1", "1.7"]), "true ; cite = Prop-endpoint");
    assert_eq!(eq(TWO, SPLIT, &[]), "false ; cite = Prop-endpoint");
}

#[test]
fn extremal_commands() {
    let out = jsray(&["e-functional", TWO, "--curve", "cross"]);
    assert_eq!(value(&out, "e_squared"), "3 ; cite = Thm-extremal-limit");
    let out = jsray(&["e-functional", "--m", "1,2", "--i", "1/2,1"]);
    assert_eq!(value(&out, "e_squared"), "9/4 ; cite = Thm-extremal-limit");
    assert_eq!(number(&out, "e"), 1.5);

    let out = jsray(&["sup-ratio", "--m", "1,2", "--mp", "3,2", "--oracle", "--samples", "500", "--seed", "9"]);
    assert_eq!(number(&out, "sup_ratio"), 3.0);
    assert_eq!(number(&out, "oracle_gap"), 0.0);

    let out = jsray(&["length-area", TWO, "--i", "2,1"]);
    assert_eq!(value(&out, "tight"), "false ; cite = Length-area");
    assert!(number(&out, "bound") < number(&out, "e_squared"));
}

#[test]
fn qc_trajectory_table() {
    let out = jsray(&["qc-trajectory", "--M", "2", "--m", "1", "--eps", "0.3", "--t-grid", "2:8:1"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let target = number(&out, "limit_target");
    let rows: Vec<Vec<&str>> = out
        .stdout
        .lines()
        .skip_while(|l| !l.starts_with("# t"))
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert_eq!(row[3].parse::<f64>().unwrap(), target);
    }
    let out = jsray(&["qc-trajectory", "--M", "2", "--m", "1", "--psi", "0.5:0.5,-0.2", "--t-grid", "1:3:1", "--scan", "16"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(number(&out, "scan_max_dilatation") >= 1.0);
    let bad = jsray(&["qc-trajectory", "--M", "2", "--m", "1", "--eps", "1.5", "--t-grid", "1:3:1"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.starts_with("error = DomainError"));
}

#[test]
fn diagram_check() {
    let out = jsray(&["diagram-check", "--a", "2", "--b", "3", "--t", "1"]);
    assert_eq!(number(&out, "half_modulus"), 0.75);
    assert!(number(&out, "sup_error") < 1e-12);
}

#[test]
fn spec_errors_are_single_lines() {
    let out = jsray_stdin(&["flow", "-", "--t", "1"], "");
    assert_eq!(out.stdout, "error = SemanticError ; message = (line 0): no cylinders\n");
    assert_eq!(out.code, 1);
    let text = "cylinder c a=1 b=1\nsegment t cyl=c side=top off=0 len=1\nsegment b cyl=c side=bottom off=0 len=1/2\n\
segment b2 cyl=c side=bottom off=1/2 len=1/2\nglue t b sign=+\n";
    let out = jsray_stdin(&["endpoint", "-"], text);
    assert!(out.stdout.starts_with("error = SemanticError ; message = (line 5): PairingError"), "{}", out.stdout);
    let out = jsray_stdin(&["endpoint", "-"], "cylinder c a=1\n");
    assert!(out.stdout.starts_with("error = SyntaxError ; message = (line 1)"), "{}", out.stdout);
    let out = jsray(&["flow", "/nonexistent/file.surf", "--t", "1"]);
    assert!(out.stdout.starts_with("error = IoError"));
}

#[test]
fn usage_errors() {
    for args in [&["limit-distance", "--m", "1,2"][..], &["limit-distance", "--m", "1,x", "--mp", "1,2"], &["bogus"], &["limit-distance", "--m", "1,0", "--mp", "1,2"]] {
        let out = jsray(args);
        assert_eq!(out.code, 1, "{args:?}");
        assert_eq!(out.stdout.lines().count(), 1, "{}", out.stdout);
        assert!(out.stdout.starts_with("error = "));
    }
}

#[test]
fn text_format() {
    let out = jsray(&["--format", "text", "optimal-shift", "--m", "1,2", "--mp", "2,2"]);
    assert!(out.stdout.lines().all(|l| l.ends_with("[Prop-optimal-shift]")), "{}", out.stdout);
}

#[test]
fn deterministic_output() {
    let args = ["sup-ratio", "--m", "1,2,3", "--mp", "3,1,2", "--oracle", "--samples", "2000", "--seed", "42"];
    assert_eq!(jsray(&args), jsray(&args));
    let args = ["qc-trajectory", "--M", "0.5", "--m", "0.7", "--c-re", "-1", "--c-im", "0.5", "--t-grid", "0:4:0.5"];
    assert_eq!(jsray(&args), jsray(&args));
}

#[test]
fn binary_reads_stdin_and_sets_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_jsray");
    let mut child = Command::new(exe).args(["endpoint", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(std::fs::read(TWO).unwrap().as_slice()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("endpoint v1"));

    let out = Command::new(exe).args(["detour", "--m", "1", "--mp", "1,2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "error = LengthMismatch ; message = 1 vs 2 entries\n");
}
