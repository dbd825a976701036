use std::io::Write as _;
use std::process::{Command, Output};

use cbundle::manifest::csv_body;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbundle")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap_or_else(|| panic!("no `{key}` in\n{text}")).trim()
}

#[test]
fn analyze_fermat_cubic() {
    let out = stdout(&["analyze", &data("fermat.surface")]);
    assert_eq!(field(&out, "smooth:"), "true");
    assert_eq!(field(&out, "deg_delta:"), "5");
    assert_eq!(field(&out, "complexity:"), "2");
    assert_eq!(field(&out, "rho:"), "4");
    assert_eq!(field(&out, "K^2:"), "3");
    assert!(out.starts_with("# command: analyze\n# input_sha256: "));
}

#[test]
fn singular_surface_stops_after_the_smoothness_check() {
    let out = stdout(&["analyze", &data("singular.surface")]);
    assert_eq!(field(&out, "smooth:"), "false");
    assert!(!out.contains("complexity:"));
}

#[test]
fn malformed_file_is_an_input_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "a: 0 0 1\ne: 1\nf 0 0 : 3 0 1").unwrap();
    let out = run(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("needs 2 coefficients"), "{err}");
}

#[test]
fn missing_file_is_an_input_error() {
    assert_eq!(run(&["analyze", &data("no_such.surface")]).status.code(), Some(2));
}

#[test]
fn densities_agree_with_the_oracle() {
    let out = stdout(&["densities", "1 0 1 0 0 -1", "--p", "2", "3", "5", "7"]);
    let rows: Vec<Vec<String>> =
        csv_body(&out).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "-");
    for r in &rows[1..] {
        assert_eq!(r[2], r[3], "{r:?}");
    }
    assert_eq!(rows[1][2], "8/9");
}

#[test]
fn degenerate_form_is_rejected() {
    assert_eq!(run(&["densities", "1 1 -1 0 0 0", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn count_does_not_depend_on_workers() {
    let f = data("fermat.surface");
    let args = |w| ["count", f.as_str(), "--B", "100", "200", "400", "--base", "1", "-3", "--skip-density", "--workers", w];
    let one = csv_body(&stdout(&args("1")));
    let two = csv_body(&stdout(&args("2")));
    assert_eq!(one, two);
    let n: Vec<u64> = one.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(n.windows(2).all(|w| w[0] <= w[1]), "{n:?}");
}

#[test]
fn exact_and_float_detector_sums_agree() {
    let f = data("fermat.surface");
    let exact = csv_body(&stdout(&["detector", &f, "--B", "300", "--base", "1", "-3", "--exact"]));
    let float = csv_body(&stdout(&["detector", &f, "--B", "300", "--base", "1", "-3"]));
    let ratio = |s: &str| s.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse::<f64>().unwrap();
    assert!((ratio(&exact) - ratio(&float)).abs() <= 1e-12 * ratio(&exact).abs());
}

#[test]
fn degree_five_classification_summary() {
    let out = stdout(&["dp", "classify", "--degree", "5"]);
    assert_eq!(csv_body(&out).lines().last(), Some("summary,19,11,4,11"));
    assert!(!out.contains("orbit criterion disagrees"));
}

#[test]
fn degree_three_needs_the_deep_flag() {
    let out = run(&["dp", "classify", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("resource limit"));
}

#[test]
fn bundle_model_for_degree_three() {
    let out = stdout(&["dp", "model", "--degree", "3"]);
    assert_eq!(out.lines().next(), Some("(0,0,1) (1,2) M"));
    assert_eq!(run(&["dp", "model", "--degree", "9"]).status.code(), Some(2));
}

#[test]
fn common_zero_of_the_quadrics_is_not_del_pezzo() {
    let out = stdout(&["dp", "check", "--degree", "2", &data("dp2_common_zero.surface")]);
    assert!(field(&out, "verdict:").starts_with("no"), "{out}");
}
