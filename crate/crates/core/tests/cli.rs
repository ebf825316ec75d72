use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use expsum::cli::{read_signal_csv, write_signal_csv, FitReport};
use expsum::inner::ExpoPolyTerm;
use expsum::{SampledSignal, Signal};
use num_complex::Complex64;

fn expsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Stdout of `fit` without `--out`: the report followed by a summary line.
fn report_body(text: &str) -> &str {
    text.trim_end().rsplit_once('\n').unwrap().0
}

fn write_constant_csv(path: &Path, points: usize) {
    let s = SampledSignal::from_fn(points, |_| Complex64::new(1.0, 0.0)).unwrap();
    write_signal_csv(path, &s).unwrap();
}

fn parse_surface(text: &str) -> Vec<[f64; 3]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,phi"));
    lines
        .map(|l| {
            let cols: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [cols[0], cols[1], cols[2]]
        })
        .collect()
}

#[test]
fn reproduce_passes_and_lists_both_spectrum_points() {
    let out = expsum(&["reproduce"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}{}", stderr(&out));
    assert!(text.contains("phi(+i v0)") && text.contains("phi(-i v0)"));
    assert!(text.contains("0.7420192964"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn reproduce_with_perturbation_exits_one() {
    let out = expsum(&["reproduce", "--perturb", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn fit_sign_one_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fit.toml");
    let out = expsum(&["fit", "--signal", "sign", "--n", "1", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("f_min = 0.47493"));

    let report = FitReport::from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!((report.f_min - 0.47494).abs() < 1e-5);
    assert!((report.rms_deflection.powi(2) - report.f_min).abs() < 1e-12);
    assert_eq!((report.n, report.seed, report.starts), (1, 7, 32));
    assert_eq!(report.signal, "sign");
    assert_eq!(report.lambdas.len(), 1);
    assert_eq!(report.coefficients.len(), 1);
    assert!(report.evaluations > 0);
}

#[test]
fn fit_two_frequencies_reaches_cluster_value() {
    let out = expsum(&["fit", "--signal", "sign", "--n", "2", "--starts", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let report = FitReport::from_toml(report_body(&stdout(&out))).unwrap();
    assert!(report.f_min <= 0.251, "{}", report.f_min);
}

#[test]
fn fit_constant_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("const1.csv");
    write_constant_csv(&csv, 401);
    let arg = format!("csv:{}", csv.display());
    let out = expsum(&["fit", "--signal", &arg, "--n", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = FitReport::from_toml(report_body(&stdout(&out))).unwrap();
    assert!(report.f_min <= 1e-8);
    assert!(report.signal.starts_with("csv:"));
}

#[test]
fn malformed_csv_reports_line_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "x,f_re,f_im\n-3.14159,1,0\n0,abc,0\n").unwrap();
    let out = expsum(&["fit", "--signal", &format!("csv:{}", csv.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    fs::write(&csv, "t,re,im\n0,0,0\n").unwrap();
    let out = expsum(&["fit", "--signal", &format!("csv:{}", csv.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"));

    // Parses, but the grid is not uniform on [-pi, pi].
    fs::write(&csv, "x,f_re,f_im\n-1,0,0\n0,0,0\n1,0,0\n2,0,0\n3,0,0\n").unwrap();
    let out = expsum(&["fit", "--signal", &format!("csv:{}", csv.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed signal"));

    let out = expsum(&["fit", "--signal", "csv:/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_flags_exit_two() {
    assert_eq!(expsum(&["fit", "--n", "zero"]).status.code(), Some(2));
    assert_eq!(expsum(&["fit", "--signal", "triangle"]).status.code(), Some(2));
    assert_eq!(expsum(&["fit", "--n", "0"]).status.code(), Some(2));
    assert_eq!(expsum(&["phi-map", "--n", "3", "--u", "0:0:1", "--v", "0:0:1"]).status.code(), Some(2));
    assert_eq!(expsum(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn phi_map_single_points() {
    let out = expsum(&["phi-map", "--signal", "sign", "--n", "1", "--u", "0:0:1", "--v", "0.742019:0.742019:1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = parse_surface(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2] - 0.4749383).abs() < 1e-6);

    let out = expsum(&["phi-map", "--n", "1", "--u", "0:0:1", "--v", "1:1:1"]);
    let rows = parse_surface(&stdout(&out));
    assert!((rows[0][2] - 0.594715).abs() < 1e-6);

    let out = expsum(&["phi-map", "--n", "2cluster", "--u", "0:0:1", "--v", "1e-4:1e-4:1"]);
    let rows = parse_surface(&stdout(&out));
    assert!((rows[0][2] - 0.25).abs() < 1e-6);
}

#[test]
fn phi_map_grid_dimensions_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surface.csv");
    let out = expsum(&[
        "phi-map", "--n", "1", "--u", "-1:1:4", "--v", "-2:2:5", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let rows = parse_surface(&text);
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0][..2], [-1.0, -2.0]);
    assert_eq!(rows[1][..2], [-1.0, -1.0]);
    assert_eq!(rows[5][..2], [-1.0 + 2.0 / 3.0, -2.0]);
    assert_eq!(rows[19][..2], [1.0, 2.0]);
    // 17 significant digits in scientific notation
    let first_value = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    let mantissa = first_value.split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn phi_map_rejects_non_positive_steps() {
    for bad in ["0:1:0", "0:1:-2"] {
        let out = expsum(&["phi-map", "--n", "1", "--u", bad, "--v", "0:1:2"]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn explore_flags_counterexample() {
    let out = expsum(&["explore", "--u", "0:0:1", "--v", "-1:1:3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("COUNTEREXAMPLE"));
}

#[test]
fn csv_round_trip_preserves_moments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("signal.csv");
    let original = SampledSignal::from_fn(1001, |x| Complex64::new((3.0 * x).sin() + 0.1 * x, x.cos())).unwrap();
    write_signal_csv(&path, &original).unwrap();
    let reread = read_signal_csv(&path).unwrap();
    let original = Signal::Sampled(original);
    for (degree, lambda) in [(0, Complex64::new(0.3, 1.1)), (1, Complex64::new(-0.8, 2.0)), (2, Complex64::new(0.0, 0.5))] {
        let t = ExpoPolyTerm::new(degree, lambda).unwrap();
        let a = original.moment(&t).unwrap();
        let b = reread.moment(&t).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
    assert_eq!(original, reread);
}
