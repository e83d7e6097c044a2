use std::path::Path;
use std::process::{Command, Output};

use ssrlsc::datamodel::load_cube;
use ssrlsc::eig::Projection;

fn ssrlsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssrlsc"))
        .args(args)
        .output()
        .expect("spawn ssrlsc")
}

fn ok(args: &[&str]) -> String {
    let out = ssrlsc(args);
    assert!(
        out.status.success(),
        "ssrlsc {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let hdr = dir.join("cube.hdr");
    let labels = dir.join("labels.csv");
    ok(&["synth", "--out-cube", s(&hdr), "--out-labels", s(&labels), "--seed", "3"]);
    (hdr, labels)
}

#[test]
fn synth_convert_inspect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (hdr, labels) = synth(dir.path());
    let big = dir.path().join("big.hdr");
    ok(&[
        "convert", "--input", s(&hdr), "--output", s(&big), "--dtype", "f64", "--byte-order", "big", "--interleave", "bip",
    ]);
    let a = load_cube(&hdr).unwrap();
    let b = load_cube(&big).unwrap();
    assert_eq!(a, b);

    let text = ok(&["inspect", "--cube", s(&big), "--labels", s(&labels)]);
    assert!(text.contains("bands: 16"));
    assert!(text.contains("byte_order: big"));
    assert!(text.contains("interleave: bip"));
    assert!(text.contains("classes: 3"));
}

#[test]
fn run_writes_csv_and_reuses_saved_model() {
    let dir = tempfile::tempdir().unwrap();
    let (hdr, labels) = synth(dir.path());
    let csv = dir.path().join("out.csv");
    let model = dir.path().join("proj.txt");
    let summary = ok(&[
        "run", "--cube", s(&hdr), "--labels", s(&labels), "--dim", "2,4", "--runs", "2", "--no-timing",
        "--csv-out", s(&csv), "--model-out", s(&model),
    ]);
    assert!(summary.contains("ssrlsc"), "summary: {summary}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "axis,run,dim,oa,aa,kappa,seconds");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("none,0,2,"));

    let proj = Projection::load(&model).unwrap();
    assert_eq!((proj.input_dim(), proj.output_dim()), (16, 4));
    assert!(dir.path().join("proj.txt.svm").exists());

    // the saved projection is the run-0 projection, so run 0 reproduces
    let csv2 = dir.path().join("again.csv");
    ok(&[
        "run", "--cube", s(&hdr), "--labels", s(&labels), "--dim", "2,4", "--runs", "1", "--no-timing",
        "--csv-out", s(&csv2), "--model-in", s(&model),
    ]);
    let again = std::fs::read_to_string(&csv2).unwrap();
    assert_eq!(again.lines().collect::<Vec<_>>(), lines[..3].to_vec());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (hdr, labels) = synth(dir.path());
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "# experiment\nmethod = rlsc\ndim = 2-3\nruns: 1\nno_timing = true\n").unwrap();
    let csv = dir.path().join("a.csv");
    ok(&["run", "--cube", s(&hdr), "--labels", s(&labels), "--config", s(&cfg), "--csv-out", s(&csv)]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 2);

    let csv = dir.path().join("b.csv");
    ok(&[
        "run", "--cube", s(&hdr), "--labels", s(&labels), "--config", s(&cfg), "--dim", "2", "--csv-out", s(&csv),
    ]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 1);
}

#[test]
fn sweep_labels_rows_by_value() {
    let dir = tempfile::tempdir().unwrap();
    let (hdr, labels) = synth(dir.path());
    let csv = dir.path().join("sweep.csv");
    ok(&[
        "sweep", "--cube", s(&hdr), "--labels", s(&labels), "--axis", "window", "--values", "1,3", "--dim", "2",
        "--runs", "2", "--no-timing", "--csv-out", s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let axes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(axes, ["window=1", "window=1", "window=3", "window=3"]);
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let (hdr, labels) = synth(dir.path());
    let out = ssrlsc(&["run", "--cube", s(&hdr), "--labels", s(&labels), "--train-per-class", "500"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("split"), "stderr: {err}");

    let out = ssrlsc(&["inspect", "--cube", s(&dir.path().join("missing.hdr"))]);
    assert!(!out.status.success());
}
