//! The `fibertrack` binary and the on-disk series format.

use std::path::Path;
use std::process::{Command, Output};

use fibertrack::datagen::{gen_separating_blobs, SyntheticSpec};
use fibertrack::io::{load_series, save_series};
use fibertrack::report::DISTANCE_HEADER;
use fibertrack::Error;

fn fibertrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibertrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = fibertrack(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_paraboloid(dir: &Path) -> String {
    ok(&["gen", "--kind", "translated-paraboloid", "--dims", "7,7,7", "--out", s(dir)]);
    s(&dir.join("series.json")).to_string()
}

#[test]
fn series_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = SyntheticSpec::separating_blobs();
    spec.dims = [6, 5, 4];
    spec.n_sites = 3;
    let series = gen_separating_blobs(&spec).unwrap().series;
    let manifest = save_series(&series, tmp.path()).unwrap();
    assert_eq!(load_series(&manifest).unwrap(), series);
}

#[test]
fn truncated_raw_file_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let mut spec = SyntheticSpec::separating_blobs();
    spec.dims = [4, 4, 4];
    spec.n_sites = 2;
    let manifest = save_series(&gen_separating_blobs(&spec).unwrap().series, tmp.path()).unwrap();
    let raw = tmp.path().join("frame0001_z.raw");
    let bytes = std::fs::read(&raw).unwrap();
    std::fs::write(&raw, &bytes[..bytes.len() - 8]).unwrap();
    match load_series(&manifest) {
        Err(Error::Truncated { expected, found, .. }) => assert_eq!(expected, found + 8),
        other => panic!("expected Truncated, got {other:?}"),
    }
}

#[test]
fn gen_writes_split_site() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&["gen", "--kind", "separating-blobs", "--out", s(tmp.path())]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "split_site 10");
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["split_site"], 10);
}

#[test]
fn gen_accepts_negative_array_flags() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "gen", "--kind", "separating-blobs", "--dims", "8,8,8", "--n-sites", "3",
        "--centers-start", "-0.5,0,0,0.5,0,0", "--centers-end", "-2,0,0,2,0,0",
        "--domain", "-3,3", "--sigma", "0.8", "--out", s(tmp.path()),
    ]);
    let series = load_series(tmp.path().join("series.json")).unwrap();
    assert_eq!(series.len(), 3);
    assert_eq!(series.frames()[0].grid().origin(), [-3.0; 3]);
    assert_eq!(fibertrack(&["gen", "--kind", "separating-blobs", "--dims", "8,8", "--out", "x"]).status.code(), Some(2));
}

#[test]
fn compare_writes_one_row_per_pair_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_paraboloid(&tmp.path().join("series"));
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    let svg = tmp.path().join("a.svg");
    let common = ["compare", "--series", &manifest, "--slab-widths", "2,2"];
    ok(&[&common[..], &["--out", s(&a), "--svg", s(&svg)]].concat());
    ok(&[&common[..], &["--out", s(&b)]].concat());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], DISTANCE_HEADER);
    assert_eq!(lines.len(), 21);
    assert!(!text.contains('\r'));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 12);
        assert!(line.split(',').skip(3).all(|c| c.parse::<f64>().is_ok()), "{line}");
    }
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg"));
    for m in ["d1", "dqS", "kl", "rms"] {
        assert!(svg.contains(&format!("data-metric=\"{m}\"")), "{m}");
    }
}

#[test]
fn compare_metric_subset_leaves_empty_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_paraboloid(&tmp.path().join("series"));
    let csv = tmp.path().join("d.csv");
    ok(&[
        "compare", "--series", &manifest, "--bin-counts", "4,4", "--metrics", "dqS,rms", "--q", "inf",
        "--out", s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "");
    assert!(row[6].parse::<f64>().is_ok());
    assert!(row[11].parse::<f64>().is_ok());
}

#[test]
fn histogram_and_jacobi_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = small_paraboloid(&tmp.path().join("series"));
    let frame = format!("{manifest}#10");
    let (h, j) = (tmp.path().join("h.csv"), tmp.path().join("j.csv"));
    ok(&["histogram", "--frame", &frame, "--bin-counts", "5,5", "--out", s(&h)]);
    ok(&["jacobi", "--frame", &frame, "--bin-counts", "5,5", "--out", s(&j)]);
    let h = std::fs::read_to_string(h).unwrap();
    assert!(h.starts_with("i1,i2,lo1,lo2,count,measure,singular\n"));
    assert!(h.lines().count() > 1);
    let j = std::fs::read_to_string(j).unwrap();
    assert!(j.starts_with("kind,id,i1,i2\n"));
    assert!(j.lines().any(|l| l.starts_with("bin,")));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(fibertrack(&["compare", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(fibertrack(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        fibertrack(&["compare", "--series", "x", "--out", "y", "--slab-widths", "1", "--bin-counts", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn pipeline_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.json");
    let out = fibertrack(&["compare", "--series", s(&missing), "--out", s(&tmp.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fibertrack: error:"));
    let manifest = small_paraboloid(&tmp.path().join("series"));
    let out = fibertrack(&["histogram", "--frame", &format!("{manifest}#99"), "--out", s(&tmp.path().join("h.csv"))]);
    assert_eq!(out.status.code(), Some(1));
}
