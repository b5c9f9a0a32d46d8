use nagfree_bench::export::{read_json, read_series_csv, RESULT_FILE, SERIES_FILE, TRACES_FILE, TRACE_HEADER};
use std::path::Path;
use std::process::{Command, Output};

fn nagfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nagfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn quadratic_run(out: &Path, solvers: &str, seeds: &str) -> Output {
    nagfree(&[
        "run",
        "--problem",
        "quadratic",
        "--spec",
        "1,5,1e4",
        "--solvers",
        solvers,
        "--iters",
        "100",
        "--seeds",
        seeds,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let o = quadratic_run(dir.path(), "nagfree_fixedL", "1");
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join(TRACES_FILE)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    assert_eq!(lines.count(), 101);
    assert!(dir.path().join(SERIES_FILE).is_file());
    assert!(dir.path().join(RESULT_FILE).is_file());
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(quadratic_run(a.path(), "nagfree,adgd", "1,2,3").status.success());
    assert!(quadratic_run(b.path(), "nagfree,adgd", "1,2,3").status.success());
    for file in [TRACES_FILE, SERIES_FILE] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn aggregated_band_matches_the_raw_traces() {
    let dir = tempfile::tempdir().unwrap();
    assert!(quadratic_run(dir.path(), "nagfree", "1,2,3").status.success());
    let result = read_json(&dir.path().join(RESULT_FILE)).unwrap();
    let f_star = result.f_star.unwrap();
    let series = result.series_for("nagfree").unwrap();
    let traces: Vec<_> = result.traces_for("nagfree").collect();
    assert_eq!(traces.len(), 3);
    for t in 0..series.mean.len() {
        let vals: Vec<f64> = traces.iter().map(|tr| tr.records[t].f_x - f_star).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(series.min[t], lo, "t = {t}");
        assert_eq!(series.max[t], hi, "t = {t}");
        assert!(lo <= series.mean[t] && series.mean[t] <= hi);
    }
    let csv = read_series_csv(&dir.path().join(SERIES_FILE)).unwrap();
    assert_eq!(csv[0].min, series.min);
    assert_eq!(csv[0].max, series.max);
}

#[test]
fn plot_of_a_run_is_well_formed_svg() {
    let dir = tempfile::tempdir().unwrap();
    assert!(quadratic_run(dir.path(), "nagfree,nag", "1").status.success());
    let svg = dir.path().join("plot.svg");
    for input in [SERIES_FILE, RESULT_FILE] {
        let o = nagfree(&[
            "plot",
            "--in",
            dir.path().join(input).to_str().unwrap(),
            "--out",
            svg.to_str().unwrap(),
            "--overlay-rate",
            "0.99",
        ]);
        assert!(o.status.success(), "{}", text(&o.stderr));
        let body = std::fs::read_to_string(&svg).unwrap();
        let doc = roxmltree::Document::parse(&body).unwrap();
        let means = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("mean"))
            .count();
        assert_eq!(means, 2);
    }
}

#[test]
fn verify_theory_exits_zero() {
    let o = nagfree(&["verify-theory"]);
    assert!(o.status.success(), "{}", text(&o.stdout));
    assert!(!text(&o.stdout).contains("[FAIL]"));
}

#[test]
fn list_names_every_solver_and_family() {
    let o = nagfree(&["list"]);
    assert!(o.status.success());
    let out = text(&o.stdout);
    for name in [
        "nagfree_fixedL",
        "nagfree_backtrack",
        "nagfree_restart",
        "tmm",
        "adgd_accel2",
        "nag_restart_backtrack",
    ] {
        assert!(out.contains(name), "{name}");
    }
    for family in ["quadratic", "logsumexp", "logistic", "cubic", "matfact"] {
        assert!(out.contains(family), "{family}");
    }
}

#[test]
fn missing_dataset_is_reported_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = nagfree(&[
        "run",
        "--problem",
        "logistic",
        "--dataset",
        "absent.libsvm",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("absent.libsvm"));
}

#[test]
fn data_directory_can_be_overridden() {
    let data = tempfile::tempdir().unwrap();
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_200x20.libsvm");
    std::fs::copy(&bundled, data.path().join("mine.libsvm")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nagfree"))
        .env("NAGFREE_DATA_DIR", data.path())
        .args([
            "run",
            "--problem",
            "logistic",
            "--dataset",
            "mine.libsvm",
            "--solvers",
            "nagfree",
            "--iters",
            "50",
            "--seeds",
            "1",
            "--out",
            out.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", text(&o.stderr));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(nagfree(&["run"]).status.code(), Some(2));
    assert_eq!(
        nagfree(&["run", "--problem", "quadratic", "--iters", "x"])
            .status
            .code(),
        Some(2)
    );
}
