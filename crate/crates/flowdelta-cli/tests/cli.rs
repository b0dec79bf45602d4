use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use flowdelta::io::{self, catalog, svg, table, RunSummary};

fn flowdelta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowdelta")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(err.lines().last().expect("stderr line")).expect("json error record")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.cfg");
    fs::write(
        &path,
        "system.a_exp = -1.5\nsystem.rho_bar = 5\nsource.pieces = 0:0\n\
         initial.left_rho = 3\ninitial.left_u = -3\ninitial.right_rho = 2\ninitial.right_u = -5\n\
         run.t_end = 40\noutput.kinds = profiles\n",
    )
    .unwrap();
    path
}

#[test]
fn case_id_reports_the_transition() {
    let o = flowdelta(&["case-id", "--a-exp", "-1.5", "--left-u", "-3", "--source", "0:0.1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Case 1; transition to Case 4 at t=30");
}

#[test]
fn case_id_without_source_has_no_transition() {
    let o = flowdelta(&["case-id", "--a-exp", "0.5", "--left-u", "3"]);
    assert_eq!(stdout(&o).trim(), "Case 22");
}

#[test]
fn parse_errors_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "# comment\nsystem.a_exp = -1.5\nsystem.rho_bar five\n").unwrap();
    let o = flowdelta(&["solve", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "parse");
    assert_eq!(rec["exit_code"], 2);
    assert!(rec["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn invalid_cfl_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = small_config(dir.path());
    let text = fs::read_to_string(&path).unwrap() + "run.cfl = 0.9\n";
    fs::write(&path, text).unwrap();
    let o = flowdelta(&["solve", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "validation");
}

#[test]
fn missing_delta_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = flowdelta(&["delta", "--entry", "case01_region_Ia", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "numerical");
}

#[test]
fn strict_regions_exit_4_on_unclassifiable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // The single cell centre is (ρ̄, −5).
    let args = ["regions", "--entry", "case01_regions", "--grid", "1", "--window", "10,-6,-4", "--out", out];
    assert_eq!(flowdelta(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    let o = flowdelta(&strict);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "unclassifiable");
}

#[test]
fn solve_writes_manifest_and_svg_regenerates_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    let o = flowdelta(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--time", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: RunSummary = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.manifest, ["profiles.csv", "profiles.svg", "summary.json"]);
    assert_eq!(summary.extracted_sequence, "S_a + C_0");
    assert_eq!(summary.sequences_agree, Some(true));
    assert!(summary.snapshots.iter().any(|s| s.t == 2.0));
    let rows: Vec<table::ProfileRow> = table::read_csv_file(&out.join("profiles.csv")).unwrap();
    let again = svg::profile_svg(&rows, &io::run::profile_title(&summary));
    assert_eq!(again, fs::read_to_string(out.join("profiles.svg")).unwrap());
}

#[test]
fn regions_svg_regenerates_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = flowdelta(&["regions", "--entry", "case13_regions", "--grid", "30", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let cells: Vec<table::RegionRow> = table::read_csv_file(&dir.path().join("regions_t0.csv")).unwrap();
    let curves: Vec<table::CurveRow> = table::read_csv_file(&dir.path().join("curves_t0.csv")).unwrap();
    assert_eq!(cells.len(), 900);
    let again = svg::state_space_svg(&cells, &curves, "Regions at t = 0");
    assert_eq!(again, fs::read_to_string(dir.path().join("regions_t0.svg")).unwrap());
}

#[test]
fn catalog_files_parse_back_to_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = flowdelta(&["catalog", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for e in catalog::catalog() {
        let text = fs::read_to_string(dir.path().join(format!("{}.cfg", e.name))).unwrap();
        assert_eq!(io::parse_config(&text).unwrap(), e.scenario, "{}", e.name);
    }
}

#[test]
fn scan_writes_one_table_per_time() {
    let dir = tempfile::tempdir().unwrap();
    let o = flowdelta(&["scan", "--entry", "case18_scan", "--grid", "12", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for t in ["0", "3", "6", "9"] {
        assert!(dir.path().join(format!("scan_t{t}.csv")).exists());
        assert!(dir.path().join(format!("scan_t{t}.svg")).exists());
    }
}

#[test]
fn check_is_reproducible() {
    let a = flowdelta(&["check", "--seed", "7", "--samples", "300"]);
    let b = flowdelta(&["check", "--seed", "7", "--samples", "300"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("0 failures"));
}

#[test]
fn batch_runs_a_filtered_subset() {
    let dir = tempfile::tempdir().unwrap();
    let o = flowdelta(&["batch", "--filter", "case04_region", "--summary-only", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("0 failed"));
    assert!(!text.contains("differs"));
    assert!(dir.path().join("case04_region_I0/summary.json").exists());
}
