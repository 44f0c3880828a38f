use std::path::PathBuf;
use std::process::{Command, Output};

use tmesh_dim::analysis::{StabilityReport, Verdict};
use tmesh_dim::cli::{report_from_text, AnalyzeOutput};
use tmesh_dim::linalg::{rank, RationalMatrix};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmesh-dim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SPEC_3322: [&str; 8] = ["--d1", "3", "--d2", "3", "--alpha", "2", "--beta", "2"];

fn with_spec<'a>(head: &[&'a str], spec: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(spec).copied().collect()
}

#[test]
fn analyze_pinwheel_reports_49() {
    let p = fixture("pinwheel.json");
    let o = run(&with_spec(&["analyze", p.to_str().unwrap()], &SPEC_3322));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: AnalyzeOutput = report_from_text(&stdout(&o)).unwrap();
    assert_eq!((rep.report.rank, rep.report.dimension), (15, 49));
}

#[test]
fn json_and_text_carry_the_same_numbers() {
    let p = fixture("pinwheel.json");
    let mut base = with_spec(&["analyze", p.to_str().unwrap()], &SPEC_3322);
    base.extend(["--trials", "3", "--seed", "11"]);
    let text = run(&[base.clone(), vec!["--text"]].concat());
    let json = run(&[base, vec!["--json"]].concat());
    let a: AnalyzeOutput = report_from_text(&stdout(&text)).unwrap();
    let b: AnalyzeOutput = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(a, b);
    let g = a.report.generic_rank.unwrap();
    assert_eq!((g.value, g.trials, g.seed), (16, 3, 11));
}

#[test]
fn diag_reports_order_for_diagonalizable_mesh() {
    let p = fixture("diagonalizable.json");
    let o = run(&with_spec(&["diag", p.to_str().unwrap()], &SPEC_3322));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out
        .lines()
        .find(|l| l.starts_with("diagonalizable:"))
        .unwrap();
    assert!(line.starts_with("diagonalizable: yes, order: "), "{line}");
    assert_eq!(line.split_whitespace().count(), 3 + 4);
}

#[test]
fn diag_rejects_pinwheel_without_rays() {
    let p = fixture("pinwheel_no_rays.json");
    let o = run(&[
        "diag",
        p.to_str().unwrap(),
        "--d1",
        "3",
        "--d2",
        "3",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("diagonalizable: no"));
}

#[test]
fn stability_flags_pinwheel_and_prints_seed() {
    let p = fixture("pinwheel.json");
    let o = run(&with_spec(&["stability", p.to_str().unwrap()], &SPEC_3322));
    assert_eq!(o.status.code(), Some(0));
    let rep: StabilityReport = report_from_text(&stdout(&o)).unwrap();
    assert_eq!(rep.verdict, Verdict::Unstable);
    assert_eq!(
        (rep.rank_at_knots, rep.generic_rank, rep.trials, rep.seed),
        (15, 16, 5, 0)
    );
}

#[test]
fn rank_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("m.txt");
    let p = fixture("pinwheel.json");
    let o = run(&with_spec(
        &[
            "rank",
            p.to_str().unwrap(),
            "--dump",
            dump.to_str().unwrap(),
        ],
        &SPEC_3322,
    ));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o)
        .lines()
        .any(|l| l.split_whitespace().eq(["rank", "15"])));
    let m = RationalMatrix::from_dump(&std::fs::read_to_string(dump).unwrap()).unwrap();
    assert_eq!((m.rows(), m.cols(), rank(&m)), (16, 16, 15));
}

#[test]
fn oracle_compare_fifty_random_meshes() {
    let o = run(&[
        "oracle-compare",
        "--d1",
        "2",
        "--d2",
        "2",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("seed 0"));
    assert_eq!(out.lines().last(), Some("50/50 match"));
}

#[test]
fn oracle_compare_on_files() {
    let a = fixture("small_reduced.json");
    let b = fixture("pinwheel.json");
    let o = run(&with_spec(
        &["oracle-compare", a.to_str().unwrap(), b.to_str().unwrap()],
        &SPEC_3322,
    ));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2/2 match");
}

#[test]
fn gen_output_is_a_valid_mesh_and_reproducible() {
    let a = run(&["gen", "--seed", "42", "--max-splits", "8"]);
    let b = run(&["gen", "--seed", "42", "--max-splits", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).contains("seed: 42"));
    let m = tmesh_dim::mesh::parse_tmesh(&stdout(&a)).unwrap();
    tmesh_dim::mesh::validate(&m).unwrap();
    let pin = run(&["gen", "--pinwheel"]);
    let expected = std::fs::read_to_string(fixture("pinwheel.json")).unwrap();
    assert_eq!(stdout(&pin), expected);
}

#[test]
fn render_matches_golden_file() {
    let p = fixture("pinwheel.json");
    let o = run(&["render", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixture("pinwheel.svg")).unwrap();
    assert_eq!(stdout(&o), golden);
    assert_eq!(golden.matches("class=\"interior\"").count(), 4);
}

#[test]
fn unreadable_file_exits_1() {
    let o = run(&with_spec(&["analyze", "/no/such/mesh.json"], &SPEC_3322));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn malformed_and_invalid_meshes_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = run(&with_spec(&["analyze", bad.to_str().unwrap()], &SPEC_3322));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);

    // Two faces leaving a hole in the bounding box.
    let holed = dir.path().join("hole.json");
    std::fs::write(
        &holed,
        r#"{"x_knots": [0, 1, 2], "y_knots": [0, 1, 2], "faces": [[0, 1, 0, 1], [1, 2, 1, 2]]}"#,
    )
    .unwrap();
    let o = run(&with_spec(
        &["analyze", holed.to_str().unwrap()],
        &SPEC_3322,
    ));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_spec_and_unknown_flag_exit_2() {
    let p = fixture("pinwheel.json");
    let o = run(&[
        "analyze",
        p.to_str().unwrap(),
        "--d1",
        "2",
        "--d2",
        "2",
        "--alpha",
        "2",
        "--beta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&with_spec(
        &["analyze", p.to_str().unwrap(), "--frobnicate"],
        &SPEC_3322,
    ));
    assert_eq!(o.status.code(), Some(2));
}
