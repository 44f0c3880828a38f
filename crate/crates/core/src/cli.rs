//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable file, 2 usage, parse or validation
//! failure, 3 oracle mismatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::{
    check_mono_vertex_condition, dim_general, dim_general_with, is_diagonalizable,
    new_vertex_vector, stability_verdict, AnalysisError, DimOptions, DimensionReport,
    StabilityReport,
};
use crate::conformality::assemble_from_topology;
use crate::gen::{pinwheel_counterexample, random_tmesh};
use crate::linalg::rank;
use crate::mesh::{
    extract_topology, parse_tmesh, reduce_subdivision, validate, LEdge, LEdgeKind, Orientation,
    Rational, SplineSpaceSpec, Subdivision, TMesh, Topology,
};
use crate::oracle::dim_direct;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNREADABLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tmesh-dim",
    version,
    about = "Spline space dimensions over T-meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct SpecArgs {
    #[arg(long)]
    d1: usize,
    #[arg(long)]
    d2: usize,
    #[arg(long)]
    alpha: usize,
    #[arg(long)]
    beta: usize,
}

#[derive(Args, Debug, Clone, Copy)]
struct FormatArgs {
    /// Emit JSON.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit aligned `key value` lines (default).
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension report for a mesh.
    Analyze {
        mesh: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        format: FormatArgs,
        /// Also probe the generic rank with this many random knot samples.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Diagonalizability decision with an l-edge order.
    Diag {
        mesh: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Compares the rank at the given knots with the sampled generic rank.
    Stability {
        mesh: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        format: FormatArgs,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank of the conformality matrix.
    Rank {
        mesh: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        /// Write the matrix to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Checks the cofactor route against the brute-force oracle.
    OracleCompare {
        /// Meshes to check; random meshes are generated when none are given.
        meshes: Vec<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_splits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a random mesh (or the pinwheel) in mesh file format.
    Gen {
        #[arg(long, default_value_t = 10)]
        max_splits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pinwheel: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// SVG drawing of a mesh.
    Render {
        mesh: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Analysis output: the spline space parameters and every field of the dimension report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    #[serde(flatten)]
    pub spec: SplineSpaceSpec,
    #[serde(flatten)]
    pub report: DimensionReport,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure::new(EXIT_INVALID, e.to_string())
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_UNREADABLE, format!("cannot write output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| {
        Failure::new(
            EXIT_UNREADABLE,
            format!("cannot write {}: {e}", path.display()),
        )
    })
}

fn spec_of(a: SpecArgs) -> Result<SplineSpaceSpec, Failure> {
    SplineSpaceSpec::new(a.d1, a.d2, a.alpha, a.beta)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))
}

fn load_mesh(path: &Path) -> Result<TMesh, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::new(
            EXIT_UNREADABLE,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    let mesh = parse_tmesh(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    validate(&mesh).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    Ok(mesh)
}

fn reduced(mesh: &TMesh, spec: &SplineSpaceSpec) -> (Topology, Subdivision, usize) {
    let red = reduce_subdivision(&Subdivision::from_mesh(mesh), spec);
    (
        Topology::from_subdivision(&red.subdivision),
        red.subdivision,
        red.removed_ledges,
    )
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Analyze {
            mesh,
            spec,
            format,
            trials,
            seed,
        } => {
            let spec = spec_of(spec)?;
            let mesh = load_mesh(&mesh)?;
            let opts = DimOptions {
                stability: trials.map(|t| (t, seed)),
            };
            let report = dim_general_with(&mesh, &spec, &opts)?;
            let output = AnalyzeOutput { spec, report };
            let text = if format.json {
                to_json(&output)
            } else {
                report_to_text(&output)
            };
            emit(out, &text)?;
        }
        Command::Diag { mesh, spec } => {
            let spec = spec_of(spec)?;
            let mesh = load_mesh(&mesh)?;
            emit(out, &diag_text(&mesh, &spec)?)?;
        }
        Command::Stability {
            mesh,
            spec,
            format,
            trials,
            seed,
        } => {
            let spec = spec_of(spec)?;
            let mesh = load_mesh(&mesh)?;
            let rep = stability_verdict(&mesh, &spec, trials, seed)?;
            let text = if format.json {
                to_json(&rep)
            } else {
                report_to_text(&rep)
            };
            emit(out, &text)?;
        }
        Command::Rank { mesh, spec, dump } => {
            let spec = spec_of(spec)?;
            let mesh = load_mesh(&mesh)?;
            let (topo, sub, removed) = reduced(&mesh, &spec);
            let m =
                assemble_from_topology(&topo, sub.knots(), &spec).map_err(AnalysisError::from)?;
            let r = rank(&m.entries);
            if let Some(path) = dump {
                write_file(&path, &m.entries.to_dump())?;
            }
            let mut s = String::new();
            let _ = writeln!(s, "removed_ledges  {removed}");
            let _ = writeln!(s, "rows            {}", m.entries.rows());
            let _ = writeln!(s, "cols            {}", m.entries.cols());
            let _ = writeln!(s, "rank            {r}");
            let _ = writeln!(s, "nullity         {}", m.entries.cols() - r);
            emit(out, &s)?;
        }
        Command::OracleCompare {
            meshes,
            spec,
            count,
            max_splits,
            seed,
        } => {
            let spec = spec_of(spec)?;
            let mut cases = Vec::new();
            if meshes.is_empty() {
                emit(out, &format!("seed {seed}\n"))?;
                for k in 0..count as u64 {
                    let s = seed.wrapping_add(k);
                    cases.push((format!("random seed {s}"), random_tmesh(max_splits, s)));
                }
            } else {
                for p in &meshes {
                    cases.push((p.display().to_string(), load_mesh(p)?));
                }
            }
            let mut matched = 0;
            for (name, m) in &cases {
                let a = dim_general(m, &spec)?.dimension;
                let b =
                    dim_direct(m, &spec).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
                if a == b {
                    matched += 1;
                } else {
                    emit(out, &format!("mismatch {name}: cofactor {a}, direct {b}\n"))?;
                }
            }
            emit(out, &format!("{matched}/{} match\n", cases.len()))?;
            if matched != cases.len() {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::Gen {
            max_splits,
            seed,
            pinwheel,
            output,
        } => {
            let mesh = if pinwheel {
                pinwheel_counterexample()
            } else {
                let _ = writeln!(err, "seed: {seed}");
                random_tmesh(max_splits, seed)
            };
            match output {
                Some(p) => write_file(&p, &mesh.to_text())?,
                None => emit(out, &mesh.to_text())?,
            }
        }
        Command::Render { mesh, output } => {
            let svg = render_svg(&load_mesh(&mesh)?);
            match output {
                Some(p) => write_file(&p, &svg)?,
                None => emit(out, &svg)?,
            }
        }
    }
    Ok(EXIT_OK)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Short label for an l-edge: orientation, line index and knot span.
pub fn ledge_label(e: &LEdge) -> String {
    let o = match e.orientation {
        Orientation::Horizontal => 'H',
        Orientation::Vertical => 'V',
    };
    format!(
        "{o}{}[{}..{}]",
        e.fixed_knot_index,
        e.positions[0],
        e.positions[e.len() - 1]
    )
}

fn diag_text(mesh: &TMesh, spec: &SplineSpaceSpec) -> Result<String, Failure> {
    let (topo, _, removed) = reduced(mesh, spec);
    let mut s = String::new();
    let _ = writeln!(s, "vanished l-edges removed: {removed}");
    let _ = writeln!(s, "interior l-edges: {}", topo.interior_ledges().len());
    match is_diagonalizable(&topo, spec) {
        Some(order) => {
            let labels: Vec<String> = order
                .iter()
                .map(|&l| ledge_label(&topo.ledges[l]))
                .collect();
            let nu = new_vertex_vector(&topo, &order)?;
            let nu: Vec<String> = nu.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "diagonalizable: yes, order: {}", labels.join(" "));
            let _ = writeln!(s, "new vertex vector: {}", nu.join(" "));
        }
        None => {
            let _ = writeln!(s, "diagonalizable: no");
        }
    }
    let (nh, nv) = spec.thresholds();
    let _ = writeln!(s, "thresholds: horizontal {nh}, vertical {nv}");
    let mono = if check_mono_vertex_condition(&topo, spec) {
        "holds"
    } else {
        "fails"
    };
    let _ = writeln!(s, "mono-vertex condition: {mono}");
    Ok(s)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push((prefix.to_string(), format!("[{}]", parts.join(" "))));
        }
        _ => out.push((prefix.to_string(), scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn scalar_value(text: &str) -> Value {
    if text == "none" {
        Value::Null
    } else if let Ok(n) = text.parse::<u64>() {
        Value::from(n)
    } else if let Ok(n) = text.parse::<i64>() {
        Value::from(n)
    } else if let Ok(b) = text.parse::<bool>() {
        Value::from(b)
    } else {
        Value::from(text)
    }
}

/// Aligned `key value` lines. Nested fields use dotted keys, lists are
/// bracketed and absent values read `none`.
pub fn report_to_text<T: Serialize>(report: &T) -> String {
    let v = serde_json::to_value(report).expect("reports serialize");
    let mut lines = Vec::new();
    flatten("", &v, &mut lines);
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, val) in lines {
        let _ = writeln!(s, "{k:<width$}  {val}");
    }
    s
}

/// Inverse of [`report_to_text`].
pub fn report_from_text<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, String> {
    let mut root = Map::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, val) = line
            .trim()
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("line {}: expected `key value`", n + 1))?;
        let val = val.trim();
        let value = match val.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            Some(inner) => Value::Array(inner.split_whitespace().map(scalar_value).collect()),
            None => scalar_value(val),
        };
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().expect("split yields one part");
        let mut node = &mut root;
        for p in parts {
            let entry = node.entry(p).or_insert_with(|| Value::Object(Map::new()));
            node = entry
                .as_object_mut()
                .ok_or_else(|| format!("line {}: `{p}` is not a group", n + 1))?;
        }
        node.insert(last.to_string(), value);
    }
    serde_json::from_value(Value::Object(root)).map_err(|e| e.to_string())
}

/// Parses a stability report printed by the `stability` subcommand.
pub fn stability_from_text(text: &str) -> Result<StabilityReport, String> {
    report_from_text(text)
}

const CANVAS: f64 = 480.0;
const MARGIN: f64 = 20.0;

fn ledge_style(kind: LEdgeKind) -> (&'static str, &'static str) {
    match kind {
        LEdgeKind::InteriorLEdge => ("interior", "#c0392b"),
        LEdgeKind::CrossCut => ("cross-cut", "#2471a3"),
        LEdgeKind::Ray => ("ray", "#229954"),
    }
}

/// Deterministic SVG drawing. Faces are outlined rectangles; l-edges are
/// coloured by kind; mono-vertices are filled discs and free vertices open
/// squares.
pub fn render_svg(mesh: &TMesh) -> String {
    let topo = extract_topology(mesh);
    let f = |r: &Rational| r.to_f64().unwrap_or(0.0);
    let xs: Vec<f64> = mesh.x_knots().iter().map(f).collect();
    let ys: Vec<f64> = mesh.y_knots().iter().map(f).collect();
    let (x0, y0) = (xs[0], ys[0]);
    let span = (xs[xs.len() - 1] - x0).max(ys[ys.len() - 1] - y0);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let width = MARGIN * 2.0 + (xs[xs.len() - 1] - x0) * scale;
    let height = MARGIN * 2.0 + (ys[ys.len() - 1] - y0) * scale;
    let px = |i: usize| MARGIN + (xs[i] - x0) * scale;
    // SVG y grows downwards.
    let py = |j: usize| height - MARGIN - (ys[j] - y0) * scale;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(
        s,
        r##"  <g id="faces" fill="#f4f6f7" stroke="#7f8c8d" stroke-width="1">"##
    );
    for face in mesh.faces() {
        let _ = writeln!(
            s,
            r#"    <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            px(face.ix0),
            py(face.iy1),
            px(face.ix1) - px(face.ix0),
            py(face.iy0) - py(face.iy1)
        );
    }
    s.push_str("  </g>\n");
    s.push_str("  <g id=\"ledges\" stroke-linecap=\"round\">\n");
    for e in &topo.ledges {
        let (class, colour) = ledge_style(e.kind);
        let w = if e.is_interior() { 3 } else { 2 };
        let (a, b) = (e.positions[0], e.positions[e.len() - 1]);
        let k = e.fixed_knot_index;
        let (xa, ya, xb, yb) = match e.orientation {
            Orientation::Horizontal => (px(a), py(k), px(b), py(k)),
            Orientation::Vertical => (px(k), py(a), px(k), py(b)),
        };
        let _ = writeln!(
            s,
            r#"    <line class="{class}" x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}" stroke="{colour}" stroke-width="{w}"/>"#
        );
    }
    s.push_str("  </g>\n");
    s.push_str("  <g id=\"vertices\">\n");
    for (id, v) in topo.vertices.iter().enumerate() {
        let (cx, cy) = (px(v.ix), py(v.iy));
        if topo.is_mono_vertex(id) {
            let _ = writeln!(
                s,
                r#"    <circle class="mono" cx="{cx:.2}" cy="{cy:.2}" r="4" fill="black"/>"#
            );
        } else if topo.is_free_vertex(id) {
            let _ = writeln!(
                s,
                r#"    <rect class="free" x="{:.2}" y="{:.2}" width="8" height="8" fill="white" stroke="black" stroke-width="1.5"/>"#,
                cx - 4.0,
                cy - 4.0
            );
        }
    }
    s.push_str("  </g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{GenericRank, Stability, Verdict};

    fn spec(d1: usize, d2: usize, a: usize, b: usize) -> SplineSpaceSpec {
        SplineSpaceSpec::new(d1, d2, a, b).unwrap()
    }

    #[test]
    fn text_report_round_trips() {
        let sp = spec(3, 3, 2, 2);
        let report = dim_general_with(
            &pinwheel_counterexample(),
            &sp,
            &DimOptions {
                stability: Some((3, 7)),
            },
        )
        .unwrap();
        assert_eq!(report.stability, Stability::UnstableAtGivenKnots);
        let out = AnalyzeOutput { spec: sp, report };
        let text = report_to_text(&out);
        assert!(text
            .lines()
            .any(|l| l.split_whitespace().eq(["dimension", "49"])));
        assert_eq!(report_from_text::<AnalyzeOutput>(&text).unwrap(), out);
        let json: AnalyzeOutput = serde_json::from_str(&to_json(&out)).unwrap();
        assert_eq!(json, out);
    }

    #[test]
    fn none_and_empty_lists_survive() {
        let m = TMesh::from_integer_knots(&[0, 1], &[0, 1], &[[0, 1, 0, 1]]).unwrap();
        let out = AnalyzeOutput {
            spec: spec(1, 1, 0, 0),
            report: dim_general(&m, &spec(1, 1, 0, 0)).unwrap(),
        };
        assert_eq!(out.report.diagonalizable, Some(vec![]));
        assert_eq!(out.report.generic_rank, None);
        let text = report_to_text(&out);
        assert_eq!(report_from_text::<AnalyzeOutput>(&text).unwrap(), out);
    }

    #[test]
    fn stability_text_round_trips() {
        let rep = StabilityReport {
            rank_at_knots: 15,
            generic_rank: 16,
            trials: 5,
            seed: 0,
            verdict: Verdict::Unstable,
        };
        assert_eq!(stability_from_text(&report_to_text(&rep)).unwrap(), rep);
        let g = GenericRank {
            value: 1,
            trials: 2,
            seed: u64::MAX,
        };
        assert_eq!(
            report_from_text::<GenericRank>(&report_to_text(&g)).unwrap(),
            g
        );
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(report_from_text::<StabilityReport>("rank_at_knots\n").is_err());
        assert!(report_from_text::<StabilityReport>("rank_at_knots 3\n").is_err());
    }

    #[test]
    fn single_face_svg_has_one_rectangle() {
        let m = TMesh::from_integer_knots(&[0, 2], &[0, 1], &[[0, 1, 0, 1]]).unwrap();
        let svg = render_svg(&m);
        assert_eq!(svg.matches("<rect ").count(), 1);
        assert!(!svg.contains("<line"));
    }

    #[test]
    fn svg_is_deterministic_and_marks_pinwheel() {
        let m = pinwheel_counterexample();
        let a = render_svg(&m);
        assert_eq!(a, render_svg(&m));
        assert_eq!(a.matches("class=\"interior\"").count(), 4);
        // Two inner mono-vertices per l-edge plus the end on a cross-cut.
        assert_eq!(a.matches("class=\"mono\"").count(), 12);
    }

    #[test]
    fn ledge_labels() {
        let t = extract_topology(&pinwheel_counterexample());
        let mut labels: Vec<String> = t
            .interior_ledges()
            .iter()
            .map(|&l| ledge_label(&t.ledges[l]))
            .collect();
        labels.sort();
        assert_eq!(labels, ["H2[2..8]", "H7[1..7]", "V2[1..7]", "V7[2..8]"]);
    }
}
