use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::subdivision::Subdivision;

pub type Rational = BigRational;

/// Which knot vector an error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeshError {
    #[error("mesh syntax error: {0}")]
    Syntax(String),
    #[error("{axis}_knots[{index}]: cannot parse rational {text:?}")]
    BadRational {
        axis: Axis,
        index: usize,
        text: String,
    },
    #[error("{axis}_knots needs at least two values")]
    TooFewKnots { axis: Axis },
    #[error("{axis}_knots not strictly increasing at index {index}")]
    NonIncreasingKnots { axis: Axis, index: usize },
    #[error("face {face} references a knot index out of range")]
    FaceIndexOutOfRange { face: usize },
    #[error("face {face} is degenerate (needs ix0 < ix1 and iy0 < iy1)")]
    DegenerateFace { face: usize },
    #[error("mesh has no faces")]
    NoFaces,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("faces {first} and {second} overlap")]
    OverlappingFaces { first: usize, second: usize },
    #[error("face {face} is not connected to face 0")]
    Disconnected { face: usize },
    #[error("mesh has a hole at cell {cell:?} (Euler characteristic {euler})")]
    HasHole { cell: (usize, usize), euler: i64 },
    #[error("vertex {vertex:?} is not regular")]
    NotRegular { vertex: (usize, usize) },
}

/// Axis-aligned rectangle `[x[ix0], x[ix1]] x [y[iy0], y[iy1]]` in knot indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub ix0: usize,
    pub ix1: usize,
    pub iy0: usize,
    pub iy1: usize,
}

impl Face {
    pub fn new(ix0: usize, ix1: usize, iy0: usize, iy1: usize) -> Self {
        Face { ix0, ix1, iy0, iy1 }
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.ix0, self.ix1, self.iy0, self.iy1]
    }
}

/// Knot values of both axes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Knots {
    pub xs: Vec<Rational>,
    pub ys: Vec<Rational>,
}

impl Knots {
    pub fn axis(&self, axis: Axis) -> &[Rational] {
        match axis {
            Axis::X => &self.xs,
            Axis::Y => &self.ys,
        }
    }

    /// Checks that both vectors are strictly increasing.
    pub fn check_increasing(&self) -> Result<(), MeshError> {
        for (axis, v) in [(Axis::X, &self.xs), (Axis::Y, &self.ys)] {
            if v.len() < 2 {
                return Err(MeshError::TooFewKnots { axis });
            }
            if let Some(index) = v.windows(2).position(|w| w[0] >= w[1]) {
                return Err(MeshError::NonIncreasingKnots {
                    axis,
                    index: index + 1,
                });
            }
        }
        Ok(())
    }
}

/// A T-mesh: rectangular faces over two strictly increasing knot vectors.
///
/// Topology lives entirely in the knot indices of the faces; the knot values
/// only enter when a conformality or smoothness matrix is assembled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TMesh {
    knots: Knots,
    faces: Vec<Face>,
}

impl TMesh {
    /// Faces are stored in canonical (sorted) order; structural errors name
    /// faces by their position in the input.
    pub fn new(xs: Vec<Rational>, ys: Vec<Rational>, faces: Vec<Face>) -> Result<Self, MeshError> {
        let knots = Knots { xs, ys };
        knots.check_increasing()?;
        if faces.is_empty() {
            return Err(MeshError::NoFaces);
        }
        for (i, f) in faces.iter().enumerate() {
            if f.ix1 >= knots.xs.len() || f.iy1 >= knots.ys.len() {
                return Err(MeshError::FaceIndexOutOfRange { face: i });
            }
            if f.ix0 >= f.ix1 || f.iy0 >= f.iy1 {
                return Err(MeshError::DegenerateFace { face: i });
            }
        }
        let mut faces = faces;
        faces.sort_unstable();
        Ok(TMesh { knots, faces })
    }

    /// Convenience constructor for integer knots.
    pub fn from_integer_knots(
        xs: &[i64],
        ys: &[i64],
        faces: &[[usize; 4]],
    ) -> Result<Self, MeshError> {
        let conv = |v: &[i64]| {
            v.iter()
                .map(|&k| Rational::from_integer(BigInt::from(k)))
                .collect()
        };
        TMesh::new(
            conv(xs),
            conv(ys),
            faces
                .iter()
                .map(|f| Face::new(f[0], f[1], f[2], f[3]))
                .collect(),
        )
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    pub fn x_knots(&self) -> &[Rational] {
        &self.knots.xs
    }

    pub fn y_knots(&self) -> &[Rational] {
        &self.knots.ys
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Same faces over different (strictly increasing) knot values.
    pub fn with_knots(&self, knots: Knots) -> Result<Self, MeshError> {
        if knots.xs.len() != self.knots.xs.len() || knots.ys.len() != self.knots.ys.len() {
            return Err(MeshError::Syntax("knot vector length mismatch".into()));
        }
        knots.check_increasing()?;
        Ok(TMesh {
            knots,
            faces: self.faces.clone(),
        })
    }

    /// Canonical text form: faces sorted, rationals in lowest terms.
    pub fn to_text(&self) -> String {
        let mut faces = self.faces.clone();
        faces.sort();
        let knots = |v: &[Rational]| {
            v.iter()
                .map(|k| format!("\"{k}\""))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"x_knots\": [{}],", knots(&self.knots.xs));
        let _ = writeln!(out, "  \"y_knots\": [{}],", knots(&self.knots.ys));
        out.push_str("  \"faces\": [\n");
        for (i, f) in faces.iter().enumerate() {
            let sep = if i + 1 == faces.len() { "" } else { "," };
            let _ = writeln!(out, "    [{}, {}, {}, {}]{sep}", f.ix0, f.ix1, f.iy0, f.iy1);
        }
        out.push_str("  ]\n}\n");
        out
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum KnotText {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    x_knots: Vec<KnotText>,
    y_knots: Vec<KnotText>,
    faces: Vec<[usize; 4]>,
}

/// Parses `"p/q"` or `"n"` into a rational in lowest terms.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    }
}

fn convert_knots(axis: Axis, raw: Vec<KnotText>) -> Result<Vec<Rational>, MeshError> {
    raw.into_iter()
        .enumerate()
        .map(|(index, k)| match k {
            KnotText::Int(n) => Ok(Rational::from_integer(BigInt::from(n))),
            KnotText::Text(text) => {
                parse_rational(&text).ok_or(MeshError::BadRational { axis, index, text })
            }
        })
        .collect()
}

/// Reads a mesh file. Global validity (holes, regularity) is left to [`validate`].
pub fn parse_tmesh(text: &str) -> Result<TMesh, MeshError> {
    let raw: RawMesh = serde_json::from_str(text).map_err(|e| MeshError::Syntax(e.to_string()))?;
    let xs = convert_knots(Axis::X, raw.x_knots)?;
    let ys = convert_knots(Axis::Y, raw.y_knots)?;
    let faces = raw
        .faces
        .iter()
        .map(|f| Face::new(f[0], f[1], f[2], f[3]))
        .collect();
    TMesh::new(xs, ys, faces)
}

/// Summary of a mesh that passed [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub faces: usize,
    pub vertices: usize,
    pub edges: usize,
    pub euler: i64,
}

/// Checks that faces are disjoint, connected, hole free and regular.
pub fn validate(mesh: &TMesh) -> Result<ValidationReport, ValidationError> {
    let nx = mesh.knots.xs.len();
    let ny = mesh.knots.ys.len();
    let cw = nx - 1;
    let mut owner: Vec<Option<usize>> = vec![None; cw * (ny - 1)];
    for (fi, f) in mesh.faces.iter().enumerate() {
        for j in f.iy0..f.iy1 {
            for i in f.ix0..f.ix1 {
                let slot = &mut owner[i + cw * j];
                if let Some(first) = *slot {
                    return Err(ValidationError::OverlappingFaces { first, second: fi });
                }
                *slot = Some(fi);
            }
        }
    }

    // Face connectivity through shared edge segments.
    let mut parent: Vec<usize> = (0..mesh.faces.len()).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for j in 0..ny - 1 {
        for i in 0..cw {
            let Some(a) = owner[i + cw * j] else { continue };
            let right = (i + 1 < cw).then(|| owner[i + 1 + cw * j]).flatten();
            let up = (j + 2 < ny).then(|| owner[i + cw * (j + 1)]).flatten();
            for b in [right, up].into_iter().flatten() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let root = find(&mut parent, 0);
    if let Some(face) = (0..mesh.faces.len()).find(|&f| find(&mut parent, f) != root) {
        return Err(ValidationError::Disconnected { face });
    }

    let sub = Subdivision::from_mesh(mesh);
    let (vertices, edges) = sub.vertex_edge_counts();
    let euler = vertices as i64 - edges as i64 + mesh.faces.len() as i64;
    if euler != 1 {
        let cell = sub.hole_cell().unwrap_or((0, 0));
        return Err(ValidationError::HasHole { cell, euler });
    }
    if let Some(vertex) = sub.irregular_point() {
        return Err(ValidationError::NotRegular { vertex });
    }
    Ok(ValidationReport {
        faces: mesh.faces.len(),
        vertices,
        edges,
        euler,
    })
}
