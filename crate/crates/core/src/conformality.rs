//! Conformality conditions: one row block per interior l-edge, one column
//! block per constrained interior vertex.
//!
//! For a horizontal l-edge on `y = y_j` with vertices at `x_0 < … < x_m`,
//! the vertex cofactors `d_t(x, y)` must satisfy
//! `Σ_t d_t(x, y) (x − x_t)^(α+1) = 0`. Writing
//! `d_t = Σ_{p,q} d_t^{p,q} x^p y^q` and expanding in monomials about 0, each
//! power of `y` gives an independent copy of the univariate system in `x`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::RationalMatrix;
use crate::mesh::{
    Knots, LEdge, Orientation, Rational, SplineSpaceSpec, Subdivision, TMesh, Topology, VertexId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConformalityError {
    #[error("l-edge is a cross-cut or ray, not an interior l-edge")]
    NotInteriorLEdge,
    #[error("l-edge has repeated knot values along its line")]
    DuplicateKnots,
    #[error("l-edge needs at least two vertices, found {found}")]
    TooFewVertices { found: usize },
}

/// Row label: l-edge, slice (power of the cross variable) and power of the
/// line variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RowKey {
    pub ledge: usize,
    pub slice: usize,
    pub power: usize,
}

/// Column label: coefficient `d^{p,q}` of the cofactor at `vertex`, taken in
/// the shifted basis `(x - x_t)^p (y - y_t)^q` around the vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ColKey {
    pub vertex: VertexId,
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalityMatrix {
    pub entries: RationalMatrix,
    pub row_index: Vec<RowKey>,
    pub col_index: Vec<ColKey>,
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * (n - i) / (i + 1);
    }
    b
}

/// Coefficient of `t^k` in `(t − c)^n`.
fn shifted_power_coeff(n: usize, k: usize, c: &Rational) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let neg = -c.clone();
    Rational::from_integer(binomial(n, k)) * num_traits::pow(neg, n - k)
}

/// Univariate block along one line: rows are powers `0..=d` of the line
/// variable, columns `(t, p)` hold the coefficients of `(t − c_t)^(p+s+1)`
/// for `p < d − s`, where `(d, s)` is the degree and smoothness across the
/// line.
pub fn line_block(
    orientation: Orientation,
    coords: &[Rational],
    spec: &SplineSpaceSpec,
) -> RationalMatrix {
    let (d, s, gap) = match orientation {
        Orientation::Horizontal => (spec.d1(), spec.alpha(), spec.gap_x()),
        Orientation::Vertical => (spec.d2(), spec.beta(), spec.gap_y()),
    };
    let mut m = RationalMatrix::zeros(d + 1, coords.len() * gap);
    for (t, c) in coords.iter().enumerate() {
        for p in 0..gap {
            for k in 0..=d {
                m.set(k, t * gap + p, shifted_power_coeff(p + s + 1, k, c));
            }
        }
    }
    m
}

fn line_coords(ledge: &LEdge, knots: &Knots) -> Vec<Rational> {
    let axis = match ledge.orientation {
        Orientation::Horizontal => &knots.xs,
        Orientation::Vertical => &knots.ys,
    };
    ledge.positions.iter().map(|&i| axis[i].clone()).collect()
}

fn check_ledge(ledge: &LEdge, coords: &[Rational]) -> Result<(), ConformalityError> {
    if ledge.len() < 2 {
        return Err(ConformalityError::TooFewVertices { found: ledge.len() });
    }
    if !ledge.is_interior() {
        return Err(ConformalityError::NotInteriorLEdge);
    }
    if coords.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConformalityError::DuplicateKnots);
    }
    Ok(())
}

/// Full block of one interior l-edge: rows `(slice, power)`, columns
/// `(vertex, p, q)` in vertex-list order.
pub fn ledge_block(
    ledge: &LEdge,
    spec: &SplineSpaceSpec,
    knots: &Knots,
) -> Result<RationalMatrix, ConformalityError> {
    let coords = line_coords(ledge, knots);
    check_ledge(ledge, &coords)?;
    let (gx, gy) = (spec.gap_x(), spec.gap_y());
    let uni = line_block(ledge.orientation, &coords, spec);
    let rows = spec.ledge_rows(ledge.orientation);
    let mut m = RationalMatrix::zeros(rows, ledge.len() * gx * gy);
    for t in 0..ledge.len() {
        for p in 0..gx {
            for q in 0..gy {
                let col = (t * gx + p) * gy + q;
                match ledge.orientation {
                    Orientation::Horizontal => {
                        for k in 0..=spec.d1() {
                            m.set(q * (spec.d1() + 1) + k, col, uni.get(k, t * gx + p).clone());
                        }
                    }
                    Orientation::Vertical => {
                        for k in 0..=spec.d2() {
                            m.set(p * (spec.d2() + 1) + k, col, uni.get(k, t * gy + q).clone());
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Stitches the blocks of all interior l-edges of `topo` into one matrix.
pub fn assemble_from_topology(
    topo: &Topology,
    knots: &Knots,
    spec: &SplineSpaceSpec,
) -> Result<ConformalityMatrix, ConformalityError> {
    let (gx, gy) = (spec.gap_x(), spec.gap_y());
    let vertices = topo.constrained_vertices();
    let mut col_of: HashMap<VertexId, usize> = HashMap::new();
    let mut col_index = Vec::with_capacity(vertices.len() * gx * gy);
    for (k, &v) in vertices.iter().enumerate() {
        col_of.insert(v, k * gx * gy);
        for p in 0..gx {
            for q in 0..gy {
                col_index.push(ColKey { vertex: v, p, q });
            }
        }
    }
    let ledges = topo.interior_ledges();
    let n_r: usize = ledges
        .iter()
        .map(|&l| spec.ledge_rows(topo.ledges[l].orientation))
        .sum();
    let mut entries = RationalMatrix::zeros(n_r, col_index.len());
    let mut row_index = Vec::with_capacity(n_r);
    for &l in &ledges {
        let ledge = &topo.ledges[l];
        let block = ledge_block(ledge, spec, knots)?;
        let base = row_index.len();
        let (slices, powers) = match ledge.orientation {
            Orientation::Horizontal => (gy, spec.d1() + 1),
            Orientation::Vertical => (gx, spec.d2() + 1),
        };
        for slice in 0..slices {
            for power in 0..powers {
                row_index.push(RowKey {
                    ledge: l,
                    slice,
                    power,
                });
            }
        }
        for (t, v) in ledge.vertex_list.iter().enumerate() {
            let c0 = col_of[v];
            for j in 0..gx * gy {
                for r in 0..block.rows() {
                    let val = block.get(r, t * gx * gy + j);
                    if !val.is_zero() {
                        entries.set(base + r, c0 + j, val.clone());
                    }
                }
            }
        }
    }
    Ok(ConformalityMatrix {
        entries,
        row_index,
        col_index,
    })
}

pub fn assemble_conformality(
    mesh: &TMesh,
    spec: &SplineSpaceSpec,
) -> Result<ConformalityMatrix, ConformalityError> {
    let sub = Subdivision::from_mesh(mesh);
    assemble_from_topology(&Topology::from_subdivision(&sub), mesh.knots(), spec)
}

/// Kernel dimension of a single interior l-edge block with `m` vertices.
pub fn ledge_nullity_formula(m: usize, spec: &SplineSpaceSpec, orientation: Orientation) -> usize {
    match orientation {
        Orientation::Horizontal => spec.gap_y() * (m * spec.gap_x()).saturating_sub(spec.d1() + 1),
        Orientation::Vertical => spec.gap_x() * (m * spec.gap_y()).saturating_sub(spec.d2() + 1),
    }
}
