//! Dimension formulas, diagonalizability and stability probing.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformality::{assemble_from_topology, ConformalityError};
use crate::linalg::rank;
use crate::mesh::{
    mesh_counts, reduce_subdivision, validate, Knots, MeshCounts, Orientation, Rational,
    SplineSpaceSpec, Subdivision, TMesh, Topology, ValidationError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Conformality(#[from] ConformalityError),
    #[error(
        "{spec} does not have reduced regularity (needs d1 >= 2 alpha + 1 and d2 >= 2 beta + 1)"
    )]
    PreconditionViolated { spec: SplineSpaceSpec },
    #[error("order is not a permutation of the interior l-edges")]
    NotAPermutation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    UnstableAtGivenKnots,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericRank {
    pub value: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Counts of the mesh after vanished l-edges are removed.
    pub counts: MeshCounts,
    pub removed_ledges: usize,
    pub rank: usize,
    pub nullity: usize,
    pub dimension: usize,
    /// Valid l-edge order (indices into the reduced topology), if any.
    pub diagonalizable: Option<Vec<usize>>,
    pub stability: Stability,
    pub generic_rank: Option<GenericRank>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rank_at_knots: usize,
    pub generic_rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub verdict: Verdict,
}

/// Extra work `dim_general_with` may do.
#[derive(Clone, Copy, Debug, Default)]
pub struct DimOptions {
    /// `(trials, seed)` for the generic rank probe.
    pub stability: Option<(usize, u64)>,
}

/// Dimension from counts and the nullity of the conformality matrix.
pub fn dimension_from_parts(counts: &MeshCounts, spec: &SplineSpaceSpec, nullity: usize) -> usize {
    (spec.d1() + 1) * (spec.d2() + 1)
        + counts.c_h * spec.crosscut_freedom(Orientation::Horizontal)
        + counts.c_v * spec.crosscut_freedom(Orientation::Vertical)
        + counts.v_plus * spec.vertex_cofactor_len()
        + nullity
}

pub fn dim_general(mesh: &TMesh, spec: &SplineSpaceSpec) -> Result<DimensionReport, AnalysisError> {
    dim_general_with(mesh, spec, &DimOptions::default())
}

pub fn dim_general_with(
    mesh: &TMesh,
    spec: &SplineSpaceSpec,
    opts: &DimOptions,
) -> Result<DimensionReport, AnalysisError> {
    validate(mesh)?;
    dim_general_subdivision(&Subdivision::from_mesh(mesh), spec, opts)
}

/// Same as [`dim_general_with`] on a subdivision that is already known to be
/// a valid domain.
pub fn dim_general_subdivision(
    sub: &Subdivision,
    spec: &SplineSpaceSpec,
    opts: &DimOptions,
) -> Result<DimensionReport, AnalysisError> {
    let red = reduce_subdivision(sub, spec);
    let topo = Topology::from_subdivision(&red.subdivision);
    let counts = mesh_counts(&topo, spec);
    let m = assemble_from_topology(&topo, red.subdivision.knots(), spec)?;
    let r = rank(&m.entries);
    let nullity = m.entries.cols() - r;
    let (stability, generic) = match opts.stability {
        Some((trials, seed)) => {
            let g =
                generic_rank_topology(&topo, red.subdivision.knots(), spec, trials, seed)?.max(r);
            let s = if r < g {
                Stability::UnstableAtGivenKnots
            } else {
                Stability::Stable
            };
            (
                s,
                Some(GenericRank {
                    value: g,
                    trials,
                    seed,
                }),
            )
        }
        None => (Stability::Unknown, None),
    };
    Ok(DimensionReport {
        counts,
        removed_ledges: red.removed_ledges,
        rank: r,
        nullity,
        dimension: dimension_from_parts(&counts, spec, nullity),
        diagonalizable: is_diagonalizable(&topo, spec),
        stability,
        generic_rank: generic,
    })
}

/// Closed form for diagonalizable meshes.
pub fn dim_diagonalizable_formula(counts: &MeshCounts, spec: &SplineSpaceSpec) -> i64 {
    let i = |v: usize| v as i64;
    i((spec.d1() + 1) * (spec.d2() + 1))
        + (i(counts.c_h) - i(counts.t_h)) * i(spec.crosscut_freedom(Orientation::Horizontal))
        + (i(counts.c_v) - i(counts.t_v)) * i(spec.crosscut_freedom(Orientation::Vertical))
        + i(counts.v * spec.vertex_cofactor_len())
}

/// Face/edge/vertex count formula, valid when `d1 >= 2α+1` and `d2 >= 2β+1`.
pub fn dim_reduced_regularity(
    counts: &MeshCounts,
    spec: &SplineSpaceSpec,
) -> Result<i64, AnalysisError> {
    if !spec.is_reduced_regularity() {
        return Err(AnalysisError::PreconditionViolated { spec: *spec });
    }
    let i = |v: usize| v as i64;
    let (d1, d2, a, b) = (i(spec.d1()), i(spec.d2()), i(spec.alpha()), i(spec.beta()));
    Ok(i(counts.f) * (d1 + 1) * (d2 + 1)
        - i(counts.e_h) * (d1 + 1) * (b + 1)
        - i(counts.e_v) * (d2 + 1) * (a + 1)
        + i(counts.v) * (a + 1) * (b + 1))
}

/// For each l-edge in `order`, the number of its vertices not on any
/// earlier l-edge of the order.
pub fn new_vertex_vector(topo: &Topology, order: &[usize]) -> Result<Vec<usize>, AnalysisError> {
    let mut expected = topo.interior_ledges();
    let mut given = order.to_vec();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(AnalysisError::NotAPermutation);
    }
    let mut seen = HashSet::new();
    Ok(order
        .iter()
        .map(|&l| {
            topo.ledges[l]
                .vertex_list
                .iter()
                .filter(|&&v| seen.insert(v))
                .count()
        })
        .collect())
}

fn meets_thresholds(topo: &Topology, spec: &SplineSpaceSpec, order: &[usize]) -> bool {
    match new_vertex_vector(topo, order) {
        Ok(nu) => order
            .iter()
            .zip(&nu)
            .all(|(&l, &n)| n >= spec.threshold(topo.ledges[l].orientation)),
        Err(_) => false,
    }
}

/// Finds an l-edge order meeting the new-vertex thresholds, if one exists.
///
/// Builds the order from the back: any l-edge with enough vertices that no
/// other remaining l-edge touches can go last. Private vertex counts only
/// grow as the set shrinks, so the greedy choice never blocks a solution.
pub fn is_diagonalizable(topo: &Topology, spec: &SplineSpaceSpec) -> Option<Vec<usize>> {
    let mut remaining = topo.interior_ledges();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let pick = remaining.iter().position(|&l| {
            let private = topo.ledges[l]
                .vertex_list
                .iter()
                .filter(|&&v| {
                    topo.ledges_at(v)
                        .iter()
                        .all(|&k| k == l || !remaining.contains(&k))
                })
                .count();
            private >= spec.threshold(topo.ledges[l].orientation)
        })?;
        order.push(remaining.remove(pick));
    }
    order.reverse();
    assert!(
        meets_thresholds(topo, spec, &order),
        "greedy order fails re-check"
    );
    Some(order)
}

/// Tries every order. Only sensible for a handful of l-edges.
pub fn is_diagonalizable_exhaustive(topo: &Topology, spec: &SplineSpaceSpec) -> Option<Vec<usize>> {
    fn permute(
        topo: &Topology,
        spec: &SplineSpaceSpec,
        prefix: &mut Vec<usize>,
        rest: &mut Vec<usize>,
    ) -> bool {
        if rest.is_empty() {
            return meets_thresholds(topo, spec, prefix);
        }
        for k in 0..rest.len() {
            let l = rest.remove(k);
            prefix.push(l);
            if permute(topo, spec, prefix, rest) {
                return true;
            }
            prefix.pop();
            rest.insert(k, l);
        }
        false
    }
    let mut prefix = Vec::new();
    let mut rest = topo.interior_ledges();
    permute(topo, spec, &mut prefix, &mut rest).then_some(prefix)
}

/// Every interior l-edge carries at least `N - 1` mono-vertices strictly
/// between its ends.
pub fn check_mono_vertex_condition(topo: &Topology, spec: &SplineSpaceSpec) -> bool {
    topo.interior_ledges().into_iter().all(|l| {
        let e = &topo.ledges[l];
        let inner = &e.vertex_list[1..e.len() - 1];
        let mono = inner.iter().filter(|&&v| topo.is_mono_vertex(v)).count();
        mono + 1 >= spec.threshold(e.orientation)
    })
}

fn random_axis(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let mut v: Vec<Rational> = (0..n)
            .map(|_| {
                let num: i64 = rng.gen_range(1..=1_000_000);
                let den: i64 = rng.gen_range(1..=1_000);
                Rational::new(num.into(), den.into())
            })
            .collect();
        v.sort();
        v.dedup();
        if v.len() == n {
            return v;
        }
    }
}

/// Increasing random rational knots for an `nx` by `ny` grid.
pub fn random_knots(nx: usize, ny: usize, seed: u64) -> Knots {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = random_axis(&mut rng, nx);
    let ys = random_axis(&mut rng, ny);
    Knots { xs, ys }
}

fn generic_rank_topology(
    topo: &Topology,
    knots: &Knots,
    spec: &SplineSpaceSpec,
    trials: usize,
    seed: u64,
) -> Result<usize, ConformalityError> {
    let (nx, ny) = (knots.xs.len(), knots.ys.len());
    let mut best = 0;
    for t in 0..trials as u64 {
        let k = random_knots(nx, ny, seed.wrapping_add(t));
        best = best.max(rank(&assemble_from_topology(topo, &k, spec)?.entries));
    }
    Ok(best)
}

/// Largest rank of the conformality matrix over `trials` random knot
/// assignments with the same topology.
pub fn generic_rank(
    mesh: &TMesh,
    spec: &SplineSpaceSpec,
    trials: usize,
    seed: u64,
) -> Result<usize, AnalysisError> {
    validate(mesh)?;
    let red = reduce_subdivision(&Subdivision::from_mesh(mesh), spec);
    let topo = Topology::from_subdivision(&red.subdivision);
    Ok(generic_rank_topology(
        &topo,
        red.subdivision.knots(),
        spec,
        trials,
        seed,
    )?)
}

pub fn stability_verdict(
    mesh: &TMesh,
    spec: &SplineSpaceSpec,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport, AnalysisError> {
    let rep = dim_general_with(
        mesh,
        spec,
        &DimOptions {
            stability: Some((trials, seed)),
        },
    )?;
    let g = rep.generic_rank.expect("requested");
    Ok(StabilityReport {
        rank_at_knots: rep.rank,
        generic_rank: g.value,
        trials,
        seed,
        verdict: if rep.rank < g.value {
            Verdict::Unstable
        } else {
            Verdict::Stable
        },
    })
}
