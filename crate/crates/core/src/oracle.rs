//! Brute-force spline dimension: one polynomial per face, smoothness
//! imposed across every shared segment, kernel counted by elimination.
//!
//! Nothing here uses l-edges or cofactors, so it serves as an independent
//! check on the conformality route.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};

use crate::mesh::{
    validate, Orientation, Rational, SplineSpaceSpec, Subdivision, TMesh, ValidationError,
};

/// Sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(usize, Rational)>;

/// Incremental row echelon form over the rationals.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots; keeps it if anything is left.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|(_, v)| !v.is_zero());
        while let Some((lead, _)) = row.first() {
            let lead = *lead;
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = row[0].1.clone();
                    row = axpy(&row, &f, p);
                }
                None => {
                    let inv = row[0].1.recip();
                    for (_, v) in row.iter_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
        false
    }
}

/// `a - f * b` for sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - f * &b[j].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Smoothness constraints over the faces of a subdivision.
#[derive(Clone, Debug)]
pub struct SmoothnessSystem {
    pub face_count: usize,
    /// Coefficients per face, `(d1+1)(d2+1)`, index `a*(d2+1) + b` for `x^a y^b`.
    pub block: usize,
    /// Face label of every domain cell, row-major from the bottom.
    pub cell_face: Vec<Option<usize>>,
    pub rows: Vec<SparseRow>,
}

impl SmoothnessSystem {
    pub fn unknowns(&self) -> usize {
        self.face_count * self.block
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|r| {
            r.iter()
                .fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c])
                .is_zero()
        })
    }
}

/// `a! / (a-j)!`
fn falling(a: usize, j: usize) -> Rational {
    Rational::from_integer(((a - j + 1)..=a).product::<usize>().into())
}

pub fn smoothness_system(sub: &Subdivision, spec: &SplineSpaceSpec) -> SmoothnessSystem {
    let (d1, d2) = (spec.d1(), spec.d2());
    let block = (d1 + 1) * (d2 + 1);
    let (cell_face, face_count) = sub.faces();
    let (nx, ny) = sub.grid_size();
    let face_at = |i: isize, j: isize| -> Option<usize> {
        if !sub.cell_inside(i, j) {
            return None;
        }
        cell_face[i as usize + (nx - 1) * j as usize]
    };
    let knots = sub.knots();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    // Vertical lines x = xs[i]: match x-derivatives up to alpha.
    for i in 1..nx.saturating_sub(1) {
        for j in 0..ny - 1 {
            let (Some(l), Some(r)) = (
                face_at(i as isize - 1, j as isize),
                face_at(i as isize, j as isize),
            ) else {
                continue;
            };
            if l == r || !seen.insert((Orientation::Vertical, i, l, r)) {
                continue;
            }
            let x = &knots.xs[i];
            for jd in 0..=spec.alpha() {
                for b in 0..=d2 {
                    let mut row = Vec::new();
                    for (f, sign) in [(l, Rational::one()), (r, -Rational::one())] {
                        for a in jd..=d1 {
                            let v = falling(a, jd) * num_traits::pow(x.clone(), a - jd) * &sign;
                            if !v.is_zero() {
                                row.push((f * block + a * (d2 + 1) + b, v));
                            }
                        }
                    }
                    row.sort_by_key(|e| e.0);
                    rows.push(row);
                }
            }
        }
    }
    // Horizontal lines y = ys[j]: match y-derivatives up to beta.
    for j in 1..ny.saturating_sub(1) {
        for i in 0..nx - 1 {
            let (Some(lo), Some(hi)) = (
                face_at(i as isize, j as isize - 1),
                face_at(i as isize, j as isize),
            ) else {
                continue;
            };
            if lo == hi || !seen.insert((Orientation::Horizontal, j, lo, hi)) {
                continue;
            }
            let y = &knots.ys[j];
            for jd in 0..=spec.beta() {
                for a in 0..=d1 {
                    let mut row = Vec::new();
                    for (f, sign) in [(lo, Rational::one()), (hi, -Rational::one())] {
                        for b in jd..=d2 {
                            let v = falling(b, jd) * num_traits::pow(y.clone(), b - jd) * &sign;
                            if !v.is_zero() {
                                row.push((f * block + a * (d2 + 1) + b, v));
                            }
                        }
                    }
                    row.sort_by_key(|e| e.0);
                    rows.push(row);
                }
            }
        }
    }
    SmoothnessSystem {
        face_count,
        block,
        cell_face,
        rows,
    }
}

/// Dimension of the spline space on an arbitrary subdivision.
pub fn dim_direct_subdivision(sub: &Subdivision, spec: &SplineSpaceSpec) -> usize {
    let sys = smoothness_system(sub, spec);
    let mut ech = SparseEchelon::new();
    for r in sys.rows.iter().cloned() {
        ech.insert(r);
    }
    sys.unknowns() - ech.rank()
}

pub fn dim_direct(mesh: &TMesh, spec: &SplineSpaceSpec) -> Result<usize, ValidationError> {
    validate(mesh)?;
    Ok(dim_direct_subdivision(&Subdivision::from_mesh(mesh), spec))
}

pub mod lift {
    //! Rebuilds face polynomials from cofactor data, so that solutions of the
    //! conformality system can be checked against the smoothness system.

    use std::collections::{HashMap, VecDeque};

    use num_traits::Zero;

    use super::SmoothnessSystem;
    use crate::mesh::{
        Axis, LEdgeKind, Orientation, Rational, SplineSpaceSpec, Subdivision, Topology, VertexId,
    };

    /// Dense bivariate polynomial, coefficient of `x^a y^b` at `a*(d2+1) + b`.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct Poly {
        pub d1: usize,
        pub d2: usize,
        pub c: Vec<Rational>,
    }

    impl Poly {
        pub fn zero(spec: &SplineSpaceSpec) -> Self {
            Poly {
                d1: spec.d1(),
                d2: spec.d2(),
                c: vec![Rational::zero(); (spec.d1() + 1) * (spec.d2() + 1)],
            }
        }

        pub fn monomial(spec: &SplineSpaceSpec, a: usize, b: usize) -> Self {
            let mut p = Self::zero(spec);
            p.c[a * (spec.d2() + 1) + b] = Rational::from_integer(1.into());
            p
        }

        fn add(&mut self, o: &Poly) {
            for (a, b) in self.c.iter_mut().zip(&o.c) {
                *a += b;
            }
        }

        fn sub(&mut self, o: &Poly) {
            for (a, b) in self.c.iter_mut().zip(&o.c) {
                *a -= b;
            }
        }

        /// Product with `(x - c)^k` or `(y - c)^k`. Panics if the degree
        /// bound is exceeded.
        pub fn times_shift(&self, axis: Axis, c: &Rational, k: usize) -> Poly {
            let mut out = Poly {
                c: vec![Rational::zero(); self.c.len()],
                ..self.clone()
            };
            let w = self.d2 + 1;
            for a in 0..=self.d1 {
                for b in 0..=self.d2 {
                    let v = &self.c[a * w + b];
                    if v.is_zero() {
                        continue;
                    }
                    for t in 0..=k {
                        let coeff = Rational::from_integer(binom(k, t).into())
                            * num_traits::pow(-c.clone(), k - t);
                        let (na, nb) = match axis {
                            Axis::X => (a + t, b),
                            Axis::Y => (a, b + t),
                        };
                        assert!(na <= self.d1 && nb <= self.d2, "degree overflow");
                        out.c[na * w + nb] += v * coeff;
                    }
                }
            }
            out
        }
    }

    fn binom(n: usize, k: usize) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
    }

    /// Cofactor data defining one spline.
    #[derive(Clone, Debug)]
    pub struct CofactorData {
        /// Polynomial on the face containing the lowest-left domain cell.
        pub base: Poly,
        /// Vertex cofactors, bidegree `(d1-α-1, d2-β-1)`, stored as `Poly`.
        pub vertex: HashMap<VertexId, Poly>,
        /// Edge cofactor on the first edge of each cross-cut, by l-edge id.
        pub crosscut: HashMap<usize, Poly>,
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum LiftError {
        /// Two paths to the same cell give different polynomials.
        Inconsistent { cell: (usize, usize) },
        /// A segment carries no edge cofactor (an l-edge corner).
        UncoveredSegment,
    }

    /// Edge cofactors of every interior segment, keyed by
    /// `(orientation, fixed index, start index along the line)`.
    fn edge_cofactors(
        topo: &Topology,
        sub: &Subdivision,
        spec: &SplineSpaceSpec,
        data: &CofactorData,
    ) -> HashMap<(Orientation, usize, usize), Poly> {
        let knots = sub.knots();
        let zero = Poly::zero(spec);
        let mut out = HashMap::new();
        for (id, l) in topo.ledges.iter().enumerate() {
            // Vertex terms d_t (x - x_t)^(α+1) on horizontal lines,
            // d_t (y - y_t)^(β+1) on vertical ones.
            let (axis, coords, s) = match l.orientation {
                Orientation::Horizontal => (Axis::X, &knots.xs, spec.alpha()),
                Orientation::Vertical => (Axis::Y, &knots.ys, spec.beta()),
            };
            let terms: Vec<Poly> = l
                .vertex_list
                .iter()
                .zip(&l.positions)
                .map(|(v, &p)| match data.vertex.get(v) {
                    Some(d) if !topo.vertices[*v].boundary => {
                        d.times_shift(axis, &coords[p], s + 1)
                    }
                    _ => zero.clone(),
                })
                .collect();
            // Cofactor before the first vertex.
            let mut mu = match l.kind {
                LEdgeKind::CrossCut => data
                    .crosscut
                    .get(&id)
                    .cloned()
                    .unwrap_or_else(|| zero.clone()),
                LEdgeKind::Ray if topo.vertices[l.vertex_list[0]].boundary => {
                    let mut m = zero.clone();
                    terms.iter().for_each(|t| m.sub(t));
                    m
                }
                _ => zero.clone(),
            };
            for k in 0..l.len() - 1 {
                mu.add(&terms[k]);
                for p in l.positions[k]..l.positions[k + 1] {
                    out.insert((l.orientation, l.fixed_knot_index, p), mu.clone());
                }
            }
        }
        out
    }

    /// Face coefficients (in the smoothness system's unknown order) of the
    /// spline described by `data`.
    pub fn lift(
        topo: &Topology,
        sub: &Subdivision,
        sys: &SmoothnessSystem,
        spec: &SplineSpaceSpec,
        data: &CofactorData,
    ) -> Result<Vec<Rational>, LiftError> {
        let edges = edge_cofactors(topo, sub, spec, data);
        let (nx, ny) = sub.grid_size();
        let cw = nx - 1;
        let knots = sub.knots();
        let mut cell_poly: Vec<Option<Poly>> = vec![None; cw * (ny - 1)];
        let start = (0..cell_poly.len())
            .find(|&c| sub.cell_inside((c % cw) as isize, (c / cw) as isize))
            .expect("nonempty domain");
        cell_poly[start] = Some(data.base.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % cw, c / cw);
            let here = cell_poly[c].clone().unwrap();
            let neighbours = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)];
            for (di, dj) in neighbours {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if !sub.cell_inside(ni, nj) {
                    continue;
                }
                let mut p = here.clone();
                let crossing = match (di, dj) {
                    (1, 0) => sub
                        .vseg(i as isize + 1, j as isize)
                        .then(|| (Orientation::Vertical, i + 1, j, 1)),
                    (-1, 0) => sub.vseg(i as isize, j as isize).then_some((
                        Orientation::Vertical,
                        i,
                        j,
                        -1,
                    )),
                    (0, 1) => sub
                        .hseg(i as isize, j as isize + 1)
                        .then(|| (Orientation::Horizontal, j + 1, i, 1)),
                    _ => sub.hseg(i as isize, j as isize).then_some((
                        Orientation::Horizontal,
                        j,
                        i,
                        -1,
                    )),
                };
                if let Some((o, line, along, dir)) = crossing {
                    let cof = edges
                        .get(&(o, line, along))
                        .ok_or(LiftError::UncoveredSegment)?;
                    let jump = match o {
                        Orientation::Vertical => {
                            cof.times_shift(Axis::X, &knots.xs[line], spec.alpha() + 1)
                        }
                        Orientation::Horizontal => {
                            cof.times_shift(Axis::Y, &knots.ys[line], spec.beta() + 1)
                        }
                    };
                    if dir > 0 {
                        p.add(&jump);
                    } else {
                        p.sub(&jump);
                    }
                }
                let n = ni as usize + cw * nj as usize;
                match &cell_poly[n] {
                    Some(q) if *q != p => {
                        return Err(LiftError::Inconsistent {
                            cell: (ni as usize, nj as usize),
                        })
                    }
                    Some(_) => {}
                    None => {
                        cell_poly[n] = Some(p);
                        queue.push_back(n);
                    }
                }
            }
        }
        let mut x = vec![Rational::zero(); sys.unknowns()];
        for (c, f) in sys.cell_face.iter().enumerate() {
            if let (Some(f), Some(p)) = (f, &cell_poly[c]) {
                x[f * sys.block..(f + 1) * sys.block].clone_from_slice(&p.c);
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, RationalMatrix};
    use crate::mesh::Knots;

    fn spec(d1: usize, d2: usize, a: usize, b: usize) -> SplineSpaceSpec {
        SplineSpaceSpec::new(d1, d2, a, b).unwrap()
    }

    fn tensor(nx: usize, ny: usize) -> TMesh {
        let xs: Vec<i64> = (0..=nx as i64).collect();
        let ys: Vec<i64> = (0..=ny as i64).collect();
        let mut faces = vec![];
        for i in 0..nx {
            for j in 0..ny {
                faces.push([i, i + 1, j, j + 1]);
            }
        }
        TMesh::from_integer_knots(&xs, &ys, &faces).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn single_face_is_unconstrained() {
        for sp in [spec(1, 1, 0, 0), spec(3, 2, 1, 0), spec(4, 4, 3, 3)] {
            assert_eq!(
                dim_direct(&tensor(1, 1), &sp).unwrap(),
                (sp.d1() + 1) * (sp.d2() + 1)
            );
        }
    }

    #[test]
    fn bilinear_on_two_by_two() {
        assert_eq!(dim_direct(&tensor(2, 2), &spec(1, 1, 0, 0)).unwrap(), 9);
    }

    #[test]
    fn tensor_product_counts() {
        // Univariate dimension on n intervals is d+1 + (n-1)(d-s).
        for (nx, ny) in [(2, 3), (3, 1), (3, 3)] {
            for sp in [spec(2, 2, 1, 1), spec(3, 2, 1, 0), spec(3, 3, 2, 2)] {
                let ux = sp.d1() + 1 + (nx - 1) * sp.gap_x();
                let uy = sp.d2() + 1 + (ny - 1) * sp.gap_y();
                assert_eq!(dim_direct(&tensor(nx, ny), &sp).unwrap(), ux * uy);
            }
        }
    }

    #[test]
    fn echelon_matches_dense_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                0
                            } else {
                                rng.gen_range(-3..=3)
                            }
                        })
                        .collect()
                })
                .collect();
            let mut e = SparseEchelon::new();
            for row in &rows {
                e.insert(row.iter().enumerate().map(|(k, &v)| (k, q(v))).collect());
            }
            assert_eq!(e.rank(), rank(&RationalMatrix::from_i64(&rows)));
        }
    }

    #[test]
    fn rejects_invalid_mesh() {
        let m = TMesh::from_integer_knots(&[0, 1, 2], &[0, 1, 2], &[[0, 1, 0, 1], [1, 2, 1, 2]])
            .unwrap();
        assert!(dim_direct(&m, &spec(1, 1, 0, 0)).is_err());
    }

    #[test]
    fn dangling_segment_adds_nothing() {
        let k = Knots {
            xs: (0..3).map(q).collect(),
            ys: (0..3).map(q).collect(),
        };
        let plain = Subdivision::from_lines(k.clone(), &[]).unwrap();
        let hanging = Subdivision::from_lines(k, &[(Orientation::Vertical, 1, 0, 1)]).unwrap();
        let sp = spec(2, 2, 0, 0);
        assert_eq!(
            dim_direct_subdivision(&hanging, &sp),
            dim_direct_subdivision(&plain, &sp)
        );
    }
}
