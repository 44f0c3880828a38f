//! Grid-level planar subdivision.
//!
//! Every knot line pair defines a grid of cells. A subdivision records which
//! cells belong to the domain and which unit grid segments carry a mesh
//! line. Faces are the connected groups of domain cells that are not
//! separated by a segment, so faces need not be rectangles; this is what
//! vanished l-edge removal produces in general.

use std::collections::VecDeque;

use thiserror::Error;

use super::spec::Orientation;
use super::tmesh::{Face, Knots, MeshError, TMesh};

/// Unit directions out of a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Right = 0,
    Up = 1,
    Left = 2,
    Down = 3,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("face containing cell {cell:?} is not a rectangle")]
    NonRectangularFace { cell: (usize, usize) },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subdivision {
    knots: Knots,
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
    hseg: Vec<bool>,
    vseg: Vec<bool>,
}

impl Subdivision {
    pub fn from_mesh(mesh: &TMesh) -> Self {
        let knots = mesh.knots().clone();
        let nx = knots.xs.len();
        let ny = knots.ys.len();
        let mut sub = Subdivision {
            knots,
            nx,
            ny,
            inside: vec![false; (nx - 1) * (ny - 1)],
            hseg: vec![false; (nx - 1) * ny],
            vseg: vec![false; nx * (ny - 1)],
        };
        for f in mesh.faces() {
            for j in f.iy0..f.iy1 {
                for i in f.ix0..f.ix1 {
                    sub.inside[i + (nx - 1) * j] = true;
                }
            }
            for i in f.ix0..f.ix1 {
                sub.hseg[i + (nx - 1) * f.iy0] = true;
                sub.hseg[i + (nx - 1) * f.iy1] = true;
            }
            for j in f.iy0..f.iy1 {
                sub.vseg[f.ix0 + nx * j] = true;
                sub.vseg[f.ix1 + nx * j] = true;
            }
        }
        sub
    }

    /// Full rectangle over all knots, cut by `lines`. Each line is
    /// `(orientation, fixed knot index, from, to)` in knot indices.
    pub fn from_lines(
        knots: Knots,
        lines: &[(Orientation, usize, usize, usize)],
    ) -> Result<Self, MeshError> {
        let (nx, ny) = (knots.xs.len(), knots.ys.len());
        if nx < 2 || ny < 2 {
            return Err(MeshError::NoFaces);
        }
        let face = Face::new(0, nx - 1, 0, ny - 1);
        let mut sub = Subdivision::from_mesh(&TMesh::new(knots.xs, knots.ys, vec![face])?);
        for &(o, at, a, b) in lines {
            let (len_fixed, len_along) = match o {
                Orientation::Horizontal => (ny, nx),
                Orientation::Vertical => (nx, ny),
            };
            if at >= len_fixed || a >= b || b >= len_along {
                return Err(MeshError::Syntax(format!(
                    "line {o:?} {at} [{a},{b}] outside the knot grid"
                )));
            }
            for p in a..b {
                match o {
                    Orientation::Horizontal => sub.hseg[p + (nx - 1) * at] = true,
                    Orientation::Vertical => sub.vseg[at + nx * p] = true,
                }
            }
        }
        Ok(sub)
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    /// Same topology, different knot values.
    pub fn with_knots(&self, knots: Knots) -> Result<Self, MeshError> {
        if knots.xs.len() != self.nx || knots.ys.len() != self.ny {
            return Err(MeshError::Syntax("knot vector length mismatch".into()));
        }
        knots.check_increasing()?;
        Ok(Subdivision {
            knots,
            ..self.clone()
        })
    }

    /// Number of knots along x and y.
    pub fn grid_size(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn cell_inside(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize + 1 >= self.nx || j as usize + 1 >= self.ny {
            return false;
        }
        self.inside[i as usize + (self.nx - 1) * j as usize]
    }

    /// Segment on `y = ys[j]` between `xs[i]` and `xs[i+1]`.
    pub fn hseg(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize + 1 >= self.nx || j as usize >= self.ny {
            return false;
        }
        self.hseg[i as usize + (self.nx - 1) * j as usize]
    }

    /// Segment on `x = xs[i]` between `ys[j]` and `ys[j+1]`.
    pub fn vseg(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize + 1 >= self.ny {
            return false;
        }
        self.vseg[i as usize + self.nx * j as usize]
    }

    pub(crate) fn clear_hseg(&mut self, i: usize, j: usize) {
        self.hseg[i + (self.nx - 1) * j] = false;
    }

    pub(crate) fn clear_vseg(&mut self, i: usize, j: usize) {
        self.vseg[i + self.nx * j] = false;
    }

    /// Segments leaving grid point `(i, j)`, indexed by [`Dir`].
    pub fn arms(&self, i: usize, j: usize) -> [bool; 4] {
        let (i, j) = (i as isize, j as isize);
        [
            self.hseg(i, j),
            self.vseg(i, j),
            self.hseg(i - 1, j),
            self.vseg(i, j - 1),
        ]
    }

    /// Grid points where segments meet other than straight through.
    pub fn is_vertex(&self, i: usize, j: usize) -> bool {
        match self.arms(i, j) {
            [false, false, false, false] => false,
            [true, false, true, false] | [false, true, false, true] => false,
            _ => true,
        }
    }

    /// A point is interior when all four surrounding cells are in the domain.
    pub fn is_interior_point(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i as isize, j as isize);
        self.cell_inside(i, j)
            && self.cell_inside(i - 1, j)
            && self.cell_inside(i - 1, j - 1)
            && self.cell_inside(i, j - 1)
    }

    /// Vertex and edge counts of the subdivision, boundary included.
    pub fn vertex_edge_counts(&self) -> (usize, usize) {
        let segments =
            self.hseg.iter().filter(|&&s| s).count() + self.vseg.iter().filter(|&&s| s).count();
        let mut vertices = 0;
        let mut pass_through = 0;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let arms = self.arms(i, j);
                if arms.iter().any(|&a| a) {
                    if self.is_vertex(i, j) {
                        vertices += 1;
                    } else {
                        pass_through += 1;
                    }
                }
            }
        }
        (vertices, segments - pass_through)
    }

    /// A cell outside the domain that cannot reach the outer region.
    pub fn hole_cell(&self) -> Option<(usize, usize)> {
        // Padded grid: one ring of outside cells around the knot box.
        let w = self.nx + 1;
        let h = self.ny + 1;
        let idx = |i: usize, j: usize| i + w * j;
        let outside = |i: usize, j: usize| !self.cell_inside(i as isize - 1, j as isize - 1);
        let mut seen = vec![false; w * h];
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        seen[0] = true;
        while let Some((i, j)) = queue.pop_front() {
            let mut push = |a: usize, b: usize| {
                if outside(a, b) && !seen[idx(a, b)] {
                    seen[idx(a, b)] = true;
                    queue.push_back((a, b));
                }
            };
            if i + 1 < w {
                push(i + 1, j);
            }
            if j + 1 < h {
                push(i, j + 1);
            }
            if i > 0 {
                push(i - 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
        }
        for j in 1..h - 1 {
            for i in 1..w - 1 {
                if outside(i, j) && !seen[idx(i, j)] {
                    return Some((i - 1, j - 1));
                }
            }
        }
        None
    }

    /// A grid point whose domain cells touch only diagonally.
    pub fn irregular_point(&self) -> Option<(usize, usize)> {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (a, b) = (i as isize, j as isize);
                let ne = self.cell_inside(a, b);
                let nw = self.cell_inside(a - 1, b);
                let sw = self.cell_inside(a - 1, b - 1);
                let se = self.cell_inside(a, b - 1);
                if (ne && sw && !nw && !se) || (nw && se && !ne && !sw) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Labels every domain cell with its face. Returns labels (indexed like
    /// cells) and the face count. Faces are numbered by their lowest cell in
    /// row-major order starting from the bottom row.
    pub fn faces(&self) -> (Vec<Option<usize>>, usize) {
        let cw = self.nx - 1;
        let ch = self.ny - 1;
        let mut label: Vec<Option<usize>> = vec![None; cw * ch];
        let mut count = 0;
        for start in 0..cw * ch {
            if !self.inside[start] || label[start].is_some() {
                continue;
            }
            label[start] = Some(count);
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                let (i, j) = (c % cw, c / cw);
                let mut nbrs = Vec::with_capacity(4);
                if i + 1 < cw && !self.vseg[i + 1 + self.nx * j] {
                    nbrs.push(c + 1);
                }
                if i > 0 && !self.vseg[i + self.nx * j] {
                    nbrs.push(c - 1);
                }
                if j + 1 < ch && !self.hseg[i + cw * (j + 1)] {
                    nbrs.push(c + cw);
                }
                if j > 0 && !self.hseg[i + cw * j] {
                    nbrs.push(c - cw);
                }
                for n in nbrs {
                    if self.inside[n] && label[n].is_none() {
                        label[n] = Some(count);
                        queue.push_back(n);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Removes segments ending at an interior point that has no other segment,
    /// repeatedly. Such segments carry no jump in any spline.
    pub(crate) fn prune_dangling(&mut self) -> usize {
        let mut removed = 0;
        loop {
            let mut changed = false;
            for j in 0..self.ny {
                for i in 0..self.nx {
                    if !self.is_interior_point(i, j) {
                        continue;
                    }
                    let arms = self.arms(i, j);
                    if arms.iter().filter(|&&a| a).count() != 1 {
                        continue;
                    }
                    if arms[Dir::Right as usize] {
                        self.clear_hseg(i, j);
                    } else if arms[Dir::Left as usize] {
                        self.clear_hseg(i - 1, j);
                    } else if arms[Dir::Up as usize] {
                        self.clear_vseg(i, j);
                    } else {
                        self.clear_vseg(i, j - 1);
                    }
                    removed += 1;
                    changed = true;
                }
            }
            if !changed {
                return removed;
            }
        }
    }

    /// Converts back to a rectangle T-mesh when every face is a rectangle
    /// bounded exactly by the recorded segments.
    pub fn to_mesh(&self) -> Result<TMesh, SubdivisionError> {
        let cw = self.nx - 1;
        let (label, count) = self.faces();
        let mut bbox: Vec<Option<(usize, usize, usize, usize, usize)>> = vec![None; count];
        for (c, l) in label.iter().enumerate() {
            let Some(f) = *l else { continue };
            let (i, j) = (c % cw, c / cw);
            let b = bbox[f].get_or_insert((i, i + 1, j, j + 1, 0));
            b.0 = b.0.min(i);
            b.1 = b.1.max(i + 1);
            b.2 = b.2.min(j);
            b.3 = b.3.max(j + 1);
            b.4 += 1;
        }
        let mut faces = Vec::with_capacity(count);
        for (f, b) in bbox.iter().enumerate() {
            let (ix0, ix1, iy0, iy1, cells) = b.expect("every face owns a cell");
            if cells != (ix1 - ix0) * (iy1 - iy0) {
                let c = label.iter().position(|&l| l == Some(f)).unwrap();
                return Err(SubdivisionError::NonRectangularFace {
                    cell: (c % cw, c / cw),
                });
            }
            faces.push(Face::new(ix0, ix1, iy0, iy1));
        }
        let mesh = TMesh::new(self.knots.xs.clone(), self.knots.ys.clone(), faces)?;
        let back = Subdivision::from_mesh(&mesh);
        if back != *self {
            // A leftover segment inside a rectangle; report the first one.
            let c = (0..cw * (self.ny - 1))
                .find(|&c| {
                    let (i, j) = (c % cw, c / cw);
                    self.inside[c]
                        && (self.hseg(i as isize, j as isize + 1)
                            != back.hseg(i as isize, j as isize + 1)
                            || self.vseg(i as isize + 1, j as isize)
                                != back.vseg(i as isize + 1, j as isize))
                })
                .unwrap_or(0);
            return Err(SubdivisionError::NonRectangularFace {
                cell: (c % cw, c / cw),
            });
        }
        Ok(mesh)
    }
}
