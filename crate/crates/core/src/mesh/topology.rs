use serde::{Deserialize, Serialize};

use super::spec::{Orientation, SplineSpaceSpec};
use super::subdivision::Subdivision;
use super::tmesh::TMesh;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LEdgeKind {
    InteriorLEdge,
    CrossCut,
    Ray,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub ix: usize,
    pub iy: usize,
    pub boundary: bool,
    /// Number of edges meeting at the vertex.
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub orientation: Orientation,
    /// Endpoints in increasing coordinate order.
    pub from: VertexId,
    pub to: VertexId,
    pub interior: bool,
}

/// A maximal run of connected interior edges on one knot line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LEdge {
    pub orientation: Orientation,
    /// Knot index of the line (`iy` for horizontal, `ix` for vertical).
    pub fixed_knot_index: usize,
    /// Vertices in increasing coordinate order.
    pub vertex_list: Vec<VertexId>,
    /// Knot index of each vertex along the line.
    pub positions: Vec<usize>,
    pub kind: LEdgeKind,
}

impl LEdge {
    pub fn len(&self) -> usize {
        self.vertex_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_list.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.kind == LEdgeKind::InteriorLEdge
    }

    pub fn ends(&self) -> (VertexId, VertexId) {
        (self.vertex_list[0], *self.vertex_list.last().unwrap())
    }
}

/// Derived combinatorial structure of a mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub ledges: Vec<LEdge>,
    pub face_count: usize,
    grid: (usize, usize),
    vertex_grid: Vec<Option<VertexId>>,
    vertex_ledges: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_subdivision(sub: &Subdivision) -> Self {
        let (nx, ny) = sub.grid_size();
        let mut vertices = Vec::new();
        let mut vertex_grid = vec![None; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                if sub.is_vertex(i, j) {
                    vertex_grid[i + nx * j] = Some(vertices.len());
                    vertices.push(Vertex {
                        ix: i,
                        iy: j,
                        boundary: !sub.is_interior_point(i, j),
                        degree: sub.arms(i, j).iter().filter(|&&a| a).count(),
                    });
                }
            }
        }
        let vid = |i: usize, j: usize| vertex_grid[i + nx * j].expect("vertex");

        let mut edges = Vec::new();
        let mut ledges = Vec::new();
        // Horizontal lines.
        for j in 0..ny {
            let mut run: Vec<(usize, usize, bool)> = Vec::new(); // (from, to, interior) in knot idx
            let mut i = 0;
            while i + 1 < nx {
                if !sub.hseg(i as isize, j as isize) {
                    i += 1;
                    continue;
                }
                let start = i;
                let interior = sub.cell_inside(i as isize, j as isize)
                    && sub.cell_inside(i as isize, j as isize - 1);
                i += 1;
                while !sub.is_vertex(i, j) {
                    i += 1;
                }
                run.push((start, i, interior));
            }
            collect_line(
                Orientation::Horizontal,
                j,
                &run,
                |p| vid(p, j),
                &vertices,
                &mut edges,
                &mut ledges,
            );
        }
        // Vertical lines.
        for i in 0..nx {
            let mut run = Vec::new();
            let mut j = 0;
            while j + 1 < ny {
                if !sub.vseg(i as isize, j as isize) {
                    j += 1;
                    continue;
                }
                let start = j;
                let interior = sub.cell_inside(i as isize, j as isize)
                    && sub.cell_inside(i as isize - 1, j as isize);
                j += 1;
                while !sub.is_vertex(i, j) {
                    j += 1;
                }
                run.push((start, j, interior));
            }
            collect_line(
                Orientation::Vertical,
                i,
                &run,
                |p| vid(i, p),
                &vertices,
                &mut edges,
                &mut ledges,
            );
        }

        let mut vertex_ledges = vec![Vec::new(); vertices.len()];
        for (k, l) in ledges.iter().enumerate() {
            for &v in &l.vertex_list {
                vertex_ledges[v].push(k);
            }
        }
        Topology {
            vertices,
            edges,
            ledges,
            face_count: sub.faces().1,
            grid: (nx, ny),
            vertex_grid,
            vertex_ledges,
        }
    }

    pub fn vertex_at(&self, ix: usize, iy: usize) -> Option<VertexId> {
        if ix >= self.grid.0 || iy >= self.grid.1 {
            return None;
        }
        self.vertex_grid[ix + self.grid.0 * iy]
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        !self.vertices[v].boundary
    }

    pub fn is_tjunction(&self, v: VertexId) -> bool {
        self.vertices[v].degree == 3
    }

    /// All l-edges (any kind) through `v`.
    pub fn ledges_at(&self, v: VertexId) -> &[usize] {
        &self.vertex_ledges[v]
    }

    /// Number of interior l-edges through `v`.
    pub fn interior_ledge_count(&self, v: VertexId) -> usize {
        self.vertex_ledges[v]
            .iter()
            .filter(|&&k| self.ledges[k].is_interior())
            .count()
    }

    /// Interior vertex on no interior l-edge.
    pub fn is_free_vertex(&self, v: VertexId) -> bool {
        self.is_interior(v) && self.interior_ledge_count(v) == 0
    }

    /// Interior vertex on exactly one interior l-edge and on a cross-cut or ray.
    pub fn is_mono_vertex(&self, v: VertexId) -> bool {
        self.is_interior(v)
            && self.interior_ledge_count(v) == 1
            && self.vertex_ledges[v]
                .iter()
                .any(|&k| !self.ledges[k].is_interior())
    }

    /// Indices (into `ledges`) of the interior l-edges, in storage order.
    pub fn interior_ledges(&self) -> Vec<usize> {
        (0..self.ledges.len())
            .filter(|&k| self.ledges[k].is_interior())
            .collect()
    }

    /// Interior vertices lying on at least one interior l-edge, by id.
    pub fn constrained_vertices(&self) -> Vec<VertexId> {
        (0..self.vertices.len())
            .filter(|&v| self.is_interior(v) && self.interior_ledge_count(v) > 0)
            .collect()
    }

    pub fn interior_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| !v.boundary).count()
    }
}

fn collect_line(
    orientation: Orientation,
    line: usize,
    run: &[(usize, usize, bool)],
    vid: impl Fn(usize) -> VertexId,
    vertices: &[Vertex],
    edges: &mut Vec<Edge>,
    ledges: &mut Vec<LEdge>,
) {
    let mut current: Option<LEdge> = None;
    let finish = |l: LEdge, ledges: &mut Vec<LEdge>| {
        let (a, b) = l.ends();
        let kind = match (vertices[a].boundary, vertices[b].boundary) {
            (false, false) => LEdgeKind::InteriorLEdge,
            (true, true) => LEdgeKind::CrossCut,
            _ => LEdgeKind::Ray,
        };
        ledges.push(LEdge { kind, ..l });
    };
    for &(p0, p1, interior) in run {
        let (from, to) = (vid(p0), vid(p1));
        edges.push(Edge {
            orientation,
            from,
            to,
            interior,
        });
        if !interior {
            if let Some(l) = current.take() {
                finish(l, ledges);
            }
            continue;
        }
        match current.as_mut() {
            Some(l) if *l.positions.last().unwrap() == p0 => {
                l.vertex_list.push(to);
                l.positions.push(p1);
            }
            _ => {
                if let Some(l) = current.take() {
                    finish(l, ledges);
                }
                current = Some(LEdge {
                    orientation,
                    fixed_knot_index: line,
                    vertex_list: vec![from, to],
                    positions: vec![p0, p1],
                    kind: LEdgeKind::InteriorLEdge,
                });
            }
        }
    }
    if let Some(l) = current.take() {
        finish(l, ledges);
    }
}

pub fn extract_topology(mesh: &TMesh) -> Topology {
    Topology::from_subdivision(&Subdivision::from_mesh(mesh))
}

/// Mesh statistics used by the dimension formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshCounts {
    /// Faces.
    pub f: usize,
    /// Horizontal / vertical interior edges.
    pub e_h: usize,
    pub e_v: usize,
    /// Interior vertices.
    pub v: usize,
    /// Horizontal / vertical cross-cuts.
    pub c_h: usize,
    pub c_v: usize,
    /// Horizontal / vertical interior l-edges.
    pub t_h: usize,
    pub t_v: usize,
    pub n_e: usize,
    /// Free vertices.
    pub v_plus: usize,
    /// Columns and rows of the conformality matrix.
    pub n_c: usize,
    pub n_r: usize,
}

pub fn mesh_counts(topo: &Topology, spec: &SplineSpaceSpec) -> MeshCounts {
    let interior_edges = |o| {
        topo.edges
            .iter()
            .filter(|e| e.interior && e.orientation == o)
            .count()
    };
    let ledges = |o, kind| {
        topo.ledges
            .iter()
            .filter(|l| l.orientation == o && l.kind == kind)
            .count()
    };
    let v = topo.interior_vertex_count();
    let v_plus = (0..topo.vertices.len())
        .filter(|&x| topo.is_free_vertex(x))
        .count();
    let t_h = ledges(Orientation::Horizontal, LEdgeKind::InteriorLEdge);
    let t_v = ledges(Orientation::Vertical, LEdgeKind::InteriorLEdge);
    MeshCounts {
        f: topo.face_count,
        e_h: interior_edges(Orientation::Horizontal),
        e_v: interior_edges(Orientation::Vertical),
        v,
        c_h: ledges(Orientation::Horizontal, LEdgeKind::CrossCut),
        c_v: ledges(Orientation::Vertical, LEdgeKind::CrossCut),
        t_h,
        t_v,
        n_e: t_h + t_v,
        v_plus,
        n_c: spec.vertex_cofactor_len() * (v - v_plus),
        n_r: spec.ledge_rows(Orientation::Horizontal) * t_h
            + spec.ledge_rows(Orientation::Vertical) * t_v,
    }
}
