use super::spec::{Orientation, SplineSpaceSpec};
use super::subdivision::{Subdivision, SubdivisionError};
use super::tmesh::TMesh;
use super::topology::Topology;

/// Outcome of repeatedly removing vanished interior l-edges.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub subdivision: Subdivision,
    /// Interior l-edges deleted across all rounds.
    pub removed_ledges: usize,
    /// Dangling segments pruned across all rounds.
    pub pruned_segments: usize,
    pub rounds: usize,
}

/// Removes every vanished interior l-edge, prunes what is left dangling and
/// repeats until no vanished l-edge remains.
pub fn reduce_subdivision(sub: &Subdivision, spec: &SplineSpaceSpec) -> Reduction {
    let mut cur = sub.clone();
    let mut removed_ledges = 0;
    let mut pruned_segments = 0;
    let mut rounds = 0;
    loop {
        let topo = Topology::from_subdivision(&cur);
        let vanished: Vec<_> = topo
            .ledges
            .iter()
            .filter(|l| l.is_interior() && spec.is_vanished(l.orientation, l.len()))
            .collect();
        if vanished.is_empty() {
            break;
        }
        for l in &vanished {
            let line = l.fixed_knot_index;
            let (a, b) = (l.positions[0], *l.positions.last().unwrap());
            for p in a..b {
                match l.orientation {
                    Orientation::Horizontal => cur.clear_hseg(p, line),
                    Orientation::Vertical => cur.clear_vseg(line, p),
                }
            }
        }
        removed_ledges += vanished.len();
        pruned_segments += cur.prune_dangling();
        rounds += 1;
    }
    Reduction {
        subdivision: cur,
        removed_ledges,
        pruned_segments,
        rounds,
    }
}

/// Reduced mesh as a rectangle T-mesh. Fails when a removal leaves a face
/// that is not a rectangle.
pub fn reduce_vanished(mesh: &TMesh, spec: &SplineSpaceSpec) -> Result<TMesh, SubdivisionError> {
    reduce_subdivision(&Subdivision::from_mesh(mesh), spec)
        .subdivision
        .to_mesh()
}
