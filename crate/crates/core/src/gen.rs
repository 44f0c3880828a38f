//! Random T-meshes by face splitting, and the pinwheel counterexample.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::{Face, Knots, Orientation, Rational, Subdivision, TMesh};

/// Coordinate range of the working grid before compression.
const SPAN: u32 = 1 << 12;
const PARTIAL_SPLIT_PROB: f64 = 0.7;

#[derive(Clone, Copy)]
struct Rect {
    x0: u32,
    x1: u32,
    y0: u32,
    y1: u32,
}

/// Picks a split coordinate strictly inside `(lo, hi)`: an existing line
/// when one is available and the coin says so, otherwise a fresh one.
fn split_at(rng: &mut ChaCha8Rng, lines: &BTreeSet<u32>, lo: u32, hi: u32) -> Option<u32> {
    let existing: Vec<u32> = lines.range(lo + 1..hi).copied().collect();
    if !existing.is_empty() && rng.gen_bool(0.5) {
        return Some(existing[rng.gen_range(0..existing.len())]);
    }
    let fresh: Vec<u32> = (lo + 1..hi).filter(|v| !lines.contains(v)).collect();
    if fresh.is_empty() {
        return existing.first().copied();
    }
    // Sample near the middle third so later splits keep room.
    let k = fresh.len();
    let a = k / 3;
    let b = (2 * k / 3).max(a + 1);
    Some(fresh[rng.gen_range(a..b)])
}

/// Deterministic random T-mesh with up to `max_splits` face splits.
pub fn random_tmesh(max_splits: usize, seed: u64) -> TMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut faces = vec![Rect {
        x0: 0,
        x1: SPAN,
        y0: 0,
        y1: SPAN,
    }];
    let mut xs: BTreeSet<u32> = [0, SPAN].into();
    let mut ys: BTreeSet<u32> = [0, SPAN].into();
    let splits = rng.gen_range(0..=max_splits);
    for _ in 0..splits {
        let f = faces[rng.gen_range(0..faces.len())];
        let vertical = rng.gen_bool(0.5);
        let partial = rng.gen_bool(PARTIAL_SPLIT_PROB);
        let c = if vertical {
            split_at(&mut rng, &xs, f.x0, f.x1)
        } else {
            split_at(&mut rng, &ys, f.y0, f.y1)
        };
        let Some(c) = c else { continue };
        let mut next = Vec::with_capacity(faces.len() + 1);
        for g in &faces {
            let hit = if partial {
                g.x0 == f.x0 && g.y0 == f.y0
            } else if vertical {
                g.x0 < c && c < g.x1
            } else {
                g.y0 < c && c < g.y1
            };
            if !hit {
                next.push(*g);
            } else if vertical {
                next.push(Rect { x1: c, ..*g });
                next.push(Rect { x0: c, ..*g });
            } else {
                next.push(Rect { y1: c, ..*g });
                next.push(Rect { y0: c, ..*g });
            }
        }
        faces = next;
        if vertical {
            xs.insert(c);
        } else {
            ys.insert(c);
        }
    }
    compress(&mut rng, &faces)
}

fn compress(rng: &mut ChaCha8Rng, faces: &[Rect]) -> TMesh {
    let used_x: BTreeSet<u32> = faces.iter().flat_map(|f| [f.x0, f.x1]).collect();
    let used_y: BTreeSet<u32> = faces.iter().flat_map(|f| [f.y0, f.y1]).collect();
    let index = |set: &BTreeSet<u32>, v: u32| set.range(..v).count();
    let mut knots = |n: usize| -> Vec<Rational> {
        let mut acc = 0i64;
        (0..n)
            .map(|k| {
                if k > 0 {
                    acc += rng.gen_range(1..=3);
                }
                Rational::from_integer(acc.into())
            })
            .collect()
    };
    let kx = knots(used_x.len());
    let ky = knots(used_y.len());
    let faces = faces
        .iter()
        .map(|f| {
            Face::new(
                index(&used_x, f.x0),
                index(&used_x, f.x1),
                index(&used_y, f.y0),
                index(&used_y, f.y1),
            )
        })
        .collect();
    TMesh::new(kx, ky, faces).expect("split faces are well formed")
}

/// Four interior l-edges chasing each other around the centre, each with
/// five vertices, two of them on rays from the boundary. Knots are
/// `0, 1, …, 9` on both axes.
pub fn pinwheel_counterexample() -> TMesh {
    use Orientation::{Horizontal as H, Vertical as V};
    let lines = [
        // Interior l-edges.
        (H, 2, 2, 8),
        (V, 7, 2, 8),
        (H, 7, 1, 7),
        (V, 2, 1, 7),
        // Cross-cuts.
        (V, 1, 0, 9),
        (V, 8, 0, 9),
        (H, 1, 0, 9),
        (H, 8, 0, 9),
        // Rays ending on the interior l-edges.
        (V, 3, 0, 2),
        (V, 4, 0, 2),
        (H, 3, 7, 9),
        (H, 4, 7, 9),
        (V, 5, 7, 9),
        (V, 6, 7, 9),
        (H, 5, 0, 2),
        (H, 6, 0, 2),
        // Rays in the outer frame.
        (V, 5, 0, 1),
        (H, 5, 8, 9),
        (V, 4, 8, 9),
        (H, 4, 0, 1),
    ];
    let k: Vec<Rational> = (0..10)
        .map(|v: i64| Rational::from_integer(v.into()))
        .collect();
    Subdivision::from_lines(
        Knots {
            xs: k.clone(),
            ys: k,
        },
        &lines,
    )
    .expect("lines lie on the knot grid")
    .to_mesh()
    .expect("pinwheel lines bound rectangles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{extract_topology, mesh_counts, validate, SplineSpaceSpec};

    #[test]
    fn zero_splits_is_one_face() {
        for seed in 0..5 {
            assert_eq!(random_tmesh(0, seed).faces().len(), 1);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        for seed in 0..20 {
            assert_eq!(
                random_tmesh(10, seed).to_text(),
                random_tmesh(10, seed).to_text()
            );
        }
        let distinct: BTreeSet<String> = (0..20).map(|s| random_tmesh(10, s).to_text()).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn generated_meshes_validate() {
        for seed in 0..1000 {
            let m = random_tmesh(12, seed);
            let r = validate(&m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(r.euler, 1);
        }
    }

    #[test]
    fn pinwheel_shape() {
        let m = pinwheel_counterexample();
        validate(&m).unwrap();
        let t = extract_topology(&m);
        let inner = t.interior_ledges();
        assert_eq!(inner.len(), 4);
        for &l in &inner {
            let e = &t.ledges[l];
            assert_eq!(e.len(), 5);
            let mono = e.vertex_list[1..4]
                .iter()
                .filter(|&&v| t.is_mono_vertex(v))
                .count();
            assert_eq!(mono, 2);
        }
        let sp = SplineSpaceSpec::new(3, 3, 2, 2).unwrap();
        let c = mesh_counts(&t, &sp);
        assert_eq!((c.c_h, c.c_v, c.v_plus), (2, 2, 16));
        assert_eq!((c.n_r, c.n_c), (16, 16));
        assert_eq!(16 + 4 * c.c_h + 4 * c.c_v + c.v_plus + 1, 49);
    }

    #[test]
    fn pinwheel_is_rotation_symmetric() {
        // (x, y) -> (9 - y, x) maps the face set onto itself.
        let m = pinwheel_counterexample();
        let mut a: Vec<[usize; 4]> = m.faces().iter().map(Face::as_array).collect();
        let mut b: Vec<[usize; 4]> = m
            .faces()
            .iter()
            .map(|f| [9 - f.iy1, 9 - f.iy0, f.ix0, f.ix1])
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
