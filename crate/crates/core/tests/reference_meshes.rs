//! Regression values for the hand-built meshes under `fixtures/`.

use tmesh_dim::analysis::{
    check_mono_vertex_condition, dim_diagonalizable_formula, dim_general, is_diagonalizable,
    is_diagonalizable_exhaustive, new_vertex_vector,
};
use tmesh_dim::mesh::{
    extract_topology, mesh_counts, parse_tmesh, validate, Orientation, SplineSpaceSpec, TMesh,
    Topology,
};
use tmesh_dim::oracle::dim_direct;

fn fixture(name: &str) -> TMesh {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_tmesh(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn spec(d1: usize, d2: usize, a: usize, b: usize) -> SplineSpaceSpec {
    SplineSpaceSpec::new(d1, d2, a, b).unwrap()
}

/// Interior l-edges as (orientation, line index), in topology order.
fn named(topo: &Topology, o: Orientation, line: usize) -> usize {
    topo.interior_ledges()
        .into_iter()
        .find(|&l| topo.ledges[l].orientation == o && topo.ledges[l].fixed_knot_index == line)
        .unwrap()
}

#[test]
fn small_reduced_mesh_has_dimension_24() {
    let m = fixture("small_reduced.json");
    validate(&m).unwrap();
    let sp = spec(3, 3, 2, 2);
    let r = dim_general(&m, &sp).unwrap();
    assert_eq!(r.dimension, 24);
    assert_eq!(r.removed_ledges, 1);
    assert_eq!((r.counts.c_v, r.counts.c_h), (2, 0));
    assert_eq!(dim_direct(&m, &sp).unwrap(), 24);
}

#[test]
fn diagonalizable_mesh_structure() {
    let m = fixture("diagonalizable.json");
    validate(&m).unwrap();
    let sp = spec(3, 3, 2, 2);
    let t = extract_topology(&m);
    let c = mesh_counts(&t, &sp);
    assert_eq!(
        (c.c_h, c.c_v, c.t_h, c.t_v, c.v, c.v_plus),
        (2, 2, 2, 2, 31, 14)
    );
    let rays = t
        .ledges
        .iter()
        .filter(|l| l.kind == tmesh_dim::mesh::LEdgeKind::Ray)
        .count();
    assert_eq!(rays, 5);
    let e1 = named(&t, Orientation::Horizontal, 3);
    let e2 = named(&t, Orientation::Vertical, 8);
    let e3 = named(&t, Orientation::Horizontal, 8);
    let e4 = named(&t, Orientation::Vertical, 4);
    assert_eq!(
        new_vertex_vector(&t, &[e1, e2, e3, e4]).unwrap(),
        vec![5, 5, 4, 3]
    );
    assert_eq!(
        new_vertex_vector(&t, &[e1, e4, e3, e2]).unwrap(),
        vec![5, 4, 4, 4]
    );
    assert!(is_diagonalizable(&t, &sp).is_some());
    assert!(is_diagonalizable_exhaustive(&t, &sp).is_some());
    // Each l-edge has two mono-vertices inside; three are needed.
    assert!(!check_mono_vertex_condition(&t, &sp));
    assert_eq!(dim_diagonalizable_formula(&c, &sp), 47);
    let r = dim_general(&m, &sp).unwrap();
    assert_eq!(r.dimension, 47);
    assert_eq!(dim_direct(&m, &sp).unwrap(), 47);
}

#[test]
fn three_vertex_pinwheel_is_not_diagonalizable() {
    let m = fixture("pinwheel_no_rays.json");
    let sp = spec(3, 3, 1, 1);
    let t = extract_topology(&m);
    let e1 = named(&t, Orientation::Horizontal, 2);
    let e2 = named(&t, Orientation::Vertical, 7);
    let e3 = named(&t, Orientation::Horizontal, 7);
    let e4 = named(&t, Orientation::Vertical, 2);
    assert_eq!(
        new_vertex_vector(&t, &[e1, e2, e3, e4]).unwrap(),
        vec![3, 2, 2, 1]
    );
    assert_eq!(
        new_vertex_vector(&t, &[e1, e3, e2, e4]).unwrap(),
        vec![3, 3, 1, 1]
    );
    assert_eq!(is_diagonalizable(&t, &sp), None);
    assert_eq!(is_diagonalizable_exhaustive(&t, &sp), None);
    let r = dim_general(&m, &sp).unwrap();
    assert_eq!(r.dimension, dim_direct(&m, &sp).unwrap());
}

#[test]
fn pinwheel_fixture_matches_generator() {
    assert_eq!(
        fixture("pinwheel.json"),
        tmesh_dim::gen::pinwheel_counterexample()
    );
    let m = fixture("pinwheel.json");
    assert_eq!(dim_direct(&m, &spec(3, 3, 2, 2)).unwrap(), 49);
}
