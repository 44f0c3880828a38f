//! T-mesh representation, validation and combinatorial structure.

mod reduce;
mod spec;
mod subdivision;
mod tmesh;
mod topology;

pub use reduce::{reduce_subdivision, reduce_vanished, Reduction};
pub use spec::{thresholds, Orientation, SpecError, SplineSpaceSpec};
pub use subdivision::{Dir, Subdivision, SubdivisionError};
pub use tmesh::{
    parse_rational, parse_tmesh, validate, Axis, Face, Knots, MeshError, Rational, TMesh,
    ValidationError, ValidationReport,
};
pub use topology::{
    extract_topology, mesh_counts, Edge, LEdge, LEdgeKind, MeshCounts, Topology, Vertex, VertexId,
};
