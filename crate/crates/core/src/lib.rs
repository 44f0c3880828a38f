//! Dimension of bi-degree spline spaces over planar T-meshes.

pub mod analysis;
pub mod cli;
pub mod conformality;
pub mod gen;
pub mod linalg;
pub mod mesh;
pub mod oracle;
