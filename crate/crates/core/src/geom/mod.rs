//! Rigid transforms, canonical lines and triangle meshes.

mod line;
mod mesh;
mod transform;

pub use line::{
    canonical_direction, canonicalize_line, dedup_lines, directions_parallel, line_offset, lines_coincident,
    undirected_angle, vectors_parallel, AxisLine, LineKey,
};
pub use mesh::{Aabb, TriangleMesh};
pub use transform::{compose_transforms, screw_decompose, RigidTransform, ScrewDecomposition};

pub type Vec3 = nalgebra::Vector3<f64>;
