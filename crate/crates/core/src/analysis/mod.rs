//! Geometric analysis: contact, candidate axes and sweep feasibility.

pub mod axes;
pub mod bvh;
pub mod contact;
pub mod primitives;
pub mod sweep;

pub use axes::{axis_ambiguity, axis_equivalent, extract_axes, shared_axes, AxisAmbiguity, CandidateAxisSet};
pub use contact::{min_distance, ContactIndex, ContactReport};
pub use sweep::{sweep_feasibility, FeasibilityLabel};
