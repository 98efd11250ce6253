//! Recovering part-to-part degrees of freedom from CAD assemblies.
//!
//! Assemblies are triangle meshes with analytic features, placed in a common
//! world frame and connected by typed mates. The crate provides the motion
//! algebra over mate types, geometric analysis (contact, candidate axes,
//! sweep feasibility), a curation pipeline that filters and densifies mates,
//! heuristic predictors with an evaluation harness, and file I/O.

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod error;
pub mod eval;
pub mod geom;
pub mod io;
pub mod motion;
pub mod pipeline;
pub mod predict;

pub use assembly::{Assembly, Feature, Mate, MateKind, MateType, Part, Provenance};
pub use config::{ContactTol, ToleranceConfig};
pub use error::{Error, Result};
pub use motion::{relative_motion, MotionGroup};
