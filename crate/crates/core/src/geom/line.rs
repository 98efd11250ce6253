use std::cmp::Ordering;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::{RigidTransform, Vec3};

const POINT_QUANTUM: f64 = 1e-4;
const DIRECTION_QUANTUM: f64 = 1e-6;
const SIGN_EPS: f64 = 1e-9;

/// An undirected infinite line in canonical form.
///
/// `point` is the foot of the perpendicular from the origin and `direction`
/// is a unit vector whose first component with magnitude above 1e-9 is
/// positive. Two descriptions of the same geometric line canonicalize to
/// the same [`LineKey`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisLine {
    point: Vec3,
    direction: Vec3,
}

impl Serialize for AxisLine {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("AxisLine", 2)?;
        let (point, direction) = self.to_arrays();
        st.serialize_field("point", &point)?;
        st.serialize_field("direction", &direction)?;
        st.end()
    }
}

/// Quantized canonical line, hashable and totally ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineKey(pub [i64; 6]);

impl AxisLine {
    pub fn new(point: Vec3, direction: Vec3) -> Result<Self> {
        canonicalize_line(point, direction)
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn key(&self) -> LineKey {
        let q = |v: f64, quantum: f64| (v / quantum).round() as i64;
        LineKey([
            q(self.point.x, POINT_QUANTUM),
            q(self.point.y, POINT_QUANTUM),
            q(self.point.z, POINT_QUANTUM),
            q(self.direction.x, DIRECTION_QUANTUM),
            q(self.direction.y, DIRECTION_QUANTUM),
            q(self.direction.z, DIRECTION_QUANTUM),
        ])
    }

    /// Canonical ordering: lexicographic on the quantized fields.
    pub fn canonical_cmp(&self, other: &AxisLine) -> Ordering {
        self.key().cmp(&other.key())
    }

    pub fn to_arrays(&self) -> ([f64; 3], [f64; 3]) {
        (self.point.into(), self.direction.into())
    }

    pub fn transformed(&self, t: &RigidTransform) -> AxisLine {
        canonicalize_line(t.apply_point(&self.point), t.apply_vector(&self.direction))
            .expect("rigid transforms preserve unit directions")
    }

    /// Signed coordinate of the projection of `p` onto this line.
    pub fn param_of(&self, p: &Vec3) -> f64 {
        (p - self.point).dot(&self.direction)
    }

    pub fn distance_to_point(&self, p: &Vec3) -> f64 {
        let rel = p - self.point;
        (rel - self.direction * rel.dot(&self.direction)).norm()
    }

    /// Same direction, passing through `through`.
    pub fn parallel_through(&self, through: Vec3) -> AxisLine {
        canonicalize_line(through, self.direction).expect("unit direction")
    }
}

/// Unit direction with the sign convention used by [`AxisLine`].
pub fn canonical_direction(direction: Vec3) -> Result<Vec3> {
    let n = direction.norm();
    if !n.is_finite() || n <= 1e-9 {
        return Err(Error::ZeroDirection);
    }
    let mut d = if (n - 1.0).abs() <= 1e-15 { direction } else { direction / n };
    if let Some(first) = d.iter().find(|c| c.abs() > SIGN_EPS) {
        if *first < 0.0 {
            d = -d;
        }
    }
    Ok(d.map(|c| c + 0.0))
}

pub fn canonicalize_line(point: Vec3, direction: Vec3) -> Result<AxisLine> {
    let d = canonical_direction(direction)?;
    let along = point.dot(&d);
    // Leave already-canonical points untouched so canonicalization is idempotent bit for bit.
    let p = if along.abs() <= 1e-12 * point.norm().max(1.0) {
        point
    } else {
        point - d * along
    };
    Ok(AxisLine { point: p.map(|c| c + 0.0), direction: d })
}

/// Unsigned angle between two undirected directions, in `[0, π/2]`.
pub fn undirected_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b).abs())
}

pub fn vectors_parallel(a: &Vec3, b: &Vec3, tol: &ToleranceConfig) -> bool {
    undirected_angle(a, b) <= tol.angle_tol
}

pub fn directions_parallel(a: &AxisLine, b: &AxisLine, tol: &ToleranceConfig) -> bool {
    vectors_parallel(&a.direction, &b.direction, tol)
}

/// Offset between two near-parallel lines, measured symmetrically at their
/// canonical feet.
pub fn line_offset(a: &AxisLine, b: &AxisLine) -> f64 {
    a.distance_to_point(&b.point).max(b.distance_to_point(&a.point))
}

pub fn lines_coincident(a: &AxisLine, b: &AxisLine, tol: &ToleranceConfig) -> bool {
    directions_parallel(a, b, tol) && line_offset(a, b) <= tol.dist_tol
}

/// Sorts by canonical order and drops every line coincident with an
/// earlier kept line.
pub fn dedup_lines(mut lines: Vec<AxisLine>, tol: &ToleranceConfig) -> Vec<AxisLine> {
    lines.sort_by(|a, b| a.canonical_cmp(b));
    let mut kept: Vec<AxisLine> = Vec::with_capacity(lines.len());
    for line in lines {
        if !kept.iter().any(|k| lines_coincident(k, &line, tol)) {
            kept.push(line);
        }
    }
    kept
}
