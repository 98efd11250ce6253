//! Parts, features, mates and the assembly that ties them together.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Aabb, AxisLine, RigidTransform, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MateType {
    Fasten,
    Revolute,
    Slider,
    Cylindrical,
}

impl MateType {
    /// Fixed order used for every tie-break.
    pub const ALL: [MateType; 4] = [MateType::Fasten, MateType::Revolute, MateType::Slider, MateType::Cylindrical];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MateType::Fasten => "fasten",
            MateType::Revolute => "revolute",
            MateType::Slider => "slider",
            MateType::Cylindrical => "cylindrical",
        }
    }

    /// (rotational, translational) degrees of freedom.
    pub fn dof(self) -> (u8, u8) {
        match self {
            MateType::Fasten => (0, 0),
            MateType::Revolute => (1, 0),
            MateType::Slider => (0, 1),
            MateType::Cylindrical => (1, 1),
        }
    }
}

impl fmt::Display for MateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MateType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MateType::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| s.to_string())
    }
}

/// Declared mate type. Tags outside the four supported types are kept
/// verbatim so the whitelist filter can see them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MateKind {
    Typed(MateType),
    Unsupported(String),
}

impl MateKind {
    pub fn from_tag(tag: &str) -> Self {
        tag.parse().map(MateKind::Typed).unwrap_or_else(|_| MateKind::Unsupported(tag.to_string()))
    }

    pub fn tag(&self) -> &str {
        match self {
            MateKind::Typed(t) => t.as_str(),
            MateKind::Unsupported(s) => s,
        }
    }

    pub fn mate_type(&self) -> Option<MateType> {
        match self {
            MateKind::Typed(t) => Some(*t),
            MateKind::Unsupported(_) => None,
        }
    }
}

impl From<MateType> for MateKind {
    fn from(t: MateType) -> Self {
        MateKind::Typed(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    Densified,
    Predicted,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Densified => "densified",
            Provenance::Predicted => "predicted",
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "original" => Ok(Provenance::Original),
            "densified" => Ok(Provenance::Densified),
            "predicted" => Ok(Provenance::Predicted),
            other => Err(other.to_string()),
        }
    }
}

/// Analytic surface data carried alongside the tessellation.
#[derive(Debug, Clone, PartialEq)]
pub enum Feature {
    PlanarFace { centroid: Vec3, normal: Vec3 },
    /// `extent` is the `[lo, hi]` parameter range along the canonical `axis`.
    CylindricalFace { axis: AxisLine, radius: f64, extent: (f64, f64) },
}

impl Feature {
    pub fn planar(centroid: Vec3, normal: Vec3) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 1e-9) {
            return Err(Error::InvalidFeature("planar face normal has zero length".into()));
        }
        let normal = if (n - 1.0).abs() <= 1e-15 { normal } else { normal / n };
        Ok(Feature::PlanarFace { centroid, normal })
    }

    /// Cylinder whose axis runs from `start` to `end`.
    pub fn cylinder(start: Vec3, end: Vec3, radius: f64) -> Result<Self> {
        let axis = AxisLine::new(start, end - start).map_err(|_| {
            Error::InvalidFeature("cylindrical face has zero axial extent".into())
        })?;
        let (a, b) = (axis.param_of(&start), axis.param_of(&end));
        Self::cylinder_on(axis, radius, (a.min(b), a.max(b)))
    }

    /// Cylinder given on an arbitrary axis parametrization; the extent is
    /// re-expressed on the canonical axis.
    pub fn cylinder_on_axis(point: Vec3, direction: Vec3, radius: f64, extent: (f64, f64)) -> Result<Self> {
        let axis = AxisLine::new(point, direction)
            .map_err(|_| Error::InvalidFeature("cylindrical face axis has zero length".into()))?;
        if axis.point() == point && axis.direction() == direction {
            return Self::cylinder_on(axis, radius, extent);
        }
        let d = direction.normalize();
        let (a, b) = (axis.param_of(&(point + d * extent.0)), axis.param_of(&(point + d * extent.1)));
        if extent.0.partial_cmp(&extent.1) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidFeature("cylindrical face extent is empty".into()));
        }
        Self::cylinder_on(axis, radius, (a.min(b), a.max(b)))
    }

    fn cylinder_on(axis: AxisLine, radius: f64, extent: (f64, f64)) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidFeature(format!("cylinder radius must be positive, got {radius}")));
        }
        if !(extent.0.is_finite() && extent.1.is_finite() && extent.0 < extent.1) {
            return Err(Error::InvalidFeature("cylindrical face extent is empty".into()));
        }
        Ok(Feature::CylindricalFace { axis, radius, extent })
    }

    /// The line this feature contributes to the candidate-axis set.
    pub fn axis_line(&self) -> AxisLine {
        match self {
            Feature::PlanarFace { centroid, normal } => AxisLine::new(*centroid, *normal).expect("unit normal"),
            Feature::CylindricalFace { axis, .. } => *axis,
        }
    }

    pub fn transformed(&self, t: &RigidTransform) -> Feature {
        match self {
            Feature::PlanarFace { centroid, normal } => {
                Feature::PlanarFace { centroid: t.apply_point(centroid), normal: t.apply_vector(normal) }
            }
            Feature::CylindricalFace { axis, radius, extent } => {
                let start = axis.point() + axis.direction() * extent.0;
                let end = axis.point() + axis.direction() * extent.1;
                Feature::cylinder(t.apply_point(&start), t.apply_point(&end), *radius)
                    .expect("rigid motion preserves a valid cylinder")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub id: String,
    /// Geometry in the part-local frame.
    pub mesh: TriangleMesh,
    /// Features in the part-local frame.
    pub features: Vec<Feature>,
    /// Part → world.
    pub placement: RigidTransform,
}

impl Part {
    pub fn world_features(&self) -> impl Iterator<Item = Feature> + '_ {
        self.features.iter().map(|f| f.transformed(&self.placement))
    }

    pub fn world_mesh(&self) -> TriangleMesh {
        self.mesh.transformed(&self.placement)
    }

    pub fn world_aabb(&self) -> Aabb {
        Aabb::from_points(&self.mesh.vertices.iter().map(|v| self.placement.apply_point(v)).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mate {
    pub id: String,
    pub part_a: String,
    pub part_b: String,
    pub kind: MateKind,
    /// World frame.
    pub axis: AxisLine,
    pub provenance: Provenance,
}

impl Mate {
    pub fn new(
        id: impl Into<String>,
        part_a: impl Into<String>,
        part_b: impl Into<String>,
        kind: impl Into<MateKind>,
        axis: AxisLine,
    ) -> Self {
        Self {
            id: id.into(),
            part_a: part_a.into(),
            part_b: part_b.into(),
            kind: kind.into(),
            axis,
            provenance: Provenance::Original,
        }
    }

    pub fn mate_type(&self) -> Option<MateType> {
        self.kind.mate_type()
    }

    pub fn pair(&self) -> (String, String) {
        unordered_pair(&self.part_a, &self.part_b)
    }

    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.part_a == a && self.part_b == b) || (self.part_a == b && self.part_b == a)
    }
}

pub fn unordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assembly {
    pub id: String,
    pub parts: Vec<Part>,
    pub mates: Vec<Mate>,
    pub metadata: BTreeMap<String, String>,
}

impl Assembly {
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for part in &self.parts {
            if !ids.insert(part.id.as_str()) {
                return Err(Error::InvalidAssembly(format!("duplicate part id `{}`", part.id)));
            }
            part.mesh.validate()?;
        }
        let mut mate_ids = HashSet::new();
        for mate in &self.mates {
            if !mate_ids.insert(mate.id.as_str()) {
                return Err(Error::InvalidAssembly(format!("duplicate mate id `{}`", mate.id)));
            }
            if mate.part_a == mate.part_b {
                return Err(Error::InvalidAssembly(format!("mate `{}` connects a part to itself", mate.id)));
            }
            for p in [&mate.part_a, &mate.part_b] {
                if !ids.contains(p.as_str()) {
                    return Err(Error::InvalidAssembly(format!("mate `{}` references unknown part `{p}`", mate.id)));
                }
            }
        }
        Ok(())
    }

    pub fn part(&self, id: &str) -> Result<&Part> {
        self.parts.iter().find(|p| p.id == id).ok_or_else(|| Error::UnknownPart(id.to_string()))
    }

    pub fn part_index(&self, id: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.id == id)
    }

    pub fn world_aabb(&self) -> Aabb {
        self.parts.iter().fold(Aabb::empty(), |acc, p| acc.union(&p.world_aabb()))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.world_aabb().diagonal()
    }

    pub fn mates_between<'a>(&'a self, a: &'a str, b: &'a str) -> impl Iterator<Item = &'a Mate> + 'a {
        self.mates.iter().filter(move |m| m.connects(a, b))
    }

    pub fn is_mated(&self, a: &str, b: &str) -> bool {
        self.mates_between(a, b).next().is_some()
    }

    /// Part ids sorted lexicographically.
    pub fn sorted_part_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.parts.iter().map(|p| p.id.clone()).collect();
        ids.sort();
        ids
    }

    /// Applies a rigid motion to the whole assembly.
    pub fn transformed(&self, t: &RigidTransform) -> Assembly {
        let mut out = self.clone();
        for part in &mut out.parts {
            part.placement = t.compose(&part.placement);
        }
        for mate in &mut out.mates {
            mate.axis = mate.axis.transformed(t);
        }
        out
    }
}

/// Direction check used by loaders: unit length within `eps`.
pub fn is_unit(v: &Vec3, eps: f64) -> bool {
    (v.norm() - 1.0).abs() <= eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mate_type_tags_round_trip() {
        for t in MateType::ALL {
            assert_eq!(MateKind::from_tag(t.as_str()), MateKind::Typed(t));
        }
        assert_eq!(MateKind::from_tag("planar"), MateKind::Unsupported("planar".into()));
        assert_eq!(MateKind::from_tag("planar").tag(), "planar");
    }

    #[test]
    fn dof_counts() {
        assert_eq!(MateType::Fasten.dof(), (0, 0));
        assert_eq!(MateType::Revolute.dof(), (1, 0));
        assert_eq!(MateType::Slider.dof(), (0, 1));
        assert_eq!(MateType::Cylindrical.dof(), (1, 1));
    }

    #[test]
    fn cylinder_extent_follows_canonical_axis() {
        let f = Feature::cylinder(Vec3::new(0.0, 0.0, 4.0), Vec3::new(0.0, 0.0, -2.0), 1.0).unwrap();
        let Feature::CylindricalFace { axis, extent, .. } = f else { unreachable!() };
        assert_eq!(axis.direction(), Vec3::z());
        assert_eq!(extent, (-2.0, 4.0));

        let g = Feature::cylinder_on_axis(Vec3::new(1.0, 0.0, 3.0), -Vec3::z(), 1.0, (0.0, 5.0)).unwrap();
        let Feature::CylindricalFace { extent, .. } = g else { unreachable!() };
        assert!((extent.0 + 2.0).abs() < 1e-12 && (extent.1 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_features() {
        assert!(Feature::planar(Vec3::zeros(), Vec3::zeros()).is_err());
        assert!(Feature::cylinder(Vec3::zeros(), Vec3::z(), 0.0).is_err());
        assert!(Feature::cylinder(Vec3::zeros(), Vec3::zeros(), 1.0).is_err());
        assert!(Feature::cylinder_on_axis(Vec3::zeros(), Vec3::z(), 1.0, (2.0, 2.0)).is_err());
    }
}
