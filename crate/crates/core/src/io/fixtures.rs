//! Synthetic assemblies with known ground truth and known pipeline verdicts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{Assembly, Feature, Mate, MateKind, MateType, Part};
use crate::error::{Error, Result};
use crate::geom::{AxisLine, RigidTransform, TriangleMesh, Vec3};

pub const FIXTURE_NAMES: [&str; 10] = [
    "compound_pair",
    "disconnected",
    "floating_pair",
    "hinge_flanged",
    "keyed_slider",
    "planar_tagged",
    "press_fit",
    "shaft_hole",
    "skew_loop",
    "telescope",
];

/// Sides of the polygons approximating round parts.
const ROUND_SIDES: usize = 48;
/// Radial clearance of sliding and rotating fits.
const CLEARANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureParams {
    /// Uniform scale applied to every length.
    pub scale: f64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

/// Builds a named fixture. A nonzero `seed` moves the whole assembly by a
/// seeded random rigid motion; zero leaves it in its design frame.
pub fn generate_fixture(name: &str, params: FixtureParams, seed: u64) -> Result<Assembly> {
    if !(params.scale.is_finite() && params.scale > 0.0) {
        return Err(Error::InvalidConfig(format!("fixture scale must be positive, got {}", params.scale)));
    }
    let mut b = Builder::new(name, params.scale);
    match name {
        "shaft_hole" => shaft_hole(&mut b),
        "hinge_flanged" => hinge_flanged(&mut b),
        "keyed_slider" => keyed_slider(&mut b),
        "press_fit" => press_fit(&mut b),
        "telescope" => telescope(&mut b),
        "floating_pair" => block_pair(&mut b, 1.0, &["revolute"]),
        "compound_pair" => block_pair(&mut b, 0.0, &["revolute", "slider"]),
        "planar_tagged" => block_pair(&mut b, 0.0, &["planar"]),
        "disconnected" => disconnected(&mut b),
        "skew_loop" => skew_loop(&mut b),
        other => return Err(Error::UnknownFixture(other.to_string())),
    }
    let a = b.finish();
    a.validate()?;
    if seed == 0 {
        return Ok(a);
    }
    Ok(a.transformed(&random_motion(seed, params.scale)))
}

pub fn all_fixtures(params: FixtureParams, seed: u64) -> Result<Vec<Assembly>> {
    FIXTURE_NAMES.iter().map(|n| generate_fixture(n, params, seed)).collect()
}

fn random_motion(seed: u64, scale: f64) -> RigidTransform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = [0.0; 4];
    loop {
        for c in &mut q {
            *c = rng.random_range(-1.0..1.0);
        }
        let n2: f64 = q.iter().map(|c| c * c).sum();
        if n2 > 0.01 && n2 <= 1.0 {
            break;
        }
    }
    let t = Vec3::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    RigidTransform::from_wxyz(q, t * scale)
}

struct Builder {
    scale: f64,
    assembly: Assembly,
}

impl Builder {
    fn new(name: &str, scale: f64) -> Self {
        let mut assembly = Assembly { id: name.to_string(), ..Default::default() };
        assembly.metadata.insert("fixture".into(), name.into());
        Self { scale, assembly }
    }

    fn expect(&mut self, key: &str, value: &str) {
        self.assembly.metadata.insert(key.into(), value.into());
    }

    /// Adds a part given in world coordinates. The part frame is put at the
    /// centre of its bounding box so placements are exercised.
    fn part(&mut self, id: &str, mesh: TriangleMesh, features: Vec<Feature>) {
        let mesh = TriangleMesh { vertices: mesh.vertices.iter().map(|v| v * self.scale).collect(), ..mesh };
        let features: Vec<Feature> = features.iter().map(|f| scaled(f, self.scale)).collect();
        let placement = RigidTransform::translation_only(mesh.aabb().center());
        let to_local = placement.inverse();
        self.assembly.parts.push(Part {
            id: id.into(),
            mesh: mesh.transformed(&to_local),
            features: features.iter().map(|f| f.transformed(&to_local)).collect(),
            placement,
        });
    }

    fn mate(&mut self, id: &str, a: &str, b: &str, kind: impl Into<MateKind>, point: Vec3, direction: Vec3) {
        let axis = AxisLine::new(point * self.scale, direction).expect("fixture axis");
        self.assembly.mates.push(Mate::new(id, a, b, kind, axis));
    }

    fn finish(self) -> Assembly {
        self.assembly
    }
}

fn scaled(f: &Feature, s: f64) -> Feature {
    match f {
        Feature::PlanarFace { centroid, normal } => Feature::PlanarFace { centroid: centroid * s, normal: *normal },
        Feature::CylindricalFace { axis, radius, extent } => {
            let (p, d) = (axis.point(), axis.direction());
            Feature::cylinder(p * s + d * (extent.0 * s), p * s + d * (extent.1 * s), radius * s).expect("scaled cylinder")
        }
    }
}

fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

fn planar(c: Vec3, n: Vec3) -> Feature {
    Feature::planar(c, n).expect("fixture face")
}

fn cylinder(start: Vec3, end: Vec3, radius: f64) -> Feature {
    Feature::cylinder(start, end, radius).expect("fixture cylinder")
}

/// Six face features of an axis-aligned box.
fn box_faces(min: Vec3, max: Vec3) -> Vec<Feature> {
    let c = (min + max) * 0.5;
    let mut out = Vec::new();
    for k in 0..3 {
        let mut n = Vec3::zeros();
        n[k] = 1.0;
        let mut lo = c;
        lo[k] = min[k];
        let mut hi = c;
        hi[k] = max[k];
        out.push(planar(lo, -n));
        out.push(planar(hi, n));
    }
    out
}

fn boxed(min: Vec3, max: Vec3) -> (TriangleMesh, Vec<Feature>) {
    (TriangleMesh::cuboid(min, max), box_faces(min, max))
}

/// Round rod along z: mesh plus its cylinder and end-cap features.
fn rod_z(radius: f64, z0: f64, z1: f64) -> (TriangleMesh, Vec<Feature>) {
    let mesh = TriangleMesh::prism(ROUND_SIDES, radius, 0.0, z0, z1);
    let features = vec![
        cylinder(v(0.0, 0.0, z0), v(0.0, 0.0, z1), radius),
        planar(v(0.0, 0.0, z0), -Vec3::z()),
        planar(v(0.0, 0.0, z1), Vec3::z()),
    ];
    (mesh, features)
}

/// Round sleeve along z with a coaxial bore.
fn sleeve_z(outer: f64, inner: f64, z0: f64, z1: f64) -> (TriangleMesh, Vec<Feature>) {
    let mesh = TriangleMesh::tube(ROUND_SIDES, outer, inner, 0.0, z0, z1);
    let features = vec![
        cylinder(v(0.0, 0.0, z0), v(0.0, 0.0, z1), outer),
        cylinder(v(0.0, 0.0, z0), v(0.0, 0.0, z1), inner),
        planar(v(0.0, 0.0, z0), -Vec3::z()),
        planar(v(0.0, 0.0, z1), Vec3::z()),
    ];
    (mesh, features)
}

fn merge(parts: &[(TriangleMesh, Vec<Feature>)]) -> (TriangleMesh, Vec<Feature>) {
    let mut mesh = TriangleMesh { vertices: vec![], triangles: vec![] };
    let mut features = Vec::new();
    for (m, f) in parts {
        mesh.merge(m);
        features.extend(f.iter().cloned());
    }
    (mesh, features)
}

fn moved((mesh, features): (TriangleMesh, Vec<Feature>), t: &RigidTransform) -> (TriangleMesh, Vec<Feature>) {
    (mesh.transformed(t), features.iter().map(|f| f.transformed(t)).collect())
}

/// Coaxial shaft in a clearance bore, free to turn and slide.
fn shaft_hole(b: &mut Builder) {
    let (m, f) = sleeve_z(10.0, 5.0, -10.0, 10.0);
    b.part("hub", m, f);
    let (m, f) = rod_z(5.0 - CLEARANCE, -20.0, 20.0);
    b.part("shaft", m, f);
    b.mate("m1", "hub", "shaft", MateType::Cylindrical, Vec3::zeros(), Vec3::z());
    b.expect("expected_verdict", "kept");
    b.expect("expected_type", "cylindrical");
}

/// Pin through a knuckle, held axially by flanges touching both ends.
fn hinge_flanged(b: &mut Builder) {
    let (m, f) = sleeve_z(10.0, 5.0, -10.0, 10.0);
    b.part("knuckle", m, f);
    let (m, f) = merge(&[rod_z(5.0 - CLEARANCE, -10.0, 10.0), rod_z(8.0, 10.0, 12.0), rod_z(8.0, -12.0, -10.0)]);
    b.part("pin", m, f);
    b.mate("m1", "knuckle", "pin", MateType::Revolute, Vec3::zeros(), Vec3::z());
    b.expect("expected_verdict", "kept");
    b.expect("expected_type", "revolute");
}

/// Square bar in a square channel: slides, cannot turn.
fn keyed_slider(b: &mut Builder) {
    let (outer, inner, bar) = (10.0, 5.0, 5.0 - CLEARANCE);
    let channel = TriangleMesh::tube(4, outer * SQRT_2, inner * SQRT_2, FRAC_PI_4, -10.0, 10.0);
    let mut cf = Vec::new();
    for n in [Vec3::x(), Vec3::y()] {
        for h in [outer, inner] {
            cf.push(planar(n * h, n));
            cf.push(planar(-n * h, -n));
        }
    }
    cf.push(planar(v(0.0, 0.0, -10.0), -Vec3::z()));
    cf.push(planar(v(0.0, 0.0, 10.0), Vec3::z()));
    b.part("channel", channel, cf);
    let (m, f) = boxed(v(-bar, -bar, -20.0), v(bar, bar, 20.0));
    b.part("bar", m, f);
    b.mate("m1", "bar", "channel", MateType::Slider, Vec3::zeros(), Vec3::z());
    b.expect("expected_verdict", "kept");
    b.expect("expected_type", "slider");
}

/// Block filling a closed cavity; only a fasten mate.
fn press_fit(b: &mut Builder) {
    let (o, i) = (10.0, 5.0);
    let shell = TriangleMesh::hollow_cuboid(Vec3::repeat(-o), Vec3::repeat(o), Vec3::repeat(-i), Vec3::repeat(i));
    let mut sf = box_faces(Vec3::repeat(-o), Vec3::repeat(o));
    sf.extend(box_faces(Vec3::repeat(-i), Vec3::repeat(i)).into_iter().map(|f| match f {
        Feature::PlanarFace { centroid, normal } => planar(centroid, -normal),
        other => other,
    }));
    b.part("housing", shell, sf);
    let (m, f) = boxed(Vec3::repeat(-i), Vec3::repeat(i));
    b.part("block", m, f);
    b.mate("m1", "block", "housing", MateType::Fasten, Vec3::zeros(), Vec3::z());
    b.expect("expected_verdict", "rejected");
    b.expect("expected_stage", "moving_part");
    b.expect("expected_type", "fasten");
}

/// Tube on trunnions between two brackets bolted to a base. Only one
/// trunnion is mated, so densification must add the other.
fn telescope(b: &mut Builder) {
    let (base_m, mut base_f) = boxed(v(-15.0, -5.0, 0.0), v(15.0, 5.0, 2.0));
    for x in [-14.0, 14.0] {
        base_f.push(cylinder(v(x, 0.0, 0.0), v(x, 0.0, 2.0), 0.5));
    }
    b.part("base", base_m, base_f);

    for (id, x0, x1, bolt) in [("bracket_l", -15.0, -13.0, -14.0), ("bracket_r", 13.0, 15.0, 14.0)] {
        let (m, mut f) = boxed(v(x0, -3.0, 2.0), v(x1, 3.0, 16.0));
        f.push(cylinder(v(bolt, 0.0, 2.0), v(bolt, 0.0, 6.0), 0.5));
        f.push(cylinder(v(x0, 0.0, 10.0), v(x1, 0.0, 10.0), 1.0));
        b.part(id, m, f);
    }

    // built along z, then turned onto the x axis and raised to z = 10
    let to_x = RigidTransform::translation_only(v(0.0, 0.0, 10.0))
        .compose(&RigidTransform::rotation_about(&AxisLine::new(Vec3::zeros(), Vec3::y()).unwrap(), FRAC_PI_2));
    let (body_m, mut body_f) = rod_z(4.0, -10.0, 10.0);
    body_f.retain(|f| matches!(f, Feature::CylindricalFace { .. }));
    body_f.push(planar(v(0.0, 0.0, -10.0), -Vec3::z()));
    body_f.push(planar(v(0.0, 0.0, 10.0), Vec3::z()));
    let tube = merge(&[(body_m, body_f), rod_z(1.0, 10.0, 13.0), rod_z(1.0, -13.0, -10.0)]);
    let (m, f) = moved(tube, &to_x);
    b.part("tube", m, f);

    b.mate("m1", "base", "bracket_l", MateType::Fasten, v(-14.0, 0.0, 0.0), Vec3::z());
    b.mate("m2", "base", "bracket_r", MateType::Fasten, v(14.0, 0.0, 0.0), Vec3::z());
    b.mate("m3", "bracket_l", "tube", MateType::Revolute, v(0.0, 0.0, 10.0), Vec3::x());
    b.expect("expected_verdict", "kept");
    b.expect("expected_densified", "1");
}

/// Two cubes side by side along x, `gap` apart, with the given mate tags on
/// their common face-normal line.
fn block_pair(b: &mut Builder, gap: f64, tags: &[&str]) {
    let (m, f) = boxed(v(0.0, 0.0, 0.0), v(2.0, 2.0, 2.0));
    b.part("left", m, f);
    let (m, f) = boxed(v(2.0 + gap, 0.0, 0.0), v(4.0 + gap, 2.0, 2.0));
    b.part("right", m, f);
    for (k, tag) in tags.iter().enumerate() {
        b.mate(&format!("m{}", k + 1), "left", "right", MateKind::from_tag(tag), v(0.0, 1.0, 1.0), Vec3::x());
    }
    b.expect("expected_verdict", "rejected");
    let stage = if gap > 0.0 {
        "geometric_consistency"
    } else if tags.len() > 1 {
        "compound_mate"
    } else {
        "type_whitelist"
    };
    b.expect("expected_stage", stage);
}

fn disconnected(b: &mut Builder) {
    let (m, f) = boxed(v(0.0, 0.0, 0.0), v(2.0, 2.0, 2.0));
    b.part("a", m, f);
    let (m, f) = boxed(v(2.0, 0.0, 0.0), v(4.0, 2.0, 2.0));
    b.part("b", m, f);
    let (m, f) = boxed(v(10.0, 0.0, 0.0), v(12.0, 2.0, 2.0));
    b.part("c", m, f);
    b.mate("m1", "a", "b", MateType::Revolute, v(0.0, 1.0, 1.0), Vec3::x());
    b.expect("expected_verdict", "rejected");
    b.expect("expected_stage", "connectivity");
}

/// Three cubes: `a`-`c` hinged about x, `c`-`b` hinged about y, and `a`
/// resting on `b`'s face with a shared z line but no mate. The chain's
/// motion between `a` and `b` is not a single simple joint.
fn skew_loop(b: &mut Builder) {
    let (m, f) = boxed(v(0.0, 0.0, 0.0), v(2.0, 2.0, 2.0));
    b.part("a", m, f);
    let hinge = cylinder(v(2.0, 0.0, 2.0), v(2.0, 2.0, 2.0), 0.5);
    let (m, mut f) = boxed(v(0.0, 0.0, 2.0), v(2.0, 2.0, 4.0));
    f.push(hinge.clone());
    b.part("b", m, f);
    let (m, mut f) = boxed(v(2.0, 0.0, 0.0), v(4.0, 2.0, 2.0));
    f.push(hinge);
    b.part("c", m, f);
    b.mate("m1", "a", "c", MateType::Revolute, v(0.0, 1.0, 1.0), Vec3::x());
    b.mate("m2", "b", "c", MateType::Revolute, v(2.0, 0.0, 2.0), Vec3::y());
    b.expect("expected_verdict", "rejected");
    b.expect("expected_stage", "densify_complex");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_builds_and_validates() {
        for name in FIXTURE_NAMES {
            let a = generate_fixture(name, FixtureParams::default(), 0).unwrap();
            a.validate().unwrap();
            assert_eq!(a.id, name);
            for p in &a.parts {
                assert!(!p.mesh.is_empty(), "{name}/{}", p.id);
            }
        }
    }

    #[test]
    fn unknown_name_errors() {
        assert!(matches!(
            generate_fixture("nope", FixtureParams::default(), 0),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let p = FixtureParams::default();
        assert_eq!(generate_fixture("telescope", p, 7).unwrap(), generate_fixture("telescope", p, 7).unwrap());
        assert_ne!(generate_fixture("telescope", p, 7).unwrap(), generate_fixture("telescope", p, 8).unwrap());
    }
}
