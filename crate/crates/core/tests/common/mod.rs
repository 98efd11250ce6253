//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use mateforge::geom::{AxisLine, RigidTransform, TriangleMesh, Vec3};
use mateforge::motion::{classify_transform_samples, MotionGroup};
use mateforge::eval::AnnotatedMate;
use mateforge::{Assembly, Feature, Mate, MateType, Part, ToleranceConfig};
use nalgebra::{DMatrix, DVector, Unit, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORACLE_SAMPLES: usize = 50;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(r: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn point(r: &mut impl Rng, half: f64) -> Vec3 {
    if half <= 0.0 {
        return Vec3::zeros();
    }
    Vec3::new(r.random_range(-half..half), r.random_range(-half..half), r.random_range(-half..half))
}

pub fn line(r: &mut impl Rng) -> AxisLine {
    AxisLine::new(point(r, 5.0), unit_vector(r)).unwrap()
}

pub fn rigid(r: &mut impl Rng, reach: f64) -> RigidTransform {
    let axis = Unit::new_normalize(unit_vector(r));
    let angle = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    RigidTransform::new(UnitQuaternion::from_axis_angle(&axis, angle), point(r, reach))
}

/// A unit vector orthogonal to `d`.
pub fn orthogonal(r: &mut impl Rng, d: &Vec3) -> Vec3 {
    loop {
        let v = unit_vector(r);
        let w = v - d * v.dot(d);
        if w.norm() > 0.2 {
            return w.normalize();
        }
    }
}

fn angle(r: &mut impl Rng, tol: &ToleranceConfig) -> f64 {
    let floor = 10.0 * tol.angle_tol;
    loop {
        let a: f64 = r.random_range(-FRAC_PI_2..FRAC_PI_2);
        if a.abs() >= floor {
            return a;
        }
    }
}

fn slide(r: &mut impl Rng) -> f64 {
    loop {
        let t: f64 = r.random_range(-10.0..10.0);
        if t.abs() >= 0.1 {
            return t;
        }
    }
}

fn screw(axis: &AxisLine, theta: f64, t: f64) -> RigidTransform {
    let turn = RigidTransform::rotation_about(axis, theta);
    RigidTransform::translation_only(axis.direction() * t).compose(&turn)
}

/// One element of `g`. Each call picks a sub-family (pure rotation, pure
/// slide or both) so that lower-dimensional subgroups get sampled too.
pub fn sample_element(g: &MotionGroup, r: &mut impl Rng, tol: &ToleranceConfig) -> RigidTransform {
    match g {
        MotionGroup::Fixed => RigidTransform::identity(),
        MotionGroup::Rotation(a) => RigidTransform::rotation_about(a, angle(r, tol)),
        MotionGroup::Translation(d) => RigidTransform::translation_only(d * slide(r)),
        MotionGroup::Cylindrical(a) => match r.random_range(0..3) {
            0 => screw(a, angle(r, tol), 0.0),
            1 => screw(a, 0.0, slide(r)),
            _ => screw(a, angle(r, tol), slide(r)),
        },
        MotionGroup::Complex => rigid(r, 10.0),
    }
}

/// Direct geometric membership test, independent of screw decomposition.
pub fn is_member(g: &MotionGroup, t: &RigidTransform, tol: &ToleranceConfig) -> bool {
    let rot_angle = t.rotation().angle();
    let no_turn = rot_angle <= tol.angle_tol;
    let turn_axis_parallel = |d: &Vec3| {
        no_turn || t.rotation().axis().is_some_and(|ax| ax.into_inner().cross(d).norm() <= tol.angle_tol)
    };
    let keeps_line_pointwise = |a: &AxisLine| {
        [a.point(), a.point() + a.direction()].iter().all(|p| (t.apply_point(p) - p).norm() <= tol.dist_tol)
    };
    let keeps_line_setwise = |a: &AxisLine| {
        [a.point(), a.point() + a.direction()].iter().all(|p| a.distance_to_point(&t.apply_point(p)) <= tol.dist_tol)
    };
    match g {
        MotionGroup::Fixed => no_turn && t.translation().norm() <= tol.dist_tol,
        MotionGroup::Rotation(a) => turn_axis_parallel(&a.direction()) && keeps_line_pointwise(a),
        MotionGroup::Translation(d) => {
            let v = t.translation();
            no_turn && (v - d * v.dot(d)).norm() <= tol.dist_tol
        }
        MotionGroup::Cylindrical(a) => turn_axis_parallel(&a.direction()) && keeps_line_setwise(a),
        MotionGroup::Complex => true,
    }
}

/// Classifies `ORACLE_SAMPLES` random products `x * y`, x ∈ g1, y ∈ g2.
pub fn compose_oracle(g1: &MotionGroup, g2: &MotionGroup, r: &mut impl Rng, tol: &ToleranceConfig) -> MotionGroup {
    let samples: Vec<RigidTransform> = (0..ORACLE_SAMPLES)
        .map(|_| sample_element(g1, r, tol).compose(&sample_element(g2, r, tol)))
        .collect();
    classify_transform_samples(&samples, tol).unwrap()
}

/// Classifies the sampled elements of either group that belong to both.
pub fn intersect_oracle(g1: &MotionGroup, g2: &MotionGroup, r: &mut impl Rng, tol: &ToleranceConfig) -> MotionGroup {
    let mut kept = Vec::new();
    for k in 0..2 * ORACLE_SAMPLES {
        let (from, other) = if k % 2 == 0 { (g1, g2) } else { (g2, g1) };
        let t = sample_element(from, r, tol);
        if is_member(other, &t, tol) {
            kept.push(t);
        }
    }
    while kept.len() < ORACLE_SAMPLES {
        kept.push(RigidTransform::identity());
    }
    classify_transform_samples(&kept, tol).unwrap()
}

pub fn same_group(a: &MotionGroup, b: &MotionGroup, tol: &ToleranceConfig) -> bool {
    a.kind() == b.kind() && a.geometric_eq(b, tol)
}

/// A random group pair whose axes are, with equal odds, identical lines,
/// the same line re-parameterised, parallel offset lines, intersecting
/// lines or unrelated lines.
pub fn group_pair(r: &mut impl Rng, kinds: (usize, usize)) -> (MotionGroup, MotionGroup) {
    let l1 = line(r);
    let l2 = match r.random_range(0..5) {
        0 => l1,
        1 => AxisLine::new(l1.point() + l1.direction() * r.random_range(-5.0..5.0), -l1.direction()).unwrap(),
        2 => {
            let off = orthogonal(r, &l1.direction()) * r.random_range(0.5..3.0);
            AxisLine::new(l1.point() + off, l1.direction()).unwrap()
        }
        3 => AxisLine::new(l1.point(), unit_vector(r)).unwrap(),
        _ => line(r),
    };
    (group_of(kinds.0, l1), group_of(kinds.1, l2))
}

pub fn group_of(kind: usize, l: AxisLine) -> MotionGroup {
    match kind {
        0 => MotionGroup::Fixed,
        1 => MotionGroup::Rotation(l),
        2 => MotionGroup::Translation(l.direction()),
        3 => MotionGroup::Cylindrical(l),
        _ => MotionGroup::Complex,
    }
}

/// Distance between the affine hulls of two vertex subsets, with the
/// minimiser's affine coefficients.
fn hull_distance(a: &[Vec3], b: &[Vec3]) -> Option<f64> {
    let cols = a.len() - 1 + b.len() - 1;
    let rhs = b[0] - a[0];
    if cols == 0 {
        return Some(rhs.norm());
    }
    let mut m = DMatrix::<f64>::zeros(3, cols);
    for (k, v) in a[1..].iter().enumerate() {
        m.set_column(k, &(v - a[0]));
    }
    for (k, v) in b[1..].iter().enumerate() {
        m.set_column(a.len() - 1 + k, &(b[0] - v));
    }
    let svd = m.clone().svd(true, true);
    let z = svd.solve(&DVector::from_column_slice(rhs.as_slice()), 1e-12).ok()?;
    let s = &z.as_slice()[..a.len() - 1];
    let t = &z.as_slice()[a.len() - 1..];
    let eps = 1e-12;
    let inside = |c: &[f64]| c.iter().all(|&x| x >= -eps) && c.iter().sum::<f64>() <= 1.0 + eps;
    if !inside(s) || !inside(t) {
        return None;
    }
    let x = a[0] + a[1..].iter().zip(s).map(|(v, c)| (v - a[0]) * *c).sum::<Vec3>();
    let y = b[0] + b[1..].iter().zip(t).map(|(v, c)| (v - b[0]) * *c).sum::<Vec3>();
    Some((x - y).norm())
}

const SUBSETS: [&[usize]; 7] = [&[0], &[1], &[2], &[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]];

/// Triangle distance by enumerating every pair of sub-simplices and keeping
/// the KKT-feasible minimisers of their affine hulls.
pub fn kkt_triangle_distance(t1: &[Vec3; 3], t2: &[Vec3; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for sa in SUBSETS {
        let a: Vec<Vec3> = sa.iter().map(|&i| t1[i]).collect();
        for sb in SUBSETS {
            let b: Vec<Vec3> = sb.iter().map(|&i| t2[i]).collect();
            if let Some(d) = hull_distance(&a, &b) {
                best = best.min(d);
            }
        }
    }
    best
}

fn tri_box(t: &[Vec3; 3]) -> (Vec3, Vec3) {
    (t[0].inf(&t[1]).inf(&t[2]), t[0].sup(&t[1]).sup(&t[2]))
}

fn box_gap(a: &(Vec3, Vec3), b: &(Vec3, Vec3)) -> f64 {
    let gap = (a.0 - b.1).sup(&(b.0 - a.1)).sup(&Vec3::zeros());
    gap.norm()
}

/// Exhaustive all-pairs mesh distance. Triangle pairs are visited in order
/// of their box gap; a pair is skipped only when its box gap exceeds the
/// best distance, which cannot change the minimum.
pub fn brute_mesh_distance(a: &[[Vec3; 3]], b: &[[Vec3; 3]]) -> f64 {
    let ba: Vec<_> = a.iter().map(tri_box).collect();
    let bb: Vec<_> = b.iter().map(tri_box).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in ba.iter().enumerate() {
        for (j, y) in bb.iter().enumerate() {
            pairs.push((box_gap(x, y), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for (gap, i, j) in pairs {
        if gap > best {
            break;
        }
        best = best.min(kkt_triangle_distance(&a[i], &b[j]));
    }
    best
}

/// A random triangle soup of `n` triangles inside a cube of side `size`.
pub fn triangle_soup(r: &mut impl Rng, n: usize, size: f64) -> TriangleMesh {
    let mut vertices = Vec::with_capacity(3 * n);
    let mut triangles = Vec::with_capacity(n);
    for k in 0..n {
        let c = point(r, size / 2.0);
        let reach = r.random_range(0.05..0.3) * size;
        for _ in 0..3 {
            vertices.push(c + point(r, reach));
        }
        let b = 3 * k as u32;
        triangles.push([b, b + 1, b + 2]);
    }
    TriangleMesh::new(vertices, triangles).unwrap()
}

/// A closed random solid: a prism, tube or box with random proportions.
pub fn random_solid(r: &mut impl Rng) -> TriangleMesh {
    match r.random_range(0..3) {
        0 => TriangleMesh::prism(r.random_range(3..40), r.random_range(0.5..2.0), r.random_range(0.0..1.0), 0.0, r.random_range(0.5..4.0)),
        1 => TriangleMesh::tube(r.random_range(3..40), 2.0, r.random_range(0.5..1.8), 0.0, 0.0, r.random_range(0.5..4.0)),
        _ => TriangleMesh::cuboid(Vec3::zeros(), Vec3::new(r.random_range(0.2..3.0), r.random_range(0.2..3.0), r.random_range(0.2..3.0))),
    }
}

pub fn world_triangles(m: &TriangleMesh) -> Vec<[Vec3; 3]> {
    m.world_triangles(&RigidTransform::identity())
}

/// A row of unit cubes along x, each neighbour pair sharing the face line
/// through y = z = 0.5 and a second parallel line at y = 0.9.
pub fn micro_row(n: usize) -> Assembly {
    let parts = (0..n)
        .map(|k| {
            let x = k as f64;
            let mut features = Vec::new();
            for y in [0.5, 0.9] {
                features.push(Feature::cylinder(Vec3::new(x, y, 0.5), Vec3::new(x + 1.0, y, 0.5), 0.05).unwrap());
            }
            Part {
                id: format!("p{k:02}"),
                mesh: TriangleMesh::cuboid(Vec3::new(x, 0.0, 0.0), Vec3::new(x + 1.0, 1.0, 1.0)),
                features,
                placement: RigidTransform::identity(),
            }
        })
        .collect();
    Assembly { id: "row".into(), parts, ..Default::default() }
}

pub fn line_at(y: f64) -> AxisLine {
    AxisLine::new(Vec3::new(0.0, y, 0.5), Vec3::x()).unwrap()
}

pub fn with_mates(a: &Assembly, types: &[MateType], y: f64) -> Assembly {
    let mates = types
        .iter()
        .enumerate()
        .map(|(k, t)| Mate::new(format!("m{k}"), format!("p{k:02}"), format!("p{:02}", k + 1), *t, line_at(y)))
        .collect();
    Assembly { mates, ..a.clone() }
}

pub const TRUTH: [MateType; 10] =
    [MateType::Revolute, MateType::Revolute, MateType::Revolute, MateType::Revolute, MateType::Fasten, MateType::Fasten, MateType::Fasten, MateType::Slider, MateType::Slider, MateType::Cylindrical];
pub const PREDICTED: [MateType; 10] =
    [MateType::Revolute, MateType::Revolute, MateType::Fasten, MateType::Slider, MateType::Fasten, MateType::Fasten, MateType::Revolute, MateType::Slider, MateType::Fasten, MateType::Cylindrical];

pub fn annotated(id: usize, original: Option<MateType>, annotations: Vec<MateType>) -> AnnotatedMate {
    AnnotatedMate { mate_id: format!("m{id}"), original, annotations }
}

/// 349 mates: 8 with a single annotation, 40 split without a majority, 301
/// with a strict majority of which 201 match the original label.
pub fn study_mock() -> Vec<AnnotatedMate> {
    let mut m = Vec::new();
    for k in 0..8 {
        m.push(annotated(m.len(), Some(MateType::Fasten), vec![MateType::ALL[k % 4]]));
    }
    for k in 0..40 {
        let a = MateType::ALL[k % 4];
        let b = MateType::ALL[(k + 1) % 4];
        m.push(annotated(m.len(), Some(a), if k % 2 == 0 { vec![a, b] } else { vec![a, b, MateType::ALL[(k + 2) % 4]] }));
    }
    for k in 0..301 {
        let label = MateType::ALL[k % 4];
        let other = MateType::ALL[(k + 1) % 4];
        let annotations = match k % 3 {
            0 => vec![label, label],
            1 => vec![label, label, other],
            _ => vec![label, label, label],
        };
        let original = if k < 201 { label } else { other };
        m.push(annotated(m.len(), Some(original), annotations));
    }
    m
}
