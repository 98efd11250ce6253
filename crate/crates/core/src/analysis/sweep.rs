//! Kinematic feasibility by sampled sweeps about a candidate axis.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analysis::bvh::Bvh;
use crate::assembly::Part;
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::{AxisLine, RigidTransform, TriangleMesh, Vec3};

const CONTAINMENT_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityLabel {
    pub part_a: String,
    pub part_b: String,
    pub axis: AxisLine,
    pub rotatable: bool,
    pub slidable: bool,
}

/// Whether `moving` can rotate about and translate along `axis` relative to
/// the static part without penetrating it by more than the penetration tolerance.
pub fn sweep_feasibility(stat: &Part, moving: &Part, axis: &AxisLine, cfg: &ToleranceConfig) -> Result<FeasibilityLabel> {
    for p in [stat, moving] {
        if p.mesh.is_empty() {
            return Err(Error::EmptyMesh(p.id.clone()));
        }
    }
    let diag = stat.world_aabb().union(&moving.world_aabb()).diagonal();
    let depth = cfg.penetration_tol * diag;
    let fixed = Bvh::build(stat.mesh.world_triangles(&stat.placement));
    let eroded = erode(&moving.world_mesh(), depth);

    let pose_ok = |t: &RigidTransform| pose_feasible(&fixed, &eroded, t);
    let rotatable = cfg
        .rotation_samples_deg
        .iter()
        .flat_map(|&d| [d.to_radians(), -d.to_radians()])
        .all(|a| pose_ok(&RigidTransform::rotation_about(axis, a)));
    let slidable = cfg
        .translation_samples
        .iter()
        .flat_map(|&f| [f * diag, -f * diag])
        .all(|s| pose_ok(&RigidTransform::translation_only(axis.direction() * s)));

    Ok(FeasibilityLabel {
        part_a: stat.id.clone(),
        part_b: moving.id.clone(),
        axis: *axis,
        rotatable,
        slidable,
    })
}

fn pose_feasible(fixed: &Bvh, eroded: &TriangleMesh, pose: &RigidTransform) -> bool {
    let moved = Bvh::build(eroded.world_triangles(pose));
    if !fixed.bounds().overlaps(&moved.bounds()) {
        return true;
    }
    if fixed.intersects(&moved) {
        return false;
    }
    // no surface crossings: one solid can still sit entirely inside the other
    let inside = |host: &Bvh, guest: &Bvh| probe_vertices(guest).any(|v| host.contains(&v));
    !(inside(fixed, &moved) || inside(&moved, fixed))
}

fn probe_vertices(b: &Bvh) -> impl Iterator<Item = Vec3> + '_ {
    let tris = b.triangles();
    let stride = tris.len().div_ceil(CONTAINMENT_PROBES).max(1);
    tris.iter().step_by(stride).map(|t| t[0])
}

/// Moves every vertex inward so that each incident face plane shifts by
/// `depth`, in the least-squares sense over the distinct incident normals.
pub fn erode(mesh: &TriangleMesh, depth: f64) -> TriangleMesh {
    let mut normals: Vec<Vec<Vec3>> = vec![Vec::new(); mesh.vertices.len()];
    for (i, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = mesh.corners(i);
        let n = (b - a).cross(&(c - a)).normalize();
        for &k in tri {
            let list = &mut normals[k as usize];
            if !list.iter().any(|m| m.dot(&n) > 1.0 - 1e-9) {
                list.push(n);
            }
        }
    }
    let vertices = mesh
        .vertices
        .iter()
        .zip(&normals)
        .map(|(v, ns)| match ns.len() {
            0 => *v,
            1 => v - ns[0] * depth,
            k => {
                let m = DMatrix::from_fn(k, 3, |r, c| ns[r][c]);
                let rhs = DVector::from_element(k, -depth);
                let sol = m.svd(true, true).solve(&rhs, 1e-9).expect("svd computed with both factors");
                v + Vec3::new(sol[0], sol[1], sol[2])
            }
        })
        .collect();
    TriangleMesh { vertices, triangles: mesh.triangles.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(id: &str, mesh: TriangleMesh) -> Part {
        Part { id: id.into(), mesh, features: vec![], placement: RigidTransform::identity() }
    }

    fn z_axis() -> AxisLine {
        AxisLine::new(Vec3::zeros(), Vec3::z()).unwrap()
    }

    #[test]
    fn erosion_shrinks_a_cube_uniformly() {
        let cube = TriangleMesh::cuboid(Vec3::zeros(), Vec3::repeat(2.0));
        let e = erode(&cube, 0.1);
        let b = e.aabb();
        assert!((b.min - Vec3::repeat(0.1)).norm() < 1e-12);
        assert!((b.max - Vec3::repeat(1.9)).norm() < 1e-12);
    }

    #[test]
    fn round_shaft_in_round_hole_rotates_and_slides() {
        let hub = part("hub", TriangleMesh::tube(48, 10.0, 5.0, 0.0, -10.0, 10.0));
        let shaft = part("shaft", TriangleMesh::prism(48, 4.98, 0.0, -20.0, 20.0));
        let l = sweep_feasibility(&hub, &shaft, &z_axis(), &ToleranceConfig::default()).unwrap();
        assert!(l.rotatable && l.slidable);
    }

    #[test]
    fn square_bar_in_square_channel_only_slides() {
        let q = std::f64::consts::FRAC_PI_4;
        let r2 = std::f64::consts::SQRT_2;
        let channel = part("channel", TriangleMesh::tube(4, 10.0 * r2, 5.0 * r2, q, -10.0, 10.0));
        let bar = part("bar", TriangleMesh::prism(4, 4.98 * r2, q, -20.0, 20.0));
        let l = sweep_feasibility(&channel, &bar, &z_axis(), &ToleranceConfig::default()).unwrap();
        assert!(!l.rotatable);
        assert!(l.slidable);
    }

    #[test]
    fn block_in_cavity_is_locked() {
        let shell = part(
            "shell",
            TriangleMesh::hollow_cuboid(Vec3::repeat(-10.0), Vec3::repeat(10.0), Vec3::repeat(-5.0), Vec3::repeat(5.0)),
        );
        let block = part("block", TriangleMesh::cuboid(Vec3::repeat(-5.0), Vec3::repeat(5.0)));
        let l = sweep_feasibility(&shell, &block, &z_axis(), &ToleranceConfig::default()).unwrap();
        assert!(!l.rotatable && !l.slidable);
    }

    #[test]
    fn distant_parts_are_free() {
        let a = part("a", TriangleMesh::cuboid(Vec3::zeros(), Vec3::repeat(1.0)));
        let mut b = part("b", TriangleMesh::cuboid(Vec3::zeros(), Vec3::repeat(1.0)));
        b.placement = RigidTransform::translation_only(Vec3::new(50.0, 0.0, 0.0));
        let l = sweep_feasibility(&a, &b, &z_axis(), &ToleranceConfig::default()).unwrap();
        assert!(l.rotatable && l.slidable);
    }
}
