use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geom::{RigidTransform, Vec3};

/// Indexed triangle mesh. Builders produce closed shells with outward
/// (counter-clockwise) winding.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Self { min: Vec3::repeat(f64::INFINITY), max: Vec3::repeat(f64::NEG_INFINITY) }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb { min: self.min.inf(&other.min), max: self.max.sup(&other.max) }
    }

    pub fn diagonal(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            (self.max - self.min).norm()
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn distance(&self, other: &Aabb) -> f64 {
        let gap = (self.min - other.max).sup(&(other.min - self.max)).sup(&Vec3::zeros());
        gap.norm()
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
            && self.min.z <= other.max.z
            && other.min.z <= self.max.z
    }
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let mesh = Self { vertices, triangles };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
            }
        }
        let n = self.vertices.len();
        for (i, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&k| k as usize >= n) {
                return Err(Error::InvalidMesh(format!("triangle {i} references a missing vertex")));
            }
            let [a, b, c] = self.corners(i);
            if (b - a).cross(&(c - a)).norm() * 0.5 <= 1e-12 {
                return Err(Error::InvalidMesh(format!("triangle {i} is degenerate")));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn corners(&self, tri: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[tri];
        [self.vertices[a as usize], self.vertices[b as usize], self.vertices[c as usize]]
    }

    pub fn world_triangles(&self, placement: &RigidTransform) -> Vec<[Vec3; 3]> {
        let world: Vec<Vec3> = self.vertices.iter().map(|v| placement.apply_point(v)).collect();
        self.triangles
            .iter()
            .map(|t| [world[t[0] as usize], world[t[1] as usize], world[t[2] as usize]])
            .collect()
    }

    pub fn transformed(&self, t: &RigidTransform) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| t.apply_point(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Appends `other` as a separate shell.
    pub fn merge(&mut self, other: &TriangleMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }

    pub fn flipped(mut self) -> TriangleMesh {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
        self
    }

    pub fn cuboid(min: Vec3, max: Vec3) -> TriangleMesh {
        let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
        let vertices = vec![
            v(min.x, min.y, min.z),
            v(max.x, min.y, min.z),
            v(max.x, max.y, min.z),
            v(min.x, max.y, min.z),
            v(min.x, min.y, max.z),
            v(max.x, min.y, max.z),
            v(max.x, max.y, max.z),
            v(min.x, max.y, max.z),
        ];
        let triangles = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        TriangleMesh { vertices, triangles }
    }

    /// Box with a box-shaped cavity; the cavity shell faces inward.
    pub fn hollow_cuboid(outer_min: Vec3, outer_max: Vec3, inner_min: Vec3, inner_max: Vec3) -> TriangleMesh {
        let mut mesh = Self::cuboid(outer_min, outer_max);
        mesh.merge(&Self::cuboid(inner_min, inner_max).flipped());
        mesh
    }

    /// Right prism along +z over a convex CCW polygon with `sides` vertices
    /// on a circle of `radius`, the first at angle `phase`.
    pub fn prism(sides: usize, radius: f64, phase: f64, z0: f64, z1: f64) -> TriangleMesh {
        let ring = polygon(sides, radius, phase);
        let mut vertices = Vec::with_capacity(2 * sides + 2);
        vertices.extend(ring.iter().map(|&(x, y)| Vec3::new(x, y, z0)));
        vertices.extend(ring.iter().map(|&(x, y)| Vec3::new(x, y, z1)));
        let (bottom, top) = (2 * sides as u32, 2 * sides as u32 + 1);
        vertices.push(Vec3::new(0.0, 0.0, z0));
        vertices.push(Vec3::new(0.0, 0.0, z1));
        let n = sides as u32;
        let mut triangles = Vec::with_capacity(4 * sides);
        for i in 0..n {
            let j = (i + 1) % n;
            triangles.push([bottom, j, i]);
            triangles.push([top, n + i, n + j]);
            triangles.push([i, j, n + j]);
            triangles.push([i, n + j, n + i]);
        }
        TriangleMesh { vertices, triangles }
    }

    /// Prism with a coaxial prismatic bore; both polygons share `sides` and `phase`.
    pub fn tube(sides: usize, outer: f64, inner: f64, phase: f64, z0: f64, z1: f64) -> TriangleMesh {
        let (o, i) = (polygon(sides, outer, phase), polygon(sides, inner, phase));
        let n = sides as u32;
        let mut vertices = Vec::with_capacity(4 * sides);
        for (ring, z) in [(&o, z0), (&o, z1), (&i, z0), (&i, z1)] {
            vertices.extend(ring.iter().map(|&(x, y)| Vec3::new(x, y, z)));
        }
        let (ob, ot, ib, it) = (0, n, 2 * n, 3 * n);
        let mut triangles = Vec::with_capacity(8 * sides);
        for k in 0..n {
            let m = (k + 1) % n;
            // outer wall
            triangles.push([ob + k, ob + m, ot + m]);
            triangles.push([ob + k, ot + m, ot + k]);
            // bore wall, facing the axis
            triangles.push([ib + k, it + m, ib + m]);
            triangles.push([ib + k, it + k, it + m]);
            // bottom ring
            triangles.push([ob + k, ib + m, ob + m]);
            triangles.push([ob + k, ib + k, ib + m]);
            // top ring
            triangles.push([ot + k, ot + m, it + m]);
            triangles.push([ot + k, it + m, it + k]);
        }
        TriangleMesh { vertices, triangles }
    }
}

fn polygon(sides: usize, radius: f64, phase: f64) -> Vec<(f64, f64)> {
    (0..sides)
        .map(|k| {
            let a = phase + TAU * k as f64 / sides as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_volume(mesh: &TriangleMesh) -> f64 {
        (0..mesh.triangles.len())
            .map(|i| {
                let [a, b, c] = mesh.corners(i);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    #[test]
    fn builders_are_valid_closed_and_outward() {
        let cube = TriangleMesh::cuboid(Vec3::zeros(), Vec3::repeat(1.0));
        cube.validate().unwrap();
        assert!((signed_volume(&cube) - 1.0).abs() < 1e-12);

        let prism = TriangleMesh::prism(4, 2f64.sqrt(), std::f64::consts::FRAC_PI_4, 0.0, 3.0);
        prism.validate().unwrap();
        assert!((signed_volume(&prism) - 12.0).abs() < 1e-9);

        let tube = TriangleMesh::tube(4, 2.0 * 2f64.sqrt(), 2f64.sqrt(), std::f64::consts::FRAC_PI_4, 0.0, 1.0);
        tube.validate().unwrap();
        assert!((signed_volume(&tube) - 12.0).abs() < 1e-9);

        let hollow = TriangleMesh::hollow_cuboid(
            Vec3::repeat(-2.0),
            Vec3::repeat(2.0),
            Vec3::repeat(-1.0),
            Vec3::repeat(1.0),
        );
        assert!((signed_volume(&hollow) - 56.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_meshes() {
        let v = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(TriangleMesh::new(v.clone(), vec![[0, 1, 1]]).is_err());
        let mut nan = v.clone();
        nan[2].z = f64::NAN;
        assert!(TriangleMesh::new(nan, vec![[0, 1, 2]]).is_err());
        assert!(TriangleMesh::new(v, vec![[0, 1, 2]]).is_ok());
    }

    #[test]
    fn aabb_distance() {
        let a = Aabb { min: Vec3::zeros(), max: Vec3::repeat(1.0) };
        let b = Aabb { min: Vec3::new(2.0, 0.0, 3.0), max: Vec3::new(3.0, 1.0, 4.0) };
        assert!((a.distance(&b) - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(a.distance(&a), 0.0);
    }
}
