//! Axis-aligned bounding-volume hierarchy over world-space triangles.

use crate::analysis::primitives::{ray_hits_triangle, triangle_distance, triangles_intersect, Triangle};
use crate::geom::{Aabb, Vec3};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Inner { left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct Bvh {
    triangles: Vec<Triangle>,
    nodes: Vec<(Aabb, Node)>,
}

impl Bvh {
    pub fn build(mut triangles: Vec<Triangle>) -> Self {
        let mut nodes = Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1);
        if !triangles.is_empty() {
            let n = triangles.len();
            build_node(&mut triangles, 0, n, &mut nodes);
        }
        Self { triangles, nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes.first().map(|(b, _)| *b).unwrap_or_else(Aabb::empty)
    }

    fn leaf_range(&self, node: usize) -> Option<(usize, usize)> {
        match self.nodes[node].1 {
            Node::Leaf { start, end } => Some((start, end)),
            Node::Inner { .. } => None,
        }
    }

    fn children(&self, node: usize) -> [usize; 2] {
        match self.nodes[node].1 {
            Node::Inner { left, right } => [left, right],
            Node::Leaf { .. } => unreachable!("leaf has no children"),
        }
    }

    /// Minimum distance between the triangle sets of `self` and `other`.
    /// Node pairs are pruned only when their box distance strictly exceeds
    /// the best distance found so far, so the result equals the exhaustive minimum.
    pub fn min_distance(&self, other: &Bvh) -> f64 {
        if self.is_empty() || other.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![(0usize, 0usize, self.nodes[0].0.distance(&other.nodes[0].0))];
        while let Some((a, b, box_dist)) = stack.pop() {
            if box_dist > best {
                continue;
            }
            match (self.leaf_range(a), other.leaf_range(b)) {
                (Some((s0, e0)), Some((s1, e1))) => {
                    for t1 in &self.triangles[s0..e0] {
                        for t2 in &other.triangles[s1..e1] {
                            best = best.min(triangle_distance(t1, t2));
                        }
                    }
                    if best == 0.0 {
                        return 0.0;
                    }
                }
                (la, lb) => {
                    let split_self = lb.is_some()
                        || (la.is_none() && self.nodes[a].0.diagonal() >= other.nodes[b].0.diagonal());
                    let mut pairs: Vec<(usize, usize, f64)> = if split_self {
                        self.children(a)
                            .into_iter()
                            .map(|c| (c, b, self.nodes[c].0.distance(&other.nodes[b].0)))
                            .collect()
                    } else {
                        other
                            .children(b)
                            .into_iter()
                            .map(|c| (a, c, self.nodes[a].0.distance(&other.nodes[c].0)))
                            .collect()
                    };
                    // nearest pair is popped first
                    pairs.sort_by(|x, y| y.2.total_cmp(&x.2));
                    stack.extend(pairs);
                }
            }
        }
        best
    }

    /// True when any triangle of `self` pierces or is pierced by one of `other`.
    pub fn intersects(&self, other: &Bvh) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            if !self.nodes[a].0.overlaps(&other.nodes[b].0) {
                continue;
            }
            match (self.leaf_range(a), other.leaf_range(b)) {
                (Some((s0, e0)), Some((s1, e1))) => {
                    for t1 in &self.triangles[s0..e0] {
                        for t2 in &other.triangles[s1..e1] {
                            if triangles_intersect(t1, t2) {
                                return true;
                            }
                        }
                    }
                }
                (None, Some(_)) => stack.extend(self.children(a).map(|c| (c, b))),
                (Some(_), None) => stack.extend(other.children(b).map(|c| (a, c))),
                (None, None) => {
                    for ca in self.children(a) {
                        for cb in other.children(b) {
                            stack.push((ca, cb));
                        }
                    }
                }
            }
        }
        false
    }

    /// Number of triangles hit by the ray `origin + t·dir`, `t > 0`.
    pub fn ray_crossings(&self, origin: &Vec3, dir: &Vec3) -> usize {
        if self.is_empty() {
            return 0;
        }
        let inv = dir.map(|c| 1.0 / c);
        let mut count = 0;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            if !ray_hits_box(origin, &inv, &self.nodes[n].0) {
                continue;
            }
            match self.nodes[n].1 {
                Node::Leaf { start, end } => {
                    count += self.triangles[start..end].iter().filter(|t| ray_hits_triangle(origin, dir, t)).count();
                }
                Node::Inner { left, right } => stack.extend([left, right]),
            }
        }
        count
    }

    /// Parity point-in-solid test, by majority over three skew rays.
    /// Assumes the triangles form closed shells.
    pub fn contains(&self, p: &Vec3) -> bool {
        const RAYS: [[f64; 3]; 3] = [
            [1.0, std::f64::consts::SQRT_2, 2.236_067_977_499_79],
            [-1.732_050_807_568_877, 0.618_033_988_749_895, 1.0],
            [0.414_213_562_373_095, -1.0, -std::f64::consts::E],
        ];
        if !self.bounds().overlaps(&Aabb { min: *p, max: *p }) {
            return false;
        }
        let odd = RAYS.iter().filter(|d| self.ray_crossings(p, &Vec3::from(**d)) % 2 == 1).count();
        odd >= 2
    }
}

fn ray_hits_box(origin: &Vec3, inv_dir: &Vec3, b: &Aabb) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = f64::INFINITY;
    for k in 0..3 {
        let (mut near, mut far) = ((b.min[k] - origin[k]) * inv_dir[k], (b.max[k] - origin[k]) * inv_dir[k]);
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
    }
    t0 <= t1
}

fn build_node(tris: &mut [Triangle], start: usize, end: usize, nodes: &mut Vec<(Aabb, Node)>) -> usize {
    let bounds = Aabb::from_points(tris[start..end].iter().flatten());
    let index = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push((bounds, Node::Leaf { start, end }));
        return index;
    }
    nodes.push((bounds, Node::Leaf { start, end }));
    let centroid = |t: &Triangle| (t[0] + t[1] + t[2]) / 3.0;
    let cb = Aabb::from_points(&tris[start..end].iter().map(centroid).collect::<Vec<_>>());
    let extent = cb.max - cb.min;
    let axis = extent.imax();
    let mid = (start + end) / 2;
    tris[start..end].select_nth_unstable_by(mid - start, |a, b| centroid(a)[axis].total_cmp(&centroid(b)[axis]));
    let left = build_node(tris, start, mid, nodes);
    let right = build_node(tris, mid, end, nodes);
    nodes[index].1 = Node::Inner { left, right };
    index
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{RigidTransform, TriangleMesh};

    fn cube_at(x: f64) -> Bvh {
        let mesh = TriangleMesh::cuboid(Vec3::zeros(), Vec3::repeat(1.0));
        Bvh::build(mesh.world_triangles(&RigidTransform::translation_only(Vec3::new(x, 0.0, 0.0))))
    }

    #[test]
    fn cube_distances() {
        assert_eq!(cube_at(0.0).min_distance(&cube_at(1.0)), 0.0);
        assert!((cube_at(0.0).min_distance(&cube_at(3.5)) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn containment_by_parity() {
        let cube = cube_at(0.0);
        assert!(cube.contains(&Vec3::new(0.5, 0.5, 0.5)));
        assert!(cube.contains(&Vec3::new(0.01, 0.9, 0.3)));
        assert!(!cube.contains(&Vec3::new(1.5, 0.5, 0.5)));
        assert!(!cube.contains(&Vec3::new(-0.2, 0.5, 0.5)));
    }

    #[test]
    fn overlap_detection() {
        assert!(cube_at(0.0).intersects(&cube_at(0.5)));
        assert!(!cube_at(0.0).intersects(&cube_at(1.5)));
    }
}
