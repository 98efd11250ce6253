//! Closed algebra over the motion groups of the four mate types.
//!
//! Groups are expressed in the world frame at the assembly's current pose.
//! `compose` models serial chains and `intersect` models parallel paths
//! between the same two parts.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::assembly::{Assembly, Mate, MateKind, MateType};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::{canonical_direction, lines_coincident, vectors_parallel, AxisLine, RigidTransform, Vec3};

pub const MIN_CLASSIFY_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionGroup {
    Fixed,
    Rotation(AxisLine),
    /// Sign-canonical unit direction.
    Translation(Vec3),
    Cylindrical(AxisLine),
    /// Anything that is not one of the simple groups above.
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    Fixed,
    Rotation,
    Translation,
    Cylindrical,
    Complex,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Fixed => "fixed",
            GroupKind::Rotation => "rotation",
            GroupKind::Translation => "translation",
            GroupKind::Cylindrical => "cylindrical",
            GroupKind::Complex => "complex",
        })
    }
}

impl MotionGroup {
    pub fn translation(direction: Vec3) -> Result<Self> {
        Ok(MotionGroup::Translation(canonical_direction(direction)?))
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            MotionGroup::Fixed => GroupKind::Fixed,
            MotionGroup::Rotation(_) => GroupKind::Rotation,
            MotionGroup::Translation(_) => GroupKind::Translation,
            MotionGroup::Cylindrical(_) => GroupKind::Cylindrical,
            MotionGroup::Complex => GroupKind::Complex,
        }
    }

    pub fn axis(&self) -> Option<AxisLine> {
        match self {
            MotionGroup::Rotation(l) | MotionGroup::Cylindrical(l) => Some(*l),
            _ => None,
        }
    }

    pub fn direction(&self) -> Option<Vec3> {
        match self {
            MotionGroup::Rotation(l) | MotionGroup::Cylindrical(l) => Some(l.direction()),
            MotionGroup::Translation(d) => Some(*d),
            _ => None,
        }
    }

    /// Same variant with coincident axes (or parallel directions).
    pub fn geometric_eq(&self, other: &MotionGroup, tol: &ToleranceConfig) -> bool {
        match (self, other) {
            (MotionGroup::Fixed, MotionGroup::Fixed) | (MotionGroup::Complex, MotionGroup::Complex) => true,
            (MotionGroup::Rotation(a), MotionGroup::Rotation(b))
            | (MotionGroup::Cylindrical(a), MotionGroup::Cylindrical(b)) => lines_coincident(a, b, tol),
            (MotionGroup::Translation(a), MotionGroup::Translation(b)) => vectors_parallel(a, b, tol),
            _ => false,
        }
    }
}

/// Unsupported mate tags have no known motion group and map to `Complex`.
pub fn mate_to_group(m: &Mate) -> MotionGroup {
    match &m.kind {
        MateKind::Typed(MateType::Fasten) => MotionGroup::Fixed,
        MateKind::Typed(MateType::Revolute) => MotionGroup::Rotation(m.axis),
        MateKind::Typed(MateType::Slider) => MotionGroup::Translation(m.axis.direction()),
        MateKind::Typed(MateType::Cylindrical) => MotionGroup::Cylindrical(m.axis),
        MateKind::Unsupported(_) => MotionGroup::Complex,
    }
}

pub fn group_to_mate_type(g: &MotionGroup) -> Option<MateType> {
    match g {
        MotionGroup::Fixed => Some(MateType::Fasten),
        MotionGroup::Rotation(_) => Some(MateType::Revolute),
        MotionGroup::Translation(_) => Some(MateType::Slider),
        MotionGroup::Cylindrical(_) => Some(MateType::Cylindrical),
        MotionGroup::Complex => None,
    }
}

/// Smallest simple group containing every product of an element of `g1`
/// with an element of `g2`. Where axes coincide the result keeps `g1`'s axis.
pub fn compose(g1: &MotionGroup, g2: &MotionGroup, tol: &ToleranceConfig) -> MotionGroup {
    use MotionGroup::*;
    let coincident = |a: &AxisLine, b: &AxisLine| lines_coincident(a, b, tol);
    let parallel = |a: &Vec3, b: &Vec3| vectors_parallel(a, b, tol);
    match (g1, g2) {
        (Fixed, g) | (g, Fixed) => *g,
        (Complex, _) | (_, Complex) => Complex,
        (Rotation(a), Rotation(b)) => if coincident(a, b) { Rotation(*a) } else { Complex },
        (Translation(a), Translation(b)) => if parallel(a, b) { Translation(*a) } else { Complex },
        (Rotation(l), Translation(d)) | (Translation(d), Rotation(l)) => {
            if parallel(d, &l.direction()) { Cylindrical(*l) } else { Complex }
        }
        (Cylindrical(c), Rotation(r)) | (Rotation(r), Cylindrical(c)) => {
            if coincident(c, r) { Cylindrical(*c) } else { Complex }
        }
        (Cylindrical(c), Translation(d)) | (Translation(d), Cylindrical(c)) => {
            if parallel(d, &c.direction()) { Cylindrical(*c) } else { Complex }
        }
        (Cylindrical(a), Cylindrical(b)) => if coincident(a, b) { Cylindrical(*a) } else { Complex },
    }
}

/// Largest simple group contained in both `g1` and `g2`. `Complex` acts as
/// the unconstrained top element here.
pub fn intersect(g1: &MotionGroup, g2: &MotionGroup, tol: &ToleranceConfig) -> MotionGroup {
    use MotionGroup::*;
    let coincident = |a: &AxisLine, b: &AxisLine| lines_coincident(a, b, tol);
    let parallel = |a: &Vec3, b: &Vec3| vectors_parallel(a, b, tol);
    match (g1, g2) {
        (Complex, g) | (g, Complex) => *g,
        (Fixed, _) | (_, Fixed) => Fixed,
        (Rotation(a), Rotation(b)) => if coincident(a, b) { Rotation(*a) } else { Fixed },
        (Translation(a), Translation(b)) => if parallel(a, b) { Translation(*a) } else { Fixed },
        (Rotation(_), Translation(_)) | (Translation(_), Rotation(_)) => Fixed,
        (Cylindrical(c), Rotation(r)) | (Rotation(r), Cylindrical(c)) => {
            if coincident(c, r) { Rotation(*r) } else { Fixed }
        }
        (Cylindrical(c), Translation(d)) | (Translation(d), Cylindrical(c)) => {
            if parallel(d, &c.direction()) { Translation(*d) } else { Fixed }
        }
        (Cylindrical(a), Cylindrical(b)) => {
            if coincident(a, b) {
                Cylindrical(*a)
            } else if parallel(&a.direction(), &b.direction()) {
                Translation(a.direction())
            } else {
                Fixed
            }
        }
    }
}

/// Motion group of a set of sampled relative transforms.
pub fn classify_transform_samples(samples: &[RigidTransform], tol: &ToleranceConfig) -> Result<MotionGroup> {
    if samples.len() < MIN_CLASSIFY_SAMPLES {
        return Err(Error::TooFewSamples { required: MIN_CLASSIFY_SAMPLES, got: samples.len() });
    }
    let screws: Vec<_> = samples.iter().map(|s| s.screw_decompose(tol.angle_tol)).collect();

    // Largest rotation gives the best-conditioned reference axis.
    let reference = screws
        .iter()
        .filter_map(|s| s.axis.map(|a| (s.angle, a)))
        .fold(None::<(f64, AxisLine)>, |best, (angle, axis)| match best {
            Some((b, _)) if b >= angle => best,
            _ => Some((angle, axis)),
        });

    let Some((_, axis)) = reference else {
        let moving: Vec<Vec3> =
            screws.iter().map(|s| s.pitch_translation).filter(|t| t.norm() > tol.dist_tol).collect();
        let Some(first) = moving.first() else {
            return Ok(MotionGroup::Fixed);
        };
        return Ok(if moving.iter().all(|t| vectors_parallel(t, first, tol)) {
            MotionGroup::Translation(canonical_direction(*first)?)
        } else {
            MotionGroup::Complex
        });
    };

    let u = axis.direction();
    let c = axis.point();
    let mut slides = false;
    for (sample, screw) in samples.iter().zip(&screws) {
        let axial = match screw.axis {
            Some(a) => {
                if !lines_coincident(&a, &axis, tol) {
                    return Ok(MotionGroup::Complex);
                }
                screw.pitch_translation.norm()
            }
            None => {
                // Below the angular tolerance: test membership against the
                // reference axis directly instead of trusting an ill-defined screw axis.
                let residual = sample.translation() - (c - sample.rotation() * c);
                let along = residual.dot(&u);
                if (residual - u * along).norm() > tol.dist_tol {
                    return Ok(MotionGroup::Complex);
                }
                along.abs()
            }
        };
        slides |= axial > tol.dist_tol;
    }
    Ok(if slides { MotionGroup::Cylindrical(axis) } else { MotionGroup::Rotation(axis) })
}

struct MateGraph<'a> {
    /// part id → (mate index, neighbour), sorted by mate id.
    adjacency: HashMap<&'a str, Vec<(usize, &'a str)>>,
    mates: &'a [Mate],
}

impl<'a> MateGraph<'a> {
    fn new(assembly: &'a Assembly) -> Self {
        let mut adjacency: HashMap<&str, Vec<(usize, &str)>> = HashMap::new();
        for part in &assembly.parts {
            adjacency.entry(part.id.as_str()).or_default();
        }
        for (i, m) in assembly.mates.iter().enumerate() {
            adjacency.entry(m.part_a.as_str()).or_default().push((i, m.part_b.as_str()));
            adjacency.entry(m.part_b.as_str()).or_default().push((i, m.part_a.as_str()));
        }
        for edges in adjacency.values_mut() {
            edges.sort_by(|x, y| assembly.mates[x.0].id.cmp(&assembly.mates[y.0].id).then(x.0.cmp(&y.0)));
        }
        Self { adjacency, mates: &assembly.mates }
    }

    /// Breadth-first tree from `source` over the allowed edges. The frontier
    /// is kept in lexicographic order of mate-id sequences, so the first
    /// discovery of a node is via its lexicographically smallest shortest path.
    fn bfs_tree(&self, source: &'a str, allowed: impl Fn(usize) -> bool) -> HashMap<&'a str, Option<(usize, &'a str)>> {
        let mut parent: HashMap<&str, Option<(usize, &str)>> = HashMap::new();
        parent.insert(source, None);
        let mut queue = VecDeque::from([source]);
        while let Some(node) = queue.pop_front() {
            for &(edge, next) in self.adjacency.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if allowed(edge) && !parent.contains_key(next) {
                    parent.insert(next, Some((edge, node)));
                    queue.push_back(next);
                }
            }
        }
        parent
    }

    fn path_to(parent: &HashMap<&'a str, Option<(usize, &'a str)>>, target: &'a str) -> Option<Vec<usize>> {
        let mut node = target;
        let mut edges = Vec::new();
        loop {
            match parent.get(node)? {
                None => break,
                Some((edge, prev)) => {
                    edges.push(*edge);
                    node = prev;
                }
            }
        }
        edges.reverse();
        Some(edges)
    }

    fn compose_path(&self, path: &[usize], tol: &ToleranceConfig) -> MotionGroup {
        path.iter().fold(MotionGroup::Fixed, |g, &e| compose(&g, &mate_to_group(&self.mates[e]), tol))
    }
}

/// Motion of `part_b` relative to `part_a` permitted by the existing mates.
///
/// Composes mate groups along the shortest chain, then intersects with the
/// chain obtained by routing through each fundamental cycle that shares an
/// edge with it. The search always starts from the lexicographically smaller
/// part id, so the result does not depend on argument order.
pub fn relative_motion(assembly: &Assembly, part_a: &str, part_b: &str, tol: &ToleranceConfig) -> Result<MotionGroup> {
    let a = assembly.part(part_a)?.id.as_str();
    let b = assembly.part(part_b)?.id.as_str();
    if a == b {
        return Ok(MotionGroup::Fixed);
    }
    let (source, target) = if a <= b { (a, b) } else { (b, a) };
    let graph = MateGraph::new(assembly);

    let tree = graph.bfs_tree(source, |_| true);
    let Some(shortest) = MateGraph::path_to(&tree, target) else {
        return Err(Error::Disconnected(part_a.to_string(), part_b.to_string()));
    };
    let mut result = graph.compose_path(&shortest, tol);

    let tree_edges: BTreeSet<usize> = tree.values().flatten().map(|(e, _)| *e).collect();
    let path_edges: BTreeSet<usize> = shortest.iter().copied().collect();
    for (e, m) in assembly.mates.iter().enumerate() {
        if tree_edges.contains(&e) || !tree.contains_key(m.part_a.as_str()) {
            continue;
        }
        let cycle = fundamental_cycle(&tree, e, m.part_a.as_str(), m.part_b.as_str());
        if cycle.is_disjoint(&path_edges) {
            continue;
        }
        let detour: BTreeSet<usize> = cycle.symmetric_difference(&path_edges).copied().collect();
        let sub = graph.bfs_tree(source, |edge| detour.contains(&edge));
        if let Some(path) = MateGraph::path_to(&sub, target) {
            if path != shortest {
                result = intersect(&result, &graph.compose_path(&path, tol), tol);
            }
        }
    }
    Ok(result)
}

fn fundamental_cycle<'a>(
    tree: &HashMap<&'a str, Option<(usize, &'a str)>>,
    closing_edge: usize,
    u: &'a str,
    v: &'a str,
) -> BTreeSet<usize> {
    let root_path = |mut node: &'a str| {
        let mut nodes = vec![node];
        let mut edges = Vec::new();
        while let Some(Some((edge, prev))) = tree.get(node) {
            edges.push(*edge);
            nodes.push(prev);
            node = prev;
        }
        (nodes, edges)
    };
    let (_, eu) = root_path(u);
    let (_, ev) = root_path(v);
    // Tree paths to the root share a common suffix up to the LCA.
    let su: BTreeSet<usize> = eu.into_iter().collect();
    let sv: BTreeSet<usize> = ev.into_iter().collect();
    let mut cycle: BTreeSet<usize> = su.symmetric_difference(&sv).copied().collect();
    cycle.insert(closing_edge);
    cycle
}
