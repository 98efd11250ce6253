use std::cell::OnceCell;

use serde::Serialize;

use crate::analysis::bvh::Bvh;
use crate::assembly::{Assembly, Part};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactReport {
    pub part_a: String,
    pub part_b: String,
    pub min_distance: f64,
    pub in_contact: bool,
}

pub(crate) fn part_bvh(p: &Part) -> Result<Bvh> {
    if p.mesh.is_empty() {
        return Err(Error::EmptyMesh(p.id.clone()));
    }
    Ok(Bvh::build(p.mesh.world_triangles(&p.placement)))
}

/// Minimum distance between two placed parts; contact when it does not
/// exceed `contact_tol`.
pub fn min_distance(a: &Part, b: &Part, contact_tol: f64) -> Result<ContactReport> {
    let (ba, bb) = (part_bvh(a)?, part_bvh(b)?);
    Ok(report(a, b, ba.min_distance(&bb), contact_tol))
}

fn report(a: &Part, b: &Part, distance: f64, contact_tol: f64) -> ContactReport {
    ContactReport {
        part_a: a.id.clone(),
        part_b: b.id.clone(),
        min_distance: distance.max(0.0),
        in_contact: distance <= contact_tol,
    }
}

/// Per-assembly cache of part BVHs and pairwise contact reports.
pub struct ContactIndex<'a> {
    assembly: &'a Assembly,
    bvhs: Vec<Bvh>,
    contact_tol: f64,
    pairs: Vec<OnceCell<ContactReport>>,
}

impl<'a> ContactIndex<'a> {
    pub fn new(assembly: &'a Assembly, contact_tol: f64) -> Result<Self> {
        let bvhs = assembly.parts.iter().map(part_bvh).collect::<Result<Vec<_>>>()?;
        let n = assembly.parts.len();
        Ok(Self { assembly, bvhs, contact_tol, pairs: (0..n * n).map(|_| OnceCell::new()).collect() })
    }

    pub fn contact_tol(&self) -> f64 {
        self.contact_tol
    }

    pub fn contact(&self, a: &str, b: &str) -> Result<&ContactReport> {
        let i = self.assembly.part_index(a).ok_or_else(|| Error::UnknownPart(a.to_string()))?;
        let j = self.assembly.part_index(b).ok_or_else(|| Error::UnknownPart(b.to_string()))?;
        Ok(self.contact_by_index(i, j))
    }

    pub fn contact_by_index(&self, i: usize, j: usize) -> &ContactReport {
        let (lo, hi) = (i.min(j), i.max(j));
        let n = self.assembly.parts.len();
        self.pairs[lo * n + hi].get_or_init(|| {
            let d = self.bvhs[lo].min_distance(&self.bvhs[hi]);
            report(&self.assembly.parts[lo], &self.assembly.parts[hi], d, self.contact_tol)
        })
    }
}
