//! Candidate mate axes derived from part features.

use std::collections::BTreeMap;

use crate::assembly::{Assembly, Mate, MateType, Part};
use crate::config::ToleranceConfig;
use crate::geom::{dedup_lines, directions_parallel, lines_coincident, AxisLine};

/// World-frame candidate axes of every part, deduplicated and in canonical order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateAxisSet {
    per_part: BTreeMap<String, Vec<AxisLine>>,
}

impl CandidateAxisSet {
    pub fn compute(assembly: &Assembly, tol: &ToleranceConfig) -> Self {
        let per_part = assembly.parts.iter().map(|p| (p.id.clone(), extract_axes(p, tol))).collect();
        Self { per_part }
    }

    pub fn axes(&self, part: &str) -> &[AxisLine] {
        self.per_part.get(part).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<AxisLine>)> {
        self.per_part.iter()
    }
}

/// One line per cylindrical face (its axis) and per planar face (through the
/// centroid along the normal), in world coordinates.
pub fn extract_axes(p: &Part, tol: &ToleranceConfig) -> Vec<AxisLine> {
    dedup_lines(p.world_features().map(|f| f.axis_line()).collect(), tol)
}

/// Axes of part `a` coincident with some axis of part `b`.
pub fn shared_axes(a: &str, b: &str, candidates: &CandidateAxisSet, tol: &ToleranceConfig) -> Vec<AxisLine> {
    let theirs = candidates.axes(b);
    let mine: Vec<AxisLine> = candidates
        .axes(a)
        .iter()
        .filter(|la| theirs.iter().any(|lb| lines_coincident(la, lb, tol)))
        .copied()
        .collect();
    dedup_lines(mine, tol)
}

/// Whether `candidate` is as good a mate axis as `mate_axis` for a mate of
/// the given type: any axis for fastens, any parallel axis for sliders, the
/// same line otherwise.
pub fn axis_equivalent(mate_type: Option<MateType>, mate_axis: &AxisLine, candidate: &AxisLine, tol: &ToleranceConfig) -> bool {
    match mate_type {
        Some(MateType::Fasten) => true,
        Some(MateType::Slider) => directions_parallel(mate_axis, candidate, tol),
        _ => lines_coincident(mate_axis, candidate, tol),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisAmbiguity {
    pub shared_axes: Vec<AxisLine>,
    pub equivalent_axes: Vec<AxisLine>,
    /// Some shared axis would be a wrong choice for this mate.
    pub ambiguous: bool,
    /// False when the mate's own axis is not among the shared axes.
    pub mate_axis_in_shared: bool,
}

pub fn axis_ambiguity(mate: &Mate, candidates: &CandidateAxisSet, tol: &ToleranceConfig) -> AxisAmbiguity {
    let shared = shared_axes(&mate.part_a, &mate.part_b, candidates, tol);
    let ty = mate.mate_type();
    let equivalent: Vec<AxisLine> =
        shared.iter().filter(|s| axis_equivalent(ty, &mate.axis, s, tol)).copied().collect();
    AxisAmbiguity {
        ambiguous: equivalent.len() < shared.len(),
        mate_axis_in_shared: shared.iter().any(|s| lines_coincident(s, &mate.axis, tol)),
        equivalent_axes: equivalent,
        shared_axes: shared,
    }
}
