//! Corpus curation: heuristic filters, geometric consistency and mate densification.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{axis_ambiguity, shared_axes, CandidateAxisSet, ContactIndex};
use crate::assembly::{unordered_pair, Assembly, Mate, MateKind, MateType, Provenance};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::{directions_parallel, line_offset, lines_coincident, AxisLine};
use crate::motion::{group_to_mate_type, relative_motion, MotionGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Kept,
    Rejected,
}

/// Pipeline stages in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    MovingPart,
    Connectivity,
    CompoundMate,
    TypeWhitelist,
    GeometricConsistency,
    DensifyComplex,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::MovingPart,
        Stage::Connectivity,
        Stage::CompoundMate,
        Stage::TypeWhitelist,
        Stage::GeometricConsistency,
        Stage::DensifyComplex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::MovingPart => "moving_part",
            Stage::Connectivity => "connectivity",
            Stage::CompoundMate => "compound_mate",
            Stage::TypeWhitelist => "type_whitelist",
            Stage::GeometricConsistency => "geometric_consistency",
            Stage::DensifyComplex => "densify_complex",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one stage, or of the whole pipeline. A rejected outcome names
/// the first failing stage; a kept pipeline outcome names the last stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub assembly_id: String,
    pub verdict: Verdict,
    pub stage: Stage,
    pub detail: String,
}

impl FilterOutcome {
    fn kept(a: &Assembly, stage: Stage, detail: impl Into<String>) -> Self {
        Self { assembly_id: a.id.clone(), verdict: Verdict::Kept, stage, detail: detail.into() }
    }

    fn rejected(a: &Assembly, stage: Stage, detail: impl Into<String>) -> Self {
        Self { assembly_id: a.id.clone(), verdict: Verdict::Rejected, stage, detail: detail.into() }
    }

    pub fn is_kept(&self) -> bool {
        self.verdict == Verdict::Kept
    }
}

fn sorted_mates(a: &Assembly) -> Vec<&Mate> {
    let mut mates: Vec<&Mate> = a.mates.iter().collect();
    mates.sort_by(|x, y| x.id.cmp(&y.id));
    mates
}

/// Kept iff some mate allows motion. Unsupported tags count as moving; the
/// whitelist stage deals with them.
pub fn filter_moving_part(a: &Assembly) -> FilterOutcome {
    match a.mates.iter().find(|m| m.mate_type() != Some(MateType::Fasten)) {
        Some(m) => FilterOutcome::kept(a, Stage::MovingPart, format!("mate `{}` is {}", m.id, m.kind.tag())),
        None => FilterOutcome::rejected(a, Stage::MovingPart, format!("all {} mates are fastened", a.mates.len())),
    }
}

/// Kept iff the mate graph spans every part in one component.
pub fn filter_connectivity(a: &Assembly) -> FilterOutcome {
    let ids = a.sorted_part_ids();
    let index = |id: &str| ids.binary_search_by(|x| x.as_str().cmp(id)).ok();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in &a.mates {
        if let (Some(i), Some(j)) = (index(&m.part_a), index(&m.part_b)) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let stray: Vec<&str> = (0..ids.len()).filter(|&i| find(&mut parent, i) != find(&mut parent, 0)).map(|i| ids[i].as_str()).collect();
    if stray.is_empty() {
        FilterOutcome::kept(a, Stage::Connectivity, format!("{} parts in one component", ids.len()))
    } else {
        FilterOutcome::rejected(
            a,
            Stage::Connectivity,
            format!("parts not connected to `{}`: {}", ids[0], stray.join(", ")),
        )
    }
}

/// Rejected iff some unordered part pair carries two or more mates.
pub fn filter_compound(a: &Assembly) -> FilterOutcome {
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for m in &a.mates {
        *counts.entry(m.pair()).or_default() += 1;
    }
    match counts.iter().find(|(_, &n)| n >= 2) {
        Some(((x, y), n)) => {
            FilterOutcome::rejected(a, Stage::CompoundMate, format!("parts `{x}` and `{y}` share {n} mates"))
        }
        None => FilterOutcome::kept(a, Stage::CompoundMate, "one mate per part pair"),
    }
}

/// Rejected iff some mate type is outside the four supported types.
pub fn filter_type_whitelist(a: &Assembly) -> FilterOutcome {
    match sorted_mates(a).into_iter().find(|m| matches!(m.kind, MateKind::Unsupported(_))) {
        Some(m) => FilterOutcome::rejected(
            a,
            Stage::TypeWhitelist,
            format!("mate `{}` has unsupported type `{}`", m.id, m.kind.tag()),
        ),
        None => FilterOutcome::kept(a, Stage::TypeWhitelist, "all mate types supported"),
    }
}

pub fn resolved_contact_tol(a: &Assembly, tol: &ToleranceConfig) -> f64 {
    tol.contact_tol.resolve(a.bbox_diagonal())
}

/// Rejected iff some mate's parts are not in contact, or (unless relaxed in
/// the config) its axis coincides with none of the pair's shared axes.
pub fn filter_geometric_consistency(a: &Assembly, candidates: &CandidateAxisSet, tol: &ToleranceConfig) -> FilterOutcome {
    match ContactIndex::new(a, resolved_contact_tol(a, tol)) {
        Ok(index) => geometric_consistency_with(a, candidates, &index, tol),
        Err(e) => FilterOutcome::rejected(a, Stage::GeometricConsistency, e.to_string()),
    }
}

fn geometric_consistency_with(
    a: &Assembly,
    candidates: &CandidateAxisSet,
    index: &ContactIndex,
    tol: &ToleranceConfig,
) -> FilterOutcome {
    for m in sorted_mates(a) {
        let contact = match index.contact(&m.part_a, &m.part_b) {
            Ok(c) => c,
            Err(e) => return FilterOutcome::rejected(a, Stage::GeometricConsistency, e.to_string()),
        };
        if !contact.in_contact {
            return FilterOutcome::rejected(
                a,
                Stage::GeometricConsistency,
                format!(
                    "mate `{}`: parts `{}` and `{}` are {:.6} apart, contact tolerance {:.6}",
                    m.id,
                    m.part_a,
                    m.part_b,
                    contact.min_distance,
                    index.contact_tol()
                ),
            );
        }
        if tol.require_mate_axis_candidate {
            let shared = shared_axes(&m.part_a, &m.part_b, candidates, tol);
            if !shared.iter().any(|s| lines_coincident(s, &m.axis, tol)) {
                return FilterOutcome::rejected(
                    a,
                    Stage::GeometricConsistency,
                    format!("mate `{}`: axis matches none of the {} shared candidate axes", m.id, shared.len()),
                );
            }
        }
    }
    FilterOutcome::kept(a, Stage::GeometricConsistency, "all mated pairs in contact on shared axes")
}

#[derive(Debug, Clone)]
pub struct Densified {
    pub assembly: Assembly,
    pub outcome: FilterOutcome,
    pub added: usize,
}

/// Mates every unmated pair that is in contact and shares a candidate axis,
/// with the type derived from the existing mates' relative motion.
pub fn densify(a: &Assembly, candidates: &CandidateAxisSet, tol: &ToleranceConfig) -> Result<Densified> {
    match ContactIndex::new(a, resolved_contact_tol(a, tol)) {
        Ok(index) => densify_with(a, candidates, &index, tol),
        Err(e) => Ok(Densified {
            assembly: a.clone(),
            outcome: FilterOutcome::rejected(a, Stage::DensifyComplex, e.to_string()),
            added: 0,
        }),
    }
}

fn densify_with(a: &Assembly, candidates: &CandidateAxisSet, index: &ContactIndex, tol: &ToleranceConfig) -> Result<Densified> {
    let ids = a.sorted_part_ids();
    let mated: HashSet<(String, String)> = a.mates.iter().map(Mate::pair).collect();
    let mut taken: HashSet<String> = a.mates.iter().map(|m| m.id.clone()).collect();
    let mut out = a.clone();
    let mut flags = Vec::new();
    let mut added = 0;
    for (i, pa) in ids.iter().enumerate() {
        for pb in &ids[i + 1..] {
            if mated.contains(&unordered_pair(pa, pb)) || !index.contact(pa, pb)?.in_contact {
                continue;
            }
            let shared = shared_axes(pa, pb, candidates, tol);
            if shared.is_empty() {
                continue;
            }
            let group = match relative_motion(a, pa, pb, tol) {
                Ok(g) => g,
                Err(Error::Disconnected(x, y)) => {
                    return Err(Error::InvalidAssembly(format!("densify reached disconnected parts `{x}` and `{y}`")))
                }
                Err(e) => return Err(e),
            };
            let Some(mate_type) = group_to_mate_type(&group) else {
                return Ok(Densified {
                    assembly: a.clone(),
                    outcome: FilterOutcome::rejected(
                        a,
                        Stage::DensifyComplex,
                        format!("relative motion of `{pa}` and `{pb}` is not a simple mate type"),
                    ),
                    added: 0,
                });
            };
            let (axis, snapped) = densified_axis(&group, &shared, tol);
            if !snapped {
                flags.push(format!("`{pa}`-`{pb}` keeps its derived axis"));
            }
            let mut id = format!("dens:{pa}:{pb}");
            let mut k = 1;
            while taken.contains(&id) {
                k += 1;
                id = format!("dens:{pa}:{pb}:{k}");
            }
            taken.insert(id.clone());
            let mut mate = Mate::new(id, pa.clone(), pb.clone(), mate_type, axis);
            mate.provenance = Provenance::Densified;
            out.mates.push(mate);
            added += 1;
        }
    }
    let mut detail = format!("added {added} mates");
    if !flags.is_empty() {
        detail.push_str("; ");
        detail.push_str(&flags.join("; "));
    }
    Ok(Densified { outcome: FilterOutcome::kept(a, Stage::DensifyComplex, detail), assembly: out, added })
}

/// Axis for a densified mate and whether it was taken from the shared set.
/// `shared` must be nonempty and in canonical order.
fn densified_axis(group: &MotionGroup, shared: &[AxisLine], tol: &ToleranceConfig) -> (AxisLine, bool) {
    match group {
        MotionGroup::Rotation(l) | MotionGroup::Cylindrical(l) => shared
            .iter()
            .filter(|s| lines_coincident(s, l, tol))
            .min_by(|x, y| line_offset(x, l).total_cmp(&line_offset(y, l)))
            .map_or((*l, false), |s| (*s, true)),
        MotionGroup::Translation(d) => {
            let derived = AxisLine::new(shared[0].point(), *d).expect("unit direction");
            shared.iter().find(|s| directions_parallel(s, &derived, tol)).map_or((derived, false), |s| (*s, true))
        }
        MotionGroup::Fixed | MotionGroup::Complex => (shared[0], true),
    }
}

/// Counts for one pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageCount {
    pub stage: Stage,
    pub passed: usize,
    pub rejected: usize,
}

/// Corpus-level tallies. Every field is a sum, so merging is associative
/// and commutative and the result does not depend on processing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub assemblies: usize,
    pub kept: usize,
    pub stages: Vec<StageCount>,
    pub load_errors: usize,
    pub processing_errors: usize,
    pub densified_mates: usize,
    /// Mate types of the kept assemblies after densification.
    pub mate_type_histogram: BTreeMap<String, usize>,
    /// Mates of kept assemblies whose pair offers a non-equivalent shared axis.
    pub ambiguous_mates: usize,
    pub mates_evaluated: usize,
}

impl Default for CorpusStats {
    fn default() -> Self {
        Self {
            assemblies: 0,
            kept: 0,
            stages: Stage::ALL.iter().map(|&stage| StageCount { stage, passed: 0, rejected: 0 }).collect(),
            load_errors: 0,
            processing_errors: 0,
            densified_mates: 0,
            mate_type_histogram: MateType::ALL.iter().map(|t| (t.as_str().to_string(), 0)).collect(),
            ambiguous_mates: 0,
            mates_evaluated: 0,
        }
    }
}

impl CorpusStats {
    pub fn merge(&mut self, other: &CorpusStats) {
        self.assemblies += other.assemblies;
        self.kept += other.kept;
        for (s, o) in self.stages.iter_mut().zip(&other.stages) {
            s.passed += o.passed;
            s.rejected += o.rejected;
        }
        self.load_errors += other.load_errors;
        self.processing_errors += other.processing_errors;
        self.densified_mates += other.densified_mates;
        for (k, v) in &other.mate_type_histogram {
            *self.mate_type_histogram.entry(k.clone()).or_default() += v;
        }
        self.ambiguous_mates += other.ambiguous_mates;
        self.mates_evaluated += other.mates_evaluated;
    }

    /// Share of evaluated mates that are axis-ambiguous; `None` when no mate was evaluated.
    pub fn axis_ambiguity_fraction(&self) -> Option<f64> {
        (self.mates_evaluated > 0).then(|| self.ambiguous_mates as f64 / self.mates_evaluated as f64)
    }

    pub fn rejected(&self, stage: Stage) -> usize {
        self.stages.iter().find(|s| s.stage == stage).map_or(0, |s| s.rejected)
    }

    fn record(&mut self, outcome: &FilterOutcome) {
        for s in &mut self.stages {
            if s.stage < outcome.stage || (s.stage == outcome.stage && outcome.is_kept()) {
                s.passed += 1;
            } else if s.stage == outcome.stage {
                s.rejected += 1;
            }
        }
    }
}

/// Result of processing one assembly.
#[derive(Debug, Clone)]
pub struct AssemblyRun {
    pub outcome: FilterOutcome,
    /// The densified assembly when kept.
    pub kept: Option<Assembly>,
    pub stats: CorpusStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineError {
    pub assembly_id: String,
    pub message: String,
}

/// Runs every stage in order on one assembly.
pub fn process_assembly(a: &Assembly, tol: &ToleranceConfig) -> Result<AssemblyRun> {
    let mut stats = CorpusStats { assemblies: 1, ..Default::default() };
    let finish = |outcome: FilterOutcome, kept: Option<Assembly>, mut stats: CorpusStats| {
        stats.record(&outcome);
        AssemblyRun { outcome, kept, stats }
    };
    for stage in [filter_moving_part, filter_connectivity, filter_compound, filter_type_whitelist] {
        let outcome = stage(a);
        if !outcome.is_kept() {
            return Ok(finish(outcome, None, stats));
        }
    }
    let candidates = CandidateAxisSet::compute(a, tol);
    let index = match ContactIndex::new(a, resolved_contact_tol(a, tol)) {
        Ok(i) => i,
        Err(e) => return Ok(finish(FilterOutcome::rejected(a, Stage::GeometricConsistency, e.to_string()), None, stats)),
    };
    let outcome = geometric_consistency_with(a, &candidates, &index, tol);
    if !outcome.is_kept() {
        return Ok(finish(outcome, None, stats));
    }
    let d = densify_with(a, &candidates, &index, tol)?;
    if !d.outcome.is_kept() {
        return Ok(finish(d.outcome, None, stats));
    }
    stats.kept = 1;
    stats.densified_mates = d.added;
    for m in &d.assembly.mates {
        *stats.mate_type_histogram.entry(m.kind.tag().to_string()).or_default() += 1;
        let amb = axis_ambiguity(m, &candidates, tol);
        stats.mates_evaluated += 1;
        stats.ambiguous_mates += usize::from(amb.ambiguous);
    }
    Ok(finish(d.outcome, Some(d.assembly), stats))
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    /// Sorted by assembly id.
    pub kept: Vec<Assembly>,
    /// Sorted by assembly id.
    pub outcomes: Vec<FilterOutcome>,
    pub errors: Vec<PipelineError>,
    pub stats: CorpusStats,
}

/// Processes a corpus on `jobs` worker threads (the global pool when `None`).
/// Results are independent of the thread count and of corpus order.
pub fn run_pipeline(corpus: &[Assembly], tol: &ToleranceConfig, jobs: Option<usize>) -> Result<PipelineRun> {
    let work = || corpus.par_iter().map(|a| (a.id.clone(), process_assembly(a, tol))).collect::<Vec<_>>();
    let mut results = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    results.sort_by(|x, y| x.0.cmp(&y.0));

    let mut run = PipelineRun { kept: Vec::new(), outcomes: Vec::new(), errors: Vec::new(), stats: CorpusStats::default() };
    for (id, r) in results {
        match r {
            Ok(r) => {
                run.stats.merge(&r.stats);
                run.outcomes.push(r.outcome);
                run.kept.extend(r.kept);
            }
            Err(e) => {
                run.stats.assemblies += 1;
                run.stats.processing_errors += 1;
                run.errors.push(PipelineError { assembly_id: id, message: e.to_string() });
            }
        }
    }
    Ok(run)
}
