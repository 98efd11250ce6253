//! JSON report shapes shared by the command-line tool and the C interface.

use serde::Serialize;

use crate::analysis::{axis_ambiguity, shared_axes, sweep_feasibility, CandidateAxisSet, ContactIndex};
use crate::assembly::Assembly;
use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::eval::{ConsensusLabel, ConsensusStats, EvalReport};
use crate::geom::AxisLine;
use crate::motion::{relative_motion, MotionGroup};
use crate::pipeline::{process_assembly, resolved_contact_tol, CorpusStats, FilterOutcome, PipelineRun};
use crate::predict::{predict_type_heuristic, MatePrediction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    /// File name or assembly id.
    pub source: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    #[serde(flatten)]
    pub stats: CorpusStats,
    pub axis_ambiguity_fraction: Option<f64>,
}

impl From<&CorpusStats> for StatsReport {
    fn from(s: &CorpusStats) -> Self {
        Self { stats: s.clone(), axis_ambiguity_fraction: s.axis_ambiguity_fraction() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensifiedSummary {
    pub assembly_id: String,
    pub added_mates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub outcomes: Vec<FilterOutcome>,
    pub densified: Vec<DensifiedSummary>,
    pub stats: StatsReport,
    pub errors: Vec<ErrorEntry>,
}

/// `load_errors` are files that never reached the pipeline.
pub fn pipeline_report(run: &PipelineRun, load_errors: Vec<ErrorEntry>) -> PipelineReport {
    let mut stats = run.stats.clone();
    stats.load_errors += load_errors.len();
    let mut errors = load_errors;
    errors.extend(run.errors.iter().map(|e| ErrorEntry { source: e.assembly_id.clone(), message: e.message.clone() }));
    let densified = run
        .kept
        .iter()
        .map(|a| DensifiedSummary {
            assembly_id: a.id.clone(),
            added_mates: a
                .mates
                .iter()
                .filter(|m| m.provenance == crate::assembly::Provenance::Densified)
                .map(|m| m.id.clone())
                .collect(),
        })
        .collect();
    PipelineReport { outcomes: run.outcomes.clone(), densified, stats: StatsReport::from(&stats), errors }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupView {
    pub kind: String,
    pub axis: Option<AxisLine>,
    pub direction: Option<[f64; 3]>,
}

impl From<&MotionGroup> for GroupView {
    fn from(g: &MotionGroup) -> Self {
        Self { kind: g.kind().to_string(), axis: g.axis(), direction: g.direction().map(Into::into) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartView {
    pub id: String,
    pub triangles: usize,
    pub candidate_axes: Vec<AxisLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairView {
    pub part_a: String,
    pub part_b: String,
    pub min_distance: f64,
    pub in_contact: bool,
    pub mated: bool,
    pub shared_axes: Vec<AxisLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityView {
    pub rotatable: bool,
    pub slidable: bool,
    pub predicted_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MateView {
    pub id: String,
    pub part_a: String,
    pub part_b: String,
    #[serde(rename = "type")]
    pub tag: String,
    pub provenance: String,
    pub axis: AxisLine,
    pub relative_motion: Option<GroupView>,
    pub ambiguous: bool,
    pub equivalent_axes: usize,
    pub mate_axis_in_shared: bool,
    pub feasibility: Option<FeasibilityView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub assembly_id: String,
    pub bbox_diagonal: f64,
    pub contact_tol: f64,
    pub parts: Vec<PartView>,
    pub pairs: Vec<PairView>,
    pub mates: Vec<MateView>,
    pub outcome: FilterOutcome,
}

/// Everything the analysis layer can say about one assembly.
pub fn analyze_assembly(a: &Assembly, tol: &ToleranceConfig) -> Result<AnalysisReport> {
    let candidates = CandidateAxisSet::compute(a, tol);
    let contact_tol = resolved_contact_tol(a, tol);
    let index = ContactIndex::new(a, contact_tol)?;
    let ids = a.sorted_part_ids();

    let parts = ids
        .iter()
        .map(|id| {
            let p = a.part(id)?;
            Ok(PartView { id: id.clone(), triangles: p.mesh.triangles.len(), candidate_axes: candidates.axes(id).to_vec() })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    for (i, x) in ids.iter().enumerate() {
        for y in &ids[i + 1..] {
            let c = index.contact(x, y)?;
            pairs.push(PairView {
                part_a: x.clone(),
                part_b: y.clone(),
                min_distance: c.min_distance,
                in_contact: c.in_contact,
                mated: a.is_mated(x, y),
                shared_axes: shared_axes(x, y, &candidates, tol),
            });
        }
    }

    let mut sorted: Vec<_> = a.mates.iter().collect();
    sorted.sort_by(|x, y| x.id.cmp(&y.id));
    let mates = sorted
        .into_iter()
        .map(|m| {
            let amb = axis_ambiguity(m, &candidates, tol);
            let (pa, pb) = m.pair();
            let feasibility = sweep_feasibility(a.part(&pa)?, a.part(&pb)?, &m.axis, tol).ok().map(|l| {
                let predicted = predict_type_heuristic(a, (&pa, &pb), &m.axis, tol).map(|p| p.predicted.as_str());
                FeasibilityView {
                    rotatable: l.rotatable,
                    slidable: l.slidable,
                    predicted_type: predicted.unwrap_or("unknown").to_string(),
                }
            });
            Ok(MateView {
                id: m.id.clone(),
                part_a: m.part_a.clone(),
                part_b: m.part_b.clone(),
                tag: m.kind.tag().to_string(),
                provenance: m.provenance.as_str().to_string(),
                axis: m.axis,
                relative_motion: relative_motion(a, &pa, &pb, tol).ok().as_ref().map(GroupView::from),
                ambiguous: amb.ambiguous,
                equivalent_axes: amb.equivalent_axes.len(),
                mate_axis_in_shared: amb.mate_axis_in_shared,
                feasibility,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(AnalysisReport {
        assembly_id: a.id.clone(),
        bbox_diagonal: a.bbox_diagonal(),
        contact_tol,
        parts,
        pairs,
        mates,
        outcome: process_assembly(a, tol)?.outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyPredictions {
    pub assembly_id: String,
    pub predictions: Vec<MatePrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictReport {
    pub assemblies: Vec<AssemblyPredictions>,
    pub errors: Vec<ErrorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateReport {
    #[serde(flatten)]
    pub report: EvalReport,
    /// Ground-truth assemblies with no prediction file.
    pub missing_predictions: Vec<String>,
    /// Prediction files with no ground-truth assembly.
    pub missing_truth: Vec<String>,
    pub errors: Vec<ErrorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusReport {
    pub labels: Vec<ConsensusLabel>,
    pub stats: ConsensusStats,
}
