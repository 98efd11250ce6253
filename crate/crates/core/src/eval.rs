//! Accuracy metrics for predicted mates and annotator consensus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{axis_ambiguity, CandidateAxisSet};
use crate::assembly::{Assembly, Mate, MateType};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::lines_coincident;

/// Most frequent label; ties go to the earlier type in [`MateType::ALL`].
pub fn predict_majority(labels: &[MateType]) -> Result<MateType> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let mut counts = [0usize; 4];
    for l in labels {
        counts[l.index()] += 1;
    }
    Ok(majority_of(&counts))
}

fn majority_of(counts: &[usize; 4]) -> MateType {
    let mut best = 0;
    for k in 1..4 {
        if counts[k] > counts[best] {
            best = k;
        }
    }
    MateType::ALL[best]
}

/// Raw tallies; merging is plain addition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvalCounts {
    pub mates: usize,
    pub type_correct: usize,
    pub axis_correct: usize,
    pub ambiguous: usize,
    pub ambiguous_axis_correct: usize,
    /// Rows are ground truth, columns predictions, both in [`MateType::ALL`] order.
    pub confusion: [[usize; 4]; 4],
    pub unmatched_predictions: usize,
    pub unmatched_truth: usize,
}

impl EvalCounts {
    pub fn merge(&mut self, o: &EvalCounts) {
        self.mates += o.mates;
        self.type_correct += o.type_correct;
        self.axis_correct += o.axis_correct;
        self.ambiguous += o.ambiguous;
        self.ambiguous_axis_correct += o.ambiguous_axis_correct;
        for (r, orow) in self.confusion.iter_mut().zip(&o.confusion) {
            for (c, oc) in r.iter_mut().zip(orow) {
                *c += oc;
            }
        }
        self.unmatched_predictions += o.unmatched_predictions;
        self.unmatched_truth += o.unmatched_truth;
    }

    /// Records one matched mate.
    pub fn record(&mut self, truth: MateType, predicted: MateType, axis_correct: bool, ambiguous: bool) {
        self.mates += 1;
        self.confusion[truth.index()][predicted.index()] += 1;
        self.type_correct += usize::from(truth == predicted);
        self.axis_correct += usize::from(axis_correct);
        self.ambiguous += usize::from(ambiguous);
        self.ambiguous_axis_correct += usize::from(ambiguous && axis_correct);
    }

    pub fn truth_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for (k, row) in self.confusion.iter().enumerate() {
            c[k] = row.iter().sum();
        }
        c
    }
}

/// Compares the mates of `predicted` against those of `truth`, matching by
/// unordered part pair. Candidate axes come from the ground-truth geometry.
pub fn evaluate(predicted: &Assembly, truth: &Assembly, tol: &ToleranceConfig) -> EvalCounts {
    let candidates = CandidateAxisSet::compute(truth, tol);
    evaluate_mates(&predicted.mates, &truth.mates, &candidates, tol)
}

pub fn evaluate_mates(
    predicted: &[Mate],
    truth: &[Mate],
    candidates: &CandidateAxisSet,
    tol: &ToleranceConfig,
) -> EvalCounts {
    let mut by_pair: BTreeMap<(String, String), Vec<&Mate>> = BTreeMap::new();
    for p in predicted {
        by_pair.entry(p.pair()).or_default().push(p);
    }
    for list in by_pair.values_mut() {
        list.sort_by(|x, y| x.id.cmp(&y.id));
    }
    let mut truth_sorted: Vec<&Mate> = truth.iter().collect();
    truth_sorted.sort_by(|x, y| x.id.cmp(&y.id));

    let mut counts = EvalCounts::default();
    for t in truth_sorted {
        let pred = by_pair.get_mut(&t.pair()).and_then(|l| (!l.is_empty()).then(|| l.remove(0)));
        match (t.mate_type(), pred.map(|p| (p, p.mate_type()))) {
            (Some(tt), Some((p, Some(pt)))) => {
                let amb = axis_ambiguity(t, candidates, tol);
                let axis_ok = amb.equivalent_axes.iter().any(|e| lines_coincident(e, &p.axis, tol));
                counts.record(tt, pt, axis_ok, amb.ambiguous);
            }
            (_, Some(_)) => {
                counts.unmatched_truth += 1;
                counts.unmatched_predictions += 1;
            }
            (_, None) => counts.unmatched_truth += 1,
        }
    }
    counts.unmatched_predictions += by_pair.values().map(Vec::len).sum::<usize>();
    counts
}

fn rate(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Rates are `None` when their denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mate_count: usize,
    pub type_accuracy: Option<f64>,
    pub majority_type: Option<MateType>,
    pub majority_baseline_accuracy: Option<f64>,
    pub lift: Option<f64>,
    pub axis_accuracy_overall: Option<f64>,
    pub axis_accuracy_ambiguous_only: Option<f64>,
    pub ambiguous_fraction: Option<f64>,
    pub confusion_matrix: [[usize; 4]; 4],
    pub confusion_labels: [MateType; 4],
    pub unmatched_predictions: usize,
    pub unmatched_truth: usize,
    pub expert_agreement: Option<ConsensusStats>,
}

impl EvalReport {
    pub fn from_counts(c: &EvalCounts) -> Self {
        let truth = c.truth_counts();
        let majority = (c.mates > 0).then(|| majority_of(&truth));
        let type_accuracy = rate(c.type_correct, c.mates);
        let baseline = majority.and_then(|m| rate(truth[m.index()], c.mates));
        Self {
            mate_count: c.mates,
            type_accuracy,
            majority_type: majority,
            majority_baseline_accuracy: baseline,
            lift: type_accuracy.zip(baseline).map(|(a, b)| a - b),
            axis_accuracy_overall: rate(c.axis_correct, c.mates),
            axis_accuracy_ambiguous_only: rate(c.ambiguous_axis_correct, c.ambiguous),
            ambiguous_fraction: rate(c.ambiguous, c.mates),
            confusion_matrix: c.confusion,
            confusion_labels: MateType::ALL,
            unmatched_predictions: c.unmatched_predictions,
            unmatched_truth: c.unmatched_truth,
            expert_agreement: None,
        }
    }
}

/// Annotations collected for one mate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatedMate {
    pub mate_id: String,
    #[serde(default)]
    pub original: Option<MateType>,
    pub annotations: Vec<MateType>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusLabel {
    pub mate_id: String,
    pub label: Option<MateType>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConsensusStats {
    pub total: usize,
    /// Mates with at least two annotations.
    pub comparable: usize,
    pub with_consensus: usize,
    pub consensus_fraction: Option<f64>,
    /// Consensus mates that also carry an original label.
    pub with_original: usize,
    pub agreeing_with_original: usize,
    pub original_agreement: Option<f64>,
}

/// Strict-majority label per mate with two or more annotations.
pub fn consensus_labels(mates: &[AnnotatedMate]) -> (Vec<ConsensusLabel>, ConsensusStats) {
    let mut stats = ConsensusStats { total: mates.len(), ..Default::default() };
    let labels = mates
        .iter()
        .map(|m| {
            let n = m.annotations.len();
            let label = if n >= 2 {
                stats.comparable += 1;
                let mut counts = [0usize; 4];
                for a in &m.annotations {
                    counts[a.index()] += 1;
                }
                let top = majority_of(&counts);
                (2 * counts[top.index()] > n).then_some(top)
            } else {
                None
            };
            if let Some(l) = label {
                stats.with_consensus += 1;
                if let Some(o) = m.original {
                    stats.with_original += 1;
                    stats.agreeing_with_original += usize::from(o == l);
                }
            }
            ConsensusLabel { mate_id: m.mate_id.clone(), label }
        })
        .collect();
    stats.consensus_fraction = rate(stats.with_consensus, stats.comparable);
    stats.original_agreement = rate(stats.agreeing_with_original, stats.with_original);
    (labels, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use MateType::*;

    #[test]
    fn majority_examples() {
        let mut l = vec![Revolute; 5];
        l.extend([Fasten; 3]);
        assert_eq!(predict_majority(&l).unwrap(), Revolute);
        let mut l = vec![Fasten; 9];
        l.push(Revolute);
        assert_eq!(predict_majority(&l).unwrap(), Fasten);
        assert_eq!(predict_majority(&[Slider, Slider, Revolute, Revolute]).unwrap(), Revolute);
        assert!(matches!(predict_majority(&[]), Err(Error::EmptyLabels)));
    }

    #[test]
    fn consensus_examples() {
        let m = |a: Vec<MateType>| AnnotatedMate { mate_id: "m".into(), original: None, annotations: a };
        let (l, s) = consensus_labels(&[m(vec![Revolute, Revolute, Slider]), m(vec![Revolute, Slider]), m(vec![Fasten])]);
        assert_eq!(l[0].label, Some(Revolute));
        assert_eq!(l[1].label, None);
        assert_eq!(l[2].label, None);
        assert_eq!((s.total, s.comparable, s.with_consensus), (3, 2, 1));
        assert_eq!(s.consensus_fraction, Some(0.5));
    }

    #[test]
    fn report_rates_and_empty_denominators() {
        let mut c = EvalCounts::default();
        c.record(Revolute, Revolute, true, false);
        c.record(Slider, Revolute, false, true);
        let r = EvalReport::from_counts(&c);
        assert_eq!(r.type_accuracy, Some(0.5));
        assert_eq!(r.majority_type, Some(Revolute));
        assert_eq!(r.axis_accuracy_ambiguous_only, Some(0.0));
        let empty = EvalReport::from_counts(&EvalCounts::default());
        assert_eq!(empty.type_accuracy, None);
        assert_eq!(empty.lift, None);
    }
}
