//! Geometric heuristics standing in for learned type and axis predictors.

use serde::Serialize;

use crate::analysis::{shared_axes, sweep_feasibility, CandidateAxisSet};
use crate::assembly::{unordered_pair, Assembly, Feature, Mate, MateType, Provenance};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::geom::{lines_coincident, AxisLine};
use crate::pipeline::resolved_contact_tol;

/// Probability mass given to each non-predicted type.
pub const SMOOTHING: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypePrediction {
    pub pair: (String, String),
    pub predicted: MateType,
    /// Indexed in [`MateType::ALL`] order.
    pub scores: [f64; 4],
}

/// Smoothed one-hot score vector.
pub fn type_scores(predicted: MateType) -> [f64; 4] {
    let mut s = [SMOOTHING; 4];
    s[predicted.index()] = 1.0 - 3.0 * SMOOTHING;
    s
}

/// Argmax with ties going to the earlier type in [`MateType::ALL`].
pub fn argmax_type(scores: &[f64; 4]) -> MateType {
    let mut best = 0;
    for k in 1..4 {
        if scores[k] > scores[best] {
            best = k;
        }
    }
    MateType::ALL[best]
}

/// Classifies the pair's relative freedom about `axis` by sampled sweeps of
/// the second part (in id order) against the first.
pub fn predict_type_heuristic(
    a: &Assembly,
    pair: (&str, &str),
    axis: &AxisLine,
    tol: &ToleranceConfig,
) -> Result<TypePrediction> {
    let (pa, pb) = unordered_pair(pair.0, pair.1);
    let label = sweep_feasibility(a.part(&pa)?, a.part(&pb)?, axis, tol)?;
    let predicted = match (label.rotatable, label.slidable) {
        (true, true) => MateType::Cylindrical,
        (true, false) => MateType::Revolute,
        (false, true) => MateType::Slider,
        (false, false) => MateType::Fasten,
    };
    Ok(TypePrediction { pair: (pa, pb), predicted, scores: type_scores(predicted) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisScore {
    pub axis: AxisLine,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisPrediction {
    pub pair: (String, String),
    pub chosen: AxisLine,
    /// One entry per shared axis, in canonical axis order.
    pub scores: Vec<AxisScore>,
}

/// Scores each shared axis by the axial overlap of coaxial cylinder pairs
/// plus a contact-tolerance weight per coincident planar-face line.
pub fn score_axis_heuristic(
    a: &Assembly,
    pair: (&str, &str),
    candidates: &CandidateAxisSet,
    tol: &ToleranceConfig,
) -> Result<AxisPrediction> {
    let (pa, pb) = unordered_pair(pair.0, pair.1);
    let shared = shared_axes(&pa, &pb, candidates, tol);
    if shared.is_empty() {
        return Err(Error::NoSharedAxes(pa, pb));
    }
    let fa: Vec<Feature> = a.part(&pa)?.world_features().collect();
    let fb: Vec<Feature> = a.part(&pb)?.world_features().collect();
    let planar_weight = resolved_contact_tol(a, tol);

    let scores: Vec<AxisScore> = shared
        .iter()
        .map(|s| {
            let on_axis = |f: &&Feature| lines_coincident(&f.axis_line(), s, tol);
            let span = |f: &Feature| match f {
                Feature::CylindricalFace { axis, extent, .. } => {
                    let lo = s.param_of(&(axis.point() + axis.direction() * extent.0));
                    let hi = s.param_of(&(axis.point() + axis.direction() * extent.1));
                    Some((lo.min(hi), lo.max(hi)))
                }
                Feature::PlanarFace { .. } => None,
            };
            let cyl_a: Vec<(f64, f64)> = fa.iter().filter(on_axis).filter_map(span).collect();
            let cyl_b: Vec<(f64, f64)> = fb.iter().filter(on_axis).filter_map(span).collect();
            let overlap: f64 = cyl_a
                .iter()
                .flat_map(|x| cyl_b.iter().map(move |y| (x.1.min(y.1) - x.0.max(y.0)).max(0.0)))
                .sum();
            let planes = fa
                .iter()
                .chain(&fb)
                .filter(|f| matches!(f, Feature::PlanarFace { .. }))
                .filter(on_axis)
                .count();
            AxisScore { axis: *s, score: overlap + planar_weight * planes as f64 }
        })
        .collect();

    let mut best = 0;
    for (k, s) in scores.iter().enumerate().skip(1) {
        if s.score > scores[best].score {
            best = k;
        }
    }
    Ok(AxisPrediction { pair: (pa, pb), chosen: scores[best].axis, scores })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatePrediction {
    pub pair: (String, String),
    pub mate_type: MateType,
    pub axis: AxisLine,
    pub type_scores: [f64; 4],
    pub axis_scores: Vec<AxisScore>,
}

/// Predicts axis, then type about that axis, for one part pair.
pub fn predict_pair(
    a: &Assembly,
    pair: (&str, &str),
    candidates: &CandidateAxisSet,
    tol: &ToleranceConfig,
) -> Result<MatePrediction> {
    let axis = score_axis_heuristic(a, pair, candidates, tol)?;
    let ty = predict_type_heuristic(a, pair, &axis.chosen, tol)?;
    Ok(MatePrediction {
        pair: axis.pair,
        mate_type: ty.predicted,
        axis: axis.chosen,
        type_scores: ty.scores,
        axis_scores: axis.scores,
    })
}

/// Predictions for every mated pair, in pair order, and a copy of the
/// assembly whose mates are replaced by the predicted ones.
pub fn predict_assembly(a: &Assembly, tol: &ToleranceConfig) -> Result<(Assembly, Vec<MatePrediction>)> {
    let candidates = CandidateAxisSet::compute(a, tol);
    let mut pairs: Vec<(String, String)> = a.mates.iter().map(Mate::pair).collect();
    pairs.sort();
    pairs.dedup();
    let predictions = pairs
        .iter()
        .map(|(x, y)| predict_pair(a, (x, y), &candidates, tol))
        .collect::<Result<Vec<_>>>()?;
    let mates = predictions
        .iter()
        .map(|p| {
            let mut m = Mate::new(format!("pred:{}:{}", p.pair.0, p.pair.1), &p.pair.0, &p.pair.1, p.mate_type, p.axis);
            m.provenance = Provenance::Predicted;
            m
        })
        .collect();
    Ok((Assembly { mates, ..a.clone() }, predictions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Part;
    use crate::geom::{RigidTransform, TriangleMesh, Vec3};

    #[test]
    fn scores_form_a_distribution() {
        for t in MateType::ALL {
            let s = type_scores(t);
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(argmax_type(&s), t);
        }
        assert_eq!(argmax_type(&[0.25; 4]), MateType::Fasten);
        assert_eq!(argmax_type(&[0.1, 0.4, 0.4, 0.1]), MateType::Revolute);
    }

    fn part(id: &str, features: Vec<Feature>) -> Part {
        Part {
            id: id.into(),
            mesh: TriangleMesh::cuboid(Vec3::repeat(-1.0), Vec3::repeat(1.0)),
            features,
            placement: RigidTransform::identity(),
        }
    }

    #[test]
    fn long_pin_beats_incidental_face_line() {
        let pin = Feature::cylinder(Vec3::new(0.0, 0.0, -5.0), Vec3::new(0.0, 0.0, 5.0), 1.0).unwrap();
        let bore = Feature::cylinder(Vec3::new(0.0, 0.0, -5.0), Vec3::new(0.0, 0.0, 5.0), 1.0).unwrap();
        let face = |x: f64| Feature::planar(Vec3::new(x, 0.0, 0.0), Vec3::x()).unwrap();
        let a = Assembly {
            id: "hinge".into(),
            parts: vec![part("a", vec![pin, face(1.0)]), part("b", vec![bore, face(-1.0)])],
            ..Default::default()
        };
        let tol = ToleranceConfig::default();
        let c = CandidateAxisSet::compute(&a, &tol);
        let p = score_axis_heuristic(&a, ("b", "a"), &c, &tol).unwrap();
        assert_eq!(p.scores.len(), 2);
        assert_eq!(p.chosen.direction(), Vec3::z());
        let pin_score = p.scores.iter().find(|s| s.axis.direction() == Vec3::z()).unwrap().score;
        assert!((pin_score - 10.0).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_canonical_order_and_empty_set_errors() {
        let face = |x: f64| Feature::planar(Vec3::new(x, 0.0, 0.0), Vec3::x()).unwrap();
        let facey = |y: f64| Feature::planar(Vec3::new(0.0, y, 0.0), Vec3::y()).unwrap();
        let a = Assembly {
            id: "tie".into(),
            parts: vec![part("a", vec![face(1.0), facey(1.0)]), part("b", vec![face(-1.0), facey(-1.0)])],
            ..Default::default()
        };
        let tol = ToleranceConfig::default();
        let c = CandidateAxisSet::compute(&a, &tol);
        let p = score_axis_heuristic(&a, ("a", "b"), &c, &tol).unwrap();
        assert_eq!(p.scores[0].score, p.scores[1].score);
        assert_eq!(p.chosen, p.scores[0].axis);

        let lonely = Assembly { parts: vec![part("a", vec![face(1.0)]), part("b", vec![facey(1.0)])], ..a };
        let c = CandidateAxisSet::compute(&lonely, &tol);
        assert!(matches!(score_axis_heuristic(&lonely, ("a", "b"), &c, &tol), Err(Error::NoSharedAxes(..))));
    }
}
