mod common;

use mateforge::analysis::CandidateAxisSet;
use mateforge::eval::{consensus_labels, evaluate, evaluate_mates, EvalReport};
use mateforge::io::{generate_fixture, FixtureParams};
use mateforge::predict::{predict_assembly, predict_type_heuristic};
use mateforge::{MateType, ToleranceConfig};
use proptest::prelude::*;

use common::{micro_row as row, rigid, rng, study_mock, with_mates, PREDICTED, TRUTH};
use MateType::*;

#[test]
fn micro_corpus_accuracy_and_lift() {
    let tol = ToleranceConfig::default();
    let base = row(11);
    let truth = with_mates(&base, &TRUTH, 0.5);
    let pred = with_mates(&base, &PREDICTED, 0.5);
    let r = EvalReport::from_counts(&evaluate(&pred, &truth, &tol));

    let correct = TRUTH.iter().zip(&PREDICTED).filter(|(t, p)| t == p).count();
    let mut freq = [0usize; 4];
    for t in TRUTH {
        freq[t.index()] += 1;
    }
    let majority = *freq.iter().max().unwrap();
    assert_eq!((correct, majority), (6, 4));

    assert_eq!(r.mate_count, 10);
    assert!((r.type_accuracy.unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(r.majority_type, Some(Revolute));
    assert!((r.majority_baseline_accuracy.unwrap() - 0.4).abs() < 1e-12);
    assert!((r.lift.unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(r.lift.unwrap(), r.type_accuracy.unwrap() - r.majority_baseline_accuracy.unwrap());
    let diag: usize = (0..4).map(|k| r.confusion_matrix[k][k]).sum();
    assert_eq!(diag, correct);
}

#[test]
fn perfect_and_cyclically_shifted_predictions() {
    let tol = ToleranceConfig::default();
    let base = row(11);
    let truth = with_mates(&base, &TRUTH, 0.5);
    let r = EvalReport::from_counts(&evaluate(&truth, &truth, &tol));
    assert_eq!(r.type_accuracy, Some(1.0));
    assert_eq!(r.axis_accuracy_overall, Some(1.0));
    if let Some(x) = r.axis_accuracy_ambiguous_only {
        assert_eq!(x, 1.0);
    }

    let shifted: Vec<MateType> = TRUTH.iter().map(|t| MateType::ALL[(t.index() + 1) % 4]).collect();
    let r = EvalReport::from_counts(&evaluate(&with_mates(&base, &shifted, 0.5), &truth, &tol));
    assert_eq!(r.type_accuracy, Some(0.0));
}

#[test]
fn parallel_offset_slider_axis_counts_as_correct() {
    let tol = ToleranceConfig::default();
    let base = row(2);
    let truth = with_mates(&base, &[Slider], 0.5);
    let pred = with_mates(&base, &[Slider], 0.9);
    let c = evaluate(&pred, &truth, &tol);
    assert_eq!(c.axis_correct, 1);

    let truth = with_mates(&base, &[Revolute], 0.5);
    let pred = with_mates(&base, &[Revolute], 0.9);
    let c = evaluate(&pred, &truth, &tol);
    assert_eq!((c.axis_correct, c.ambiguous), (0, 1));
}

#[test]
fn unmatched_mates_are_reported() {
    let tol = ToleranceConfig::default();
    let base = row(4);
    let truth = with_mates(&base, &[Revolute, Revolute], 0.5);
    let mut pred = with_mates(&base, &[Revolute, Revolute, Fasten], 0.5);
    pred.mates.remove(0);
    let c = evaluate_mates(&pred.mates, &truth.mates, &CandidateAxisSet::compute(&truth, &tol), &tol);
    assert_eq!((c.mates, c.unmatched_truth, c.unmatched_predictions), (1, 1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_identities(truth in proptest::collection::vec(0usize..4, 1..10),
                         pred in proptest::collection::vec(0usize..4, 10),
                         offset in proptest::bool::ANY) {
        let tol = ToleranceConfig::default();
        let base = row(truth.len() + 1);
        let tt: Vec<MateType> = truth.iter().map(|k| MateType::ALL[*k]).collect();
        let pp: Vec<MateType> = pred[..truth.len()].iter().map(|k| MateType::ALL[*k]).collect();
        let t = with_mates(&base, &tt, 0.5);
        let p = with_mates(&base, &pp, if offset { 0.9 } else { 0.5 });
        let r = EvalReport::from_counts(&evaluate(&p, &t, &tol));
        let acc = r.type_accuracy.unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
        prop_assert_eq!(r.lift.unwrap(), acc - r.majority_baseline_accuracy.unwrap());
        let total: usize = r.confusion_matrix.iter().flatten().sum();
        prop_assert_eq!(total, truth.len());
        if !offset {
            // Chosen axes are shared axes: unambiguous mates cannot be wrong.
            prop_assert!(r.axis_accuracy_overall.unwrap() >= 1.0 - r.ambiguous_fraction.unwrap() - 1e-12);
        }
    }
}

#[test]
fn consensus_matches_the_study_counts() {
    let mock = study_mock();
    let (labels, s) = consensus_labels(&mock);
    assert_eq!(labels.len(), 349);
    assert_eq!((s.total, s.comparable, s.with_consensus), (349, 341, 301));
    assert!((s.consensus_fraction.unwrap() - 301.0 / 341.0).abs() < 1e-12);
    assert_eq!(format!("{:.2}", s.consensus_fraction.unwrap()), "0.88");
    assert_eq!((s.with_original, s.agreeing_with_original), (301, 201));
    assert_eq!(format!("{:.3}", s.original_agreement.unwrap()), "0.668");
}

#[test]
fn type_heuristic_ignores_global_pose() {
    let tol = ToleranceConfig::default();
    let cases = [("shaft_hole", Cylindrical), ("hinge_flanged", Revolute), ("keyed_slider", Slider), ("press_fit", Fasten)];
    let mut r = rng(31);
    for trial in 0..100 {
        let (name, expected) = cases[trial % 4];
        let a = generate_fixture(name, FixtureParams::default(), 0).unwrap();
        let moved = a.transformed(&rigid(&mut r, 50.0));
        let m = &moved.mates[0];
        let p = predict_type_heuristic(&moved, (&m.part_a, &m.part_b), &m.axis, &tol).unwrap();
        assert_eq!(p.predicted, expected, "{name} trial {trial}");
    }
}

#[test]
fn predicted_assemblies_carry_predicted_mates() {
    let tol = ToleranceConfig::default();
    let a = generate_fixture("hinge_flanged", FixtureParams::default(), 2).unwrap();
    let (p, preds) = predict_assembly(&a, &tol).unwrap();
    assert_eq!(preds.len(), 1);
    assert_eq!(p.mates.len(), 1);
    assert_eq!(p.mates[0].provenance, mateforge::Provenance::Predicted);
    assert_eq!(p.mates[0].mate_type(), Some(Revolute));
    assert_eq!(p.parts, a.parts);
    let s: f64 = preds[0].type_scores.iter().sum();
    assert!((s - 1.0).abs() < 1e-12);
}
