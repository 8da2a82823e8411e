mod common;

use std::sync::OnceLock;

use degree_nli::config::Config;
use degree_nli::harness::report::{to_json, to_text, ReportOptions};
use degree_nli::harness::{evaluate, load_dataset, Dataset, EvalOptions, Evaluation};
use degree_nli::pipeline::Label;

fn dataset() -> Dataset {
    load_dataset(&common::corpus()).unwrap()
}

fn evaluation() -> &'static Evaluation {
    static EVAL: OnceLock<Evaluation> = OnceLock::new();
    EVAL.get_or_init(|| evaluate(&dataset(), &Config::ci(), &EvalOptions::default()).unwrap())
}

#[test]
fn corpus_shape() {
    let d = dataset();
    assert_eq!(d.len(), 40);
    let [yes, no, unknown] = d.label_counts();
    assert_eq!(yes + no + unknown, 40);
    assert!(no >= 5 && unknown >= 5, "{yes}/{no}/{unknown}");
    let expected: Vec<_> = d.entries.iter().filter(|e| e.expected_error()).map(|e| e.problem.id.as_str()).collect();
    assert_eq!(expected, ["jsem-589", "jsem-606"]);
    // every item says where it comes from
    assert!(d.entries.iter().all(|e| e.meta_str("source").is_some()));
}

#[test]
fn metrics_are_consistent_with_rows() {
    let e = evaluation();
    let m = &e.metrics;
    let correct = e.rows.iter().filter(|r| r.verdict.correct()).count();
    let errors = e.rows.iter().filter(|r| r.verdict.label.is_none()).count();
    assert_eq!((m.total, m.correct, m.errors), (40, correct, errors));
    let trace: usize = (0..3).map(|i| m.confusion[i][i]).sum();
    assert_eq!(trace, m.correct);
    assert!((m.accuracy - trace as f64 / 40.0).abs() < 1e-12);
    for (i, label) in Label::ALL.iter().enumerate() {
        let s = m.scores(*label);
        let predicted = e.rows.iter().filter(|r| r.verdict.label == Some(*label)).count();
        let hits = e.rows.iter().filter(|r| r.verdict.label == Some(*label) && r.verdict.gold == *label).count();
        let gold = e.rows.iter().filter(|r| r.verdict.gold == *label).count();
        assert_eq!((s.predicted, s.support), (predicted, gold));
        let p = if predicted == 0 { 0.0 } else { hits as f64 / predicted as f64 };
        let r = if gold == 0 { 0.0 } else { hits as f64 / gold as f64 };
        assert!((s.precision - p).abs() < 1e-12 && (s.recall - r).abs() < 1e-12, "{label}");
        let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        assert!((s.f1 - f1).abs() < 1e-12, "{label}");
        assert_eq!(m.confusion[i].iter().sum::<usize>(), gold);
    }
    // majority class is yes, as in the benchmark the corpus mirrors
    assert_eq!(m.majority_label, Some(Label::Yes));
}

#[test]
fn known_failures_and_no_guard() {
    let e = evaluation();
    for id in ["jsem-589", "jsem-606"] {
        let row = e.row(id).unwrap();
        assert!(row.expected_error && row.verdict.error.is_some(), "{id}");
    }
    assert_eq!(e.guard_fired(), 0);
    assert!(e.metrics_expected_ok.accuracy >= 0.9);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let opts = ReportOptions::default();
    let again = evaluate(&dataset(), &Config::ci(), &EvalOptions::default()).unwrap();
    assert_eq!(to_text(evaluation(), opts), to_text(&again, opts));
    assert_eq!(to_json(evaluation(), opts), to_json(&again, opts));
    let text = to_text(&again, opts);
    let ids: Vec<&str> = again.rows.iter().map(|r| r.verdict.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(text.contains("majority baseline (yes)"));
}

#[test]
fn parallel_evaluation_matches_sequential() {
    let config = Config { parallelism: 4, ..Config::ci() };
    let par = evaluate(&dataset(), &config, &EvalOptions::default()).unwrap();
    let opts = ReportOptions::default();
    assert_eq!(to_json(&par, opts), to_json(evaluation(), opts));
}

#[test]
fn empty_dataset_reports_cleanly() {
    let e = evaluate(&Dataset::default(), &Config::ci(), &EvalOptions::default()).unwrap();
    let text = to_text(&e, ReportOptions::default());
    assert!(text.contains("(0 problems)"), "{text}");
    assert!(text.contains("no problems"), "{text}");
}
