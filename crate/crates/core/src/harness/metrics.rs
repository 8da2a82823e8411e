//! Accuracy, one-vs-rest precision/recall/F1, confusion matrix and the
//! majority-class baseline. A missing prediction (a stage error) counts as
//! wrong and gets its own confusion column.

use serde::Serialize;

use crate::pipeline::Label;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LabelScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold items with this label.
    pub support: usize,
    /// Items predicted with this label.
    pub predicted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub total: usize,
    pub correct: usize,
    pub errors: usize,
    pub accuracy: f64,
    /// Indexed like [`Label::ALL`].
    pub per_label: [LabelScores; 3],
    /// Rows are gold labels; columns are yes, no, unknown, error.
    pub confusion: [[usize; 4]; 3],
    pub majority_label: Option<Label>,
    pub majority_baseline: f64,
}

fn index(l: Label) -> usize {
    Label::ALL.iter().position(|x| *x == l).unwrap()
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Metrics {
    pub fn compute(pairs: &[(Label, Option<Label>)]) -> Metrics {
        let mut confusion = [[0usize; 4]; 3];
        for &(gold, pred) in pairs {
            confusion[index(gold)][pred.map_or(3, index)] += 1;
        }
        let total = pairs.len();
        let correct: usize = (0..3).map(|i| confusion[i][i]).sum();
        let errors: usize = (0..3).map(|i| confusion[i][3]).sum();
        let per_label = std::array::from_fn(|i| {
            let support: usize = confusion[i].iter().sum();
            let predicted: usize = (0..3).map(|g| confusion[g][i]).sum();
            let tp = confusion[i][i];
            let (precision, recall) = (ratio(tp, predicted), ratio(tp, support));
            let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
            LabelScores { precision, recall, f1, support, predicted }
        });
        // Ties go to the earlier label in yes/no/unknown order.
        let majority = (0..3).fold(None::<usize>, |best, i| match best {
            Some(b) if per_label[b].support >= per_label[i].support => Some(b),
            _ if per_label[i].support > 0 => Some(i),
            _ => best,
        });
        Metrics {
            total,
            correct,
            errors,
            accuracy: ratio(correct, total),
            per_label,
            confusion,
            majority_label: majority.map(|i| Label::ALL[i]),
            majority_baseline: majority.map_or(0.0, |i| ratio(per_label[i].support, total)),
        }
    }

    pub fn scores(&self, label: Label) -> &LabelScores {
        &self.per_label[index(label)]
    }

    pub fn macro_f1(&self) -> f64 {
        self.per_label.iter().map(|s| s.f1).sum::<f64>() / 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn hand_computed_example() {
        let pairs = [
            (Yes, Some(Yes)),
            (Yes, Some(Yes)),
            (Yes, Some(Unknown)),
            (Yes, None),
            (No, Some(No)),
            (No, Some(Yes)),
            (Unknown, Some(Unknown)),
        ];
        let m = Metrics::compute(&pairs);
        assert_eq!((m.total, m.correct, m.errors), (7, 4, 1));
        assert!((m.accuracy - 4.0 / 7.0).abs() < 1e-12);
        let y = m.scores(Yes);
        assert!((y.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((y.recall - 0.5).abs() < 1e-12);
        assert!((y.f1 - 4.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.scores(No).precision, 1.0);
        assert_eq!(m.scores(Unknown).precision, 0.5);
        assert_eq!(m.confusion[0], [2, 0, 1, 1]);
        assert_eq!(m.majority_label, Some(Yes));
        assert!((m.majority_baseline - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_unpredicted_labels() {
        let m = Metrics::compute(&[]);
        assert_eq!((m.accuracy, m.majority_label), (0.0, None));
        let m = Metrics::compute(&[(No, Some(Yes))]);
        assert_eq!(m.scores(No).f1, 0.0);
        assert_eq!(m.scores(Unknown), &LabelScores::default());
    }
}
