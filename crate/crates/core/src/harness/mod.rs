//! Dataset evaluation: decide every problem, score the answers and
//! cross-check proofs against the finite-model oracle or an external prover.

pub mod dataset;
pub mod metrics;
pub mod report;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::config::Config;
use crate::formula::Formula;
use crate::pipeline::{decide, Direction, Verdict};
use crate::prover::external::ExternalProver;
use crate::prover::oracle::{entity_constants, MAX_ENTITIES};
use crate::prover::tptp::problem_to_tptp;
use crate::prover::{model_check, Problem as ProverProblem};

pub use dataset::{load_dataset, Dataset, DatasetError, Entry};
pub use metrics::{LabelScores, Metrics};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

/// What the oracle says about a proved direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleStatus {
    /// No model of premises, axioms and the negated goal within bounds.
    NoCountermodel,
    /// A finite countermodel exists: the proof is unsound.
    Countermodel,
    /// The problem does not fit the oracle.
    OutOfBounds(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExternalStatus {
    Agree,
    Disagree { builtin: bool, external: bool },
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct Row {
    pub verdict: Verdict,
    /// Marked in the dataset as a known failure.
    pub expected_error: bool,
    pub source: Option<String>,
    pub oracle: Vec<(Direction, OracleStatus)>,
    pub external: Vec<(Direction, ExternalStatus)>,
    /// TPTP files written for this problem.
    pub tptp_files: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub dataset: String,
    /// Sorted by problem id.
    pub rows: Vec<Row>,
    pub metrics: Metrics,
    /// Metrics without the rows marked as known failures.
    pub metrics_expected_ok: Metrics,
}

impl Evaluation {
    pub fn row(&self, id: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.verdict.id == id)
    }

    pub fn guard_fired(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict.guard_fired).count()
    }

    pub fn countermodels(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.oracle.iter().any(|(_, s)| *s == OracleStatus::Countermodel))
            .map(|r| r.verdict.id.as_str())
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    /// Check proved directions for finite countermodels.
    pub oracle_check: bool,
    /// Write two TPTP problems per prepared pair here.
    pub tptp_dir: Option<PathBuf>,
    /// Rerun every direction through this prover (requires `tptp_dir`).
    pub external: Option<ExternalProver>,
}

/// Decides every problem with up to `config.parallelism` workers.
pub fn evaluate(dataset: &Dataset, config: &Config, options: &EvalOptions) -> Result<Evaluation, HarnessError> {
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(dataset.len()));
    let workers = config.parallelism.clamp(1, dataset.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(entry) = dataset.entries.get(i) else { break };
                let verdict = decide(&entry.problem, config);
                done.lock().unwrap().push((i, verdict));
            });
        }
    });
    let mut verdicts = done.into_inner().unwrap();
    verdicts.sort_by(|a, b| dataset.entries[a.0].problem.id.cmp(&dataset.entries[b.0].problem.id));

    if let Some(dir) = &options.tptp_dir {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write { path: dir.clone(), source })?;
    }
    let mut rows = Vec::with_capacity(verdicts.len());
    for (i, verdict) in verdicts {
        let entry = &dataset.entries[i];
        let mut row = Row {
            expected_error: entry.expected_error(),
            source: entry.meta_str("source").map(str::to_string),
            oracle: Vec::new(),
            external: Vec::new(),
            tptp_files: Vec::new(),
            verdict,
        };
        if options.oracle_check {
            row.oracle = oracle_check(&row.verdict, config);
        }
        if let Some(dir) = &options.tptp_dir {
            row.tptp_files = write_tptp(&row.verdict, dir)?;
            if let Some(prover) = &options.external {
                row.external = external_check(&row.verdict, &row.tptp_files, prover);
            }
        }
        rows.push(row);
    }
    let pairs = |keep: &dyn Fn(&Row) -> bool| -> Vec<_> {
        rows.iter().filter(|r| keep(r)).map(|r| (r.verdict.gold, r.verdict.label)).collect()
    };
    let metrics = Metrics::compute(&pairs(&|_| true));
    let metrics_expected_ok = Metrics::compute(&pairs(&|r| !r.expected_error));
    Ok(Evaluation { dataset: dataset.name.clone(), rows, metrics, metrics_expected_ok })
}

fn directions(verdict: &Verdict) -> Vec<(Direction, &ProverProblem, bool)> {
    match (&verdict.prepared, &verdict.attempts) {
        (Some(p), Some((yes, no))) => vec![
            (Direction::Hypothesis, &p.hypothesis, yes.proved()),
            (Direction::Negation, &p.negation, no.proved()),
        ],
        _ => Vec::new(),
    }
}

/// Premises ∧ axioms ∧ ¬goal: any model of it refutes the proof.
pub fn countermodel_formula(p: &ProverProblem) -> Formula {
    Formula::conjoin(
        p.premises.iter().chain(&p.axioms).map(|(_, f)| f.clone()).chain([Formula::not(p.goal.clone())]),
    )
}

/// Searches for a countermodel to every proved direction.
pub fn oracle_check(verdict: &Verdict, config: &Config) -> Vec<(Direction, OracleStatus)> {
    directions(verdict)
        .into_iter()
        .filter(|(_, _, proved)| *proved)
        .map(|(d, problem, _)| {
            let f = countermodel_formula(problem);
            let n = config.oracle_entities.max(entity_constants(&f).len());
            let status = if n > MAX_ENTITIES {
                OracleStatus::OutOfBounds(format!("needs {n} entities"))
            } else {
                match model_check(&f, n, config.oracle_degrees) {
                    Ok(true) => OracleStatus::Countermodel,
                    Ok(false) => OracleStatus::NoCountermodel,
                    Err(e) => OracleStatus::OutOfBounds(e.to_string()),
                }
            };
            (d, status)
        })
        .collect()
}

/// Keeps ids usable as file names.
pub fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Hypothesis => "hypothesis",
        Direction::Negation => "negation",
    }
}

/// Two files per prepared problem, `<id>.hypothesis.p` and `<id>.negation.p`.
pub fn write_tptp(verdict: &Verdict, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut out = Vec::new();
    for (d, problem, _) in directions(verdict) {
        let title = format!("{} ({})", verdict.id, direction_name(d));
        let path = dir.join(format!("{}.{}.p", file_stem(&verdict.id), direction_name(d)));
        std::fs::write(&path, problem_to_tptp(&title, problem))
            .map_err(|source| HarnessError::Write { path: path.clone(), source })?;
        out.push(path);
    }
    Ok(out)
}

fn external_check(verdict: &Verdict, files: &[PathBuf], prover: &ExternalProver) -> Vec<(Direction, ExternalStatus)> {
    directions(verdict)
        .into_iter()
        .zip(files)
        .map(|((d, _, builtin), file)| {
            let status = match prover.proves(file) {
                Ok(external) if external == builtin => ExternalStatus::Agree,
                Ok(external) => ExternalStatus::Disagree { builtin, external },
                Err(e) => ExternalStatus::Failed(e.to_string()),
            };
            (d, status)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DATA: &str = r#"{"id": "b", "premises": ["Taro-wa Jiro yori omoi."], "hypothesis": "Taro-wa Jiro yori karui.", "gold": "no"}
{"id": "a", "premises": ["Taro-wa Jiro yori omoi.", "Jiro-wa omoi."], "hypothesis": "Taro-wa omoi.", "gold": "yes"}
{"id": "c", "premises": ["Taro-wa xyzzy."], "hypothesis": "Taro-wa omoi.", "gold": "unknown", "expected": "error"}"#;

    #[test]
    fn evaluates_sorted_with_checks() {
        let d = Dataset::parse("t", DATA).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let config = Config { parallelism: 2, ..Config::ci() };
        let opts = EvalOptions { oracle_check: true, tptp_dir: Some(dir.path().into()), external: None };
        let e = evaluate(&d, &config, &opts).unwrap();
        let ids: Vec<_> = e.rows.iter().map(|r| r.verdict.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!((e.metrics.correct, e.metrics.errors), (2, 1));
        assert_eq!(e.metrics_expected_ok.accuracy, 1.0);
        assert_eq!(e.row("a").unwrap().oracle, [(Direction::Hypothesis, OracleStatus::NoCountermodel)]);
        assert!(e.countermodels().is_empty());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);
        assert_eq!(file_stem("jsem-569 (a)"), "jsem-569__a_");
    }
}
