//! Text and JSON reports. Rows come sorted by id and wall-clock columns are
//! optional, so identical runs under a clause budget give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Evaluation, ExternalStatus, HarnessError, Metrics, OracleStatus, Row};
use crate::pipeline::{Direction, Label};

#[derive(Clone, Copy, Debug, Default)]
pub struct ReportOptions {
    pub timings: bool,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    id: &'a str,
    gold: Label,
    predicted: &'static str,
    correct: bool,
    evidence: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    guard_fired: bool,
    expected_error: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<&'a str>,
    /// Clauses generated by the two directions.
    clauses: [usize; 2],
    proof_steps: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    oracle: Vec<(Direction, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    external: Vec<(Direction, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time_ms: Option<u128>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    dataset: &'a str,
    metrics: &'a Metrics,
    metrics_expected_ok: &'a Metrics,
    guard_fired: usize,
    rows: Vec<JsonRow<'a>>,
}

fn oracle_str(s: &OracleStatus) -> String {
    match s {
        OracleStatus::NoCountermodel => "no-countermodel".into(),
        OracleStatus::Countermodel => "COUNTERMODEL".into(),
        OracleStatus::OutOfBounds(why) => format!("out-of-bounds: {why}"),
    }
}

fn external_str(s: &ExternalStatus) -> String {
    match s {
        ExternalStatus::Agree => "agree".into(),
        ExternalStatus::Disagree { builtin, external } => format!("DISAGREE builtin={builtin} external={external}"),
        ExternalStatus::Failed(why) => format!("failed: {why}"),
    }
}

fn clauses(row: &Row) -> [usize; 2] {
    row.verdict.attempts.as_ref().map_or([0, 0], |(y, n)| [y.stats.generated, n.stats.generated])
}

fn proof_steps(row: &Row) -> Option<usize> {
    let (y, n) = row.verdict.attempts.as_ref()?;
    y.trace().or(n.trace()).map(|t| t.steps.len())
}

fn json_row<'a>(row: &'a Row, opts: ReportOptions) -> JsonRow<'a> {
    let v = &row.verdict;
    JsonRow {
        id: &v.id,
        gold: v.gold,
        predicted: v.predicted(),
        correct: v.correct(),
        evidence: v.evidence,
        error: v.error.as_ref().map(ToString::to_string),
        guard_fired: v.guard_fired,
        expected_error: row.expected_error,
        source: row.source.as_deref(),
        clauses: clauses(row),
        proof_steps: proof_steps(row),
        oracle: row.oracle.iter().map(|(d, s)| (*d, oracle_str(s))).collect(),
        external: row.external.iter().map(|(d, s)| (*d, external_str(s))).collect(),
        time_ms: opts.timings.then(|| (v.timings.analysis + v.timings.proving).as_millis()),
    }
}

pub fn to_json(e: &Evaluation, opts: ReportOptions) -> String {
    let report = JsonReport {
        dataset: &e.dataset,
        metrics: &e.metrics,
        metrics_expected_ok: &e.metrics_expected_ok,
        guard_fired: e.guard_fired(),
        rows: e.rows.iter().map(|r| json_row(r, opts)).collect(),
    };
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

fn metrics_block(out: &mut String, title: &str, m: &Metrics) {
    let _ = writeln!(out, "{title}: accuracy {:.4} ({}/{}), errors {}", m.accuracy, m.correct, m.total, m.errors);
    let majority = m.majority_label.map_or("-", Label::as_str);
    let _ = writeln!(out, "  majority baseline ({majority}): {:.4}", m.majority_baseline);
    let _ = writeln!(out, "  {:<8} {:>9} {:>9} {:>9} {:>7}", "label", "precision", "recall", "f1", "support");
    for (l, s) in Label::ALL.iter().zip(&m.per_label) {
        let _ = writeln!(out, "  {:<8} {:>9.4} {:>9.4} {:>9.4} {:>7}", l.as_str(), s.precision, s.recall, s.f1, s.support);
    }
    let _ = writeln!(out, "  confusion (rows gold, columns predicted)");
    let _ = writeln!(out, "  {:<8} {:>7} {:>7} {:>7} {:>7}", "", "yes", "no", "unknown", "error");
    for (l, row) in Label::ALL.iter().zip(&m.confusion) {
        let _ = writeln!(out, "  {:<8} {:>7} {:>7} {:>7} {:>7}", l.as_str(), row[0], row[1], row[2], row[3]);
    }
}

pub fn to_text(e: &Evaluation, opts: ReportOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {} ({} problems)", e.dataset, e.rows.len());
    metrics_block(&mut out, "all problems", &e.metrics);
    metrics_block(&mut out, "excluding known failures", &e.metrics_expected_ok);
    let _ = writeln!(out, "inconsistency guard fired: {}", e.guard_fired());
    let _ = writeln!(out);
    if e.rows.is_empty() {
        let _ = writeln!(out, "(no problems to report)");
        return out;
    }
    let _ = write!(out, "{:<26} {:<8} {:<8} {:<3} {:<4} {:>13}", "id", "gold", "pred", "ok", "dir", "clauses");
    if opts.timings {
        let _ = write!(out, " {:>8}", "ms");
    }
    let _ = writeln!(out, "  note");
    for row in &e.rows {
        let v = &row.verdict;
        let [y, n] = clauses(row);
        let ok = if v.correct() { "+" } else { "-" };
        let dir = match v.evidence {
            Some(Direction::Hypothesis) => "H",
            Some(Direction::Negation) => "¬H",
            None => "-",
        };
        let _ = write!(
            out,
            "{:<26} {:<8} {:<8} {:<3} {:<4} {:>13}",
            v.id,
            v.gold.as_str(),
            v.predicted(),
            ok,
            dir,
            format!("{y}/{n}")
        );
        if opts.timings {
            let _ = write!(out, " {:>8}", (v.timings.analysis + v.timings.proving).as_millis());
        }
        let mut notes = Vec::new();
        if row.expected_error {
            notes.push("known failure".to_string());
        }
        if let Some(err) = &v.error {
            notes.push(err.to_string());
        }
        for (d, s) in &row.oracle {
            if *s != OracleStatus::NoCountermodel {
                notes.push(format!("oracle {d:?}: {}", oracle_str(s)));
            }
        }
        for (d, s) in &row.external {
            if *s != ExternalStatus::Agree {
                notes.push(format!("external {d:?}: {}", external_str(s)));
            }
        }
        if notes.is_empty() {
            let _ = writeln!(out);
        } else {
            let _ = writeln!(out, "  {}", notes.join("; "));
        }
    }
    out
}

/// Writes `report.txt` and `report.json` into `dir`.
pub fn write_reports(e: &Evaluation, dir: &Path, opts: ReportOptions) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write { path: dir.into(), source })?;
    let mut written = Vec::new();
    for (name, body) in [("report.txt", to_text(e, opts)), ("report.json", to_json(e, opts))] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|source| HarnessError::Write { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::harness::{evaluate, Dataset, EvalOptions};

    #[test]
    fn reports_are_deterministic_and_sorted() {
        let data = r#"{"id": "z", "premises": ["Taro-wa Jiro yori omoi."], "hypothesis": "Taro-wa Jiro yori karui.", "gold": "no"}
{"id": "m", "premises": ["Taro-wa omoi."], "hypothesis": "Jiro-wa omoi.", "gold": "unknown"}"#;
        let d = Dataset::parse("t", data).unwrap();
        let run = || {
            let e = evaluate(&d, &Config::ci(), &EvalOptions::default()).unwrap();
            (to_text(&e, ReportOptions::default()), to_json(&e, ReportOptions::default()))
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert!(a.0.find("\nm ").unwrap() < a.0.find("\nz ").unwrap());
        let json: serde_json::Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(json["rows"][1]["predicted"], "no");
        assert_eq!(json["metrics"]["accuracy"], 1.0);
    }
}
