//! Acceptance runner: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use degree_nli::axioms::Registry;
use degree_nli::config::Config;
use degree_nli::formula::Formula;
use degree_nli::grammar::Lexicon;
use degree_nli::harness::{evaluate, load_dataset, EvalOptions, Evaluation, ExternalStatus, OracleStatus};
use degree_nli::pipeline::{analyze_with, decide, prepare, Label, Problem, Stage};
use degree_nli::prover::external::ExternalProver;
use degree_nli::prover::prove;
use degree_nli::prover::tptp_read::check_syntax;

type Outcome = Result<String, String>;

fn problem(id: &str, premises: &[&str], hypothesis: &str, gold: Label) -> Problem {
    Problem {
        id: id.into(),
        premises: premises.iter().map(|s| s.to_string()).collect(),
        hypothesis: hypothesis.into(),
        gold,
    }
}

fn golden() -> Outcome {
    let rows = common::golden_rows();
    let start = Instant::now();
    let failures: Vec<String> =
        rows.iter().filter_map(|r| common::check_golden(r).err().map(|e| format!("{}: {e}", r.id))).collect();
    let elapsed = start.elapsed();
    if !failures.is_empty() {
        return Err(failures.join(" | "));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("{} formulas took {elapsed:?}", rows.len()));
    }
    Ok(format!("{} formulas alpha-equivalent in {elapsed:.2?}", rows.len()))
}

fn walkthroughs(config: &Config) -> Outcome {
    let cases = [
        problem("chain", &["Taro-wa Jiro yori omoi.", "Jiro-wa 70 kg yori omoi."], "Taro-wa 70 kg yori omoi.", Label::Yes),
        problem("antonym", &["Taro-wa Jiro yori omoi."], "Taro-wa Jiro yori karui.", Label::No),
        problem("equative", &["Taro-wa Jiro to onaji kurai-no omosa-da.", "Jiro-wa omoi."], "Taro-wa omoi.", Label::Yes),
    ];
    let mut notes = Vec::new();
    for p in &cases {
        let start = Instant::now();
        let v = decide(p, config);
        let t = start.elapsed();
        if !v.correct() || t >= Duration::from_secs(20) {
            return Err(format!("{}: answered {} in {t:?}", p.id, v.predicted()));
        }
        notes.push(format!("{} {} {t:.2?}", p.id, v.predicted()));
    }
    Ok(notes.join(", "))
}

fn printed_items(e: &Evaluation) -> Outcome {
    let want = [
        ("jsem-569", Label::Yes),
        ("jsem-576", Label::No),
        ("jsem-570", Label::Unknown),
        ("jsem-620", Label::Yes),
        ("jsem-621-replaced", Label::Yes),
    ];
    for (id, label) in want {
        let row = e.row(id).ok_or(format!("{id} missing from corpus"))?;
        if row.verdict.label != Some(label) {
            return Err(format!("{id}: answered {}", row.verdict.predicted()));
        }
    }
    // Known failures: the attributive-genitive standard has no parse; the
    // verb-based predicate leaves an abstraction in composition.
    for (id, stage, needle) in [("jsem-589", Stage::Parse, "no parse"), ("jsem-606", Stage::Semantics, "abstraction left")] {
        let row = e.row(id).ok_or(format!("{id} missing from corpus"))?;
        match &row.verdict.error {
            Some(err) if row.expected_error && err.stage == stage && err.message.contains(needle) => {}
            other => return Err(format!("{id}: expected a {stage} error, got {other:?}")),
        }
    }
    Ok("5 labels as printed; jsem-589 parse error, jsem-606 residual abstraction".into())
}

fn accuracy(e: &Evaluation) -> Outcome {
    let m = &e.metrics_expected_ok;
    let line = format!(
        "{:.4} ({}/{}) excluding known failures; {:.4} overall",
        m.accuracy, m.correct, m.total, e.metrics.accuracy
    );
    if e.rows.len() != 40 {
        return Err(format!("corpus has {} problems", e.rows.len()));
    }
    if m.accuracy >= 0.90 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn soundness(e: &Evaluation) -> Outcome {
    let mut checked = 0;
    let mut out_of_bounds = 0;
    for row in &e.rows {
        for (_, s) in &row.oracle {
            match s {
                OracleStatus::NoCountermodel => checked += 1,
                OracleStatus::OutOfBounds(_) => out_of_bounds += 1,
                OracleStatus::Countermodel => {}
            }
        }
    }
    let bad = e.countermodels();
    if !bad.is_empty() {
        return Err(format!("countermodels for {}", bad.join(", ")));
    }
    if e.guard_fired() > 0 {
        return Err(format!("inconsistency guard fired {} times", e.guard_fired()));
    }
    let fuzz = common::arith_fuzz(1000);
    if fuzz.cases != 1000 || !fuzz.failures.is_empty() {
        return Err(format!("arith fuzz: {} cases, failures: {:?}", fuzz.cases, fuzz.failures.first()));
    }
    Ok(format!(
        "{checked} proofs without countermodel, {out_of_bounds} outside oracle bounds, guard silent; \
         arith fuzz {} cases ({} sat, {} exact-grid) agree",
        fuzz.cases, fuzz.sat, fuzz.grid_exact
    ))
}

/// Every presupposing corpus sentence, negated, still proves its presupposition.
fn projection(config: &Config) -> Outcome {
    let data = load_dataset(&common::corpus()).map_err(|e| e.to_string())?;
    let lex = Lexicon::builtin();
    let registry = Registry::builtin();
    let mut sentences = BTreeSet::new();
    for entry in &data.entries {
        if entry.expected_error() {
            continue;
        }
        for s in entry.problem.premises.iter().chain([&entry.problem.hypothesis]) {
            if let Ok(a) = analyze_with(s, lex, 0) {
                if a.presupposition != Formula::True {
                    sentences.insert(s.clone());
                }
            }
        }
    }
    if sentences.is_empty() {
        return Err("no presupposing sentence in the corpus".into());
    }
    for s in &sentences {
        let negated = format!("{} toiu-wake-de-wa-nai.", s.trim_end_matches('.'));
        let original = analyze_with(s, lex, 0).map_err(|e| e.to_string())?;
        let p = prepare(&problem("neg", &[&negated], &negated, Label::Yes), config).map_err(|e| e.to_string())?;
        if p.analyses[0].presupposition != original.presupposition {
            return Err(format!("`{negated}` changed the presupposition"));
        }
        let mut target = p.hypothesis.clone();
        target.goal = original.presupposition.map_scales(&|x| registry.scale_of(x));
        let attempt = prove(&target, &config.budget).map_err(|e| e.to_string())?;
        if !attempt.proved() {
            return Err(format!("`{negated}` does not prove {}", target.goal));
        }
        // and the at-issue content really was negated
        target.goal = original.at_issue.map_scales(&|x| registry.scale_of(x));
        if prove(&target, &config.budget).map_err(|e| e.to_string())?.proved() {
            return Err(format!("`{negated}` still proves its at-issue content"));
        }
    }
    Ok(format!("{} presupposing sentences, negated, entail their presupposition", sentences.len()))
}

fn tptp(e: &Evaluation, external_name: &str) -> Outcome {
    let prepared = e.rows.iter().filter(|r| r.verdict.prepared.is_some()).count();
    let files: Vec<_> = e.rows.iter().flat_map(|r| &r.tptp_files).collect();
    if files.len() != 2 * prepared {
        return Err(format!("{} files for {prepared} prepared problems", files.len()));
    }
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(|e| e.to_string())?;
        check_syntax(&text).map_err(|err| format!("{}: {err}", f.display()))?;
    }
    let mut agree = 0;
    for row in &e.rows {
        for (d, s) in &row.external {
            match s {
                ExternalStatus::Agree => agree += 1,
                other => return Err(format!("{} {d:?}: {other:?}", row.verdict.id)),
            }
        }
    }
    if agree != files.len() {
        return Err(format!("external verdicts for {agree} of {} files", files.len()));
    }
    Ok(format!("{} files parse; {external_name} agrees on all {agree}", files.len()))
}

fn main() {
    let config = Config::ci();
    let dir = tempfile::tempdir().expect("temp dir");
    let (external, external_name) = match std::env::var("DEGREE_NLI_EXTERNAL_PROVER") {
        Ok(cmd) if !cmd.trim().is_empty() => (ExternalProver::new(cmd.clone()), format!("external prover `{cmd}`")),
        _ => (
            ExternalProver::new(format!("{} prove-tptp {{file}}", env!("CARGO_BIN_EXE_degree-nli"))),
            "built-in stand-in (prove-tptp; not an independent prover)".to_string(),
        ),
    };
    let mut stand_in = external;
    stand_in.timeout = Duration::from_secs(120);
    let opts = EvalOptions { oracle_check: true, tptp_dir: Some(dir.path().to_path_buf()), external: Some(stand_in) };
    let data = load_dataset(&common::corpus()).expect("corpus loads");
    let eval = evaluate(&data, &config, &opts).expect("evaluation runs");

    let results: Vec<(&str, Outcome)> = vec![
        ("golden semantic representations", golden()),
        ("inference walkthroughs", walkthroughs(&config)),
        ("printed benchmark items", printed_items(&eval)),
        ("corpus accuracy", accuracy(&eval)),
        ("soundness", soundness(&eval)),
        ("presupposition projection", projection(&config)),
        ("TPTP export", tptp(&eval, &external_name)),
    ];
    let mut failed = false;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(note) => println!("criterion {}: PASS {name}: {note}", i + 1),
            Err(why) => {
                failed = true;
                println!("criterion {}: FAIL {name}: {why}", i + 1)
            }
        }
    }
    if failed {
        std::process::exit(1);
    }
}
