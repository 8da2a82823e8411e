//! Sentences to verdicts: preprocess, parse, compose, add axioms, prove
//! `H` and `¬H`.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axioms::{collect_adjectives, instantiate_axioms, Registry};
use crate::config::{Config, HypothesisPresupposition};
use crate::formula::Formula;
use crate::grammar::{parse, preprocess, Derivation, Lexicon};
use crate::prover::{self, ProofAttempt};
use crate::semantics::{compose_sem, MultiSem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
    Unknown,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Yes, Label::No, Label::Unknown];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Yes => "yes",
            Label::No => "no",
            Label::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown label `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Problem {
    pub id: String,
    pub premises: Vec<String>,
    pub hypothesis: String,
    pub gold: Label,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Preprocess,
    Parse,
    Semantics,
    Axioms,
    Prove,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Preprocess => "preprocess",
            Stage::Parse => "parse",
            Stage::Semantics => "semantics",
            Stage::Axioms => "axioms",
            Stage::Prove => "prove",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{stage} failed{}: {message}", sentence.as_ref().map(|s| format!(" on `{s}`")).unwrap_or_default())]
pub struct StageError {
    pub stage: Stage,
    pub sentence: Option<String>,
    pub message: String,
}

impl StageError {
    fn new(stage: Stage, sentence: Option<&str>, err: impl fmt::Display) -> Self {
        StageError { stage, sentence: sentence.map(str::to_string), message: err.to_string() }
    }
}

/// Everything the front end produced for one sentence.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub sentence: String,
    pub tokens: Vec<String>,
    pub derivation: Derivation,
    pub sem: MultiSem,
    pub at_issue: Formula,
    pub presupposition: Formula,
}

/// Runs the front end on one sentence with the built-in lexicon.
pub fn analyze(sentence: &str) -> Result<MultiSem, StageError> {
    analyze_with(sentence, Lexicon::builtin(), 0).map(|a| a.sem)
}

/// Tries the top derivation, then up to `next_k` more when a later stage
/// fails; reports the top derivation's error if none succeeds.
pub fn analyze_with(sentence: &str, lex: &Lexicon, next_k: usize) -> Result<Analysis, StageError> {
    let at = |stage, e: &dyn fmt::Display| StageError::new(stage, Some(sentence), e);
    let tokens = preprocess(sentence, lex).map_err(|e| at(Stage::Preprocess, &e))?;
    let parses = parse(&tokens, lex).map_err(|e| at(Stage::Parse, &e))?;
    let mut first_err = None;
    for derivation in parses.into_iter().take(next_k + 1) {
        let attempt = compose_sem(&derivation).map_err(|e| at(Stage::Semantics, &e)).and_then(|sem| {
            let at_issue = sem.at_issue_formula().map_err(|e| at(Stage::Semantics, &e))?;
            let presupposition = sem.presupposition_formula().map_err(|e| at(Stage::Semantics, &e))?;
            Ok((sem, at_issue, presupposition))
        });
        match attempt {
            Ok((sem, at_issue, presupposition)) => {
                let tokens = tokens.iter().map(|t| t.surface.clone()).collect();
                return Ok(Analysis { sentence: sentence.to_string(), tokens, derivation, sem, at_issue, presupposition });
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| at(Stage::Parse, &"no derivation")))
}

/// Which goal was proved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `P ∧ Ax ⊢ H`
    Hypothesis,
    /// `P ∧ Ax ⊢ ¬H`
    Negation,
}

/// The two prover problems for a pair, before proving.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub analyses: Vec<Analysis>,
    pub axioms: Vec<(String, Formula)>,
    pub hypothesis: prover::Problem,
    pub negation: prover::Problem,
}

/// Theta and delta are indexed by scale, so antonyms share them.
fn on_scales(f: &Formula, registry: &Registry) -> Formula {
    f.map_scales(&|s| registry.scale_of(s))
}

pub fn prepare(problem: &Problem, config: &Config) -> Result<Prepared, StageError> {
    let (lex, registry) = (Lexicon::builtin(), Registry::builtin());
    let mut analyses = Vec::new();
    for s in problem.premises.iter().chain([&problem.hypothesis]) {
        analyses.push(analyze_with(s, lex, config.next_k_parses)?);
    }
    let hyp = analyses.last().expect("hypothesis analysed");
    let mut premises: Vec<(String, Formula)> = analyses[..analyses.len() - 1]
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (format!("p{}", i + 1), on_scales(&Formula::conjoin([a.at_issue.clone(), a.presupposition.clone()]), registry))
        })
        .collect();
    let at_issue = on_scales(&hyp.at_issue, registry);
    let presupposition = on_scales(&hyp.presupposition, registry);
    let (yes_goal, no_goal) = match config.hypothesis_presupposition {
        HypothesisPresupposition::Goal => (
            Formula::conjoin([at_issue.clone(), presupposition.clone()]),
            Formula::conjoin([Formula::not(at_issue), presupposition]),
        ),
        HypothesisPresupposition::Premise => {
            if presupposition != Formula::True {
                premises.push(("h_presupposition".into(), presupposition));
            }
            (at_issue.clone(), Formula::not(at_issue))
        }
    };
    let formulas: Vec<Formula> = analyses.iter().flat_map(|a| [a.at_issue.clone(), a.presupposition.clone()]).collect();
    let lemmas: BTreeSet<String> = collect_adjectives(&formulas, registry);
    let axioms: Vec<(String, Formula)> = instantiate_axioms(&lemmas, registry)
        .map_err(|e| StageError::new(Stage::Axioms, None, e))?
        .into_iter()
        .map(|a| (a.name(), on_scales(&a.formula, registry)))
        .collect();
    let make = |goal| prover::Problem { premises: premises.clone(), axioms: axioms.clone(), goal };
    Ok(Prepared { hypothesis: make(yes_goal), negation: make(no_goal), analyses, axioms })
}

#[derive(Clone, Debug, Default)]
pub struct Timings {
    pub analysis: Duration,
    pub proving: Duration,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: String,
    pub gold: Label,
    /// `None` when a stage failed; such answers count as wrong.
    pub label: Option<Label>,
    pub error: Option<StageError>,
    pub evidence: Option<Direction>,
    /// Both directions were proved: the premises and axioms are inconsistent.
    pub guard_fired: bool,
    pub prepared: Option<Prepared>,
    pub attempts: Option<(ProofAttempt, ProofAttempt)>,
    pub timings: Timings,
}

impl Verdict {
    /// The label, or `error`.
    pub fn predicted(&self) -> &'static str {
        self.label.map_or("error", Label::as_str)
    }

    pub fn correct(&self) -> bool {
        self.label == Some(self.gold)
    }

    fn failed(problem: &Problem, error: StageError, timings: Timings) -> Self {
        Verdict {
            id: problem.id.clone(),
            gold: problem.gold,
            label: None,
            error: Some(error),
            evidence: None,
            guard_fired: false,
            prepared: None,
            attempts: None,
            timings,
        }
    }
}

fn run_direction(p: &prover::Problem, config: &Config) -> Result<ProofAttempt, StageError> {
    prover::prove(p, &config.budget).map_err(|e| StageError::new(Stage::Prove, None, e))
}

pub fn decide(problem: &Problem, config: &Config) -> Verdict {
    let start = Instant::now();
    let prepared = match prepare(problem, config) {
        Ok(p) => p,
        Err(e) => return Verdict::failed(problem, e, Timings { analysis: start.elapsed(), proving: Duration::ZERO }),
    };
    let analysis = start.elapsed();
    let start = Instant::now();
    let (yes, no) = if config.parallel_directions {
        std::thread::scope(|s| {
            let no = s.spawn(|| run_direction(&prepared.negation, config));
            let yes = run_direction(&prepared.hypothesis, config);
            (yes, no.join().expect("prover thread panicked"))
        })
    } else {
        (run_direction(&prepared.hypothesis, config), run_direction(&prepared.negation, config))
    };
    let timings = Timings { analysis, proving: start.elapsed() };
    let (yes, no) = match (yes, no) {
        (Ok(y), Ok(n)) => (y, n),
        (Err(e), _) | (_, Err(e)) => return Verdict::failed(problem, e, timings),
    };
    let (label, evidence, error, guard_fired) = match (yes.proved(), no.proved()) {
        (true, true) => (
            None,
            None,
            Some(StageError::new(Stage::Prove, None, "both directions proved; premises and axioms are inconsistent")),
            true,
        ),
        (true, false) => (Some(Label::Yes), Some(Direction::Hypothesis), None, false),
        (false, true) => (Some(Label::No), Some(Direction::Negation), None, false),
        (false, false) => (Some(Label::Unknown), None, None, false),
    };
    Verdict {
        id: problem.id.clone(),
        gold: problem.gold,
        label,
        error,
        evidence,
        guard_fired,
        prepared: Some(prepared),
        attempts: Some((yes, no)),
        timings,
    }
}
