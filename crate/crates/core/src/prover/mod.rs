//! Built-in first-order prover with linear arithmetic over degrees.

pub mod arith;
pub mod clause;
pub mod clausify;
pub mod congruence;
pub mod external;
pub mod oracle;
pub mod saturate;
pub mod tptp;
pub mod tptp_read;
pub mod unify;

pub use arith::{decide_arith, decide_difference, ArithError, Constraint, Satisfiability};
pub use clause::{ArithRel, Atom, Clause, Literal};
pub use clausify::{clausify, Clausifier};
pub use oracle::{model_check, OracleError};
pub use saturate::{replay, Budget, Inference, Limits, Outcome, ReplayError, Stats, Step, Trace};

use thiserror::Error;

use crate::formula::Formula;
use saturate::{saturate, InputClause};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("proof replay failed: {0}")]
    Replay(#[from] ReplayError),
}

/// Named formulas: premises and the goal form the set of support, axioms
/// are background.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub premises: Vec<(String, Formula)>,
    pub axioms: Vec<(String, Formula)>,
    pub goal: Formula,
}

#[derive(Clone, Debug)]
pub struct ProofAttempt {
    pub outcome: Outcome,
    pub stats: Stats,
    /// The clauses the search started from.
    pub inputs: Vec<Clause>,
}

impl ProofAttempt {
    pub fn proved(&self) -> bool {
        matches!(self.outcome, Outcome::Proved(_))
    }

    pub fn trace(&self) -> Option<&Trace> {
        match &self.outcome {
            Outcome::Proved(t) => Some(t),
            _ => None,
        }
    }
}

/// Tries to refute premises, axioms and the negated goal. A found proof is
/// replayed before it is reported.
pub fn prove(problem: &Problem, budget: &Budget) -> Result<ProofAttempt, ProverError> {
    prove_with_limits(problem, budget, Limits::default())
}

pub fn prove_with_limits(problem: &Problem, budget: &Budget, limits: Limits) -> Result<ProofAttempt, ProverError> {
    let mut cl = Clausifier::new();
    let mut inputs = Vec::new();
    let mut add = |name: &str, f: &Formula, support: bool, cl: &mut Clausifier| -> Result<(), ProverError> {
        for clause in cl.clausify(f)? {
            inputs.push(InputClause { clause, source: name.to_string(), support });
        }
        Ok(())
    };
    for (name, f) in &problem.axioms {
        add(name, f, false, &mut cl)?;
    }
    for (name, f) in &problem.premises {
        add(name, f, true, &mut cl)?;
    }
    add("negated_goal", &Formula::not(problem.goal.clone()), true, &mut cl)?;
    let (outcome, stats) = saturate(&inputs, budget, limits);
    let clauses: Vec<Clause> = inputs.into_iter().map(|i| i.clause).collect();
    if let Outcome::Proved(trace) = &outcome {
        replay(trace, &clauses)?;
    }
    Ok(ProofAttempt { outcome, stats, inputs: clauses })
}
