//! Formula to clause conversion: negation normal form with Skolemization on
//! the way down (equivalent to prenexing existentials as far left as their
//! scope allows), then distribution into CNF.

use std::collections::BTreeMap;

use crate::formula::{Formula, Term};
use crate::terms::{Quantifier, Sort};

use super::clause::{Atom, Clause, Literal};
use super::ProverError;

/// Reserved prefix of Skolem symbols; lexical constants never start with it.
pub const SKOLEM_PREFIX: &str = "sk_";

/// Upper bound on the clauses one formula may expand into.
pub const MAX_CLAUSES_PER_FORMULA: usize = 4096;

enum Nnf {
    True,
    False,
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

/// Carries Skolem and variable counters across the formulas of one problem
/// so names never collide.
#[derive(Default)]
pub struct Clausifier {
    next_skolem: usize,
    next_var: usize,
    /// Sorts of every Skolem symbol introduced, with its arity.
    pub skolems: BTreeMap<String, (Sort, usize)>,
}

impl Clausifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clausify(&mut self, f: &Formula) -> Result<Vec<Clause>, ProverError> {
        let nnf = self.nnf(f, true, &BTreeMap::new(), &[]);
        let sets = cnf(&nnf)?;
        let mut out: Vec<Clause> = Vec::new();
        for lits in sets {
            let c = Clause::new(lits).without_false();
            if c.is_tautology() {
                continue;
            }
            let c = c.rename("X");
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(out)
    }

    fn skolem(&mut self, sort: Sort, args: Vec<Term>) -> Term {
        let name = format!("{SKOLEM_PREFIX}{}", self.next_skolem);
        self.next_skolem += 1;
        self.skolems.insert(name.clone(), (sort, args.len()));
        Term::Fn(name, args)
    }

    fn nnf(&mut self, f: &Formula, pos: bool, env: &BTreeMap<String, Term>, universals: &[String]) -> Nnf {
        let subst = |t: &Term| t.substitute(&|x| env.get(x).cloned());
        match f {
            Formula::True => if pos { Nnf::True } else { Nnf::False },
            Formula::False => if pos { Nnf::False } else { Nnf::True },
            Formula::Pred(p, args) => {
                Nnf::Lit(Literal::new(pos, Atom::Pred(p.clone(), args.iter().map(subst).collect())))
            }
            Formula::Eq(a, b) => Nnf::Lit(Literal::new(pos, Atom::Eq(subst(a), subst(b)))),
            Formula::Cmp(op, a, b) => Nnf::Lit(Literal::compare(*op, &subst(a), &subst(b), pos)),
            Formula::Not(a) => self.nnf(a, !pos, env, universals),
            Formula::And(fs) | Formula::Or(fs) => {
                let parts = fs.iter().map(|g| self.nnf(g, pos, env, universals)).collect();
                if matches!(f, Formula::And(_)) == pos { Nnf::And(parts) } else { Nnf::Or(parts) }
            }
            Formula::Implies(a, b) => {
                let a = self.nnf(a, !pos, env, universals);
                let b = self.nnf(b, pos, env, universals);
                if pos { Nnf::Or(vec![a, b]) } else { Nnf::And(vec![a, b]) }
            }
            Formula::Iff(a, b) => {
                // (a -> b) and (b -> a); negated: (a or b) and (not a or not b)
                let l = Nnf::Or(vec![self.nnf(a, !pos, env, universals), self.nnf(b, true, env, universals)]);
                let r = Nnf::Or(vec![self.nnf(a, pos, env, universals), self.nnf(b, false, env, universals)]);
                Nnf::And(vec![l, r])
            }
            Formula::Quant(q, x, sort, body) => {
                let universal = (*q == Quantifier::Forall) == pos;
                let mut env = env.clone();
                if universal {
                    let v = format!("U{}", self.next_var);
                    self.next_var += 1;
                    env.insert(x.clone(), Term::Var(v.clone()));
                    let mut us = universals.to_vec();
                    us.push(v);
                    self.nnf(body, pos, &env, &us)
                } else {
                    // Only the universals the body actually depends on.
                    let mut used = std::collections::BTreeSet::new();
                    for y in body.free_vars() {
                        if let Some(t) = env.get(&y) {
                            t.vars(&mut used);
                        }
                    }
                    let args = universals.iter().filter(|u| used.contains(*u)).map(|u| Term::Var(u.clone())).collect();
                    let sk = self.skolem(*sort, args);
                    env.insert(x.clone(), sk);
                    self.nnf(body, pos, &env, universals)
                }
            }
        }
    }
}

fn cnf(n: &Nnf) -> Result<Vec<Vec<Literal>>, ProverError> {
    Ok(match n {
        Nnf::True => vec![],
        Nnf::False => vec![vec![]],
        Nnf::Lit(l) => vec![vec![l.clone()]],
        Nnf::And(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(cnf(p)?);
            }
            out
        }
        Nnf::Or(parts) => {
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for p in parts {
                let sub = cnf(p)?;
                if acc.len() * sub.len() > MAX_CLAUSES_PER_FORMULA {
                    return Err(ProverError::TooLarge(format!(
                        "clause normal form exceeds {MAX_CLAUSES_PER_FORMULA} clauses"
                    )));
                }
                acc = acc
                    .iter()
                    .flat_map(|a| sub.iter().map(move |s| a.iter().chain(s).cloned().collect()))
                    .collect();
            }
            acc
        }
    })
}

/// Clauses of a formula with fresh Skolem names.
pub fn clausify(f: &Formula) -> Result<Vec<Clause>, ProverError> {
    Clausifier::new().clausify(f)
}
