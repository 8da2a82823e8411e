//! Ground linear arithmetic over the rationals.
//!
//! Difference constraints `x - y REL c` are decided by negative-cycle
//! detection; strictness is tracked as an infinitesimal so `x < y, y <= x`
//! is a negative cycle while `x <= y, y <= x` is not. Anything else is first
//! reduced to difference form by substituting equalities and
//! Fourier–Motzkin elimination, which is exact over ordered fields.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::formula::{Linear, Term};
use crate::terms::Rational;

use super::clause::{ArithRel, Atom, Clause, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("not a difference constraint: {0}")]
    UnsupportedAtom(String),
    #[error("constraint mentions a variable: {0}")]
    NonGround(String),
    #[error("elimination exceeded {0} constraints")]
    Budget(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Satisfiability {
    Sat,
    Unsat,
}

/// `expr REL 0` over ground atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub expr: Linear,
    pub rel: ArithRel,
}

impl Constraint {
    pub fn new(expr: Linear, rel: ArithRel) -> Self {
        Constraint { expr, rel }
    }

    fn describe(&self) -> String {
        format!("{} {} 0", Term::Lin(self.expr.clone()).to_lambda(), self.rel.symbol())
    }
}

/// Cap on intermediate constraints during elimination.
pub const ELIMINATION_BUDGET: usize = 20_000;

/// Path weight `c - k·ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Weight {
    c: Rational,
    k: i64,
}

impl Weight {
    fn plus(self, o: Weight) -> Weight {
        Weight { c: self.c + o.c, k: self.k + o.k }
    }

    fn less(self, o: Weight) -> bool {
        self.c < o.c || (self.c == o.c && self.k > o.k)
    }
}

/// Zero node of the constraint graph; single-atom bounds are edges to it.
const ZERO: usize = 0;

/// Decides a conjunction of difference constraints. Fails on anything that
/// is not of the form `x - y REL c` or `±x REL c`.
pub fn decide_difference(cs: &[Constraint]) -> Result<Satisfiability, ArithError> {
    let mut nodes: BTreeMap<Term, usize> = BTreeMap::new();
    let mut edges: Vec<(usize, usize, Weight)> = Vec::new();
    let node = |t: &Term, nodes: &mut BTreeMap<Term, usize>| -> usize {
        let n = nodes.len() + 1;
        *nodes.entry(t.clone()).or_insert(n)
    };
    for c in cs {
        check_ground(c)?;
        let strict = i64::from(c.rel == ArithRel::Lt);
        let ((from, to), bound) = match c.expr.coeffs.as_slice() {
            [] => {
                if !c.rel.holds(c.expr.constant) {
                    return Ok(Satisfiability::Unsat);
                }
                continue;
            }
            // a·x + k REL 0
            [(x, a)] => {
                let bound = -c.expr.constant / a.abs();
                let x = node(x, &mut nodes);
                if a.is_positive() { ((ZERO, x), bound) } else { ((x, ZERO), bound) }
            }
            // a·x - a·y + k REL 0
            [(x, a), (y, b)] if *a == -*b => {
                let bound = -c.expr.constant / a.abs();
                let (x, y) = (node(x, &mut nodes), node(y, &mut nodes));
                if a.is_positive() { ((y, x), bound) } else { ((x, y), bound) }
            }
            _ => return Err(ArithError::UnsupportedAtom(c.describe())),
        };
        // to - from REL bound
        edges.push((from, to, Weight { c: bound, k: strict }));
        if c.rel == ArithRel::Eq {
            edges.push((to, from, Weight { c: -bound, k: 0 }));
        }
    }
    let n = nodes.len() + 1;
    let mut dist = vec![Weight { c: Rational::zero(), k: 0 }; n];
    for _ in 0..n {
        let mut changed = false;
        for &(u, v, w) in &edges {
            let cand = dist[u].plus(w);
            if cand.less(dist[v]) {
                dist[v] = cand;
                changed = true;
            }
        }
        if !changed {
            return Ok(Satisfiability::Sat);
        }
    }
    Ok(Satisfiability::Unsat)
}

fn check_ground(c: &Constraint) -> Result<(), ArithError> {
    if c.expr.coeffs.iter().all(|(t, _)| t.is_ground()) {
        Ok(())
    } else {
        Err(ArithError::NonGround(c.describe()))
    }
}

fn is_difference(c: &Constraint) -> bool {
    match c.expr.coeffs.as_slice() {
        [] | [_] => true,
        [(_, a), (_, b)] => *a == -*b,
        _ => false,
    }
}

/// Decides any conjunction of ground linear constraints.
pub fn decide_arith(cs: &[Constraint]) -> Result<Satisfiability, ArithError> {
    for c in cs {
        check_ground(c)?;
    }
    let mut cs: Vec<Constraint> = cs.to_vec();
    // Equalities: solve for an atom and substitute it away.
    while let Some(i) = cs.iter().position(|c| c.rel == ArithRel::Eq && !is_difference(c)) {
        let eq = cs.swap_remove(i);
        let (pivot, a) = eq.expr.coeffs[0].clone();
        cs = cs
            .into_iter()
            .map(|c| {
                let k = c.expr.coeff_of(&pivot);
                if k.is_zero() {
                    c
                } else {
                    Constraint::new(c.expr.sub(&eq.expr.scale(k / a)), c.rel)
                }
            })
            .collect();
    }
    // Fourier–Motzkin on atoms of non-difference constraints.
    while let Some(c) = cs.iter().find(|c| !is_difference(c)) {
        let pivot = c.expr.coeffs[0].0.clone();
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in cs {
            let k = c.expr.coeff_of(&pivot);
            if k.is_zero() {
                rest.push(c);
            } else if c.rel == ArithRel::Eq {
                // a difference equality touching the pivot: split it
                let flipped = Constraint::new(c.expr.scale(-Rational::one()), ArithRel::Le);
                let c = Constraint::new(c.expr, ArithRel::Le);
                if k.is_positive() {
                    pos.push(c);
                    neg.push(flipped);
                } else {
                    neg.push(c);
                    pos.push(flipped);
                }
            } else if k.is_positive() {
                pos.push(c);
            } else {
                neg.push(c);
            }
        }
        for p in &pos {
            for q in &neg {
                let c = combine(p, q, &pivot);
                if c.expr.is_constant() {
                    if !c.rel.holds(c.expr.constant) {
                        return Ok(Satisfiability::Unsat);
                    }
                } else {
                    rest.push(c);
                }
            }
        }
        rest.sort();
        rest.dedup();
        if rest.len() > ELIMINATION_BUDGET {
            return Err(ArithError::Budget(ELIMINATION_BUDGET));
        }
        cs = rest;
    }
    decide_difference(&cs)
}

/// The Fourier–Motzkin resolvent of an upper and a lower bound on `pivot`.
fn combine(p: &Constraint, q: &Constraint, pivot: &Term) -> Constraint {
    let kp = p.expr.coeff_of(pivot);
    let kq = -q.expr.coeff_of(pivot);
    let expr = p.expr.scale(Rational::one() / kp).add(&q.expr.scale(Rational::one() / kq));
    let rel = if p.rel == ArithRel::Lt || q.rel == ArithRel::Lt { ArithRel::Lt } else { ArithRel::Le };
    Constraint::new(expr, rel)
}

/// Projects out variables that occur only in order literals of a clause.
///
/// For such an `x`, `forall x. (L1(x) or ... or Ln(x))` is the negation of
/// `exists x. (not L1(x) and ... and not Ln(x))`, and eliminating `x` from
/// that conjunction is exact. Returns `None` when no variable qualifies.
pub fn eliminate_local_vars(c: &Clause) -> Option<Clause> {
    let is_order = |l: &Literal| l.positive && matches!(l.atom, Atom::Arith(ArithRel::Lt | ArithRel::Le, _));
    let mut current = c.clone();
    let mut changed = false;
    loop {
        let local = current.vars().into_iter().find(|x| {
            current.literals.iter().all(|l| {
                let mut vs = std::collections::BTreeSet::new();
                l.atom.vars(&mut vs);
                !vs.contains(x) || is_order(l)
            })
        });
        let Some(x) = local else { break };
        let pivot = Term::Var(x.clone());
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for l in &current.literals {
            let Atom::Arith(rel, e) = &l.atom else {
                rest.push(l.clone());
                continue;
            };
            let k = e.coeff_of(&pivot);
            if k.is_zero() {
                rest.push(l.clone());
                continue;
            }
            // not(e < 0) is -e <= 0; not(e <= 0) is -e < 0
            let neg_rel = if *rel == ArithRel::Lt { ArithRel::Le } else { ArithRel::Lt };
            let negated = Constraint::new(e.scale(-Rational::one()), neg_rel);
            if k.is_positive() { lower.push(negated) } else { upper.push(negated) }
        }
        for p in &upper {
            for q in &lower {
                let c = combine(p, q, &pivot);
                let rel = if c.rel == ArithRel::Lt { ArithRel::Le } else { ArithRel::Lt };
                rest.push(Literal::pos(Atom::arith(rel, c.expr.scale(-Rational::one()))));
            }
        }
        current = Clause::new(rest).without_false();
        changed = true;
    }
    changed.then(|| current.rename("X"))
}

/// Constraint form of a ground arithmetic literal; disequalities have none.
pub fn literal_constraint(l: &Literal) -> Option<Constraint> {
    match &l.atom {
        Atom::Arith(rel, e) if l.positive => Some(Constraint::new(e.clone(), *rel)),
        _ => None,
    }
}

/// Most disequalities a conjunction may contain; each one doubles the work.
pub const MAX_DISEQUALITIES: usize = 8;

/// Decides a conjunction of arithmetic literals, disequalities included
/// (each is split into its two strict halves).
pub fn decide_literals(lits: &[Literal]) -> Result<Satisfiability, ArithError> {
    let mut base = Vec::new();
    let mut diseqs = Vec::new();
    for l in lits {
        match (&l.atom, literal_constraint(l)) {
            (_, Some(c)) => base.push(c),
            (Atom::Arith(ArithRel::Eq, e), None) => diseqs.push(e.clone()),
            _ => return Err(ArithError::UnsupportedAtom(l.to_string())),
        }
    }
    if diseqs.len() > MAX_DISEQUALITIES {
        return Err(ArithError::Budget(MAX_DISEQUALITIES));
    }
    for mask in 0u32..(1 << diseqs.len()) {
        let mut cs = base.clone();
        for (i, e) in diseqs.iter().enumerate() {
            let e = if mask & (1 << i) == 0 { e.clone() } else { e.scale(-Rational::one()) };
            cs.push(Constraint::new(e, ArithRel::Lt));
        }
        if decide_arith(&cs)? == Satisfiability::Sat {
            return Ok(Satisfiability::Sat);
        }
    }
    Ok(Satisfiability::Unsat)
}

/// Whether `facts` entail `lit`.
pub fn entails(facts: &[Literal], lit: &Literal) -> Result<bool, ArithError> {
    let mut all = facts.to_vec();
    all.push(lit.negate());
    Ok(decide_literals(&all)? == Satisfiability::Unsat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{extract_formula, Formula};
    use crate::prover::clause::Literal;
    use crate::terms::parse_term;

    fn lits(src: &str) -> Vec<Literal> {
        let f = extract_formula(&parse_term(src).unwrap()).unwrap();
        let parts = match f {
            Formula::And(ps) => ps,
            p => vec![p],
        };
        parts
            .into_iter()
            .map(|p| match p {
                Formula::Cmp(op, a, b) => Literal::compare(op, &a, &b, true),
                Formula::Not(inner) => match *inner {
                    Formula::Cmp(op, a, b) => Literal::compare(op, &a, &b, false),
                    other => panic!("{other}"),
                },
                other => panic!("{other}"),
            })
            .collect()
    }

    fn sat(src: &str) -> bool {
        decide_literals(&lits(src)).unwrap() == Satisfiability::Sat
    }

    fn constraints(src: &str) -> Vec<Constraint> {
        lits(src).iter().map(|l| literal_constraint(l).unwrap()).collect()
    }

    #[test]
    fn bounds() {
        assert!(!sat("and(gt(d, 70), lt(d, 70))"));
        assert!(!sat("and(gt(d, 70), le(d, 70))"));
        assert!(sat("and(ge(d, 70), le(d, 70))"));
        assert!(sat("and(gt(d, 70), le(d, 75))"));
        assert!(!sat("and(gt(d, 75), lt(d, 70))"));
    }

    #[test]
    fn strict_cycles() {
        assert!(!sat("and(lt(x, y), lt(y, x))"));
        assert!(sat("and(le(x, y), le(y, x))"));
        assert!(!sat("and(lt(x, y), le(y, z), le(z, x))"));
        assert!(sat("and(lt(x, plus(y, 1)), lt(y, x))"));
    }

    #[test]
    fn threshold_and_tolerance() {
        // theta - delta < theta follows from delta > 0
        let facts = lits("gt(delta(heavy), 0)");
        let goal = &lits("lt(plus(theta(heavy), neg(delta(heavy))), theta(heavy))")[0];
        assert!(entails(&facts, goal).unwrap());
        let goal = &lits("lt(plus(theta(heavy), delta(heavy)), theta(heavy))")[0];
        assert!(!entails(&facts, goal).unwrap());
    }

    #[test]
    fn differences_only_for_the_graph_solver() {
        let cs = constraints("and(lt(plus(x, y), 0), gt(x, 0), gt(y, 0))");
        assert!(matches!(decide_difference(&cs), Err(ArithError::UnsupportedAtom(_))));
        assert_eq!(decide_arith(&cs).unwrap(), Satisfiability::Unsat);
        let cs = constraints("and(lt(plus(x, y), 3), gt(x, 1), gt(y, 1))");
        assert_eq!(decide_arith(&cs).unwrap(), Satisfiability::Sat);
    }

    #[test]
    fn equalities_and_disequalities() {
        assert!(!sat("and(deq(plus(x, y), 4), deq(x, 1), gt(y, 3))"));
        assert!(sat("and(deq(plus(x, y), 4), deq(x, 1), ge(y, 3))"));
        assert!(!sat("and(not(deq(x, y)), le(x, y), ge(x, y))"));
        assert!(sat("and(not(deq(x, y)), le(x, y))"));
    }

    #[test]
    fn local_variables_projected() {
        let x = Term::Var("X".into());
        let y = Term::Var("Y".into());
        let th = Term::Theta("heavy".into());
        let p = Literal::pos(Atom::Pred("heavy".into(), vec![Term::constant("jiro"), y.clone()]));
        // heavy(jiro, Y) or theta < X or X < Y   ==>   heavy(jiro, Y) or theta < Y
        let c = Clause::new(vec![
            p.clone(),
            Literal::compare(crate::terms::CmpOp::Lt, &th, &x, true),
            Literal::compare(crate::terms::CmpOp::Lt, &x, &y, true),
        ]);
        let want = Clause::new(vec![p.clone(), Literal::compare(crate::terms::CmpOp::Lt, &th, &y, true)]).rename("X");
        assert_eq!(eliminate_local_vars(&c), Some(want));
        // only one-sided bounds: the literals vanish
        let c = Clause::new(vec![p.clone(), Literal::compare(crate::terms::CmpOp::Lt, &th, &x, true)]);
        assert_eq!(eliminate_local_vars(&c), Some(Clause::new(vec![p.clone()]).rename("X")));
        assert_eq!(eliminate_local_vars(&Clause::new(vec![p])), None);
    }

    #[test]
    fn variables_rejected() {
        let c = Constraint::new(Term::Var("X".into()).linear(), ArithRel::Lt);
        assert!(matches!(decide_arith(&[c]), Err(ArithError::NonGround(_))));
    }
}
