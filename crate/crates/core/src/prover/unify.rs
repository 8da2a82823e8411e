//! Unification modulo linear arithmetic on degree terms.
//!
//! Syntactic unification, except that two degree terms unify when their
//! difference can be made zero by solving for one variable: `D + 5` and `75`
//! unify with `D := 70`. This is not a complete E-unification procedure but
//! it is sound, which is all resolution needs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::formula::Term;
use crate::terms::Rational;

use super::clause::{Atom, Clause, Literal};

/// Idempotent substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(BTreeMap<String, Term>);

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        t.substitute(&|x| self.0.get(x).cloned())
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        l.substitute(&|x| self.0.get(x).cloned())
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        c.substitute(&|x| self.0.get(x).cloned())
    }

    fn bind(&mut self, x: &str, t: Term) {
        for v in self.0.values_mut() {
            *v = v.substitute(&|y| (y == x).then(|| t.clone()));
        }
        self.0.insert(x.to_string(), t);
    }
}

fn is_degree(t: &Term) -> bool {
    matches!(t, Term::Lin(_) | Term::Theta(_) | Term::Delta(_))
}

fn occurs(x: &str, t: &Term) -> bool {
    let mut vs = std::collections::BTreeSet::new();
    t.vars(&mut vs);
    vs.contains(x)
}

/// Extends `s` so that `a` and `b` become equal.
pub fn unify_terms(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let (a, b) = (s.apply(a), s.apply(b));
    if a == b {
        return true;
    }
    match (&a, &b) {
        (Term::Var(x), t) | (t, Term::Var(x)) if !occurs(x, t) => {
            s.bind(x, t.clone());
            true
        }
        (Term::Fn(f, xs), Term::Fn(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_terms(x, y, s))
        }
        _ if is_degree(&a) || is_degree(&b) || matches!(a, Term::Var(_)) || matches!(b, Term::Var(_)) => {
            solve_linear(&a, &b, s)
        }
        _ => false,
    }
}

/// `a - b = 0`, solved for the first variable with a unit coefficient (or
/// any variable, failing that).
fn solve_linear(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let diff = a.linear().sub(&b.linear());
    if diff.is_constant() {
        return diff.constant.is_zero();
    }
    let vars: Vec<&(Term, Rational)> = diff.coeffs.iter().filter(|(t, _)| matches!(t, Term::Var(_))).collect();
    let pick = vars
        .iter()
        .find(|(_, c)| *c == Rational::one() || *c == -Rational::one())
        .or_else(|| vars.first());
    let Some((Term::Var(x), c)) = pick.map(|p| (*p).clone()) else { return false };
    let rest = diff.sub(&Term::Var(x.clone()).linear().scale(c));
    let value = rest.scale(-Rational::one() / c).into_term();
    if occurs(&x, &value) {
        return false;
    }
    s.bind(&x, value);
    true
}

/// All most-general unifiers of two atoms under `s`: zero, one, or (for
/// the symmetric identity atom) two.
pub fn unify_atoms(a: &Atom, b: &Atom, s: &Subst) -> Vec<Subst> {
    let pairwise = |xs: &[&Term], ys: &[&Term]| {
        let mut s = s.clone();
        xs.iter().zip(ys).all(|(x, y)| unify_terms(x, y, &mut s)).then_some(s)
    };
    match (a, b) {
        (Atom::Pred(p, xs), Atom::Pred(q, ys)) if p == q && xs.len() == ys.len() => {
            let xs: Vec<&Term> = xs.iter().collect();
            let ys: Vec<&Term> = ys.iter().collect();
            pairwise(&xs, &ys).into_iter().collect()
        }
        (Atom::Eq(a1, a2), Atom::Eq(b1, b2)) => {
            let mut out: Vec<Subst> = Vec::new();
            for u in [pairwise(&[a1, a2], &[b1, b2]), pairwise(&[a1, a2], &[b2, b1])].into_iter().flatten() {
                if !out.contains(&u) {
                    out.push(u);
                }
            }
            out
        }
        (Atom::Arith(r1, e1), Atom::Arith(r2, e2)) if r1 == r2 => {
            let mut s = s.clone();
            if unify_terms(&Term::Lin(e1.clone()), &Term::Lin(e2.clone()), &mut s) {
                vec![s]
            } else {
                vec![]
            }
        }
        _ => vec![],
    }
}

const FROZEN: &str = "?";

fn freeze(c: &Clause) -> Clause {
    c.substitute(&|x| Some(Term::constant(format!("{FROZEN}{x}"))))
}

/// Same predicate (or identity, or comparison) and polarity: a necessary
/// condition for one literal to match another.
pub fn same_shape(a: &Literal, b: &Literal) -> bool {
    a.positive == b.positive
        && match (&a.atom, &b.atom) {
            (Atom::Pred(p, xs), Atom::Pred(q, ys)) => p == q && xs.len() == ys.len(),
            (Atom::Eq(..), Atom::Eq(..)) => true,
            (Atom::Arith(r, _), Atom::Arith(s, _)) => r == s,
            _ => false,
        }
}

/// Bit set of literal shapes (polarity and predicate). A clause can only
/// subsume another whose signature includes its own.
pub fn signature(c: &Clause) -> u64 {
    use std::hash::{Hash, Hasher};
    c.literals.iter().fold(0, |acc, l| {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        l.positive.hash(&mut h);
        match &l.atom {
            Atom::Pred(p, xs) => (0u8, p, xs.len()).hash(&mut h),
            Atom::Eq(..) => 1u8.hash(&mut h),
            Atom::Arith(r, _) => (2u8, r).hash(&mut h),
        }
        acc | (1u64 << (h.finish() % 64))
    })
}

/// Whether some instance of `general` is a sub-multiset of `specific`.
pub fn subsumes(general: &Clause, specific: &Clause) -> bool {
    Frozen::new(specific).subsumed_by(general)
}

/// A clause with its variables turned into constants, for repeated
/// subsumption checks against it.
pub struct Frozen {
    target: Clause,
}

impl Frozen {
    pub fn new(c: &Clause) -> Self {
        Frozen { target: freeze(c) }
    }

    pub fn subsumed_by(&self, general: &Clause) -> bool {
        if general.len() > self.target.len()
            || !general.literals.iter().all(|g| {
                self.target.literals.iter().any(|t| t.positive == g.positive && atoms_may_match(&g.atom, &t.atom))
            })
        {
            return false;
        }
        search(&general.literals, &self.target, &Subst::new())
    }
}

/// Cheap necessary condition for `general` to match `target`: no clash of
/// function symbols at corresponding positions.
fn may_match(general: &Term, target: &Term) -> bool {
    match (general, target) {
        (Term::Fn(f, xs), Term::Fn(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| may_match(x, y))
        }
        (Term::Fn(..), Term::Theta(_) | Term::Delta(_)) | (Term::Theta(_) | Term::Delta(_), Term::Fn(..)) => false,
        (Term::Theta(a), Term::Theta(b)) | (Term::Delta(a), Term::Delta(b)) => a == b,
        _ => true,
    }
}

fn atoms_may_match(general: &Atom, target: &Atom) -> bool {
    match (general, target) {
        (Atom::Pred(p, xs), Atom::Pred(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| may_match(x, y))
        }
        (Atom::Eq(..), Atom::Eq(..)) => true,
        (Atom::Arith(r, _), Atom::Arith(q, _)) => r == q,
        _ => false,
    }
}

fn search(ls: &[Literal], target: &Clause, s: &Subst) -> bool {
    let Some((l, rest)) = ls.split_first() else { return true };
    target.literals.iter().filter(|t| t.positive == l.positive && atoms_may_match(&l.atom, &t.atom)).any(|t| {
        unify_atoms(&l.atom, &t.atom, s).iter().any(|s2| search(rest, target, s2))
    })
}

/// Equal up to renaming of variables.
pub fn is_variant(a: &Clause, b: &Clause) -> bool {
    a.len() == b.len() && subsumes(a, b) && subsumes(b, a)
}
