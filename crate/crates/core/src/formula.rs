//! First-order formulas extracted from fully reduced terms.
//!
//! Degree-valued expressions are kept as linear combinations so that
//! `plus(theta(A), neg(delta(A)))`, `plus(d, 5)` and `neg(d)` share one
//! representation all the way down to the arithmetic solver.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::terms::{CmpOp, ConstKind, Connective, LambdaTerm, Quantifier, Rational, Sort, TermError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    /// Function application; constants have no arguments.
    Fn(String, Vec<Term>),
    Theta(String),
    Delta(String),
    /// Never a single atom with coefficient one and zero offset.
    Lin(Linear),
}

/// `constant + Σ coeff·atom`, atoms sorted and distinct, coefficients non-zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Linear {
    pub constant: Rational,
    pub coeffs: Vec<(Term, Rational)>,
}

impl Linear {
    pub fn constant(c: Rational) -> Self {
        Linear { constant: c, coeffs: Vec::new() }
    }

    pub fn atom(t: Term) -> Self {
        match t {
            Term::Lin(l) => l,
            t => Linear { constant: Rational::zero(), coeffs: vec![(t, Rational::one())] },
        }
    }

    pub fn add(&self, other: &Linear) -> Linear {
        let mut coeffs = self.coeffs.clone();
        for (t, c) in &other.coeffs {
            match coeffs.binary_search_by(|(u, _)| u.cmp(t)) {
                Ok(i) => coeffs[i].1 += c,
                Err(i) => coeffs.insert(i, (t.clone(), *c)),
            }
        }
        coeffs.retain(|(_, c)| !c.is_zero());
        Linear { constant: self.constant + other.constant, coeffs }
    }

    pub fn scale(&self, k: Rational) -> Linear {
        if k.is_zero() {
            return Linear::constant(Rational::zero());
        }
        Linear {
            constant: self.constant * k,
            coeffs: self.coeffs.iter().map(|(t, c)| (t.clone(), c * k)).collect(),
        }
    }

    pub fn sub(&self, other: &Linear) -> Linear {
        self.add(&other.scale(-Rational::one()))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff_of(&self, t: &Term) -> Rational {
        self.coeffs
            .binary_search_by(|(u, _)| u.cmp(t))
            .map_or(Rational::zero(), |i| self.coeffs[i].1)
    }

    pub fn into_term(self) -> Term {
        if self.constant.is_zero() && self.coeffs.len() == 1 && self.coeffs[0].1.is_one() {
            return self.coeffs.into_iter().next().unwrap().0;
        }
        Term::Lin(self)
    }
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Fn(name.into(), Vec::new())
    }

    pub fn num(n: i64) -> Self {
        Term::Lin(Linear::constant(Rational::from_integer(n)))
    }

    pub fn linear(&self) -> Linear {
        Linear::atom(self.clone())
    }

    pub fn as_num(&self) -> Option<Rational> {
        match self {
            Term::Lin(l) if l.is_constant() => Some(l.constant),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fn(_, args) => args.iter().all(Term::is_ground),
            Term::Theta(_) | Term::Delta(_) => true,
            Term::Lin(l) => l.coeffs.iter().all(|(t, _)| t.is_ground()),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Fn(_, args) => args.iter().for_each(|a| a.vars(out)),
            Term::Theta(_) | Term::Delta(_) => {}
            Term::Lin(l) => l.coeffs.iter().for_each(|(t, _)| t.vars(out)),
        }
    }

    /// Replaces variables and re-canonicalises linear sums.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(x) => f(x).unwrap_or_else(|| self.clone()),
            Term::Fn(name, args) => {
                Term::Fn(name.clone(), args.iter().map(|a| a.substitute(f)).collect())
            }
            Term::Theta(_) | Term::Delta(_) => self.clone(),
            Term::Lin(l) => l
                .coeffs
                .iter()
                .fold(Linear::constant(l.constant), |acc, (t, c)| {
                    acc.add(&t.substitute(f).linear().scale(*c))
                })
                .into_term(),
        }
    }

    pub fn map_scales(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Fn(name, args) => {
                Term::Fn(name.clone(), args.iter().map(|a| a.map_scales(f)).collect())
            }
            Term::Theta(a) => Term::Theta(f(a)),
            Term::Delta(a) => Term::Delta(f(a)),
            Term::Lin(l) => l
                .coeffs
                .iter()
                .fold(Linear::constant(l.constant), |acc, (t, c)| {
                    acc.add(&t.map_scales(f).linear().scale(*c))
                })
                .into_term(),
        }
    }

    pub fn to_lambda(&self) -> LambdaTerm {
        match self {
            Term::Var(x) => LambdaTerm::var(x),
            Term::Fn(name, args) if args.is_empty() => {
                LambdaTerm::constant(name, ConstKind::Entity)
            }
            Term::Fn(name, args) => LambdaTerm::apply(
                LambdaTerm::constant(name, ConstKind::Function),
                args.iter().map(Term::to_lambda),
            ),
            Term::Theta(a) => LambdaTerm::Theta(Box::new(LambdaTerm::constant(a, ConstKind::Predicate))),
            Term::Delta(a) => LambdaTerm::Delta(Box::new(LambdaTerm::constant(a, ConstKind::Predicate))),
            Term::Lin(l) => {
                let mut parts: Vec<LambdaTerm> = Vec::new();
                for (t, c) in &l.coeffs {
                    let atom = t.to_lambda();
                    let magnitude = c.abs();
                    let scaled = if magnitude.is_one() {
                        atom
                    } else if magnitude.is_integer() {
                        let k = magnitude.to_integer();
                        (1..k).fold(atom.clone(), |acc, _| {
                            LambdaTerm::Plus(Box::new(acc), Box::new(atom.clone()))
                        })
                    } else {
                        LambdaTerm::apply(
                            LambdaTerm::constant("times", ConstKind::Function),
                            [LambdaTerm::Num(magnitude), atom],
                        )
                    };
                    parts.push(if *c < Rational::zero() {
                        LambdaTerm::Neg(Box::new(scaled))
                    } else {
                        scaled
                    });
                }
                if !l.constant.is_zero() || parts.is_empty() {
                    parts.push(LambdaTerm::Num(l.constant));
                }
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, p| LambdaTerm::Plus(Box::new(acc), Box::new(p)))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_lambda())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    #[default]
    True,
    False,
    Pred(String, Vec<Term>),
    /// Identity of entities or events.
    Eq(Term, Term),
    /// Degree comparison.
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Sort, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction with nested conjunctions and `True` flattened away.
    pub fn conjoin(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut terms = |ts: &[&Term], bound: &Vec<String>| {
            let mut vs = BTreeSet::new();
            ts.iter().for_each(|t| t.vars(&mut vs));
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => terms(&args.iter().collect::<Vec<_>>(), bound),
            Formula::Eq(a, b) | Formula::Cmp(_, a, b) => terms(&[a, b], bound),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Rewrites every `theta`/`delta` lemma, e.g. to identify antonym scales.
    pub fn map_scales(&self, f: &impl Fn(&str) -> String) -> Formula {
        self.map_terms(&|t| t.map_scales(f))
    }

    pub fn map_terms(&self, g: &impl Fn(&Term) -> Term) -> Formula {
        let rec = |x: &Formula| Box::new(x.map_terms(g));
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(g).collect()),
            Formula::Eq(a, b) => Formula::Eq(g(a), g(b)),
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, g(a), g(b)),
            Formula::Not(a) => Formula::Not(rec(a)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.map_terms(g)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.map_terms(g)).collect()),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
            Formula::Quant(q, x, s, body) => Formula::Quant(*q, x.clone(), *s, rec(body)),
        }
    }

    /// Scale lemmas mentioned through `theta`/`delta`.
    pub fn scales(&self) -> BTreeSet<String> {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Theta(a) | Term::Delta(a) => {
                    out.insert(a.clone());
                }
                Term::Fn(_, args) => args.iter().for_each(|a| walk(a, out)),
                Term::Lin(l) => l.coeffs.iter().for_each(|(t, _)| walk(t, out)),
                Term::Var(_) => {}
            }
        }
        let out = std::cell::RefCell::new(BTreeSet::new());
        self.map_terms(&|t| {
            walk(t, &mut out.borrow_mut());
            t.clone()
        });
        out.into_inner()
    }

    /// Predicate symbols with their arities.
    pub fn predicates(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            Formula::Pred(p, args) => {
                out.insert((p.clone(), args.len()));
            }
            Formula::Not(a) | Formula::Quant(_, _, _, a) => a.predicates(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.predicates(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
            _ => {}
        }
    }

    pub fn to_lambda(&self) -> LambdaTerm {
        match self {
            Formula::True => LambdaTerm::Truth(true),
            Formula::False => LambdaTerm::Truth(false),
            Formula::Pred(p, args) => LambdaTerm::apply(
                LambdaTerm::constant(p, ConstKind::Predicate),
                args.iter().map(Term::to_lambda),
            ),
            Formula::Eq(a, b) => LambdaTerm::Eq(Box::new(a.to_lambda()), Box::new(b.to_lambda())),
            Formula::Cmp(op, a, b) => LambdaTerm::arith(*op, a.to_lambda(), b.to_lambda()),
            Formula::Not(a) => LambdaTerm::not(a.to_lambda()),
            Formula::And(fs) => LambdaTerm::and(fs.iter().map(Formula::to_lambda).collect()),
            Formula::Or(fs) => LambdaTerm::or(fs.iter().map(Formula::to_lambda).collect()),
            Formula::Implies(a, b) => LambdaTerm::implies(a.to_lambda(), b.to_lambda()),
            Formula::Iff(a, b) => LambdaTerm::iff(a.to_lambda(), b.to_lambda()),
            Formula::Quant(q, x, s, body) => {
                LambdaTerm::Quant(*q, x.clone(), *s, Box::new(body.to_lambda()))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_lambda())
    }
}

/// Converts a closed, lambda-free term into a formula.
///
/// Fails with `ResidualLambda` when an abstraction survived reduction (the
/// derivation did not saturate) and `OpenFormula` for free variables.
pub fn extract_formula(term: &LambdaTerm) -> Result<Formula, TermError> {
    if term.contains_lambda() {
        return Err(TermError::ResidualLambda(term.to_string()));
    }
    let free = term.free_vars();
    if let Some(x) = free.into_iter().next() {
        return Err(TermError::OpenFormula(x));
    }
    Extractor { bound: Vec::new() }.formula(term)
}

struct Extractor {
    bound: Vec<String>,
}

fn ill(what: &str, t: &LambdaTerm) -> TermError {
    TermError::IllFormed(format!("{what}: {t}"))
}

impl Extractor {
    fn formula(&mut self, t: &LambdaTerm) -> Result<Formula, TermError> {
        use LambdaTerm as L;
        Ok(match t {
            L::Truth(true) => Formula::True,
            L::Truth(false) => Formula::False,
            L::Conn(c, args) => {
                let mut fs = args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>, _>>()?;
                match c {
                    Connective::And => Formula::And(fs),
                    Connective::Or => Formula::Or(fs),
                    Connective::Not if fs.len() == 1 => Formula::not(fs.pop().unwrap()),
                    Connective::Implies if fs.len() == 2 => {
                        let b = fs.pop().unwrap();
                        Formula::implies(fs.pop().unwrap(), b)
                    }
                    Connective::Iff if fs.len() == 2 => {
                        let b = fs.pop().unwrap();
                        Formula::Iff(Box::new(fs.pop().unwrap()), Box::new(b))
                    }
                    _ => return Err(ill("connective arity", t)),
                }
            }
            L::Quant(q, x, s, body) => {
                self.bound.push(x.clone());
                let body = self.formula(body);
                self.bound.pop();
                Formula::Quant(*q, x.clone(), *s, Box::new(body?))
            }
            L::Arith(op, a, b) => Formula::Cmp(*op, self.term(a)?, self.term(b)?),
            L::Eq(a, b) => Formula::Eq(self.term(a)?, self.term(b)?),
            L::Const(name, _) => Formula::Pred(name.clone(), Vec::new()),
            L::App(..) => {
                let (head, args) = t.spine();
                match head {
                    L::Const(name, _) => Formula::Pred(
                        name.clone(),
                        args.into_iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
                    ),
                    _ => return Err(ill("application of a non-constant in formula position", t)),
                }
            }
            L::Pair(..) => return Err(ill("unprojected presupposition pair", t)),
            _ => return Err(ill("expected a formula", t)),
        })
    }

    fn term(&mut self, t: &LambdaTerm) -> Result<Term, TermError> {
        use LambdaTerm as L;
        Ok(match t {
            L::Var(x) if self.bound.contains(x) => Term::Var(x.clone()),
            L::Var(x) => return Err(TermError::OpenFormula(x.clone())),
            L::Const(name, _) => Term::constant(name.clone()),
            L::Num(q) => Term::Lin(Linear::constant(*q)),
            L::App(..) => {
                let (head, args) = t.spine();
                match head {
                    L::Const(name, _) => Term::Fn(
                        name.clone(),
                        args.into_iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
                    ),
                    _ => return Err(ill("application of a non-constant in term position", t)),
                }
            }
            L::Plus(a, b) => self.term(a)?.linear().add(&self.term(b)?.linear()).into_term(),
            L::Neg(a) => self.term(a)?.linear().scale(-Rational::one()).into_term(),
            L::Theta(a) => match a.as_ref() {
                L::Const(name, _) => Term::Theta(name.clone()),
                _ => return Err(ill("theta of a non-constant", t)),
            },
            L::Delta(a) => match a.as_ref() {
                L::Const(name, _) => Term::Delta(name.clone()),
                _ => return Err(ill("delta of a non-constant", t)),
            },
            _ => return Err(ill("expected a term", t)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{alpha_eq, parse_term};

    fn f(src: &str) -> Formula {
        extract_formula(&parse_term(src).unwrap()).unwrap()
    }

    #[test]
    fn degree_offsets_become_linear() {
        let g = f("forall d:degree. imp(heavy(jiro, d), heavy(taro, plus(d, 5)))");
        let Formula::Quant(_, _, _, body) = &g else { panic!() };
        let Formula::Implies(_, rhs) = body.as_ref() else { panic!() };
        let Formula::Pred(_, args) = rhs.as_ref() else { panic!() };
        let l = args[1].linear();
        assert_eq!(l.constant, Rational::from_integer(5));
        assert_eq!(l.coeff_of(&Term::Var("d".into())), Rational::one());
    }

    #[test]
    fn plus_neg_cancels() {
        let g = f("gt(plus(theta(heavy), neg(theta(heavy))), 0)");
        let Formula::Cmp(_, a, _) = g else { panic!() };
        assert_eq!(a, Term::num(0));
    }

    #[test]
    fn residual_lambda_and_open_terms_rejected() {
        let t = parse_term(r"magat(\x. x)").unwrap();
        assert!(matches!(extract_formula(&t), Err(TermError::ResidualLambda(_))));
        let t = crate::terms::parse_open("heavy(x, theta(heavy))", &["x"]).unwrap();
        assert!(matches!(extract_formula(&t), Err(TermError::OpenFormula(x)) if x == "x"));
    }

    #[test]
    fn round_trips_through_lambda() {
        let src = "exists d:degree. and(heavy(taro, d), not(heavy(jiro, d)), gt(d, plus(theta(heavy), neg(delta(heavy)))))";
        let g = f(src);
        assert!(alpha_eq(&g.to_lambda(), &parse_term(src).unwrap()), "{g}");
    }

    #[test]
    fn scale_mapping_and_collection() {
        let g = f("and(light(taro, theta(light)), lt(delta(light), 1))");
        let mapped = g.map_scales(&|a| if a == "light" { "heavy".into() } else { a.into() });
        assert_eq!(mapped.scales(), BTreeSet::from(["heavy".to_string()]));
        assert_eq!(g.scales(), BTreeSet::from(["light".to_string()]));
    }
}
