use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::formula::{Linear, Term};
use crate::terms::{CmpOp, Rational};

/// Relation of a normalized arithmetic atom `expr REL 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithRel {
    Lt,
    Le,
    Eq,
}

impl ArithRel {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithRel::Lt => "<",
            ArithRel::Le => "<=",
            ArithRel::Eq => "=",
        }
    }

    pub fn holds(self, value: Rational) -> bool {
        match self {
            ArithRel::Lt => value < Rational::zero(),
            ArithRel::Le => value <= Rational::zero(),
            ArithRel::Eq => value.is_zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pred(String, Vec<Term>),
    /// Identity of entities or events; symmetric.
    Eq(Term, Term),
    /// `expr REL 0`, scaled so the first atom has coefficient magnitude one.
    Arith(ArithRel, Linear),
}

impl Atom {
    pub fn arith(rel: ArithRel, expr: Linear) -> Atom {
        let Some((_, lead)) = expr.coeffs.first() else {
            return Atom::Arith(rel, expr);
        };
        let k = match rel {
            ArithRel::Eq => Rational::one() / lead,
            _ => Rational::one() / lead.abs(),
        };
        Atom::Arith(rel, expr.scale(k))
    }

    pub fn is_arith(&self) -> bool {
        matches!(self, Atom::Arith(..))
    }

    pub fn terms(&self) -> Vec<Term> {
        match self {
            Atom::Pred(_, args) => args.clone(),
            Atom::Eq(a, b) => vec![a.clone(), b.clone()],
            Atom::Arith(_, e) => vec![Term::Lin(e.clone())],
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom::Pred(_, args) => args.iter().for_each(|a| a.vars(out)),
            Atom::Eq(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Atom::Arith(_, e) => e.coeffs.iter().for_each(|(t, _)| t.vars(out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut vs = BTreeSet::new();
        self.vars(&mut vs);
        vs.is_empty()
    }

    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Atom {
        match self {
            Atom::Pred(p, args) => Atom::Pred(p.clone(), args.iter().map(|a| a.substitute(f)).collect()),
            Atom::Eq(a, b) => Atom::Eq(a.substitute(f), b.substitute(f)),
            Atom::Arith(rel, e) => Atom::arith(*rel, Term::Lin(e.clone()).substitute(f).linear()),
        }
    }

    /// Symbol count, used for clause weights.
    pub fn size(&self) -> usize {
        fn term_size(t: &Term) -> usize {
            match t {
                Term::Var(_) | Term::Theta(_) | Term::Delta(_) => 1,
                Term::Fn(_, args) => 1 + args.iter().map(term_size).sum::<usize>(),
                Term::Lin(l) => 1 + l.coeffs.iter().map(|(t, _)| term_size(t)).sum::<usize>(),
            }
        }
        1 + self.terms().iter().map(term_size).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn new(positive: bool, atom: Atom) -> Literal {
        Literal { positive, atom }.canonical()
    }

    pub fn pos(atom: Atom) -> Literal {
        Literal::new(true, atom)
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal::new(false, atom)
    }

    /// Negated order atoms are rewritten positively: `not(e < 0)` is `-e <= 0`.
    fn canonical(self) -> Literal {
        match (&self.atom, self.positive) {
            (Atom::Arith(ArithRel::Lt, e), false) => {
                Literal { positive: true, atom: Atom::arith(ArithRel::Le, e.scale(-Rational::one())) }
            }
            (Atom::Arith(ArithRel::Le, e), false) => {
                Literal { positive: true, atom: Atom::arith(ArithRel::Lt, e.scale(-Rational::one())) }
            }
            _ => self,
        }
    }

    pub fn negate(&self) -> Literal {
        Literal::new(!self.positive, self.atom.clone())
    }

    /// A comparison `a OP b` as a literal.
    pub fn compare(op: CmpOp, a: &Term, b: &Term, positive: bool) -> Literal {
        let (rel, expr) = match op {
            CmpOp::Lt => (ArithRel::Lt, a.linear().sub(&b.linear())),
            CmpOp::Le => (ArithRel::Le, a.linear().sub(&b.linear())),
            CmpOp::Gt => (ArithRel::Lt, b.linear().sub(&a.linear())),
            CmpOp::Ge => (ArithRel::Le, b.linear().sub(&a.linear())),
            CmpOp::Eq => (ArithRel::Eq, a.linear().sub(&b.linear())),
        };
        Literal::new(positive, Atom::arith(rel, expr))
    }

    /// Truth value when decidable without a model: constant arithmetic
    /// and reflexive identities.
    pub fn eval_trivial(&self) -> Option<bool> {
        let v = match &self.atom {
            Atom::Arith(rel, e) if e.is_constant() => rel.holds(e.constant),
            Atom::Eq(a, b) if a == b => true,
            _ => return None,
        };
        Some(v == self.positive)
    }

    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Literal {
        Literal::new(self.positive, self.atom.substitute(f))
    }

    pub fn is_ground_arith(&self) -> bool {
        self.atom.is_arith() && self.atom.is_ground()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "~" };
        match &self.atom {
            Atom::Pred(p, args) if args.is_empty() => write!(f, "{sign}{p}"),
            Atom::Pred(p, args) => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{sign}{p}({})", args.join(", "))
            }
            Atom::Eq(a, b) => write!(f, "{sign}({a} == {b})"),
            Atom::Arith(rel, e) => {
                let op = if self.positive { rel.symbol() } else { "!=" };
                write!(f, "{} {op} 0", Term::Lin(e.clone()).to_lambda())
            }
        }
    }
}

/// A disjunction of literals, variables implicitly universal. Literals are
/// kept sorted and distinct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(mut literals: Vec<Literal>) -> Clause {
        literals.sort();
        literals.dedup();
        Clause { literals }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.literals.iter().for_each(|l| l.atom.vars(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Clause {
        Clause::new(self.literals.iter().map(|l| l.substitute(f)).collect())
    }

    /// Renames variables to `{prefix}0`, `{prefix}1`, ... in order of first
    /// occurrence.
    pub fn rename(&self, prefix: &str) -> Clause {
        let mut order: Vec<String> = Vec::new();
        for l in &self.literals {
            let mut vs = BTreeSet::new();
            l.atom.vars(&mut vs);
            for v in vs {
                if !order.contains(&v) {
                    order.push(v);
                }
            }
        }
        self.substitute(&|x| order.iter().position(|v| v == x).map(|i| Term::Var(format!("{prefix}{i}"))))
    }

    /// Selection weight: symbols, plus a surcharge per literal and per
    /// comparison still waiting for its variables.
    pub fn weight(&self) -> usize {
        let open_arith = self.literals.iter().filter(|l| l.atom.is_arith() && !l.atom.is_ground()).count();
        self.literals.iter().map(|l| l.atom.size()).sum::<usize>() + 2 * self.literals.len() + 6 * open_arith
    }

    /// Contains a literal and its complement, or a trivially true literal.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|l| l.eval_trivial() == Some(true))
            || self.literals.iter().any(|l| self.literals.contains(&l.negate()))
    }

    /// Drops trivially false literals.
    pub fn without_false(&self) -> Clause {
        Clause::new(self.literals.iter().filter(|l| l.eval_trivial() != Some(false)).cloned().collect())
    }

    pub fn max_depth(&self) -> usize {
        fn depth(t: &Term) -> usize {
            match t {
                Term::Fn(_, args) => 1 + args.iter().map(depth).max().unwrap_or(0),
                Term::Lin(l) => l.coeffs.iter().map(|(t, _)| depth(t)).max().unwrap_or(0),
                _ => 1,
            }
        }
        self.literals.iter().flat_map(|l| l.atom.terms()).map(|t| depth(&t)).max().unwrap_or(0)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("$false");
        }
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" | "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Term {
        Term::constant("d")
    }

    #[test]
    fn comparisons_normalize() {
        // d > 70  is  70 - d < 0, scaled to  -d + 70 < 0
        let gt = Literal::compare(CmpOp::Gt, &d(), &Term::num(70), true);
        let lt = Literal::compare(CmpOp::Lt, &Term::num(70), &d(), true);
        assert_eq!(gt, lt);
        // not(d > 70) is d - 70 <= 0
        let ngt = Literal::compare(CmpOp::Gt, &d(), &Term::num(70), false);
        assert_eq!(ngt, Literal::compare(CmpOp::Le, &d(), &Term::num(70), true));
        assert_eq!(gt.negate(), ngt);
        assert_eq!(ngt.negate(), gt);
    }

    #[test]
    fn scaling_is_canonical() {
        let two_d = d().linear().scale(Rational::from_integer(2));
        let a = Atom::arith(ArithRel::Lt, two_d.add(&Linear::constant(Rational::from_integer(4))));
        let b = Atom::arith(ArithRel::Lt, d().linear().add(&Linear::constant(Rational::from_integer(2))));
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_literals() {
        let zero_lt = Literal::pos(Atom::arith(ArithRel::Lt, Linear::constant(Rational::zero())));
        assert_eq!(zero_lt.eval_trivial(), Some(false));
        let refl = Literal::neg(Atom::Eq(d(), d()));
        assert_eq!(refl.eval_trivial(), Some(false));
        let p = Literal::pos(Atom::Pred("p".into(), vec![]));
        assert!(Clause::new(vec![p.clone(), p.negate()]).is_tautology());
        assert_eq!(Clause::new(vec![p.clone(), zero_lt]).without_false(), Clause::new(vec![p]));
    }
}
