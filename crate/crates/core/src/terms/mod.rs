//! Lambda terms with logical and arithmetic constants.
//!
//! Every semantic representation in the crate is a [`LambdaTerm`]: lexical
//! templates, intermediate results of composition, and (after
//! [`extract_formula`](crate::formula::extract_formula)) the closed formulas
//! handed to the prover.

mod normalize;
mod syntax;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;

pub use normalize::{
    alpha_eq, beta_normalize, beta_normalize_with, fold_arith, rename_bound_unique, Strategy,
    DEFAULT_STEP_BUDGET,
};
pub use syntax::{parse_open, parse_term};

/// Exact rational numbers used for numerals and degree offsets.
pub type Rational = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("reduction exceeded {0} steps; the template is probably malformed")]
    NonTerminating(usize),
    #[error("abstraction left after normalization: {0}")]
    ResidualLambda(String),
    #[error("free variable `{0}` in formula")]
    OpenFormula(String),
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstKind {
    Entity,
    Degree,
    Event,
    Predicate,
    Function,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Entity,
    Degree,
    Event,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Entity => "entity",
            Sort::Degree => "degree",
            Sort::Event => "event",
        }
    }
}

/// Comparison between two degree expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

impl CmpOp {
    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Eq => "deq",
        }
    }

    pub fn eval(self, lhs: Rational, rhs: Rational) -> bool {
        match self {
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
        }
    }
}

/// An untyped lambda term extended with the logical vocabulary of degree
/// semantics.
///
/// `Theta(a)` and `Delta(a)` denote the threshold and closeness margin of the
/// adjective `a`; they become degree constants once `a` is a known lemma.
/// `Pair(at_issue, presupposition)` carries multidimensional meanings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(String),
    Const(String, ConstKind),
    Num(Rational),
    Truth(bool),
    Lam(String, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Conn(Connective, Vec<LambdaTerm>),
    Quant(Quantifier, String, Sort, Box<LambdaTerm>),
    Arith(CmpOp, Box<LambdaTerm>, Box<LambdaTerm>),
    Eq(Box<LambdaTerm>, Box<LambdaTerm>),
    Plus(Box<LambdaTerm>, Box<LambdaTerm>),
    Neg(Box<LambdaTerm>),
    Theta(Box<LambdaTerm>),
    Delta(Box<LambdaTerm>),
    Pair(Box<LambdaTerm>, Box<LambdaTerm>),
}

use LambdaTerm::*;

impl LambdaTerm {
    pub fn var(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn constant(name: impl Into<String>, kind: ConstKind) -> Self {
        Const(name.into(), kind)
    }

    pub fn num(n: i64) -> Self {
        Num(Rational::from_integer(n))
    }

    pub fn lam(param: impl Into<String>, body: LambdaTerm) -> Self {
        Lam(param.into(), Box::new(body))
    }

    pub fn app(fun: LambdaTerm, arg: LambdaTerm) -> Self {
        App(Box::new(fun), Box::new(arg))
    }

    /// `f(a1, ..., an)` as a curried application spine.
    pub fn apply(fun: LambdaTerm, args: impl IntoIterator<Item = LambdaTerm>) -> Self {
        args.into_iter().fold(fun, LambdaTerm::app)
    }

    pub fn not(t: LambdaTerm) -> Self {
        Conn(Connective::Not, vec![t])
    }

    pub fn and(args: Vec<LambdaTerm>) -> Self {
        Conn(Connective::And, args)
    }

    pub fn or(args: Vec<LambdaTerm>) -> Self {
        Conn(Connective::Or, args)
    }

    pub fn implies(a: LambdaTerm, b: LambdaTerm) -> Self {
        Conn(Connective::Implies, vec![a, b])
    }

    pub fn iff(a: LambdaTerm, b: LambdaTerm) -> Self {
        Conn(Connective::Iff, vec![a, b])
    }

    pub fn forall(var: impl Into<String>, sort: Sort, body: LambdaTerm) -> Self {
        Quant(Quantifier::Forall, var.into(), sort, Box::new(body))
    }

    pub fn exists(var: impl Into<String>, sort: Sort, body: LambdaTerm) -> Self {
        Quant(Quantifier::Exists, var.into(), sort, Box::new(body))
    }

    pub fn arith(op: CmpOp, lhs: LambdaTerm, rhs: LambdaTerm) -> Self {
        Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn pair(at_issue: LambdaTerm, presupposition: LambdaTerm) -> Self {
        Pair(Box::new(at_issue), Box::new(presupposition))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&LambdaTerm, Vec<&LambdaTerm>) {
        let mut args = Vec::new();
        let mut head = self;
        while let App(f, a) = head {
            args.push(a.as_ref());
            head = f.as_ref();
        }
        args.reverse();
        (head, args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Lam(x, body) | Quant(_, x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => self.for_each_child(|c| c.collect_free(bound, out)),
        }
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Var(x) => x == name,
            Lam(x, body) | Quant(_, x, _, body) => x != name && body.has_free(name),
            _ => self.any_child(|c| c.has_free(name)),
        }
    }

    /// Every variable name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Var(x) => {
                out.insert(x.clone());
            }
            Lam(x, body) | Quant(_, x, _, body) => {
                out.insert(x.clone());
                body.all_names(out);
            }
            _ => self.for_each_child(|c| c.all_names(out)),
        }
    }

    pub fn contains_lambda(&self) -> bool {
        matches!(self, Lam(..)) || self.any_child(|c| c.contains_lambda())
    }

    pub fn contains_pair(&self) -> bool {
        matches!(self, Pair(..)) || self.any_child(|c| c.contains_pair())
    }

    pub fn size(&self) -> usize {
        let mut n = 1;
        self.for_each_child(|c| n += c.size());
        n
    }

    pub(crate) fn for_each_child(&self, mut f: impl FnMut(&LambdaTerm)) {
        match self {
            Var(_) | Const(..) | Num(_) | Truth(_) => {}
            Lam(_, b) | Quant(_, _, _, b) | Neg(b) | Theta(b) | Delta(b) => f(b),
            App(a, b) | Arith(_, a, b) | Eq(a, b) | Plus(a, b) | Pair(a, b) => {
                f(a);
                f(b);
            }
            Conn(_, args) => args.iter().for_each(f),
        }
    }

    fn any_child(&self, mut f: impl FnMut(&LambdaTerm) -> bool) -> bool {
        let mut found = false;
        self.for_each_child(|c| {
            if !found && f(c) {
                found = true;
            }
        });
        found
    }

    /// Rebuilds the node with each direct child mapped through `f`. Binders
    /// are kept as they are.
    pub(crate) fn map_children(self, mut f: impl FnMut(LambdaTerm) -> LambdaTerm) -> LambdaTerm {
        let mut bx = |b: Box<LambdaTerm>| Box::new(f(*b));
        match self {
            t @ (Var(_) | Const(..) | Num(_) | Truth(_)) => t,
            Lam(x, b) => Lam(x, bx(b)),
            Quant(q, x, s, b) => Quant(q, x, s, bx(b)),
            Neg(b) => Neg(bx(b)),
            Theta(b) => Theta(bx(b)),
            Delta(b) => Delta(bx(b)),
            App(a, b) => {
                let a = bx(a);
                App(a, bx(b))
            }
            Arith(op, a, b) => {
                let a = bx(a);
                Arith(op, a, bx(b))
            }
            Eq(a, b) => {
                let a = bx(a);
                Eq(a, bx(b))
            }
            Plus(a, b) => {
                let a = bx(a);
                Plus(a, bx(b))
            }
            Pair(a, b) => {
                let a = bx(a);
                Pair(a, bx(b))
            }
            Conn(c, args) => Conn(c, args.into_iter().map(f).collect()),
        }
    }

    /// Capture-avoiding substitution of `value` for the free occurrences of
    /// `name`.
    pub fn substitute(&self, name: &str, value: &LambdaTerm) -> LambdaTerm {
        let fv = value.free_vars();
        self.subst_inner(name, value, &fv)
    }

    fn subst_inner(&self, name: &str, value: &LambdaTerm, fv: &BTreeSet<String>) -> LambdaTerm {
        match self {
            Var(x) if x == name => value.clone(),
            Lam(x, body) | Quant(_, x, _, body) => {
                if x == name || !body.has_free(name) {
                    return self.clone();
                }
                let (x, body) = if fv.contains(x) {
                    let mut avoid = fv.clone();
                    body.all_names(&mut avoid);
                    avoid.insert(name.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.subst_inner(x, &Var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                    (fresh, renamed)
                } else {
                    (x.clone(), body.as_ref().clone())
                };
                let body = Box::new(body.subst_inner(name, value, fv));
                match self {
                    Lam(..) => Lam(x, body),
                    Quant(q, _, s, _) => Quant(*q, x, *s, body),
                    _ => unreachable!(),
                }
            }
            _ => self.clone().map_children(|c| c.subst_inner(name, value, fv)),
        }
    }
}

/// The first of `base`, `base1`, `base2`, ... not contained in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    if !avoid.contains(stem) {
        return stem.to_string();
    }
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        syntax::write_term(self, f)
    }
}
