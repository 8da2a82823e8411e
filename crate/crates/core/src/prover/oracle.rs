//! Finite-model oracle: is a formula satisfiable over small carriers?
//!
//! Quantifiers range over `n` entities (and `n` events) and a grid of at
//! most `m` degree points; every scale's threshold is 0 and its tolerance 1.
//! Entity constants denote distinct elements. Predicates and role functions
//! are free: the grounded formula goes through a Tseitin encoding into a
//! small DPLL solver. Any model found is a genuine model over these
//! carriers, so the oracle never reports a spurious countermodel for the
//! family of interpretations it explores; it may miss models outside it.
//! Formulas that put a predicate at a degree off the grid (differentials
//! shift degrees by constants) are rejected rather than guessed at.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::formula::{Formula, Term};
use crate::terms::{CmpOp, Quantifier, Rational, Sort};

pub const MAX_ENTITIES: usize = 4;
pub const MAX_DEGREES: usize = 6;
/// Cap on grounded formula nodes.
pub const MAX_GROUND_SIZE: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("outside oracle bounds: {0}")]
    TooLarge(String),
    #[error("not supported by the oracle: {0}")]
    Unsupported(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Value {
    Entity(usize),
    Event(usize),
    Degree(Rational),
    /// An unevaluated role-function application.
    App(String, Vec<Value>),
}

/// Propositional formula over atom indices.
#[derive(Clone, Debug)]
enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

fn and(parts: Vec<Prop>) -> Prop {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Prop::Const(true) => {}
            Prop::Const(false) => return Prop::Const(false),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Prop::Const(true),
        1 => out.pop().unwrap(),
        _ => Prop::And(out),
    }
}

fn or(parts: Vec<Prop>) -> Prop {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Prop::Const(false) => {}
            Prop::Const(true) => return Prop::Const(true),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Prop::Const(false),
        1 => out.pop().unwrap(),
        _ => Prop::Or(out),
    }
}

fn not(p: Prop) -> Prop {
    match p {
        Prop::Const(b) => Prop::Const(!b),
        Prop::Not(q) => *q,
        p => Prop::Not(Box::new(p)),
    }
}

/// The degree points quantifiers range over: the thresholds and their
/// tolerance neighbours when the formula mentions scales, every numeral,
/// then filler points until `m` are chosen.
pub fn degree_carrier(f: &Formula, m: usize) -> Result<Vec<Rational>, OracleError> {
    let mut required: BTreeSet<Rational> = BTreeSet::new();
    if !f.scales().is_empty() {
        required.extend([-1, 0, 1].map(Rational::from_integer));
    }
    let numerals = std::cell::RefCell::new(BTreeSet::new());
    f.map_terms(&|t| {
        collect_numerals(t, &mut numerals.borrow_mut());
        t.clone()
    });
    required.extend(numerals.into_inner());
    if required.len() > m {
        return Err(OracleError::TooLarge(format!("{} degree points needed, {m} allowed", required.len())));
    }
    let mut filler = (0..).flat_map(|k: i64| [Rational::from_integer(k), Rational::from_integer(-k - 1)]);
    while required.len() < m {
        required.insert(filler.next().unwrap());
    }
    Ok(required.into_iter().collect())
}

fn collect_numerals(t: &Term, out: &mut BTreeSet<Rational>) {
    match t {
        Term::Lin(l) => {
            if l.coeffs.is_empty() || !l.constant.is_zero() {
                out.insert(l.constant);
            }
            l.coeffs.iter().for_each(|(t, _)| collect_numerals(t, out));
        }
        Term::Fn(_, args) => args.iter().for_each(|a| collect_numerals(a, out)),
        _ => {}
    }
}

struct Grounder {
    constants: BTreeMap<String, usize>,
    n: usize,
    degrees: Vec<Rational>,
    atoms: BTreeMap<(String, Vec<Value>), usize>,
    /// Role-function applications seen, for functionality constraints.
    apps: BTreeSet<Value>,
    size: usize,
}

impl Grounder {
    fn atom(&mut self, name: &str, args: Vec<Value>) -> Prop {
        let next = self.atoms.len();
        Prop::Var(*self.atoms.entry((name.to_string(), args)).or_insert(next))
    }

    fn eval(&self, t: &Term, env: &BTreeMap<String, Value>) -> Result<Value, OracleError> {
        Ok(match t {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| OracleError::Unsupported(format!("free variable {x}")))?,
            Term::Fn(c, args) if args.is_empty() => Value::Entity(self.constants[c]),
            Term::Fn(f, args) => {
                let args = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>, _>>()?;
                if args.iter().any(|a| matches!(a, Value::App(..))) {
                    return Err(OracleError::Unsupported(format!("nested application of {f}")));
                }
                Value::App(f.clone(), args)
            }
            Term::Theta(_) => Value::Degree(Rational::zero()),
            Term::Delta(_) => Value::Degree(Rational::from_integer(1)),
            Term::Lin(l) => {
                let mut v = l.constant;
                for (t, c) in &l.coeffs {
                    match self.eval(t, env)? {
                        Value::Degree(d) => v += d * c,
                        other => return Err(OracleError::Unsupported(format!("non-degree {other:?} in arithmetic"))),
                    }
                }
                Value::Degree(v)
            }
        })
    }

    fn degree(&self, t: &Term, env: &BTreeMap<String, Value>) -> Result<Rational, OracleError> {
        match self.eval(t, env)? {
            Value::Degree(d) => Ok(d),
            other => Err(OracleError::Unsupported(format!("comparison on {other:?}"))),
        }
    }

    /// `app = v` for a role-function application and an element.
    fn app_is(&mut self, app: &Value, v: &Value) -> Prop {
        self.apps.insert(app.clone());
        let Value::App(f, args) = app else { unreachable!() };
        let mut key = args.clone();
        key.push(v.clone());
        self.atom(&format!("{f}="), key)
    }

    fn ground(&mut self, f: &Formula, env: &mut BTreeMap<String, Value>) -> Result<Prop, OracleError> {
        self.size += 1;
        if self.size > MAX_GROUND_SIZE {
            return Err(OracleError::TooLarge("grounding exceeds node budget".into()));
        }
        Ok(match f {
            Formula::True => Prop::Const(true),
            Formula::False => Prop::Const(false),
            Formula::Pred(p, args) => {
                let vals = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>, _>>()?;
                if vals.iter().any(|v| matches!(v, Value::App(..))) {
                    return Err(OracleError::Unsupported(format!("function term under {p}")));
                }
                // An off-grid degree would be an atom no quantifier constrains,
                // and a model built on it need not be a real one.
                if let Some(Value::Degree(d)) =
                    vals.iter().find(|v| matches!(v, Value::Degree(d) if !self.degrees.contains(d)))
                {
                    return Err(OracleError::Unsupported(format!("{p} at degree {d} outside the grid")));
                }
                self.atom(p, vals)
            }
            Formula::Eq(a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                match (&a, &b) {
                    (Value::App(..), Value::App(..)) => {
                        let parts = (0..self.n)
                            .map(|k| and(vec![self.app_is(&a, &Value::Entity(k)), self.app_is(&b, &Value::Entity(k))]))
                            .collect();
                        or(parts)
                    }
                    (Value::App(..), v) | (v, Value::App(..)) => {
                        let app = if matches!(a, Value::App(..)) { a.clone() } else { b.clone() };
                        self.app_is(&app, v)
                    }
                    _ => Prop::Const(a == b),
                }
            }
            Formula::Cmp(op, a, b) => {
                let (a, b) = (self.degree(a, env)?, self.degree(b, env)?);
                Prop::Const(match op {
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Eq => a == b,
                })
            }
            Formula::Not(a) => not(self.ground(a, env)?),
            Formula::And(fs) => and(fs.iter().map(|g| self.ground(g, env)).collect::<Result<_, _>>()?),
            Formula::Or(fs) => or(fs.iter().map(|g| self.ground(g, env)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => {
                let a = self.ground(a, env)?;
                or(vec![not(a), self.ground(b, env)?])
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.ground(a, env)?, self.ground(b, env)?);
                or(vec![and(vec![a.clone(), b.clone()]), and(vec![not(a), not(b)])])
            }
            Formula::Quant(q, x, sort, body) => {
                let carrier: Vec<Value> = match sort {
                    Sort::Entity => (0..self.n).map(Value::Entity).collect(),
                    Sort::Event => (0..self.n).map(Value::Event).collect(),
                    Sort::Degree => self.degrees.iter().cloned().map(Value::Degree).collect(),
                };
                let saved = env.get(x).cloned();
                let mut parts = Vec::new();
                for v in carrier {
                    env.insert(x.clone(), v);
                    parts.push(self.ground(body, env)?);
                }
                match saved {
                    Some(v) => env.insert(x.clone(), v),
                    None => env.remove(x),
                };
                if *q == Quantifier::Forall { and(parts) } else { or(parts) }
            }
        })
    }
}

/// Entity constants (nullary functions) in `f`; each gets its own entity.
pub fn entity_constants(f: &Formula) -> BTreeSet<String> {
    fn walk(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Fn(c, args) if args.is_empty() => {
                out.insert(c.clone());
            }
            Term::Fn(_, args) => args.iter().for_each(|a| walk(a, out)),
            Term::Lin(l) => l.coeffs.iter().for_each(|(t, _)| walk(t, out)),
            _ => {}
        }
    }
    let out = std::cell::RefCell::new(BTreeSet::new());
    f.map_terms(&|t| {
        walk(t, &mut out.borrow_mut());
        t.clone()
    });
    out.into_inner()
}

/// Whether `f` has a model with `n` entities and `m` degree points.
pub fn model_check(f: &Formula, n: usize, m: usize) -> Result<bool, OracleError> {
    if n == 0 {
        return Err(OracleError::TooLarge("at least one entity is required".into()));
    }
    if n > MAX_ENTITIES || m > MAX_DEGREES {
        return Err(OracleError::TooLarge(format!("n = {n}, m = {m}; at most {MAX_ENTITIES} and {MAX_DEGREES}")));
    }
    let constants = entity_constants(f);
    if constants.len() > n {
        return Err(OracleError::TooLarge(format!("{} constants need distinct entities, {n} allowed", constants.len())));
    }
    let mut g = Grounder {
        constants: constants.into_iter().enumerate().map(|(i, c)| (c, i)).collect(),
        n,
        degrees: degree_carrier(f, m)?,
        atoms: BTreeMap::new(),
        apps: BTreeSet::new(),
        size: 0,
    };
    let body = g.ground(f, &mut BTreeMap::new())?;
    // Each role-function application takes exactly one value.
    let mut functional = Vec::new();
    for app in g.apps.clone() {
        let options: Vec<Prop> = (0..n).map(|k| g.app_is(&app, &Value::Entity(k))).collect();
        functional.push(or(options.clone()));
        for i in 0..options.len() {
            for j in i + 1..options.len() {
                functional.push(or(vec![not(options[i].clone()), not(options[j].clone())]));
            }
        }
    }
    functional.push(body);
    let mut cnf = Tseitin { clauses: Vec::new(), next: g.atoms.len() };
    let root = cnf.encode(&and(functional));
    cnf.clauses.push(vec![root]);
    Ok(dpll(cnf.clauses, cnf.next))
}

/// Literals are `±(var + 1)`.
struct Tseitin {
    clauses: Vec<Vec<i64>>,
    next: usize,
}

impl Tseitin {
    fn fresh(&mut self) -> i64 {
        self.next += 1;
        self.next as i64
    }

    fn encode(&mut self, p: &Prop) -> i64 {
        match p {
            Prop::Const(b) => {
                let v = self.fresh();
                self.clauses.push(vec![if *b { v } else { -v }]);
                v
            }
            Prop::Var(i) => *i as i64 + 1,
            Prop::Not(q) => -self.encode(q),
            Prop::And(ps) | Prop::Or(ps) => {
                let lits: Vec<i64> = ps.iter().map(|q| self.encode(q)).collect();
                let v = self.fresh();
                if matches!(p, Prop::And(_)) {
                    for &l in &lits {
                        self.clauses.push(vec![-v, l]);
                    }
                    let mut big: Vec<i64> = lits.iter().map(|l| -l).collect();
                    big.push(v);
                    self.clauses.push(big);
                } else {
                    let mut big = lits.clone();
                    big.push(-v);
                    self.clauses.push(big);
                    for &l in &lits {
                        self.clauses.push(vec![v, -l]);
                    }
                }
                v
            }
        }
    }
}

/// Plain DPLL with unit propagation.
fn dpll(clauses: Vec<Vec<i64>>, vars: usize) -> bool {
    let mut assign: Vec<i8> = vec![0; vars + 1];
    fn value(assign: &[i8], l: i64) -> i8 {
        let v = assign[l.unsigned_abs() as usize];
        if l > 0 { v } else { -v }
    }
    fn solve(clauses: &[Vec<i64>], assign: &mut Vec<i8>) -> bool {
        let mut trail = Vec::new();
        loop {
            let mut unit = None;
            for c in clauses {
                let mut open = None;
                let mut count = 0;
                let mut sat = false;
                for &l in c {
                    match value(assign, l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            count += 1;
                            open = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                if count == 0 {
                    trail.iter().for_each(|&v: &usize| assign[v] = 0);
                    return false;
                }
                if count == 1 {
                    unit = open;
                    break;
                }
            }
            match unit {
                Some(l) => {
                    let v = l.unsigned_abs() as usize;
                    assign[v] = if l > 0 { 1 } else { -1 };
                    trail.push(v);
                }
                None => break,
            }
        }
        let branch = clauses
            .iter()
            .find(|c| !c.iter().any(|&l| value(assign, l) == 1))
            .and_then(|c| c.iter().find(|&&l| value(assign, l) == 0).copied());
        let Some(l) = branch else { return true };
        let v = l.unsigned_abs() as usize;
        for choice in [if l > 0 { 1 } else { -1 }, if l > 0 { -1 } else { 1 }] {
            assign[v] = choice;
            if solve(clauses, assign) {
                return true;
            }
            assign[v] = 0;
        }
        trail.iter().for_each(|&v| assign[v] = 0);
        false
    }
    solve(&clauses, &mut assign)
}
