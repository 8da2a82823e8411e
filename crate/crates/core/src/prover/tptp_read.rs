//! Reads TFF problems (the fragment [`super::tptp`] writes) back into a
//! [`Problem`], so the built-in prover can stand in as an external one.

use std::collections::BTreeSet;

use thiserror::Error;
use tptp::common::{AtomicWord, DefinedTerm, NonassocConnective, Number};
use tptp::tfx::{self, AtomicFormula, AtomicType, DefinedPlain, LogicFormula, PlainAtomic, UnitaryFormula, UnitaryTerm};
use tptp::top::{AnnotatedFormula, TPTPInput};
use tptp::TPTPIterator;

use crate::formula::{Formula, Linear, Term};
use crate::terms::{CmpOp, Quantifier, Rational, Sort};

use super::Problem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TptpError {
    #[error("syntax error near: {0}")]
    Syntax(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("no conjecture in problem")]
    NoConjecture,
}

fn unsupported(what: impl std::fmt::Display) -> TptpError {
    TptpError::Unsupported(what.to_string())
}

/// Parses every input; fails on the first syntax error or trailing garbage.
pub fn check_syntax(text: &str) -> Result<usize, TptpError> {
    let mut it = TPTPIterator::<()>::new(text.as_bytes());
    let mut count = 0;
    while let Some(item) = it.next() {
        if item.is_err() {
            return Err(TptpError::Syntax(near(text, it.remaining)));
        }
        count += 1;
    }
    if !it.remaining.iter().all(u8::is_ascii_whitespace) {
        return Err(TptpError::Syntax(near(text, it.remaining)));
    }
    Ok(count)
}

fn near(_text: &str, rest: &[u8]) -> String {
    String::from_utf8_lossy(&rest[..rest.len().min(60)]).into_owned()
}

fn var_name(v: &tptp::common::Variable) -> String {
    let w = v.0 .0;
    w.strip_prefix("V_").unwrap_or(w).to_string()
}

fn word(w: &AtomicWord) -> String {
    match w {
        AtomicWord::Lower(l) => l.0.to_string(),
        AtomicWord::SingleQuoted(q) => q.0.to_string(),
    }
}

struct Reader {
    /// Constants declared with type `$rat`.
    degree_constants: BTreeSet<String>,
    bound: Vec<(String, Sort)>,
}

impl Reader {
    fn sort_of_type(t: &AtomicType) -> Result<Sort, TptpError> {
        match t {
            AtomicType::Defined(d) if (d.0).0 .0 .0 == "rat" => Ok(Sort::Degree),
            AtomicType::Constant(c) => match word(&(c.0).0).as_str() {
                "entity" => Ok(Sort::Entity),
                "event" => Ok(Sort::Event),
                other => Err(unsupported(format!("type {other}"))),
            },
            other => Err(unsupported(other)),
        }
    }

    fn declaration(&mut self, typing: &tfx::AtomTyping) -> Result<(), TptpError> {
        match typing {
            tfx::AtomTyping::Parenthesised(inner) => self.declaration(inner),
            tfx::AtomTyping::Typing(atom, typ) => {
                if let (tptp::common::UntypedAtom::Constant(c), tfx::TopLevelType::Atomic(t)) = (atom, typ) {
                    if matches!(Self::sort_of_type(t), Ok(Sort::Degree)) {
                        self.degree_constants.insert(word(&(c.0).0));
                    }
                }
                Ok(())
            }
        }
    }

    fn var_sort(&self, name: &str) -> Option<Sort> {
        self.bound.iter().rev().find(|(x, _)| x == name).map(|(_, s)| *s)
    }

    fn is_degree(&self, t: &Term) -> bool {
        match t {
            Term::Var(x) => self.var_sort(x) == Some(Sort::Degree),
            Term::Lin(_) | Term::Theta(_) | Term::Delta(_) => true,
            Term::Fn(..) => false,
        }
    }

    fn number(n: &DefinedTerm) -> Result<Term, TptpError> {
        let text = match n {
            DefinedTerm::Number(Number::Integer(i)) => i.0,
            DefinedTerm::Number(Number::Rational(r)) => r.0,
            other => return Err(unsupported(other)),
        };
        let value: Rational = text.trim_start_matches('+').parse().map_err(|_| unsupported(text))?;
        Ok(Term::Lin(Linear::constant(value)))
    }

    fn args(&mut self, args: &tfx::Arguments) -> Result<Vec<Term>, TptpError> {
        args.0.iter().map(|a| self.tfx_term(a)).collect()
    }

    fn tfx_term(&mut self, t: &tfx::Term) -> Result<Term, TptpError> {
        match t {
            tfx::Term::Logic(l) => self.logic_term(l),
            tfx::Term::Defined(d) => Self::number(d),
        }
    }

    fn logic_term(&mut self, l: &LogicFormula) -> Result<Term, TptpError> {
        match l {
            LogicFormula::Unitary(UnitaryFormula::Atomic(a)) => self.atomic_term(a),
            LogicFormula::Unitary(UnitaryFormula::Variable(v)) => Ok(Term::Var(var_name(v))),
            LogicFormula::Unitary(UnitaryFormula::Logic(inner)) => self.logic_term(inner),
            other => Err(unsupported(other)),
        }
    }

    fn unitary_term(&mut self, t: &UnitaryTerm) -> Result<Term, TptpError> {
        match t {
            UnitaryTerm::Atomic(a) => self.atomic_term(a),
            UnitaryTerm::Defined(d) => Self::number(d),
            UnitaryTerm::Variable(v) => Ok(Term::Var(var_name(v))),
            UnitaryTerm::Logic(l) => self.logic_term(l),
        }
    }

    fn atomic_term(&mut self, a: &AtomicFormula) -> Result<Term, TptpError> {
        match a {
            AtomicFormula::Plain(PlainAtomic::Constant(c)) => {
                let name = word(&(c.0).0);
                if !self.degree_constants.contains(&name) {
                    return Ok(Term::constant(name));
                }
                Ok(match (name.strip_prefix("theta_"), name.strip_prefix("delta_")) {
                    (Some(s), _) => Term::Theta(s.to_string()),
                    (_, Some(s)) => Term::Delta(s.to_string()),
                    _ => Term::Theta(name),
                })
            }
            AtomicFormula::Plain(PlainAtomic::Function(f, args)) => Ok(Term::Fn(word(&f.0), self.args(args)?)),
            AtomicFormula::Defined(d) => match &d.0 {
                DefinedPlain::Function(f, args) => {
                    let name = (f.0).0 .0 .0;
                    let args = self.args(args)?;
                    let lin: Vec<Linear> = args.iter().map(Term::linear).collect();
                    let out = match (name, lin.as_slice()) {
                        ("sum", [a, b]) => a.add(b),
                        ("difference", [a, b]) => a.sub(b),
                        ("uminus", [a]) => a.scale(-Rational::from_integer(1)),
                        ("product", [a, b]) if a.is_constant() => b.scale(a.constant),
                        ("product", [a, b]) if b.is_constant() => a.scale(b.constant),
                        _ => return Err(unsupported(format!("${name} with {} arguments", args.len()))),
                    };
                    Ok(out.into_term())
                }
                other => Err(unsupported(other)),
            },
            other => Err(unsupported(other)),
        }
    }

    fn equation(&mut self, l: &UnitaryTerm, r: &UnitaryTerm) -> Result<Formula, TptpError> {
        let (a, b) = (self.unitary_term(l)?, self.unitary_term(r)?);
        Ok(if self.is_degree(&a) || self.is_degree(&b) { Formula::Cmp(CmpOp::Eq, a, b) } else { Formula::Eq(a, b) })
    }

    fn logic(&mut self, l: &LogicFormula) -> Result<Formula, TptpError> {
        match l {
            LogicFormula::Unary(u) => self.unary(u),
            LogicFormula::Unitary(u) => self.unitary(u),
            LogicFormula::Binary(b) => self.binary(b),
            LogicFormula::DefinedInfix(d) => self.equation(&d.left, &d.right),
        }
    }

    fn unit(&mut self, u: &tfx::UnitFormula) -> Result<Formula, TptpError> {
        match u {
            tfx::UnitFormula::Unitary(u) => self.unitary(u),
            tfx::UnitFormula::Unary(u) => self.unary(u),
            tfx::UnitFormula::DefinedInfix(d) => self.equation(&d.left, &d.right),
        }
    }

    fn unary(&mut self, u: &tfx::UnaryFormula) -> Result<Formula, TptpError> {
        match u {
            tfx::UnaryFormula::Prefix(p) => Ok(Formula::not(self.preunit(&p.formula)?)),
            tfx::UnaryFormula::Infix(i) => Ok(Formula::not(self.equation(&i.left, &i.right)?)),
        }
    }

    fn preunit(&mut self, p: &tfx::PreunitFormula) -> Result<Formula, TptpError> {
        match p {
            tfx::PreunitFormula::Unitary(u) => self.unitary(u),
            tfx::PreunitFormula::Prefix(p) => Ok(Formula::not(self.preunit(&p.formula)?)),
        }
    }

    fn unitary(&mut self, u: &UnitaryFormula) -> Result<Formula, TptpError> {
        match u {
            UnitaryFormula::Quantified(q) => {
                let quant = match q.quantifier {
                    tptp::fof::Quantifier::Forall => Quantifier::Forall,
                    tptp::fof::Quantifier::Exists => Quantifier::Exists,
                };
                let mut vars = Vec::new();
                for v in &q.bound.0 {
                    let tfx::Variable::Typed(tv) = v else { return Err(unsupported(format!("untyped variable {v}"))) };
                    vars.push((var_name(&tv.variable), Self::sort_of_type(&tv.typ)?));
                }
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.unit(&q.formula);
                self.bound.truncate(depth);
                let mut out = body?;
                for (x, s) in vars.into_iter().rev() {
                    out = Formula::Quant(quant, x, s, Box::new(out));
                }
                Ok(out)
            }
            UnitaryFormula::Atomic(a) => self.atomic(a),
            UnitaryFormula::Logic(l) => self.logic(l),
            UnitaryFormula::Variable(v) => Err(unsupported(format!("formula variable {v}"))),
        }
    }

    fn atomic(&mut self, a: &AtomicFormula) -> Result<Formula, TptpError> {
        match a {
            AtomicFormula::Plain(PlainAtomic::Constant(c)) => Ok(Formula::Pred(word(&(c.0).0), vec![])),
            AtomicFormula::Plain(PlainAtomic::Function(f, args)) => Ok(Formula::Pred(word(&f.0), self.args(args)?)),
            AtomicFormula::Defined(d) => match &d.0 {
                DefinedPlain::Constant(c) => match ((c.0).0).0 .0 .0 {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    other => Err(unsupported(format!("${other}"))),
                },
                DefinedPlain::Function(f, args) => {
                    let op = match (f.0).0 .0 .0 {
                        "less" => CmpOp::Lt,
                        "lesseq" => CmpOp::Le,
                        "greater" => CmpOp::Gt,
                        "greatereq" => CmpOp::Ge,
                        other => return Err(unsupported(format!("${other}"))),
                    };
                    let mut args = self.args(args)?;
                    if args.len() != 2 {
                        return Err(unsupported(format!("comparison with {} arguments", args.len())));
                    }
                    let b = args.pop().unwrap();
                    Ok(Formula::Cmp(op, args.pop().unwrap(), b))
                }
            },
            other => Err(unsupported(other)),
        }
    }

    fn binary(&mut self, b: &tfx::BinaryFormula) -> Result<Formula, TptpError> {
        match b {
            tfx::BinaryFormula::Assoc(tfx::BinaryAssoc::Or(fs)) => {
                Ok(Formula::Or(fs.0.iter().map(|u| self.unit(u)).collect::<Result<_, _>>()?))
            }
            tfx::BinaryFormula::Assoc(tfx::BinaryAssoc::And(fs)) => {
                Ok(Formula::And(fs.0.iter().map(|u| self.unit(u)).collect::<Result<_, _>>()?))
            }
            tfx::BinaryFormula::Nonassoc(n) => {
                let (l, r) = (self.unit(&n.left)?, self.unit(&n.right)?);
                Ok(match n.op {
                    NonassocConnective::LRImplies => Formula::implies(l, r),
                    NonassocConnective::RLImplies => Formula::implies(r, l),
                    NonassocConnective::Equivalent => Formula::Iff(Box::new(l), Box::new(r)),
                    NonassocConnective::NotEquivalent => Formula::not(Formula::Iff(Box::new(l), Box::new(r))),
                    NonassocConnective::NotOr => Formula::not(Formula::Or(vec![l, r])),
                    NonassocConnective::NotAnd => Formula::not(Formula::And(vec![l, r])),
                })
            }
        }
    }
}

/// Reads a problem: `axiom_*` formulas become axioms, other axioms and
/// hypotheses premises, and the single conjecture the goal.
pub fn read_problem(text: &str) -> Result<Problem, TptpError> {
    check_syntax(text)?;
    let mut reader = Reader { degree_constants: BTreeSet::new(), bound: Vec::new() };
    let mut problem = Problem::default();
    let mut goal = None;
    let inputs: Vec<TPTPInput> = TPTPIterator::<()>::new(text.as_bytes()).collect::<Result<_, _>>().expect("checked");
    for input in &inputs {
        let TPTPInput::Annotated(a) = input else { return Err(unsupported("include directive")) };
        let AnnotatedFormula::Tfx(tff) = a.as_ref() else { return Err(unsupported("non-TFF input")) };
        let annotated = &tff.0;
        let name = annotated.name.to_string();
        let role = (annotated.role.0).0;
        match (role, annotated.formula.as_ref()) {
            ("type", tfx::Formula::AtomTyping(t)) => reader.declaration(t)?,
            (_, tfx::Formula::Logic(l)) => {
                let f = reader.logic(l)?;
                match role {
                    "conjecture" => goal = Some(f),
                    "axiom" | "hypothesis" => match name.strip_prefix("axiom_") {
                        Some(n) => problem.axioms.push((n.to_string(), f)),
                        None => problem.premises.push((name.strip_prefix("premise_").unwrap_or(&name).to_string(), f)),
                    },
                    other => return Err(unsupported(format!("role {other}"))),
                }
            }
            (role, _) => return Err(unsupported(format!("role {role}"))),
        }
    }
    problem.goal = goal.ok_or(TptpError::NoConjecture)?;
    Ok(problem)
}
