//! Typed first-order (TFF) export. Degrees become `$rat`; comparisons become
//! `$less`, `$lesseq`, `$greater`, `$greatereq` and `=`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;

use crate::formula::{Formula, Linear, Term};
use crate::terms::{CmpOp, Quantifier, Rational, Sort};

use super::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        }
    }
}

/// A `lower_word`: ASCII letters, digits and underscores, starting lower-case.
pub fn symbol(name: &str) -> String {
    let body: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    match body.chars().next() {
        Some(c) if c.is_ascii_lowercase() => body,
        _ => format!("s_{body}"),
    }
}

fn variable(name: &str) -> String {
    let body: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("V_{body}")
}

fn rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Entity => "entity",
        Sort::Event => "event",
        Sort::Degree => "$rat",
    }
}

fn term(t: &Term) -> String {
    match t {
        Term::Var(x) => variable(x),
        Term::Fn(f, args) if args.is_empty() => symbol(f),
        Term::Fn(f, args) => format!("{}({})", symbol(f), args.iter().map(term).collect::<Vec<_>>().join(", ")),
        Term::Theta(s) => format!("theta_{}", symbol(s)),
        Term::Delta(s) => format!("delta_{}", symbol(s)),
        Term::Lin(l) => linear(l),
    }
}

fn linear(l: &Linear) -> String {
    let mut parts: Vec<String> = l
        .coeffs
        .iter()
        .map(|(t, c)| if c.is_one() { term(t) } else { format!("$product({}, {})", rational(c), term(t)) })
        .collect();
    if parts.is_empty() || l.constant != Rational::from_integer(0) {
        parts.push(rational(&l.constant));
    }
    let mut out = parts.pop().unwrap();
    while let Some(p) = parts.pop() {
        out = format!("$sum({p}, {out})");
    }
    out
}

fn formula(f: &Formula) -> String {
    let join = |fs: &[Formula], op: &str, empty: &str| {
        if fs.is_empty() {
            empty.to_string()
        } else {
            format!("({})", fs.iter().map(formula).collect::<Vec<_>>().join(&format!(" {op} ")))
        }
    };
    match f {
        Formula::True => "$true".into(),
        Formula::False => "$false".into(),
        Formula::Pred(p, args) if args.is_empty() => symbol(p),
        Formula::Pred(p, args) => format!("{}({})", symbol(p), args.iter().map(term).collect::<Vec<_>>().join(", ")),
        Formula::Eq(a, b) => format!("({} = {})", term(a), term(b)),
        Formula::Cmp(CmpOp::Eq, a, b) => format!("({} = {})", term(a), term(b)),
        Formula::Cmp(op, a, b) => {
            let name = match op {
                CmpOp::Lt => "$less",
                CmpOp::Le => "$lesseq",
                CmpOp::Gt => "$greater",
                CmpOp::Ge => "$greatereq",
                CmpOp::Eq => unreachable!(),
            };
            format!("{name}({}, {})", term(a), term(b))
        }
        Formula::Not(a) => format!("~ {}", formula(a)),
        Formula::And(fs) => join(fs, "&", "$true"),
        Formula::Or(fs) => join(fs, "|", "$false"),
        Formula::Implies(a, b) => format!("({} => {})", formula(a), formula(b)),
        Formula::Iff(a, b) => format!("({} <=> {})", formula(a), formula(b)),
        Formula::Quant(q, x, s, body) => {
            let q = if *q == Quantifier::Forall { "!" } else { "?" };
            format!("{q} [{}: {}] : {}", variable(x), sort_name(*s), formula(body))
        }
    }
}

/// One annotated formula, e.g. `tff(p1, axiom, ...).`
pub fn to_tptp(name: &str, role: Role, f: &Formula) -> String {
    format!("tff({}, {}, {}).", symbol(name), role.as_str(), formula(f))
}

/// Symbol signatures: argument sorts and whether the result is a formula.
#[derive(Default)]
struct Signature {
    preds: BTreeMap<String, Vec<Sort>>,
    funcs: BTreeMap<String, Vec<Sort>>,
    constants: BTreeMap<String, Sort>,
    scales: std::collections::BTreeSet<String>,
}

impl Signature {
    fn sort_of(&mut self, t: &Term, env: &BTreeMap<String, Sort>) -> Sort {
        match t {
            Term::Var(x) => env.get(x).copied().unwrap_or(Sort::Entity),
            Term::Fn(c, args) if args.is_empty() => *self.constants.entry(c.clone()).or_insert(Sort::Entity),
            Term::Fn(f, args) => {
                let sorts = args.iter().map(|a| self.sort_of(a, env)).collect();
                self.funcs.entry(f.clone()).or_insert(sorts);
                Sort::Entity
            }
            Term::Theta(s) | Term::Delta(s) => {
                self.scales.insert(s.clone());
                Sort::Degree
            }
            Term::Lin(l) => {
                l.coeffs.iter().for_each(|(t, _)| {
                    self.sort_of(t, env);
                });
                Sort::Degree
            }
        }
    }

    fn walk(&mut self, f: &Formula, env: &mut BTreeMap<String, Sort>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Pred(p, args) => {
                let sorts = args.iter().map(|a| self.sort_of(a, env)).collect();
                self.preds.entry(p.clone()).or_insert(sorts);
            }
            Formula::Eq(a, b) | Formula::Cmp(_, a, b) => {
                self.sort_of(a, env);
                self.sort_of(b, env);
            }
            Formula::Not(a) => self.walk(a, env),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| self.walk(g, env)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.walk(a, env);
                self.walk(b, env);
            }
            Formula::Quant(_, x, s, body) => {
                let saved = env.insert(x.clone(), *s);
                self.walk(body, env);
                match saved {
                    Some(v) => env.insert(x.clone(), v),
                    None => env.remove(x),
                };
            }
        }
    }

    fn declarations(&self) -> Vec<String> {
        let mut out = vec![
            "tff(entity_type, type, entity: $tType).".to_string(),
            "tff(event_type, type, event: $tType).".to_string(),
        ];
        let arrow = |args: &[Sort], result: &str| match args {
            [] => result.to_string(),
            [a] => format!("{} > {result}", sort_name(*a)),
            _ => format!("({}) > {result}", args.iter().map(|s| sort_name(*s)).collect::<Vec<_>>().join(" * ")),
        };
        for s in &self.scales {
            let s = symbol(s);
            out.push(format!("tff(theta_{s}_type, type, theta_{s}: $rat)."));
            out.push(format!("tff(delta_{s}_type, type, delta_{s}: $rat)."));
        }
        for (c, sort) in &self.constants {
            let c = symbol(c);
            out.push(format!("tff({c}_type, type, {c}: {}).", sort_name(*sort)));
        }
        for (f, args) in &self.funcs {
            let f = symbol(f);
            out.push(format!("tff({f}_type, type, {f}: {}).", arrow(args, "entity")));
        }
        for (p, args) in &self.preds {
            let p = symbol(p);
            out.push(format!("tff({p}_type, type, {p}: {}).", arrow(args, "$o")));
        }
        out
    }
}

/// A complete problem file: type declarations, axioms, premises and the
/// goal as conjecture.
pub fn problem_to_tptp(title: &str, problem: &Problem) -> String {
    let mut sig = Signature::default();
    let all = problem.axioms.iter().chain(&problem.premises).map(|(_, f)| f).chain([&problem.goal]);
    all.for_each(|f| sig.walk(f, &mut BTreeMap::new()));
    let mut out = String::new();
    let _ = writeln!(out, "% {title}");
    for d in sig.declarations() {
        let _ = writeln!(out, "{d}");
    }
    for (name, f) in &problem.axioms {
        let _ = writeln!(out, "{}", to_tptp(&format!("axiom_{name}"), Role::Axiom, f));
    }
    for (name, f) in &problem.premises {
        let _ = writeln!(out, "{}", to_tptp(&format!("premise_{name}"), Role::Axiom, f));
    }
    let _ = writeln!(out, "{}", to_tptp("goal", Role::Conjecture, &problem.goal));
    out
}
