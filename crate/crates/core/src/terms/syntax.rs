//! Canonical text syntax for terms.
//!
//! ```text
//! \x y. body                 abstraction (also `λ`)
//! f(a, b)                    curried application f a b
//! forall d:degree. body      quantifiers carry their sort
//! not(p) and(p, q, ...) or(...) imp(p, q) iff(p, q) true false
//! gt(a, b) ge lt le deq      degree comparisons
//! eq(a, b)                   identity of entities/events
//! plus(a, b) neg(a) 70 -5 5/2
//! theta(A) delta(A) pair(at_issue, presupposition)
//! ```
//!
//! Whitespace is insignificant. Identifiers bound by an enclosing binder are
//! variables; all others are constants.

use std::fmt;

use super::{CmpOp, ConstKind, Connective, LambdaTerm, Quantifier, Rational, Sort, TermError};
use LambdaTerm::*;

pub fn parse_term(input: &str) -> Result<LambdaTerm, TermError> {
    parse_open(input, &[])
}

/// Parses with `free` treated as variables rather than constants.
pub fn parse_open(input: &str, free: &[&str]) -> Result<LambdaTerm, TermError> {
    let bound = free.iter().map(|s| s.to_string()).collect();
    let mut p = Parser { src: input, pos: 0, bound };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != input.len() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> TermError {
        TermError::Syntax { offset: self.pos, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, TermError> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return Err(self.error("expected identifier")),
        }
        let end = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Ok(rest[..end].to_string())
    }

    fn term(&mut self) -> Result<LambdaTerm, TermError> {
        match self.peek() {
            Some('\\') | Some('λ') => {
                let c = self.peek().unwrap();
                self.pos += c.len_utf8();
                let mut params = vec![self.ident()?];
                while self.peek() != Some('.') {
                    params.push(self.ident()?);
                }
                self.expect('.')?;
                let depth = self.bound.len();
                self.bound.extend(params.iter().cloned());
                let body = self.term();
                self.bound.truncate(depth);
                let body = body?;
                Ok(params.into_iter().rev().fold(body, |b, x| LambdaTerm::lam(x, b)))
            }
            _ => {
                let save = self.pos;
                if let Ok(word) = self.ident() {
                    if let Some(q) = match word.as_str() {
                        "forall" => Some(Quantifier::Forall),
                        "exists" => Some(Quantifier::Exists),
                        _ => None,
                    } {
                        return self.quantifier(q);
                    }
                }
                self.pos = save;
                self.application()
            }
        }
    }

    fn quantifier(&mut self, q: Quantifier) -> Result<LambdaTerm, TermError> {
        let var = self.ident()?;
        self.expect(':')?;
        let sort = match self.ident()?.as_str() {
            "entity" => Sort::Entity,
            "degree" => Sort::Degree,
            "event" => Sort::Event,
            other => return Err(self.error(format!("unknown sort `{other}`"))),
        };
        self.expect('.')?;
        self.bound.push(var.clone());
        let body = self.term();
        self.bound.pop();
        Ok(Quant(q, var, sort, Box::new(body?)))
    }

    fn args(&mut self) -> Result<Vec<LambdaTerm>, TermError> {
        self.expect('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn fixed<const N: usize>(&mut self, name: &str) -> Result<[LambdaTerm; N], TermError> {
        let args = self.args()?;
        let n = args.len();
        args.try_into()
            .map_err(|_| self.error(format!("`{name}` takes {N} argument(s), got {n}")))
    }

    fn application(&mut self) -> Result<LambdaTerm, TermError> {
        let mut head = self.atom()?;
        while self.peek() == Some('(') {
            let args = self.args()?;
            if let Const(name, ConstKind::Entity) = &head {
                head = Const(name.clone(), ConstKind::Predicate);
            }
            head = LambdaTerm::apply(head, args);
        }
        Ok(head)
    }

    fn number(&mut self) -> Result<LambdaTerm, TermError> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || c == '/' || (i == 0 && c == '-')))
            .map_or(rest.len(), |(i, _)| i);
        let text = &rest[..end];
        let value = match text.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.parse().map_err(|_| self.error("bad numeral"))?;
                let d: i64 = d.parse().map_err(|_| self.error("bad numeral"))?;
                if d == 0 {
                    return Err(self.error("zero denominator"));
                }
                Rational::new(n, d)
            }
            None => Rational::from_integer(text.parse().map_err(|_| self.error("bad numeral"))?),
        };
        self.pos += end;
        Ok(Num(value))
    }

    fn atom(&mut self) -> Result<LambdaTerm, TermError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(')')?;
                Ok(t)
            }
            Some(c) if c.is_ascii_digit() || c == '-' => self.number(),
            Some(_) => {
                let word = self.ident()?;
                let keyword_call = self.peek() == Some('(');
                let conn = |c, args| Ok(Conn(c, args));
                match (word.as_str(), keyword_call) {
                    ("true", _) => Ok(Truth(true)),
                    ("false", _) => Ok(Truth(false)),
                    ("not", true) => {
                        let [a] = self.fixed("not")?;
                        conn(Connective::Not, vec![a])
                    }
                    ("and", true) => conn(Connective::And, self.args()?),
                    ("or", true) => conn(Connective::Or, self.args()?),
                    ("imp", true) => conn(Connective::Implies, self.fixed::<2>("imp")?.into()),
                    ("iff", true) => conn(Connective::Iff, self.fixed::<2>("iff")?.into()),
                    ("gt" | "ge" | "lt" | "le" | "deq", true) => {
                        let op = match word.as_str() {
                            "gt" => CmpOp::Gt,
                            "ge" => CmpOp::Ge,
                            "lt" => CmpOp::Lt,
                            "le" => CmpOp::Le,
                            _ => CmpOp::Eq,
                        };
                        let [a, b] = self.fixed(&word)?;
                        Ok(LambdaTerm::arith(op, a, b))
                    }
                    ("eq", true) => {
                        let [a, b] = self.fixed("eq")?;
                        Ok(Eq(Box::new(a), Box::new(b)))
                    }
                    ("plus", true) => {
                        let [a, b] = self.fixed("plus")?;
                        Ok(Plus(Box::new(a), Box::new(b)))
                    }
                    ("neg", true) => {
                        let [a] = self.fixed("neg")?;
                        Ok(Neg(Box::new(a)))
                    }
                    ("theta", true) => {
                        let [a] = self.fixed("theta")?;
                        Ok(Theta(Box::new(a)))
                    }
                    ("delta", true) => {
                        let [a] = self.fixed("delta")?;
                        Ok(Delta(Box::new(a)))
                    }
                    ("pair", true) => {
                        let [a, b] = self.fixed("pair")?;
                        Ok(LambdaTerm::pair(a, b))
                    }
                    _ if self.bound.contains(&word) => Ok(Var(word)),
                    _ => Ok(Const(word, ConstKind::Entity)),
                }
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn write_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if *q.denom() == 1 {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, args: &[&LambdaTerm]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write_term(a, f)?;
    }
    write!(f, ")")
}

pub(super) fn write_term(t: &LambdaTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Var(x) | Const(x, _) => write!(f, "{x}"),
        Num(q) => write_rational(q, f),
        Truth(b) => write!(f, "{b}"),
        Lam(..) => {
            let mut params = Vec::new();
            let mut body = t;
            while let Lam(x, b) = body {
                params.push(x.as_str());
                body = b;
            }
            write!(f, "\\{}. ", params.join(" "))?;
            write_term(body, f)
        }
        App(..) => {
            let (head, args) = t.spine();
            match head {
                Var(x) | Const(x, _) => write_call(f, x, &args),
                other => {
                    write!(f, "(")?;
                    write_term(other, f)?;
                    write!(f, ")")?;
                    write_call(f, "", &args)
                }
            }
        }
        Conn(c, args) => {
            let name = match c {
                Connective::And => "and",
                Connective::Or => "or",
                Connective::Implies => "imp",
                Connective::Iff => "iff",
                Connective::Not => "not",
            };
            write_call(f, name, &args.iter().collect::<Vec<_>>())
        }
        Quant(q, x, s, body) => {
            let q = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            write!(f, "{q} {x}:{}. ", s.name())?;
            write_term(body, f)
        }
        Arith(op, a, b) => write_call(f, op.name(), &[a, b]),
        Eq(a, b) => write_call(f, "eq", &[a, b]),
        Plus(a, b) => write_call(f, "plus", &[a, b]),
        Neg(a) => write_call(f, "neg", &[a]),
        Theta(a) => write_call(f, "theta", &[a]),
        Delta(a) => write_call(f, "delta", &[a]),
        Pair(a, b) => write_call(f, "pair", &[a, b]),
    }
}
