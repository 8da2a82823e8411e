//! Adjective registry and the comparative axiom schemata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::formula::{extract_formula, Formula};
use crate::terms::{beta_normalize, parse_term, ConstKind, LambdaTerm};

const BUILTIN: &str = include_str!("../data/adjectives.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("adjective `{0}` is not registered")]
    UnregisteredAdjective(String),
    #[error("adjective registry line {line}: {message}")]
    BadRegistry { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjectiveInfo {
    pub lemma: String,
    pub polarity: Polarity,
    pub antonym: Option<String>,
    /// Shared by an antonym pair: the positive member's lemma.
    pub scale_id: String,
    pub unit: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    adjectives: BTreeMap<String, AdjectiveInfo>,
}

impl Registry {
    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::parse(BUILTIN).expect("bundled registry is well-formed"))
    }

    /// Reads `lemma TAB polarity TAB antonym-or-- TAB unit-or--` lines.
    pub fn parse(text: &str) -> Result<Registry, AxiomError> {
        let bad = |line: usize, message: &str| AxiomError::BadRegistry { line, message: message.into() };
        let opt = |s: &str| (s != "-").then(|| s.to_string());
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [lemma, polarity, antonym, unit] = cols[..] else {
                return Err(bad(i + 1, "expected 4 columns"));
            };
            let polarity = match polarity {
                "positive" => Polarity::Positive,
                "negative" => Polarity::Negative,
                _ => return Err(bad(i + 1, "polarity must be positive or negative")),
            };
            rows.push((i + 1, lemma.to_string(), polarity, opt(antonym), opt(unit)));
        }
        let polarities: BTreeMap<&str, Polarity> = rows.iter().map(|r| (r.1.as_str(), r.2)).collect();
        let antonyms: BTreeMap<&str, Option<&str>> =
            rows.iter().map(|r| (r.1.as_str(), r.3.as_deref())).collect();
        let mut adjectives = BTreeMap::new();
        for (line, lemma, polarity, antonym, unit) in &rows {
            let scale_id = match antonym {
                Some(a) => {
                    if antonyms.get(a.as_str()).copied().flatten() != Some(lemma.as_str()) {
                        return Err(bad(*line, "antonym link is not symmetric"));
                    }
                    if polarities.get(a.as_str()) == Some(polarity) {
                        return Err(bad(*line, "antonyms must have opposite polarity"));
                    }
                    if *polarity == Polarity::Positive { lemma.clone() } else { a.clone() }
                }
                None => lemma.clone(),
            };
            adjectives.insert(
                lemma.clone(),
                AdjectiveInfo {
                    lemma: lemma.clone(),
                    polarity: *polarity,
                    antonym: antonym.clone(),
                    scale_id,
                    unit: unit.clone(),
                },
            );
        }
        Ok(Registry { adjectives })
    }

    pub fn get(&self, lemma: &str) -> Option<&AdjectiveInfo> {
        self.adjectives.get(lemma)
    }

    pub fn scale_of(&self, lemma: &str) -> String {
        self.get(lemma).map_or_else(|| lemma.to_string(), |a| a.scale_id.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = &AdjectiveInfo> {
        self.adjectives.values()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    Cp,
    Ant,
    Up,
    Down,
    Delta,
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schema::Cp => "CP",
            Schema::Ant => "ANT",
            Schema::Up => "UP",
            Schema::Down => "DOWN",
            Schema::Delta => "DELTA",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axiom {
    pub schema: Schema,
    pub lemmas: Vec<String>,
    pub formula: Formula,
}

impl Axiom {
    pub fn name(&self) -> String {
        format!("{}_{}", self.schema.to_string().to_lowercase(), self.lemmas.join("_"))
    }
}

pub type AxiomSet = Vec<Axiom>;

const CP: &str = r"\A. forall x:entity. forall y:entity.
    imp(exists d:degree. and(A(x, d), not(A(y, d))), forall d:degree. imp(A(y, d), A(x, d)))";
const ANT: &str = r"\P N. forall x:entity. forall d:degree. iff(P(x, d), not(N(x, d)))";
const UP: &str = r"\P. forall x:entity. forall d:degree.
    imp(P(x, d), forall d2:degree. imp(le(d2, d), P(x, d2)))";
const DOWN: &str = r"\N. forall x:entity. forall d:degree.
    imp(N(x, d), forall d2:degree. imp(ge(d2, d), N(x, d2)))";
/// `delta` is positive and too small to flip the adjective around `theta`.
const DELTA: &str = r"\A S. and(gt(delta(S), 0),
    forall x:entity. iff(A(x, plus(theta(S), neg(delta(S)))), A(x, plus(theta(S), delta(S)))))";

fn instance(schema: &str, args: &[&str]) -> Formula {
    let body = parse_term(schema).expect("axiom schema parses");
    let applied = LambdaTerm::apply(body, args.iter().map(|a| LambdaTerm::constant(*a, ConstKind::Predicate)));
    let nf = beta_normalize(&applied).expect("axiom schema normalizes");
    extract_formula(&nf).expect("axiom schema is first-order")
}

/// Registered gradable adjectives used as predicates, closed under antonymy.
pub fn collect_adjectives(formulas: &[Formula], registry: &Registry) -> BTreeSet<String> {
    let mut preds = BTreeSet::new();
    formulas.iter().for_each(|f| f.predicates(&mut preds));
    let mut out: BTreeSet<String> = preds.into_iter().map(|(p, _)| p).filter(|p| registry.get(p).is_some()).collect();
    let antonyms: Vec<String> = out.iter().filter_map(|l| registry.get(l)?.antonym.clone()).collect();
    out.extend(antonyms);
    out
}

/// CP and DELTA for every lemma, UP for positives, DOWN for negatives, and
/// ANT for each antonym pair with both members present.
pub fn instantiate_axioms(lemmas: &BTreeSet<String>, registry: &Registry) -> Result<AxiomSet, AxiomError> {
    let mut out = Vec::new();
    for lemma in lemmas {
        let info = registry.get(lemma).ok_or_else(|| AxiomError::UnregisteredAdjective(lemma.clone()))?;
        let l = lemma.as_str();
        let mut push = |schema, lemmas: Vec<&str>, formula| {
            out.push(Axiom { schema, lemmas: lemmas.into_iter().map(str::to_string).collect(), formula })
        };
        push(Schema::Cp, vec![l], instance(CP, &[l]));
        match info.polarity {
            Polarity::Positive => {
                if let Some(n) = info.antonym.as_deref().filter(|n| lemmas.contains(*n)) {
                    push(Schema::Ant, vec![l, n], instance(ANT, &[l, n]));
                }
                push(Schema::Up, vec![l], instance(UP, &[l]));
            }
            Polarity::Negative => push(Schema::Down, vec![l], instance(DOWN, &[l])),
        }
        push(Schema::Delta, vec![l], instance(DELTA, &[l, &info.scale_id]));
    }
    out.sort_by(|a, b| (a.schema, &a.lemmas).cmp(&(b.schema, &b.lemmas)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::alpha_eq;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn f(src: &str) -> Formula {
        extract_formula(&parse_term(src).unwrap()).unwrap()
    }

    #[test]
    fn registry_links_are_consistent() {
        let reg = Registry::builtin();
        for a in reg.iter() {
            if let Some(b) = &a.antonym {
                let b = reg.get(b).unwrap();
                assert_eq!(b.antonym.as_deref(), Some(a.lemma.as_str()));
                assert_ne!(a.polarity, b.polarity);
                assert_eq!(a.scale_id, b.scale_id);
            }
        }
        assert_eq!(reg.scale_of("light"), "heavy");
        assert!(Registry::parse("a\tpositive\tb\t-\nb\tpositive\ta\t-\n").is_err());
        assert!(Registry::parse("a\tpositive\tb\t-\nb\tnegative\t-\t-\n").is_err());
    }

    #[test]
    fn collects_with_antonym_closure() {
        let reg = Registry::builtin();
        assert_eq!(collect_adjectives(&[f("heavy(taro, theta(heavy))")], reg), set(&["heavy", "light"]));
        assert!(collect_adjectives(&[], reg).is_empty());
        assert_eq!(collect_adjectives(&[f("and(fast(a, theta(fast)), slow(b, theta(fast)))")], reg), set(&["fast", "slow"]));
        assert_eq!(collect_adjectives(&[f("book(x0)")], reg), set(&[]));
    }

    #[test]
    fn schema_selection() {
        let reg = Registry::builtin();
        let ax = instantiate_axioms(&set(&["heavy", "light"]), reg).unwrap();
        let names: Vec<String> = ax.iter().map(Axiom::name).collect();
        assert_eq!(names, ["cp_heavy", "cp_light", "ant_heavy_light", "up_heavy", "down_light", "delta_heavy", "delta_light"]);
        let light = instantiate_axioms(&set(&["light"]), reg).unwrap();
        assert!(light.iter().any(|a| a.schema == Schema::Down));
        assert!(!light.iter().any(|a| a.schema == Schema::Up || a.schema == Schema::Ant));
        assert!(instantiate_axioms(&set(&[]), reg).unwrap().is_empty());
        assert_eq!(
            instantiate_axioms(&set(&["tall"]), reg),
            Err(AxiomError::UnregisteredAdjective("tall".into()))
        );
    }

    #[test]
    fn exact_instances() {
        let reg = Registry::builtin();
        let ax = instantiate_axioms(&set(&["heavy", "light"]), reg).unwrap();
        let get = |name: &str| ax.iter().find(|a| a.name() == name).unwrap().formula.to_lambda();
        let cases = [
            ("cp_heavy", "forall x:entity. forall y:entity. imp(exists d:degree. and(heavy(x, d), not(heavy(y, d))), forall d:degree. imp(heavy(y, d), heavy(x, d)))"),
            ("ant_heavy_light", "forall x:entity. forall d:degree. iff(heavy(x, d), not(light(x, d)))"),
            ("up_heavy", "forall x:entity. forall d:degree. imp(heavy(x, d), forall e:degree. imp(le(e, d), heavy(x, e)))"),
            ("down_light", "forall x:entity. forall d:degree. imp(light(x, d), forall e:degree. imp(ge(e, d), light(x, e)))"),
            ("delta_light", "and(gt(delta(heavy), 0), forall x:entity. iff(light(x, plus(theta(heavy), neg(delta(heavy)))), light(x, plus(theta(heavy), delta(heavy)))))"),
        ];
        for (name, src) in cases {
            assert!(alpha_eq(&get(name), &parse_term(src).unwrap()), "{name}: {}", get(name));
        }
        for a in &ax {
            assert!(a.formula.free_vars().is_empty());
            assert!(a.formula.scales().iter().all(|s| s == "heavy"));
        }
    }
}
