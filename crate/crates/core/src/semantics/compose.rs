use std::collections::BTreeSet;
use std::fmt;

use crate::axioms::Registry;
use crate::formula::{extract_formula, Formula};
use crate::grammar::{Derivation, RuleId};
use crate::terms::{beta_normalize, fresh_name, Connective, LambdaTerm, Quantifier, TermError};

use super::templates::instantiate_template;
use super::SemanticsError;

/// At-issue content paired with what the sentence presupposes.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSem {
    pub at_issue: LambdaTerm,
    /// `true` when nothing is presupposed.
    pub presupposition: LambdaTerm,
}

impl MultiSem {
    pub fn plain(at_issue: LambdaTerm) -> Self {
        MultiSem { at_issue, presupposition: LambdaTerm::Truth(true) }
    }

    pub fn has_presupposition(&self) -> bool {
        self.presupposition != LambdaTerm::Truth(true)
    }

    /// Negation only reaches the at-issue dimension.
    pub fn negate_at_issue(&self) -> MultiSem {
        MultiSem { at_issue: LambdaTerm::not(self.at_issue.clone()), presupposition: self.presupposition.clone() }
    }

    pub fn at_issue_formula(&self) -> Result<Formula, TermError> {
        extract_formula(&self.at_issue)
    }

    pub fn presupposition_formula(&self) -> Result<Formula, TermError> {
        extract_formula(&self.presupposition)
    }

    /// Both dimensions conjoined, for proving.
    pub fn flatten(&self) -> Result<Formula, TermError> {
        Ok(Formula::conjoin([self.at_issue_formula()?, self.presupposition_formula()?]))
    }
}

impl fmt::Display for MultiSem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair({}, {})", self.at_issue, self.presupposition)
    }
}

/// Bottom-up semantic fold: application for `>`/`<`, `\x. f(g(x))` for the
/// compositions. Each node is normalized as it is built.
pub fn compose(d: &Derivation) -> Result<LambdaTerm, SemanticsError> {
    match d {
        Derivation::Leaf { entry, .. } => instantiate_template(entry),
        Derivation::Node { rule, left, right, .. } => {
            let l = compose(left)?;
            let r = compose(right)?;
            let combined = match rule {
                RuleId::Fa => LambdaTerm::app(l, r),
                RuleId::Ba => LambdaTerm::app(r, l),
                RuleId::Fc | RuleId::FcX => composition(l, r),
                RuleId::Bc | RuleId::BcX => composition(r, l),
            };
            beta_normalize(&combined).map_err(SemanticsError::Term)
        }
    }
}

fn composition(f: LambdaTerm, g: LambdaTerm) -> LambdaTerm {
    let mut avoid: BTreeSet<String> = f.free_vars();
    avoid.extend(g.free_vars());
    let x = fresh_name("x", &avoid);
    LambdaTerm::lam(x.clone(), LambdaTerm::app(f, LambdaTerm::app(g, LambdaTerm::var(x))))
}

/// Composes a sentence and separates its two dimensions.
pub fn compose_sem(d: &Derivation) -> Result<MultiSem, SemanticsError> {
    project(&compose(d)?)
}

/// Lifts every `pair` to the top: the first components stay in place, the
/// second ones are conjoined into the presupposition. Presuppositions
/// mentioning a quantified variable keep that quantifier.
pub fn project(term: &LambdaTerm) -> Result<MultiSem, SemanticsError> {
    let (at, ps) = lift(term);
    let tidy = |t: LambdaTerm| beta_normalize(&one_point(t)).map_err(SemanticsError::Term);
    let presupposition = match ps.len() {
        0 => LambdaTerm::Truth(true),
        1 => ps.into_iter().next().unwrap(),
        _ => LambdaTerm::and(ps),
    };
    Ok(MultiSem { at_issue: tidy(at)?, presupposition: tidy(presupposition)? })
}

fn lift(t: &LambdaTerm) -> (LambdaTerm, Vec<LambdaTerm>) {
    match t {
        LambdaTerm::Pair(a, p) => {
            let (a, mut ps) = lift(a);
            let (p, more) = lift(p);
            ps.push(p);
            ps.extend(more);
            (a, ps)
        }
        LambdaTerm::Conn(c, args) => {
            let mut ps = Vec::new();
            let ats = args
                .iter()
                .map(|a| {
                    let (a, more) = lift(a);
                    ps.extend(more);
                    a
                })
                .collect();
            (LambdaTerm::Conn(*c, ats), ps)
        }
        LambdaTerm::Quant(q, x, s, body) => {
            let (b, ps) = lift(body);
            let ps = ps
                .into_iter()
                .map(|p| if p.has_free(x) { LambdaTerm::Quant(*q, x.clone(), *s, Box::new(p)) } else { p })
                .collect();
            (LambdaTerm::Quant(*q, x.clone(), *s, Box::new(b)), ps)
        }
        other => (other.clone(), Vec::new()),
    }
}

/// `exists y. (... and eq(y, t) ...)` becomes `(...)[t/y]` when `t` does not
/// mention `y`.
pub fn one_point(t: LambdaTerm) -> LambdaTerm {
    let t = t.map_children(one_point);
    let LambdaTerm::Quant(Quantifier::Exists, y, sort, body) = t else { return t };
    let conjuncts = match *body {
        LambdaTerm::Conn(Connective::And, args) => args,
        other => vec![other],
    };
    let witness = conjuncts.iter().position(|c| match c {
        LambdaTerm::Eq(a, b) => {
            matches!(a.as_ref(), LambdaTerm::Var(v) if *v == y) && !b.has_free(&y)
                || matches!(b.as_ref(), LambdaTerm::Var(v) if *v == y) && !a.has_free(&y)
        }
        _ => false,
    });
    let Some(i) = witness else {
        let body = if conjuncts.len() == 1 { conjuncts.into_iter().next().unwrap() } else { LambdaTerm::and(conjuncts) };
        return LambdaTerm::Quant(Quantifier::Exists, y, sort, Box::new(body));
    };
    let mut rest = conjuncts;
    let LambdaTerm::Eq(a, b) = rest.remove(i) else { unreachable!() };
    let value = if matches!(a.as_ref(), LambdaTerm::Var(v) if *v == y) { *b } else { *a };
    let rest: Vec<LambdaTerm> = rest.into_iter().map(|c| c.substitute(&y, &value)).collect();
    match rest.len() {
        0 => LambdaTerm::Truth(true),
        1 => rest.into_iter().next().unwrap(),
        _ => LambdaTerm::and(rest),
    }
}

/// Measure phrases must use the unit registered for the adjective they
/// modify; adjectives without a unit take none.
pub fn check_units(d: &Derivation, registry: &Registry) -> Result<(), SemanticsError> {
    let leaves = d.leaves();
    let adjectives: Vec<&str> = leaves
        .iter()
        .filter(|e| e.is_predicative_adjective())
        .map(|e| e.lemma.as_str())
        .collect();
    for unit_leaf in leaves.iter().filter(|e| e.is_unit()) {
        let unit = unit_leaf.flag_value("unit").unwrap_or(&unit_leaf.lemma);
        for adj in &adjectives {
            let expected = registry.get(adj).and_then(|a| a.unit.as_deref());
            if expected != Some(unit) {
                return Err(SemanticsError::UnitMismatch {
                    unit: unit.to_string(),
                    adjective: adj.to_string(),
                    expected: expected.unwrap_or("none").to_string(),
                });
            }
        }
    }
    Ok(())
}

fn require(d: &Derivation, templates: &[&str], construction: &'static str) -> Result<(), SemanticsError> {
    if d.leaves().iter().any(|e| templates.contains(&e.template_id.as_str())) {
        Ok(())
    } else {
        Err(SemanticsError::WrongConstruction(construction))
    }
}

/// Comparatives with a measure-phrase standard (`70 kg yori`).
pub fn compose_measure(d: &Derivation, registry: &Registry) -> Result<LambdaTerm, SemanticsError> {
    require(d, &["yori_measure"], "measure-phrase comparative")?;
    check_units(d, registry)?;
    Ok(compose_sem(d)?.at_issue)
}

/// Differential comparatives (`Jiro yori 5 kg omoi`).
pub fn compose_differential(d: &Derivation, registry: &Registry) -> Result<LambdaTerm, SemanticsError> {
    require(d, &["unit_diff"], "differential comparative")?;
    check_units(d, registry)?;
    Ok(compose_sem(d)?.at_issue)
}

/// Equatives (`to onaji kurai`), presupposing the standard has the property
/// except in the nominal `-no` form.
pub fn compose_equative(d: &Derivation) -> Result<MultiSem, SemanticsError> {
    require(d, &["equative", "equative_nominal"], "equative")?;
    compose_sem(d)
}

/// Clausal comparatives and their phrasal and pronominal variants.
pub fn compose_clausal(d: &Derivation) -> Result<LambdaTerm, SemanticsError> {
    require(d, &["yori_clausal", "yori_pron", "yori_pc"], "clausal comparative")?;
    Ok(compose_sem(d)?.at_issue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse, preprocess, Lexicon};
    use crate::terms::{alpha_eq, parse_term};

    fn top(text: &str) -> Derivation {
        let lex = Lexicon::builtin();
        parse(&preprocess(text, lex).unwrap(), lex).unwrap().remove(0)
    }

    fn assert_alpha(got: &LambdaTerm, want: &str) {
        assert!(alpha_eq(got, &parse_term(want).unwrap()), "got  {got}\nwant {want}");
    }

    #[test]
    fn fragments_compose() {
        let lex = Lexicon::builtin();
        let toks = preprocess("Jiro yori omoi", lex).unwrap();
        let d = crate::grammar::parse_with_beam(&toks, lex, 4);
        // a fragment is not a sentence
        assert!(d.is_err());
        let sem = compose_sem(&top("Taro-wa Jiro yori omoi.")).unwrap();
        assert_alpha(&sem.at_issue, "exists d:degree. and(heavy(taro, d), not(heavy(jiro, d)))");
        assert!(!sem.has_presupposition());
    }

    #[test]
    fn negation_keeps_presupposition() {
        let sem = compose_sem(&top("Taro-wa Jiro izyoo-ni omoi toiu-wake-de-wa-nai.")).unwrap();
        assert_alpha(&sem.at_issue, "not(exists d:degree. and(heavy(taro, d), not(heavy(jiro, d))))");
        assert_alpha(&sem.presupposition, "heavy(jiro, theta(heavy))");
        let twice = sem.negate_at_issue();
        assert_alpha(&twice.at_issue, "not(not(exists d:degree. and(heavy(taro, d), not(heavy(jiro, d)))))");
        let plain = MultiSem::plain(parse_term("p").unwrap()).negate_at_issue();
        assert_eq!(plain.presupposition, LambdaTerm::Truth(true));
        assert_eq!(plain.flatten().unwrap().to_string(), "not(p)");
    }

    #[test]
    fn one_point_rule() {
        let t = parse_term("exists y:entity. and(p(y), eq(a, y), q(y))").unwrap();
        assert_alpha(&one_point(t), "and(p(a), q(a))");
        let t = parse_term("exists y:entity. eq(y, y)").unwrap();
        assert_alpha(&one_point(t.clone()), "exists y:entity. eq(y, y)");
    }

    #[test]
    fn units_checked() {
        let reg = Registry::builtin();
        assert!(compose_measure(&top("Taro-wa 70 kg yori omoi."), reg).is_ok());
        assert!(matches!(
            compose_measure(&top("Taro-wa 70 cm yori omoi."), reg),
            Err(SemanticsError::UnitMismatch { .. })
        ));
        assert!(matches!(
            compose_measure(&top("Taro-wa Jiro yori omoi."), reg),
            Err(SemanticsError::WrongConstruction(_))
        ));
    }
}
