//! Lexical semantic templates.
//!
//! Every template abstracts over `E`, the lemma of the word it is
//! instantiated for. Adjectives follow a five-argument protocol for the
//! function `N` they hand to degree morphology:
//!
//! ```text
//! N(A, D, P, T, x)
//!   A  the adjective lemma
//!   D  differential transform on degrees   (\d. d by default)
//!   P  polarity scale                      (\d. d positive, \d. neg(d) negative)
//!   T  polarity truth transform            (\t. t positive, \t. not(t) negative)
//!   x  the subject
//! ```
//!
//! Noun phrases are generalized quantifiers `\N F. ...` whose first argument
//! is a noun modifier (`\I. I` when unmodified).

use crate::grammar::{is_numeral, LexEntry};
use crate::terms::{beta_normalize, parse_term, ConstKind, LambdaTerm, Rational};

use super::SemanticsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Plain,
    /// Produces a `pair(at_issue, presupposition)`.
    Presupposing,
}

pub struct Template {
    pub id: &'static str,
    pub source: &'static str,
    pub dimension: Dimension,
}

const fn plain(id: &'static str, source: &'static str) -> Template {
    Template { id, source, dimension: Dimension::Plain }
}

const fn presup(id: &'static str, source: &'static str) -> Template {
    Template { id, source, dimension: Dimension::Presupposing }
}

pub const TEMPLATES: &[Template] = &[
    plain("identity", r"\E X. X"),
    plain("period", r"\E S. S"),
    plain("neg", r"\E S. not(S)"),
    plain("name", r"\E N F. F(E)"),
    plain("noun", r"\E N F. exists x:entity. and(N(E, x), F(x))"),
    plain("noun_pred", r"\E x. E(x)"),
    plain("det_all", r"\E P N F. forall x:entity. imp(P(x), F(x))"),
    plain("det_dem", r"\E Q. Q"),
    plain("numeral", r"\E. E"),
    plain("copula_pred", r"\E P Q. Q(\I. I, \x. P(x))"),
    plain("ga", r"\E Q V. V(Q)"),
    plain("no_pron", r"\E C N F. C(\N2 G. exists y:entity. and(G(y), F(y)))"),
    plain(
        "verb_tr",
        r"\E O Q. Q(\I. I, \x. O(\I. I, \z. exists e:event. and(E(e), eq(Nom(e), x), eq(Acc(e), z))))",
    ),
    plain("verb_intr", r"\E Q. Q(\I. I, \x. exists e:event. and(E(e), eq(Nom(e), x)))"),
    plain("unit_measure", r"\E n N F. F(n)"),
    plain(
        "unit_diff",
        r"\E n V Q N. V(Q, \A D P T x. N(A, \d. plus(D(d), P(n)), P, T, x))",
    ),
    plain("adj_pos", r"\E Q N. Q(\I. I, \x. N(E, \d. d, \d. d, \t. t, x))"),
    plain("adj_neg", r"\E Q N. Q(\I. I, \x. N(E, \d. d, \d. neg(d), \t. not(t), x))"),
    plain("adj_attr", r"\E O R N F. O(\E2 z. and(N(E2, z), R(E, z)), F)"),
    plain("cmp", r"\E S. S(\A D P T x. A(x, theta(A)))"),
    plain(
        "yori",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y. exists d:degree. and(A(x, d), not(A(y, d)))))",
    ),
    plain(
        "yori_diff",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y. forall d:degree. imp(A(y, d), A(x, D(d)))))",
    ),
    plain(
        "yori_measure",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y. exists d:degree. and(A(x, d), T(gt(d, y)))))",
    ),
    plain(
        "yori_clausal",
        r"\E C M V Q. exists d:degree. and(V(M(\A x. A(x, d)), Q), not(C(M(\A x. A(x, d)))))",
    ),
    plain(
        "yori_pron",
        r"\E Qs M V Q. exists d:degree. and(V(M(\A x. A(x, d)), Q),
            not(M(\A x. A(x, d), \I. I, \z. Qs(\I. I, \y. eq(z, y)))))",
    ),
    plain(
        "yori_pc",
        r"\E Qs M V Q. exists d:degree. and(V(M(\A x. A(x, d)), Q), not(V(M(\A x. A(x, d)), Qs)))",
    ),
    presup(
        "izyoo_ni",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y.
            pair(exists d:degree. and(A(x, d), not(A(y, d))), A(y, theta(A)))))",
    ),
    presup(
        "equative",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y. pair(
            forall d1:degree. forall d2:degree.
              imp(and(not(iff(A(x, d1), A(y, d1))), not(iff(A(x, d2), A(y, d2)))),
                  and(lt(plus(d1, neg(d2)), delta(A)), lt(plus(d2, neg(d1)), delta(A)))),
            A(y, theta(A)))))",
    ),
    plain(
        "equative_nominal",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y.
            forall d1:degree. forall d2:degree.
              imp(and(not(iff(A(x, d1), A(y, d1))), not(iff(A(x, d2), A(y, d2)))),
                  and(lt(plus(d1, neg(d2)), delta(A)), lt(plus(d2, neg(d1)), delta(A))))))",
    ),
    presup(
        "hodo",
        r"\E Q V. V(\A D P T x. Q(\I. I, \y.
            pair(forall d:degree. imp(A(y, d), A(x, d)), A(y, theta(A)))))",
    ),
];

pub fn template(id: &str) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.id == id)
}

/// The lemma as a term: numerals become numbers, everything else a constant.
fn lemma_term(lemma: &str) -> LambdaTerm {
    if is_numeral(lemma) {
        let value = match lemma.split_once('/') {
            Some((n, d)) => Rational::new(n.parse().unwrap_or(0), d.parse().unwrap_or(1)),
            None => Rational::from_integer(lemma.parse().unwrap_or(0)),
        };
        LambdaTerm::Num(value)
    } else {
        LambdaTerm::constant(lemma, ConstKind::Predicate)
    }
}

/// The entry's template applied to its lemma, in normal form.
pub fn instantiate_template(entry: &LexEntry) -> Result<LambdaTerm, SemanticsError> {
    let t = template(&entry.template_id).ok_or_else(|| SemanticsError::UnknownTemplate(entry.template_id.clone()))?;
    let body = parse_term(t.source).map_err(SemanticsError::Term)?;
    beta_normalize(&LambdaTerm::app(body, lemma_term(&entry.lemma))).map_err(SemanticsError::Term)
}
