//! Property tests against small independent models: de Bruijn substitution,
//! strategy-independent normal forms, the combinatory rule schemata, and the
//! arithmetic decision procedure.

mod common;

use degree_nli::grammar::{apply_rule, Category, Dir, RuleId};
use degree_nli::terms::{alpha_eq, beta_normalize_with, ConstKind, LambdaTerm, Strategy as Reduction};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["x", "y", "z"];

fn arb_lambda() -> impl Strategy<Value = LambdaTerm> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(|i| LambdaTerm::var(NAMES[i])),
        (0..2usize).prop_map(|i| LambdaTerm::constant(["c", "p"][i], ConstKind::Predicate)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            ((0..3usize), inner.clone()).prop_map(|(i, b)| LambdaTerm::lam(NAMES[i], b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| LambdaTerm::app(f, a)),
            inner.prop_map(LambdaTerm::not),
        ]
    })
}

/// Nameless form: free variables keep their names, bound ones become indices.
#[derive(Debug, PartialEq)]
enum Db {
    Free(String),
    Bound(usize),
    Const(String),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
    Not(Box<Db>),
}

fn db(t: &LambdaTerm, scope: &mut Vec<String>) -> Db {
    match t {
        LambdaTerm::Var(x) => match scope.iter().rev().position(|s| s == x) {
            Some(i) => Db::Bound(i),
            None => Db::Free(x.clone()),
        },
        LambdaTerm::Const(c, _) => Db::Const(c.clone()),
        LambdaTerm::Lam(x, body) => {
            scope.push(x.clone());
            let b = db(body, scope);
            scope.pop();
            Db::Lam(Box::new(b))
        }
        LambdaTerm::App(f, a) => Db::App(Box::new(db(f, scope)), Box::new(db(a, scope))),
        LambdaTerm::Conn(_, args) if args.len() == 1 => Db::Not(Box::new(db(&args[0], scope))),
        other => panic!("generator does not produce {other:?}"),
    }
}

/// Replacing a free name needs no shifting: `v` has no dangling indices.
fn db_subst(t: &Db, name: &str, v: &LambdaTerm) -> Db {
    match t {
        Db::Free(x) if x == name => db(v, &mut Vec::new()),
        Db::Free(x) => Db::Free(x.clone()),
        Db::Bound(i) => Db::Bound(*i),
        Db::Const(c) => Db::Const(c.clone()),
        Db::Lam(b) => Db::Lam(Box::new(db_subst(b, name, v))),
        Db::App(f, a) => Db::App(Box::new(db_subst(f, name, v)), Box::new(db_subst(a, name, v))),
        Db::Not(b) => Db::Not(Box::new(db_subst(b, name, v))),
    }
}

fn arb_category() -> impl Strategy<Value = Category> {
    let atom = prop_oneof![Just("S"), Just("NP"), Just("N")].prop_map(Category::atom);
    atom.prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), inner, any::<bool>()).prop_map(|(r, a, fwd)| {
            Category::slash(if fwd { Dir::Forward } else { Dir::Backward }, r, a)
        })
    })
}

/// The six schemata read off directly, with plain structural equality.
fn schema(rule: RuleId, left: &Category, right: &Category) -> Option<Category> {
    use Category::Slash;
    use Dir::{Backward as B, Forward as F};
    match (rule, left, right) {
        (RuleId::Fa, Slash { dir: F, result, arg }, y) if **arg == *y => Some((**result).clone()),
        (RuleId::Ba, y, Slash { dir: B, result, arg }) if **arg == *y => Some((**result).clone()),
        (RuleId::Fc, Slash { dir: F, result: x, arg: y }, Slash { dir: F, result: y2, arg: z }) if y == y2 => {
            Some(Category::fwd((**x).clone(), (**z).clone()))
        }
        (RuleId::Bc, Slash { dir: B, result: y2, arg: z }, Slash { dir: B, result: x, arg: y }) if y == y2 => {
            Some(Category::bwd((**x).clone(), (**z).clone()))
        }
        (RuleId::FcX, Slash { dir: F, result: x, arg: y }, Slash { dir: B, result: y2, arg: z }) if y == y2 => {
            Some(Category::bwd((**x).clone(), (**z).clone()))
        }
        (RuleId::BcX, Slash { dir: F, result: y2, arg: z }, Slash { dir: B, result: x, arg: y }) if y == y2 => {
            Some(Category::fwd((**x).clone(), (**z).clone()))
        }
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn substitution_matches_nameless_model(t in arb_lambda(), v in arb_lambda(), i in 0..3usize) {
        let x = NAMES[i];
        let got = db(&t.substitute(x, &v), &mut Vec::new());
        let want = db_subst(&db(&t, &mut Vec::new()), x, &v);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn strategies_reach_one_normal_form(t in arb_lambda()) {
        let normal = beta_normalize_with(&t, Reduction::NormalOrder, 2_000);
        let applicative = beta_normalize_with(&t, Reduction::Applicative, 2_000);
        if let (Ok(a), Ok(b)) = (&normal, &applicative) {
            prop_assert!(alpha_eq(a, b), "{} vs {}", a, b);
        }
        // leftmost-outermost finds a normal form whenever one exists
        if applicative.is_ok() {
            prop_assert!(normal.is_ok());
        }
    }

    #[test]
    fn rules_match_schemata(l in arb_category(), r in arb_category()) {
        for rule in RuleId::ALL {
            prop_assert_eq!(apply_rule(rule, &l, &r), schema(rule, &l, &r), "{} on {} {}", rule, l, r);
        }
    }
}

#[test]
fn arithmetic_fuzz_agrees_with_elimination_and_grid() {
    let report = common::arith_fuzz(1000);
    assert_eq!(report.cases, 1000);
    assert!(report.failures.is_empty(), "{:#?}", report.failures);
    // both outcomes are exercised
    assert!(report.sat > 100 && report.sat < 900, "{}", report.sat);
}

#[test]
fn golden_formulas() {
    for row in common::golden_rows() {
        common::check_golden(&row).unwrap_or_else(|e| panic!("{}: {e}", row.id));
    }
}
