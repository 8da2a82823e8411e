//! Shared by the acceptance runner and the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use degree_nli::formula::{extract_formula, Formula, Linear, Term};
use degree_nli::grammar::Lexicon;
use degree_nli::pipeline::analyze_with;
use degree_nli::prover::{decide_arith, ArithRel, Constraint, Satisfiability};
use degree_nli::terms::{alpha_eq, parse_term, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, RngAlgorithm, TestRng, TestRunner};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn corpus() -> PathBuf {
    data("comparatives_fragment.jsonl")
}

pub struct Golden {
    pub id: String,
    pub sentence: String,
    pub at_issue: String,
    pub presupposition: String,
}

pub fn golden_rows() -> Vec<Golden> {
    std::fs::read_to_string(data("golden_semantics.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 4, "bad golden row: {l}");
            Golden {
                id: cols[0].into(),
                sentence: cols[1].into(),
                at_issue: cols[2].into(),
                presupposition: cols[3].into(),
            }
        })
        .collect()
}

fn same(got: &Formula, want: &str) -> Result<(), String> {
    let want = parse_term(want).and_then(|t| extract_formula(&t)).map_err(|e| format!("golden does not parse: {e}"))?;
    if alpha_eq(&got.to_lambda(), &want.to_lambda()) {
        Ok(())
    } else {
        Err(format!("got {got}, want {want}"))
    }
}

/// Analyses the row's sentence and compares both components up to alpha-equivalence.
pub fn check_golden(row: &Golden) -> Result<(), String> {
    let a = analyze_with(&row.sentence, Lexicon::builtin(), 0).map_err(|e| e.to_string())?;
    same(&a.at_issue, &row.at_issue).map_err(|e| format!("at-issue: {e}"))?;
    same(&a.presupposition, &row.presupposition).map_err(|e| format!("presupposition: {e}"))
}

// ---- arithmetic fuzz -------------------------------------------------------

/// `Σ coeffs[i]·x_i + constant REL 0` with small integers.
#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub rel: ArithRel,
}

pub fn arb_system() -> impl Strategy<Value = (usize, Vec<Row>)> {
    (1usize..=3).prop_flat_map(|vars| {
        let rel = prop_oneof![Just(ArithRel::Lt), Just(ArithRel::Le), Just(ArithRel::Eq)];
        let row = (proptest::collection::vec(-3i64..=3, vars), -4i64..=4, rel)
            .prop_map(|(coeffs, constant, rel)| Row { coeffs, constant, rel });
        (Just(vars), proptest::collection::vec(row, 1..=5))
    })
}

fn atom(i: usize) -> Term {
    Term::constant(["a", "b", "c"][i])
}

pub fn to_constraints(rows: &[Row]) -> Vec<Constraint> {
    rows.iter()
        .map(|r| {
            let mut e = Linear::constant(Rational::from_integer(r.constant));
            for (i, k) in r.coeffs.iter().enumerate() {
                e = e.add(&Linear::atom(atom(i)).scale(Rational::from_integer(*k)));
            }
            Constraint::new(e, r.rel)
        })
        .collect()
}

/// Fourier–Motzkin elimination over the rationals, strictness tracked.
pub fn fm_sat(vars: usize, rows: &[Row]) -> bool {
    // (coefficients, constant, strict) meaning Σ a·x + c < 0 or ≤ 0
    let mut sys: Vec<(Vec<Rational>, Rational, bool)> = Vec::new();
    for r in rows {
        let a: Vec<Rational> = r.coeffs.iter().map(|k| Rational::from_integer(*k)).collect();
        let c = Rational::from_integer(r.constant);
        match r.rel {
            ArithRel::Lt => sys.push((a, c, true)),
            ArithRel::Le => sys.push((a, c, false)),
            ArithRel::Eq => {
                sys.push((a.clone(), c, false));
                sys.push((a.iter().map(|x| -x).collect(), -c, false));
            }
        }
    }
    for v in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in sys {
            if row.0[v].is_positive() {
                pos.push(row)
            } else if row.0[v].is_negative() {
                neg.push(row)
            } else {
                rest.push(row)
            }
        }
        for (pa, pc, ps) in &pos {
            for (na, nc, ns) in &neg {
                let (kp, kn) = (Rational::from_integer(1) / pa[v], Rational::from_integer(1) / -na[v]);
                let a = pa.iter().zip(na).map(|(x, y)| x * kp + y * kn).collect();
                rest.push((a, pc * kp + nc * kn, *ps || *ns));
            }
        }
        sys = rest;
    }
    sys.iter().all(|(_, c, strict)| if *strict { c.is_negative() } else { !c.is_positive() })
}

fn holds(rows: &[Row], x: &[Rational]) -> bool {
    rows.iter().all(|r| {
        let v: Rational =
            r.coeffs.iter().zip(x).map(|(k, x)| Rational::from_integer(*k) * x).sum::<Rational>()
                + Rational::from_integer(r.constant);
        match r.rel {
            ArithRel::Lt => v.is_negative(),
            ArithRel::Le => !v.is_positive(),
            ArithRel::Eq => v.is_zero(),
        }
    })
}

/// Searches a grid for a solution. One variable: step 1/12 over [-6, 6],
/// which contains a solution whenever one exists (interval endpoints are
/// k/q with q ≤ 3 and |k/q| ≤ 4). More variables: a coarser grid, used only
/// in the sound direction (a grid solution forces `Sat`).
pub fn grid_sat(vars: usize, rows: &[Row]) -> bool {
    let (step, span) = if vars == 1 { (12, 6) } else if vars == 2 { (6, 5) } else { (2, 4) };
    let points: Vec<Rational> = (-span * step..=span * step).map(|k| Rational::new(k, step)).collect();
    let mut idx = vec![0usize; vars];
    loop {
        let x: Vec<Rational> = idx.iter().map(|&i| points[i]).collect();
        if holds(rows, &x) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == vars {
                return false;
            }
            idx[k] += 1;
            if idx[k] < points.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Default)]
pub struct FuzzReport {
    pub cases: usize,
    pub sat: usize,
    pub grid_exact: usize,
    pub failures: Vec<String>,
}

/// Deterministic: the same 1,000 systems every run.
pub fn arith_fuzz(cases: u32) -> FuzzReport {
    let config = RunnerConfig { cases, failure_persistence: None, ..RunnerConfig::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let report = std::cell::RefCell::new(FuzzReport::default());
    let _ = runner.run(&arb_system(), |(vars, rows)| {
        let mut r = report.borrow_mut();
        r.cases += 1;
        let got = decide_arith(&to_constraints(&rows)).map(|s| s == Satisfiability::Sat);
        let fm = fm_sat(vars, &rows);
        let grid = grid_sat(vars, &rows);
        let mut problems = Vec::new();
        match got {
            Err(e) => problems.push(format!("error {e}")),
            Ok(got) => {
                r.sat += got as usize;
                if got != fm {
                    problems.push(format!("decide_arith {got}, elimination {fm}"));
                }
                if grid && !got {
                    problems.push("grid point satisfies a system judged unsat".into());
                }
                if vars == 1 {
                    r.grid_exact += 1;
                    if grid != got {
                        problems.push(format!("decide_arith {got}, exact grid {grid}"));
                    }
                }
            }
        }
        if !problems.is_empty() {
            r.failures.push(format!("{rows:?}: {}", problems.join("; ")));
        }
        Ok(())
    });
    report.into_inner()
}
