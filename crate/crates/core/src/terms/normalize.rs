use std::collections::BTreeSet;

use num_traits::Zero;

use super::{fresh_name, Connective, LambdaTerm, TermError};
use LambdaTerm::*;

pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// Reduction order. Both reach the same normal form on terminating terms;
/// the second exists so the two can be compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Leftmost-outermost.
    #[default]
    NormalOrder,
    /// Rightmost-innermost: arguments before functions, inside out.
    Applicative,
}

/// Beta-normal form with arithmetic offsets folded, nested conjunctions and
/// disjunctions flattened, and bound names made unique.
pub fn beta_normalize(term: &LambdaTerm) -> Result<LambdaTerm, TermError> {
    beta_normalize_with(term, Strategy::NormalOrder, DEFAULT_STEP_BUDGET)
}

pub fn beta_normalize_with(
    term: &LambdaTerm,
    strategy: Strategy,
    budget: usize,
) -> Result<LambdaTerm, TermError> {
    let mut fuel = Fuel { left: budget, budget };
    let nf = match strategy {
        Strategy::NormalOrder => normal_order(term.clone(), &mut fuel)?,
        Strategy::Applicative => applicative(term.clone(), &mut fuel)?,
    };
    Ok(rename_bound_unique(&fold_arith(nf)))
}

struct Fuel {
    left: usize,
    budget: usize,
}

impl Fuel {
    fn burn(&mut self) -> Result<(), TermError> {
        if self.left == 0 {
            return Err(TermError::NonTerminating(self.budget));
        }
        self.left -= 1;
        Ok(())
    }
}

fn whnf(term: LambdaTerm, fuel: &mut Fuel) -> Result<LambdaTerm, TermError> {
    match term {
        App(f, a) => match whnf(*f, fuel)? {
            Lam(x, body) => {
                fuel.burn()?;
                whnf(body.substitute(&x, &a), fuel)
            }
            f => Ok(App(Box::new(f), a)),
        },
        t => Ok(t),
    }
}

fn normal_order(term: LambdaTerm, fuel: &mut Fuel) -> Result<LambdaTerm, TermError> {
    match term {
        App(f, a) => match whnf(*f, fuel)? {
            Lam(x, body) => {
                fuel.burn()?;
                normal_order(body.substitute(&x, &a), fuel)
            }
            f => {
                let f = normal_order(f, fuel)?;
                let a = normal_order(*a, fuel)?;
                Ok(App(Box::new(f), Box::new(a)))
            }
        },
        t => {
            let mut err = None;
            let out = t.map_children(|c| match normal_order(c, fuel) {
                Ok(c) => c,
                Err(e) => {
                    err.get_or_insert(e);
                    Truth(false)
                }
            });
            err.map_or(Ok(out), Err)
        }
    }
}

fn applicative(term: LambdaTerm, fuel: &mut Fuel) -> Result<LambdaTerm, TermError> {
    match term {
        App(f, a) => {
            let a = applicative(*a, fuel)?;
            let f = applicative(*f, fuel)?;
            match f {
                Lam(x, body) => {
                    fuel.burn()?;
                    applicative(body.substitute(&x, &a), fuel)
                }
                f => Ok(App(Box::new(f), Box::new(a))),
            }
        }
        t => {
            // children right to left
            let mut err = None;
            let mut children = Vec::new();
            t.for_each_child(|c| children.push(c.clone()));
            let mut done: Vec<Option<LambdaTerm>> = vec![None; children.len()];
            for (i, c) in children.into_iter().enumerate().rev() {
                match applicative(c, fuel) {
                    Ok(c) => done[i] = Some(c),
                    Err(e) => {
                        err.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = err {
                return Err(e);
            }
            let mut it = done.into_iter().map(Option::unwrap);
            Ok(t.map_children(|_| it.next().unwrap()))
        }
    }
}

/// Folds numeral arithmetic into `plus(base, offset)` form and flattens
/// nested `and`/`or`.
pub fn fold_arith(term: LambdaTerm) -> LambdaTerm {
    let term = term.map_children(fold_arith);
    match term {
        Neg(inner) => match *inner {
            Num(q) => Num(-q),
            Neg(x) => *x,
            Plus(x, n) if matches!(*n, Num(_)) => {
                let Num(q) = *n else { unreachable!() };
                fold_arith(Plus(Box::new(Neg(x)), Box::new(Num(-q))))
            }
            other => Neg(Box::new(other)),
        },
        Plus(a, b) => match (*a, *b) {
            (Num(x), Num(y)) => Num(x + y),
            (x, Num(q)) if q.is_zero() => x,
            (Num(q), x) if q.is_zero() => x,
            (Num(q), x) => fold_arith(Plus(Box::new(x), Box::new(Num(q)))),
            (Plus(x, n), Num(q)) if matches!(*n, Num(_)) => {
                let Num(p) = *n else { unreachable!() };
                fold_arith(Plus(x, Box::new(Num(p + q))))
            }
            (a, b) => Plus(Box::new(a), Box::new(b)),
        },
        Conn(c @ (Connective::And | Connective::Or), args) => {
            let mut flat = Vec::with_capacity(args.len());
            for a in args {
                match a {
                    Conn(c2, inner) if c2 == c => flat.extend(inner),
                    a => flat.push(a),
                }
            }
            Conn(c, flat)
        }
        t => t,
    }
}

/// Renames binders so that no two binders share a name and no binder
/// shadows a free variable.
pub fn rename_bound_unique(term: &LambdaTerm) -> LambdaTerm {
    let mut used = term.free_vars();
    rename_walk(term, &mut used)
}

fn rename_walk(term: &LambdaTerm, used: &mut BTreeSet<String>) -> LambdaTerm {
    match term {
        Lam(x, body) | Quant(_, x, _, body) => {
            let (name, body) = if used.contains(x) {
                let mut avoid = used.clone();
                body.all_names(&mut avoid);
                let fresh = fresh_name(x, &avoid);
                let b = body.substitute(x, &Var(fresh.clone()));
                (fresh, b)
            } else {
                (x.clone(), body.as_ref().clone())
            };
            used.insert(name.clone());
            let body = Box::new(rename_walk(&body, used));
            match term {
                Lam(..) => Lam(name, body),
                Quant(q, _, s, _) => Quant(*q, name, *s, body),
                _ => unreachable!(),
            }
        }
        t => t.clone().map_children(|c| rename_walk(&c, used)),
    }
}

/// Equality up to consistent renaming of bound variables. Constant kinds
/// are ignored.
pub fn alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    alpha_walk(a, b, &mut Vec::new(), &mut Vec::new())
}

fn alpha_walk<'a>(
    a: &'a LambdaTerm,
    b: &'a LambdaTerm,
    env_a: &mut Vec<&'a str>,
    env_b: &mut Vec<&'a str>,
) -> bool {
    match (a, b) {
        (Var(x), Var(y)) => {
            let ix = env_a.iter().rposition(|n| *n == x);
            let iy = env_b.iter().rposition(|n| *n == y);
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Const(x, _), Const(y, _)) => x == y,
        (Num(x), Num(y)) => x == y,
        (Truth(x), Truth(y)) => x == y,
        (Lam(x, ba), Lam(y, bb)) => under_binder(x, y, ba, bb, env_a, env_b),
        (Quant(qa, x, sa, ba), Quant(qb, y, sb, bb)) => {
            qa == qb && sa == sb && under_binder(x, y, ba, bb, env_a, env_b)
        }
        (App(f, x), App(g, y))
        | (Eq(f, x), Eq(g, y))
        | (Plus(f, x), Plus(g, y))
        | (Pair(f, x), Pair(g, y)) => {
            alpha_walk(f, g, env_a, env_b) && alpha_walk(x, y, env_a, env_b)
        }
        (Arith(o1, f, x), Arith(o2, g, y)) => {
            o1 == o2 && alpha_walk(f, g, env_a, env_b) && alpha_walk(x, y, env_a, env_b)
        }
        (Neg(x), Neg(y)) | (Theta(x), Theta(y)) | (Delta(x), Delta(y)) => {
            alpha_walk(x, y, env_a, env_b)
        }
        (Conn(c1, xs), Conn(c2, ys)) => {
            c1 == c2
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| alpha_walk(x, y, env_a, env_b))
        }
        _ => false,
    }
}

fn under_binder<'a>(
    x: &'a str,
    y: &'a str,
    ba: &'a LambdaTerm,
    bb: &'a LambdaTerm,
    env_a: &mut Vec<&'a str>,
    env_b: &mut Vec<&'a str>,
) -> bool {
    env_a.push(x);
    env_b.push(y);
    let r = alpha_walk(ba, bb, env_a, env_b);
    env_a.pop();
    env_b.pop();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_term;

    fn nf(s: &str) -> LambdaTerm {
        beta_normalize(&parse_term(s).unwrap()).unwrap()
    }

    fn t(s: &str) -> LambdaTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn identity_application() {
        assert!(alpha_eq(&nf(r"(\x. x)(heavy)"), &t("heavy")));
    }

    #[test]
    fn cmp_operator_over_adjective() {
        // the empty comparative operator composed with a two-argument
        // adjective meaning yields the threshold reading
        let cmp = r"\S. S(\A x. A(x, theta(A)))";
        let omoi = r"\Q N. Q(\x. N(heavy, x))";
        let composed = format!(r"\Q. ({cmp})(({omoi})(Q))");
        assert!(alpha_eq(&nf(&composed), &t(r"\Q. Q(\x. heavy(x, theta(heavy)))")));
    }

    #[test]
    fn differential_offset_is_folded() {
        let out = nf(r"(\d. plus(d, 5))(d0)");
        assert!(alpha_eq(&out, &t("plus(d0, 5)")));
        let neg = nf(r"(\s. \d. plus(d, s(5)))(\d. neg(d))(d0)");
        assert!(alpha_eq(&neg, &t("plus(d0, -5)")));
        assert!(alpha_eq(&nf("plus(plus(d, 3), -3)"), &t("d")));
    }

    #[test]
    fn conjunctions_flatten() {
        assert!(alpha_eq(&nf("and(p, and(q, r))"), &t("and(p, q, r)")));
    }

    #[test]
    fn omega_runs_out_of_fuel() {
        let omega = t(r"(\x. x(x))(\x. x(x))");
        let err = beta_normalize_with(&omega, Strategy::NormalOrder, 100).unwrap_err();
        assert_eq!(err, TermError::NonTerminating(100));
    }

    #[test]
    fn normal_order_skips_divergent_argument() {
        let t0 = t(r"(\x. c)((\x. x(x))(\x. x(x)))");
        assert!(alpha_eq(&beta_normalize(&t0).unwrap(), &t("c")));
    }

    #[test]
    fn alpha_eq_basics() {
        assert!(alpha_eq(&t(r"\x. heavy(x, theta(heavy))"), &t(r"\y. heavy(y, theta(heavy))")));
        assert!(!alpha_eq(&t("heavy(taro, theta(heavy))"), &t("heavy(jiro, theta(heavy))")));
        assert!(!alpha_eq(&t(r"\x. \y. f(x)"), &t(r"\x. \y. f(y)")));
        assert!(!alpha_eq(&t(r"\x. y"), &t(r"\y. y")));
    }

    #[test]
    fn bound_names_become_unique() {
        let out = nf(r"and(exists d:degree. p(d), exists d:degree. q(d))");
        let mut names = Vec::new();
        fn binders(t: &LambdaTerm, out: &mut Vec<String>) {
            if let Quant(_, x, _, _) | Lam(x, _) = t {
                out.push(x.clone());
            }
            t.for_each_child(|c| binders(c, out));
        }
        binders(&out, &mut names);
        assert_eq!(names.len(), 2);
        assert_ne!(names[0], names[1]);
    }
}
