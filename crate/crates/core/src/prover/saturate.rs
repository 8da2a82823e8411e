//! Given-clause saturation: binary resolution and factoring under a
//! set-of-support restriction, with tautology deletion, subsumption, and
//! simplification of ground arithmetic and identity literals against unit
//! facts.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use crate::formula::Term;

use super::arith::{decide_literals, eliminate_local_vars, entails, Satisfiability};
use super::clause::{Atom, Clause, Literal};
use super::congruence::Congruence;
use super::unify::{is_variant, same_shape, signature, unify_atoms, Frozen, Subst};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inference {
    /// An input clause, tagged with the formula it came from.
    Input { source: String },
    Resolve { left: usize, left_lit: usize, right: usize, right_lit: usize },
    Factor { parent: usize, first: usize, second: usize },
    /// Literals of `parent` refuted by the unit clauses in `facts`.
    Simplify { parent: usize, facts: Vec<usize> },
    /// Variables local to comparisons projected out.
    Eliminate { parent: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub id: usize,
    pub clause: Clause,
    pub inference: Inference,
}

/// Steps in dependency order, ending with the empty clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let how = match &s.inference {
                Inference::Input { source } => format!("input {source}"),
                Inference::Resolve { left, left_lit, right, right_lit } => {
                    format!("resolve {left}.{left_lit} {right}.{right_lit}")
                }
                Inference::Factor { parent, first, second } => format!("factor {parent}.{first}.{second}"),
                Inference::Eliminate { parent } => format!("eliminate {parent}"),
                Inference::Simplify { parent, facts } => {
                    let fs: Vec<String> = facts.iter().map(|f| f.to_string()).collect();
                    format!("simplify {parent} by [{}]", fs.join(", "))
                }
            };
            writeln!(f, "{:>4}. {}  [{how}]", s.id, s.clause)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub time: Duration,
    /// Cap on clauses generated, kept or not.
    pub max_clauses: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { time: Duration::from_secs(20), max_clauses: 200_000 }
    }
}

/// Restrictions keeping saturation finite on the fragment's problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_literals: usize,
    pub max_depth: usize,
    /// Resolve only when one parent has at most one literal besides its
    /// comparisons (unit resolution modulo arithmetic constraints).
    pub unit_only: bool,
    /// Largest sum of absolute coefficients in a predicate argument; keeps
    /// linear unification from building ever larger combinations.
    pub max_argument_mass: usize,
    /// The same for comparisons.
    pub max_comparison_mass: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_literals: 6, max_depth: 4, unit_only: true, max_argument_mass: 2, max_comparison_mass: 4 }
    }
}

/// Sum of absolute coefficients, rounded up; `None` when `unit` is
/// required and some coefficient is not one or minus one.
fn mass(e: &crate::formula::Linear, unit: bool) -> Option<usize> {
    use num_traits::{One, Signed};
    if unit && !e.coeffs.iter().all(|(_, c)| c.abs().is_one()) {
        return None;
    }
    let total: crate::terms::Rational = e.coeffs.iter().map(|(_, c)| c.abs()).sum();
    total.ceil().to_integer().try_into().ok()
}

/// Literals other than comparisons.
fn core_len(c: &Clause) -> usize {
    c.literals.iter().filter(|l| !l.atom.is_arith()).count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Trace),
    /// No more inferences apply (within the limits).
    Saturated,
    /// Time or clause budget ran out.
    Exhausted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub generated: usize,
    pub kept: usize,
    pub given: usize,
    pub elapsed: Duration,
}

/// One input clause; clauses outside the set of support never resolve with
/// each other.
#[derive(Clone, Debug)]
pub struct InputClause {
    pub clause: Clause,
    pub source: String,
    pub support: bool,
}

struct Record {
    clause: Clause,
    inference: Inference,
    signature: u64,
}

struct Saturation {
    records: Vec<Record>,
    passive: BinaryHeap<Reverse<(usize, usize)>>,
    fifo: VecDeque<usize>,
    queued: Vec<bool>,
    active: Vec<usize>,
    arith_facts: Vec<(usize, Literal)>,
    eq_facts: Vec<(usize, Term, Term)>,
    limits: Limits,
    stats: Stats,
    entail_cache: BTreeMap<(Literal, usize), (bool, bool)>,
}

enum Simplified {
    Tautology,
    Clause(usize),
}

/// Picks the oldest clause instead of the lightest one every this many
/// selections.
const AGE_RATIO: usize = 5;

impl Saturation {
    fn push(&mut self, clause: Clause, inference: Inference) -> usize {
        let signature = signature(&clause);
        self.records.push(Record { clause, inference, signature });
        self.queued.push(false);
        self.records.len() - 1
    }

    /// `(refuted, entailed)` for a ground arithmetic literal.
    fn arith_status(&mut self, l: &Literal) -> (bool, bool) {
        let key = (l.clone(), self.arith_facts.len());
        if let Some(&r) = self.entail_cache.get(&key) {
            return r;
        }
        let facts: Vec<Literal> = self.arith_facts.iter().map(|(_, f)| f.clone()).collect();
        let refuted = entails(&facts, &l.negate()).unwrap_or(false);
        let entailed = !refuted && entails(&facts, l).unwrap_or(false);
        self.entail_cache.insert(key, (refuted, entailed));
        (refuted, entailed)
    }

    fn simplify(&mut self, id: usize) -> Simplified {
        let id = match eliminate_local_vars(&self.records[id].clause) {
            Some(c) => self.push(c, Inference::Eliminate { parent: id }),
            None => id,
        };
        let clause = self.records[id].clause.clone();
        if clause.is_tautology() {
            return Simplified::Tautology;
        }
        let cc = Congruence::new(self.eq_facts.iter().map(|(_, a, b)| (a, b)));
        let mut keep = Vec::new();
        let (mut used_arith, mut used_eq) = (false, false);
        for l in &clause.literals {
            match &l.atom {
                Atom::Arith(..) if l.atom.is_ground() && !self.arith_facts.is_empty() => {
                    let (refuted, entailed) = self.arith_status(l);
                    if entailed && !self.arith_facts.iter().any(|(f, _)| *f == id) {
                        return Simplified::Tautology;
                    }
                    if refuted {
                        used_arith = true;
                        continue;
                    }
                }
                Atom::Eq(a, b) if l.atom.is_ground() && !self.eq_facts.is_empty() && cc.equal(a, b) => {
                    if l.positive {
                        return Simplified::Tautology;
                    }
                    used_eq = true;
                    continue;
                }
                _ => {}
            }
            keep.push(l.clone());
        }
        if !used_arith && !used_eq {
            return Simplified::Clause(id);
        }
        let mut facts: Vec<usize> = Vec::new();
        if used_arith {
            facts.extend(self.arith_facts.iter().map(|(f, _)| *f));
        }
        if used_eq {
            facts.extend(self.eq_facts.iter().map(|(f, _, _)| *f));
        }
        Simplified::Clause(self.push(Clause::new(keep), Inference::Simplify { parent: id, facts }))
    }

    fn within_limits(&self, c: &Clause) -> bool {
        c.len() <= self.limits.max_literals
            && c.max_depth() <= self.limits.max_depth
            && c.literals.iter().all(|l| match &l.atom {
                Atom::Arith(_, e) => mass(e, false).is_some_and(|m| m <= self.limits.max_comparison_mass),
                atom => atom.terms().iter().all(|t| match t {
                    Term::Lin(e) => mass(e, true).is_some_and(|m| m <= self.limits.max_argument_mass),
                    _ => true,
                }),
            })
    }

    fn subsumed(&self, c: &Clause, except: Option<usize>) -> bool {
        let frozen = Frozen::new(c);
        let sig = signature(c);
        self.active.iter().any(|&a| {
            let r = &self.records[a];
            Some(a) != except && r.signature & !sig == 0 && frozen.subsumed_by(&r.clause)
        })
    }

    /// Simplifies a fresh clause and queues it. Returns the id of an empty
    /// clause if one appears.
    fn admit(&mut self, id: usize, support: bool) -> Option<usize> {
        let id = match self.simplify(id) {
            Simplified::Tautology => return None,
            Simplified::Clause(id) => id,
        };
        let c = self.records[id].clause.clone();
        if c.is_empty() {
            return Some(id);
        }
        if !self.within_limits(&c) || self.subsumed(&c, None) {
            return None;
        }
        self.stats.kept += 1;
        if support {
            self.passive.push(Reverse((c.weight(), id)));
            self.fifo.push_back(id);
            self.queued[id] = true;
            None
        } else {
            self.activate(id)
        }
    }

    /// Moves a clause into the active set, registering unit facts.
    fn activate(&mut self, id: usize) -> Option<usize> {
        let c = &self.records[id].clause;
        if let [l] = c.literals.as_slice() {
            if l.atom.is_ground() {
                match &l.atom {
                    Atom::Arith(..) => {
                        self.arith_facts.push((id, l.clone()));
                        let facts: Vec<Literal> = self.arith_facts.iter().map(|(_, f)| f.clone()).collect();
                        if decide_literals(&facts).ok() == Some(Satisfiability::Unsat) {
                            let cited = self.arith_facts.iter().map(|(f, _)| *f).filter(|f| *f != id).collect();
                            return Some(self.push(Clause::new(vec![]), Inference::Simplify { parent: id, facts: cited }));
                        }
                    }
                    Atom::Eq(a, b) if l.positive => self.eq_facts.push((id, a.clone(), b.clone())),
                    _ => {}
                }
            }
        }
        self.active.push(id);
        None
    }

    fn next_given(&mut self) -> Option<usize> {
        loop {
            let id = if self.stats.given % AGE_RATIO == AGE_RATIO - 1 {
                self.fifo.pop_front()
            } else {
                self.passive.pop().map(|Reverse((_, id))| id)
            }
            .or_else(|| self.fifo.pop_front())?;
            if std::mem::replace(&mut self.queued[id], false) {
                return Some(id);
            }
        }
    }
}

/// Resolvents of `left` and `right` upon the given literal positions.
pub fn resolvents(left: &Clause, li: usize, right: &Clause, ri: usize) -> Vec<Clause> {
    resolve_apart(&left.rename("L"), li, &right.rename("R"), ri)
}

/// As [`resolvents`], for clauses whose variables are already disjoint.
fn resolve_apart(l: &Clause, li: usize, r: &Clause, ri: usize) -> Vec<Clause> {
    let (a, b) = (&l.literals[li], &r.literals[ri]);
    if a.positive == b.positive {
        return vec![];
    }
    unify_atoms(&a.atom, &b.atom, &Subst::new())
        .into_iter()
        .map(|s| {
            let lits = l
                .literals
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != li)
                .map(|(_, x)| x)
                .chain(r.literals.iter().enumerate().filter(|(i, _)| *i != ri).map(|(_, x)| x))
                .map(|x| s.apply_literal(x))
                .collect();
            Clause::new(lits).without_false().rename("X")
        })
        .collect()
}

/// Factors of `c` merging the two given literals.
pub fn factors(c: &Clause, first: usize, second: usize) -> Vec<Clause> {
    let (a, b) = (&c.literals[first], &c.literals[second]);
    if a.positive != b.positive {
        return vec![];
    }
    unify_atoms(&a.atom, &b.atom, &Subst::new())
        .into_iter()
        .map(|s| s.apply_clause(c).without_false().rename("X"))
        .collect()
}

/// Runs saturation until the empty clause, saturation, or the budget.
pub fn saturate(inputs: &[InputClause], budget: &Budget, limits: Limits) -> (Outcome, Stats) {
    let start = Instant::now();
    let mut st = Saturation {
        records: Vec::new(),
        passive: BinaryHeap::new(),
        fifo: VecDeque::new(),
        queued: Vec::new(),
        active: Vec::new(),
        arith_facts: Vec::new(),
        eq_facts: Vec::new(),
        limits,
        stats: Stats::default(),
        entail_cache: BTreeMap::new(),
    };
    let finish = |st: Saturation, outcome: Option<usize>, start: Instant| {
        let mut stats = st.stats;
        stats.elapsed = start.elapsed();
        match outcome {
            Some(empty) => (Outcome::Proved(extract(&st.records, empty)), stats),
            None => (Outcome::Saturated, stats),
        }
    };
    // Background clauses first, so their facts are in place.
    let mut ordered: Vec<&InputClause> = inputs.iter().filter(|i| !i.support).collect();
    ordered.extend(inputs.iter().filter(|i| i.support));
    for inp in ordered {
        let id = st.push(inp.clause.clone(), Inference::Input { source: inp.source.clone() });
        if let Some(empty) = st.admit(id, inp.support) {
            return finish(st, Some(empty), start);
        }
    }
    while let Some(given) = st.next_given() {
        if start.elapsed() > budget.time || st.stats.generated > budget.max_clauses {
            let mut stats = st.stats;
            stats.elapsed = start.elapsed();
            return (Outcome::Exhausted, stats);
        }
        st.stats.given += 1;
        // Facts may have grown since the clause was queued.
        let given = match st.simplify(given) {
            Simplified::Tautology => continue,
            Simplified::Clause(id) => id,
        };
        let gc = st.records[given].clause.clone();
        if gc.is_empty() {
            return finish(st, Some(given), start);
        }
        if st.subsumed(&gc, Some(given)) {
            continue;
        }
        if let Some(empty) = st.activate(given) {
            return finish(st, Some(empty), start);
        }
        let mut fresh: Vec<(Clause, Inference)> = Vec::new();
        let g_apart = gc.rename("L");
        for &other in &st.active {
            let oc = &st.records[other].clause;
            if st.limits.unit_only && core_len(&gc) > 1 && core_len(oc) > 1 {
                continue;
            }
            let o_apart = oc.rename("R");
            for li in 0..gc.len() {
                for ri in 0..oc.len() {
                    if !same_shape(&gc.literals[li], &oc.literals[ri].negate()) {
                        continue;
                    }
                    for r in resolve_apart(&g_apart, li, &o_apart, ri) {
                        fresh.push((r, Inference::Resolve { left: given, left_lit: li, right: other, right_lit: ri }));
                    }
                }
            }
        }
        for i in 0..gc.len() {
            for j in i + 1..gc.len() {
                for f in factors(&gc, i, j) {
                    fresh.push((f, Inference::Factor { parent: given, first: i, second: j }));
                }
            }
        }
        for (c, inf) in fresh {
            st.stats.generated += 1;
            let id = st.push(c, inf);
            if let Some(empty) = st.admit(id, true) {
                return finish(st, Some(empty), start);
            }
        }
    }
    finish(st, None, start)
}

fn extract(records: &[Record], empty: usize) -> Trace {
    let mut needed = vec![false; records.len()];
    let mut stack = vec![empty];
    while let Some(id) = stack.pop() {
        if std::mem::replace(&mut needed[id], true) {
            continue;
        }
        match &records[id].inference {
            Inference::Input { .. } => {}
            Inference::Resolve { left, right, .. } => stack.extend([*left, *right]),
            Inference::Factor { parent, .. } | Inference::Eliminate { parent } => stack.push(*parent),
            Inference::Simplify { parent, facts } => {
                stack.push(*parent);
                stack.extend(facts);
            }
        }
    }
    let steps = (0..records.len())
        .filter(|&i| needed[i])
        .map(|i| Step { id: i, clause: records[i].clause.clone(), inference: records[i].inference.clone() })
        .collect();
    Trace { steps }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {message}")]
pub struct ReplayError {
    pub step: usize,
    pub message: String,
}

/// Re-checks every step of a trace independently of the search that
/// produced it. Input steps must be variants of `inputs`.
pub fn replay(trace: &Trace, inputs: &[Clause]) -> Result<(), ReplayError> {
    let mut seen: BTreeMap<usize, &Clause> = BTreeMap::new();
    let fail = |step: usize, message: String| Err(ReplayError { step, message });
    for s in &trace.steps {
        let parent = |id: &usize| seen.get(id).copied().ok_or_else(|| ReplayError { step: s.id, message: format!("unknown parent {id}") });
        match &s.inference {
            Inference::Input { .. } => {
                if !inputs.iter().any(|i| is_variant(i, &s.clause)) {
                    return fail(s.id, "input clause not among the problem's clauses".into());
                }
            }
            Inference::Resolve { left, left_lit, right, right_lit } => {
                let (l, r) = (parent(left)?, parent(right)?);
                if *left_lit >= l.len() || *right_lit >= r.len() {
                    return fail(s.id, "literal index out of range".into());
                }
                if !resolvents(l, *left_lit, r, *right_lit).iter().any(|c| is_variant(c, &s.clause)) {
                    return fail(s.id, "resolvent does not match".into());
                }
            }
            Inference::Factor { parent: p, first, second } => {
                let c = parent(p)?;
                if *first >= c.len() || *second >= c.len() {
                    return fail(s.id, "literal index out of range".into());
                }
                if !factors(c, *first, *second).iter().any(|f| is_variant(f, &s.clause)) {
                    return fail(s.id, "factor does not match".into());
                }
            }
            Inference::Eliminate { parent: p } => {
                let c = parent(p)?;
                if !eliminate_local_vars(c).is_some_and(|e| is_variant(&e, &s.clause)) {
                    return fail(s.id, "projection does not match".into());
                }
            }
            Inference::Simplify { parent: p, facts } => {
                let c = parent(p)?;
                let mut arith = Vec::new();
                let mut eqs = Vec::new();
                for f in facts {
                    match parent(f)?.literals.as_slice() {
                        [l] if l.atom.is_arith() && l.atom.is_ground() => arith.push(l.clone()),
                        [l] if l.positive && l.atom.is_ground() => match &l.atom {
                            Atom::Eq(a, b) => eqs.push((a.clone(), b.clone())),
                            _ => return fail(s.id, format!("fact {f} is not an identity or comparison")),
                        },
                        _ => return fail(s.id, format!("fact {f} is not a ground unit")),
                    }
                }
                let cc = Congruence::new(eqs.iter().map(|(a, b)| (a, b)));
                for l in &s.clause.literals {
                    if !c.literals.contains(l) {
                        return fail(s.id, format!("literal {l} not in parent"));
                    }
                }
                for l in c.literals.iter().filter(|l| !s.clause.literals.contains(l)) {
                    let refuted = match &l.atom {
                        _ if l.eval_trivial() == Some(false) => true,
                        Atom::Arith(..) => entails(&arith, &l.negate()).unwrap_or(false),
                        Atom::Eq(a, b) => !l.positive && cc.equal(a, b),
                        _ => false,
                    };
                    if !refuted {
                        return fail(s.id, format!("removed literal {l} is not refuted"));
                    }
                }
            }
        }
        seen.insert(s.id, &s.clause);
    }
    match trace.steps.last() {
        Some(s) if s.clause.is_empty() => Ok(()),
        _ => fail(trace.steps.last().map_or(0, |s| s.id), "trace does not end in the empty clause".into()),
    }
}
