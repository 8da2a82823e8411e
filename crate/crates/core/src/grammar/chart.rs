use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::category::Category;
use super::lexicon::{LexEntry, Lexicon};
use super::rules::{apply_rule, RuleId};
use super::tokens::Token;
use super::GrammarError;

/// Derivations kept per chart cell and category.
pub const DEFAULT_BEAM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    Leaf { entry: LexEntry, span: (usize, usize) },
    Node { rule: RuleId, category: Category, left: Arc<Derivation>, right: Arc<Derivation> },
}

impl Derivation {
    pub fn category(&self) -> &Category {
        match self {
            Derivation::Leaf { entry, .. } => &entry.category,
            Derivation::Node { category, .. } => category,
        }
    }

    pub fn span(&self) -> (usize, usize) {
        match self {
            Derivation::Leaf { span, .. } => *span,
            Derivation::Node { left, right, .. } => (left.span().0, right.span().1),
        }
    }

    /// Sum of rule costs; lower ranks first.
    pub fn cost(&self) -> u32 {
        match self {
            Derivation::Leaf { .. } => 0,
            Derivation::Node { rule, left, right, .. } => rule.cost() + left.cost() + right.cost(),
        }
    }

    pub fn leaves(&self) -> Vec<&LexEntry> {
        match self {
            Derivation::Leaf { entry, .. } => vec![entry],
            Derivation::Node { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    /// Recomputes every node category and checks that leaf spans tile `0..n`.
    pub fn recheck(&self, n: usize) -> bool {
        fn walk(d: &Derivation, next: &mut usize) -> bool {
            match d {
                Derivation::Leaf { span, .. } => {
                    let ok = span.0 == *next && span.1 == *next + 1;
                    *next = span.1;
                    ok
                }
                Derivation::Node { rule, category, left, right } => {
                    walk(left, next)
                        && walk(right, next)
                        && apply_rule(*rule, left.category(), right.category()).as_ref() == Some(category)
                }
            }
        }
        let mut next = 0;
        walk(self, &mut next) && next == n
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Leaf { entry, .. } => {
                writeln!(f, "{pad}{}  {}  [{}:{}]", entry.category, entry.surface, entry.template_id, entry.lemma)
            }
            Derivation::Node { rule, category, left, right } => {
                writeln!(f, "{pad}{category}  ({rule})")?;
                left.write_indented(f, depth + 1)?;
                right.write_indented(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

type Cell = BTreeMap<Category, Vec<Arc<Derivation>>>;

/// CKY over all lexical entries and the six rules. Returns every complete
/// derivation of category `S`, cheapest first; ties keep chart order, which
/// is deterministic.
pub fn parse(tokens: &[Token], lex: &Lexicon) -> Result<Vec<Derivation>, GrammarError> {
    parse_with_beam(tokens, lex, DEFAULT_BEAM)
}

pub fn parse_with_beam(tokens: &[Token], lex: &Lexicon, beam: usize) -> Result<Vec<Derivation>, GrammarError> {
    let n = tokens.len();
    if n == 0 {
        return Err(GrammarError::NoParse { partial: Vec::new() });
    }
    // chart[i][len - 1] covers tokens i..i+len
    let mut chart: Vec<Vec<Cell>> = vec![vec![Cell::new(); n]; n];
    for (i, tok) in tokens.iter().enumerate() {
        let entries = lex.lookup(&tok.surface, tok.tag.as_deref());
        if entries.is_empty() {
            return Err(GrammarError::NoEntry(tok.to_string()));
        }
        for entry in entries {
            let leaf = Arc::new(Derivation::Leaf { entry, span: (i, i + 1) });
            push(&mut chart[i][0], leaf, beam);
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut cell = Cell::new();
            for split in 1..len {
                let (left_cell, right_cell) = (&chart[i][split - 1], &chart[i + split][len - split - 1]);
                for (lcat, lds) in left_cell {
                    for (rcat, rds) in right_cell {
                        for rule in RuleId::ALL {
                            let Some(category) = apply_rule(rule, lcat, rcat) else { continue };
                            for l in lds {
                                for r in rds {
                                    let node = Derivation::Node {
                                        rule,
                                        category: category.clone(),
                                        left: Arc::clone(l),
                                        right: Arc::clone(r),
                                    };
                                    push(&mut cell, Arc::new(node), beam);
                                }
                            }
                        }
                    }
                }
            }
            chart[i][len - 1] = cell;
        }
    }
    let mut complete: Vec<Derivation> = chart[0][n - 1]
        .iter()
        .filter(|(c, _)| c.is_sentence())
        .flat_map(|(_, ds)| ds.iter().map(|d| (**d).clone()))
        .collect();
    complete.sort_by_key(Derivation::cost);
    if complete.is_empty() {
        return Err(GrammarError::NoParse { partial: best_partial(&chart, tokens) });
    }
    Ok(complete)
}

fn push(cell: &mut Cell, d: Arc<Derivation>, beam: usize) {
    let slot = cell.entry(d.category().clone()).or_default();
    let cost = d.cost();
    let at = slot.partition_point(|x| x.cost() <= cost);
    if at < beam {
        slot.insert(at, d);
        slot.truncate(beam);
    }
}

/// Widest analysed spans, for diagnostics.
fn best_partial(chart: &[Vec<Cell>], tokens: &[Token]) -> Vec<String> {
    let n = tokens.len();
    for len in (1..=n).rev() {
        let spans: Vec<String> = (0..=n - len)
            .filter_map(|i| {
                let cell = &chart[i][len - 1];
                let cats: Vec<String> = cell.keys().map(|c| c.to_string()).collect();
                let words: Vec<String> = tokens[i..i + len].iter().map(|t| t.surface.clone()).collect();
                (!cats.is_empty()).then(|| format!("[{}] {}", words.join(" "), cats.join(" | ")))
            })
            .collect();
        if !spans.is_empty() && len > 1 {
            return spans;
        }
    }
    Vec::new()
}
