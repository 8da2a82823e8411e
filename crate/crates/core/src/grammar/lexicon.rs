use std::collections::{BTreeMap, BTreeSet};

use super::category::Category;
use super::GrammarError;

const BUILTIN: &str = include_str!("../../data/lexicon.tsv");

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexEntry {
    /// Post-merge surface form, lowercased.
    pub surface: String,
    /// Feature tag selecting among homographs (`yori#measure`).
    pub tag: Option<String>,
    pub category: Category,
    pub template_id: String,
    pub lemma: String,
    pub flags: BTreeSet<String>,
}

impl LexEntry {
    pub fn flag_value(&self, key: &str) -> Option<&str> {
        self.flags.iter().find_map(|f| f.strip_prefix(key)?.strip_prefix('='))
    }

    pub fn is_predicative_adjective(&self) -> bool {
        matches!(self.template_id.as_str(), "adj_pos" | "adj_neg")
    }

    pub fn is_attributive_adjective(&self) -> bool {
        self.template_id == "adj_attr"
    }

    pub fn is_noun(&self) -> bool {
        matches!(self.template_id.as_str(), "noun" | "noun_pred")
    }

    pub fn is_verb(&self) -> bool {
        self.template_id.starts_with("verb_")
    }

    pub fn is_unit(&self) -> bool {
        self.template_id.starts_with("unit_")
    }

    pub fn is_numeral(&self) -> bool {
        self.template_id == "numeral"
    }

    /// Particles that introduce a comparative standard.
    pub fn is_standard_marker(&self) -> bool {
        matches!(
            self.template_id.as_str(),
            "yori" | "yori_diff" | "yori_measure" | "yori_clausal" | "yori_pron" | "yori_pc"
                | "izyoo_ni" | "equative" | "equative_nominal" | "hodo"
        )
    }

    pub fn is_pronominal_no(&self) -> bool {
        self.template_id == "no_pron"
    }
}

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexEntry>>,
}

impl Lexicon {
    pub fn builtin() -> &'static Lexicon {
        static LEX: std::sync::OnceLock<Lexicon> = std::sync::OnceLock::new();
        LEX.get_or_init(|| Lexicon::parse(BUILTIN).expect("bundled lexicon is well-formed"))
    }

    /// Reads `surface TAB category TAB template TAB lemma TAB flags` lines;
    /// `#` starts a comment line, `-` means no flags.
    pub fn parse(text: &str) -> Result<Lexicon, GrammarError> {
        let mut lex = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with("# ") || line == "#" {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(GrammarError::BadLexicon { line: i + 1, message: "expected 5 columns".into() });
            }
            let (surface, tag) = match cols[0].split_once('#') {
                Some((s, t)) => (s, Some(t.to_string())),
                None => (cols[0], None),
            };
            let category = cols[1]
                .parse()
                .map_err(|e: GrammarError| GrammarError::BadLexicon { line: i + 1, message: e.to_string() })?;
            let flags = match cols[4] {
                "-" => BTreeSet::new(),
                f => f.split(',').map(str::to_string).collect(),
            };
            lex.insert(LexEntry {
                surface: surface.to_lowercase(),
                tag,
                category,
                template_id: cols[2].to_string(),
                lemma: cols[3].to_string(),
                flags,
            });
        }
        Ok(lex)
    }

    pub fn insert(&mut self, entry: LexEntry) {
        self.entries.entry(entry.surface.clone()).or_default().push(entry);
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(&surface.to_lowercase())
    }

    /// Entries for a surface form. An untagged lookup sees every homograph;
    /// a tagged one only the entries carrying that tag.
    pub fn lookup(&self, surface: &str, tag: Option<&str>) -> Vec<LexEntry> {
        let lower = surface.to_lowercase();
        if is_numeral(&lower) {
            return vec![numeral_entry(&lower)];
        }
        self.entries
            .get(&lower)
            .map(|es| {
                es.iter()
                    .filter(|e| tag.is_none() || e.tag.as_deref() == tag)
                    .cloned()
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values().flatten()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn any(&self, surface: &str, pred: impl Fn(&LexEntry) -> bool) -> bool {
        self.lookup(surface, None).iter().any(pred)
    }
}

pub fn is_numeral(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    !body.is_empty()
        && body.chars().all(|c| c.is_ascii_digit() || c == '/')
        && body.chars().next().is_some_and(|c| c.is_ascii_digit())
        && body.matches('/').count() <= 1
        && !body.ends_with('/')
}

fn numeral_entry(text: &str) -> LexEntry {
    LexEntry {
        surface: text.to_string(),
        tag: None,
        category: Category::with_feature("NP", "kind", "num"),
        template_id: "numeral".into(),
        lemma: text.to_string(),
        flags: BTreeSet::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads_and_is_case_insensitive() {
        let lex = Lexicon::builtin();
        assert!(!lex.lookup("Taro", None).is_empty());
        assert_eq!(lex.lookup("omoi", None)[0].lemma, "heavy");
        assert!(lex.lookup("yori", Some("measure")).iter().all(|e| e.template_id == "yori_measure"));
        assert!(lex.lookup("yori", None).len() >= 4);
    }

    #[test]
    fn numerals_synthesized() {
        let e = &Lexicon::builtin().lookup("70", None)[0];
        assert_eq!(e.category.to_string(), "NP[kind=num]");
        assert!(is_numeral("5/2") && is_numeral("-5") && !is_numeral("5/") && !is_numeral("kg"));
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = Lexicon::parse("# header\nomoi\tS\\NP\tadj_pos\n").unwrap_err();
        assert!(matches!(err, GrammarError::BadLexicon { line: 2, .. }));
    }
}
