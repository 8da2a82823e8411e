//! Fragment lexicon, token-level transforms and CKY parsing.

mod category;
mod chart;
mod lexicon;
mod rules;
mod tokens;

pub use category::{Category, Dir};
pub use chart::{parse, parse_with_beam, Derivation, DEFAULT_BEAM};
pub use lexicon::{is_numeral, LexEntry, Lexicon};
pub use rules::{apply_rule, RuleId};
pub use tokens::{assign_yori_features, insert_cmp, merge_multiwords, tokenize, vocabulary, Token, MERGES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unknown token `{fragment}` at byte {position}")]
    UnknownToken { position: usize, fragment: String },
    #[error("no lexical entry for `{0}`")]
    NoEntry(String),
    #[error("no parse; widest partial spans: {}", partial.join("; "))]
    NoParse { partial: Vec<String> },
    #[error("bad category {0}")]
    BadCategory(String),
    #[error("lexicon line {line}: {message}")]
    BadLexicon { line: usize, message: String },
}

/// Tokenize, merge multiwords, insert `cmp` and tag `yori`: everything
/// needed before parsing.
pub fn preprocess(text: &str, lex: &Lexicon) -> Result<Vec<Token>, GrammarError> {
    let toks = tokenize(text, lex)?;
    let toks = merge_multiwords(&toks);
    let toks = insert_cmp(&toks, lex);
    Ok(assign_yori_features(&toks, lex))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top(text: &str) -> Derivation {
        let lex = Lexicon::builtin();
        let toks = preprocess(text, lex).unwrap();
        let ds = parse(&toks, lex).unwrap();
        assert!(ds.iter().all(|d| d.recheck(toks.len())));
        ds.into_iter().next().unwrap()
    }

    #[test]
    fn phrasal_comparative_uses_crossed_composition() {
        let d = top("Taro-wa Jiro yori omoi");
        let Derivation::Node { rule: RuleId::Ba, right, .. } = &d else { panic!("{d}") };
        assert!(matches!(right.as_ref(), Derivation::Node { rule: RuleId::FcX, .. }), "{d}");
    }

    #[test]
    fn positive_form_via_cmp() {
        let d = top("Taro-wa omoi.");
        assert!(d.leaves().iter().any(|e| e.surface == "cmp"));
        assert!(d.to_string().contains(">Bx"), "{d}");
    }

    #[test]
    fn corpus_constructions_parse() {
        for s in [
            "Taro-wa 70 kg yori omoi.",
            "Taro-wa Jiro yori 5 kg karui.",
            "Taro-wa Jiro to onaji kurai-no omosa-da.",
            "Taro-wa Jiro hodo omoku nai.",
            "Taro-wa Hanako izyoo-ni hayaoki toiu-wake-de-wa-nai.",
            "Taro-wa Hanako-ga katta yori takai hon-o katta.",
            "Taro-wa Hanako-ga katta no yori takai hon-o katta.",
            "Taro-wa Hanako yori takai hon-o katta.",
            "Taro-wa subete-no gakusei yori omoi.",
            "Jiro-wa gakusei-da.",
            "Kono boo-wa ano boo yori magatte-i-ru.",
        ] {
            top(s);
        }
    }

    #[test]
    fn ungrammatical_inputs() {
        let lex = Lexicon::builtin();
        let toks = vec![Token { surface: "yori".into(), tag: None }; 2];
        assert!(matches!(parse(&toks, lex), Err(GrammarError::NoParse { .. })));
        let toks = preprocess("ITEL-wa APCOM-no keiyaku yori ooku-no chuumon-o kakutoku-sita.", lex).unwrap();
        assert!(matches!(parse(&toks, lex), Err(GrammarError::NoParse { .. })));
    }
}
