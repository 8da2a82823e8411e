use std::collections::BTreeSet;
use std::fmt;

use super::lexicon::{is_numeral, Lexicon};
use super::GrammarError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    /// Feature selecting a homograph entry, e.g. `measure` on `yori`.
    pub tag: Option<String>,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        Token { surface: surface.into(), tag: None }
    }

    fn is(&self, s: &str) -> bool {
        self.surface.eq_ignore_ascii_case(s)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            Some(t) => write!(f, "{}:{t}", self.surface),
            None => f.write_str(&self.surface),
        }
    }
}

/// Multiword expressions, longest first.
pub const MERGES: &[&[&str]] = &[
    &["to", "onaji", "kurai", "no"],
    &["to", "onaji", "kurai"],
    &["izyoo", "ni"],
    &["yori", "mo"],
    &["te", "i", "ru"],
];

const STANDARD_WORDS: &[&str] = &["yori", "yori-mo", "izyoo-ni", "izyoo", "hodo", "to-onaji-kurai", "to-onaji-kurai-no", "kurai"];

fn known(lex: &Lexicon, s: &str) -> bool {
    let lower = s.to_lowercase();
    lex.contains(&lower) || MERGES.iter().any(|m| m.contains(&lower.as_str()))
}

/// Splits romanized text into lexicon tokens.
///
/// Words are separated by whitespace; hyphenated words are split into the
/// longest hyphen-joined pieces the lexicon knows (`PC-6082-wa` becomes
/// `PC-6082`, `wa`); leading digits become numerals (`70kg`); remaining
/// pieces are segmented by longest known prefix (`magatte` becomes `magat`,
/// `te`). A sentence-final period is its own token.
pub fn tokenize(text: &str, lex: &Lexicon) -> Result<Vec<Token>, GrammarError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for word in text.split_whitespace() {
        let start = offset + text[offset..].find(word).unwrap_or(0);
        offset = start + word.len();
        let (body, period) = match word.strip_suffix('.') {
            Some(b) => (b, true),
            None => (word, false),
        };
        let segments: Vec<&str> = body.split('-').filter(|s| !s.is_empty()).collect();
        let mut i = 0;
        let mut seg_pos = start;
        while i < segments.len() {
            let joined = (i + 1..=segments.len())
                .rev()
                .find(|&j| known(lex, &segments[i..j].join("-")));
            match joined {
                Some(j) => {
                    out.push(Token::new(segments[i..j].join("-")));
                    for s in &segments[i..j] {
                        seg_pos += s.len() + 1;
                    }
                    i = j;
                }
                None => {
                    segment_chars(segments[i], seg_pos, lex, &mut out)?;
                    seg_pos += segments[i].len() + 1;
                    i += 1;
                }
            }
        }
        if period {
            out.push(Token::new("."));
        }
    }
    Ok(out)
}

fn segment_chars(seg: &str, pos: usize, lex: &Lexicon, out: &mut Vec<Token>) -> Result<(), GrammarError> {
    let mut rest = seg;
    let mut at = pos;
    while !rest.is_empty() {
        let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if digits > 0 {
            out.push(Token::new(&rest[..digits]));
            at += digits;
            rest = &rest[digits..];
            continue;
        }
        let boundaries: Vec<usize> = rest.char_indices().map(|(i, _)| i).skip(1).chain([rest.len()]).collect();
        match boundaries.into_iter().rev().find(|&end| known(lex, &rest[..end])) {
            Some(end) => {
                out.push(Token::new(&rest[..end]));
                at += end;
                rest = &rest[end..];
            }
            None => {
                return Err(GrammarError::UnknownToken { position: at, fragment: rest.to_string() });
            }
        }
    }
    Ok(())
}

/// Joins the multiword expressions of [`MERGES`] into single hyphenated tokens.
pub fn merge_multiwords(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let hit = MERGES.iter().find(|m| {
            i + m.len() <= tokens.len() && m.iter().zip(&tokens[i..]).all(|(w, t)| t.is(w))
        });
        match hit {
            Some(m) => {
                out.push(Token::new(m.join("-")));
                i += m.len();
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Inserts the empty degree operator `cmp` before a predicative gradable
/// adjective whose clause has no overt standard.
pub fn insert_cmp(tokens: &[Token], lex: &Lexicon) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len() + 1);
    for (i, tok) in tokens.iter().enumerate() {
        let predicative = lex.any(&tok.surface, |e| e.is_predicative_adjective());
        let before_noun = tokens.get(i + 1).is_some_and(|n| lex.any(&n.surface, |e| e.is_noun()));
        if predicative && !before_noun && !out.last().is_some_and(|t| t.is("cmp")) && !has_standard(&out, lex) {
            out.push(Token::new("cmp"));
        }
        out.push(tok.clone());
    }
    out
}

/// Scans back to the previous predicate for a standard marker or measure phrase.
fn has_standard(prefix: &[Token], lex: &Lexicon) -> bool {
    for t in prefix.iter().rev() {
        let lower = t.surface.to_lowercase();
        if STANDARD_WORDS.contains(&lower.as_str())
            || is_numeral(&lower)
            || lex.any(&lower, |e| e.is_standard_marker() || e.is_unit())
        {
            return true;
        }
        if lex.any(&lower, |e| e.is_verb() || e.is_predicative_adjective()) {
            return false;
        }
    }
    false
}

/// Tags `yori` and unit tokens with the construction they belong to.
pub fn assign_yori_features(tokens: &[Token], lex: &Lexicon) -> Vec<Token> {
    let is_unit = |t: Option<&Token>| t.is_some_and(|t| lex.any(&t.surface, |e| e.is_unit()));
    let is_num = |t: Option<&Token>| t.is_some_and(|t| is_numeral(&t.surface));
    let class = |t: Option<&Token>, f: &dyn Fn(&super::LexEntry) -> bool| t.is_some_and(|t| lex.any(&t.surface, f));
    let at = |i: usize, d: isize| -> Option<&Token> { i.checked_add_signed(d).and_then(|j| tokens.get(j)) };

    let mut out = tokens.to_vec();
    for (i, tok) in out.iter_mut().enumerate() {
        if tok.is("yori") {
            let tag = if is_unit(at(i, -1)) && is_num(at(i, -2)) {
                "measure"
            } else if class(at(i, -1), &|e| e.is_verb() || e.is_pronominal_no()) {
                "clausal"
            } else if is_num(at(i, 1)) && is_unit(at(i, 2)) {
                "differential"
            } else if class(at(i, 1), &|e| e.is_attributive_adjective()) && class(at(i, 2), &|e| e.is_noun()) {
                "phrasal-clausal"
            } else {
                "phrasal"
            };
            tok.tag = Some(tag.into());
        } else if is_unit(Some(tok)) {
            let diff = at(i, -2).is_some_and(|t| t.is("yori")) && is_num(at(i, -1));
            tok.tag = Some(if diff { "differential" } else { "measure" }.into());
        }
    }
    out
}

/// Distinct surfaces the tokenizer can produce from the lexicon alone.
pub fn vocabulary(lex: &Lexicon) -> BTreeSet<String> {
    lex.surfaces().map(str::to_string).chain(MERGES.iter().flat_map(|m| m.iter().map(|s| s.to_string()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s, Lexicon::builtin()).unwrap().into_iter().map(|t| t.surface).collect()
    }

    fn words(ws: &[&str]) -> Vec<Token> {
        ws.iter().map(|w| Token::new(*w)).collect()
    }

    fn surfaces(ts: &[Token]) -> Vec<String> {
        ts.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn tokenizes_hyphenated_romaji() {
        assert_eq!(toks("Taro-wa Jiro yori omoi."), ["Taro", "wa", "Jiro", "yori", "omoi", "."]);
        assert_eq!(toks("Taro-wa 70 kg yori omoi."), ["Taro", "wa", "70", "kg", "yori", "omoi", "."]);
        assert_eq!(toks("PC-6082-wa ITEL-XZ yori hayai."), ["PC-6082", "wa", "ITEL-XZ", "yori", "hayai", "."]);
        assert_eq!(toks("70kg"), ["70", "kg"]);
        assert!(toks("").is_empty());
    }

    #[test]
    fn falls_back_to_prefix_segmentation() {
        assert_eq!(toks("magatte-i-ru"), ["magat", "te", "i", "ru"]);
    }

    #[test]
    fn unknown_token_reports_position() {
        let err = tokenize("Taro-wa zzz", Lexicon::builtin()).unwrap_err();
        assert_eq!(err, GrammarError::UnknownToken { position: 8, fragment: "zzz".into() });
    }

    #[test]
    fn merges_longest_first() {
        let m = merge_multiwords(&words(&["Jiro", "izyoo", "ni", "omoi"]));
        assert_eq!(surfaces(&m), ["Jiro", "izyoo-ni", "omoi"]);
        let m = merge_multiwords(&words(&["Jiro", "to", "onaji", "kurai", "no", "omosa", "da"]));
        assert_eq!(surfaces(&m), ["Jiro", "to-onaji-kurai-no", "omosa", "da"]);
        let plain = words(&["Jiro", "yori", "omoi"]);
        assert_eq!(merge_multiwords(&plain), plain);
        assert_eq!(merge_multiwords(&m), m);
    }

    #[test]
    fn cmp_insertion() {
        let lex = Lexicon::builtin();
        assert_eq!(surfaces(&insert_cmp(&words(&["Taro", "wa", "omoi"]), lex)), ["Taro", "wa", "cmp", "omoi"]);
        let phrasal = words(&["Taro", "wa", "Jiro", "yori", "omoi"]);
        assert_eq!(insert_cmp(&phrasal, lex), phrasal);
        let measure = words(&["Taro", "wa", "70", "kg", "yori", "omoi"]);
        assert_eq!(insert_cmp(&measure, lex), measure);
        let once = insert_cmp(&words(&["PC-6082", "wa", "hayai"]), lex);
        assert_eq!(surfaces(&once), ["PC-6082", "wa", "cmp", "hayai"]);
        assert_eq!(insert_cmp(&once, lex), once);
        let attributive = words(&["Taro", "wa", "takai", "hon", "o", "katta"]);
        assert_eq!(insert_cmp(&attributive, lex), attributive);
    }

    #[test]
    fn yori_features() {
        let lex = Lexicon::builtin();
        let tag = |ws: &[&str]| surfaces(&assign_yori_features(&words(ws), lex));
        assert_eq!(tag(&["70", "kg", "yori", "omoi"]), ["70", "kg:measure", "yori:measure", "omoi"]);
        assert_eq!(tag(&["katta", "yori", "takai"])[1], "yori:clausal");
        assert_eq!(tag(&["katta", "no", "yori", "takai"])[2], "yori:clausal");
        assert_eq!(tag(&["Hanako", "yori", "takai", "hon", "o", "katta"])[1], "yori:phrasal-clausal");
        assert_eq!(tag(&["Jiro", "yori", "5", "kg", "omoi"]), ["Jiro", "yori:differential", "5", "kg:differential", "omoi"]);
        assert_eq!(tag(&["Jiro", "yori", "omoi"])[1], "yori:phrasal");
    }
}
