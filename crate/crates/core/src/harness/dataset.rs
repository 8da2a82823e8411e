//! JSONL problem sets: one object per line with `id`, `premises`,
//! `hypothesis` and `gold`. Other fields are kept as metadata.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::pipeline::{Label, Problem};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub problem: Problem,
    /// Line number in the source file.
    pub line: usize,
    /// Every field besides the four required ones.
    pub metadata: Map<String, Value>,
}

impl Entry {
    /// Marked as a known failure (`"expected": "error"`).
    pub fn expected_error(&self) -> bool {
        self.metadata.get("expected").and_then(Value::as_str) == Some("error")
    }

    pub fn meta_str(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).and_then(Value::as_str)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub entries: Vec<Entry>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.problem.id == id)
    }

    /// Gold label counts in yes/no/unknown order.
    pub fn label_counts(&self) -> [usize; 3] {
        let mut out = [0; 3];
        for e in &self.entries {
            out[Label::ALL.iter().position(|l| *l == e.problem.gold).unwrap()] += 1;
        }
        out
    }

    /// Parses JSONL text; blank lines are skipped.
    pub fn parse(name: &str, text: &str) -> Result<Self, DatasetError> {
        let mut entries = Vec::new();
        let mut ids = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let err = |message: String| DatasetError::Line { line, message };
            let value: Value = serde_json::from_str(raw).map_err(|e| err(format!("invalid JSON: {e}")))?;
            let Value::Object(mut fields) = value else { return Err(err("expected a JSON object".into())) };
            let mut take_str = |key: &str| match fields.remove(key) {
                Some(Value::String(s)) => Ok(s),
                Some(_) => Err(err(format!("`{key}` must be a string"))),
                None => Err(err(format!("missing `{key}`"))),
            };
            let id = take_str("id")?;
            let hypothesis = take_str("hypothesis")?;
            let gold = take_str("gold")?.parse::<Label>().map_err(err)?;
            let premises = match fields.remove("premises") {
                Some(Value::Array(items)) if !items.is_empty() => items
                    .into_iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s),
                        _ => Err(err("`premises` must contain strings".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Some(Value::Array(_)) => return Err(err("`premises` is empty".into())),
                Some(_) => return Err(err("`premises` must be an array".into())),
                None => return Err(err("missing `premises`".into())),
            };
            if !ids.insert(id.clone()) {
                return Err(DatasetError::DuplicateId { line, id });
            }
            entries.push(Entry { problem: Problem { id, premises, hypothesis, gold }, line, metadata: fields });
        }
        Ok(Dataset { name: name.to_string(), entries })
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Dataset::parse(&name, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"id": "a", "premises": ["Taro-wa omoi."], "hypothesis": "Taro-wa omoi.", "gold": "yes", "source": "x"}"#;

    #[test]
    fn keeps_unknown_fields() {
        let d = Dataset::parse("t", LINE).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.entries[0].meta_str("source"), Some("x"));
        assert_eq!(d.label_counts(), [1, 0, 0]);
    }

    #[test]
    fn empty_input_is_empty_dataset() {
        assert!(Dataset::parse("t", "").unwrap().is_empty());
        assert!(Dataset::parse("t", "\n  \n").unwrap().is_empty());
    }

    #[test]
    fn errors_point_at_lines() {
        let missing = r#"{"id": "b", "premises": ["x"], "hypothesis": "y"}"#;
        let err = Dataset::parse("t", &format!("{LINE}\n{missing}")).unwrap_err();
        assert!(matches!(&err, DatasetError::Line { line: 2, message } if message.contains("gold")), "{err}");
        let err = Dataset::parse("t", &format!("{LINE}\n\n{LINE}")).unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateId { line: 3, .. }));
        assert!(matches!(Dataset::parse("t", "{not json"), Err(DatasetError::Line { line: 1, .. })));
        let bad_label = LINE.replace("\"yes\"", "\"maybe\"");
        assert!(matches!(Dataset::parse("t", &bad_label), Err(DatasetError::Line { line: 1, .. })));
        let empty_premises = LINE.replace(r#"["Taro-wa omoi."]"#, "[]");
        assert!(matches!(Dataset::parse("t", &empty_premises), Err(DatasetError::Line { line: 1, .. })));
    }
}
