use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::GrammarError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// `/`: argument on the right.
    Forward,
    /// `\`: argument on the left.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Atom { name: String, features: BTreeMap<String, String> },
    Slash { dir: Dir, result: Box<Category>, arg: Box<Category> },
}

impl Category {
    pub fn atom(name: &str) -> Self {
        Category::Atom { name: name.to_string(), features: BTreeMap::new() }
    }

    pub fn with_feature(name: &str, key: &str, value: &str) -> Self {
        let features = BTreeMap::from([(key.to_string(), value.to_string())]);
        Category::Atom { name: name.to_string(), features }
    }

    pub fn slash(dir: Dir, result: Category, arg: Category) -> Self {
        Category::Slash { dir, result: Box::new(result), arg: Box::new(arg) }
    }

    pub fn fwd(result: Category, arg: Category) -> Self {
        Self::slash(Dir::Forward, result, arg)
    }

    pub fn bwd(result: Category, arg: Category) -> Self {
        Self::slash(Dir::Backward, result, arg)
    }

    pub fn is_sentence(&self) -> bool {
        matches!(self, Category::Atom { name, .. } if name == "S")
    }

    pub fn as_slash(&self, want: Dir) -> Option<(&Category, &Category)> {
        match self {
            Category::Slash { dir, result, arg } if *dir == want => Some((result, arg)),
            _ => None,
        }
    }

    /// Structural match where a bare atom matches any featured atom of the
    /// same name and conflicting feature values fail. Returns the merged
    /// category.
    pub fn unify(&self, other: &Category) -> Option<Category> {
        match (self, other) {
            (Category::Atom { name: a, features: fa }, Category::Atom { name: b, features: fb })
                if a == b =>
            {
                let mut merged = fa.clone();
                for (k, v) in fb {
                    match merged.get(k) {
                        Some(w) if w != v => return None,
                        _ => {
                            merged.insert(k.clone(), v.clone());
                        }
                    }
                }
                Some(Category::Atom { name: a.clone(), features: merged })
            }
            (
                Category::Slash { dir: d1, result: r1, arg: a1 },
                Category::Slash { dir: d2, result: r2, arg: a2 },
            ) if d1 == d2 => Some(Category::slash(*d1, r1.unify(r2)?, a1.unify(a2)?)),
            _ => None,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Atom { name, features } => {
                write!(f, "{name}")?;
                if !features.is_empty() {
                    let fs: Vec<_> = features.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    write!(f, "[{}]", fs.join(","))?;
                }
                Ok(())
            }
            Category::Slash { dir, result, arg } => {
                let part = |c: &Category, f: &mut fmt::Formatter<'_>| match c {
                    Category::Slash { .. } => write!(f, "({c})"),
                    _ => write!(f, "{c}"),
                };
                part(result, f)?;
                write!(f, "{}", if *dir == Dir::Forward { "/" } else { "\\" })?;
                part(arg, f)
            }
        }
    }
}

impl FromStr for Category {
    type Err = GrammarError;

    /// Slashes associate to the left: `S\NP/NP` is `(S\NP)/NP`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let cat = parse_cat(&chars, &mut pos).map_err(|m| GrammarError::BadCategory(format!("{s}: {m}")))?;
        if pos != chars.len() {
            return Err(GrammarError::BadCategory(format!("{s}: trailing input")));
        }
        Ok(cat)
    }
}

fn parse_cat(cs: &[char], pos: &mut usize) -> Result<Category, String> {
    let mut left = parse_primary(cs, pos)?;
    while let Some(&c) = cs.get(*pos) {
        let dir = match c {
            '/' => Dir::Forward,
            '\\' => Dir::Backward,
            _ => break,
        };
        *pos += 1;
        let right = parse_primary(cs, pos)?;
        left = Category::slash(dir, left, right);
    }
    Ok(left)
}

fn parse_primary(cs: &[char], pos: &mut usize) -> Result<Category, String> {
    if cs.get(*pos) == Some(&'(') {
        *pos += 1;
        let inner = parse_cat(cs, pos)?;
        if cs.get(*pos) != Some(&')') {
            return Err("expected `)`".into());
        }
        *pos += 1;
        return Ok(inner);
    }
    let start = *pos;
    while cs.get(*pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(format!("expected category at {start}"));
    }
    let name: String = cs[start..*pos].iter().collect();
    let mut features = BTreeMap::new();
    if cs.get(*pos) == Some(&'[') {
        let close = cs[*pos..].iter().position(|&c| c == ']').ok_or("unclosed `[`")? + *pos;
        let body: String = cs[*pos + 1..close].iter().collect();
        for kv in body.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad feature `{kv}`"))?;
            features.insert(k.to_string(), v.to_string());
        }
        *pos = close + 1;
    }
    Ok(Category::Atom { name, features })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trip() {
        for s in ["S\\NP", "(S/S)\\NP", "(((S\\NP)/((S\\NP)\\NP))/NP)\\(S\\NP)", "NP\\NP[kind=num]"] {
            let c: Category = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
    }

    #[test]
    fn left_associative() {
        let a: Category = "S\\NP/NP".parse().unwrap();
        let b: Category = "(S\\NP)/NP".parse().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn feature_unification() {
        let bare = Category::atom("NP");
        let num = Category::with_feature("NP", "kind", "num");
        let meas = Category::with_feature("NP", "kind", "meas");
        assert_eq!(bare.unify(&num), Some(num.clone()));
        assert_eq!(num.unify(&bare), Some(num.clone()));
        assert_eq!(num.unify(&meas), None);
        assert_eq!(bare.unify(&Category::atom("S")), None);
    }
}
