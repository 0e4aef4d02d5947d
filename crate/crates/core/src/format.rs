//! The line-oriented `.sub` file format.
//!
//! ```text
//! # Thue–Morse
//! alphabet: 0 1
//! rule 0 -> 0 1
//! rule 1 -> 1 0
//! coding 0 -> a
//! seed: 0
//! base: 2
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::word::{Letter, Word};

/// Everything a `.sub` file can declare.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubFile {
    pub phi: Substitution,
    /// Explicit coding lines; letters not listed map to themselves.
    pub coding: BTreeMap<Letter, Letter>,
    pub seed: Option<Letter>,
    pub base: Option<usize>,
}

impl SubFile {
    pub fn parse(text: &str) -> Result<SubFile> {
        let mut alphabet: Option<(Vec<Letter>, usize)> = None;
        let mut rules: BTreeMap<usize, (Word, usize)> = BTreeMap::new();
        let mut coding = BTreeMap::new();
        let mut seed = None;
        let mut base = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet:") {
                if alphabet.is_some() {
                    return Err(Error::parse(line_no, "alphabet declared twice"));
                }
                if !rules.is_empty() || seed.is_some() || base.is_some() || !coding.is_empty() {
                    return Err(Error::parse(line_no, "alphabet must come first"));
                }
                let letters = tokens(rest, line_no)?;
                if letters.is_empty() {
                    return Err(Error::parse(line_no, "empty alphabet"));
                }
                for (i, l) in letters.iter().enumerate() {
                    if letters[..i].contains(l) {
                        return Err(Error::parse(line_no, format!("duplicate letter {l}")));
                    }
                }
                alphabet = Some((letters, line_no));
                continue;
            }
            let Some((letters, _)) = &alphabet else {
                return Err(Error::parse(line_no, "alphabet must come first"));
            };
            let find = |tok: &Letter| {
                letters
                    .iter()
                    .position(|l| l == tok)
                    .ok_or_else(|| Error::parse(line_no, format!("undeclared letter {tok}")))
            };
            if let Some(rest) = line.strip_prefix("rule ") {
                let (lhs, rhs) = split_arrow(rest, line_no)?;
                let a = find(&single(lhs, line_no)?)?;
                let img = Word::from_letters(tokens(rhs, line_no)?);
                if img.is_empty() {
                    return Err(Error::parse(line_no, format!("empty image for letter {}", letters[a])));
                }
                for l in img.letters() {
                    find(l)?;
                }
                if rules.insert(a, (img, line_no)).is_some() {
                    return Err(Error::parse(line_no, format!("duplicate rule for {}", letters[a])));
                }
            } else if let Some(rest) = line.strip_prefix("coding ") {
                let (lhs, rhs) = split_arrow(rest, line_no)?;
                let a = single(lhs, line_no)?;
                find(&a)?;
                let b = single(rhs, line_no)?;
                if coding.insert(a.clone(), b).is_some() {
                    return Err(Error::parse(line_no, format!("duplicate coding for {a}")));
                }
            } else if let Some(rest) = line.strip_prefix("seed:") {
                let s = single(rest, line_no)?;
                find(&s)?;
                if seed.replace(s).is_some() {
                    return Err(Error::parse(line_no, "seed declared twice"));
                }
            } else if let Some(rest) = line.strip_prefix("base:") {
                let k: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad base {:?}", rest.trim())))?;
                if base.replace(k).is_some() {
                    return Err(Error::parse(line_no, "base declared twice"));
                }
            } else {
                return Err(Error::parse(line_no, format!("unrecognised line {line:?}")));
            }
        }

        let Some((letters, alpha_line)) = alphabet else {
            return Err(Error::parse(text.lines().count().max(1), "missing alphabet line"));
        };
        let mut images = Vec::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            match rules.remove(&i) {
                Some((w, _)) => images.push(w),
                None => return Err(Error::parse(alpha_line, format!("no rule for letter {l}"))),
            }
        }
        let phi = Substitution::new(letters, images).map_err(|e| Error::parse(alpha_line, e.to_string()))?;
        if let Some(k) = base {
            if k < 2 || phi.constant_length() != Some(k) {
                return Err(Error::parse(
                    alpha_line,
                    format!("declared base {k} but the rules are not of constant length {k}"),
                ));
            }
        }
        Ok(SubFile {
            phi,
            coding,
            seed,
            base,
        })
    }

    /// Renders the file back to text; parsing the result gives an equal value.
    pub fn to_text(&self) -> String {
        let mut out = self.phi.to_string();
        for (a, b) in &self.coding {
            let _ = writeln!(out, "coding {a} -> {b}");
        }
        if let Some(s) = &self.seed {
            let _ = writeln!(out, "seed: {s}");
        }
        if let Some(k) = self.base {
            let _ = writeln!(out, "base: {k}");
        }
        out
    }
}

/// Parses only the substitution part of a `.sub` text.
pub fn parse_substitution(text: &str) -> Result<Substitution> {
    SubFile::parse(text).map(|f| f.phi)
}

fn tokens(s: &str, line: usize) -> Result<Vec<Letter>> {
    s.split_whitespace()
        .map(|t| Letter::new(t).map_err(|e| Error::parse(line, e.to_string())))
        .collect()
}

fn single(s: &str, line: usize) -> Result<Letter> {
    let mut t = tokens(s, line)?;
    if t.len() != 1 {
        return Err(Error::parse(line, format!("expected one letter, got {:?}", s.trim())));
    }
    Ok(t.remove(0))
}

fn split_arrow(s: &str, line: usize) -> Result<(&str, &str)> {
    s.split_once("->")
        .ok_or_else(|| Error::parse(line, "expected `->`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_thue_morse() {
        let s = parse_substitution("alphabet: 0 1\nrule 0 -> 0 1\nrule 1 -> 1 0").unwrap();
        assert_eq!(s, Substitution::compact(&[("0", "01"), ("1", "10")]).unwrap());
    }

    #[test]
    fn parses_example_with_four_letters() {
        let s = parse_substitution(
            "alphabet: 0 1 2 3\nrule 0 -> 1 2\nrule 1 -> 1 1\nrule 2 -> 2 3\nrule 3 -> 3 2",
        )
        .unwrap();
        assert_eq!(s.size(), 4);
        assert_eq!(s.rule(0), &[1, 2]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_substitution("alphabet: 0\nrule 0 -> ").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_substitution("alphabet: 0\nrule 0 -> 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_substitution("alphabet: 0\nrule 0 -> 0\nrule 0 -> 0 0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_substitution("# c\nalphabet: 0 1\nrule 0 -> 0 1\nbogus").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = parse_substitution("rule 0 -> 0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(parse_substitution("alphabet: 0 1\nrule 0 -> 0 1").is_err());
    }

    #[test]
    fn base_is_validated() {
        let ok = SubFile::parse("alphabet: 0 1\nrule 0 -> 0 1\nrule 1 -> 1 0\nbase: 2").unwrap();
        assert_eq!(ok.base, Some(2));
        assert!(SubFile::parse("alphabet: 0 1\nrule 0 -> 0 1\nrule 1 -> 1 0\nbase: 3").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "alphabet: 0 1 2\nrule 0 -> 0 1 2\nrule 1 -> 1 1 1\nrule 2 -> 2 2 2\ncoding 2 -> x\nseed: 0\nbase: 3\n";
        let f = SubFile::parse(text).unwrap();
        assert_eq!(SubFile::parse(&f.to_text()).unwrap(), f);
        assert_eq!(f.to_text(), text);
    }
}
