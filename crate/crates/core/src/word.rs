//! Letters, finite words, factor sets and eventually periodic biinfinite words.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter is an arbitrary non-whitespace token.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(token: &str) -> Result<Self> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("bad letter token {token:?}")));
        }
        Ok(Letter(Arc::from(token)))
    }

    /// Joins several letters into one composite letter, as used by the power
    /// alphabet recoding.
    pub fn composite(parts: &[Letter]) -> Self {
        let joined = parts.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("·");
        Letter(Arc::from(joined.as_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Letter::new(&s).map_err(serde::de::Error::custom)
    }
}

/// A finite word. Ordering is lexicographic on the letter tokens.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Parses whitespace-separated tokens. An empty string (or a lone `ε`)
    /// gives the empty word.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        text.split_whitespace().map(Letter::new).collect::<Result<Vec<_>>>().map(Word)
    }

    /// One letter per character; convenient for single-character alphabets.
    pub fn from_chars(text: &str) -> Self {
        Word(
            text.chars()
                .map(|c| Letter(Arc::from(c.to_string().as_str())))
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.iter().cloned().cycle().take(self.0.len() * n).collect())
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn ends_with(&self, suffix: &Word) -> bool {
        self.0.ends_with(&suffix.0)
    }

    pub fn contains_factor(&self, factor: &Word) -> bool {
        factor.is_empty() || self.0.windows(factor.len()).any(|w| w == factor.0.as_slice())
    }

    /// Renders without separators when every token is a single character.
    pub fn compact(&self) -> String {
        if self.0.iter().all(|l| l.as_str().chars().count() == 1) {
            if self.is_empty() {
                "ε".to_string()
            } else {
                self.0.iter().map(|l| l.as_str()).collect()
            }
        } else {
            self.to_string()
        }
    }

    /// The rotation `w[i..] w[..i]`.
    pub fn rotate(&self, i: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let i = i % self.len();
        let mut v = self.0[i..].to_vec();
        v.extend_from_slice(&self.0[..i]);
        Word(v)
    }

    /// Lexicographically least rotation.
    pub fn least_rotation(&self) -> Word {
        (0..self.len().max(1))
            .map(|i| self.rotate(i))
            .min()
            .unwrap_or_default()
    }

    /// The shortest `r` with `self = r^e`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return self.slice(0, p);
            }
        }
        self.clone()
    }

    /// Whether `self` is a suffix of `u^N` for some `N`. The empty word always is.
    pub fn is_suffix_of_power(&self, u: &Word) -> bool {
        if self.is_empty() {
            return true;
        }
        if u.is_empty() {
            return false;
        }
        let reps = self.len() / u.len() + 1;
        u.repeat(reps).ends_with(self)
    }

    /// Whether `self` is a prefix of `u^N` for some `N`. The empty word always is.
    pub fn is_prefix_of_power(&self, u: &Word) -> bool {
        if self.is_empty() {
            return true;
        }
        if u.is_empty() {
            return false;
        }
        let reps = self.len() / u.len() + 1;
        u.repeat(reps).starts_with(self)
    }

    /// All factors of length at most `max_len`, including ε.
    pub fn factors_upto(&self, max_len: usize, out: &mut BTreeSet<Word>) {
        out.insert(Word::empty());
        for len in 1..=max_len.min(self.len()) {
            for w in self.0.windows(len) {
                out.insert(Word(w.to_vec()));
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(l.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.compact())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A factor-closed set of words of length at most `max_len`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FactorSet {
    pub max_len: usize,
    pub words: BTreeSet<Word>,
}

impl FactorSet {
    pub fn new(max_len: usize, words: BTreeSet<Word>) -> Self {
        FactorSet { max_len, words }
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of words of length exactly `n`.
    pub fn complexity(&self, n: usize) -> usize {
        self.words.iter().filter(|w| w.len() == n).count()
    }

    pub fn of_length(&self, n: usize) -> impl Iterator<Item = &Word> {
        self.words.iter().filter(move |w| w.len() == n)
    }

    /// Sorted by length, then lexicographically.
    pub fn sorted(&self) -> Vec<&Word> {
        let mut v: Vec<&Word> = self.words.iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    pub fn truncate(&self, n: usize) -> FactorSet {
        FactorSet {
            max_len: n.min(self.max_len),
            words: self.words.iter().filter(|w| w.len() <= n).cloned().collect(),
        }
    }

    pub fn intersect(&self, other: &FactorSet) -> FactorSet {
        FactorSet {
            max_len: self.max_len.min(other.max_len),
            words: self.words.intersection(&other.words).cloned().collect(),
        }
    }

    pub fn union_with(&mut self, other: &FactorSet) {
        self.words.extend(other.words.iter().cloned());
    }

    pub fn is_subset(&self, other: &FactorSet) -> bool {
        self.words.is_subset(&other.words)
    }
}

/// The eventually periodic biinfinite word `^ω v · u · w^ω`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct BiWordTriple {
    pub v: Word,
    pub u: Word,
    pub w: Word,
}

impl BiWordTriple {
    pub fn new(v: Word, u: Word, w: Word) -> Self {
        BiWordTriple { v, u, w }
    }

    /// Parses the canonical form `^w(<v>)<u>(<w>)^w`. Components with
    /// whitespace are token lists; without, one letter per character.
    pub fn parse_canonical(text: &str) -> Result<Self> {
        let part = |s: &str| {
            if s.trim().contains(char::is_whitespace) {
                Word::parse(s)
            } else {
                Ok(Word::from_chars(s.trim()))
            }
        };
        let text = text.trim();
        let bad = || Error::InvalidArgument(format!("malformed biword {text:?}"));
        let rest = text.strip_prefix("^w(").ok_or_else(bad)?;
        let rest = rest.strip_suffix(")^w").ok_or_else(bad)?;
        let close = rest.find(')').ok_or_else(bad)?;
        let open = rest.rfind('(').ok_or_else(bad)?;
        if open < close {
            return Err(bad());
        }
        Ok(BiWordTriple {
            v: part(&rest[..close])?,
            u: part(&rest[close + 1..open])?,
            w: part(&rest[open + 1..])?,
        })
    }

    /// Parses the `v | u | w` line format of triple files.
    pub fn parse_bar(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split('|').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "expected `v | u | w`, got {text:?}"
            )));
        }
        Ok(BiWordTriple {
            v: Word::parse(parts[0])?,
            u: Word::parse(parts[1])?,
            w: Word::parse(parts[2])?,
        })
    }

    /// A finite word containing every factor of length ≤ `n`.
    pub fn expand(&self, n: usize) -> Word {
        let reps = |x: &Word| {
            if x.is_empty() {
                0
            } else {
                let m = x.len().max(1);
                (n + 1).div_ceil(m) + (n + 1).div_ceil(m)
            }
        };
        self.v
            .repeat(reps(&self.v))
            .concat(&self.u)
            .concat(&self.w.repeat(reps(&self.w)))
    }

    /// Rewrites the triple into the canonical presentation of its language:
    /// periodic parts replaced by primitive roots, middle letters absorbed
    /// into the periodic parts by rotation, and `^ω w w^ω` collapsed to
    /// `(ε, ε, w)`.
    pub fn canonical(&self) -> BiWordTriple {
        let mut v = self.v.primitive_root();
        let mut w = self.w.primitive_root();
        let mut u = self.u.letters().to_vec();
        if !v.is_empty() {
            while !u.is_empty() && u[0] == v.letters()[0] {
                u.remove(0);
                v = v.rotate(1);
            }
        }
        if !w.is_empty() {
            while !u.is_empty() && u.last() == w.letters().last() {
                u.pop();
                w = w.rotate(w.len() - 1);
            }
        }
        let u = Word(u);
        if u.is_empty() && !v.is_empty() && !w.is_empty() && v.rotate(0) == w {
            // ^ω w w^ω is periodic; its language is that of w^ω.
            return BiWordTriple::new(Word::empty(), Word::empty(), w.least_rotation());
        }
        if u.is_empty() && v.is_empty() && !w.is_empty() {
            return BiWordTriple::new(Word::empty(), Word::empty(), w.least_rotation());
        }
        if u.is_empty() && w.is_empty() && !v.is_empty() {
            return BiWordTriple::new(Word::empty(), Word::empty(), v.least_rotation());
        }
        BiWordTriple::new(v, u, w)
    }
}

impl fmt::Display for BiWordTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all = [&self.v, &self.u, &self.w];
        if all.iter().all(|w| w.0.iter().all(|l| l.as_str().chars().count() == 1)) {
            let s = |w: &Word| w.0.iter().map(|l| l.as_str()).collect::<String>();
            write!(f, "^w({}){}({})^w", s(&self.v), s(&self.u), s(&self.w))
        } else {
            write!(f, "^w({}){}({})^w", self.v, self.u, self.w)
        }
    }
}

/// Factors of length ≤ `n` of `^ω v u w^ω`.
pub fn biword_factors(t: &BiWordTriple, n: usize) -> FactorSet {
    let mut words = BTreeSet::new();
    t.expand(n).factors_upto(n, &mut words);
    FactorSet::new(n, words)
}

/// True iff `u` is not a proper power.
pub fn is_primitive_word(u: &Word) -> Result<bool> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(u.primitive_root().len() == u.len())
}

/// Outcome of [`fine_wilf_merge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeResult {
    pub shift_equivalent: bool,
}

/// If `u2^m` is a suffix of `u^n v` and the overlap is long enough, the two
/// primitive words are conjugate and `u^n v u2^q = u^(n+q) v` for all `q`.
pub fn fine_wilf_merge(
    u: &Word,
    u2: &Word,
    v: &Word,
    n: usize,
    m: usize,
) -> Result<Option<MergeResult>> {
    for x in [u, u2] {
        if !is_primitive_word(x)? {
            return Err(Error::NotPrimitive(x.to_string()));
        }
    }
    let lhs = u.repeat(n).concat(v);
    if !lhs.ends_with(&u2.repeat(m)) {
        return Ok(None);
    }
    let g = num::integer::gcd(u.len(), u2.len());
    if m * u2.len() + g < v.len() + u.len() + u2.len() {
        return Ok(None);
    }
    let shifted = (0..u.len()).any(|i| u.rotate(i) == *u2);
    let identity = lhs.concat(u2) == u.repeat(n + 1).concat(v);
    if u.len() != u2.len() || !shifted || !identity {
        return Ok(None);
    }
    Ok(Some(MergeResult {
        shift_equivalent: true,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_chars(s)
    }

    fn set(words: &[&str]) -> BTreeSet<Word> {
        words
            .iter()
            .map(|s| if *s == "ε" { Word::empty() } else { w(s) })
            .collect()
    }

    #[test]
    fn biword_examples() {
        let t = BiWordTriple::new(w("1"), Word::empty(), w("2"));
        assert_eq!(
            biword_factors(&t, 2).words,
            set(&["ε", "1", "2", "11", "12", "22"])
        );
        let e = BiWordTriple::new(Word::empty(), Word::empty(), Word::empty());
        assert_eq!(biword_factors(&e, 5).words, set(&["ε"]));
        let f = BiWordTriple::new(Word::empty(), w("012111"), Word::empty());
        assert_eq!(
            biword_factors(&f, 2).words,
            set(&["ε", "0", "1", "2", "01", "12", "21", "11"])
        );
    }

    #[test]
    fn primitive_words() {
        assert!(is_primitive_word(&w("01")).unwrap());
        assert!(!is_primitive_word(&w("0101")).unwrap());
        assert!(is_primitive_word(&w("0")).unwrap());
        assert_eq!(is_primitive_word(&Word::empty()), Err(Error::EmptyWord));
    }

    #[test]
    fn merge_examples() {
        let r = fine_wilf_merge(&w("ab"), &w("ba"), &w("a"), 3, 2).unwrap();
        assert_eq!(
            r,
            Some(MergeResult {
                shift_equivalent: true
            })
        );
        assert_eq!(
            fine_wilf_merge(&w("ab"), &w("cd"), &Word::empty(), 3, 2).unwrap(),
            None
        );
        assert!(fine_wilf_merge(&w("a"), &w("a"), &Word::empty(), 2, 2)
            .unwrap()
            .is_some());
        assert!(fine_wilf_merge(&w("aa"), &w("a"), &Word::empty(), 2, 2).is_err());
    }

    #[test]
    fn canonical_text_form() {
        let t = BiWordTriple::new(w("1"), Word::empty(), w("2"));
        assert_eq!(t.to_string(), "^w(1)(2)^w");
        assert_eq!(BiWordTriple::new(Word::empty(), w("01"), Word::empty()).to_string(), "^w()01()^w");
        let multi = BiWordTriple::new(Word::empty(), Word::parse("q0 q1").unwrap(), Word::empty());
        assert_eq!(multi.to_string(), "^w()q0 q1()^w");
        assert_eq!(BiWordTriple::parse_canonical("^w()012111()^w").unwrap().u, w("012111"));
        assert_eq!(BiWordTriple::parse_canonical("^w(1)(2)^w").unwrap(), t);
        let t = BiWordTriple::parse_canonical("^w()0 1 2(1 1)^w").unwrap();
        assert_eq!(t.u, w("012"));
        assert_eq!(t.w, w("11"));
    }

    #[test]
    fn canonicalization_absorbs_middle() {
        let t = BiWordTriple::new(w("1"), w("12"), w("2")).canonical();
        assert_eq!(t, BiWordTriple::new(w("1"), Word::empty(), w("2")));
        let t = BiWordTriple::new(w("11"), Word::empty(), w("1")).canonical();
        assert_eq!(t, BiWordTriple::new(Word::empty(), Word::empty(), w("1")));
        let t = BiWordTriple::new(w("1"), w("0"), w("1")).canonical();
        assert_eq!(t, BiWordTriple::new(w("1"), w("0"), w("1")));
    }

    #[test]
    fn powers() {
        assert!(w("0101").is_suffix_of_power(&w("01")));
        assert!(w("101").is_suffix_of_power(&w("01")));
        assert!(!w("00").is_suffix_of_power(&w("01")));
        assert!(w("010").is_prefix_of_power(&w("01")));
        assert!(!w("1").is_prefix_of_power(&w("01")));
        assert_eq!(w("abab").primitive_root(), w("ab"));
        assert_eq!(w("ba").least_rotation(), w("ab"));
    }
}
