//! Substitutions over a finite ordered alphabet.
//!
//! Letters are stored by index into the alphabet; the public API converts to
//! and from [`Letter`] and [`Word`].

use std::collections::HashMap;
use std::fmt;

use num::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Budget;
use crate::word::{Letter, Word};

#[derive(Clone)]
pub struct Substitution {
    alphabet: Vec<Letter>,
    index: HashMap<Letter, usize>,
    rules: Vec<Vec<usize>>,
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.rules == other.rules
    }
}

impl Eq for Substitution {}

impl Substitution {
    /// Builds a substitution from an alphabet and one image per letter, in
    /// alphabet order.
    pub fn new(alphabet: Vec<Letter>, images: Vec<Word>) -> Result<Self> {
        let index = build_index(&alphabet)?;
        if images.len() != alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "{} letters but {} images",
                alphabet.len(),
                images.len()
            )));
        }
        let mut rules = Vec::with_capacity(images.len());
        for img in &images {
            rules.push(encode_with(&index, img)?);
        }
        Self::checked(alphabet, index, rules)
    }

    /// Builds a substitution from index-valued rules.
    pub fn from_indices(alphabet: Vec<Letter>, rules: Vec<Vec<usize>>) -> Result<Self> {
        let index = build_index(&alphabet)?;
        if rules.len() != alphabet.len() || rules.iter().flatten().any(|&i| i >= alphabet.len()) {
            return Err(Error::InvalidArgument("rule refers to a missing letter".into()));
        }
        Self::checked(alphabet, index, rules)
    }

    /// Shorthand for single-character alphabets: `compact(&[("0","01"),("1","10")])`.
    pub fn compact(pairs: &[(&str, &str)]) -> Result<Self> {
        let alphabet = pairs
            .iter()
            .map(|(a, _)| Letter::new(a))
            .collect::<Result<Vec<_>>>()?;
        let images = pairs.iter().map(|(_, w)| Word::from_chars(w)).collect();
        Self::new(alphabet, images)
    }

    fn checked(alphabet: Vec<Letter>, index: HashMap<Letter, usize>, rules: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(i) = rules.iter().position(|r| r.is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "empty image for letter {}",
                alphabet[i]
            )));
        }
        Ok(Substitution {
            alphabet,
            index,
            rules,
        })
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn letter(&self, i: usize) -> &Letter {
        &self.alphabet[i]
    }

    pub fn index_of(&self, l: &Letter) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn index_of_str(&self, token: &str) -> Result<usize> {
        Letter::new(token)
            .ok()
            .and_then(|l| self.index_of(&l))
            .ok_or_else(|| Error::UnknownLetter(token.to_string()))
    }

    pub fn rule(&self, i: usize) -> &[usize] {
        &self.rules[i]
    }

    pub fn rules(&self) -> &[Vec<usize>] {
        &self.rules
    }

    pub fn image(&self, l: &Letter) -> Result<Word> {
        let i = self
            .index_of(l)
            .ok_or_else(|| Error::UnknownLetter(l.to_string()))?;
        Ok(self.decode(&self.rules[i]))
    }

    pub fn encode(&self, w: &Word) -> Result<Vec<usize>> {
        encode_with(&self.index, w)
    }

    pub fn decode(&self, w: &[usize]) -> Word {
        w.iter().map(|&i| self.alphabet[i].clone()).collect()
    }

    pub fn apply(&self, w: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(w.len() * 2);
        for &a in w {
            out.extend_from_slice(&self.rules[a]);
        }
        out
    }

    pub fn apply_word(&self, w: &Word) -> Result<Word> {
        Ok(self.decode(&self.apply(&self.encode(w)?)))
    }

    /// `φⁿ(w)`, charging the budget for every produced letter.
    pub fn iterate(&self, w: &[usize], n: usize, budget: &mut Budget) -> Result<Vec<usize>> {
        let mut cur = w.to_vec();
        for _ in 0..n {
            cur = self.apply(&cur);
            budget.spend(cur.len())?;
        }
        Ok(cur)
    }

    /// The common image length, if every image has the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let k = self.rules[0].len();
        self.rules.iter().all(|r| r.len() == k).then_some(k)
    }

    pub fn min_image_len(&self) -> usize {
        self.rules.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `|φⁿ(a)|` for every letter.
    pub fn image_lengths(&self, n: usize) -> Vec<BigUint> {
        let mut lens = vec![BigUint::from(1u32); self.size()];
        for _ in 0..n {
            lens = self
                .rules
                .iter()
                .map(|r| r.iter().map(|&b| &lens[b]).sum())
                .collect();
        }
        lens
    }

    /// Letters whose iterated images stay bounded. Lengths never decrease,
    /// and a plateau lasting `|A|` steps can only come from renaming cycles,
    /// so comparing steps `|A|` and `2|A|` is exact.
    pub fn bounded_letters(&self) -> Vec<usize> {
        let n = self.size();
        let a = self.image_lengths(n);
        let b = self.image_lengths(2 * n);
        (0..n).filter(|&i| a[i] == b[i]).collect()
    }

    pub fn is_growing(&self) -> bool {
        self.bounded_letters().is_empty()
    }

    pub(crate) fn require_growing(&self) -> Result<()> {
        match self.bounded_letters().first() {
            Some(&i) => Err(Error::NotGrowing(self.alphabet[i].to_string())),
            None => Ok(()),
        }
    }

    /// The `n`-fold composition.
    pub fn power(&self, n: usize) -> Result<Substitution> {
        if n == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        let mut budget = Budget::new();
        let mut rules = self.rules.clone();
        for _ in 1..n {
            rules = rules
                .iter()
                .map(|r| {
                    let img = self.apply(r);
                    budget.spend(img.len()).map(|_| img)
                })
                .collect::<Result<_>>()?;
        }
        Ok(Substitution {
            alphabet: self.alphabet.clone(),
            index: self.index.clone(),
            rules,
        })
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Substitution) -> Substitution {
        Substitution {
            alphabet: self.alphabet.clone(),
            index: self.index.clone(),
            rules: other.rules.iter().map(|r| self.apply(r)).collect(),
        }
    }

    /// The restriction to a set of letters closed under the substitution.
    /// Returns the restricted substitution and, for each of its letters, the
    /// index in `self`.
    pub fn restrict(&self, letters: &[usize]) -> Result<(Substitution, Vec<usize>)> {
        let mut keep: Vec<usize> = letters.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut pos = vec![usize::MAX; self.size()];
        for (j, &i) in keep.iter().enumerate() {
            pos[i] = j;
        }
        let mut rules = Vec::with_capacity(keep.len());
        for &i in &keep {
            let r: Option<Vec<usize>> = self.rules[i]
                .iter()
                .map(|&b| (pos[b] != usize::MAX).then_some(pos[b]))
                .collect();
            rules.push(r.ok_or_else(|| {
                Error::InvalidArgument("letter set is not closed under the substitution".into())
            })?);
        }
        let alphabet = keep.iter().map(|&i| self.alphabet[i].clone()).collect();
        Ok((Substitution::from_indices(alphabet, rules)?, keep))
    }

    /// Letters reachable from `start` (including `start`).
    pub fn reachable(&self, start: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size()];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(a) = stack.pop() {
            for &b in &self.rules[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        (0..self.size()).filter(|&i| seen[i]).collect()
    }
}

fn build_index(alphabet: &[Letter]) -> Result<HashMap<Letter, usize>> {
    if alphabet.is_empty() {
        return Err(Error::InvalidArgument("empty alphabet".into()));
    }
    let mut index = HashMap::with_capacity(alphabet.len());
    for (i, l) in alphabet.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate letter {l}")));
        }
    }
    Ok(index)
}

fn encode_with(index: &HashMap<Letter, usize>, w: &Word) -> Result<Vec<usize>> {
    w.letters()
        .iter()
        .map(|l| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownLetter(l.to_string()))
        })
        .collect()
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.size())
            .map(|i| format!("{}->{}", self.alphabet[i], self.decode(&self.rules[i]).compact()))
            .collect();
        write!(f, "Substitution({})", parts.join(", "))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "alphabet: {}",
            self.alphabet
                .iter()
                .map(|l| l.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        )?;
        for i in 0..self.size() {
            writeln!(f, "rule {} -> {}", self.alphabet[i], self.decode(&self.rules[i]))?;
        }
        Ok(())
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rules: Vec<(String, String)> = (0..self.size())
            .map(|i| {
                (
                    self.alphabet[i].to_string(),
                    self.decode(&self.rules[i]).to_string(),
                )
            })
            .collect();
        let mut st = s.serialize_struct("Substitution", 2)?;
        st.serialize_field("alphabet", &self.alphabet)?;
        st.serialize_field("rules", &rules)?;
        st.end()
    }
}
