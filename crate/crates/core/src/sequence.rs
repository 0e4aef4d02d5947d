//! Coded fixed points of substitutions and automatic sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::SubFile;
use crate::language::{fixpoint_language, IndexWord};
use crate::limits::Budget;
use crate::substitution::Substitution;
use crate::word::{FactorSet, Letter, Word};

/// Reserved token for the marker letter of [`spec_from_tail_words`].
pub const SPADE: &str = "♠";

/// `π(φ^ω(seed))` for a growing substitution `φ`, a coding `π` and a
/// prolongable seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutiveSpec {
    phi: Substitution,
    /// Output alphabet, sorted and deduplicated.
    outputs: Vec<Letter>,
    /// Output index of each letter of `phi`.
    code: Vec<usize>,
    seed: usize,
}

impl SubstitutiveSpec {
    /// `coding` may be partial; unlisted letters map to themselves.
    pub fn new(phi: Substitution, coding: &BTreeMap<Letter, Letter>, seed: &Letter) -> Result<Self> {
        let seed_ix = phi
            .index_of(seed)
            .ok_or_else(|| Error::UnknownLetter(seed.to_string()))?;
        let images: Vec<Letter> = phi
            .alphabet()
            .iter()
            .map(|a| coding.get(a).cloned().unwrap_or_else(|| a.clone()))
            .collect();
        for a in coding.keys() {
            if phi.index_of(a).is_none() {
                return Err(Error::UnknownLetter(a.to_string()));
            }
        }
        Self::from_images(phi, images, seed_ix)
    }

    pub fn identity(phi: Substitution, seed: &Letter) -> Result<Self> {
        Self::new(phi, &BTreeMap::new(), seed)
    }

    /// `coding[i]` is the output letter of letter `i`.
    pub fn from_images(phi: Substitution, coding: Vec<Letter>, seed: usize) -> Result<Self> {
        if coding.len() != phi.size() || seed >= phi.size() {
            return Err(Error::InvalidArgument("coding must cover the alphabet".into()));
        }
        phi.require_growing()?;
        if phi.rule(seed)[0] != seed {
            return Err(Error::NotProlongable(phi.letter(seed).to_string()));
        }
        let outputs: Vec<Letter> = coding.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let code = coding
            .iter()
            .map(|l| outputs.binary_search(l).unwrap())
            .collect();
        Ok(SubstitutiveSpec {
            phi,
            outputs,
            code,
            seed,
        })
    }

    /// Builds a spec from a parsed file; without a `seed:` line the first
    /// prolongable letter is used.
    pub fn from_sub_file(file: &SubFile) -> Result<Self> {
        let seed = match &file.seed {
            Some(s) => s.clone(),
            None => {
                let i = (0..file.phi.size())
                    .find(|&a| file.phi.rule(a)[0] == a)
                    .ok_or_else(|| Error::NotProlongable("(no prolongable letter)".into()))?;
                file.phi.letter(i).clone()
            }
        };
        Self::new(file.phi.clone(), &file.coding, &seed)
    }

    pub fn phi(&self) -> &Substitution {
        &self.phi
    }

    pub fn seed(&self) -> usize {
        self.seed
    }

    pub fn seed_letter(&self) -> &Letter {
        self.phi.letter(self.seed)
    }

    pub fn outputs(&self) -> &[Letter] {
        &self.outputs
    }

    /// Output index of each letter of `phi`.
    pub fn code(&self) -> &[usize] {
        &self.code
    }

    pub fn coding_of(&self, a: usize) -> &Letter {
        &self.outputs[self.code[a]]
    }

    pub fn coding_map(&self) -> BTreeMap<Letter, Letter> {
        (0..self.phi.size())
            .map(|a| (self.phi.letter(a).clone(), self.coding_of(a).clone()))
            .collect()
    }

    /// Back to the file representation.
    pub fn to_sub_file(&self, base: Option<usize>) -> SubFile {
        SubFile {
            phi: self.phi.clone(),
            coding: self
                .coding_map()
                .into_iter()
                .filter(|(a, b)| a != b)
                .collect(),
            seed: Some(self.seed_letter().clone()),
            base,
        }
    }

    /// The same sequence with `phi` restricted to letters reachable from the
    /// seed.
    pub fn restricted(&self) -> Result<SubstitutiveSpec> {
        let keep = self.phi.reachable(&[self.seed]);
        let (phi, map) = self.phi.restrict(&keep)?;
        let coding = map.iter().map(|&i| self.coding_of(i).clone()).collect();
        let seed = map.iter().position(|&i| i == self.seed).unwrap();
        SubstitutiveSpec::from_images(phi, coding, seed)
    }

    /// The first `n` letters of `φ^ω(seed)` before coding.
    pub fn underlying_prefix(&self, n: usize) -> Result<Vec<usize>> {
        let mut budget = Budget::new();
        let mut cur = vec![self.seed];
        while cur.len() < n {
            let mut next = Vec::with_capacity(n.min(cur.len() * 4));
            for &a in &cur {
                next.extend_from_slice(self.phi.rule(a));
                if next.len() >= n {
                    break;
                }
            }
            budget.spend(next.len())?;
            cur = next;
        }
        cur.truncate(n);
        Ok(cur)
    }

    /// Output indices of the first `n` letters.
    pub fn coded_prefix(&self, n: usize) -> Result<Vec<usize>> {
        Ok(self.underlying_prefix(n)?.iter().map(|&a| self.code[a]).collect())
    }

    pub fn fixpoint_prefix(&self, n: usize) -> Result<Word> {
        Ok(self.decode_output(&self.coded_prefix(n)?))
    }

    pub fn decode_output(&self, w: &[usize]) -> Word {
        w.iter().map(|&i| self.outputs[i].clone()).collect()
    }

    /// Output indices of a word, or `None` if it uses a letter outside the
    /// output alphabet.
    pub fn encode_output(&self, w: &Word) -> Option<Vec<usize>> {
        w.letters()
            .iter()
            .map(|l| self.outputs.binary_search(l).ok())
            .collect()
    }

    /// Underlying factors of length `≤ n`.
    pub fn underlying_language(&self, n: usize) -> Result<BTreeSet<IndexWord>> {
        fixpoint_language(&self.phi, self.seed, n)
    }

    /// Coded factors of length `≤ n`, as output indices.
    pub fn coded_language(&self, n: usize) -> Result<BTreeSet<IndexWord>> {
        Ok(self
            .underlying_language(n)?
            .into_iter()
            .map(|w| w.iter().map(|&a| self.code[a]).collect())
            .collect())
    }

    /// Exactly the factors of length `≤ n`.
    pub fn factor_set(&self, n: usize) -> Result<FactorSet> {
        let words = self
            .coded_language(n)?
            .iter()
            .map(|w| self.decode_output(w))
            .collect();
        Ok(FactorSet::new(n, words))
    }

    /// A prefix length that contains every factor of length `≤ n`.
    ///
    /// With `P` past the first occurrence of every two-letter factor and `m`
    /// such that every reachable image `φᵐ(a)` has length `≥ n`, each factor
    /// of length `n` sits inside some `φᵐ(bc)` and so inside `φᵐ(x[0..P))`.
    pub fn certified_prefix_len(&self, n: usize) -> Result<usize> {
        let reach = self.phi.reachable(&[self.seed]);
        let pairs: BTreeSet<IndexWord> = self
            .underlying_language(2)?
            .into_iter()
            .filter(|w| w.len() == 2)
            .collect();
        let mut need: BTreeSet<&IndexWord> = pairs.iter().collect();
        let mut len = 64;
        let p = loop {
            let prefix = self.underlying_prefix(len)?;
            let mut last = 0;
            for (i, win) in prefix.windows(2).enumerate() {
                if need.remove(&win.to_vec()) {
                    last = i + 2;
                }
                if need.is_empty() {
                    break;
                }
            }
            if need.is_empty() {
                break last.max(1);
            }
            need = pairs.iter().collect();
            len *= 2;
            Budget::new().spend(len)?;
        };
        let prefix = self.underlying_prefix(p)?;
        let cap = crate::limits::max_steps() as u128;
        let mut lens: Vec<u128> = vec![1; self.phi.size()];
        loop {
            let min = reach.iter().map(|&a| lens[a]).min().unwrap();
            if min >= n as u128 {
                break;
            }
            lens = (0..self.phi.size())
                .map(|a| self.phi.rule(a).iter().map(|&b| lens[b]).sum::<u128>().min(cap + 1))
                .collect();
        }
        let total: u128 = prefix.iter().map(|&a| lens[a]).sum();
        if total > cap {
            return Err(Error::StepLimit(cap as u64));
        }
        Ok(total as usize)
    }

    /// Whether `w` is a factor of the coded sequence.
    pub fn has_factor(&self, w: &Word) -> Result<bool> {
        let Some(target) = self.encode_output(w) else {
            return Ok(false);
        };
        if target.is_empty() {
            return Ok(true);
        }
        let prefix = self.coded_prefix(self.certified_prefix_len(target.len())?)?;
        Ok(prefix.windows(target.len()).any(|x| x == target.as_slice()))
    }

    /// Bounded ultimate-periodicity test.
    ///
    /// If some `m ≤ bound` has `p(m) = p(m+1)`, every factor of length `m`
    /// has a unique right extension and the sequence is ultimately periodic
    /// with preperiod and period at most `p(m)`; the exact pair is then read
    /// off a prefix. Otherwise the answer is only presumed.
    pub fn periodicity_bounded(&self, bound: usize) -> Result<Periodicity> {
        if bound == 0 {
            return Err(Error::InvalidArgument("bound must be at least 1".into()));
        }
        let lang = self.coded_language(bound + 1)?;
        let mut p = vec![0usize; bound + 2];
        for w in &lang {
            p[w.len()] += 1;
        }
        let Some(m) = (0..=bound).find(|&m| p[m] == p[m + 1]) else {
            return Ok(Periodicity::PresumedAperiodic {
                n: bound,
                complexity: p[bound],
            });
        };
        let pm = p[m];
        let x = self.coded_prefix(3 * pm + m + 2)?;
        let mut seen: HashMap<&[usize], usize> = HashMap::new();
        let (pre0, per0) = (0..=pm)
            .find_map(|i| {
                let win = &x[i..i + m];
                match seen.get(win) {
                    Some(&j) => Some((j, i - j)),
                    None => {
                        seen.insert(win, i);
                        None
                    }
                }
            })
            .expect("window sequence repeats within p(m)+1 steps");
        let period = (1..=per0)
            .filter(|d| per0 % d == 0)
            .find(|&d| (pre0..pre0 + per0).all(|i| x[i] == x[i + d]))
            .unwrap();
        let mut pre = pre0;
        while pre > 0 && x[pre - 1] == x[pre - 1 + period] {
            pre -= 1;
        }
        let check = (4 * bound * bound).max(pre + 2 * period);
        let y = self.coded_prefix(check)?;
        assert!((pre..check - period).all(|i| y[i] == y[i + period]));
        Ok(Periodicity::Certified {
            preperiod: pre,
            period: self.decode_output(&x[pre..pre + period]),
        })
    }
}

/// Result of [`SubstitutiveSpec::periodicity_bounded`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Periodicity {
    /// The sequence is `x[0..preperiod) · period^ω`, with `period` primitive
    /// and both minimal.
    Certified { preperiod: usize, period: Word },
    /// No complexity plateau up to `n`; `complexity = p(n)`.
    PresumedAperiodic { n: usize, complexity: usize },
}

/// A substitutive spec of constant length `k ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomaticSpec {
    pub spec: SubstitutiveSpec,
    pub base: usize,
}

impl AutomaticSpec {
    pub fn new(spec: SubstitutiveSpec) -> Result<Self> {
        match spec.phi.constant_length() {
            Some(k) if k >= 2 => Ok(AutomaticSpec { spec, base: k }),
            _ => Err(Error::NotConstantLength),
        }
    }

    pub fn from_sub_file(file: &SubFile) -> Result<Self> {
        Self::new(SubstitutiveSpec::from_sub_file(file)?)
    }

    /// The `k`-kernel as letter maps on the underlying alphabet.
    pub fn kernel(&self) -> KernelDescription {
        let phi = &self.spec.phi;
        let n = phi.size();
        let generators: Vec<Vec<usize>> = (0..self.base)
            .map(|j| (0..n).map(|b| phi.rule(b)[j]).collect())
            .collect();
        let identity: Vec<usize> = (0..n).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity.clone(), 0);
        let mut maps = vec![identity];
        let mut i = 0;
        while i < maps.len() {
            for f in &generators {
                let h: Vec<usize> = maps[i].iter().map(|&x| f[x]).collect();
                if !index.contains_key(&h) {
                    index.insert(h.clone(), maps.len());
                    maps.push(h);
                }
            }
            i += 1;
        }
        KernelDescription {
            base: self.base,
            generators,
            maps,
        }
    }
}

/// The `k`-kernel of an automatic sequence: letter maps `g` such that each
/// kernel element is `π ∘ g` applied to the underlying fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDescription {
    pub base: usize,
    /// `generators[j](b)` is the `j`-th letter of `φ(b)`.
    pub generators: Vec<Vec<usize>>,
    /// Closure of the identity under `g ↦ f_j ∘ g`; the identity comes first.
    pub maps: Vec<Vec<usize>>,
}

impl KernelDescription {
    pub fn is_closed(&self) -> bool {
        let set: BTreeSet<&Vec<usize>> = self.maps.iter().collect();
        self.maps.iter().all(|g| {
            self.generators.iter().all(|f| {
                let h: Vec<usize> = g.iter().map(|&x| f[x]).collect();
                set.contains(&h)
            })
        })
    }
}

/// A spec whose sequence is `♠ · w · φ(w) · φ²(w) ⋯` over the alphabet of
/// `phi` plus the marker `♠`, which the coding keeps as the output `♠`.
/// Drop the first output letter to get `w φ(w) φ²(w) ⋯`.
pub fn spec_from_tail_words(phi: &Substitution, w: &Word) -> Result<SubstitutiveSpec> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if phi.alphabet().iter().any(|l| l.as_str() == SPADE) {
        return Err(Error::InvalidArgument(format!("alphabet already uses {SPADE}")));
    }
    let n = phi.size();
    let mut alphabet = phi.alphabet().to_vec();
    alphabet.push(Letter::new(SPADE)?);
    let mut rules = phi.rules().to_vec();
    let mut marker = vec![n];
    marker.extend(phi.encode(w)?);
    rules.push(marker);
    let ext = Substitution::from_indices(alphabet.clone(), rules)?;
    SubstitutiveSpec::from_images(ext, alphabet, n)
}

/// The first `n` letters of `w φ(w) φ²(w) ⋯`.
pub fn tail_words_prefix(phi: &Substitution, w: &Word, n: usize) -> Result<Word> {
    let spec = spec_from_tail_words(phi, w)?;
    let full = spec.fixpoint_prefix(n + 1)?;
    Ok(full.slice(1, full.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(pairs: &[(&str, &str)], seed: &str) -> SubstitutiveSpec {
        SubstitutiveSpec::identity(Substitution::compact(pairs).unwrap(), &Letter::new(seed).unwrap()).unwrap()
    }

    pub(crate) fn tm() -> SubstitutiveSpec {
        spec(&[("0", "01"), ("1", "10")], "0")
    }

    pub(crate) fn ex3x() -> SubstitutiveSpec {
        spec(&[("0", "012"), ("1", "111"), ("2", "222")], "0")
    }

    pub(crate) fn ex3y() -> SubstitutiveSpec {
        spec(&[("0", "0121"), ("1", "1111"), ("2", "2222")], "0")
    }

    fn brute(prefix: &Word, n: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        prefix.factors_upto(n, &mut out);
        out
    }

    #[test]
    fn prefixes() {
        assert_eq!(tm().fixpoint_prefix(8).unwrap().compact(), "01101001");
        assert_eq!(ex3x().fixpoint_prefix(13).unwrap().compact(), "0121112221111");
        assert_eq!(ex3y().fixpoint_prefix(13).unwrap().compact(), "0121111122221");
        assert_eq!(tm().fixpoint_prefix(0).unwrap(), Word::empty());
    }

    #[test]
    fn seed_must_be_prolongable() {
        let phi = Substitution::compact(&[("0", "01"), ("1", "10")]).unwrap();
        let e = SubstitutiveSpec::identity(phi, &Letter::new("1").unwrap());
        assert!(e.is_ok());
        let phi = Substitution::compact(&[("0", "12"), ("1", "11"), ("2", "23"), ("3", "32")]).unwrap();
        let e = SubstitutiveSpec::identity(phi, &Letter::new("0").unwrap());
        assert_eq!(e.unwrap_err(), Error::NotProlongable("0".into()));
    }

    #[test]
    fn factor_sets() {
        let f = tm().factor_set(3).unwrap();
        assert_eq!(f.len(), 13);
        assert!(!f.contains(&Word::from_chars("111")));
        assert_eq!(f.words, brute(&tm().fixpoint_prefix(1 << 10).unwrap(), 3));
        let z = spec(&[("0", "00")], "0").factor_set(4).unwrap();
        assert_eq!(z.len(), 5);
        let x = ex3x().factor_set(2).unwrap();
        let expect: BTreeSet<Word> = ["", "0", "1", "2", "01", "12", "11", "21", "22"]
            .iter()
            .map(|s| Word::from_chars(s))
            .collect();
        assert_eq!(x.words, expect);
    }

    #[test]
    fn certified_prefix_contains_all_factors() {
        for s in [tm(), ex3x(), ex3y()] {
            for n in [1, 3, 7] {
                let len = s.certified_prefix_len(n).unwrap();
                let p = s.fixpoint_prefix(len).unwrap();
                assert_eq!(brute(&p, n), s.factor_set(n).unwrap().words);
            }
        }
    }

    #[test]
    fn membership() {
        assert!(tm().has_factor(&Word::from_chars("0110")).unwrap());
        assert!(!tm().has_factor(&Word::from_chars("01110")).unwrap());
        assert!(!ex3x().has_factor(&Word::from_chars("20")).unwrap());
        assert!(!ex3x().has_factor(&Word::from_chars("x")).unwrap());
    }

    #[test]
    fn periodicity() {
        let z = spec(&[("0", "00")], "0");
        assert_eq!(
            z.periodicity_bounded(10).unwrap(),
            Periodicity::Certified {
                preperiod: 0,
                period: Word::from_chars("0")
            }
        );
        assert_eq!(
            tm().periodicity_bounded(10).unwrap(),
            Periodicity::PresumedAperiodic { n: 10, complexity: 28 }
        );
        let one = spec(&[("1", "11")], "1");
        assert_eq!(
            one.periodicity_bounded(10).unwrap(),
            Periodicity::Certified {
                preperiod: 0,
                period: Word::from_chars("1")
            }
        );
        let s = spec(&[("0", "0121"), ("1", "12"), ("2", "21")], "0");
        // 0 then 121 212 ... : 1 and 2 alternate forever after the 0.
        let s2 = spec(&[("0", "012"), ("1", "12"), ("2", "12")], "0");
        assert_eq!(
            s2.periodicity_bounded(10).unwrap(),
            Periodicity::Certified {
                preperiod: 1,
                period: Word::from_chars("12")
            }
        );
        assert!(matches!(
            s.periodicity_bounded(4).unwrap(),
            Periodicity::PresumedAperiodic { .. }
        ));
    }

    #[test]
    fn kernels() {
        let k = AutomaticSpec::new(tm()).unwrap().kernel();
        assert_eq!(k.maps, vec![vec![0, 1], vec![1, 0]]);
        assert!(k.is_closed());
        let z = AutomaticSpec::new(spec(&[("0", "00")], "0")).unwrap().kernel();
        assert_eq!(z.maps, vec![vec![0]]);
        let a = AutomaticSpec::new(ex3x()).unwrap();
        let k = a.kernel();
        assert!(k.maps.len() <= 27 && k.is_closed());
        let u = a.spec.underlying_prefix(3 * 10_000).unwrap();
        for n in 0..10_000 {
            for j in 0..3 {
                assert_eq!(u[3 * n + j], k.generators[j][u[n]]);
            }
        }
        let uneven = spec(&[("0", "012"), ("1", "11"), ("2", "22")], "0");
        assert_eq!(AutomaticSpec::new(uneven).unwrap_err(), Error::NotConstantLength);
    }

    #[test]
    fn tail_words() {
        let phi = Substitution::compact(&[("2", "23"), ("3", "32")]).unwrap();
        assert_eq!(
            tail_words_prefix(&phi, &Word::from_chars("23"), 14).unwrap().compact(),
            "23233223323223"
        );
        let z = Substitution::compact(&[("0", "00")]).unwrap();
        assert_eq!(tail_words_prefix(&z, &Word::from_chars("0"), 5).unwrap().compact(), "00000");
        let t = Substitution::compact(&[("2", "22"), ("3", "33")]).unwrap();
        assert_eq!(
            tail_words_prefix(&t, &Word::from_chars("23"), 14).unwrap().compact(),
            "23223322223333"
        );
        assert_eq!(spec_from_tail_words(&z, &Word::empty()).unwrap_err(), Error::EmptyWord);
    }
}
