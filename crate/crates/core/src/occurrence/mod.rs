//! Occurrence sets `{n ≥ 0 : v uⁿ w is a factor}` of automatic sequences.
//!
//! The answer is a finite set together with finitely many progressions
//! `{a·k^{m·t} + b : t ≥ 0}`. When `v` is a suffix of a power of `u` or `w`
//! a prefix of one, the set is downward closed and is reduced to maximal
//! periodic stretches with non-periodic flanks; otherwise runs of `u`
//! between `v` and `w` are solved exactly through a block presentation.

mod blocks;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sequence::{AutomaticSpec, SubstitutiveSpec};
use crate::word::Word;

use self::blocks::{rational_is_integer, CoreSolver, RawSet, Sym};

/// `{a·base^{m·t} + b : t ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeometricSet {
    pub a: BigRational,
    pub b: BigRational,
    pub base: u64,
    pub m: u32,
}

impl GeometricSet {
    pub fn new(a: BigRational, b: BigRational, base: u64, m: u32) -> Result<Self> {
        let g = GeometricSet { a, b, base, m };
        if base < 2 || m == 0 || g.a.is_negative() {
            return Err(Error::InvalidArgument(format!("malformed progression {g}")));
        }
        if !g.is_integral() || (&g.a + &g.b).is_negative() {
            return Err(Error::InvalidArgument(format!("progression {g} has non-natural elements")));
        }
        Ok(g)
    }

    /// `base^m`.
    pub fn ratio(&self) -> BigInt {
        num::pow(BigInt::from(self.base), self.m as usize)
    }

    /// `a + b ∈ ℤ` and `(base^m − 1)·a ∈ ℤ`.
    pub fn is_integral(&self) -> bool {
        let step = BigRational::from_integer(self.ratio() - 1);
        rational_is_integer(&(&self.a + &self.b)) && rational_is_integer(&(&self.a * step))
    }

    /// The `t`-th element.
    pub fn element(&self, t: u32) -> BigInt {
        let v = &self.a * BigRational::from_integer(num::pow(self.ratio(), t as usize)) + &self.b;
        v.to_integer()
    }

    /// Elements `≤ n_max`.
    pub fn elements_upto(&self, n_max: u64) -> Vec<u64> {
        let mut out = Vec::new();
        if self.a.is_zero() {
            if let Some(v) = self.b.to_integer().to_u64().filter(|&v| v <= n_max) {
                out.push(v);
            }
            return out;
        }
        let r = BigRational::from_integer(self.ratio());
        let mut cur = self.a.clone();
        loop {
            let v = (&cur + &self.b).to_integer();
            match v.to_u64() {
                Some(v) if v <= n_max => out.push(v),
                _ if v.is_negative() => {}
                _ => break,
            }
            cur *= &r;
        }
        out
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements_upto(n).last() == Some(&n)
    }
}

fn fmt_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for GeometricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.b.is_negative() {
            format!("-{}", fmt_rational(&-self.b.clone()))
        } else {
            format!("+{}", fmt_rational(&self.b))
        };
        write!(f, "{{{}*{}^({}*n){} : n>=0}}", fmt_rational(&self.a), self.base, self.m, b)
    }
}

impl Serialize for GeometricSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GeometricSet", 4)?;
        st.serialize_field("a", &fmt_rational(&self.a))?;
        st.serialize_field("b", &fmt_rational(&self.b))?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("m", &self.m)?;
        st.end()
    }
}

/// A set of natural numbers: everything, or a finite set plus progressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OccurrenceSet {
    AllNaturals,
    Structured {
        finite_part: BTreeSet<u64>,
        progressions: Vec<GeometricSet>,
    },
}

impl OccurrenceSet {
    pub fn empty() -> Self {
        OccurrenceSet::Structured {
            finite_part: BTreeSet::new(),
            progressions: Vec::new(),
        }
    }

    pub fn finite(values: impl IntoIterator<Item = u64>) -> Self {
        OccurrenceSet::Structured {
            finite_part: values.into_iter().collect(),
            progressions: Vec::new(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OccurrenceSet::Structured { progressions, .. } if progressions.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, OccurrenceSet::Structured { finite_part, progressions }
            if finite_part.is_empty() && progressions.is_empty())
    }

    pub fn progressions(&self) -> &[GeometricSet] {
        match self {
            OccurrenceSet::AllNaturals => &[],
            OccurrenceSet::Structured { progressions, .. } => progressions,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            OccurrenceSet::AllNaturals => true,
            OccurrenceSet::Structured {
                finite_part,
                progressions,
            } => finite_part.contains(&n) || progressions.iter().any(|g| g.contains(n)),
        }
    }
}

impl fmt::Display for OccurrenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OccurrenceSet::AllNaturals => write!(f, "ALL"),
            OccurrenceSet::Structured {
                finite_part,
                progressions,
            } => {
                let mut parts: Vec<String> = Vec::new();
                if !finite_part.is_empty() || progressions.is_empty() {
                    let items: Vec<String> = finite_part.iter().map(u64::to_string).collect();
                    parts.push(format!("{{{}}}", items.join(",")));
                }
                parts.extend(progressions.iter().map(GeometricSet::to_string));
                write!(f, "{}", parts.join(" U "))
            }
        }
    }
}

/// `s ∩ [0, n_max]`.
pub fn evaluate(s: &OccurrenceSet, n_max: u64) -> BTreeSet<u64> {
    match s {
        OccurrenceSet::AllNaturals => (0..=n_max).collect(),
        OccurrenceSet::Structured {
            finite_part,
            progressions,
        } => {
            let mut out: BTreeSet<u64> = finite_part.range(..=n_max).copied().collect();
            for g in progressions {
                out.extend(g.elements_upto(n_max));
            }
            out
        }
    }
}

/// Puts a finite set and progressions over a common base into a canonical
/// form: degenerate progressions become finite elements, progressions with
/// the same offset are merged to the smallest ratio that still describes
/// them, and finite elements just below a progression are absorbed into it.
pub fn normalize(finite: BTreeSet<u64>, progs: Vec<GeometricSet>) -> OccurrenceSet {
    let mut finite = finite;
    let mut progs = progs;
    loop {
        let before = (finite.clone(), progs.clone());
        let mut rest = Vec::new();
        for g in progs {
            if g.a.is_zero() {
                finite.insert(g.b.to_integer().to_u64().expect("natural offset"));
            } else {
                rest.push(g);
            }
        }
        finite.retain(|&n| !rest.iter().any(|g| g.contains(n)));

        let mut groups: BTreeMap<(BigRational, u64), Vec<GeometricSet>> = BTreeMap::new();
        for g in rest {
            groups.entry((g.b.clone(), g.base)).or_default().push(g);
        }
        let mut out = Vec::new();
        for ((b, base), group) in groups {
            let mstar = group.iter().fold(1u32, |acc, g| acc.lcm(&g.m));
            let kr = BigRational::from_integer(base.into());
            let kpow = |e: u32| num::pow(kr.clone(), e as usize);
            let mut avals: BTreeSet<BigRational> = BTreeSet::new();
            for g in &group {
                let step = kpow(g.m);
                let mut a = g.a.clone();
                for _ in 0..mstar / g.m {
                    avals.insert(a.clone());
                    a *= &step;
                }
            }
            // Drop values already generated by a smaller one.
            let big = kpow(mstar);
            let min = avals.iter().next().unwrap().clone();
            let redundant: Vec<BigRational> = avals
                .iter()
                .filter(|a| {
                    let mut x = (*a).clone() / &big;
                    while x >= min {
                        if avals.contains(&x) {
                            return true;
                        }
                        x /= &big;
                    }
                    false
                })
                .cloned()
                .collect();
            for a in redundant {
                avals.remove(&a);
            }
            while let Some(a0) = avals.iter().next().cloned() {
                let d = (1..=mstar)
                    .filter(|d| mstar % d == 0)
                    .find(|&d| (1..mstar / d).all(|i| avals.contains(&(&a0 * kpow(d * i)))))
                    .unwrap();
                for i in 0..mstar / d {
                    avals.remove(&(&a0 * kpow(d * i)));
                }
                let step = kpow(d);
                let mut a = a0;
                loop {
                    let prev = &a / &step;
                    let val = &prev + &b;
                    let hit = rational_is_integer(&val)
                        && val.to_integer().to_u64().is_some_and(|n| finite.contains(&n));
                    if !hit || prev.is_zero() {
                        break;
                    }
                    finite.remove(&val.to_integer().to_u64().unwrap());
                    a = prev;
                }
                out.push(GeometricSet {
                    a,
                    b: b.clone(),
                    base,
                    m: d,
                });
            }
        }
        out.sort();
        out.dedup();
        progs = out;
        finite.retain(|&n| !progs.iter().any(|g| g.contains(n)));
        if (finite.clone(), progs.clone()) == before {
            break;
        }
    }
    OccurrenceSet::Structured {
        finite_part: finite,
        progressions: progs,
    }
}

fn raw_to_set(raw: RawSet, base: usize) -> OccurrenceSet {
    let progs = raw
        .progs
        .into_iter()
        .map(|(a, b, m)| GeometricSet {
            a,
            b,
            base: base as u64,
            m,
        })
        .collect();
    normalize(raw.finite, progs)
}

fn suffix_of_power(x: &[Sym], r: &[usize]) -> bool {
    x.iter()
        .rev()
        .enumerate()
        .all(|(i, &s)| s == Some(r[r.len() - 1 - i % r.len()]))
}

fn prefix_of_power(x: &[usize], r: &[usize]) -> bool {
    x.iter().enumerate().all(|(i, &s)| s == r[i % r.len()])
}

/// Smallest `j ≥ 1` with `⌈j/2⌉·|u| ≥ len`.
fn window_power(u_len: usize, len: usize) -> usize {
    (2 * len.div_ceil(u_len)).saturating_sub(1).max(1)
}

/// The exact set `{n ≥ 0 : v uⁿ w is a factor}` in closed form.
pub fn occurrence_set(spec: &AutomaticSpec, v: &Word, u: &Word, w: &Word) -> Result<OccurrenceSet> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let s = &spec.spec;
    let (Some(vi), Some(wi)) = (s.encode_output(v), s.encode_output(w)) else {
        return Ok(OccurrenceSet::empty());
    };
    let Some(ui) = s.encode_output(u) else {
        // Only n = 0 can occur.
        let zero = s.has_factor(&v.concat(w))?;
        return Ok(OccurrenceSet::finite(zero.then_some(0)));
    };
    let vs: Vec<Sym> = vi.iter().map(|&a| Some(a)).collect();
    let left_deg = suffix_of_power(&vs, &ui);
    let right_deg = prefix_of_power(&wi, &ui);
    if !left_deg && !right_deg {
        let j = window_power(ui.len(), vi.len().max(wi.len()));
        let solver = CoreSolver::new(spec, &ui, j)?;
        return Ok(raw_to_set(solver.solve(&vs, &wi), solver.base()));
    }
    degenerate(spec, v, u, w, &vs, &wi, left_deg, right_deg)
}

/// At least one flank is periodic, so the set is downward closed. Every
/// occurrence lies in a maximal stretch of the primitive root `r`, cut off by
/// non-periodic flanks or running to the end of the sequence.
#[allow(clippy::too_many_arguments)]
fn degenerate(
    spec: &AutomaticSpec,
    v: &Word,
    u: &Word,
    w: &Word,
    vs: &[Sym],
    wi: &[usize],
    left_deg: bool,
    right_deg: bool,
) -> Result<OccurrenceSet> {
    let s = &spec.spec;
    let root = u.primitive_root();
    let e = (u.len() / root.len()) as u64;
    let r = s.encode_output(&root).unwrap();
    let outs = s.outputs().len();

    let lefts: Vec<Vec<Sym>> = if left_deg {
        let mut out = Vec::new();
        for sl in 0..r.len() {
            let tail: Vec<Sym> = r[r.len() - sl..].iter().map(|&a| Some(a)).collect();
            for a in std::iter::once(None).chain((0..outs).map(Some)) {
                let mut ctx = vec![a];
                ctx.extend_from_slice(&tail);
                if a.is_none() || !suffix_of_power(&ctx, &r) {
                    out.push(ctx);
                }
            }
        }
        out
    } else {
        vec![vs.to_vec()]
    };
    let rights: Vec<Vec<usize>> = if right_deg {
        let mut out = Vec::new();
        for sl in 0..r.len() {
            for b in 0..outs {
                let mut ctx = r[..sl].to_vec();
                ctx.push(b);
                if !prefix_of_power(&ctx, &r) {
                    out.push(ctx);
                }
            }
        }
        out
    } else {
        vec![wi.to_vec()]
    };

    let longest = lefts
        .iter()
        .map(Vec::len)
        .chain(rights.iter().map(Vec::len))
        .max()
        .unwrap();
    let solver = CoreSolver::new(spec, &r, window_power(r.len(), longest))?;
    let mut bound = 0u64;
    for lv in &lefts {
        for rw in &rights {
            match raw_to_set(solver.solve(lv, rw), solver.base()) {
                OccurrenceSet::Structured {
                    finite_part,
                    progressions,
                } if progressions.is_empty() => {
                    bound = bound.max(finite_part.last().copied().unwrap_or(0));
                }
                _ => return Ok(OccurrenceSet::AllNaturals),
            }
        }
    }
    if right_deg {
        if let Some(q) = solver.tail_start() {
            if left_deg {
                return Ok(OccurrenceSet::AllNaturals);
            }
            let x = s.coded_prefix(q + vs.len() + r.len())?;
            let vi: Vec<usize> = vs.iter().map(|a| a.unwrap()).collect();
            let hit = (q..=q + vi.len())
                .step_by(r.len())
                .any(|q2| q2 >= vi.len() && x[q2 - vi.len()..q2] == vi[..]);
            if hit {
                return Ok(OccurrenceSet::AllNaturals);
            }
        }
    }
    let n_max = (bound + 2) / e;
    Ok(OccurrenceSet::finite(occurrence_brute(s, v, u, w, n_max, None)?))
}

/// `{n ≤ n_max : v uⁿ w is a factor}` by scanning a prefix.
///
/// With `prefix_len = None` the certified prefix length for factors of the
/// longest candidate is used; an explicit length shorter than that is
/// rejected.
pub fn occurrence_brute(
    spec: &SubstitutiveSpec,
    v: &Word,
    u: &Word,
    w: &Word,
    n_max: u64,
    prefix_len: Option<usize>,
) -> Result<BTreeSet<u64>> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let (Some(vi), Some(wi)) = (spec.encode_output(v), spec.encode_output(w)) else {
        return Ok(BTreeSet::new());
    };
    let Some(ui) = spec.encode_output(u) else {
        let zero = spec.has_factor(&v.concat(w))?;
        return Ok(zero.then_some(0).into_iter().collect());
    };
    let longest = vi.len() + n_max as usize * ui.len() + wi.len();
    let needed = spec.certified_prefix_len(longest.max(1))?;
    let len = match prefix_len {
        Some(given) if given < needed => return Err(Error::InsufficientPrefix { needed, given }),
        Some(given) => given,
        None => needed,
    };
    let x = spec.coded_prefix(len)?;
    Ok(scan_runs(&x, &vi, &ui, &wi, n_max))
}

fn scan_runs(x: &[usize], v: &[usize], u: &[usize], w: &[usize], n_max: u64) -> BTreeSet<u64> {
    let len = x.len();
    let p = u.len();
    // run[i] = largest t with x[i..] starting with uᵗ inside the prefix.
    let mut run = vec![0u64; len + 1];
    for i in (0..len).rev() {
        if i + p <= len && x[i..i + p] == *u {
            run[i] = 1 + run[i + p];
        }
    }
    let mut out = BTreeSet::new();
    for start in 0..len {
        let q = start + v.len();
        if q > len || x[start..q] != *v {
            continue;
        }
        for n in 0..=run[q].min(n_max) {
            let end = q + n as usize * p;
            if end + w.len() <= len && x[end..end + w.len()] == *w {
                out.insert(n);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::SubFile;

    fn spec(text: &str) -> AutomaticSpec {
        AutomaticSpec::from_sub_file(&SubFile::parse(text).unwrap()).unwrap()
    }

    fn base3() -> AutomaticSpec {
        spec("alphabet: 0 1 2\nrule 0 -> 0 1 2\nrule 1 -> 1 1 1\nrule 2 -> 2 2 2\n")
    }

    fn tm() -> AutomaticSpec {
        spec("alphabet: 0 1\nrule 0 -> 0 1\nrule 1 -> 1 0\n")
    }

    fn occ(s: &AutomaticSpec, v: &str, u: &str, w: &str) -> OccurrenceSet {
        occurrence_set(s, &Word::from_chars(v), &Word::from_chars(u), &Word::from_chars(w)).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn base3_runs_between_twos() {
        // "22" occurs inside the 2-blocks, so n = 0 is in the set too.
        let s = occ(&base3(), "2", "1", "2");
        assert_eq!(
            s,
            OccurrenceSet::Structured {
                finite_part: [0].into_iter().collect(),
                progressions: vec![GeometricSet {
                    a: rat(3),
                    b: rat(0),
                    base: 3,
                    m: 1
                }]
            }
        );
        assert_eq!(s.to_string(), "{0} U {3*3^(1*n)+0 : n>=0}");
    }

    #[test]
    fn base3_single_and_all() {
        assert_eq!(occ(&base3(), "0", "1", "2"), OccurrenceSet::finite([1]));
        assert_eq!(occ(&base3(), "1", "1", "1"), OccurrenceSet::AllNaturals);
    }

    #[test]
    fn thue_morse_brute() {
        let t = tm();
        let got = occurrence_brute(
            &t.spec,
            &Word::from_chars("0"),
            &Word::from_chars("1"),
            &Word::from_chars("0"),
            5,
            None,
        )
        .unwrap();
        // 00, 010 and 0110 occur; 01110 does not.
        assert_eq!(got, [0, 1, 2].into_iter().collect());
        assert_eq!(occ(&t, "0", "1", "0"), OccurrenceSet::finite([0, 1, 2]));
    }

    #[test]
    fn brute_rejects_short_prefix() {
        let t = tm();
        let err = occurrence_brute(
            &t.spec,
            &Word::from_chars("0"),
            &Word::from_chars("1"),
            &Word::from_chars("0"),
            5,
            Some(3),
        );
        assert!(matches!(err, Err(Error::InsufficientPrefix { .. })));
    }

    #[test]
    fn evaluate_examples() {
        let s = OccurrenceSet::Structured {
            finite_part: BTreeSet::new(),
            progressions: vec![GeometricSet::new(rat(3), rat(0), 3, 1).unwrap()],
        };
        assert_eq!(evaluate(&s, 30), [3, 9, 27].into_iter().collect());
        assert_eq!(evaluate(&OccurrenceSet::AllNaturals, 4).len(), 5);
        assert!(evaluate(&OccurrenceSet::finite([1]), 0).is_empty());
    }

    #[test]
    fn normalize_merges_and_absorbs() {
        let g = |a, m| GeometricSet {
            a: rat(a),
            b: rat(0),
            base: 3,
            m,
        };
        let s = normalize([3, 9].into_iter().collect(), vec![g(27, 2), g(81, 2)]);
        assert_eq!(s.to_string(), "{3*3^(1*n)+0 : n>=0}");
        let s = normalize([0, 5].into_iter().collect(), vec![g(0, 1)]);
        assert_eq!(s, OccurrenceSet::finite([0, 5]));
    }

    #[test]
    fn display_grammar() {
        let s = OccurrenceSet::Structured {
            finite_part: [1, 2].into_iter().collect(),
            progressions: vec![GeometricSet {
                a: BigRational::new(3.into(), 2.into()),
                b: BigRational::new((-1).into(), 2.into()),
                base: 3,
                m: 1,
            }],
        };
        assert_eq!(s.to_string(), "{1,2} U {3/2*3^(1*n)-1/2 : n>=0}");
        assert_eq!(OccurrenceSet::empty().to_string(), "{}");
    }

    fn all_words(alpha: &[&str], max: usize, min: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max {
            let mut next = Vec::new();
            for w in &layer {
                for a in alpha {
                    next.push(w.concat(&Word::from_chars(a)));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.retain(|w| w.len() >= min);
        out
    }

    fn check_against_brute(s: &AutomaticSpec, alpha: &[&str], n_max: u64) {
        for u in all_words(alpha, 2, 1) {
            for v in all_words(alpha, 2, 0) {
                for w in all_words(alpha, 2, 0) {
                    let set = occurrence_set(s, &v, &u, &w).unwrap();
                    for g in set.progressions() {
                        assert!(g.is_integral(), "{g}");
                    }
                    let brute = occurrence_brute(&s.spec, &v, &u, &w, n_max, None).unwrap();
                    assert_eq!(evaluate(&set, n_max), brute, "v={v} u={u} w={w}: {set}");
                }
            }
        }
    }

    #[test]
    fn thue_morse_matches_brute() {
        check_against_brute(&tm(), &["0", "1"], 100);
    }

    #[test]
    fn base3_matches_brute() {
        check_against_brute(&base3(), &["0", "1", "2"], 100);
    }
}
