//! The common-factor analyzer.
//!
//! Common factors of length `2D` are split into a periodic left part, a
//! middle and a periodic right part, with periods drawn from the primitive
//! cyclic common factors. Each split proposes biword triples; triples whose
//! language leaves the common factors at depth `2D` are dropped, the rest
//! are pruned by language inclusion and then certified exactly where a
//! certificate is available:
//!
//! * `ℒ(r^ω)` by `r` being cyclic in both sequences;
//! * one-sided `ℒ(m w^ω)`, `ℒ(^ω v m)` by occurrence sets equal to `ℕ`;
//! * two-sided `ℒ(^ω v m w^ω)` by a junction of both sequences: a pair of
//!   adjacent letters `b c` of the fixed point with `ψ(b)` ending in `b` and
//!   `ψ(c)` starting with `c`, so that `ψ^ω(b)·ψ^ω(c)` is a two-sided point
//!   all of whose factors occur, and whose two halves are eventually
//!   periodic.
//!
//! What is left uncovered are finite maximal common factors.

use std::collections::{BTreeMap, BTreeSet};

use num::Integer;
use serde::Serialize;

use super::{common_factors_upto, require_independent};
use crate::error::Result;
use crate::occurrence::{occurrence_set, OccurrenceSet};
use crate::sequence::{AutomaticSpec, Periodicity, SubstitutiveSpec};
use crate::substitution::Substitution;
use crate::subsystems::primitive_cyclic_factors;
use crate::word::{biword_factors, BiWordTriple, FactorSet, Letter, Word};

const PERIODICITY_BOUND: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Certification {
    /// Every infinite triple carries an exact certificate, the cyclic common
    /// factors are complete and the finite part is well inside the depth.
    Certified { depth: usize },
    /// Only checked against the common factors up to `verified_to`.
    Conjectured { depth: usize, verified_to: usize },
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionOfTriples {
    pub triples: Vec<BiWordTriple>,
    pub certification: Certification,
}

impl UnionOfTriples {
    /// Factors of length `≤ n` of the union.
    pub fn language(&self, n: usize) -> FactorSet {
        let mut out = FactorSet::new(n, BTreeSet::new());
        for t in &self.triples {
            out.union_with(&biword_factors(t, n));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certificate {
    CyclicFactor,
    OccurrenceSets,
    Junction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Resolution {
    Infinite { triple: BiWordTriple, certificate: Certificate },
    Finite { words: Vec<Word> },
    /// Consistent with the common factors at the checked depth, but no
    /// exact certificate was found.
    Undecided { triple: BiWordTriple },
}

/// Common factors of the shape `prefix · leftⁿ · middle · rightᵐ · suffix`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialSet {
    pub prefix: Word,
    pub left: Word,
    pub middle: Word,
    pub right: Word,
    pub suffix: Word,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub depth: usize,
    pub cyclic_common: BTreeSet<Word>,
    pub cyclic_complete: bool,
    /// Longest primitive cyclic common factor (0 if there is none).
    pub ell: usize,
    pub special_sets: Vec<SpecialSet>,
    pub result: UnionOfTriples,
    /// Longest non-periodic middle over the resolved sets; observed at this
    /// depth only.
    pub realized_bound: usize,
}

fn rev(w: &Word) -> Word {
    Word::from_letters(w.letters().iter().rev().cloned().collect())
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&a| f[a]).collect()
}

/// Tail length and period of the iterates of a self-map.
fn index_and_period(f: &[usize]) -> (usize, usize) {
    let (mut index, mut period) = (0, 1);
    for start in 0..f.len() {
        let mut seen = vec![usize::MAX; f.len()];
        let (mut a, mut i) = (start, 0);
        while seen[a] == usize::MAX {
            seen[a] = i;
            a = f[a];
            i += 1;
        }
        index = index.max(seen[a]);
        period = period.lcm(&(i - seen[a]));
    }
    (index, period)
}

/// Eventually periodic two-sided points `ψ^ω(b)·ψ^ω(c)` at the junctions of
/// the fixed point, as canonical triples over the output alphabet.
pub fn junction_triples(spec: &SubstitutiveSpec, bound: usize) -> Result<BTreeSet<BiWordTriple>> {
    let phi = spec.phi();
    let first: Vec<usize> = phi.rules().iter().map(|r| r[0]).collect();
    let last: Vec<usize> = phi.rules().iter().map(|r| *r.last().unwrap()).collect();
    let (i1, p1) = index_and_period(&first);
    let (i2, p2) = index_and_period(&last);
    let period = p1.lcm(&p2);
    let m = period * i1.max(i2).max(1).div_ceil(period);
    let (mut f, mut g): (Vec<usize>, Vec<usize>) = ((0..phi.size()).collect(), (0..phi.size()).collect());
    for _ in 0..m {
        f = compose(&first, &f);
        g = compose(&last, &g);
    }
    let pairs: BTreeSet<(usize, usize)> = spec
        .underlying_language(2)?
        .into_iter()
        .filter(|w| w.len() == 2)
        .map(|w| (g[w[0]], f[w[1]]))
        .collect();
    if pairs.is_empty() {
        return Ok(BTreeSet::new());
    }
    let psi = phi.power(m)?;
    let reversed = Substitution::from_indices(
        psi.alphabet().to_vec(),
        psi.rules().iter().map(|r| r.iter().rev().copied().collect()).collect(),
    )?;
    let coding: Vec<Letter> = (0..phi.size()).map(|a| spec.coding_of(a).clone()).collect();
    let mut halves: BTreeMap<(bool, usize), Option<(Word, Word)>> = BTreeMap::new();
    let mut half = |back: bool, a: usize| -> Result<Option<(Word, Word)>> {
        if let Some(h) = halves.get(&(back, a)) {
            return Ok(h.clone());
        }
        let sub = if back { reversed.clone() } else { psi.clone() };
        let s = SubstitutiveSpec::from_images(sub, coding.clone(), a)?;
        let h = match s.periodicity_bounded(bound)? {
            Periodicity::Certified { preperiod, period } => Some((s.fixpoint_prefix(preperiod)?, period)),
            Periodicity::PresumedAperiodic { .. } => None,
        };
        halves.insert((back, a), h.clone());
        Ok(h)
    };
    let mut out = BTreeSet::new();
    for (b, c) in pairs {
        let (Some((pl, ql)), Some((pr, qr))) = (half(true, b)?, half(false, c)?) else {
            continue;
        };
        out.insert(BiWordTriple::new(rev(&ql), rev(&pl).concat(&pr), qr).canonical());
    }
    Ok(out)
}

fn is_cyclic(spec: &AutomaticSpec, u: &Word) -> bool {
    matches!(
        occurrence_set(spec, &Word::empty(), u, &Word::empty()),
        Ok(OccurrenceSet::AllNaturals)
    )
}

fn rotations(r: &Word) -> impl Iterator<Item = Word> + '_ {
    (0..r.len()).map(move |i| r.rotate(i))
}

/// Longest prefix of `t` that is a factor of `r^ω` for a class `r`, and the
/// class.
fn periodic_prefix<'a>(t: &[Letter], classes: &'a [Word]) -> (usize, Option<&'a Word>) {
    let mut best = (0, None);
    for r in classes {
        for rho in rotations(r) {
            let p = rho.letters();
            let n = t.iter().enumerate().take_while(|&(i, a)| *a == p[i % p.len()]).count();
            if n > best.0 {
                best = (n, Some(r));
            }
        }
    }
    best
}

struct Candidate {
    left: Word,
    middle: Word,
    right: Word,
}

fn candidates(t: &Word, classes: &[Word], depth: usize) -> Vec<Candidate> {
    let letters = t.letters();
    let n = letters.len();
    let reversed: Vec<Word> = classes.iter().map(rev).collect();
    let (mut a, ra) = periodic_prefix(letters, classes);
    let rl: Vec<Letter> = letters.iter().rev().cloned().collect();
    let (b, rb) = periodic_prefix(&rl, &reversed);
    if a == n {
        let r = ra.unwrap();
        return vec![Candidate {
            left: Word::empty(),
            middle: Word::empty(),
            right: t.slice(0, r.len()),
        }];
    }
    if a + b > n {
        a = n - b;
    }
    let half = (depth / 2).max(1);
    let left_tail = ra.is_some_and(|r| a >= r.len().max(half));
    let right_tail = rb.is_some_and(|r| b >= r.len().max(half));
    let (l, m, r) = (t.slice(0, a), t.slice(a, n - b), t.slice(n - b, n));
    let v = if left_tail { t.slice(a - ra.unwrap().len(), a) } else { Word::empty() };
    let w = if right_tail { r.slice(0, rb.unwrap().len()) } else { Word::empty() };
    let mut out = Vec::new();
    if left_tail && right_tail {
        out.push(Candidate {
            left: v.clone(),
            middle: m.clone(),
            right: w.clone(),
        });
    }
    if left_tail {
        out.push(Candidate {
            left: v,
            middle: m.concat(&r),
            right: Word::empty(),
        });
    }
    if right_tail {
        out.push(Candidate {
            left: Word::empty(),
            middle: l.concat(&m),
            right: w,
        });
    }
    out
}

struct Context<'a> {
    x: &'a AutomaticSpec,
    y: &'a AutomaticSpec,
    cyclic: &'a BTreeSet<Word>,
    junctions: Option<(BTreeSet<BiWordTriple>, BTreeSet<BiWordTriple>)>,
}

impl Context<'_> {
    fn all(&self, v: &Word, u: &Word, w: &Word) -> bool {
        [self.x, self.y]
            .iter()
            .all(|s| matches!(occurrence_set(s, v, u, w), Ok(OccurrenceSet::AllNaturals)))
    }

    fn certify(&mut self, t: &BiWordTriple) -> Result<Option<Certificate>> {
        let e = Word::empty();
        Ok(match (t.v.is_empty(), t.u.is_empty(), t.w.is_empty()) {
            (true, true, false) => self.cyclic.contains(&t.w).then_some(Certificate::CyclicFactor),
            (true, _, false) => self.all(&t.u, &t.w, &e).then_some(Certificate::OccurrenceSets),
            (false, _, true) => self.all(&e, &t.v, &t.u).then_some(Certificate::OccurrenceSets),
            (false, _, false) => {
                if self.junctions.is_none() {
                    self.junctions = Some((
                        junction_triples(&self.x.spec, PERIODICITY_BOUND)?,
                        junction_triples(&self.y.spec, PERIODICITY_BOUND)?,
                    ));
                }
                let (jx, jy) = self.junctions.as_ref().unwrap();
                (jx.contains(t) && jy.contains(t)).then_some(Certificate::Junction)
            }
            _ => None,
        })
    }
}

/// Describes the common factors of `x` (base `k`) and `y` (base `l`) as a
/// finite union of biword languages, checked up to `2·depth`.
pub fn analyze_common_factors(x: &AutomaticSpec, y: &AutomaticSpec, depth: usize) -> Result<AnalysisReport> {
    require_independent(x.base as u64, y.base as u64)?;
    let depth = depth.max(1);
    let full = 2 * depth;
    let common = common_factors_upto(&x.spec, &y.spec, full)?;

    let cx = primitive_cyclic_factors(&x.spec, PERIODICITY_BOUND)?;
    let cy = primitive_cyclic_factors(&y.spec, PERIODICITY_BOUND)?;
    let cyclic_complete = cx.presumed_aperiodic == 0 || cy.presumed_aperiodic == 0;
    let cyclic_common: BTreeSet<Word> = cx
        .words
        .union(&cy.words)
        .filter(|u| common.contains(&u.repeat(full / u.len())) && is_cyclic(x, u) && is_cyclic(y, u))
        .cloned()
        .collect();
    let classes: Vec<Word> = cyclic_common.iter().cloned().collect();
    let ell = classes.iter().map(Word::len).max().unwrap_or(0);

    // Propose, deduplicate and filter by the depth-2D common factors.
    let mut proposed: BTreeMap<BiWordTriple, (Candidate, FactorSet)> = BTreeMap::new();
    for t in common.of_length(full) {
        for c in candidates(t, &classes, depth) {
            let triple = BiWordTriple::new(c.left.clone(), c.middle.clone(), c.right.clone()).canonical();
            if proposed.contains_key(&triple) {
                continue;
            }
            let lang = biword_factors(&triple, full);
            if lang.is_subset(&common) {
                proposed.insert(triple, (c, lang));
            }
        }
    }
    let keys: Vec<&BiWordTriple> = proposed.keys().collect();
    let kept: Vec<&BiWordTriple> = keys
        .iter()
        .enumerate()
        .filter(|&(i, t)| {
            let lt = &proposed[*t].1;
            !keys.iter().enumerate().any(|(j, s)| {
                let ls = &proposed[*s].1;
                j != i && lt.is_subset(ls) && (lt.len() < ls.len() || j < i)
            })
        })
        .map(|(_, t)| *t)
        .collect();

    let mut ctx = Context {
        x,
        y,
        cyclic: &cyclic_common,
        junctions: None,
    };
    let mut special_sets = Vec::new();
    let mut triples = Vec::new();
    let mut covered = FactorSet::new(full, BTreeSet::new());
    let mut exact = true;
    let mut realized_bound = 0;
    for t in kept {
        let (c, lang) = &proposed[t];
        covered.union_with(lang);
        let resolution = match ctx.certify(t)? {
            Some(certificate) => Resolution::Infinite {
                triple: t.clone(),
                certificate,
            },
            None => {
                exact = false;
                Resolution::Undecided { triple: t.clone() }
            }
        };
        realized_bound = realized_bound.max(t.u.len());
        special_sets.push(SpecialSet {
            prefix: Word::empty(),
            left: c.left.clone(),
            middle: c.middle.clone(),
            right: c.right.clone(),
            suffix: Word::empty(),
            resolution,
        });
        triples.push(t.clone());
    }

    // Maximal common factors outside every infinite triple.
    let leftover: BTreeSet<&Word> = common.sorted().into_iter().filter(|w| !covered.contains(w)).collect();
    let mut inner: BTreeSet<Word> = BTreeSet::new();
    for w in &leftover {
        if !w.is_empty() {
            inner.insert(w.slice(1, w.len()));
            inner.insert(w.slice(0, w.len() - 1));
        }
    }
    let maximal: Vec<Word> = leftover.into_iter().filter(|w| !inner.contains(*w)).cloned().collect();
    if maximal.iter().any(|w| w.len() >= depth) {
        exact = false;
    }
    for w in &maximal {
        realized_bound = realized_bound.max(w.len());
        special_sets.push(SpecialSet {
            prefix: Word::empty(),
            left: Word::empty(),
            middle: w.clone(),
            right: Word::empty(),
            suffix: Word::empty(),
            resolution: Resolution::Finite { words: vec![w.clone()] },
        });
        triples.push(BiWordTriple::new(Word::empty(), w.clone(), Word::empty()));
    }

    let certification = if exact && cyclic_complete {
        Certification::Certified { depth }
    } else {
        Certification::Conjectured {
            depth,
            verified_to: full,
        }
    };
    Ok(AnalysisReport {
        depth,
        cyclic_common,
        cyclic_complete,
        ell,
        special_sets,
        result: UnionOfTriples { triples, certification },
        realized_bound,
    })
}
