//! Automatic sequences realizing a prescribed union of biword languages.
//!
//! For triples `(vᵢ, uᵢ, wᵢ)`, `1 ≤ i ≤ p`, and a base `k ≥ p + 2` the
//! sequence `x` carries `^ω vᵢ` just left of each position `i·kᵗ` and
//! `uᵢ wᵢ^ω` just right of it, each on a window of length `kᵗ⁻¹`, with the
//! filler `♣` everywhere else. In base `k` those windows are exactly the
//! numbers whose leading digits are `i 0` (right part) or `i−1, k−1`
//! (left part; a single leading `k−1` for `i = 1`), so `x` is produced by a
//! finite automaton reading the digits of `n` most significant first.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num::Integer;
use serde::Serialize;

use super::require_independent;
use crate::error::{Error, Result};
use crate::sequence::{AutomaticSpec, SubstitutiveSpec, SPADE};
use crate::substitution::Substitution;
use crate::word::{BiWordTriple, Letter};

pub const CLUB: &str = "♣";

/// Constants of the digit automaton for one base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessParams {
    pub base: u64,
    /// lcm of the lengths of the nonempty periodic parts.
    pub varpi: u64,
    /// `kᵗ⁺ᵛ ≡ kᵗ (mod varpi)` for `t ≥ m0`, with `v = varpi0`.
    pub varpi0: u64,
    pub m0: u64,
    /// Longest middle word.
    pub m1: u64,
}

/// A complete deterministic automaton with output reading base-`k` digits
/// most significant first; state 0 is the start and loops on digit 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dfao {
    pub base: u64,
    pub delta: Vec<Vec<usize>>,
    pub output: Vec<Letter>,
}

impl Dfao {
    pub fn eval(&self, mut n: u64) -> &Letter {
        let mut digits = Vec::new();
        while n > 0 {
            digits.push((n % self.base) as usize);
            n /= self.base;
        }
        let q = digits.iter().rev().fold(0, |q, &d| self.delta[q][d]);
        &self.output[q]
    }

    /// The uniform substitution `q ↦ δ(q,0)⋯δ(q,k−1)` with the output map as
    /// coding; its fixed point from the start state is the automaton's
    /// sequence.
    pub fn to_spec(&self) -> Result<AutomaticSpec> {
        let names: Vec<Letter> = (0..self.delta.len())
            .map(|i| Letter::new(&format!("q{i}")))
            .collect::<Result<_>>()?;
        let phi = Substitution::from_indices(names, self.delta.clone())?;
        AutomaticSpec::new(SubstitutiveSpec::from_images(phi, self.output.clone(), 0)?)
    }

    /// Moore minimization of the reachable part.
    fn minimized(&self) -> Dfao {
        let mut reach = vec![usize::MAX; self.delta.len()];
        let mut order = vec![0];
        reach[0] = 0;
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if reach[t] == usize::MAX {
                    reach[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut class: Vec<usize> = {
            let outs: Vec<&Letter> = order.iter().map(|&q| &self.output[q]).collect();
            let distinct: BTreeSet<&Letter> = outs.iter().copied().collect();
            let ix: Vec<&Letter> = distinct.into_iter().collect();
            outs.iter().map(|o| ix.binary_search(o).unwrap()).collect()
        };
        loop {
            let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = Vec::with_capacity(order.len());
            for (a, &q) in order.iter().enumerate() {
                let key = (class[a], self.delta[q].iter().map(|&t| class[reach[t]]).collect());
                let n = sig.len();
                next.push(*sig.entry(key).or_insert(n));
            }
            let stable = sig.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let n = class.iter().max().unwrap() + 1;
        let mut delta = vec![Vec::new(); n];
        let mut output = vec![self.output[0].clone(); n];
        for (a, &q) in order.iter().enumerate() {
            let c = class[a];
            if delta[c].is_empty() {
                delta[c] = self.delta[q].iter().map(|&t| class[reach[t]]).collect();
                output[c] = self.output[q].clone();
            }
        }
        Dfao {
            base: self.base,
            delta,
            output,
        }
    }
}

/// The two automatic sequences whose only common factors are the union of
/// the triples' languages.
#[derive(Clone, Debug)]
pub struct WitnessPair {
    /// Base `k` (after raising), filler `♣`.
    pub x_spec: AutomaticSpec,
    /// Base `l` (after raising), filler `♠`.
    pub y_spec: AutomaticSpec,
    pub x_params: WitnessParams,
    pub y_params: WitnessParams,
    pub x_automaton: Dfao,
    pub y_automaton: Dfao,
}

fn raise(k: u64, p: u64) -> u64 {
    let mut b = k;
    while b < p + 2 {
        b *= k;
    }
    b
}

fn params(triples: &[BiWordTriple], base: u64) -> WitnessParams {
    let varpi = triples
        .iter()
        .flat_map(|t| [t.v.len(), t.w.len()])
        .filter(|&n| n > 0)
        .fold(1u64, |acc, n| acc.lcm(&(n as u64)));
    let mut seen: HashMap<u64, u64> = HashMap::new();
    let mut r = 1 % varpi;
    let mut t = 0;
    let (m0, varpi0) = loop {
        if let Some(&s) = seen.get(&r) {
            break (s, t - s);
        }
        seen.insert(r, t);
        r = r * base % varpi;
        t += 1;
    };
    WitnessParams {
        base,
        varpi,
        varpi0,
        m0,
        m1: triples.iter().map(|t| t.u.len() as u64).max().unwrap_or(0),
    }
}

/// `x_n` by the direct position formula in base `k` with filler `fill`.
pub fn witness_symbol(triples: &[BiWordTriple], k: u64, n: u64, fill: &Letter) -> Letter {
    let (k, n) = (k as u128, n as u128);
    let mut span = 1u128; // k^(t-1)
    while span <= n {
        let kt = span * k;
        for (ix, tr) in triples.iter().enumerate() {
            let at = (ix as u128 + 1) * kt;
            if n >= at && n < at + span {
                let j = (n - at) as usize;
                return if j < tr.u.len() {
                    tr.u.letters()[j].clone()
                } else if tr.w.is_empty() {
                    fill.clone()
                } else {
                    tr.w.letters()[(j - tr.u.len()) % tr.w.len()].clone()
                };
            }
            if n < at && n >= at - span {
                let s = (at - n) as usize;
                return if tr.v.is_empty() {
                    fill.clone()
                } else {
                    let v = tr.v.letters();
                    v[v.len() - 1 - (s - 1) % v.len()].clone()
                };
            }
        }
        span = kt;
    }
    fill.clone()
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum State {
    Start,
    Fill,
    Lead(usize),
    /// Left window of triple `i`; the distance to `i·kᵗ` is `kˡᵉⁿ − r`.
    Left { i: usize, r: u64, pow: u64 },
    /// Right window of triple `i` at offset `j`; `exact` is `j` while it is
    /// below the longest middle word.
    Right { i: usize, exact: Option<u64>, modulo: u64 },
}

fn build_dfao(triples: &[BiWordTriple], pr: &WitnessParams, fill: &Letter) -> Dfao {
    let (k, p, w) = (pr.base, triples.len(), pr.varpi);
    let step = |s: &State, d: u64| -> State {
        match *s {
            State::Start if d == 0 => State::Start,
            State::Start if d >= 1 && d <= p as u64 => State::Lead(d as usize),
            State::Start if d == k - 1 => State::Left { i: 1, r: 0, pow: 1 % w },
            State::Lead(i) if d == 0 => State::Right {
                i,
                exact: (pr.m1 > 0).then_some(0),
                modulo: 0,
            },
            State::Lead(i) if d == k - 1 && i < p => State::Left { i: i + 1, r: 0, pow: 1 % w },
            State::Left { i, r, pow } => State::Left {
                i,
                r: (r * k + d) % w,
                pow: pow * k % w,
            },
            State::Right { i, exact, modulo } => State::Right {
                i,
                exact: exact.map(|j| j * k + d).filter(|&j| j < pr.m1),
                modulo: (modulo * k + d) % w,
            },
            _ => State::Fill,
        }
    };
    let out = |s: &State| -> Letter {
        match *s {
            State::Left { i, r, pow } => {
                let v = triples[i - 1].v.letters();
                if v.is_empty() {
                    return fill.clone();
                }
                let s_minus_1 = (pow + 2 * w - r - 1) % w;
                v[v.len() - 1 - (s_minus_1 as usize) % v.len()].clone()
            }
            State::Right { i, exact, modulo } => {
                let t = &triples[i - 1];
                match exact {
                    Some(j) if (j as usize) < t.u.len() => t.u.letters()[j as usize].clone(),
                    _ if t.w.is_empty() => fill.clone(),
                    _ => {
                        let wl = t.w.len() as u64;
                        let ix = (modulo + wl * w - t.u.len() as u64 % wl) % wl;
                        t.w.letters()[ix as usize].clone()
                    }
                }
            }
            _ => fill.clone(),
        }
    };
    let mut ids: HashMap<State, usize> = HashMap::new();
    let mut states = vec![State::Start];
    ids.insert(State::Start, 0);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(q) = queue.pop_front() {
        let row: Vec<usize> = (0..k)
            .map(|d| {
                let s = step(&states[q], d);
                *ids.entry(s.clone()).or_insert_with(|| {
                    states.push(s);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                })
            })
            .collect();
        if delta.len() <= q {
            delta.resize(q + 1, Vec::new());
        }
        delta[q] = row;
    }
    let output = states.iter().map(out).collect();
    Dfao { base: k, delta, output }.minimized()
}

fn build_side(triples: &[BiWordTriple], base: u64, fill: &Letter) -> Result<(AutomaticSpec, WitnessParams, Dfao)> {
    let pr = params(triples, base);
    let dfao = build_dfao(triples, &pr, fill);
    let spec = dfao.to_spec()?;
    let n = base.saturating_pow(6).min(1 << 20) as usize;
    let prefix = spec.spec.fixpoint_prefix(n)?;
    for (i, got) in prefix.letters().iter().enumerate() {
        let want = witness_symbol(triples, base, i as u64, fill);
        if *got != want {
            return Err(Error::InvalidArgument(format!(
                "witness automaton disagrees with the position formula at {i}: {got} vs {want}"
            )));
        }
    }
    if !spec.kernel().is_closed() {
        return Err(Error::InvalidArgument("witness kernel is not closed".into()));
    }
    Ok((spec, pr, dfao))
}

/// Builds `x` in base `k` and `y` in base `l` whose common factors are
/// exactly `⋃ ℒ(^ω vᵢ uᵢ wᵢ^ω)`. The bases are first raised to their least
/// powers that are at least `p + 2`.
pub fn construct_witnesses(triples: &[BiWordTriple], k: u64, l: u64) -> Result<WitnessPair> {
    if triples.is_empty() {
        return Err(Error::InvalidArgument("at least one triple is required".into()));
    }
    require_independent(k, l)?;
    let club = Letter::new(CLUB)?;
    let spade = Letter::new(SPADE)?;
    for t in triples {
        for a in t.v.letters().iter().chain(t.u.letters()).chain(t.w.letters()) {
            if *a == club || *a == spade {
                return Err(Error::InvalidArgument(format!("triples may not use the letter {a}")));
            }
        }
    }
    let p = triples.len() as u64;
    let (k, l) = (raise(k, p), raise(l, p));
    let (x_spec, x_params, x_automaton) = build_side(triples, k, &club)?;
    let (y_spec, y_params, y_automaton) = build_side(triples, l, &spade)?;
    Ok(WitnessPair {
        x_spec,
        y_spec,
        x_params,
        y_params,
        x_automaton,
        y_automaton,
    })
}
