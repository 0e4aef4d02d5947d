//! Block presentation of an automatic sequence and the run recurrence.
//!
//! For a window length `ℓ`, pad the underlying fixed point on the left with
//! `ℓ` copies of a start marker and cut it into overlapping blocks
//! `Z_n = ỹ[ℓn, ℓn + 2ℓ)`. The block sequence is again the fixed point of a
//! substitution of the same constant length, and every length-`ℓ` window at
//! offset `o` of the coded sequence is read off a single block. Runs of a
//! fixed window between two flanking windows then become runs of a letter set
//! `T` between letters of `C` and `D`, which satisfy a linear recurrence.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num::{BigInt, BigRational, Integer, One, Zero};

use crate::error::Result;
use crate::limits::{max_steps, Budget};
use crate::sequence::AutomaticSpec;

/// A symbol of the padded sequence; `None` is the start marker.
pub(crate) type Sym = Option<usize>;

pub(crate) struct BlockSystem {
    pub ell: usize,
    pub k: usize,
    /// Coded contents of each block.
    coded: Vec<Vec<Sym>>,
    /// Block substitution; block 0 is the seed block.
    images: Vec<Vec<usize>>,
    pairs: Vec<[usize; 2]>,
}

impl BlockSystem {
    pub fn build(spec: &AutomaticSpec, ell: usize) -> Result<Self> {
        let phi = spec.spec.phi();
        let code = spec.spec.code();
        let k = spec.base;
        let y = spec.spec.underlying_prefix(ell)?;
        let z0: Vec<Sym> = std::iter::repeat_n(None, ell)
            .chain(y.iter().map(|&a| Some(a)))
            .collect();
        let mut index: HashMap<Vec<Sym>, usize> = HashMap::new();
        let mut blocks = vec![z0.clone()];
        index.insert(z0, 0);
        let mut images: Vec<Vec<usize>> = Vec::new();
        let mut budget = Budget::new();
        let mut i = 0;
        while i < blocks.len() {
            let mut big: Vec<Sym> = Vec::with_capacity(2 * ell * k);
            for s in &blocks[i] {
                match s {
                    None => big.extend(std::iter::repeat_n(None, k)),
                    Some(a) => big.extend(phi.rule(*a).iter().map(|&c| Some(c))),
                }
            }
            budget.spend(big.len())?;
            let img = (0..k)
                .map(|j| {
                    let start = k * ell - ell + ell * j;
                    let child = big[start..start + 2 * ell].to_vec();
                    let next = blocks.len();
                    *index.entry(child.clone()).or_insert_with(|| {
                        blocks.push(child);
                        next
                    })
                })
                .collect();
            images.push(img);
            i += 1;
        }
        let coded = blocks
            .iter()
            .map(|b| b.iter().map(|s| s.map(|a| code[a])).collect())
            .collect();
        let pairs = two_factors(&images);
        Ok(BlockSystem {
            ell,
            k,
            coded,
            images,
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    /// The coded window of length `ℓ` at offset `o` inside block `b`.
    pub fn window(&self, b: usize, o: usize) -> &[Sym] {
        &self.coded[b][o..o + self.ell]
    }
}

/// Two-letter factors of the fixed point starting with letter 0.
fn two_factors(images: &[Vec<usize>]) -> Vec<[usize; 2]> {
    let n = images.len();
    let mut seen_letter = vec![false; n];
    let mut pairs: BTreeSet<[usize; 2]> = BTreeSet::new();
    let mut letters = vec![0];
    let mut new_pairs: Vec<[usize; 2]> = Vec::new();
    seen_letter[0] = true;
    loop {
        if let Some(a) = letters.pop() {
            for win in images[a].windows(2) {
                new_pairs.push([win[0], win[1]]);
            }
            for &c in &images[a] {
                if !seen_letter[c] {
                    seen_letter[c] = true;
                    letters.push(c);
                }
            }
        } else if let Some(p) = new_pairs.pop() {
            if pairs.insert(p) {
                let (a, b) = (p[0], p[1]);
                new_pairs.push([*images[a].last().unwrap(), images[b][0]]);
            }
        } else {
            break;
        }
    }
    pairs.into_iter().collect()
}

/// Finite part plus progressions `{a·Kᵗ + b}` in the frame's base `K`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Piece {
    pub finite: BTreeSet<u64>,
    pub progs: BTreeSet<(BigRational, BigRational)>,
}

type ESets = HashMap<(usize, usize), BTreeSet<u64>>;

/// Where the non-`X` letters of `Ψ(b)` sit: first and last such letter and
/// the number of `X` letters before and after them.
#[derive(Clone, Copy, Debug, Default)]
struct Ends {
    first: usize,
    lead: u64,
    last: usize,
    trail: u64,
}

fn ends(img: &[usize], inside: &[bool]) -> Option<Ends> {
    let f = img.iter().position(|&c| !inside[c])?;
    let l = img.iter().rposition(|&c| !inside[c])?;
    Some(Ends {
        first: img[f],
        lead: f as u64,
        last: img[l],
        trail: (img.len() - 1 - l) as u64,
    })
}

/// Smallest `e ≥ max(index, 1)` with `fᵉ = f²ᵉ` for a self-map of a finite set.
fn idempotent_power(maps: &[&[usize]]) -> usize {
    let mut need_index = 1;
    let mut period_lcm = 1usize;
    for f in maps {
        let mut seen: Vec<Vec<usize>> = vec![f.to_vec()];
        loop {
            let last = seen.last().unwrap();
            let next: Vec<usize> = last.iter().map(|&x| f[x]).collect();
            if let Some(i) = seen.iter().position(|s| *s == next) {
                need_index = need_index.max(i + 1);
                period_lcm = period_lcm.lcm(&(seen.len() - i));
                break;
            }
            seen.push(next);
        }
    }
    period_lcm * need_index.div_ceil(period_lcm)
}

fn expand(images: &[Vec<usize>], step: &[Vec<usize>], times: usize, budget: &mut Budget) -> Result<Vec<Vec<usize>>> {
    let mut cur: Vec<Vec<usize>> = (0..images.len()).map(|b| vec![b]).collect();
    for _ in 0..times {
        cur = cur
            .iter()
            .map(|w| {
                budget.spend(w.len() * step[0].len())?;
                Ok(w.iter().flat_map(|&c| step[c].iter().copied()).collect())
            })
            .collect::<Result<_>>()?;
    }
    Ok(cur)
}

type Residues = Rc<BTreeSet<u64>>;

/// The recurrence data for one taboo set `T`.
pub(crate) struct Frame {
    /// `Ψ = Φ^exp`, of constant length `big_k`.
    pub exp: u32,
    pub big_k: u64,
    in_t: Vec<bool>,
    in_t1: Vec<bool>,
    psi: Vec<Vec<usize>>,
    top: Vec<Option<Ends>>,
    low: Vec<Option<Ends>>,
    e_top: ESets,
    e_low: ESets,
    omega_pre: HashMap<usize, Vec<usize>>,
    alpha_pre: HashMap<usize, Vec<usize>>,
    memo: RefCell<HashMap<(usize, usize, u64), Residues>>,
    low_cache: RefCell<HashMap<(usize, usize), Rc<Piece>>>,
}

impl Frame {
    pub fn new(sys: &BlockSystem, in_t: Vec<bool>) -> Result<Self> {
        let n = sys.len();
        let images = &sys.images;
        let pre = |x: &[bool]| -> Vec<bool> { (0..n).map(|b| images[b].iter().all(|&c| x[c])).collect() };

        // P(X) = Φ⁻¹(X); stabilize Pᵖ(T).
        let mut seq: Vec<Vec<bool>> = vec![pre(&in_t)];
        let (index, period) = loop {
            let next = pre(seq.last().unwrap());
            if let Some(i) = seq.iter().position(|s| *s == next) {
                break (i + 1, seq.len() - i);
            }
            seq.push(next);
        };
        let p = period * index.div_ceil(period);
        let in_t1 = seq[index - 1 + (p - index) % period].clone();

        let mut budget = Budget::new();
        let phi_p = expand(images, images, p, &mut budget)?;
        let fix = |b: usize, pick: fn(&Ends) -> usize| {
            if in_t1[b] {
                b
            } else {
                pick(&ends(&phi_p[b], &in_t1).expect("letter outside the stable set"))
            }
        };
        let alpha: Vec<usize> = (0..n).map(|b| fix(b, |e| e.first)).collect();
        let omega: Vec<usize> = (0..n).map(|b| fix(b, |e| e.last)).collect();
        let q = idempotent_power(&[&alpha, &omega]);

        let exp = p * q;
        let big_k = (sys.k as u64)
            .checked_pow(exp as u32)
            .filter(|&kk| kk.saturating_mul(n as u64) <= max_steps())
            .ok_or(crate::error::Error::StepLimit(max_steps()))?;
        let psi = expand(images, &phi_p, q, &mut budget)?;

        let top: Vec<Option<Ends>> = (0..n)
            .map(|b| if in_t1[b] { None } else { ends(&psi[b], &in_t) })
            .collect();
        let low: Vec<Option<Ends>> = (0..n)
            .map(|b| if in_t1[b] { None } else { ends(&psi[b], &in_t1) })
            .collect();

        let mut e_top = ESets::new();
        let mut e_low = ESets::new();
        let limit = big_k - 2;
        let mut word = Vec::with_capacity(2 * big_k as usize);
        for &[a, b] in &sys.pairs {
            word.clear();
            word.extend_from_slice(&psi[a]);
            word.extend_from_slice(&psi[b]);
            budget.spend(word.len())?;
            for (e, inside) in [(&mut e_top, &in_t), (&mut e_low, &in_t1)] {
                let mut prev: Option<usize> = None;
                for (i, &c) in word.iter().enumerate() {
                    if inside[c] {
                        continue;
                    }
                    if let Some(pi) = prev {
                        let r = (i - pi - 1) as u64;
                        if r <= limit {
                            e.entry((word[pi], c)).or_default().insert(r);
                        }
                    }
                    prev = Some(i);
                }
            }
        }

        let mut omega_pre: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut alpha_pre: HashMap<usize, Vec<usize>> = HashMap::new();
        for (b, e) in low.iter().enumerate() {
            if let Some(e) = e {
                omega_pre.entry(e.last).or_default().push(b);
                alpha_pre.entry(e.first).or_default().push(b);
            }
        }

        Ok(Frame {
            exp: exp as u32,
            big_k,
            in_t,
            in_t1,
            psi,
            top,
            low,
            e_top,
            e_low,
            omega_pre,
            alpha_pre,
            memo: RefCell::new(HashMap::new()),
            low_cache: RefCell::new(HashMap::new()),
        })
    }

    /// `{m < bound : c T₁ᵐ d is a factor}` for `c, d ∉ T₁`.
    fn eval(&self, c: usize, d: usize, bound: u64) -> Rc<BTreeSet<u64>> {
        if let Some(r) = self.memo.borrow().get(&(c, d, bound)) {
            return r.clone();
        }
        let kk = self.big_k;
        let mut out: BTreeSet<u64> = self
            .e_low
            .get(&(c, d))
            .map(|s| s.range(..bound).copied().collect())
            .unwrap_or_default();
        if bound >= kk {
            let none = Vec::new();
            for &c2 in self.omega_pre.get(&c).unwrap_or(&none) {
                for &d2 in self.alpha_pre.get(&d).unwrap_or(&none) {
                    let q = self.low[c2].unwrap().trail + self.low[d2].unwrap().lead;
                    if bound <= q {
                        continue;
                    }
                    let sub = self.eval(c2, d2, (bound - q).div_ceil(kk));
                    out.extend(sub.iter().map(|&m| kk * m + q).filter(|&v| v < bound));
                }
            }
        }
        let out = Rc::new(out);
        self.memo.borrow_mut().insert((c, d, bound), out.clone());
        out
    }

    /// `{m : c T₁ᵐ d is a factor}` for `c, d ∉ T₁`, in closed form.
    fn low_set(&self, c: usize, d: usize) -> Rc<Piece> {
        if let Some(p) = self.low_cache.borrow().get(&(c, d)) {
            return p.clone();
        }
        let (ec, ed) = (self.low[c].unwrap(), self.low[d].unwrap());
        let mut piece = Piece::default();
        if ec.last == c && ed.first == d {
            let kk = self.big_k;
            let q = BigRational::new(BigInt::from(ec.trail + ed.lead), BigInt::from(kk - 1));
            for &r in self.eval(c, d, kk * kk - 1).iter() {
                piece
                    .progs
                    .insert((BigRational::from_integer(r.into()) + &q, -q.clone()));
            }
        } else if let Some(e) = self.e_low.get(&(c, d)) {
            piece.finite = e.clone();
        }
        let piece = Rc::new(piece);
        self.low_cache.borrow_mut().insert((c, d), piece.clone());
        piece
    }

    /// `{m : c Tᵐ d is a factor for some c ∈ C, d ∈ D}`; `C` and `D` must be
    /// disjoint from `T`.
    pub fn runs(&self, in_c: &[bool], in_d: &[bool]) -> Piece {
        let mut piece = Piece::default();
        for (&(c, d), set) in &self.e_top {
            if in_c[c] && in_d[d] {
                piece.finite.extend(set.iter().copied());
            }
        }
        let kk = BigRational::from_integer(self.big_k.into());
        let lefts: Vec<(usize, Ends)> = (0..self.psi.len())
            .filter_map(|b| self.top[b].filter(|e| in_c[e.last]).map(|e| (b, e)))
            .collect();
        let rights: Vec<(usize, Ends)> = (0..self.psi.len())
            .filter_map(|b| self.top[b].filter(|e| in_d[e.first]).map(|e| (b, e)))
            .collect();
        for &(c2, ec) in &lefts {
            for &(d2, ed) in &rights {
                let q = ec.trail + ed.lead;
                let low = self.low_set(c2, d2);
                piece
                    .finite
                    .extend(low.finite.iter().map(|&m| self.big_k * m + q));
                let qr = BigRational::from_integer(q.into());
                for (a, b) in &low.progs {
                    piece.progs.insert((a * &kk, b * &kk + &qr));
                }
            }
        }
        piece
    }

    /// If the block sequence lies in `T` from some index on, the least such
    /// index.
    pub fn tail_start(&self) -> Option<usize> {
        let z = &self.psi[0];
        if !z[1..].iter().all(|&c| self.in_t1[c]) {
            return None;
        }
        let mut n = z.len();
        while n > 1 && self.in_t[z[n - 1]] {
            n -= 1;
        }
        Some(n)
    }

    #[cfg(test)]
    pub fn is_stable(&self) -> bool {
        (0..self.psi.len()).all(|b| self.in_t1[b] == self.psi[b].iter().all(|&c| self.in_t1[c]))
    }
}

pub(crate) fn rational_is_integer(x: &BigRational) -> bool {
    x.denom().is_one() || x.numer().is_zero()
}

/// Solves the non-degenerate problem for one periodic word: runs of `u` of
/// any length flanked by given left and right words.
pub(crate) struct CoreSolver {
    u: Vec<usize>,
    j: usize,
    sys: BlockSystem,
    frames: Vec<Frame>,
}

/// Raw output: finite values and progressions `(a, b, exp)` meaning
/// `{a·k^{exp·t} + b}`.
#[derive(Debug, Default)]
pub(crate) struct RawSet {
    pub finite: BTreeSet<u64>,
    pub progs: Vec<(BigRational, BigRational, u32)>,
}

impl CoreSolver {
    /// `j` is the power of `u` used as the window; flanking words passed to
    /// [`CoreSolver::solve`] may be at most `⌈j/2⌉·|u|` long.
    pub fn new(spec: &AutomaticSpec, u: &[usize], j: usize) -> Result<Self> {
        let ell = j * u.len();
        let sys = BlockSystem::build(spec, ell)?;
        let target: Vec<Sym> = u.iter().cycle().take(ell).map(|&a| Some(a)).collect();
        let frames = (0..ell)
            .map(|o| {
                let in_t = (0..sys.len()).map(|b| sys.window(b, o) == target.as_slice()).collect();
                Frame::new(&sys, in_t)
            })
            .collect::<Result<_>>()?;
        Ok(CoreSolver {
            u: u.to_vec(),
            j,
            sys,
            frames,
        })
    }

    pub fn base(&self) -> usize {
        self.sys.k
    }

    /// `{n : v uⁿ w is a factor}` where `v` is not a suffix of a power of
    /// `u` (a leading `None` requires the occurrence to start the sequence)
    /// and `w` is not a prefix of a power of `u`.
    pub fn solve(&self, v: &[Sym], w: &[usize]) -> RawSet {
        let ell = self.sys.ell;
        let mut raw = RawSet::default();
        for i in 0..self.j {
            let v2: Vec<Sym> = v
                .iter()
                .copied()
                .chain(self.u.iter().cycle().take(i.div_ceil(2) * self.u.len()).map(|&a| Some(a)))
                .collect();
            let w2: Vec<Sym> = self
                .u
                .iter()
                .cycle()
                .take(i / 2 * self.u.len())
                .chain(w.iter())
                .map(|&a| Some(a))
                .collect();
            assert!(v2.len() <= ell && w2.len() <= ell, "flanking word longer than the window");
            let (jj, ii) = (self.j as u64, i as u64);
            let jr = BigRational::from_integer(jj.into());
            let ir = BigRational::from_integer(ii.into());
            for (o, frame) in self.frames.iter().enumerate() {
                let in_c: Vec<bool> = (0..self.sys.len())
                    .map(|b| self.sys.window(b, o).ends_with(&v2))
                    .collect();
                let in_d: Vec<bool> = (0..self.sys.len())
                    .map(|b| self.sys.window(b, o).starts_with(&w2))
                    .collect();
                let piece = frame.runs(&in_c, &in_d);
                raw.finite.extend(piece.finite.iter().map(|&m| jj * m + ii));
                for (a, b) in piece.progs {
                    raw.progs.push((a * &jr, b * &jr + &ir, frame.exp));
                }
            }
        }
        raw
    }

    /// The least position `Q` with `x[Q..] = u^ω`, if any. `u` must be
    /// primitive.
    pub fn tail_start(&self) -> Option<usize> {
        let ell = self.sys.ell;
        self.frames
            .iter()
            .enumerate()
            .filter_map(|(o, f)| f.tail_start().map(|n| ell * (n - 1) + o))
            .min()
    }
}
