//! Letter preorder, ample letters, the λ-map and idempotent powers.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::Result;
use crate::limits::Budget;
use crate::substitution::Substitution;
use crate::word::Letter;

/// Structural data about the letters of a growing substitution, by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterClassification {
    /// `reach[b][a]` iff `a` occurs in some `φⁿ(b)`, `n ≥ 0`.
    pub reach: Vec<Vec<bool>>,
    /// Equivalence classes of mutual reachability, ordered by least member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub minimal: Vec<usize>,
    pub prolongable: Vec<usize>,
    pub backwards_prolongable: Vec<usize>,
    pub ample: Vec<usize>,
    pub very_ample: Vec<usize>,
    /// Last letter equivalent to `a` in `φ(a)`, for ample `a`.
    pub lambda: Vec<Option<usize>>,
    /// First letter of `φ(a)`.
    pub alpha: Vec<usize>,
    /// Last letter of `φ(a)`.
    pub omega: Vec<usize>,
}

impl LetterClassification {
    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// `b ≽ a`.
    pub fn above(&self, b: usize, a: usize) -> bool {
        self.reach[b][a]
    }

    /// `b ≻ a`.
    pub fn strictly_above(&self, b: usize, a: usize) -> bool {
        self.reach[b][a] && !self.reach[a][b]
    }

    pub fn is_ample(&self, a: usize) -> bool {
        self.lambda[a].is_some()
    }

    pub fn reach_set(&self, b: usize) -> Vec<usize> {
        (0..self.reach.len()).filter(|&a| self.reach[b][a]).collect()
    }
}

pub fn classify_letters(phi: &Substitution) -> Result<LetterClassification> {
    phi.require_growing()?;
    Ok(classify_unchecked(phi))
}

pub(crate) fn classify_unchecked(phi: &Substitution) -> LetterClassification {
    let n = phi.size();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|b| {
            let mut row = vec![false; n];
            for a in phi.reachable(&[b]) {
                row[a] = true;
            }
            row
        })
        .collect();

    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (a..n).filter(|&b| reach[a][b] && reach[b][a]).collect();
        for &b in &members {
            class_of[b] = classes.len();
        }
        classes.push(members);
    }

    let minimal = (0..n)
        .filter(|&b| (0..n).all(|a| !reach[b][a] || reach[a][b]))
        .collect();
    let alpha: Vec<usize> = (0..n).map(|a| phi.rule(a)[0]).collect();
    let omega: Vec<usize> = (0..n).map(|a| *phi.rule(a).last().unwrap()).collect();
    let prolongable = (0..n).filter(|&a| alpha[a] == a).collect();
    let backwards_prolongable = (0..n).filter(|&a| omega[a] == a).collect();

    let lambda: Vec<Option<usize>> = (0..n)
        .map(|a| {
            phi.rule(a)
                .iter()
                .rev()
                .copied()
                .find(|&c| class_of[c] == class_of[a])
        })
        .collect();
    let ample: Vec<usize> = (0..n).filter(|&a| lambda[a].is_some()).collect();

    // Inside a strongly connected class, closed walks multiply unless the
    // class is a simple cycle.
    let branching: Vec<bool> = (0..classes.len())
        .map(|ci| {
            classes[ci].iter().any(|&b| {
                phi.rule(b).iter().filter(|&&c| class_of[c] == ci).count() >= 2
            })
        })
        .collect();
    let very_ample = ample
        .iter()
        .copied()
        .filter(|&a| branching[class_of[a]])
        .collect();

    LetterClassification {
        reach,
        classes,
        class_of,
        minimal,
        prolongable,
        backwards_prolongable,
        ample,
        very_ample,
        lambda,
        alpha,
        omega,
    }
}

/// Outcome of checking the four idempotency properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdempotencyReport {
    pub property1: bool,
    pub property2: bool,
    pub property3: bool,
    pub property4: bool,
    /// `(property, letter, n)`: the property fails for `letter` at power `n`.
    pub witness_failures: Vec<(u8, Letter, usize)>,
}

impl IdempotencyReport {
    pub fn is_idempotent(&self) -> bool {
        self.property1 && self.property2 && self.property3 && self.property4
    }
}

/// Occurrence counts capped at two: 0, 1 or "at least 2".
type Capped = Vec<Vec<u8>>;

fn capped_matrix(phi: &Substitution) -> Capped {
    let n = phi.size();
    let mut m = vec![vec![0u8; n]; n];
    for (a, row) in m.iter_mut().enumerate() {
        for &b in phi.rule(a) {
            row[b] = (row[b] + 1).min(2);
        }
    }
    m
}

fn capped_mul(x: &Capped, y: &Capped) -> Capped {
    let n = x.len();
    let mut out = vec![vec![0u8; n]; n];
    for i in 0..n {
        for k in 0..n {
            let a = x[i][k];
            if a == 0 {
                continue;
            }
            for j in 0..n {
                let p = (a * y[k][j]).min(2);
                out[i][j] = (out[i][j] + p).min(2);
            }
        }
    }
    out
}

fn compose_maps(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

/// Powers `x¹, x², …` until the first repeat: returns all distinct powers,
/// the index `i` and the period `p` with `xⁱ⁺ᵖ = xⁱ`.
fn power_cycle<T: Clone + Eq + Hash>(
    first: T,
    mul: impl Fn(&T, &T) -> T,
    cost: usize,
    budget: &mut Budget,
) -> Result<(Vec<T>, usize, usize)> {
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut powers = vec![first.clone()];
    seen.insert(first.clone(), 1);
    loop {
        budget.spend(cost)?;
        let next = mul(powers.last().unwrap(), &first);
        let n = powers.len() + 1;
        if let Some(&i) = seen.get(&next) {
            return Ok((powers, i, n - i));
        }
        seen.insert(next.clone(), n);
        powers.push(next);
    }
}

fn lambda_as_map(cls: &LetterClassification) -> Vec<usize> {
    cls.lambda
        .iter()
        .enumerate()
        .map(|(a, l)| l.unwrap_or(a))
        .collect()
}

pub fn is_idempotent(phi: &Substitution) -> Result<IdempotencyReport> {
    phi.require_growing()?;
    let n = phi.size();
    let cls = classify_unchecked(phi);
    let mut budget = Budget::new();
    let c = capped_matrix(phi);
    let (powers, _, _) = power_cycle(c.clone(), capped_mul, n * n * n, &mut budget)?;

    let mut failures = Vec::new();
    let mut p1 = true;
    let mut p2 = true;
    for a in 0..n {
        let mut f1 = false;
        let mut f2 = false;
        for (i, m) in powers.iter().enumerate().skip(1) {
            if !f1 && (0..n).any(|b| (m[a][b] > 0) != (c[a][b] > 0)) {
                f1 = true;
                failures.push((1, phi.letter(a).clone(), i + 1));
            }
            if !f2 && (0..n).any(|b| (m[a][b] == 2) != (c[a][b] == 2)) {
                f2 = true;
                failures.push((2, phi.letter(a).clone(), i + 1));
            }
        }
        p1 &= !f1;
        p2 &= !f2;
    }

    let mut p3 = true;
    for a in 0..n {
        let b = cls.alpha[a];
        if cls.alpha[b] != b {
            p3 = false;
            failures.push((3, phi.letter(a).clone(), 1));
        }
    }
    let mut p4 = true;
    for &a in &cls.ample {
        let l = cls.lambda[a].unwrap();
        if cls.lambda[l] != Some(l) {
            p4 = false;
            failures.push((4, phi.letter(a).clone(), 1));
        }
    }
    failures.sort_by_key(|x| (x.0, x.2));
    Ok(IdempotencyReport {
        property1: p1,
        property2: p2,
        property3: p3,
        property4: p4,
        witness_failures: failures,
    })
}

/// The smallest `m ≥ 1` such that `φᵐ` is idempotent.
///
/// Each of the capped count matrix, `α` and `λ` is eventually periodic under
/// powering; `φᵐ` is idempotent exactly when `m` is past every index and a
/// multiple of every period.
pub fn idempotent_exponent(phi: &Substitution) -> Result<usize> {
    phi.require_growing()?;
    let n = phi.size();
    let cls = classify_unchecked(phi);
    let mut budget = Budget::new();
    let (_, ic, pc) = power_cycle(capped_matrix(phi), capped_mul, n * n * n, &mut budget)?;
    let (_, ia, pa) = power_cycle(cls.alpha.clone(), |f, g| compose_maps(f, g), n, &mut budget)?;
    let (_, il, pl) = power_cycle(lambda_as_map(&cls), |f, g| compose_maps(f, g), n, &mut budget)?;
    let period = num::integer::lcm(num::integer::lcm(pc, pa), pl);
    let index = ic.max(ia).max(il).max(1);
    Ok(index.div_ceil(period) * period)
}

/// `φᵐ` for the idempotent exponent `m`, together with `m`.
pub fn idempotent_power(phi: &Substitution) -> Result<(Substitution, usize)> {
    let m = idempotent_exponent(phi)?;
    Ok((phi.power(m)?, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex231() -> Substitution {
        Substitution::compact(&[("0", "12"), ("1", "11"), ("2", "23"), ("3", "32")]).unwrap()
    }

    fn ex232() -> Substitution {
        Substitution::compact(&[("0", "01023"), ("1", "12"), ("2", "22"), ("3", "33")]).unwrap()
    }

    fn tm() -> Substitution {
        Substitution::compact(&[("0", "01"), ("1", "10")]).unwrap()
    }

    fn zero() -> Substitution {
        Substitution::compact(&[("0", "00")]).unwrap()
    }

    #[test]
    fn classes_of_first_example() {
        let c = classify_letters(&ex231()).unwrap();
        assert_eq!(c.minimal, vec![1, 2, 3]);
        assert_eq!(c.classes, vec![vec![0], vec![1], vec![2, 3]]);
        assert!(!c.is_ample(0));
        assert!(c.very_ample.contains(&1));
        assert!(c.strictly_above(0, 1));
        assert!(!c.strictly_above(2, 3));
    }

    #[test]
    fn thue_morse_lambda() {
        let c = classify_letters(&tm()).unwrap();
        assert_eq!(c.ample, vec![0, 1]);
        assert_eq!(c.lambda, vec![Some(1), Some(0)]);
    }

    #[test]
    fn single_letter() {
        let c = classify_letters(&zero()).unwrap();
        assert_eq!(c.ample, vec![0]);
        assert_eq!(c.very_ample, vec![0]);
        assert_eq!(c.lambda, vec![Some(0)]);
    }

    #[test]
    fn very_ample_needs_branching() {
        // 0 and 1 swap inside a simple cycle; 2 hangs below.
        let s = Substitution::compact(&[("0", "12"), ("1", "02"), ("2", "22")]).unwrap();
        let c = classify_letters(&s).unwrap();
        assert_eq!(c.ample, vec![0, 1, 2]);
        assert_eq!(c.very_ample, vec![2]);
    }

    #[test]
    fn idempotency_reports() {
        let r = is_idempotent(&tm()).unwrap();
        assert!(r.property1 && !r.property2 && r.property3 && !r.property4);
        assert!(r.witness_failures.contains(&(2, Letter::new("0").unwrap(), 2)));
        assert!(is_idempotent(&tm().power(2).unwrap()).unwrap().is_idempotent());
        assert!(is_idempotent(&zero()).unwrap().is_idempotent());
        let r = is_idempotent(&ex232()).unwrap();
        assert!(!r.property2);
    }

    #[test]
    fn exponents() {
        assert_eq!(idempotent_exponent(&tm()).unwrap(), 2);
        assert_eq!(idempotent_exponent(&ex232()).unwrap(), 2);
        assert_eq!(idempotent_exponent(&zero()).unwrap(), 1);
        assert_eq!(idempotent_exponent(&ex231()).unwrap(), 4);
    }

    #[test]
    fn exponent_is_smallest() {
        for s in [tm(), ex231(), ex232(), zero()] {
            let m = idempotent_exponent(&s).unwrap();
            for j in 1..m {
                assert!(!is_idempotent(&s.power(j).unwrap()).unwrap().is_idempotent());
            }
            assert!(is_idempotent(&s.power(m).unwrap()).unwrap().is_idempotent());
        }
    }

    #[test]
    fn rejects_non_growing() {
        let s = Substitution::compact(&[("0", "01"), ("1", "1")]).unwrap();
        assert!(classify_letters(&s).is_err());
        assert!(idempotent_exponent(&s).is_err());
    }
}
