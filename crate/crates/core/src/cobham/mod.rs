//! Common factors of automatic sequences in multiplicatively independent
//! bases: exact arithmetic helpers, the common-factor analyzer and the
//! witness construction.

mod analyze;
mod witness;

use std::collections::BTreeSet;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::occurrence::{normalize, GeometricSet, OccurrenceSet};
use crate::sequence::SubstitutiveSpec;
use crate::word::{biword_factors, BiWordTriple, FactorSet};

pub use analyze::{
    analyze_common_factors, junction_triples, AnalysisReport, Certificate, Certification, Resolution,
    SpecialSet, UnionOfTriples,
};
pub use witness::{construct_witnesses, witness_symbol, Dfao, WitnessPair, WitnessParams, CLUB};

pub const DEFAULT_DIOPHANTINE_BOUND: u32 = 200;

fn prime_exponents(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// True iff `log k / log l` is irrational, i.e. the prime exponent vectors
/// of `k` and `l` are not proportional.
pub fn multiplicatively_independent(k: u64, l: u64) -> Result<bool> {
    if k < 2 || l < 2 {
        return Err(Error::InvalidArgument("bases must be at least 2".into()));
    }
    let (fk, fl) = (prime_exponents(k), prime_exponents(l));
    if fk.len() != fl.len() || fk.iter().zip(&fl).any(|(a, b)| a.0 != b.0) {
        return Ok(true);
    }
    // Same primes: proportional iff every ratio e_k / e_l agrees.
    let (a0, b0) = (fk[0].1 as u64, fl[0].1 as u64);
    Ok(fk.iter().zip(&fl).any(|(a, b)| a.1 as u64 * b0 != b.1 as u64 * a0))
}

pub(crate) fn require_independent(k: u64, l: u64) -> Result<()> {
    if multiplicatively_independent(k, l)? {
        Ok(())
    } else {
        Err(Error::DependentBases(k, l))
    }
}

/// All `(n, m) ∈ [0, bound]²` with `a·kⁿ + b·lᵐ = c`.
///
/// The search is exhaustive within the bound only; no global bound on the
/// solutions is computed. Zero coefficients are rejected: such equations
/// are intersections with a constant set and are handled by evaluation.
pub fn exp_dioph_solutions(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    k: u64,
    l: u64,
    bound: u32,
) -> Result<Vec<(u32, u32)>> {
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(Error::InvalidArgument("all coefficients are zero".into()));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidArgument(
            "a zero coefficient makes one side constant; intersect with the constant set instead".into(),
        ));
    }
    require_independent(k, l)?;
    let lb = BigInt::from(l);
    let mut out = Vec::new();
    let mut kn = BigRational::one();
    for n in 0..=bound {
        // b·lᵐ = c − a·kⁿ
        let rhs = (c - a * &kn) / b;
        if rhs.is_positive() && rhs.denom().is_one() {
            let mut r = rhs.numer().clone();
            let mut m = 0u32;
            while m < bound && (&r % &lb).is_zero() {
                r /= &lb;
                m += 1;
            }
            if r.is_one() {
                out.push((n, m));
            }
        }
        kn *= BigRational::from_integer(k.into());
    }
    Ok(out)
}

/// Result of [`intersect_occurrence_sets`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Intersection {
    pub set: OccurrenceSet,
    /// `Some(bound)` when a pair of progressions was intersected by a
    /// bounded search, so the result is exhaustive only up to that exponent.
    pub searched_to: Option<u32>,
}

/// Intersection of two occurrence sets whose progressions have
/// multiplicatively independent bases.
pub fn intersect_occurrence_sets(sx: &OccurrenceSet, sy: &OccurrenceSet, bound: u32) -> Result<Intersection> {
    let (fx, px, fy, py) = match (sx, sy) {
        (OccurrenceSet::AllNaturals, other) | (other, OccurrenceSet::AllNaturals) => {
            return Ok(Intersection {
                set: other.clone(),
                searched_to: None,
            })
        }
        (
            OccurrenceSet::Structured {
                finite_part: fx,
                progressions: px,
            },
            OccurrenceSet::Structured {
                finite_part: fy,
                progressions: py,
            },
        ) => (fx, px, fy, py),
    };
    let mut out: BTreeSet<u64> = fx.intersection(fy).copied().collect();
    out.extend(fx.iter().filter(|&&n| py.iter().any(|g| g.contains(n))));
    out.extend(fy.iter().filter(|&&n| px.iter().any(|g| g.contains(n))));
    let mut searched = None;
    for g in px {
        for h in py {
            // g.a·Kᵗ − h.a·Lˢ = h.b − g.b
            let sols = exp_dioph_solutions(&g.a, &-h.a.clone(), &(&h.b - &g.b), g.base.pow(g.m), h.base.pow(h.m), bound)?;
            for (t, _) in sols {
                if let Some(n) = g.element(t).to_u64() {
                    out.insert(n);
                }
            }
            searched = Some(bound);
        }
    }
    Ok(Intersection {
        set: normalize(out, Vec::<GeometricSet>::new()),
        searched_to: searched,
    })
}

/// Factors of length `≤ n` common to both sequences.
pub fn common_factors_upto(x: &SubstitutiveSpec, y: &SubstitutiveSpec, n: usize) -> Result<FactorSet> {
    Ok(x.factor_set(n)?.intersect(&y.factor_set(n)?))
}

/// Per-length comparison in [`verify_witness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumCheck {
    pub length: usize,
    pub expected: usize,
    pub found: usize,
    pub matches: bool,
}

/// Compares the common factors of `x` and `y` with `⋃ ℒ(^ω vᵢ uᵢ wᵢ^ω)`, one
/// entry per length `0..=depth`.
pub fn verify_witness(
    x: &SubstitutiveSpec,
    y: &SubstitutiveSpec,
    triples: &[BiWordTriple],
    depth: usize,
) -> Result<Vec<StratumCheck>> {
    let common = common_factors_upto(x, y, depth)?;
    let mut expected = FactorSet::new(depth, BTreeSet::new());
    for t in triples {
        expected.union_with(&biword_factors(t, depth));
    }
    Ok((0..=depth)
        .map(|n| {
            let a: BTreeSet<_> = expected.of_length(n).collect();
            let b: BTreeSet<_> = common.of_length(n).collect();
            StratumCheck {
                length: n,
                expected: a.len(),
                found: b.len(),
                matches: a == b,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn independence() {
        assert!(multiplicatively_independent(2, 3).unwrap());
        assert!(!multiplicatively_independent(8, 2).unwrap());
        assert!(multiplicatively_independent(6, 10).unwrap());
        assert!(!multiplicatively_independent(4, 8).unwrap());
        assert!(!multiplicatively_independent(36, 6).unwrap());
        assert!(multiplicatively_independent(12, 18).unwrap());
        assert!(multiplicatively_independent(1, 3).is_err());
    }

    #[test]
    fn catalan_pairs() {
        let sols = exp_dioph_solutions(&r(1), &r(-1), &r(1), 3, 2, 60).unwrap();
        assert_eq!(sols, vec![(1, 1), (2, 3)]);
        for (n, m) in sols {
            assert_eq!(3i128.pow(n) - 2i128.pow(m), 1);
        }
        assert_eq!(exp_dioph_solutions(&r(1), &r(1), &r(2), 2, 3, 40).unwrap(), vec![(0, 0)]);
        assert!(exp_dioph_solutions(&r(0), &r(1), &r(9), 2, 3, 10).is_err());
        assert!(exp_dioph_solutions(&r(1), &r(1), &r(2), 2, 4, 10).is_err());
    }

    #[test]
    fn intersections() {
        let g = |a, base| GeometricSet::new(r(a), r(0), base, 1).unwrap();
        let p3 = OccurrenceSet::Structured {
            finite_part: BTreeSet::new(),
            progressions: vec![g(3, 3)],
        };
        let p4 = OccurrenceSet::Structured {
            finite_part: BTreeSet::new(),
            progressions: vec![g(4, 4)],
        };
        let i = intersect_occurrence_sets(&p3, &p4, 60).unwrap();
        assert!(i.set.is_empty());
        assert_eq!(i.searched_to, Some(60));
        let i = intersect_occurrence_sets(&p3, &OccurrenceSet::finite([1, 3, 9]), 60).unwrap();
        assert_eq!(i.set, OccurrenceSet::finite([3, 9]));
        let i = intersect_occurrence_sets(&OccurrenceSet::AllNaturals, &p3, 60).unwrap();
        assert_eq!(i.set, p3);
    }
}
