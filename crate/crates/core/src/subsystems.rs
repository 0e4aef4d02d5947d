//! Minimal and transitive subsystems of a substitution subshift.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::classify::{classify_unchecked, idempotent_power};
use crate::error::{Error, Result};
use crate::language::{closure, subshift_language, subshift_two_factors};
use crate::sequence::{tail_words_prefix, Periodicity, SubstitutiveSpec};
use crate::substitution::Substitution;
use crate::word::{FactorSet, Letter, Word};

pub const DEFAULT_PERIODICITY_BOUND: usize = 10;
pub const DEFAULT_SAMPLE_DEPTH: usize = 6;

/// One minimal subsystem `X_b`, listed once per class of minimal letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalSubsystem {
    pub class: Vec<Letter>,
    pub representative: Letter,
    pub periodicity: Periodicity,
    pub sample: FactorSet,
}

pub fn minimal_subsystems(phi: &Substitution) -> Result<Vec<MinimalSubsystem>> {
    minimal_subsystems_with(phi, DEFAULT_PERIODICITY_BOUND, DEFAULT_SAMPLE_DEPTH)
}

pub fn minimal_subsystems_with(phi: &Substitution, bound: usize, depth: usize) -> Result<Vec<MinimalSubsystem>> {
    phi.require_growing()?;
    let (psi, _) = idempotent_power(phi)?;
    let cls = classify_unchecked(&psi);
    let mut out = Vec::new();
    for class in &cls.classes {
        let b = class[0];
        if !cls.minimal.contains(&b) {
            continue;
        }
        let spec = letter_spec(&psi, b, cls.alpha[b])?;
        let sample = subshift_language(&psi, &[b], depth)?
            .iter()
            .map(|w| psi.decode(w))
            .collect();
        out.push(MinimalSubsystem {
            class: class.iter().map(|&a| psi.letter(a).clone()).collect(),
            representative: psi.letter(b).clone(),
            periodicity: spec.periodicity_bounded(bound)?,
            sample: FactorSet::new(depth, sample),
        });
    }
    Ok(out)
}

/// The fixed point of `psi` restricted to the letters below `b`, seeded at
/// the prolongable letter `c`.
fn letter_spec(psi: &Substitution, b: usize, c: usize) -> Result<SubstitutiveSpec> {
    let (sub, map) = psi.restrict(&psi.reachable(&[b]))?;
    let seed = map.iter().position(|&i| i == c).unwrap();
    let coding = sub.alphabet().to_vec();
    SubstitutiveSpec::from_images(sub, coding, seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TransitivityVerdict {
    CertifiedTransitive { witness: Letter },
    CertifiedNotTransitive,
    Unknown { depth_checked: usize },
}

/// Decides whether `X_φ` is transitive.
///
/// `X_φ` is transitive iff it equals `X_{ψ,b}` for a letter `b` that is
/// prolongable under the idempotent power `ψ` or very ample. Since
/// `X_{ψ,b} ⊆ X_φ` always, equality holds iff the two-letter factors of
/// `X_φ` are factors of `X_{ψ,b}` and `φ` maps the language of `X_{ψ,b}`
/// into itself; the latter only needs checking on its two-letter factors.
pub fn is_transitive(phi: &Substitution) -> Result<TransitivityVerdict> {
    phi.require_growing()?;
    let (psi, _) = idempotent_power(phi)?;
    let cls = classify_unchecked(&psi);
    let all: Vec<usize> = (0..phi.size()).collect();
    let g_phi = match subshift_two_factors(phi, &all) {
        Ok(g) => g,
        Err(Error::StepLimit(_)) => return Ok(TransitivityVerdict::Unknown { depth_checked: 0 }),
        Err(e) => return Err(e),
    };
    let mut depth_checked = 2;
    for b in 0..psi.size() {
        if cls.alpha[b] != b && !cls.very_ample.contains(&b) {
            continue;
        }
        let attempt = (|| -> Result<bool> {
            let g_b = subshift_two_factors(&psi, &[b])?;
            if !g_phi.is_subset(&g_b) {
                return Ok(false);
            }
            let images: Vec<Vec<usize>> = g_b.iter().map(|s| phi.apply(s)).collect();
            let depth = images.iter().map(Vec::len).max().unwrap_or(0);
            let seeds: Vec<Vec<usize>> = g_b.iter().map(|s| s.to_vec()).collect();
            let lang = closure(&psi, seeds.iter().map(Vec::as_slice), depth)?;
            depth_checked = depth_checked.max(depth);
            Ok(images.iter().all(|w| lang.contains(w)))
        })();
        match attempt {
            Ok(true) => {
                return Ok(TransitivityVerdict::CertifiedTransitive {
                    witness: phi.letter(b).clone(),
                })
            }
            Ok(false) => {}
            Err(Error::StepLimit(_)) => return Ok(TransitivityVerdict::Unknown { depth_checked }),
            Err(e) => return Err(e),
        }
    }
    Ok(TransitivityVerdict::CertifiedNotTransitive)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratorKind {
    /// `τ(a) = v a w` with `w` nonempty and strictly below `a`.
    CaseB1,
    /// `a` backwards prolongable, `c` prolongable, `ac` a factor.
    CaseB2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SubsystemDescriptor {
    LetterSystem {
        b: Letter,
    },
    Generator {
        tau_exponent: usize,
        left: Word,
        pivot: Word,
        right: Word,
        kind: GeneratorKind,
    },
}

impl fmt::Display for SubsystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsystemDescriptor::LetterSystem { b } => write!(f, "X(b={b})"),
            SubsystemDescriptor::Generator {
                tau_exponent,
                left,
                pivot,
                right,
                kind: GeneratorKind::CaseB1,
            } => write!(
                f,
                "B1(a={}, v={}, w={}, tau=phi^{tau_exponent})",
                pivot,
                left.compact(),
                right.compact()
            ),
            SubsystemDescriptor::Generator {
                tau_exponent,
                pivot,
                kind: GeneratorKind::CaseB2,
                ..
            } => write!(
                f,
                "B2(a={}, c={}, tau=phi^{tau_exponent})",
                pivot.letters()[0],
                pivot.letters()[1]
            ),
        }
    }
}

/// Candidate generators covering every transitive subsystem.
pub fn transitive_generators(phi: &Substitution) -> Result<Vec<SubsystemDescriptor>> {
    phi.require_growing()?;
    let (psi, m) = idempotent_power(phi)?;
    let cls = classify_unchecked(&psi);
    let mut out: Vec<SubsystemDescriptor> = (0..phi.size())
        .map(|b| SubsystemDescriptor::LetterSystem {
            b: phi.letter(b).clone(),
        })
        .collect();

    // Split `img` at its last letter equivalent to `a`, if that letter is `a`
    // itself and something follows it.
    let split = |img: &[usize], a: usize| -> Option<(Vec<usize>, Vec<usize>)> {
        let pos = img.iter().rposition(|&c| cls.equivalent(c, a))?;
        (img[pos] == a && pos + 1 < img.len()).then(|| (img[..pos].to_vec(), img[pos + 1..].to_vec()))
    };
    for a in 0..psi.size() {
        if split(psi.rule(a), a).is_none() {
            continue;
        }
        let mut power = phi.clone();
        for j in 1..=m {
            if let Some((v, w)) = split(power.rule(a), a) {
                out.push(SubsystemDescriptor::Generator {
                    tau_exponent: j,
                    left: phi.decode(&v),
                    pivot: phi.decode(&[a]),
                    right: phi.decode(&w),
                    kind: GeneratorKind::CaseB1,
                });
                break;
            }
            power = phi.compose(&power);
        }
    }

    let all: Vec<usize> = (0..psi.size()).collect();
    let pairs = subshift_two_factors(&psi, &all)?;
    for &[a, c] in &pairs {
        if cls.omega[a] == a && cls.alpha[c] == c {
            out.push(SubsystemDescriptor::Generator {
                tau_exponent: m,
                left: Word::empty(),
                pivot: phi.decode(&[a, c]),
                right: Word::empty(),
                kind: GeneratorKind::CaseB2,
            });
        }
    }
    Ok(out)
}

/// The first `n` letters of the one-sided generator: `a·w·τ(w)·τ²(w)⋯`
/// for case B1 and `a·τ^ω(c)` for case B2.
pub fn generator_prefix(d: &SubsystemDescriptor, phi: &Substitution, n: usize) -> Result<Word> {
    let SubsystemDescriptor::Generator {
        tau_exponent,
        pivot,
        right,
        kind,
        ..
    } = d
    else {
        return Err(Error::InvalidArgument("a letter system has no generator word".into()));
    };
    let tau = phi.power(*tau_exponent)?;
    for l in pivot.letters() {
        tau.index_of(l).ok_or_else(|| Error::UnknownLetter(l.to_string()))?;
    }
    if n == 0 {
        return Ok(Word::empty());
    }
    let a = Word::from_letters(vec![pivot.letters()[0].clone()]);
    let tail = match kind {
        GeneratorKind::CaseB1 => tail_words_prefix(&tau, right, n - 1)?,
        GeneratorKind::CaseB2 => {
            let c = pivot
                .letters()
                .get(1)
                .ok_or_else(|| Error::InvalidArgument("case B2 needs two pivot letters".into()))?;
            SubstitutiveSpec::identity(tau, c)?.fixpoint_prefix(n - 1)?
        }
    };
    Ok(a.concat(&tail))
}

/// Primitive cyclic factors of a substitutive sequence, each as its least
/// rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicFactors {
    pub words: BTreeSet<Word>,
    /// Minimal subsystems whose periodicity was only presumed.
    pub presumed_aperiodic: usize,
    pub complete: bool,
}

pub fn primitive_cyclic_factors(spec: &SubstitutiveSpec, bound: usize) -> Result<CyclicFactors> {
    let spec = spec.restricted()?;
    let (psi, _) = idempotent_power(spec.phi())?;
    let cls = classify_unchecked(&psi);
    let mut words = BTreeSet::new();
    let mut presumed = 0;
    for class in &cls.classes {
        let b = class[0];
        if !cls.minimal.contains(&b) {
            continue;
        }
        let (sub, map) = psi.restrict(&psi.reachable(&[b]))?;
        let seed = map.iter().position(|&i| i == cls.alpha[b]).unwrap();
        let coding = map.iter().map(|&i| spec.coding_of(i).clone()).collect();
        let coded = SubstitutiveSpec::from_images(sub, coding, seed)?;
        match coded.periodicity_bounded(bound)? {
            Periodicity::Certified { period, .. } => {
                words.insert(period.primitive_root().least_rotation());
            }
            Periodicity::PresumedAperiodic { .. } => presumed += 1,
        }
    }
    Ok(CyclicFactors {
        words,
        presumed_aperiodic: presumed,
        complete: true,
    })
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

    fn l(s: &str) -> Letter {
        Letter::new(s).unwrap()
    }

    #[test]
    fn minimal_of_first_example() {
        let m = minimal_subsystems(&ex231()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].class, vec![l("1")]);
        assert_eq!(
            m[0].periodicity,
            Periodicity::Certified {
                preperiod: 0,
                period: Word::from_chars("1")
            }
        );
        assert_eq!(m[1].class, vec![l("2"), l("3")]);
        assert!(matches!(m[1].periodicity, Periodicity::PresumedAperiodic { .. }));
    }

    #[test]
    fn minimal_of_second_example() {
        let m = minimal_subsystems(&ex232()).unwrap();
        let periods: Vec<String> = m
            .iter()
            .map(|s| match &s.periodicity {
                Periodicity::Certified { period, .. } => period.compact(),
                _ => "?".into(),
            })
            .collect();
        assert_eq!(periods, vec!["2", "3"]);
        assert_eq!(minimal_subsystems(&zero()).unwrap().len(), 1);
    }

    #[test]
    fn minimal_invariant_under_powers() {
        for s in [ex231(), ex232(), tm()] {
            let base: Vec<Vec<Letter>> = minimal_subsystems(&s).unwrap().into_iter().map(|m| m.class).collect();
            for n in 2..=3 {
                let p: Vec<Vec<Letter>> = minimal_subsystems(&s.power(n).unwrap())
                    .unwrap()
                    .into_iter()
                    .map(|m| m.class)
                    .collect();
                assert_eq!(p, base);
            }
        }
    }

    #[test]
    fn transitivity() {
        assert_eq!(is_transitive(&ex231()).unwrap(), TransitivityVerdict::CertifiedNotTransitive);
        assert_eq!(
            is_transitive(&tm()).unwrap(),
            TransitivityVerdict::CertifiedTransitive { witness: l("0") }
        );
        assert_eq!(
            is_transitive(&ex232()).unwrap(),
            TransitivityVerdict::CertifiedTransitive { witness: l("0") }
        );
        let remark = Substitution::compact(&[("0", "12"), ("1", "22"), ("2", "11")]).unwrap();
        assert_eq!(is_transitive(&remark).unwrap(), TransitivityVerdict::CertifiedNotTransitive);
    }

    #[test]
    fn generators() {
        let g = transitive_generators(&ex232()).unwrap();
        let b1: Vec<String> = g
            .iter()
            .filter(|d| matches!(d, SubsystemDescriptor::Generator { kind: GeneratorKind::CaseB1, .. }))
            .map(|d| d.to_string())
            .collect();
        assert!(b1.contains(&"B1(a=0, v=01, w=23, tau=phi^1)".to_string()), "{b1:?}");
        let d = g.iter().find(|d| d.to_string() == "B1(a=0, v=01, w=23, tau=phi^1)").unwrap();
        assert_eq!(generator_prefix(d, &ex232(), 11).unwrap().compact(), "02322332222");

        let g = transitive_generators(&ex231()).unwrap();
        let d = g.iter().find(|d| d.to_string() == "B2(a=1, c=2, tau=phi^4)").unwrap();
        assert_eq!(generator_prefix(d, &ex231(), 6).unwrap().compact(), "123323");
        assert!(!g.iter().any(|d| matches!(d, SubsystemDescriptor::Generator { kind: GeneratorKind::CaseB1, .. })));

        let g = transitive_generators(&zero()).unwrap();
        assert_eq!(g.len(), 2);
        assert!(generator_prefix(&g[0], &zero(), 3).is_err());
    }

    #[test]
    fn generator_prefixes_are_factors() {
        let phi = ex232();
        let all: Vec<usize> = (0..phi.size()).collect();
        let lang: BTreeSet<Word> = crate::language::finite_language(&phi, &all, 40)
            .unwrap()
            .iter()
            .map(|w| phi.decode(w))
            .collect();
        for d in transitive_generators(&phi).unwrap() {
            if let Ok(p) = generator_prefix(&d, &phi, 40) {
                for n in 0..=40 {
                    assert!(lang.contains(&p.slice(0, n)), "{d} {n}");
                }
            }
        }
    }

    #[test]
    fn cyclic_factors() {
        let x = SubstitutiveSpec::identity(
            Substitution::compact(&[("0", "012"), ("1", "111"), ("2", "222")]).unwrap(),
            &l("0"),
        )
        .unwrap();
        let c = primitive_cyclic_factors(&x, 10).unwrap();
        let words: Vec<String> = c.words.iter().map(Word::compact).collect();
        assert_eq!(words, vec!["1", "2"]);
        let t = SubstitutiveSpec::identity(tm(), &l("0")).unwrap();
        assert!(primitive_cyclic_factors(&t, 10).unwrap().words.is_empty());
        let z = SubstitutiveSpec::identity(zero(), &l("0")).unwrap();
        let words: Vec<String> = primitive_cyclic_factors(&z, 10).unwrap().words.iter().map(Word::compact).collect();
        assert_eq!(words, vec!["0"]);
    }

    #[test]
    fn no_letter_system_contains_both_patterns() {
        // For the first example, "21" and long runs of 1 never share a
        // letter subsystem.
        let phi = ex231();
        let (psi, _) = idempotent_power(&phi).unwrap();
        for b in 0..psi.size() {
            let lang: BTreeSet<Word> = subshift_language(&psi, &[b], 6)
                .unwrap()
                .iter()
                .map(|w| psi.decode(w))
                .collect();
            if (1..=6).all(|n| lang.contains(&Word::from_chars(&"1".repeat(n)))) {
                assert!(!lang.contains(&Word::from_chars("21")));
            }
        }
    }
}
