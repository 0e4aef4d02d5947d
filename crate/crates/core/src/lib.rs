//! Exact analysis of substitution subshifts and automatic sequences.
//!
//! The crate covers fixed points of substitutions and their factor
//! languages, the minimal and transitive subsystems of a substitution
//! subshift, occurrence sets `{n : v uⁿ w is a factor}` in closed form, and
//! the common factors of two automatic sequences in multiplicatively
//! independent bases.

pub mod classify;
pub mod cobham;
pub mod error;
pub mod format;
pub mod language;
pub mod limits;
pub mod occurrence;
pub mod sequence;
pub mod substitution;
pub mod subsystems;
pub mod word;

pub use classify::{
    classify_letters, idempotent_exponent, idempotent_power, is_idempotent, IdempotencyReport,
    LetterClassification,
};
pub use cobham::{
    analyze_common_factors, common_factors_upto, construct_witnesses, exp_dioph_solutions,
    intersect_occurrence_sets, junction_triples, multiplicatively_independent, verify_witness,
    AnalysisReport, Certification, Intersection, Resolution, SpecialSet, StratumCheck,
    UnionOfTriples, WitnessPair, WitnessParams,
};
pub use error::{Error, Result};
pub use format::{parse_substitution, SubFile};
pub use occurrence::{
    evaluate, normalize, occurrence_brute, occurrence_set, GeometricSet, OccurrenceSet,
};
pub use substitution::Substitution;
pub use word::{
    biword_factors, fine_wilf_merge, is_primitive_word, BiWordTriple, FactorSet, Letter,
    MergeResult, Word,
};
pub use sequence::{
    spec_from_tail_words, tail_words_prefix, AutomaticSpec, KernelDescription, Periodicity,
    SubstitutiveSpec,
};
pub use subsystems::{
    generator_prefix, is_transitive, minimal_subsystems, primitive_cyclic_factors,
    transitive_generators, CyclicFactors, GeneratorKind, MinimalSubsystem, SubsystemDescriptor,
    TransitivityVerdict,
};
