//! Error types shared across the library.

/// Errors raised by ring construction, field arithmetic, and the conductor
/// machinery.
///
/// Variants are grouped roughly by origin: element-level arithmetic
/// (`ZeroInverse`, `NonUnitInverse`, ...), context construction
/// (`UnsupportedBase`, `PrecisionExhausted`), internal self-checks
/// (`InternalInconsistency`, `FixedFieldCheckFailed`, `NormCongruenceFailed`),
/// and the verification layer (`SearchFailed`, `CertificateNotReached`,
/// `BadResidueClass`, `UncoveredCase`, `HypothesisViolated`).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An element that must be nonzero (to working precision) was zero.
    #[error("element is zero to working precision")]
    ZeroElement,

    /// Attempted to invert zero.
    #[error("attempted to invert zero")]
    ZeroInverse,

    /// Attempted to invert an element of positive valuation inside the ring
    /// of integers; only valuation-zero elements are invertible there.
    #[error("attempted to invert a non-unit (valuation {val} > 0)")]
    NonUnitInverse { val: u64 },

    /// An operation required a unit (valuation zero) argument.
    #[error("expected a unit, found valuation {val}")]
    NotAUnit { val: u64 },

    /// An operation required a principal unit (congruent to 1 modulo the
    /// maximal ideal).
    #[error("expected a principal unit: {0}")]
    NotPrincipalUnit(String),

    /// The requested working precision cannot be represented or is too small
    /// for the algorithm to make sense.
    #[error("unusable working precision: {0}")]
    PrecisionExhausted(String),

    /// Vector/matrix dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A quantity that must lie in the base ring Z_p (e.g. a trace, a norm, or
    /// a coefficient of a Galois-stable polynomial) had a component outside it.
    #[error("Galois-fixed quantity has components outside the base ring: {0}")]
    FixedFieldCheckFailed(String),

    /// An internal invariant that should hold for every valid input failed;
    /// this always indicates a bug, never bad user input.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// The requested base field configuration is not available (for example,
    /// generator construction outside the exact mode, or a residue degree with
    /// no tabulated defining polynomial).
    #[error("unsupported base field configuration: {0}")]
    UnsupportedBase(String),

    /// A filtration-level search (generator placement) failed to find an
    /// element with the required leading behaviour.
    #[error("generator search failed: {0}")]
    SearchFailed(String),

    /// The norm-subgroup computation exhausted its element budget before the
    /// subgroup index reached the group-theoretic target.
    #[error(
        "norm subgroup certificate not reached: target index {target}, achieved {achieved}, after {used} elements"
    )]
    CertificateNotReached { target: u64, achieved: u64, used: usize },

    /// The conjugate product defining a norm failed its consistency check
    /// (non-constant coordinates of the product must vanish).
    #[error("norm conjugate product is not in the base field: {0}")]
    NormCongruenceFailed(String),

    /// A residue class parameter was outside the range a formula is defined
    /// for (e.g. an eigenvalue index in an excluded congruence class).
    #[error("residue class not admissible: {0}")]
    BadResidueClass(String),

    /// The combination of case parameters is not covered by any printed case
    /// of the formula being evaluated.
    #[error("parameter combination not covered by the formula: {0}")]
    UncoveredCase(String),

    /// Formula inputs violate the hypotheses under which the formula is valid.
    #[error("formula hypotheses violated: {0}")]
    HypothesisViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
