use thiserror::Error;

use crate::lattice::Integer;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("singular matrix")]
    Singular,
    #[error("determinant too large to enumerate cosets")]
    TooLarge,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrystalError {
    #[error("torus type: p1 has no cone points")]
    TorusType,
    #[error("not in same fiber: {x} and {y} lie in different orbits")]
    NotInSameFiber { x: String, y: String },
    #[error("unknown group kind {0:?}")]
    UnknownKind(String),
    #[error("rotation exponent {k} out of range for point group of order {order}")]
    ExponentOutOfRange { k: usize, order: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("linear part is singular")]
    Singular,
    #[error("linear part is not expanding")]
    NonExpanding,
    #[error("translation {0} is not integral")]
    NonIntegralTranslation(String),
    #[error("sample is empty")]
    EmptySample,
    #[error("iterate exponent must be at least 1")]
    ZeroIterate,
    #[error("conjugated translation disagrees with L(γ) for γ = {0}")]
    ConjugationMismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbifoldError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("label {0:?} has no image")]
    MissingImage(String),
    #[error("local degree at {0:?} must be at least 1")]
    InvalidDegree(String),
    #[error("preimages of {label:?} carry total degree {sum}, exceeding the map degree {degree}")]
    PreimageOverflow { label: String, sum: u64, degree: u64 },
    #[error("critical multiplicity {found} does not match 2·deg − 2 = {expected}; every critical point must be marked")]
    CriticalCountMismatch { found: u64, expected: u64 },
    #[error("map degree must be at least 1")]
    ZeroDegree,
    #[error("not a Thurston map portrait: no critical labels")]
    NotThurstonPortrait,
    #[error("not realizable by a Thurston map: Euler characteristic {0} > 0")]
    PositiveEuler(String),
    #[error("ramification recursion did not stabilize within {0} rounds")]
    IterationCap(usize),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("invalid Lattès datum: {0}")]
    InvalidDatum(String),
    #[error("local degree at {point} is not an integer: stabilizer {image_stab} over {stab}")]
    NonIntegralLocalDegree { point: String, stab: usize, image_stab: usize },
    #[error("fiber over {point} has degree sum {sum}, expected det(L) = {det}")]
    FiberCertificate { point: String, sum: usize, det: Integer },
    #[error("portrait closure exceeded {0} labels")]
    ClosureOverflow(usize),
    #[error("mesh depth {0} too large (maximum {1})")]
    DepthTooLarge(u32, u32),
    #[error("falsified theorem: {0}")]
    FalsifiedTheorem(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
}

impl OrbifoldError {
    /// Errors that can only arise when an internal identity fails.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, OrbifoldError::IterationCap(_) | OrbifoldError::Inconsistent(_))
    }
}

impl QuotientError {
    /// Errors that falsify an invariant, as opposed to rejecting the input.
    pub fn is_invariant_failure(&self) -> bool {
        match self {
            QuotientError::NonIntegralLocalDegree { .. }
            | QuotientError::FiberCertificate { .. }
            | QuotientError::ClosureOverflow(_)
            | QuotientError::FalsifiedTheorem(_)
            | QuotientError::Affine(AffineError::ConjugationMismatch(_)) => true,
            QuotientError::Orbifold(e) => e.is_invariant_failure(),
            _ => false,
        }
    }
}
