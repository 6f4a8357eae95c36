//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in the pipeline, from low-level precision
/// exhaustion up to missing fixture entries.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero (divisor indistinguishable from zero at its precision)")]
    DivisionByZero,
    #[error("argument is zero, Iwasawa logarithm undefined")]
    NotAUnit,
    #[error("Hensel lift failed: f'(r0) ≡ 0 mod p")]
    SingularRoot,
    #[error("Hensel lift failed: f(r0) ≢ 0 mod p")]
    NoRoot,
    #[error("repeated root mod p; increase the multiple or perturb")]
    RepeatedRootModP,
    #[error("no polynomial of the profile-bounded degree fits the samples")]
    DegreeBoundExceeded,
    #[error("Jacobian matrix singular mod p at the approximate solution")]
    SingularJacobian,
    #[error("residue disk is ramified (2y + h(x) ≡ 0 mod p); x is not a parameter")]
    RamifiedDisk,
    #[error("point lies over the pole x = beta of the odd-degree model change")]
    PoleAtBeta,
    #[error("no fifth root for the odd-degree model leading coefficient")]
    NoFifthRoot,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("biextension legs differ beyond shared precision")]
    LegMismatch,
    #[error("missing fixture: {0}")]
    MissingFixture(String),
    #[error("vertical-divisor system has no solution (inconsistent fixture data)")]
    NoSolution,
    #[error("vertical-divisor system has multiple solutions (inconsistent fixture data)")]
    NonUniqueSolution,
    #[error("divisor meets a zero or pole of the correction function")]
    PoleHit,
    #[error("no multiple up to n_max = {0} splits over Q_p")]
    NoSplitFound(usize),
    #[error("no embedding coordinate has a unit linear coefficient mod p")]
    NoUnitPivot,
    #[error("mod-p solution enumeration too large: p^r = {0} exceeds the guard")]
    EnumerationTooLarge(u128),
    #[error("polynomial map violates the expected degree shape: {0}")]
    FitMismatch(String),
    #[error("point is not in the residue disk of the base section")]
    NotInDisk,
    #[error("fixture schema error: {0}")]
    SchemaError(String),
    #[error("configuration invariant violated: {0}")]
    InvariantViolation(String),
    #[error("function is not evaluable there: {0}")]
    BadEvaluation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
