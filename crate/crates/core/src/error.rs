use thiserror::Error;

use crate::qforms::QuadForm;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("-{0} is not a discriminant (must be 0 or 1 mod 4 and negative)")]
    NotADiscriminant(i64),
    #[error("-{d} is not a fundamental discriminant: {reason}")]
    NotFundamental { d: u64, reason: &'static str },
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(QuadForm),
    #[error("form {form} has discriminant {found}, expected {expected}")]
    DiscriminantMismatch {
        form: QuadForm,
        expected: i64,
        found: i64,
    },
    #[error("{0} is principal; the operation only applies to non-principal forms")]
    NotApplicable(QuadForm),
    #[error("D = {0} is not congruent to 23 mod 24")]
    WrongResidue(u64),
    #[error("h(-{d}) = {h} is even; the operation needs an odd class number")]
    EvenClassNumber { d: u64, h: usize },
    #[error("form index {index} out of range (k = {k})")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("n must be positive")]
    ZeroArgument,
    #[error("n = {n} exceeds the available order {order}")]
    OrderExceeded { n: u64, order: usize },
    #[error("D = {0} is not prime")]
    NotPrime(u64),
    #[error("eta quotient has non-integral leading exponent {numerator}/24")]
    NonIntegralLead { numerator: i64 },
    #[error("series must have t(0) = 0 and t(1) = 1")]
    NotNormalized,
    #[error("series has no formal inverse: constant term is {0}")]
    NotInvertible(String),
    #[error("exponent c({n}) is not an integer: Möbius sum {numerator} not divisible by {n}")]
    IntegralityViolation { n: usize, numerator: String },
    #[error(
        "representation formula gave a non-integral value {numerator}/{denominator} at n = {n}"
    )]
    NonIntegralResult {
        n: u64,
        numerator: i128,
        denominator: i128,
    },
    #[error("cross validation failed for -{d}: form index {index}, n = {n}")]
    ValidationFailure { d: u64, index: usize, n: u64 },
    #[error("invalid form notation {0:?}")]
    ParseForm(String),
    #[error("fixture error: {0}")]
    Fixture(String),
}
