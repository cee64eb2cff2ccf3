use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion is a zero divisor (norm below tolerance)")]
    ZeroDivisor,
    #[error("root finder did not converge within {0} iterations")]
    DidNotConverge(usize),
    #[error("real root {root} has odd multiplicity {multiplicity}; not a norm-type polynomial")]
    OddRealRoot { root: f64, multiplicity: usize },
    #[error("divisor is not monic (leading coefficient {0})")]
    NonMonicDivisor(f64),
    #[error("norm coefficient matrix is not rank one (largest 2x2 minor {max_minor:e}, allowed {allowed:e})")]
    NotRankOne { max_minor: f64, allowed: f64 },
    #[error("conj(Q)Q has imaginary residue {0:e} above tolerance")]
    NonRealResidue(f64),
    #[error("polynomial is divisible by the quadratic; strip the real factor first")]
    DivisibleByM,
    #[error("remainder vanishes or has a vanishing leading coefficient")]
    DegenerateRemainder,
    #[error("factors form a conjugate pair; no Bennett flip exists")]
    NoFlip,
    #[error("necessary factorization condition violated: {0}")]
    NfcViolated(String),
    #[error("equivalence search exceeded {0} states")]
    StateBudgetExceeded(usize),
    #[error("factorizations represent different polynomials (residual {0:e})")]
    DifferentPolynomials(f64),
    #[error("factorizations do not match: {0}")]
    MismatchedPolynomials(String),
    #[error("factorization residual {residual:e} exceeds {allowed:e}")]
    ResidualTooLarge { residual: f64, allowed: f64 },
    #[error("invalid factor order: {0}")]
    InvalidOrder(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
