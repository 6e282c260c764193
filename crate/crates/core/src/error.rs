use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("breakpoints must be positive, finite and strictly increasing (violated at {0})")]
    BadBreakpoints(usize),

    #[error("length mismatch: {what} (expected {expected}, got {got})")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("(p, q) = ({p}, {q}) is not admissible for a Lorentz norm")]
    NotLorentzAdmissible { p: f64, q: f64 },

    #[error("power head diverges: {0}")]
    DivergentHead(String),

    #[error("head required: nonzero input vanishes near 0, so the integral of f(t)/t diverges")]
    MissingHead,

    #[error("input must be real and nonnegative (violated at {0})")]
    Negative(usize),

    #[error("function is not in GM1 (measured constant is infinite)")]
    NotGm1,

    #[error("splice undefined: a_N = 0 while c_N != 0")]
    DegenerateSplice,

    #[error("quadrature did not reach tolerance {tol:e} within depth {depth}")]
    NonConvergence { tol: f64, depth: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
