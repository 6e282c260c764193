//! Rearrangements, Lorentz and weighted norms, general-monotonicity constants,
//! K-functionals, trigonometric partial-sum bounds and the Hardy averaging
//! operator, each paired with a numeric check of the inequality it feeds.
//!
//! Everything operates on finite data: [`ComplexSeq`] for sequences,
//! [`StepFunction`] and [`HeadedStepFunction`] for functions on (0, ∞).
//! Integrals over piecewise-constant data are evaluated in closed form;
//! quadrature is only used where no antiderivative is available.

pub mod error;
pub mod fourier;
pub mod gm;
pub mod hardy;
pub mod interpolate;
pub mod json;
pub mod model;
pub mod norms;
pub mod par;
pub mod quad;
pub mod random;
pub mod rearrange;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
pub use model::{
    sequence_to_step, weight_pq, ComplexSeq, Exponent, HeadedStepFunction, PowerHead, PowerPiece, Sector, StepFunction,
    TwoSidedSeq, PQ,
};
pub use report::VerificationReport;
