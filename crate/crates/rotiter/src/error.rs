//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A certified comparison or membership test stayed ambiguous after
    /// refinement up to the precision cap.
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    /// Exact arithmetic on surds with two distinct irrational radicals.
    #[error("mixed radicals: sqrt({0}) and sqrt({1}) cannot be combined exactly")]
    MixedRadicals(i128, i128),

    /// Integer overflow in the exact i128 path.
    #[error("integer overflow in exact arithmetic ({0})")]
    Overflow(&'static str),

    #[error("invalid scalar: {0}")]
    InvalidScalar(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("interval set is empty")]
    EmptySet,

    #[error("interval set covers the full circle")]
    FullCircle,

    #[error("degenerate arc (endpoints coincide)")]
    DegenerateArc,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("itinerary is all ones; the interval set cannot be bracketed")]
    AllOnes,

    #[error("itinerary is all zeros; the interval set cannot be bracketed")]
    AllZeros,

    /// Orbit points that provably coincide carry conflicting labels, or
    /// certified points cannot be separated; no closed-interval union fits.
    #[error("ambiguous clustering at orbit index {index}: labels inconsistent with any closed-interval union")]
    AmbiguousClustering { index: usize },

    #[error("no two consecutive 1's in the itinerary; block counting does not apply")]
    NoDoubleOne,

    #[error("no two consecutive 0's in the itinerary; block counting does not apply")]
    NoDoubleZero,

    #[error("no power k <= {k_max} subsamples to an itinerary with both \"11\" and \"00\"")]
    NotFound { k_max: usize },

    #[error("every candidate was eliminated; wrong k or not a rotation itinerary")]
    AllEliminated,

    #[error("(k,p) search exhausted at k_max={k_max}, p_max={p_max}")]
    Exhausted { k_max: usize, p_max: usize },

    #[error("itineraries have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    /// Certified-backend relation detection reached its coefficient bound
    /// without a decision.
    #[error("rational relation undecided: {0}")]
    Unknown(String),

    /// The observed sequence is eventually periodic; the generator looks
    /// rational and recovery refuses it.
    #[error("observed sequence is eventually periodic with period {period}; rational rotation suspected")]
    RationalSuspected { period: usize },

    #[error("invalid lift: {0}")]
    InvalidLift(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
