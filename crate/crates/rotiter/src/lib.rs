//! Certified symbolic itineraries of circle rotations and their inverses:
//! generate the 0/1 itinerary of the orbit of 0 relative to a finite union
//! of closed arcs, and recover the rotation amount and the arc set from an
//! itinerary alone, up to the forced mirror and rotational-symmetry
//! equivalences. Circle diffeomorphisms are handled through their rotation
//! number.

pub mod circle;
pub mod cli;
pub mod diffeo;
pub mod error;
pub mod itinerary;
pub mod recovery;
pub mod scalar;
pub mod torus;

pub use circle::{CircleArc, CirclePoint, IntervalSet, Membership};
pub use diffeo::{
    generate_diffeo_itinerary, induced_rotation_interval, recover_rotation_class, rotation_number,
    verify_denjoy_reduction, verify_denjoy_reduction_bits, DenjoyVerdict, DiffeoSpec,
    RotationClassFamily, RotationNumberEstimate,
};
pub use error::{Error, Result};
pub use itinerary::{
    gap_spectrum, generate, three_gap_check, GapSpectrum, Itinerary, ThreeGapVerdict,
};
pub use recovery::{
    bracket_sym_alpha, candidate_alphas, eliminate_candidates, estimate_length, find_power_k,
    min_components_bound, multi_interval_search, recover_alpha_single, recover_interval,
    AlphaBracket, Candidate, CandidateAlpha, ComponentBound, Convergent, IntervalBracket,
    RecoveryResult,
};
pub use scalar::{parse_scalar, Scalar};
pub use torus::{
    classify, classify_equivalence, empirical_agreement, find_relation, predicted_agreement,
    EquivalenceVerdict, RationalRelation, TorusClass,
};
