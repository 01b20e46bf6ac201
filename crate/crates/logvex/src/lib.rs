//! Numerics for log-concave measures e^{-phi(||x||_L)} on origin-symmetric
//! convex bodies: normalizers, masses and tail brackets of dilated bodies,
//! large-deviation ratios, moment-induction diagnostics, hyperplane
//! section measures, and separating-witness searches, with certified or
//! honestly error-barred results throughout.

pub mod asymptotics;
pub mod bodies;
pub mod error;
pub mod geom;
pub mod integrate;
pub mod measure;
pub mod phi;
pub mod rng;
pub mod scalar;
pub mod sections;
pub mod tower;

pub use asymptotics::{
    exceptional_set_measure, induction_diagnostics, ldp_scan, plank_tail_lower_log, tail_ratio,
    witness_search, ExceptionalSet, InductionTable, LdpScanReport, LdpVerdict, TailRatio,
    WitnessOutcome,
};
pub use bodies::{dilation_bracket, inradius, ConvexBody, DilationBracket, InradiusCert};
pub use error::{Error, Result};
pub use integrate::{Estimate, Method};
pub use measure::{NormMeasure, TailBracket, UniformMeasure};
pub use phi::{build_pathological_phi, PathologicalReport, PhiFunction};
pub use scalar::Scalar;
pub use sections::{
    bp_experiment, bp_experiment_uniform, dominance_check, fact_check, rectangle_demo,
    section_measure, DominanceReport, DominanceVerdict, FactReport, FactStatus, RectangleReport,
};
pub use tower::Tower;

/// Concrete double-precision aliases; the crate is generic over the
/// scalar, these are the types the command line tool uses.
pub type Body = ConvexBody<f64>;
pub type Phi = PhiFunction<f64>;
pub type Measure = NormMeasure<f64>;
pub type Uniform = UniformMeasure<f64>;
pub type Est = Estimate<f64>;
