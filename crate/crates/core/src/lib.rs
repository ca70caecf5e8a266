//! Triangle geometry on the hyperboloid model of the hyperbolic plane, and
//! the Napoleonization map for both flank orientations.
//!
//! Points live on the upper sheet `<P,P> = -1` of Minkowski space with the
//! form `-x0 y0 + x1 y1 + x2 y2`. A triangle is reduced to its congruence
//! coordinates `d_i = sqrt(1 - 2<P_{i+1}, P_{i+2}>)`; Napoleonization has a
//! closed form in these coordinates, which `napoleon` cross-checks against the
//! point construction and `iteration` drives towards the point limit
//! `d_i = sqrt(3)`.

pub mod certify;
pub mod dd;
pub mod disk;
pub mod error;
pub mod format;
pub mod iteration;
pub mod minkowski;
pub mod napoleon;
pub mod par;
pub mod sampling;
pub mod tol;
pub mod triangle;

pub use error::{Error, Result};
pub use iteration::{
    contraction_report, r_d_of, r_i_of, run, run_many, step, ContractionReport, StepOutcome, StopCriterion,
    Termination, Trajectory, TrajectoryRecord,
};
pub use minkowski::{
    apply_isometry, hyperbolic_cross, minkowski_inner, project_to_hyperboloid, random_point, triple_product, HPoint,
    LorentzMap, MVec,
};
pub use napoleon::{
    apex, centroid_equilateral, napoleonic_residual, napoleonize, napoleonize_class, nonexistence_certificate,
    Certificate, NapoleonParams, NapoleonResult, Orientation,
};
pub use par::Execution;
pub use tol::Tolerances;
pub use triangle::{
    alpha_of, canonicalize, chi_of, chi_point, classify, congruence_of, realize, CongruenceClass, DerivedScalars,
    Triangle, TriangleKind, SQRT_3,
};
