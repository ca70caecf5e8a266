//! Numeric tolerances shared across the crate.
//!
//! Each operation documents which of these it consumes. Values are
//! absolute unless noted; hyperboloid membership is scaled by the squared
//! Euclidean size of the vector, since far-out points cannot hold
//! `<P,P> = -1` to an absolute 1e-12 in f64.

use serde::{Deserialize, Serialize};

/// Membership test for the upper hyperboloid.
pub const POINT: f64 = 1e-12;
/// Below this (relative) magnitude a vector is not considered timelike.
pub const PROJECTION: f64 = 1e-14;
/// Minimum separation `-1 - <P,Q>` for two vertices to count as distinct.
pub const DISTINCT: f64 = 1e-12;
/// Negative radicand band that is still treated as realizable (chi = 0).
pub const REALIZABLE: f64 = 1e-9;
/// Distance from sqrt(3) below which a class is point-degenerate for `realize`.
pub const STRICT: f64 = 1e-9;
/// Default tolerance for `classify`.
pub const CLASS: f64 = 1e-9;
/// Form-preservation defect allowed in a `LorentzMap`.
pub const ISOMETRY: f64 = 1e-10;
/// Closed form vs point construction agreement inside `napoleonize`.
pub const CONSISTENCY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub point: f64,
    pub projection: f64,
    pub distinct: f64,
    pub realizable: f64,
    pub strict: f64,
    pub class: f64,
    pub consistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            point: POINT,
            projection: PROJECTION,
            distinct: DISTINCT,
            realizable: REALIZABLE,
            strict: STRICT,
            class: CLASS,
            consistency: CONSISTENCY,
        }
    }
}
