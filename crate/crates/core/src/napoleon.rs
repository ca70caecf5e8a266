//! Napoleonization: equilateral flanks, their centroids, and the map on
//! congruence classes.
//!
//! For a side `P_{i+1} P_{i+2}` the flank apex `Q_i` and flank centroid `R_i`
//! are built with one common orientation sign `ε`. The class of the
//! Napoleonization `R0 R1 R2` has a closed form in `(d0, d1, d2)`:
//!
//! ```text
//! γ <R_{i+1}, R_{i+2}> = (d_i² + 1) ( 4 (α d_{i+1} d_{i+2} + ε χ (d_{i+1} + d_{i+2}))
//!                                    - (d_{i+1}² - 1)(d_{i+2}² - 1) + 2 (d_i² - 1) )
//! ```
//!
//! and `R0 R1 R2` is equilateral for a non-equilateral input exactly when
//! `α (Σd - Πd) + ε χ (1 - Σ_{i<j} d_i d_j)` vanishes. The product of the two
//! residuals (both signs) factors as `γ/24 · Σ(d_i - d_j)² · (Σd² + Σd_i d_j - 2)`,
//! which is positive off the diagonal; `nonexistence_certificate` evaluates both
//! sides of that identity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::minkowski::{project_to_hyperboloid, HPoint};
use crate::tol::{self, Tolerances};
use crate::triangle::{canonicalize, classify, congruence_of, CongruenceClass, Triangle, TriangleKind, SQRT_3};

/// The flank orientation sign `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// `ε = +1`: equilateral triangles collapse to a point.
    Plus,
    /// `ε = -1`.
    Minus,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::Plus, Orientation::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Orientation::Plus => 1.0,
            Orientation::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Plus => "+1",
            Orientation::Minus => "-1",
        })
    }
}

impl FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Orientation::Plus),
            "-1" | "-" | "minus" => Ok(Orientation::Minus),
            other => Err(Error::InvalidParameter(format!(
                "epsilon must be +1 or -1, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NapoleonParams {
    pub epsilon: Orientation,
    pub tol: Tolerances,
}

impl NapoleonParams {
    pub fn new(epsilon: Orientation) -> Self {
        Self {
            epsilon,
            tol: Tolerances::default(),
        }
    }
}

impl From<Orientation> for NapoleonParams {
    fn from(epsilon: Orientation) -> Self {
        Self::new(epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NapoleonResult {
    /// The input after canonical relabelling; `R_i` sits on the side opposite its `P_i`.
    pub triangle: Triangle,
    pub centroids: [HPoint; 3],
    pub e_class: CongruenceClass,
    pub residual: f64,
}

fn checked_pair(p0: HPoint, p1: HPoint) -> Result<f64> {
    let c = p0.inner(p1);
    if c >= -1.0 - tol::DISTINCT {
        return Err(Error::DegeneratePair { inner: c });
    }
    Ok(c)
}

/// Third vertex `Q` of the equilateral triangle `P0 P1 Q` on the `ε` side.
pub fn apex(p0: HPoint, p1: HPoint, epsilon: Orientation) -> Result<HPoint> {
    let c = checked_pair(p0, p1)?;
    let (v0, v1) = (p0.vec(), p1.vec());
    let raw = (-c * (v0 + v1) + epsilon.sign() * (1.0 - 2.0 * c).sqrt() * v0.cross(v1)) / (1.0 - c);
    project_to_hyperboloid(raw)
}

/// Centroid of the equilateral triangle erected on `P0 P1` with orientation `ε`.
pub fn centroid_equilateral(p0: HPoint, p1: HPoint, epsilon: Orientation) -> Result<HPoint> {
    let c = checked_pair(p0, p1)?;
    let (v0, v1) = (p0.vec(), p1.vec());
    let raw = ((1.0 - 2.0 * c).sqrt() * (v0 + v1) + epsilon.sign() * v0.cross(v1)) / (SQRT_3 * (1.0 - c));
    project_to_hyperboloid(raw)
}

/// Point-space Napoleonization, cross-checked against the closed form.
pub fn napoleonize(t: &Triangle, p: &NapoleonParams) -> Result<NapoleonResult> {
    let canon = canonicalize(t)?;
    let v = canon.vertices();
    let mut centroids = [HPoint::ORIGIN; 3];
    for (i, r) in centroids.iter_mut().enumerate() {
        *r = centroid_equilateral(v[(i + 1) % 3], v[(i + 2) % 3], p.epsilon)?;
    }
    let mut e = [0.0; 3];
    for (i, ei) in e.iter_mut().enumerate() {
        let ip = centroids[(i + 1) % 3].inner(centroids[(i + 2) % 3]);
        *ei = (1.0 - 2.0 * ip).max(3.0).sqrt();
    }
    let e_class = CongruenceClass::new(e)?;

    let class = congruence_of(&canon)?;
    let closed = napoleonize_class(&class, p)?;
    let discrepancy = e
        .iter()
        .zip(closed.d())
        .map(|(a, b)| (a - b).abs() / a.max(1.0))
        .fold(0.0, f64::max);
    if discrepancy > p.tol.consistency {
        return Err(Error::ConsistencyFailure { discrepancy });
    }

    Ok(NapoleonResult {
        triangle: canon,
        centroids,
        e_class,
        residual: napoleonic_residual(&class, p)?,
    })
}

/// `<R_{i+1}, R_{i+2}>` for `i = 0, 1, 2`, from the closed form.
pub fn centroid_inner_products(c: &CongruenceClass, epsilon: Orientation) -> Result<[f64; 3]> {
    let d = c.d();
    let sq = c.squares();
    let alpha = c.alpha();
    let chi = c.chi()?;
    let gamma = c.gamma();
    let eps = epsilon.sign();
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let inner = 4.0 * (alpha * d[j] * d[k] + eps * chi * (d[j] + d[k])) - (sq[j] - 1.0) * (sq[k] - 1.0)
            + 2.0 * (sq[i] - 1.0);
        *o = (sq[i] + 1.0) * inner / gamma;
    }
    Ok(out)
}

/// Class-space Napoleonization: `e_i = sqrt(1 - 2 <R_{i+1}, R_{i+2}>)`.
///
/// Labels follow the input; no relabelling is applied.
pub fn napoleonize_class(c: &CongruenceClass, p: &NapoleonParams) -> Result<CongruenceClass> {
    let ip = centroid_inner_products(c, p.epsilon)?;
    Ok(CongruenceClass::from_raw(ip.map(|x| (1.0 - 2.0 * x).max(3.0).sqrt())))
}

/// The same map in shifted coordinates `s_i = d_i² - 3`, returning
/// `e_i² - 3` without the cancellation that `1 - 2<R,R> - 3` suffers near
/// the point limit.
pub fn napoleonize_shifted(s: [f64; 3], epsilon: Orientation, tol_real: f64) -> Result<[f64; 3]> {
    let [s0, s1, s2] = s;
    let radicand = -(s0 * s0 + s1 * s1 + s2 * s2) + 2.0 * (s0 * s1 + s1 * s2 + s2 * s0) + s0 * s1 * s2;
    if radicand < -tol_real {
        return Err(Error::Unrealizable {
            reason: format!("negative radicand {radicand}"),
        });
    }
    let chi = radicand.max(0.0).sqrt() / 2.0;
    let d = s.map(|x| (3.0 + x).sqrt());
    let total = s0 + s1 + s2;
    let eps = epsilon.sign();
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (sj, sk) = (s[j], s[k]);
        // d_j d_k - 3, rationalized
        let q = (3.0 * (sj + sk) + sj * sk) / (d[j] * d[k] + 3.0);
        let u = -4.0 * eps * chi * (d[j] + d[k]) + 16.0 * q + 2.0 * total * q + 4.0 * s[i]
            - 4.0 * sj
            - 4.0 * sk
            - 2.0 * sj * sk;
        *o = (2.0 * u / (3.0 * (4.0 + sj) * (4.0 + sk))).max(0.0);
    }
    Ok(out)
}

/// `α (d0 + d1 + d2 - d0 d1 d2) + ε χ (1 - d0 d1 - d1 d2 - d2 d0)`.
pub fn napoleonic_residual(c: &CongruenceClass, p: &NapoleonParams) -> Result<f64> {
    let c = c.canonical();
    let [d0, d1, d2] = c.d();
    let chi = c.chi_with_tolerance(p.tol.realizable)?;
    Ok(c.alpha() * (d0 + d1 + d2 - d0 * d1 * d2) + p.epsilon.sign() * chi * (1.0 - d0 * d1 - d1 * d2 - d2 * d0))
}

/// Verdict of the residual criterion for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NapoleonicVerdict {
    /// Equilateral input; the criterion does not apply.
    EquilateralInput,
    /// Cogeodesic input (`χ = 0`); outside the criterion's domain.
    CogeodesicInput,
    Napoleonic {
        residual: f64,
    },
    NotNapoleonic {
        residual: f64,
    },
}

pub fn napoleonic_verdict(c: &CongruenceClass, p: &NapoleonParams) -> Result<NapoleonicVerdict> {
    let kind = classify(c, p.tol.class)?.kind;
    Ok(match kind {
        TriangleKind::Equilateral => NapoleonicVerdict::EquilateralInput,
        TriangleKind::Cogeodesic => NapoleonicVerdict::CogeodesicInput,
        _ => {
            let residual = napoleonic_residual(c, p)?;
            if residual.abs() <= p.tol.class {
                NapoleonicVerdict::Napoleonic { residual }
            } else {
                NapoleonicVerdict::NotNapoleonic { residual }
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// `α² (Σd - Πd)² - χ² (1 - Σ d_i d_j)²`
    pub lhs: f64,
    /// `γ/24 · Σ(d_i - d_j)² · (Σd² + Σ d_i d_j - 2)`
    pub rhs: f64,
}

impl Certificate {
    /// `|lhs - rhs| / max(1, |rhs|)`
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1.0)
    }
}

/// Evaluates both sides of the factorization in double-double precision.
pub fn nonexistence_certificate(c: &CongruenceClass) -> Result<Certificate> {
    let radicand = c.radicand();
    if radicand < -tol::REALIZABLE {
        return Err(Error::Unrealizable {
            reason: format!("negative radicand {radicand}"),
        });
    }
    let [d0, d1, d2] = c.d().map(Dd::new);
    let [a, b, cc] = [d0.square(), d1.square(), d2.square()];
    let one = Dd::new(1.0);

    let alpha = (one - a - b - cc).scale(0.5);
    let sum = d0 + d1 + d2;
    let prod = d0 * d1 * d2;
    let pairs = d0 * d1 + d1 * d2 + d2 * d0;
    let two_chi_sq = (a + b + cc).scale(3.0) - (a * b + b * cc + cc * a + a * a + b * b + cc * cc) + a * b * cc;

    let lhs = alpha.square() * (sum - prod).square() - two_chi_sq.scale(0.25) * (one - pairs).square();

    let gamma = (a + one) * (b + one) * (cc + one);
    let spread = (d0 - d1).square() + (d1 - d2).square() + (d2 - d0).square();
    let tail = a + b + cc + pairs - Dd::new(2.0);
    let rhs = (gamma * spread * tail).scale(0.125);

    Ok(Certificate {
        lhs: lhs.to_f64(),
        rhs: rhs.to_f64(),
    })
}
