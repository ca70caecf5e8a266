//! Minkowski space of signature (-,+,+) and the upper unit hyperboloid.
//!
//! Coordinates are ordered `(x0, x1, x2)` with `x0` the timelike one. The
//! bilinear form is `<v,w> = -v0 w0 + v1 w1 + v2 w2`, and the hyperbolic
//! cross product is `v ×~ w = J (v × w)` with `J = diag(-1, 1, 1)`.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A vector in Minkowski R³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MVec {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MVec {
    pub const ZERO: MVec = MVec::new(0.0, 0.0, 0.0);

    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        Self { x0, x1, x2 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x0, self.x1, self.x2]
    }

    pub fn is_finite(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite()
    }

    /// Minkowski inner product.
    pub fn inner(self, w: MVec) -> f64 {
        -self.x0 * w.x0 + self.x1 * w.x1 + self.x2 * w.x2
    }

    /// Euclidean cross product.
    pub fn euclid_cross(self, w: MVec) -> MVec {
        MVec::new(
            self.x1 * w.x2 - self.x2 * w.x1,
            self.x2 * w.x0 - self.x0 * w.x2,
            self.x0 * w.x1 - self.x1 * w.x0,
        )
    }

    /// Hyperbolic cross product `J (v × w)`.
    pub fn cross(self, w: MVec) -> MVec {
        let c = self.euclid_cross(w);
        MVec::new(-c.x0, c.x1, c.x2)
    }

    pub fn euclid_norm_sq(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn max_abs_diff(self, w: MVec) -> f64 {
        (self.x0 - w.x0)
            .abs()
            .max((self.x1 - w.x1).abs())
            .max((self.x2 - w.x2).abs())
    }
}

impl Add for MVec {
    type Output = MVec;
    fn add(self, w: MVec) -> MVec {
        MVec::new(self.x0 + w.x0, self.x1 + w.x1, self.x2 + w.x2)
    }
}

impl AddAssign for MVec {
    fn add_assign(&mut self, w: MVec) {
        *self = *self + w;
    }
}

impl Sub for MVec {
    type Output = MVec;
    fn sub(self, w: MVec) -> MVec {
        MVec::new(self.x0 - w.x0, self.x1 - w.x1, self.x2 - w.x2)
    }
}

impl Neg for MVec {
    type Output = MVec;
    fn neg(self) -> MVec {
        MVec::new(-self.x0, -self.x1, -self.x2)
    }
}

impl Mul<f64> for MVec {
    type Output = MVec;
    fn mul(self, s: f64) -> MVec {
        MVec::new(self.x0 * s, self.x1 * s, self.x2 * s)
    }
}

impl Mul<MVec> for f64 {
    type Output = MVec;
    fn mul(self, v: MVec) -> MVec {
        v * self
    }
}

impl Div<f64> for MVec {
    type Output = MVec;
    fn div(self, s: f64) -> MVec {
        MVec::new(self.x0 / s, self.x1 / s, self.x2 / s)
    }
}

pub fn minkowski_inner(v: MVec, w: MVec) -> f64 {
    v.inner(w)
}

pub fn hyperbolic_cross(v: MVec, w: MVec) -> MVec {
    v.cross(w)
}

/// `<u, v ×~ w>`, which equals the Euclidean determinant `u · (v × w)`.
pub fn triple_product(u: MVec, v: MVec, w: MVec) -> f64 {
    u.inner(v.cross(w))
}

/// A point on the upper sheet `<P,P> = -1`, `x0 >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct HPoint(MVec);

impl From<HPoint> for [f64; 3] {
    fn from(p: HPoint) -> Self {
        p.0.to_array()
    }
}

impl HPoint {
    /// The base point `(1, 0, 0)`.
    pub const ORIGIN: HPoint = HPoint(MVec::new(1.0, 0.0, 0.0));

    pub fn new(v: MVec) -> Result<Self> {
        Self::with_tolerance(v, tol::POINT)
    }

    /// Validates membership with `|<v,v> + 1| <= tol * max(1, |v|²)`.
    pub fn with_tolerance(v: MVec, tol: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        let scale = v.euclid_norm_sq().max(1.0);
        let defect = v.inner(v) + 1.0;
        if defect.abs() > tol * scale {
            return Err(Error::OffHyperboloid { defect });
        }
        if v.x0 < 1.0 - tol * scale {
            return Err(Error::WrongSheet { x0: v.x0 });
        }
        Ok(HPoint(v))
    }

    /// Point at hyperbolic distance `radius` from the origin in direction `angle`.
    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let sh = radius.sinh();
        HPoint(MVec::new(radius.cosh(), sh * c, sh * s))
    }

    pub fn vec(self) -> MVec {
        self.0
    }

    pub fn inner(self, q: HPoint) -> f64 {
        self.0.inner(q.0)
    }

    /// Hyperbolic distance `arccosh(-<P,Q>)`.
    pub fn distance(self, q: HPoint) -> f64 {
        (-self.inner(q)).max(1.0).acosh()
    }
}

/// Normalizes a future-pointing timelike vector onto the hyperboloid.
pub fn project_to_hyperboloid(v: MVec) -> Result<HPoint> {
    project_with_tolerance(v, tol::PROJECTION)
}

pub fn project_with_tolerance(v: MVec, tol_proj: f64) -> Result<HPoint> {
    if !v.is_finite() {
        return Err(Error::NonFinite("vector"));
    }
    let norm = v.inner(v);
    if norm >= -tol_proj * v.euclid_norm_sq().max(1.0) {
        return Err(Error::NotTimelike { norm });
    }
    if v.x0 <= 0.0 {
        return Err(Error::WrongSheet { x0: v.x0 });
    }
    HPoint::new(v / (-norm).sqrt())
}

/// A linear map preserving the Minkowski form and the upper sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMap {
    m: [[f64; 3]; 3],
}

impl LorentzMap {
    pub const IDENTITY: LorentzMap = LorentzMap {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let map = LorentzMap { m };
        map.validate(tol::ISOMETRY)?;
        Ok(map)
    }

    /// Rotation by `theta` in the (x1, x2) plane.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        LorentzMap {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    /// Boost of rapidity `t` in the (x0, x1) block.
    pub fn boost(t: f64) -> Self {
        let (ch, sh) = (t.cosh(), t.sinh());
        LorentzMap {
            m: [[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Reflection `x2 -> -x2`; orientation reversing, still an isometry.
    pub fn reflection() -> Self {
        LorentzMap {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
        }
    }

    /// `rotation(a) · boost(t) · rotation(b)` with `a, b` uniform on the
    /// circle and `t` uniform in `[0, max_rapidity]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> Self {
        let a = rng.random_range(0.0..TAU);
        let t = rng.random_range(0.0..=max_rapidity.max(0.0));
        let b = rng.random_range(0.0..TAU);
        Self::rotation(a).compose(&Self::boost(t)).compose(&Self::rotation(b))
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &LorentzMap) -> LorentzMap {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        LorentzMap { m }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply_vec(&self, v: MVec) -> MVec {
        let m = &self.m;
        MVec::new(
            m[0][0] * v.x0 + m[0][1] * v.x1 + m[0][2] * v.x2,
            m[1][0] * v.x0 + m[1][1] * v.x1 + m[1][2] * v.x2,
            m[2][0] * v.x0 + m[2][1] * v.x1 + m[2][2] * v.x2,
        )
    }

    /// Checks `mᵀ J m = J` (relative to the entry scale) and `m00 >= 1`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = &self.m;
        let j = [-1.0, 1.0, 1.0];
        let scale = m.iter().flatten().map(|x| x * x).fold(1.0_f64, f64::max);
        let mut defect = 0.0_f64;
        for a in 0..3 {
            for b in 0..3 {
                let g: f64 = (0..3).map(|k| j[k] * m[k][a] * m[k][b]).sum();
                let target = if a == b { j[a] } else { 0.0 };
                defect = defect.max((g - target).abs());
            }
        }
        if !defect.is_finite() || defect > tol * scale || m[0][0] < 1.0 - tol * scale {
            return Err(Error::InvalidIsometry { defect });
        }
        Ok(())
    }
}

pub fn apply_isometry(l: &LorentzMap, p: HPoint) -> Result<HPoint> {
    l.validate(tol::ISOMETRY)?;
    HPoint::new(l.apply_vec(p.vec()))
}

/// Boost of the origin by a uniform direction and a uniform hyperbolic
/// radius in `[0, radius_bound]`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, radius_bound: f64) -> Result<HPoint> {
    if !(radius_bound >= 0.0 && radius_bound.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius bound must be finite and non-negative, got {radius_bound}"
        )));
    }
    let angle = rng.random_range(0.0..TAU);
    let radius = rng.random_range(0.0..=radius_bound);
    Ok(HPoint::polar(radius, angle))
}
