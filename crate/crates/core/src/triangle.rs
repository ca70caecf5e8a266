//! Triangles on the hyperboloid and their congruence coordinates.
//!
//! A triangle `P0 P1 P2` is summarized by `d_i = sqrt(1 - 2<P_{i+1}, P_{i+2}>)`
//! (indices mod 3), so `d_i` measures the side opposite `P_i`. Every
//! non-degenerate side has `d_i > sqrt(3)`. The scalars
//!
//! * `alpha = -1 + <P0,P1> + <P1,P2> + <P2,P0> = (1 - d0² - d1² - d2²) / 2`
//! * `chi = <P0 ×~ P1, P2>`, with `(2 chi)²` a symmetric polynomial in the `d_i²`
//! * `gamma = 3 (d0² + 1)(d1² + 1)(d2² + 1)`
//!
//! are all that the Napoleonization formulas need.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{project_to_hyperboloid, triple_product, HPoint, LorentzMap, MVec};
use crate::tol;

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Three pairwise distinct points of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    vertices: [HPoint; 3],
}

impl Triangle {
    pub fn new(vertices: [HPoint; 3]) -> Result<Self> {
        Self::with_tolerance(vertices, tol::DISTINCT)
    }

    pub fn with_tolerance(vertices: [HPoint; 3], tol_distinct: f64) -> Result<Self> {
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            if vertices[i].inner(vertices[j]) >= -1.0 - tol_distinct {
                return Err(Error::DegenerateTriangle { i, j });
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> [HPoint; 3] {
        self.vertices
    }

    pub fn vertex(&self, i: usize) -> HPoint {
        self.vertices[i % 3]
    }

    /// Relabels so that new `P_i` is old `P_{i+k}`.
    pub fn rotated(&self, k: usize) -> Triangle {
        let v = self.vertices;
        Triangle {
            vertices: [v[k % 3], v[(k + 1) % 3], v[(k + 2) % 3]],
        }
    }

    /// Exchanges `P1` and `P2`, reversing orientation.
    pub fn swapped(&self) -> Triangle {
        let [a, b, c] = self.vertices;
        Triangle { vertices: [a, c, b] }
    }

    pub fn transformed(&self, l: &LorentzMap) -> Result<Triangle> {
        let v = self.vertices;
        let mut out = [HPoint::ORIGIN; 3];
        for (o, p) in out.iter_mut().zip(v) {
            *o = crate::minkowski::apply_isometry(l, p)?;
        }
        Triangle::new(out)
    }
}

/// The congruence coordinates `(d0, d1, d2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct CongruenceClass {
    d: [f64; 3],
}

impl TryFrom<[f64; 3]> for CongruenceClass {
    type Error = Error;
    fn try_from(d: [f64; 3]) -> Result<Self> {
        CongruenceClass::new(d)
    }
}

impl From<CongruenceClass> for [f64; 3] {
    fn from(c: CongruenceClass) -> Self {
        c.d
    }
}

impl CongruenceClass {
    /// Accepts any finite triple with every `d_i >= sqrt(3)` (up to 1e-12).
    pub fn new(d: [f64; 3]) -> Result<Self> {
        for (index, &value) in d.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite("congruence class"));
            }
            if value < SQRT_3 - 1e-12 {
                return Err(Error::InvalidClass { index, value });
            }
        }
        Ok(Self { d })
    }

    pub fn equilateral(d: f64) -> Result<Self> {
        Self::new([d; 3])
    }

    /// Class from shifted coordinates `s_i = d_i² - 3`.
    pub fn from_shifted(s: [f64; 3]) -> Result<Self> {
        Self::new(s.map(|si| (3.0 + si.max(0.0)).sqrt()))
    }

    pub(crate) fn from_raw(d: [f64; 3]) -> Self {
        Self { d }
    }

    pub fn d(&self) -> [f64; 3] {
        self.d
    }

    pub fn squares(&self) -> [f64; 3] {
        self.d.map(|x| x * x)
    }

    /// `s_i = d_i² - 3`, computed with a fused multiply-add so that the
    /// value keeps its relative precision near the point limit.
    pub fn shifted(&self) -> [f64; 3] {
        self.d.map(|x| x.mul_add(x, -3.0).max(0.0))
    }

    /// `max_i (d_i² - 3)`.
    pub fn mu(&self) -> f64 {
        let s = self.shifted();
        s[0].max(s[1]).max(s[2])
    }

    /// Largest pairwise `|d_i - d_j|`.
    pub fn gap_max(&self) -> f64 {
        let [a, b, c] = self.d;
        (a - b).abs().max((b - c).abs()).max((c - a).abs())
    }

    /// `max_i |d_i - sqrt(3)|`.
    pub fn distance_to_point_limit(&self) -> f64 {
        self.d.iter().map(|x| (x - SQRT_3).abs()).fold(0.0, f64::max)
    }

    pub fn rotated(&self, k: usize) -> CongruenceClass {
        let d = self.d;
        CongruenceClass::from_raw([d[k % 3], d[(k + 1) % 3], d[(k + 2) % 3]])
    }

    /// Cyclic relabelling with `d0` maximal; ties go to the smallest rotation.
    pub fn canonical(&self) -> CongruenceClass {
        self.rotated(max_index(self.d))
    }

    /// `(2 chi)² = 3 Σd² - (Σ_{i<j} d_i² d_j² + Σ d_i⁴) + d0² d1² d2²`.
    pub fn radicand(&self) -> f64 {
        let [a, b, c] = self.squares();
        3.0 * (a + b + c) - (a * b + b * c + c * a + a * a + b * b + c * c) + a * b * c
    }

    pub fn alpha(&self) -> f64 {
        let [a, b, c] = self.squares();
        (1.0 - a - b - c) / 2.0
    }

    pub fn gamma(&self) -> f64 {
        let [a, b, c] = self.squares();
        3.0 * (a + 1.0) * (b + 1.0) * (c + 1.0)
    }

    pub fn chi(&self) -> Result<f64> {
        self.chi_with_tolerance(tol::REALIZABLE)
    }

    pub fn chi_with_tolerance(&self, tol_real: f64) -> Result<f64> {
        let r = self.radicand();
        if r < -tol_real {
            return Err(Error::Unrealizable {
                reason: format!("negative radicand {r}"),
            });
        }
        Ok(r.max(0.0).sqrt() / 2.0)
    }

    pub fn derived(&self) -> Result<DerivedScalars> {
        Ok(DerivedScalars {
            alpha: self.alpha(),
            chi: self.chi()?,
            gamma: self.gamma(),
        })
    }

    pub fn is_realizable(&self) -> bool {
        self.radicand() >= -tol::REALIZABLE
    }

    /// `d_i² - 1 <= (d_{i+1}² - 1)(d_{i+2}² - 1) + tol` for every `i`.
    pub fn satisfies_side_inequalities(&self, tol: f64) -> bool {
        let q = self.squares();
        (0..3).all(|i| q[i] - 1.0 <= (q[(i + 1) % 3] - 1.0) * (q[(i + 2) % 3] - 1.0) + tol)
    }

    pub fn is_equilateral(&self, tol: f64) -> bool {
        self.gap_max() <= tol
    }
}

fn max_index(d: [f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if d[i] > d[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScalars {
    pub alpha: f64,
    pub chi: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriangleKind {
    Equilateral,
    Isosceles,
    Cogeodesic,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: TriangleKind,
    pub tolerance: f64,
}

pub fn congruence_of(t: &Triangle) -> Result<CongruenceClass> {
    let p = t.vertices();
    let mut d = [0.0; 3];
    for (i, di) in d.iter_mut().enumerate() {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let ip = p[j].inner(p[k]);
        if ip >= -1.0 {
            return Err(Error::DegenerateTriangle { i: j, j: k });
        }
        *di = (1.0 - 2.0 * ip).sqrt();
    }
    CongruenceClass::new(d)
}

pub fn alpha_of(c: &CongruenceClass) -> f64 {
    c.alpha()
}

pub fn chi_of(c: &CongruenceClass) -> Result<f64> {
    c.chi()
}

/// Signed `chi = <P0 ×~ P1, P2>`.
pub fn chi_point(t: &Triangle) -> f64 {
    let [p0, p1, p2] = t.vertices().map(HPoint::vec);
    triple_product(p2, p0, p1)
}

/// Reorders vertices so that `chi_point >= 0` (swapping `P1, P2` if
/// needed), then rotates cyclically so that `d0` is maximal.
pub fn canonicalize(t: &Triangle) -> Result<Triangle> {
    let oriented = if chi_point(t) < 0.0 { t.swapped() } else { *t };
    let c = congruence_of(&oriented)?;
    Ok(oriented.rotated(max_index(c.d())))
}

/// Builds the triangle with `P0 = (1,0,0)`, `P1` on the x1 geodesic and
/// `chi >= 0` whose class is `c`.
pub fn realize(c: &CongruenceClass) -> Result<Triangle> {
    realize_with(c, &tol::Tolerances::default())
}

pub fn realize_with(c: &CongruenceClass, tols: &tol::Tolerances) -> Result<Triangle> {
    let d = c.d();
    for (index, &value) in d.iter().enumerate() {
        if value <= SQRT_3 + tols.strict {
            return Err(Error::DegenerateClass { index, value });
        }
    }
    let chi = c.chi_with_tolerance(tols.realizable)?;
    let s = c.shifted();
    let sq = c.squares();

    let c01 = (1.0 - sq[2]) / 2.0;
    let q0 = (1.0 - sq[1]) / 2.0;
    let q1 = (1.0 - sq[0]) / 2.0;

    let ch = -c01;
    let sh = (s[2] * (sq[2] + 1.0)).sqrt() / 2.0;
    let p0 = HPoint::ORIGIN;
    let p1 = project_to_hyperboloid(MVec::new(ch, sh, 0.0))?;

    let det = 1.0 - c01 * c01;
    let a0 = -(q0 + c01 * q1) / det;
    let a1 = -(q1 + c01 * q0) / det;
    let b = chi / (c01 * c01 - 1.0);
    let cross = p0.vec().cross(p1.vec());
    let raw = a0 * p0.vec() + a1 * p1.vec() + b * cross;
    let p2 = project_to_hyperboloid(raw)?;

    Triangle::with_tolerance([p0, p1, p2], tols.distinct)
}

pub fn classify(c: &CongruenceClass, tol_class: f64) -> Result<Classification> {
    let d = c.d();
    let chi = c.chi()?;
    let close = [
        (d[0] - d[1]).abs() <= tol_class,
        (d[1] - d[2]).abs() <= tol_class,
        (d[2] - d[0]).abs() <= tol_class,
    ];
    let equilateral = c.gap_max() <= tol_class;
    let cogeodesic = chi <= tol_class;
    let point_like = d.iter().all(|&x| x <= SQRT_3 + tol_class);

    let kind = if equilateral && (!cogeodesic || point_like) {
        TriangleKind::Equilateral
    } else if cogeodesic {
        TriangleKind::Cogeodesic
    } else if close.iter().filter(|&&b| b).count() == 1 {
        TriangleKind::Isosceles
    } else {
        TriangleKind::Generic
    };
    Ok(Classification {
        kind,
        tolerance: tol_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_triangle(rng: &mut ChaCha8Rng, radius: f64) -> Triangle {
        loop {
            let v = [
                random_point(rng, radius).unwrap(),
                random_point(rng, radius).unwrap(),
                random_point(rng, radius).unwrap(),
            ];
            if let Ok(t) = Triangle::with_tolerance(v, 1e-6) {
                return t;
            }
        }
    }

    #[test]
    fn class_of_regular_triple() {
        let t = realize(&CongruenceClass::equilateral(2.0).unwrap()).unwrap();
        let p = t.vertices();
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            assert!((p[i].inner(p[j]) + 1.5).abs() < 1e-12);
        }
        let c = congruence_of(&t).unwrap();
        for x in c.d() {
            assert!((x - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn class_of_isosceles_boost_pair() {
        // P1 and P2 both at rapidity 1 from P0, in different directions
        let p0 = HPoint::ORIGIN;
        let p1 = HPoint::polar(1.0, 0.0);
        let p2 = HPoint::polar(1.0, 1.2);
        let t = Triangle::new([p0, p1, p2]).unwrap();
        let c = congruence_of(&t).unwrap().d();
        let expected = (1.0 + 2.0 * 1f64.cosh()).sqrt();
        assert!((c[1] - expected).abs() < 1e-12);
        assert!((c[2] - expected).abs() < 1e-12);
    }

    #[test]
    fn alpha_examples() {
        assert!((alpha_of(&CongruenceClass::equilateral(SQRT_3).unwrap()) + 4.0).abs() < 1e-14);
        assert_eq!(alpha_of(&CongruenceClass::equilateral(2.0).unwrap()), -5.5);
    }

    #[test]
    fn alpha_matches_point_space_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t = random_triangle(&mut rng, 2.0);
            let p = t.vertices();
            let direct = -1.0 + p[0].inner(p[1]) + p[1].inner(p[2]) + p[2].inner(p[0]);
            let c = congruence_of(&t).unwrap();
            assert!((alpha_of(&c) - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn chi_examples() {
        // equilateral: radicand = d²(d²-3)², so chi = d(d²-3)/2
        for d in [1.8, 2.0, 3.5, 7.0] {
            let c = CongruenceClass::equilateral(d).unwrap();
            let expected = d * (d * d - 3.0) / 2.0;
            assert!((chi_of(&c).unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
        }
        assert_eq!(chi_of(&CongruenceClass::equilateral(2.0).unwrap()).unwrap(), 1.0);
        assert!(chi_of(&CongruenceClass::equilateral(SQRT_3).unwrap()).unwrap() < 1e-7);
        let bad = CongruenceClass::new([3.0, 1.8, 1.8]).unwrap();
        assert!((bad.radicand() + 29.8944).abs() < 1e-10);
        assert!(matches!(chi_of(&bad), Err(Error::Unrealizable { .. })));
    }

    #[test]
    fn chi_point_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let t = random_triangle(&mut rng, 2.0);
            let chi = chi_point(&t);
            let c = congruence_of(&t).unwrap();
            let scale = chi.abs().max(1.0);
            assert!((chi.abs() - chi_of(&c).unwrap()).abs() <= 1e-9 * scale);
            assert!((chi - chi_point(&t.rotated(1))).abs() <= 1e-12 * scale * 10.0);
            assert!((chi + chi_point(&t.swapped())).abs() <= 1e-12 * scale * 10.0);
        }
    }

    #[test]
    fn cogeodesic_triple_has_zero_chi() {
        let t = Triangle::new([HPoint::polar(-0.7, 0.0), HPoint::ORIGIN, HPoint::polar(1.3, 0.0)]).unwrap();
        assert!(chi_point(&t).abs() < 1e-10);
        let c = congruence_of(&t).unwrap();
        assert_eq!(classify(&c, 1e-9).unwrap().kind, TriangleKind::Cogeodesic);
    }

    #[test]
    fn canonicalize_orders_and_orients() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let t = random_triangle(&mut rng, 2.0);
            let canon = canonicalize(&t).unwrap();
            assert!(chi_point(&canon) >= 0.0);
            let d = congruence_of(&canon).unwrap().d();
            assert!(d[0] >= d[1] && d[0] >= d[2]);
            let mut before = congruence_of(&t).unwrap().d();
            let mut after = d;
            before.sort_by(f64::total_cmp);
            after.sort_by(f64::total_cmp);
            assert_eq!(before, after);
            assert_eq!(canonicalize(&canon).unwrap(), canon);
        }
    }

    #[test]
    fn canonicalize_fixes_negative_orientation() {
        let t = realize(&CongruenceClass::new([2.5, 2.2, 2.0]).unwrap()).unwrap();
        let flipped = t.swapped();
        assert!(chi_point(&flipped) < 0.0);
        assert!(chi_point(&canonicalize(&flipped).unwrap()) >= 0.0);
    }

    #[test]
    fn canonical_class_ties_prefer_identity() {
        let c = CongruenceClass::new([2.0, 2.0, 1.9]).unwrap();
        assert_eq!(c.canonical().d(), [2.0, 2.0, 1.9]);
        let c = CongruenceClass::new([1.9, 2.0, 2.0]).unwrap();
        assert_eq!(c.canonical().d(), [2.0, 2.0, 1.9]);
    }

    #[test]
    fn realize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut done = 0;
        while done < 1000 {
            let d = [
                rand::Rng::random_range(&mut rng, 1.75..6.0),
                rand::Rng::random_range(&mut rng, 1.75..6.0),
                rand::Rng::random_range(&mut rng, 1.75..6.0),
            ];
            let c = CongruenceClass::new(d).unwrap();
            if c.radicand() <= 0.0 {
                continue;
            }
            done += 1;
            let t = realize(&c).unwrap();
            assert!(chi_point(&t) >= 0.0);
            let back = congruence_of(&t).unwrap().d();
            for i in 0..3 {
                assert!((back[i] - d[i]).abs() < 1e-10, "{d:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn realize_rejects_bad_classes() {
        let bad = CongruenceClass::new([3.0, 1.8, 1.8]).unwrap();
        assert!(matches!(realize(&bad), Err(Error::Unrealizable { .. })));
        let point = CongruenceClass::new([SQRT_3, 2.0, 2.0]).unwrap();
        assert!(matches!(realize(&point), Err(Error::DegenerateClass { index: 0, .. })));
        assert!(matches!(
            CongruenceClass::new([1.5, 2.0, 2.0]),
            Err(Error::InvalidClass { index: 0, .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let tol = 1e-9;
        let c = CongruenceClass::equilateral(2.0).unwrap();
        assert_eq!(classify(&c, tol).unwrap().kind, TriangleKind::Equilateral);
        let c = CongruenceClass::new([2.0, 2.0, 2.0 + 10.0 * tol]).unwrap();
        assert_eq!(classify(&c, tol).unwrap().kind, TriangleKind::Isosceles);
        let c = CongruenceClass::new([2.5, 2.1, 1.9]).unwrap();
        assert_eq!(classify(&c, tol).unwrap().kind, TriangleKind::Generic);
        let c = CongruenceClass::equilateral(SQRT_3).unwrap();
        assert_eq!(classify(&c, tol).unwrap().kind, TriangleKind::Equilateral);
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let p = HPoint::polar(0.5, 0.3);
        assert!(matches!(
            Triangle::new([p, p, HPoint::ORIGIN]),
            Err(Error::DegenerateTriangle { .. })
        ));
    }

    #[test]
    fn shifted_keeps_precision() {
        let d = SQRT_3 + 1e-9;
        let c = CongruenceClass::equilateral(d).unwrap();
        let s = c.shifted()[0];
        let expected = 2.0 * SQRT_3 * 1e-9;
        assert!((s - expected).abs() < 1e-6 * expected);
    }
}
