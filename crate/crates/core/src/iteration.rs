//! Iterated Napoleonization in class space.
//!
//! Each step maps `(d0, d1, d2)` to the class of the Napoleonization and
//! relabels cyclically so that `d0` is maximal. Alongside `d` the iteration
//! carries `s_i = d_i² - 3`; once `mu = max s_i` drops below
//! [`SHIFTED_THRESHOLD`] the step is evaluated in `s` directly, which keeps
//! contraction ratios meaningful near the point limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::HPoint;
use crate::napoleon::{napoleonize, napoleonize_class, napoleonize_shifted, NapoleonParams, Orientation};
use crate::par::{map_indexed, Execution};
use crate::tol;
use crate::triangle::{realize, CongruenceClass, SQRT_3};

/// `2/3 + 2/27 + 1/(3 sqrt 3)`, the per-step bound on `r_i`.
pub const RHO: f64 = 2.0 / 3.0 + 2.0 / 27.0 + 1.0 / (3.0 * SQRT_3);
/// Per-step contraction of `mu` for `ε = +1`.
pub const MU_FACTOR: f64 = 7.0 / 12.0;
/// Bound on `d0²` one step after all squared gaps fall below 1 (`ε = -1`).
pub const D0_SQ_BOUND: f64 = 25.0 / 3.0;
/// Below this `mu` the step switches to shifted coordinates.
pub const SHIFTED_THRESHOLD: f64 = 1e-4;
/// Ratio checks skip denominators smaller than this.
pub const RATIO_FLOOR: f64 = 1e-12;
const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopCriterion {
    pub max_steps: usize,
    /// Stop once `max_i |d_i - sqrt 3|` falls below this.
    pub tol_point_limit: f64,
    /// Point-space cross-check period in steps; 0 disables it.
    pub check_every: usize,
}

impl Default for StopCriterion {
    fn default() -> Self {
        Self {
            max_steps: 10_000,
            tol_point_limit: 1e-6,
            check_every: 10,
        }
    }
}

impl StopCriterion {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps < 1 {
            return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
        }
        if !(self.tol_point_limit > 0.0 && self.tol_point_limit.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tol_point_limit must be positive, got {}",
                self.tol_point_limit
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    PointLimitReached,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub k: usize,
    /// Canonical: `d0` maximal.
    pub class: CongruenceClass,
    /// `d_i² - 3`, tracked with full relative precision.
    pub shifted: [f64; 3],
    pub alpha: f64,
    pub chi: f64,
    pub gamma: f64,
    pub r_d: f64,
    pub r_i_max: f64,
    pub mu: f64,
    pub gap_max: f64,
}

impl TrajectoryRecord {
    fn new(k: usize, class: CongruenceClass, shifted: [f64; 3], epsilon: Orientation) -> Result<Self> {
        let chi = chi_shifted(shifted)?;
        let r_d = r_d_with_chi(&class, chi, epsilon);
        let d = class.d();
        let r_i_max = (0..3)
            .map(|i| r_d.abs() / (d[(i + 1) % 3] + d[(i + 2) % 3]))
            .fold(0.0, f64::max);
        Ok(Self {
            k,
            class,
            shifted,
            alpha: class.alpha(),
            chi,
            gamma: class.gamma(),
            r_d,
            r_i_max,
            mu: shifted[0].max(shifted[1]).max(shifted[2]),
            gap_max: class.gap_max(),
        })
    }

    /// `max_i |d_i - sqrt 3|`, from the shifted coordinates.
    pub fn distance_to_point_limit(&self) -> f64 {
        let d = self.class.d();
        (0..3).map(|i| self.shifted[i] / (d[i] + SQRT_3)).fold(0.0, f64::max)
    }
}

/// `χ` from `(2χ)² = -Σ s_i² + 2 Σ_{i<j} s_i s_j + s0 s1 s2`.
fn chi_shifted(s: [f64; 3]) -> Result<f64> {
    let [a, b, c] = s;
    let r = -(a * a + b * b + c * c) + 2.0 * (a * b + b * c + c * a) + a * b * c;
    if r < -tol::REALIZABLE {
        return Err(Error::Unrealizable {
            reason: format!("negative radicand {r}"),
        });
    }
    Ok(r.max(0.0).sqrt() / 2.0)
}

fn r_d_with_chi(c: &CongruenceClass, chi: f64, epsilon: Orientation) -> f64 {
    let [d0, d1, d2] = c.d();
    let alpha = c.alpha();
    let pairs = d0 * d1 + d1 * d2 + d2 * d0;
    4.0 / c.gamma() * (-2.0 * alpha * (d0 * d1 * d2 - d0 - d1 - d2) - 2.0 * epsilon.sign() * chi * (pairs - 1.0))
}

/// `r_d = (4/γ)(-2α(d0 d1 d2 - Σd) - 2εχ(Σ_{i<j} d_i d_j - 1))`.
pub fn r_d_of(c: &CongruenceClass, epsilon: Orientation) -> Result<f64> {
    Ok(r_d_with_chi(c, c.chi()?, epsilon))
}

/// `r_i = |r_d| / (d_{i+1} + d_{i+2})`.
pub fn r_i_of(c: &CongruenceClass, epsilon: Orientation) -> Result<[f64; 3]> {
    let r = r_d_of(c, epsilon)?.abs();
    let d = c.d();
    Ok([0, 1, 2].map(|i| r / (d[(i + 1) % 3] + d[(i + 2) % 3])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepOutcome {
    /// `e` in the labels of the input.
    pub raw: CongruenceClass,
    pub raw_shifted: [f64; 3],
    /// `raw` rotated so that the first entry is maximal.
    pub next: CongruenceClass,
    pub next_shifted: [f64; 3],
    pub status: Option<Termination>,
}

fn max_index(x: [f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if x[i] > x[best] {
            best = i;
        }
    }
    best
}

fn rotate<T: Copy>(x: [T; 3], k: usize) -> [T; 3] {
    [x[k % 3], x[(k + 1) % 3], x[(k + 2) % 3]]
}

fn advance(c: &CongruenceClass, s: [f64; 3], epsilon: Orientation, tol_point: f64) -> Result<StepOutcome> {
    let mu = s[0].max(s[1]).max(s[2]);
    let (e, es) = if mu < SHIFTED_THRESHOLD {
        let es = napoleonize_shifted(s, epsilon, tol::REALIZABLE)?;
        (CongruenceClass::new(es.map(|x| (3.0 + x).sqrt()))?, es)
    } else {
        let e = napoleonize_class(c, &NapoleonParams::new(epsilon))?;
        let e = CongruenceClass::new(e.d())?;
        (e, e.shifted())
    };
    chi_shifted(es)?;
    let k = max_index(es);
    let next = e.rotated(k);
    let next_shifted = rotate(es, k);
    let done = (0..3).all(|i| next_shifted[i] / (next.d()[i] + SQRT_3) < tol_point);
    Ok(StepOutcome {
        raw: e,
        raw_shifted: es,
        next,
        next_shifted,
        status: done.then_some(Termination::PointLimitReached),
    })
}

/// One Napoleonization step in class space, with the default point-limit tolerance.
pub fn step(c: &CongruenceClass, epsilon: Orientation) -> Result<StepOutcome> {
    advance(c, c.shifted(), epsilon, StopCriterion::default().tol_point_limit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub epsilon: Orientation,
    pub records: Vec<TrajectoryRecord>,
    pub termination: Termination,
    /// Number of point-space cross-checks that ran.
    pub point_checks: usize,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory has a start record")
    }

    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }
}

/// Cross-checks one step against the point construction. Classes too close
/// to the point limit to realize are skipped.
fn point_check(c: &CongruenceClass, e: &CongruenceClass, epsilon: Orientation) -> Result<bool> {
    let t = match realize(c) {
        Ok(t) => t,
        Err(Error::DegenerateClass { .. } | Error::DegenerateTriangle { .. }) => return Ok(false),
        Err(err) => return Err(err),
    };
    let r = match napoleonize(&t, &NapoleonParams::new(epsilon)) {
        Ok(r) => r,
        Err(Error::DegeneratePair { .. } | Error::DegenerateTriangle { .. }) => return Ok(false),
        Err(err) => return Err(err),
    };
    let mut a = r.e_class.d();
    let mut b = e.d();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let discrepancy = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.max(1.0))
        .fold(0.0, f64::max);
    if discrepancy > tol::CONSISTENCY {
        return Err(Error::ConsistencyFailure { discrepancy });
    }
    Ok(true)
}

pub fn run(c0: &CongruenceClass, epsilon: Orientation, stop: &StopCriterion) -> Result<Trajectory> {
    stop.validate()?;
    let c0 = c0.canonical();
    let mut rec = TrajectoryRecord::new(0, c0, c0.shifted(), epsilon)?;
    let mut records = vec![rec];
    let mut point_checks = 0;
    if rec.distance_to_point_limit() < stop.tol_point_limit {
        return Ok(Trajectory {
            epsilon,
            records,
            termination: Termination::PointLimitReached,
            point_checks,
        });
    }
    for k in 1..=stop.max_steps {
        let out = advance(&rec.class, rec.shifted, epsilon, stop.tol_point_limit)?;
        if stop.check_every > 0 && (k - 1) % stop.check_every == 0 && point_check(&rec.class, &out.raw, epsilon)? {
            point_checks += 1;
        }
        rec = TrajectoryRecord::new(k, out.next, out.next_shifted, epsilon)?;
        records.push(rec);
        if let Some(status) = out.status {
            return Ok(Trajectory {
                epsilon,
                records,
                termination: status,
                point_checks,
            });
        }
    }
    Ok(Trajectory {
        epsilon,
        records,
        termination: Termination::MaxSteps,
        point_checks,
    })
}

/// Independent trajectories, one per start, in input order.
pub fn run_many(
    starts: &[CongruenceClass],
    epsilon: Orientation,
    stop: &StopCriterion,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    map_indexed(starts.len(), exec, |i| run(&starts[i], epsilon, stop))
}

/// Point-space iteration: Napoleonize the triangle itself, up to `steps`
/// times. Returns the class after each step, canonicalized; stops early once
/// the vertices can no longer be told apart.
pub fn run_points(c0: &CongruenceClass, epsilon: Orientation, steps: usize) -> Result<Vec<CongruenceClass>> {
    let mut t = realize(&c0.canonical())?;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let r = match napoleonize(&t, &NapoleonParams::new(epsilon)) {
            Ok(r) => r,
            Err(Error::DegeneratePair { .. } | Error::DegenerateTriangle { .. }) => break,
            Err(e) => return Err(e),
        };
        out.push(r.e_class.canonical());
        t = match crate::triangle::Triangle::new(r.centroids) {
            Ok(t) => t,
            Err(Error::DegenerateTriangle { .. }) => break,
            Err(e) => return Err(e),
        };
    }
    Ok(out)
}

/// Squared sides sorted in decreasing order.
fn sorted_squares(s: [f64; 3]) -> [f64; 3] {
    let mut x = s;
    x.sort_by(|a, b| b.total_cmp(a));
    x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub epsilon: Orientation,
    pub steps: usize,
    /// `mu^(k+1) / mu^(k)`, `None` when `mu^(k) < 1e-12`.
    pub mu_ratios: Vec<Option<f64>>,
    pub max_mu_ratio: Option<f64>,
    /// `max_j (D0 - Dj)^(k+1) / (D0 - Dj)^(k)` with `D = d²`, `None` when vacuous.
    pub gap_ratios: Vec<Option<f64>>,
    pub max_gap_ratio: Option<f64>,
    /// Largest `e0² - 3 - 16 d0²(d0² - 3) / (3 (d1² + 1)(d2² + 1))` over the run.
    pub step_bound_excess: f64,
    /// Largest `d0²` seen one step after both squared gaps were below 1.
    pub max_d0_sq_after_small_gap: Option<f64>,
    pub closure_ok: bool,
    pub order_preserved: bool,
    pub mu_bound_ok: bool,
    pub gap_bound_ok: bool,
    pub step_bound_ok: bool,
    pub d0_bound_ok: bool,
}

impl ContractionReport {
    /// The bounds that apply to this orientation, plus closure.
    pub fn passed(&self) -> bool {
        match self.epsilon {
            Orientation::Plus => self.mu_bound_ok && self.closure_ok,
            Orientation::Minus => {
                self.gap_bound_ok && self.step_bound_ok && self.order_preserved && self.d0_bound_ok && self.closure_ok
            }
        }
    }
}

fn max_opt(xs: &[Option<f64>]) -> Option<f64> {
    xs.iter().flatten().copied().reduce(f64::max)
}

fn class_is_closed(c: &CongruenceClass, s: [f64; 3]) -> bool {
    let q = c.squares();
    let sides = c.d().iter().all(|&x| x >= SQRT_3 - 1e-12);
    let tri = (0..3).all(|i| q[i] - 1.0 <= (q[(i + 1) % 3] - 1.0) * (q[(i + 2) % 3] - 1.0) + CHECK_TOL);
    sides && tri && chi_shifted(s).is_ok()
}

pub fn contraction_report(t: &Trajectory) -> Result<ContractionReport> {
    if t.records.len() < 2 {
        return Err(Error::InsufficientData(
            "a contraction report needs at least two records",
        ));
    }
    let eps = t.epsilon;
    let mut mu_ratios = Vec::new();
    let mut gap_ratios = Vec::new();
    let mut step_bound_excess = f64::NEG_INFINITY;
    let mut max_d0_sq_after_small_gap: Option<f64> = None;
    let mut order_preserved = true;
    let mut closure_ok = t.records.iter().all(|r| class_is_closed(&r.class, r.shifted));

    for w in t.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        mu_ratios.push((a.mu >= RATIO_FLOOR).then(|| b.mu / a.mu));

        let (da, db) = (sorted_squares(a.shifted), sorted_squares(b.shifted));
        let mut ratio: Option<f64> = None;
        for j in 1..3 {
            let before = da[0] - da[j];
            if before >= RATIO_FLOOR {
                let r = (db[0] - db[j]) / before;
                ratio = Some(ratio.map_or(r, |m| m.max(r)));
            }
        }
        gap_ratios.push(ratio);

        let q = a.class.squares();
        let bound = 16.0 * q[0] * a.shifted[0] / (3.0 * (q[1] + 1.0) * (q[2] + 1.0));
        step_bound_excess = step_bound_excess.max(b.shifted[0] - bound);

        if da[0] - da[2] < 1.0 {
            let d0 = b.shifted[0] + 3.0;
            max_d0_sq_after_small_gap = Some(max_d0_sq_after_small_gap.map_or(d0, |m| m.max(d0)));
        }

        let out = advance(&a.class, a.shifted, eps, 0.0)?;
        let (d, e) = (a.class.d(), out.raw.d());
        for i in 0..3 {
            for j in 0..3 {
                let scale = d[i].max(d[j]);
                if d[i] - d[j] > CHECK_TOL * scale && e[i] - e[j] < -CHECK_TOL * scale {
                    order_preserved = false;
                }
            }
        }
        closure_ok &= class_is_closed(&out.raw, out.raw_shifted);
    }

    let max_mu_ratio = max_opt(&mu_ratios);
    let max_gap_ratio = max_opt(&gap_ratios);
    Ok(ContractionReport {
        epsilon: eps,
        steps: t.steps(),
        mu_bound_ok: max_mu_ratio.is_none_or(|m| m <= MU_FACTOR + CHECK_TOL),
        gap_bound_ok: max_gap_ratio.is_none_or(|m| m <= RHO + CHECK_TOL),
        step_bound_ok: step_bound_excess <= CHECK_TOL,
        d0_bound_ok: max_d0_sq_after_small_gap.is_none_or(|m| m <= D0_SQ_BOUND + 1e-6),
        mu_ratios,
        max_mu_ratio,
        gap_ratios,
        max_gap_ratio,
        step_bound_excess,
        max_d0_sq_after_small_gap,
        closure_ok,
        order_preserved,
    })
}

/// Centroids of the point-space Napoleonization of `realize(c)`.
pub fn centroids_of(c: &CongruenceClass, epsilon: Orientation) -> Result<[HPoint; 3]> {
    Ok(napoleonize(&realize(c)?, &NapoleonParams::new(epsilon))?.centroids)
}
