//! Seeded sampling of realizable classes and a Monte Carlo sweep of the
//! per-class statements (non-existence residual, contraction, `r_i` bound).
//!
//! Sample `i` draws from its own ChaCha stream (`seed`, stream `i`), so the
//! samples do not depend on how the work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iteration::{r_d_of, r_i_of, MU_FACTOR, RATIO_FLOOR, RHO};
use crate::napoleon::{napoleonic_residual, napoleonize_class, NapoleonParams, Orientation};
use crate::par::{map_indexed, Execution};
use crate::tol;
use crate::triangle::{CongruenceClass, SQRT_3};

/// Uniform in `[sqrt 3, d_max]³`, rejected until strictly realizable and
/// away from the point limit.
pub fn random_class<R: Rng + ?Sized>(rng: &mut R, d_max: f64) -> Result<CongruenceClass> {
    let lo = SQRT_3 + tol::STRICT;
    if !(d_max > lo && d_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "d_max must exceed sqrt(3), got {d_max}"
        )));
    }
    loop {
        let d = [
            rng.random_range(lo..d_max),
            rng.random_range(lo..d_max),
            rng.random_range(lo..d_max),
        ];
        let c = CongruenceClass::new(d)?;
        if c.radicand() > 0.0 {
            return Ok(c);
        }
    }
}

pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `n` classes; sample `i` depends only on `(seed, i)`.
pub fn sample_classes(seed: u64, n: usize, d_max: f64, exec: Execution) -> Result<Vec<CongruenceClass>> {
    map_indexed(n, exec, |i| random_class(&mut sample_rng(seed, i), d_max))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrientationSummary {
    pub epsilon: Orientation,
    /// Smallest `|residual|` over non-equilateral samples.
    pub min_abs_residual: f64,
    /// Smallest `max |e_i - e_j|` over non-equilateral samples.
    pub min_e_gap: f64,
    pub max_r_i: f64,
    /// Largest `mu_e / mu_d`.
    pub max_mu_ratio: f64,
    /// Smallest `r_d`.
    pub min_r_d: f64,
    /// Largest `|e_{i+2}² - e_{i+1}² - r_d (d_{i+2} - d_{i+1})|`, relative to `max(1, e²)`.
    pub max_gap_recursion_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub samples: usize,
    pub d_max: f64,
    pub equilateral_samples: usize,
    pub orientations: Vec<OrientationSummary>,
}

impl SweepReport {
    /// Checks each summary against the bounds that hold for its orientation.
    pub fn passed(&self) -> bool {
        self.orientations.iter().all(|o| {
            let common = o.min_abs_residual > 1e-6
                && o.min_e_gap > 0.0
                && o.max_r_i <= RHO + 1e-9
                && o.max_gap_recursion_error <= 1e-9;
            match o.epsilon {
                Orientation::Plus => common && o.max_mu_ratio <= MU_FACTOR + 1e-9,
                Orientation::Minus => common && o.min_r_d > 0.0,
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct SampleStats {
    equilateral: bool,
    abs_residual: f64,
    e_gap: f64,
    r_i: f64,
    mu_ratio: f64,
    r_d: f64,
    recursion: f64,
}

fn sample_stats(c: &CongruenceClass, epsilon: Orientation) -> Result<SampleStats> {
    let c = c.canonical();
    let p = NapoleonParams::new(epsilon);
    let e = napoleonize_class(&c, &p)?;
    let r_d = r_d_of(&c, epsilon)?;
    let r_i = r_i_of(&c, epsilon)?;
    let (d, e2) = (c.d(), e.squares());
    let mut recursion: f64 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let err = (e2[k] - e2[j] - r_d * (d[k] - d[j])).abs() / e2[k].max(e2[j]).max(1.0);
        recursion = recursion.max(err);
    }
    let mu_d = c.mu();
    Ok(SampleStats {
        equilateral: c.is_equilateral(tol::CLASS),
        abs_residual: napoleonic_residual(&c, &p)?.abs(),
        e_gap: e.gap_max(),
        r_i: r_i[0].max(r_i[1]).max(r_i[2]),
        mu_ratio: if mu_d >= RATIO_FLOOR { e.mu() / mu_d } else { 0.0 },
        r_d,
        recursion,
    })
}

pub fn sweep(seed: u64, n: usize, d_max: f64, exec: Execution) -> Result<SweepReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let classes = sample_classes(seed, n, d_max, exec)?;
    let mut orientations = Vec::new();
    let mut equilateral_samples = 0;
    for epsilon in Orientation::BOTH {
        let stats: Vec<SampleStats> = map_indexed(n, exec, |i| sample_stats(&classes[i], epsilon))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut s = OrientationSummary {
            epsilon,
            min_abs_residual: f64::INFINITY,
            min_e_gap: f64::INFINITY,
            max_r_i: 0.0,
            max_mu_ratio: 0.0,
            min_r_d: f64::INFINITY,
            max_gap_recursion_error: 0.0,
        };
        equilateral_samples = 0;
        for st in &stats {
            if st.equilateral {
                equilateral_samples += 1;
            } else {
                s.min_abs_residual = s.min_abs_residual.min(st.abs_residual);
                s.min_e_gap = s.min_e_gap.min(st.e_gap);
            }
            s.max_r_i = s.max_r_i.max(st.r_i);
            s.max_mu_ratio = s.max_mu_ratio.max(st.mu_ratio);
            s.min_r_d = s.min_r_d.min(st.r_d);
            s.max_gap_recursion_error = s.max_gap_recursion_error.max(st.recursion);
        }
        orientations.push(s);
    }
    Ok(SweepReport {
        seed,
        samples: n,
        d_max,
        equilateral_samples,
        orientations,
    })
}
