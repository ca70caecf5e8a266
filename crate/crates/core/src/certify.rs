//! Grid certification of the factorization behind non-existence of
//! non-equilateral Napoleonic triangles.
//!
//! The certificate is symmetric in `(d0, d1, d2)`, so only the wedge
//! `d0 >= d1 >= d2` is visited. The wedge is split into row blocks (one per
//! `d0` value) which are evaluated independently and merged by block index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::napoleon::nonexistence_certificate;
use crate::par::{map_indexed, Execution};
use crate::triangle::{CongruenceClass, SQRT_3};

/// Cells with `gap_max` at least this get the explicit positivity bound.
pub const SEPARATED_GAP: f64 = 0.01;
const IDENTITY_TOL: f64 = 1e-9;
const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            min: SQRT_3 + 0.01,
            max: 6.0,
            step: 0.05,
        }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::NonFinite("grid bounds"));
        }
        if self.min < SQRT_3 - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "grid min {} is below sqrt(3)",
                self.min
            )));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if self.max < self.min {
            return Err(Error::InvalidParameter(format!(
                "grid max {} is below grid min {}",
                self.max, self.min
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub d: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub grid: Grid,
    /// Realizable wedge cells that were evaluated.
    pub cells: usize,
    pub skipped_unrealizable: usize,
    pub equilateral_cells: usize,
    /// Largest `|lhs - rhs| / max(1, |rhs|)`.
    pub max_relative_error: f64,
    pub max_relative_error_cell: Option<[f64; 3]>,
    /// Smallest `rhs` over cells off the equilateral diagonal.
    pub min_rhs_non_equilateral: Option<f64>,
    pub min_rhs_cell: Option<[f64; 3]>,
    /// Smallest `rhs / (192 gap_max²)` over cells with `gap_max >= 0.01`;
    /// the factorization gives `rhs >= 192 gap_max²` on the whole domain.
    pub min_separated_bound_ratio: Option<f64>,
    pub separated_cells: usize,
    pub violations: Vec<Violation>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
struct Block {
    cells: usize,
    skipped: usize,
    equilateral: usize,
    max_err: f64,
    max_err_cell: Option<[f64; 3]>,
    min_rhs: Option<(f64, [f64; 3])>,
    min_ratio: Option<f64>,
    separated: usize,
    violations: Vec<Violation>,
}

fn keep_min(slot: &mut Option<(f64, [f64; 3])>, v: f64, d: [f64; 3]) {
    if slot.is_none_or(|(m, _)| v < m) {
        *slot = Some((v, d));
    }
}

fn certify_row(grid: &Grid, i: usize) -> Block {
    let mut b = Block::default();
    let d0 = grid.value(i);
    for j in 0..=i {
        for k in 0..=j {
            let d = [d0, grid.value(j), grid.value(k)];
            let c = match CongruenceClass::new(d) {
                Ok(c) if c.is_realizable() => c,
                _ => {
                    b.skipped += 1;
                    continue;
                }
            };
            let cert = match nonexistence_certificate(&c) {
                Ok(cert) => cert,
                Err(_) => {
                    b.skipped += 1;
                    continue;
                }
            };
            b.cells += 1;
            let err = cert.relative_error();
            if b.max_err_cell.is_none() || err > b.max_err {
                b.max_err = err;
                b.max_err_cell = Some(d);
            }
            if err > IDENTITY_TOL {
                b.violations.push(Violation {
                    d,
                    lhs: cert.lhs,
                    rhs: cert.rhs,
                    reason: "identity",
                });
            }
            let gap = c.gap_max();
            if gap <= DIAGONAL_TOL {
                b.equilateral += 1;
                continue;
            }
            keep_min(&mut b.min_rhs, cert.rhs, d);
            if cert.rhs <= 0.0 {
                b.violations.push(Violation {
                    d,
                    lhs: cert.lhs,
                    rhs: cert.rhs,
                    reason: "non_positive_rhs",
                });
            }
            if gap >= SEPARATED_GAP {
                b.separated += 1;
                let ratio = cert.rhs / (192.0 * gap * gap);
                b.min_ratio = Some(b.min_ratio.map_or(ratio, |m: f64| m.min(ratio)));
                if ratio < 1.0 - IDENTITY_TOL {
                    b.violations.push(Violation {
                        d,
                        lhs: cert.lhs,
                        rhs: cert.rhs,
                        reason: "below_separated_bound",
                    });
                }
            }
        }
    }
    b
}

pub fn certify(grid: &Grid, exec: Execution) -> Result<CertifyReport> {
    grid.validate()?;
    let blocks = map_indexed(grid.len(), exec, |i| certify_row(grid, i));
    let mut report = CertifyReport {
        grid: *grid,
        cells: 0,
        skipped_unrealizable: 0,
        equilateral_cells: 0,
        max_relative_error: 0.0,
        max_relative_error_cell: None,
        min_rhs_non_equilateral: None,
        min_rhs_cell: None,
        min_separated_bound_ratio: None,
        separated_cells: 0,
        violations: Vec::new(),
    };
    let mut min_rhs: Option<(f64, [f64; 3])> = None;
    for b in blocks {
        report.cells += b.cells;
        report.skipped_unrealizable += b.skipped;
        report.equilateral_cells += b.equilateral;
        report.separated_cells += b.separated;
        if b.max_err_cell.is_some()
            && (report.max_relative_error_cell.is_none() || b.max_err > report.max_relative_error)
        {
            report.max_relative_error = b.max_err;
            report.max_relative_error_cell = b.max_err_cell;
        }
        if let Some((v, d)) = b.min_rhs {
            keep_min(&mut min_rhs, v, d);
        }
        if let Some(r) = b.min_ratio {
            report.min_separated_bound_ratio = Some(report.min_separated_bound_ratio.map_or(r, |m| m.min(r)));
        }
        report.violations.extend(b.violations);
    }
    report.min_rhs_non_equilateral = min_rhs.map(|(v, _)| v);
    report.min_rhs_cell = min_rhs.map(|(_, d)| d);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_size() {
        let g = Grid::default();
        assert_eq!(g.len(), 86);
        assert!((g.value(85) - 5.992_050_807_568_877).abs() < 1e-12);
    }

    #[test]
    fn single_cell_on_diagonal() {
        let g = Grid {
            min: 2.0,
            max: 2.0,
            step: 0.05,
        };
        let r = certify(&g, Execution::Sequential).unwrap();
        assert_eq!(r.cells, 1);
        assert_eq!(r.equilateral_cells, 1);
        assert!(r.passed());
        assert_eq!(r.max_relative_error, 0.0);
        assert_eq!(r.min_rhs_non_equilateral, None);
    }

    #[test]
    fn small_grid_passes_and_is_schedule_independent() {
        let g = Grid {
            min: SQRT_3 + 0.01,
            max: 4.0,
            step: 0.1,
        };
        let a = certify(&g, Execution::Sequential).unwrap();
        let b = certify(&g, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{:?}", a.violations);
        assert!(a.min_rhs_non_equilateral.unwrap() > 0.0);
        assert!(a.min_separated_bound_ratio.unwrap() >= 1.0);
        assert!(a.skipped_unrealizable > 0);
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = [
            Grid {
                min: 1.5,
                max: 3.0,
                step: 0.1,
            },
            Grid {
                min: 2.0,
                max: 3.0,
                step: 0.0,
            },
            Grid {
                min: 3.0,
                max: 2.0,
                step: 0.1,
            },
        ];
        for g in bad {
            assert!(certify(&g, Execution::Sequential).is_err());
        }
    }
}
