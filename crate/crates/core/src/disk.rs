//! Poincaré disk coordinates, for plotting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::{HPoint, MVec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskPoint {
    pub u: f64,
    pub v: f64,
}

impl DiskPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::NonFinite("disk point"));
        }
        if u * u + v * v >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "({u}, {v}) is not inside the unit disk"
            )));
        }
        Ok(Self { u, v })
    }

    pub fn norm_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }
}

/// `(x0, x1, x2) -> (x1 / (1 + x0), x2 / (1 + x0))`
pub fn to_disk(p: HPoint) -> DiskPoint {
    let v = p.vec();
    let s = 1.0 + v.x0;
    DiskPoint {
        u: v.x1 / s,
        v: v.x2 / s,
    }
}

pub fn from_disk(q: DiskPoint) -> Result<HPoint> {
    let r = q.norm_sq();
    let den = 1.0 - r;
    HPoint::new(MVec::new((1.0 + r) / den, 2.0 * q.u / den, 2.0 * q.v / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn origin_goes_to_center() {
        assert_eq!(to_disk(HPoint::ORIGIN), DiskPoint { u: 0.0, v: 0.0 });
    }

    #[test]
    fn boost_axis() {
        for t in [0.1, 1.0, 3.0] {
            let q = to_disk(HPoint::polar(t, 0.0));
            assert!((q.u - (t / 2.0).tanh()).abs() < 1e-15);
            assert_eq!(q.v, 0.0);
        }
    }

    #[test]
    fn round_trip_and_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = random_point(&mut rng, 5.0).unwrap();
            let q = to_disk(p);
            assert!(q.norm_sq() < 1.0);
            let back = from_disk(DiskPoint::new(q.u, q.v).unwrap()).unwrap();
            assert!(back.vec().max_abs_diff(p.vec()) <= 1e-10 * p.vec().x0);
        }
    }
}
