use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::function::Holomorphic;

/// Piecewise-affine model `f(z) = M (z - x_i)` on the cell of the nearest
/// center `x_i`. On each disk around a center it is exactly linear, so the
/// horseshoe it generates has closed-form islands and periodic points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalAffine {
    pub centers: Vec<Complex64>,
    pub slope: Complex64,
}

impl LocalAffine {
    pub fn new(centers: Vec<Complex64>, slope: Complex64) -> Self {
        LocalAffine { centers, slope }
    }

    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = (z - c).norm();
            if d < dist {
                best = i;
                dist = d;
            }
        }
        best
    }
}

impl Holomorphic for LocalAffine {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.slope * (z - self.centers[self.nearest(z)]))
    }

    fn deriv(&self, _z: Complex64) -> Result<Complex64> {
        Ok(self.slope)
    }
}
