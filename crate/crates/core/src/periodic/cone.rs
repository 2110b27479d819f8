use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::function::Holomorphic;
use crate::henon_like::{HenonMap, Point2};

/// Aperture of the horizontal cone `{|v2| <= APERTURE |v1|}`.
pub const APERTURE: f64 = 2.0;
const FAN_ANGLES: usize = 64;
const FAN_RADII: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSample {
    pub point: Point2,
    /// Smallest `|v1'| / |v1|` over the fan.
    pub expansion: f64,
    /// Largest `|v2'| / |v1'|` over the fan; the image is strictly inside
    /// the cone when this is below the aperture.
    pub image_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCertificate {
    pub samples: Vec<ConeSample>,
    pub mu: f64,
    pub pass: bool,
}

/// Samples `DF` at each point on the fan `v = (1, t)`, `t = 2 s e^{iφ}`.
/// With `a = f'(z)` the image is `(a - δ t, 1)`, so the expansion of `v1` is
/// `|a - δ t|` and the image slope is its reciprocal.
pub fn cone_certificate<F: Holomorphic>(map: &HenonMap<F>, points: &[Point2]) -> ConeCertificate {
    let samples: Vec<ConeSample> = points
        .iter()
        .map(|p| {
            let a = map.f.deriv(p[0]).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let mut expansion = f64::INFINITY;
            for s in FAN_RADII {
                for q in 0..FAN_ANGLES {
                    let t = Complex64::from_polar(APERTURE * s, TAU * q as f64 / FAN_ANGLES as f64);
                    expansion = expansion.min((a - map.delta * t).norm());
                }
            }
            if expansion.is_nan() {
                expansion = 0.0;
            }
            ConeSample { point: *p, expansion, image_slope: 1.0 / expansion }
        })
        .collect();
    let mu = samples.iter().map(|s| s.expansion).fold(f64::INFINITY, f64::min);
    let pass = !samples.is_empty() && samples.iter().all(|s| s.expansion > 1.0 && s.image_slope < APERTURE);
    ConeCertificate { samples, mu, pass }
}
