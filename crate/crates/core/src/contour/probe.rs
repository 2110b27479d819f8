use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{rescale, EntireFunction, Holomorphic, LogValue};

/// Axis-aligned rectangle sampled with a square lattice of spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
}

impl ProbeGrid {
    pub fn square(half_width: f64, step: f64) -> Self {
        ProbeGrid { re_min: -half_width, re_max: half_width, im_min: -half_width, im_max: half_width, step }
    }

    fn dims(&self) -> (usize, usize) {
        let nx = ((self.re_max - self.re_min) / self.step + 1e-9).floor() as usize + 1;
        let ny = ((self.im_max - self.im_min) / self.step + 1e-9).floor() as usize + 1;
        (nx, ny)
    }

    fn point(&self, a: usize, b: usize) -> Complex64 {
        Complex64::new(self.re_min + a as f64 * self.step, self.im_min + b as f64 * self.step)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.step > 0.0
            && self.step.is_finite()
            && self.re_max >= self.re_min
            && self.im_max >= self.im_min
            && [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::invalid("probe grid needs finite bounds and a positive step"));
        }
        Ok(())
    }
}

/// Evidence that the family is not equicontinuous at `point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Complex64,
    pub neighbor: Complex64,
    pub n: u32,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub flagged_points: Vec<Complex64>,
    /// One witness per flagged point, in the same order.
    pub witnesses: Vec<Witness>,
    pub epsilon: f64,
    pub proximity: f64,
    pub n_values: Vec<u32>,
    pub grid: ProbeGrid,
}

fn sphere_point(v: LogValue) -> [f64; 3] {
    if v.is_zero() {
        return [0.0, 0.0, -1.0];
    }
    if v.ln_mag == f64::INFINITY {
        return [0.0, 0.0, 1.0];
    }
    let sech = 1.0 / v.ln_mag.cosh();
    [v.phase.cos() * sech, v.phase.sin() * sech, v.ln_mag.tanh()]
}

fn sphere_distance(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// Chordal distance between two points of the Riemann sphere, seen as the
/// unit sphere in `R^3` (so the distance lies in `[0, 2]`).
pub fn chordal_distance(a: LogValue, b: LogValue) -> f64 {
    sphere_distance(&sphere_point(a), &sphere_point(b))
}

/// Flags grid points `x` for which some `f_n` (n in `n_values`) separates `x`
/// from a grid neighbor within `proximity` by chordal distance at least
/// `epsilon`.
pub fn quasinormality_probe(
    f: &EntireFunction,
    n_values: &[u32],
    grid: ProbeGrid,
    epsilon: f64,
    proximity: f64,
) -> Result<ProbeReport> {
    grid.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("probe epsilon must be positive"));
    }
    if !(grid.step < proximity) {
        return Err(Error::invalid("probe grid step must be smaller than the proximity bound"));
    }
    let (nx, ny) = grid.dims();
    let reach = (proximity / grid.step + 1e-9).floor() as i64;
    let mut offsets = Vec::new();
    for da in -reach..=reach {
        for db in -reach..=reach {
            let d = grid.step * ((da * da + db * db) as f64).sqrt();
            if (da, db) != (0, 0) && d <= proximity * (1.0 + 1e-12) {
                offsets.push((da, db));
            }
        }
    }

    let mut images = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let fnn = rescale(f, n)?;
        let pts: Vec<[f64; 3]> = (0..nx * ny)
            .into_par_iter()
            .map(|idx| fnn.eval_log(grid.point(idx % nx, idx / nx)).map(sphere_point))
            .collect::<Result<_>>()?;
        images.push(pts);
    }

    let witnesses: Vec<Witness> = (0..nx * ny)
        .into_par_iter()
        .filter_map(|idx| {
            let (a, b) = (idx % nx, idx / nx);
            for (k, &n) in n_values.iter().enumerate() {
                let here = &images[k][idx];
                for &(da, db) in &offsets {
                    let (a2, b2) = (a as i64 + da, b as i64 + db);
                    if a2 < 0 || b2 < 0 || a2 >= nx as i64 || b2 >= ny as i64 {
                        continue;
                    }
                    let j = b2 as usize * nx + a2 as usize;
                    let d = sphere_distance(here, &images[k][j]);
                    if d >= epsilon {
                        return Some(Witness {
                            point: grid.point(a, b),
                            neighbor: grid.point(a2 as usize, b2 as usize),
                            n,
                            distance: d,
                        });
                    }
                }
            }
            None
        })
        .collect();

    Ok(ProbeReport {
        flagged_points: witnesses.iter().map(|w| w.point).collect(),
        witnesses,
        epsilon,
        proximity,
        n_values: n_values.to_vec(),
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_distance_landmarks() {
        let zero = LogValue::from_complex(Complex64::new(0.0, 0.0));
        let one = LogValue::from_complex(Complex64::new(1.0, 0.0));
        let inf = LogValue::new(f64::INFINITY, 0.0);
        assert!((chordal_distance(zero, inf) - 2.0).abs() < 1e-15);
        assert!((chordal_distance(zero, one) - 2f64.sqrt()).abs() < 1e-15);
        let a = Complex64::new(0.3, -1.2);
        let b = Complex64::new(-2.0, 0.7);
        let formula = 2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt();
        let got = chordal_distance(LogValue::from_complex(a), LogValue::from_complex(b));
        assert!((got - formula).abs() < 1e-14);
    }

    #[test]
    fn identity_is_never_flagged() {
        let r = quasinormality_probe(&EntireFunction::monomial(1), &[5, 10], ProbeGrid::square(2.0, 0.1), 0.5, 0.15)
            .unwrap();
        assert!(r.flagged_points.is_empty());
    }

    #[test]
    fn square_flags_concentrate_at_origin() {
        let r = quasinormality_probe(
            &EntireFunction::monomial(2),
            &[5, 10, 20, 40],
            ProbeGrid::square(2.0, 0.05),
            0.5,
            0.1,
        )
        .unwrap();
        assert!(r.flagged_points.iter().any(|p| p.norm() < 1e-12));
        for p in &r.flagged_points {
            assert!(p.norm() < 0.5, "{p}");
        }
        for w in &r.witnesses {
            assert!((w.neighbor - w.point).norm() <= 0.1 + 1e-12);
            assert!(w.distance >= 0.5);
        }
    }

    #[test]
    fn step_must_be_below_proximity() {
        let r = quasinormality_probe(&EntireFunction::exp(), &[5], ProbeGrid::square(1.0, 0.2), 0.5, 0.1);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
