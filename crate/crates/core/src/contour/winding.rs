use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{wrap_phase, Disk, Holomorphic, LogValue};

/// A closed, positively oriented curve parametrized over `t ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    Circle(Disk),
    /// Closed polyline through the vertices (the last edge returns to the first vertex).
    Polygon(Vec<Complex64>),
}

impl Contour {
    pub fn point(&self, t: f64) -> Complex64 {
        match self {
            Contour::Circle(d) => d.boundary_point(TAU * t),
            Contour::Polygon(v) => {
                let (e, s) = self.edge_of(t);
                let a = v[e];
                let b = v[(e + 1) % v.len()];
                a + (b - a) * s
            }
        }
    }

    /// `dz/dt` at parameter `t`.
    pub fn tangent(&self, t: f64) -> Complex64 {
        match self {
            Contour::Circle(d) => Complex64::i() * Complex64::from_polar(d.radius * TAU, TAU * t),
            Contour::Polygon(v) => {
                let (e, _) = self.edge_of(t);
                (v[(e + 1) % v.len()] - v[e]) * v.len() as f64
            }
        }
    }

    fn edge_of(&self, t: f64) -> (usize, f64) {
        let Contour::Polygon(v) = self else { unreachable!() };
        let m = v.len();
        let x = t.rem_euclid(1.0) * m as f64;
        let e = (x.floor() as usize).min(m - 1);
        (e, x - e as f64)
    }

    /// Characteristic length used to judge how close the curve passes to a zero.
    pub fn scale(&self) -> f64 {
        match self {
            Contour::Circle(d) => d.radius,
            Contour::Polygon(v) => {
                let per: f64 = (0..v.len()).map(|k| (v[(k + 1) % v.len()] - v[k]).norm()).sum();
                per / TAU
            }
        }
    }

    /// Initial parameter samples; for polygons every vertex is included.
    fn initial_params(&self, samples: usize) -> Vec<f64> {
        match self {
            Contour::Circle(_) => (0..samples).map(|k| k as f64 / samples as f64).collect(),
            Contour::Polygon(v) => {
                let m = v.len();
                let per_edge = samples.div_ceil(m).max(1);
                let total = m * per_edge;
                (0..total).map(|k| k as f64 / total as f64).collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Contour::Circle(_) => Ok(()),
            Contour::Polygon(v) if v.len() >= 3 => Ok(()),
            Contour::Polygon(_) => Err(Error::invalid("polygon contour needs at least 3 vertices")),
        }
    }
}

/// Winding number of an image curve around a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub index: i64,
    /// Minimum distance of the sampled image curve from the base point.
    pub confidence: f64,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    pub initial_samples: usize,
    pub max_samples: usize,
    /// Largest accepted argument increment between consecutive samples (radians).
    pub max_step: f64,
    /// A sample whose Newton distance `|g|/|g'|` to the nearest zero falls below
    /// `min_confidence * contour scale` makes the result inconclusive.
    pub min_confidence: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions { initial_samples: 256, max_samples: 1 << 20, max_step: 0.5, min_confidence: 1e-10 }
    }
}

/// `f(z) - base` and `f'(z)`, both in the log domain. When `|f|` dwarfs
/// `|base|` the subtraction is skipped (it cannot change the value in `f64`).
pub(crate) fn shifted_log<F: Holomorphic + ?Sized>(
    f: &F,
    z: Complex64,
    base: Complex64,
) -> Result<(LogValue, LogValue)> {
    let v = f.eval_log(z)?;
    let d = f.deriv_log(z)?;
    if v.ln_mag.is_nan() || d.ln_mag.is_nan() {
        return Err(Error::Overflow { at: z });
    }
    let b = base.norm();
    if b == 0.0 || v.ln_mag > b.ln() + 40.0 {
        return Ok((v, d));
    }
    let plain = v.to_complex().ok_or(Error::Overflow { at: z })?;
    Ok((LogValue::from_complex(plain - base), d))
}

#[derive(Clone, Copy)]
struct Sample {
    t: f64,
    g: LogValue,
    dg: LogValue,
}

/// Winding number of `g` (given as value/derivative in log domain) along a
/// closed contour, by accumulating argument increments over an adaptively
/// refined sample.
pub fn winding_along<G>(contour: &Contour, g: G, opts: &WindingOptions) -> Result<WindingResult>
where
    G: Fn(Complex64) -> Result<(LogValue, LogValue)>,
{
    contour.validate()?;
    let mut initial = opts.initial_samples.max(8);
    loop {
        if let Some(res) = winding_attempt(contour, &g, initial, opts)? {
            return Ok(res);
        }
        initial *= 2;
        if initial > opts.max_samples {
            return Err(Error::inconclusive("accumulated phase does not settle on an integer within the sample cap"));
        }
    }
}

fn winding_attempt<G>(contour: &Contour, g: &G, initial: usize, opts: &WindingOptions) -> Result<Option<WindingResult>>
where
    G: Fn(Complex64) -> Result<(LogValue, LogValue)>,
{
    let scale = contour.scale();
    let mut used = 0usize;
    let mut min_mod = f64::INFINITY;

    let eval = |t: f64, used: &mut usize, min_mod: &mut f64| -> Result<Sample> {
        let z = contour.point(t);
        let (gv, dg) = g(z)?;
        *used += 1;
        if gv.is_zero() {
            return Err(Error::inconclusive(format!("image curve passes through the base point at z = {z}")));
        }
        let newton_dist = (gv.ln_mag - dg.ln_mag).exp();
        if newton_dist < opts.min_confidence * scale {
            return Err(Error::inconclusive(format!(
                "image curve passes within {newton_dist:e} of a zero near z = {z}"
            )));
        }
        *min_mod = min_mod.min(gv.modulus());
        Ok(Sample { t, g: gv, dg })
    };

    let params = contour.initial_params(initial);
    let mut samples = Vec::with_capacity(params.len() + 1);
    for &t in &params {
        samples.push(eval(t, &mut used, &mut min_mod)?);
    }
    let first = samples[0];
    samples.push(Sample { t: 1.0, ..first });

    let mut total = 0.0;
    for w in samples.windows(2) {
        let mut stack = vec![(w[0], w[1])];
        while let Some((a, b)) = stack.pop() {
            let dt = b.t - a.t;
            let dphi = wrap_phase(b.g.phase - a.g.phase);
            let speed = |s: &Sample| {
                let tan = contour.tangent(s.t).norm().ln();
                (s.dg.ln_mag + tan + dt.ln() - s.g.ln_mag).exp()
            };
            if dphi.abs() <= opts.max_step && speed(&a) <= opts.max_step && speed(&b) <= opts.max_step {
                total += dphi;
                continue;
            }
            if dt < 1e-15 || used >= opts.max_samples {
                return Err(Error::inconclusive("winding refinement exhausted its sample budget"));
            }
            let mid = eval(a.t + 0.5 * dt, &mut used, &mut min_mod)?;
            stack.push((mid, b));
            stack.push((a, mid));
        }
    }

    let turns = total / TAU;
    let index = turns.round();
    if (turns - index).abs() > 0.01 {
        return Ok(None);
    }
    Ok(Some(WindingResult { index: index as i64, confidence: min_mod, samples_used: used }))
}

/// Winding number of `f(∂circle)` around `base`; for `f` holomorphic on the
/// closed disk this is the number of solutions of `f = base` inside.
pub fn winding_number<F: Holomorphic + ?Sized>(f: &F, circle: &Disk, base: Complex64) -> Result<WindingResult> {
    winding_number_with(f, circle, base, &WindingOptions::default())
}

pub fn winding_number_with<F: Holomorphic + ?Sized>(
    f: &F,
    circle: &Disk,
    base: Complex64,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    winding_along(&Contour::Circle(*circle), |z| shifted_log(f, z, base), opts)
}

/// Winding number along an arbitrary closed contour.
pub fn winding_on_contour<F: Holomorphic + ?Sized>(
    f: &F,
    contour: &Contour,
    base: Complex64,
    opts: &WindingOptions,
) -> Result<WindingResult> {
    winding_along(contour, |z| shifted_log(f, z, base), opts)
}

/// Number of solutions of `f(z) = target` in `region`, with multiplicity.
pub fn count_preimages<F: Holomorphic + ?Sized>(f: &F, target: Complex64, region: &Disk) -> Result<i64> {
    Ok(winding_number(f, region, target)?.index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::EntireFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_winding() {
        let f = EntireFunction::monomial(3);
        let w = winding_number(&f, &Disk::centered(1.0).unwrap(), c(0.0, 0.0)).unwrap();
        assert_eq!(w.index, 3);
        assert!((w.confidence - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_never_winds() {
        let f = EntireFunction::exp();
        for r in [0.5, 3.0, 20.0] {
            let d = Disk::new(c(1.0, -2.0), r).unwrap();
            assert_eq!(winding_number(&f, &d, c(0.0, 0.0)).unwrap().index, 0);
        }
    }

    #[test]
    fn shifted_quadratic_has_no_roots_in_unit_disk() {
        let f = EntireFunction::real_poly(&[-5.0, 0.0, 1.0]);
        assert_eq!(winding_number(&f, &Disk::centered(1.0).unwrap(), c(0.0, 0.0)).unwrap().index, 0);
    }

    #[test]
    fn count_preimage_examples() {
        let quartic = EntireFunction::monomial(4);
        assert_eq!(count_preimages(&quartic, c(1.0, 0.0), &Disk::centered(2.0).unwrap()).unwrap(), 4);
        let sq = EntireFunction::monomial(2);
        assert_eq!(count_preimages(&sq, c(1.0, 0.0), &Disk::new(c(5.0, 0.0), 0.5).unwrap()).unwrap(), 0);
        let e = EntireFunction::exp();
        assert_eq!(count_preimages(&e, c(1.0, 0.0), &Disk::centered(7.0).unwrap()).unwrap(), 3);
    }

    #[test]
    fn curve_through_base_is_inconclusive() {
        let f = EntireFunction::monomial(1);
        let r = winding_number(&f, &Disk::centered(1.0).unwrap(), c(1.0, 0.0));
        assert!(matches!(r, Err(Error::Inconclusive(_))));
    }

    #[test]
    fn polygon_contour_counts_roots() {
        let f = EntireFunction::real_poly(&[-1.0, 0.0, 1.0]);
        let square = Contour::Polygon(vec![c(0.5, -0.5), c(1.5, -0.5), c(1.5, 0.5), c(0.5, 0.5)]);
        let w = winding_on_contour(&f, &square, c(0.0, 0.0), &WindingOptions::default()).unwrap();
        assert_eq!(w.index, 1);
        let cw = Contour::Polygon(vec![c(0.5, 0.5), c(1.5, 0.5), c(1.5, -0.5), c(0.5, -0.5)]);
        assert_eq!(winding_on_contour(&f, &cw, c(0.0, 0.0), &WindingOptions::default()).unwrap().index, -1);
    }

    #[test]
    fn high_degree_lacunary_winds_exactly() {
        let f = EntireFunction::lacunary(vec![
            crate::function::LacunaryTerm { log2_magnitude: -1.0, phase: 0.0, exponent: 4 },
            crate::function::LacunaryTerm { log2_magnitude: -30.0, phase: 0.0, exponent: 300 },
        ])
        .unwrap();
        // on |z| = 3 the degree-300 term dominates (2^-30 3^300 is astronomically large)
        let w = winding_number(&f, &Disk::centered(3.0).unwrap(), c(0.0, 0.0)).unwrap();
        assert_eq!(w.index, 300);
    }
}
