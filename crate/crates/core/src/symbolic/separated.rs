use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::Holomorphic;
use crate::henon_like::{HenonMap, Point2};

/// A self-map of `C^2` whose orbits can be replayed.
pub trait PlaneMap: Sync {
    fn step(&self, p: Point2) -> Result<Point2>;
}

impl<F: Holomorphic> PlaneMap for HenonMap<F> {
    fn step(&self, p: Point2) -> Result<Point2> {
        self.apply(p)
    }
}

/// A one-variable map `z ↦ f(z)` embedded as `(z, w) ↦ (f(z), 0)`.
pub struct OneDimensional<F>(pub F);

impl<F: Holomorphic> PlaneMap for OneDimensional<F> {
    fn step(&self, p: Point2) -> Result<Point2> {
        Ok([self.0.eval(p[0])?, Complex64::new(0.0, 0.0)])
    }
}

/// `max(|z - z'|, |w - w'|)`.
pub fn max_distance(p: &Point2, q: &Point2) -> f64 {
    (p[0] - q[0]).norm().max((p[1] - q[1]).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSetEstimate {
    pub n_steps: usize,
    pub epsilon: f64,
    #[serde(rename = "K")]
    pub k: usize,
    /// `ln K / n_steps`.
    pub rate: f64,
    /// The selected seeds, in selection order.
    pub witnesses: Vec<Point2>,
}

/// `p, F(p), ..., F^{n-1}(p)`.
pub fn orbit_prefix<M: PlaneMap + ?Sized>(map: &M, p: Point2, n: usize) -> Result<Vec<Point2>> {
    let mut out = Vec::with_capacity(n);
    let mut q = p;
    for t in 0..n {
        if t > 0 {
            q = map.step(q)?;
        }
        out.push(q);
    }
    Ok(out)
}

/// The first step `t < n` at which the orbits of `p` and `q` are more than
/// `epsilon` apart, if any.
pub fn first_separation<M: PlaneMap + ?Sized>(
    map: &M,
    p: Point2,
    q: Point2,
    n: usize,
    epsilon: f64,
) -> Result<Option<usize>> {
    let a = orbit_prefix(map, p, n)?;
    let b = orbit_prefix(map, q, n)?;
    Ok(a.iter().zip(&b).position(|(x, y)| max_distance(x, y) > epsilon))
}

/// Greedy `(n, ε)`-separated subset of the seeds (taken in the given order):
/// a seed is kept when its orbit is more than `ε` away, at some step
/// `0 <= t < n`, from every seed kept before it.
pub fn separated_set_estimate<M: PlaneMap + ?Sized>(
    map: &M,
    seeds: &[Point2],
    n_steps: usize,
    epsilon: f64,
) -> Result<SeparatedSetEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let orbits: Vec<Vec<Point2>> = seeds.par_iter().map(|p| orbit_prefix(map, *p, n_steps)).collect::<Result<_>>()?;
    let mut kept: Vec<usize> = Vec::new();
    for (s, orb) in orbits.iter().enumerate() {
        let clash = kept.par_iter().any(|&q| orbits[q].iter().zip(orb).all(|(x, y)| max_distance(x, y) <= epsilon));
        if !clash {
            kept.push(s);
        }
    }
    let k = kept.len();
    Ok(SeparatedSetEstimate {
        n_steps,
        epsilon,
        k,
        rate: (k as f64).ln() / n_steps as f64,
        witnesses: kept.iter().map(|&s| seeds[s]).collect(),
    })
}
