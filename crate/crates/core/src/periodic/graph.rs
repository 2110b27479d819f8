use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::Holomorphic;
use crate::symbolic::TransitionStructure;

pub const DEFAULT_NODES: usize = 32;

/// A holomorphic graph `{(z, w(z)) : z ∈ D_r(x_i)}` with `w` valued near
/// `x_l`, stored by its values at `K` equispaced nodes on `|z - x_i| = r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDisk {
    pub i: usize,
    pub l: usize,
    pub center: Complex64,
    pub node_radius: f64,
    pub values: Vec<Complex64>,
    /// `max |w - x_l|` over the nodes.
    pub range: f64,
    /// Taylor coefficients of `w` around `center`, from the node values.
    #[serde(skip)]
    coefficients: Vec<Complex64>,
}

fn node(center: Complex64, radius: f64, k: usize, count: usize) -> Complex64 {
    center + Complex64::from_polar(radius, TAU * k as f64 / count as f64)
}

impl GraphDisk {
    pub fn from_values(
        i: usize,
        l: usize,
        center: Complex64,
        node_radius: f64,
        values: Vec<Complex64>,
        level_center: Complex64,
    ) -> Result<Self> {
        let k = values.len();
        if k < 4 {
            return Err(Error::invalid("a graph disk needs at least 4 nodes"));
        }
        let range = values.iter().map(|v| (v - level_center).norm()).fold(0.0, f64::max);
        // c_m = r^{-m} (1/K) Σ_k w(u_k) e^{-2πikm/K}
        let coefficients = (0..k)
            .map(|m| {
                let s: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(q, v)| v * Complex64::from_polar(1.0, -TAU * (q * m % k) as f64 / k as f64))
                    .sum();
                s / (k as f64 * node_radius.powi(m as i32))
            })
            .collect();
        Ok(GraphDisk { i, l, center, node_radius, values, range, coefficients })
    }

    /// The flat graph `w ≡ x_l` over `D_r(x_i)`.
    pub fn flat(structure: &TransitionStructure, i: usize, l: usize, nodes: usize) -> Result<Self> {
        let lay = &structure.layout;
        GraphDisk::from_values(i, l, lay.centers[i], lay.r, vec![lay.centers[l]; nodes], lay.centers[l])
    }

    pub fn node(&self, k: usize) -> Complex64 {
        node(self.center, self.node_radius, k, self.values.len())
    }

    fn coeffs(&self) -> std::borrow::Cow<'_, [Complex64]> {
        if self.coefficients.len() == self.values.len() {
            std::borrow::Cow::Borrowed(&self.coefficients)
        } else {
            let g =
                GraphDisk::from_values(self.i, self.l, self.center, self.node_radius, self.values.clone(), self.center)
                    .expect("values already validated");
            std::borrow::Cow::Owned(g.coefficients)
        }
    }

    /// `w(z)` by the interpolating polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let t = z - self.center;
        self.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let t = z - self.center;
        self.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (m, c)| acc * t + c * m as f64)
    }

    /// Sup distance between node values of two graphs over the same disk.
    pub fn distance(&self, other: &GraphDisk) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn solve_node<F: Holomorphic + ?Sized>(
    f_n: &F,
    delta: Complex64,
    d: &GraphDisk,
    u: Complex64,
    seed: Complex64,
) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..60 {
        let h = f_n.eval(z).ok()? - delta * d.eval(z) - u;
        let dh = f_n.deriv(z).ok()? - delta * d.deriv(z);
        if dh.norm() == 0.0 {
            return None;
        }
        let step = h / dh;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let h = f_n.eval(z).ok()? - delta * d.eval(z) - u;
    let dh = f_n.deriv(z).ok()? - delta * d.deriv(z);
    ((h / dh).norm() <= 1e-13 * (1.0 + z.norm())).then_some(z)
}

/// Pushes the `(i, l)`-graph `d` forward through `F` onto symbol `j`: for each
/// node `u` of `D_r(x_j)` solves `f_n(z) - δ w_d(z) = u` for `z` in the island
/// of `D_R(x_j + δ x_l)` inside `D_r(x_i)`, giving the `(j, i)`-graph `u ↦ z`.
pub fn graph_transform_step<F: Holomorphic + ?Sized>(
    f_n: &F,
    structure: &TransitionStructure,
    d: &GraphDisk,
    j: usize,
) -> Result<GraphDisk> {
    let (i, l) = (d.i, d.l);
    let k = structure.k();
    if i >= k || l >= k || j >= k {
        return Err(Error::invalid("graph-disk symbol out of range"));
    }
    if !structure.table.allows(i, l, j) {
        return Err(Error::invalid(format!("symbol {j} is not in J({i}, {l})")));
    }
    let island =
        structure.island(i, l, j).ok_or_else(|| Error::invalid(format!("no island stored for ({i}, {l}) -> {j}")))?;
    let lay = &structure.layout;
    let delta = structure.delta;
    let nodes = d.values.len();
    let values = (0..nodes)
        .into_par_iter()
        .map(|q| {
            let u = node(lay.centers[j], lay.r, q, nodes);
            let seed = island.invert(f_n, u + delta * lay.centers[l])?;
            let z = solve_node(f_n, delta, d, u, seed).ok_or_else(|| {
                Error::NoConvergence(format!("graph transform did not converge at node {q} (u = {u})"))
            })?;
            if !island.contains(z) {
                return Err(Error::NoConvergence(format!(
                    "graph transform solution at node {q} (u = {u}) left the island"
                )));
            }
            Ok(z)
        })
        .collect::<Result<Vec<_>>>()?;
    GraphDisk::from_values(j, i, lay.centers[j], lay.r, values, lay.centers[i])
}
