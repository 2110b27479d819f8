use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cone::{cone_certificate, ConeCertificate};
use super::graph::{graph_transform_step, GraphDisk, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::function::Holomorphic;
use crate::henon_like::{HenonMap, Point2};
use crate::symbolic::TransitionStructure;

type Mat2 = [[Complex64; 2]; 2];

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const MINIMALITY_GAP: f64 = 1e-3;
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub unstable: Complex64,
    pub stable: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<Point2>,
    /// `max |F^N(P) - P|` over the cycle points.
    pub residual: f64,
    pub multipliers: Multipliers,
    /// `|λ_u λ_s / δ^N - 1|`.
    pub determinant_error: f64,
    pub saddle: bool,
    /// False when some proper divisor `d` of `N` has `|F^d(P) - P| <= 1e-3`.
    pub minimal: bool,
    pub itinerary: Option<Vec<usize>>,
    pub cone: Option<ConeCertificate>,
    pub newton_iterations: usize,
    /// Sup-norm change of the graph after each full sweep (itinerary runs).
    pub sweep_distances: Vec<f64>,
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn identity() -> Mat2 {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[o, z], [z, o]]
}

/// The eigenvalue of larger modulus, with the root pairing chosen to avoid
/// cancellation.
fn dominant_eigenvalue(m: &Mat2) -> Complex64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let s = (tr * tr - det * 4.0).sqrt();
    let (a, b) = (tr + s, tr - s);
    if a.norm() >= b.norm() {
        a / 2.0
    } else {
        b / 2.0
    }
}

fn point_dist(p: &Point2, q: &Point2) -> f64 {
    (p[0] - q[0]).norm().max((p[1] - q[1]).norm())
}

fn iterate<F: Holomorphic>(map: &HenonMap<F>, p: Point2, steps: usize) -> Result<Point2> {
    let mut q = p;
    for _ in 0..steps {
        q = map.apply(q)?;
        if !(q[0].is_finite() && q[1].is_finite()) {
            return Err(Error::Overflow { at: q[0] });
        }
    }
    Ok(q)
}

/// `F^N(p)` together with `DF^N(p)`.
fn flow_with_jacobian<F: Holomorphic>(map: &HenonMap<F>, p: Point2, n: usize) -> Result<(Point2, Mat2)> {
    let mut q = p;
    let mut m = identity();
    for _ in 0..n {
        m = mul(&map.jacobian(q)?, &m);
        q = map.apply(q)?;
        if !(q[0].is_finite() && q[1].is_finite()) {
            return Err(Error::Overflow { at: q[0] });
        }
    }
    Ok((q, m))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Longest Newton step, in the max norm.
    pub max_step: f64,
    pub residual_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iterations: 100, max_step: 1.0, residual_tol: DEFAULT_RESIDUAL_TOL }
    }
}

/// Newton's method on `G(P) = F^N(P) - P` with the chained Jacobian.
/// Every cycle point is polished separately, so forward roundoff is not
/// amplified along the cycle.
pub fn newton_refine_periodic<F: Holomorphic>(
    map: &HenonMap<F>,
    period: usize,
    seed: Point2,
    opts: &NewtonOptions,
) -> Result<PeriodicOrbit> {
    if period == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    let (p, iterations) = newton_core(map, period, seed, opts)?;
    let mut points = vec![p];
    for t in 1..period {
        let next = map.apply(points[t - 1])?;
        let polished = newton_core(map, period, next, opts).map(|(q, _)| q).unwrap_or(next);
        points.push(if point_dist(&polished, &next) <= DEDUP_TOL { polished } else { next });
    }
    let mut orbit = finish_orbit(map, period, points)?;
    orbit.newton_iterations = iterations;
    if !(orbit.residual < opts.residual_tol) {
        return Err(Error::NoConvergence(format!(
            "Newton stalled with residual {:.3e} above {:.1e}",
            orbit.residual, opts.residual_tol
        )));
    }
    Ok(orbit)
}

fn newton_core<F: Holomorphic>(
    map: &HenonMap<F>,
    period: usize,
    seed: Point2,
    opts: &NewtonOptions,
) -> Result<(Point2, usize)> {
    let one = Complex64::new(1.0, 0.0);
    let mut p = seed;
    for it in 0..opts.max_iterations {
        let (q, m) = flow_with_jacobian(map, p, period)?;
        let g = [q[0] - p[0], q[1] - p[1]];
        let a = [[m[0][0] - one, m[0][1]], [m[1][0], m[1][1] - one]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::Singular(format!("Newton Jacobian is singular at ({}, {})", p[0], p[1])));
        }
        let mut dx = [(a[1][1] * g[0] - a[0][1] * g[1]) / det, (a[0][0] * g[1] - a[1][0] * g[0]) / det];
        let len = dx[0].norm().max(dx[1].norm());
        if len > opts.max_step {
            let s = opts.max_step / len;
            dx = [dx[0] * s, dx[1] * s];
        }
        p = [p[0] - dx[0], p[1] - dx[1]];
        let size = 1.0 + p[0].norm().max(p[1].norm());
        if len <= 1e-13 * size {
            return Ok((p, it + 1));
        }
    }
    Err(Error::NoConvergence(format!("Newton did not converge in {} iterations", opts.max_iterations)))
}

fn finish_orbit<F: Holomorphic>(map: &HenonMap<F>, period: usize, points: Vec<Point2>) -> Result<PeriodicOrbit> {
    let p = points[0];
    let mut forward = identity();
    let mut backward = identity();
    for q in &points {
        let a = map.f.deriv(q[0])?;
        let d = map.delta;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        forward = mul(&[[a, -d], [one, zero]], &forward);
        // DF^{-1} = [[0, 1], [-1/δ, f'/δ]]
        backward = mul(&backward, &[[zero, one], [-one / d, a / d]]);
    }
    let mut residual = 0.0f64;
    for x in &points {
        let y = iterate(map, *x, period)?;
        residual = residual.max(point_dist(x, &y));
    }
    let unstable = dominant_eigenvalue(&forward);
    let stable = one_over(dominant_eigenvalue(&backward));
    let det = map.delta.powu(period as u32);
    let determinant_error = ((unstable * stable) / det - 1.0).norm();
    let saddle = unstable.norm() > 1.0 && stable.norm() < 1.0;
    let mut minimal = true;
    for d in (1..period).filter(|d| period.is_multiple_of(*d)) {
        if point_dist(&iterate(map, p, d)?, &p) <= MINIMALITY_GAP {
            minimal = false;
        }
    }
    Ok(PeriodicOrbit {
        period,
        points,
        residual,
        multipliers: Multipliers { unstable, stable },
        determinant_error,
        saddle,
        minimal,
        itinerary: None,
        cone: None,
        newton_iterations: 0,
        sweep_distances: Vec::new(),
    })
}

fn one_over(z: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) / z
}

/// Whether two cycles agree up to a cyclic shift, point-wise within `tol`.
pub fn same_cycle(a: &PeriodicOrbit, b: &PeriodicOrbit, tol: f64) -> bool {
    if a.period != b.period || a.points.len() != b.points.len() {
        return false;
    }
    let n = a.points.len();
    (0..n).any(|s| (0..n).all(|t| point_dist(&a.points[t], &b.points[(t + s) % n]) <= tol))
}

/// `per_axis²` complex seeds for each coordinate on `[lo, hi]²`, combined as
/// a product: `per_axis⁴` points `(z, w)`.
pub fn seed_grid(lo: f64, hi: f64, per_axis: usize) -> Vec<Point2> {
    let axis: Vec<f64> = if per_axis <= 1 {
        vec![(lo + hi) / 2.0]
    } else {
        (0..per_axis).map(|q| lo + (hi - lo) * q as f64 / (per_axis - 1) as f64).collect()
    };
    let plane: Vec<Complex64> = axis.iter().flat_map(|&y| axis.iter().map(move |&x| Complex64::new(x, y))).collect();
    plane.iter().flat_map(|&z| plane.iter().map(move |&w| [z, w])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub period: usize,
    pub seeds: usize,
    pub converged: usize,
    pub orbits: Vec<PeriodicOrbit>,
}

/// Newton from every seed in parallel; converged orbits are deduplicated in
/// seed order, so the report does not depend on scheduling.
pub fn newton_sweep<F: Holomorphic>(
    map: &HenonMap<F>,
    period: usize,
    seeds: &[Point2],
    opts: &NewtonOptions,
) -> Result<SweepReport> {
    if period == 0 {
        return Err(Error::invalid("period must be at least 1"));
    }
    let results: Vec<Option<PeriodicOrbit>> =
        seeds.par_iter().map(|s| newton_refine_periodic(map, period, *s, opts).ok()).collect();
    let converged = results.iter().filter(|r| r.is_some()).count();
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    for orbit in results.into_iter().flatten() {
        if !orbits.iter().any(|o| same_cycle(o, &orbit, DEDUP_TOL)) {
            orbits.push(orbit);
        }
    }
    for o in &mut orbits {
        o.cone = Some(cone_certificate(map, &o.points));
    }
    Ok(SweepReport { period, seeds: seeds.len(), converged, orbits })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItineraryOptions {
    pub nodes: usize,
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub newton: NewtonOptions,
}

impl Default for ItineraryOptions {
    fn default() -> Self {
        ItineraryOptions { nodes: DEFAULT_NODES, tolerance: 1e-10, max_sweeps: 200, newton: NewtonOptions::default() }
    }
}

/// Checks the itinerary: `N >= 3`, distinct symbols below `k`, and
/// `i_{t+1} ∈ J(i_t, i_{t-1})` with indices mod `N`.
pub fn check_itinerary(structure: &TransitionStructure, itinerary: &[usize]) -> Result<()> {
    let n = itinerary.len();
    if n < 3 {
        return Err(Error::invalid(format!(
            "period {n} is not supported: itineraries need N >= 3, since the count of admissible \
             distinct-symbol cycles gives no lower bound below three symbols"
        )));
    }
    let k = structure.k();
    for (t, &s) in itinerary.iter().enumerate() {
        if s >= k {
            return Err(Error::invalid(format!("itinerary symbol {s} at position {t} exceeds k = {k}")));
        }
        if itinerary[..t].contains(&s) {
            return Err(Error::invalid(format!("itinerary symbol {s} repeats at position {t}")));
        }
    }
    for t in 0..n {
        let (prev, cur, next) = (itinerary[(t + n - 1) % n], itinerary[t], itinerary[(t + 1) % n]);
        if !structure.table.allows(cur, prev, next) {
            return Err(Error::invalid(format!(
                "itinerary is not admissible: {next} is not in J({cur}, {prev}) at position {t}"
            )));
        }
    }
    Ok(())
}

/// Builds the cycle with the given itinerary by iterating the graph
/// transform around it, reading off the cycle point, and polishing by
/// Newton. `f_n` is the map the structure's islands were computed for.
pub fn periodic_itinerary_orbit<F: Holomorphic>(
    map: &HenonMap<F>,
    structure: &TransitionStructure,
    itinerary: &[usize],
    opts: &ItineraryOptions,
) -> Result<PeriodicOrbit> {
    check_itinerary(structure, itinerary)?;
    if map.delta != structure.delta {
        return Err(Error::invalid("map and transition structure use different δ"));
    }
    let n = itinerary.len();
    let mut graphs: Vec<GraphDisk> = Vec::with_capacity(n);
    let mut current = GraphDisk::flat(structure, itinerary[0], itinerary[n - 1], opts.nodes)?;
    let mut distances = Vec::new();
    let mut settled = false;
    for _ in 0..opts.max_sweeps {
        let start = current.clone();
        graphs.clear();
        for t in 0..n {
            graphs.push(current.clone());
            current = graph_transform_step(&map.f, structure, &current, itinerary[(t + 1) % n])?;
        }
        let d = current.distance(&start);
        distances.push(d);
        if d < opts.tolerance {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NoConvergence(format!(
            "graph transform did not contract below {:.1e} in {} sweeps (last change {:.3e})",
            opts.tolerance,
            opts.max_sweeps,
            distances.last().copied().unwrap_or(f64::NAN)
        )));
    }
    graphs[0] = current;
    for g in &graphs {
        if !(g.range < structure.layout.r) {
            return Err(Error::NoConvergence(format!(
                "graph over symbol {} has range {:.3e}, not below r",
                g.i, g.range
            )));
        }
    }
    // On graph t the second coordinate is the previous z, so
    // z_0 = g_1(g_2(... g_{N-1}(g_0(z_0)))).
    let mut z = structure.layout.centers[itinerary[0]];
    let mut settled = false;
    for _ in 0..500 {
        let mut y = graphs[0].eval(z);
        for t in (1..n).rev() {
            y = graphs[t].eval(y);
        }
        let step = (y - z).norm();
        z = y;
        if step <= 1e-15 * (1.0 + z.norm()) {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NoConvergence("cycle point extraction did not settle".into()));
    }
    let seed = [z, graphs[0].eval(z)];
    let mut orbit = newton_refine_periodic(map, n, seed, &opts.newton)?;
    let lay = &structure.layout;
    for (t, p) in orbit.points.iter().enumerate() {
        let (cur, prev) = (itinerary[t], itinerary[(t + n - 1) % n]);
        if (p[0] - lay.centers[cur]).norm() > lay.r || (p[1] - lay.centers[prev]).norm() > lay.r {
            return Err(Error::NoConvergence(format!("refined cycle point {t} left D_r(x_{cur}) × D_r(x_{prev})")));
        }
    }
    orbit.itinerary = Some(itinerary.to_vec());
    orbit.cone = Some(cone_certificate(map, &orbit.points));
    orbit.sweep_distances = distances;
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::EntireFunction;

    #[test]
    fn linear_saddle_fixed_point() {
        let map = HenonMap::new(EntireFunction::real_poly(&[0.0, 3.0]), Complex64::new(1.0, 0.0)).unwrap();
        let o = newton_refine_periodic(
            &map,
            1,
            [Complex64::new(0.7, 0.2), Complex64::new(-0.4, 1.0)],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!(o.points[0][0].norm() < 1e-14 && o.points[0][1].norm() < 1e-14);
        let sq5 = 5f64.sqrt();
        assert!((o.multipliers.unstable - (3.0 + sq5) / 2.0).norm() < 1e-12);
        assert!((o.multipliers.stable - (3.0 - sq5) / 2.0).norm() < 1e-12);
        assert!(o.saddle && o.minimal);
    }

    #[test]
    fn divisor_period_is_flagged() {
        let map = HenonMap::new(EntireFunction::real_poly(&[0.0, 3.0]), Complex64::new(1.0, 0.0)).unwrap();
        let o = newton_refine_periodic(
            &map,
            2,
            [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1)],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!(!o.minimal);
    }

    #[test]
    fn seed_grid_size() {
        let g = seed_grid(-5.0, 5.0, 3);
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], [Complex64::new(-5.0, -5.0); 2]);
    }
}
