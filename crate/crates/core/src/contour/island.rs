use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::locate_preimages;
use super::winding::{winding_on_contour, Contour, WindingOptions};
use crate::error::{Error, Result};
use crate::function::{Disk, Holomorphic};

/// A component of `f^{-1}(target)` inside `source`, described by its traced
/// boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub source: Disk,
    pub target: Disk,
    /// Closed polyline (last vertex connects back to the first).
    pub boundary: Vec<Complex64>,
    /// Winding of `f(boundary)` around the target center.
    pub degree: i64,
    /// The preimage of the target center the trace started from.
    pub center_preimage: Complex64,
}

const MAX_TURNS: usize = 8;
const MAX_STEPS: usize = 200_000;

enum Trace {
    Reached(Complex64, Vec<Complex64>),
    Exited,
    Stalled,
}

struct Tracer<'a, F: ?Sized> {
    f: &'a F,
    source: Disk,
    max_dz: f64,
    steps: usize,
}

impl<F: Holomorphic + ?Sized> Tracer<'_, F> {
    fn correct(&self, mut z: Complex64, w: Complex64) -> Option<Complex64> {
        for _ in 0..16 {
            let v = self.f.eval(z).ok()? - w;
            let d = self.f.deriv(z).ok()?;
            if d.norm() == 0.0 {
                return None;
            }
            let step = v / d;
            z -= step;
            if !z.is_finite() {
                return None;
            }
            if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        let v = self.f.eval(z).ok()? - w;
        let d = self.f.deriv(z).ok()?;
        ((v / d).norm() <= 1e-12 * (1.0 + z.norm())).then_some(z)
    }

    /// Follows the solution of `f(z) = path(t)` from `t0` to `t1`, starting
    /// at `z` (a solution at `t0`), collecting every accepted point.
    fn follow(&mut self, mut z: Complex64, path: &dyn Fn(f64) -> Complex64, t0: f64, t1: f64, h0: f64) -> Trace {
        let mut t = t0;
        let mut h = h0;
        let mut pts = Vec::new();
        while t < t1 {
            self.steps += 1;
            if self.steps > MAX_STEPS || h < 1e-14 {
                return Trace::Stalled;
            }
            let t_next = if t + h >= t1 { t1 } else { t + h };
            let w_next = path(t_next);
            let Ok(d) = self.f.deriv(z) else { return Trace::Stalled };
            let Ok(fz) = self.f.eval(z) else { return Trace::Stalled };
            let dz = (w_next - fz) / d;
            if !dz.is_finite() || dz.norm() > self.max_dz {
                h *= 0.5;
                continue;
            }
            let pred = z + dz;
            match self.correct(pred, w_next) {
                Some(zc) if (zc - pred).norm() <= 0.25 * dz.norm() + 1e-13 * (1.0 + z.norm()) => {
                    z = zc;
                    t = t_next;
                    pts.push(z);
                    if !self.source.contains(z) {
                        return Trace::Exited;
                    }
                    h *= 1.5;
                }
                _ => h *= 0.5,
            }
        }
        Trace::Reached(z, pts)
    }
}

fn polygon_contains(poly: &[Complex64], z: Complex64) -> bool {
    let mut inside = false;
    let m = poly.len();
    for k in 0..m {
        let a = poly[k];
        let b = poly[(k + 1) % m];
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

enum Component {
    Univalent(Island),
    Rejected,
    Stalled,
}

fn trace_component<F: Holomorphic + ?Sized>(f: &F, source: &Disk, target: &Disk, z_star: Complex64) -> Component {
    let c = target.center;
    let rad = target.radius;
    let mut tracer = Tracer { f, source: *source, max_dz: 0.02 * source.radius, steps: 0 };
    let radial = |s: f64| c + rad * s;
    let z_edge = match tracer.follow(z_star, &radial, 0.0, 1.0, 0.05) {
        Trace::Reached(z, _) => z,
        Trace::Exited => return Component::Rejected,
        Trace::Stalled => return Component::Stalled,
    };
    let circle = |theta: f64| c + Complex64::from_polar(rad, theta);
    let mut boundary = vec![z_edge];
    let mut z = z_edge;
    for turn in 1..=MAX_TURNS {
        let from = TAU * (turn - 1) as f64;
        match tracer.follow(z, &circle, from, TAU * turn as f64, 0.02) {
            Trace::Reached(z_end, mut pts) => {
                let extent = boundary.iter().chain(pts.iter()).map(|p| (p - z_edge).norm()).fold(0.0, f64::max);
                z = z_end;
                if (z_end - z_edge).norm() <= 1e-6 * extent.max(f64::MIN_POSITIVE) {
                    if turn > 1 {
                        return Component::Rejected;
                    }
                    // the closing point duplicates the first vertex
                    pts.pop();
                    boundary.extend(pts);
                    let degree =
                        match winding_on_contour(f, &Contour::Polygon(boundary.clone()), c, &WindingOptions::default())
                        {
                            Ok(w) => w.index,
                            Err(_) => return Component::Stalled,
                        };
                    if degree != 1 {
                        return Component::Rejected;
                    }
                    return Component::Univalent(Island {
                        source: *source,
                        target: *target,
                        boundary,
                        degree,
                        center_preimage: z_star,
                    });
                }
                boundary.extend(pts);
            }
            Trace::Exited => return Component::Rejected,
            Trace::Stalled => return Component::Stalled,
        }
    }
    Component::Rejected
}

/// Finds a component of `f^{-1}(target)` lying in `source` on which `f` is
/// univalent onto `target`.
///
/// Preimages of the target center are tried in order of distance from the
/// source center. `Ok(None)` means every candidate exits the source disk or
/// has degree at least 2; a trace that fails to close is `Inconclusive`
/// unless another candidate succeeds.
pub fn find_univalent_island<F: Holomorphic + ?Sized>(f: &F, source: &Disk, target: &Disk) -> Result<Option<Island>> {
    let roots = locate_preimages(f, target.center, source)?;
    let mut stalled = false;
    let mut tried: Vec<Complex64> = Vec::new();
    for z in roots {
        if tried.iter().any(|p| (*p - z).norm() <= 1e-9 * (1.0 + z.norm())) {
            continue;
        }
        tried.push(z);
        match trace_component(f, source, target, z) {
            Component::Univalent(island) => return Ok(Some(island)),
            Component::Rejected => {}
            Component::Stalled => stalled = true,
        }
    }
    if stalled {
        return Err(Error::inconclusive("island boundary trace did not close"));
    }
    Ok(None)
}

impl Island {
    /// Point-in-polygon test against the traced boundary.
    pub fn contains(&self, z: Complex64) -> bool {
        polygon_contains(&self.boundary, z)
    }

    /// The unique `z` in the island with `f(z) = v`, for `v` in the target disk,
    /// by continuation from the center preimage along the segment to `v`.
    pub fn invert<F: Holomorphic + ?Sized>(&self, f: &F, v: Complex64) -> Result<Complex64> {
        if !self.target.contains(v) {
            return Err(Error::invalid(format!("{v} is outside the island's target disk")));
        }
        let c = self.target.center;
        let mut tracer = Tracer { f, source: self.source, max_dz: 0.02 * self.source.radius, steps: 0 };
        let seg = |s: f64| c + (v - c) * s;
        match tracer.follow(self.center_preimage, &seg, 0.0, 1.0, 0.1) {
            Trace::Reached(z, _) => Ok(z),
            Trace::Exited => {
                Err(Error::NoConvergence(format!("inverse branch left the source disk while solving f(z) = {v}")))
            }
            Trace::Stalled => Err(Error::NoConvergence(format!("continuation stalled while solving f(z) = {v}"))),
        }
    }

    /// Largest relative deviation of `|f(b) - c|` from the target radius over
    /// the boundary vertices.
    pub fn image_deviation<F: Holomorphic + ?Sized>(&self, f: &F) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for b in &self.boundary {
            let d = (f.eval(*b)? - self.target.center).norm();
            worst = worst.max((d - self.target.radius).abs() / self.target.radius);
        }
        Ok(worst)
    }

    /// Winding of `f` along the boundary around an arbitrary point.
    pub fn count_inside<F: Holomorphic + ?Sized>(&self, f: &F, value: Complex64) -> Result<i64> {
        Ok(winding_on_contour(f, &Contour::Polygon(self.boundary.clone()), value, &WindingOptions::default())?.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::EntireFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_island_is_the_target() {
        let f = EntireFunction::monomial(1);
        let target = Disk::centered(0.5).unwrap();
        let island = find_univalent_island(&f, &Disk::centered(1.0).unwrap(), &target).unwrap().unwrap();
        assert_eq!(island.degree, 1);
        for b in &island.boundary {
            assert!((b.norm() - 0.5).abs() < 1e-12);
        }
        assert!(island.contains(c(0.1, 0.2)));
        assert!(!island.contains(c(0.6, 0.0)));
    }

    #[test]
    fn square_root_branch() {
        let f = EntireFunction::monomial(2);
        let source = Disk::new(c(2.0, 0.0), 0.5).unwrap();
        let target = Disk::new(c(4.0, 0.0), 0.5).unwrap();
        let island = find_univalent_island(&f, &source, &target).unwrap().unwrap();
        assert_eq!(island.degree, 1);
        assert!((island.center_preimage - 2.0).norm() < 1e-12);
        for b in &island.boundary {
            assert!(source.contains(*b));
            let w = b * b;
            assert!(((w - 4.0).norm() - 0.5).abs() < 1e-9);
        }
        assert!(island.image_deviation(&f).unwrap() < 0.05);
        let z = island.invert(&f, c(4.2, 0.1)).unwrap();
        assert!((z - c(4.2, 0.1).sqrt()).norm() < 1e-12);
    }

    #[test]
    fn no_preimage_in_source() {
        let f = EntireFunction::monomial(2);
        let r = find_univalent_island(&f, &Disk::centered(0.4).unwrap(), &Disk::new(c(1.0, 0.0), 0.1).unwrap());
        assert_eq!(r.unwrap(), None);
    }

    #[test]
    fn critical_component_is_not_univalent() {
        // the preimage of D_0.5(0.1) under z^2 is a single degree-2 component
        let f = EntireFunction::monomial(2);
        let r = find_univalent_island(&f, &Disk::centered(2.0).unwrap(), &Disk::new(c(0.1, 0.0), 0.5).unwrap());
        assert_eq!(r.unwrap(), None);
    }

    #[test]
    fn exiting_component_is_rejected() {
        let f = EntireFunction::monomial(1);
        let r = find_univalent_island(&f, &Disk::centered(0.3).unwrap(), &Disk::centered(0.5).unwrap());
        assert_eq!(r.unwrap(), None);
    }
}
