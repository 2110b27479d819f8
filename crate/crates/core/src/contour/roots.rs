use num_complex::Complex64;

use super::winding::{winding_on_contour, Contour, WindingOptions};
use crate::error::{Error, Result};
use crate::function::{Disk, Holomorphic};

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn contour(&self) -> Contour {
        Contour::Polygon(vec![
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ])
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn contains_loose(&self, z: Complex64) -> bool {
        let pad = 1e-9 * self.size();
        z.re >= self.x0 - pad && z.re <= self.x1 + pad && z.im >= self.y0 - pad && z.im <= self.y1 + pad
    }

    fn split(&self, ox: f64, oy: f64) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1) + ox * (self.x1 - self.x0);
        let ym = 0.5 * (self.y0 + self.y1) + oy * (self.y1 - self.y0);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }
}

// split-point offsets tried in turn when a cut passes through a root
const OFFSETS: [(f64, f64); 5] =
    [(0.0, 0.0), (0.0173, 0.0311), (-0.0271, 0.0193), (0.0419, -0.0357), (-0.0113, -0.0467)];

const MAX_WINDINGS: usize = 40_000;

fn newton<F: Holomorphic + ?Sized>(f: &F, target: Complex64, mut z: Complex64, iters: usize) -> Option<Complex64> {
    for _ in 0..iters {
        let v = f.eval(z).ok()? - target;
        let d = f.deriv(z).ok()?;
        if d.norm() == 0.0 {
            return None;
        }
        let step = v / d;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let v = f.eval(z).ok()? - target;
    let d = f.deriv(z).ok()?;
    ((v / d).norm() <= 1e-12 * (1.0 + z.norm())).then_some(z)
}

/// All solutions of `f(z) = target` inside `region` (with multiplicity), located
/// by recursive argument-principle subdivision and polished by Newton.
///
/// Sorted by distance from the region center.
pub fn locate_preimages<F: Holomorphic + ?Sized>(f: &F, target: Complex64, region: &Disk) -> Result<Vec<Complex64>> {
    let opts = WindingOptions { initial_samples: 64, ..WindingOptions::default() };
    let r = region.radius;
    let root =
        Rect { x0: region.center.re - r, x1: region.center.re + r, y0: region.center.im - r, y1: region.center.im + r };
    let mut windings = 0usize;
    let mut count = |rect: &Rect, windings: &mut usize| -> Result<i64> {
        *windings += 1;
        if *windings > MAX_WINDINGS {
            return Err(Error::inconclusive("root location exceeded its subdivision budget"));
        }
        Ok(winding_on_contour(f, &rect.contour(), target, &opts)?.index)
    };

    let top = match count(&root, &mut windings) {
        Ok(n) => n,
        Err(Error::Inconclusive(_)) => {
            // a root sits on the bounding square: enlarge it slightly
            let grown = Rect {
                x0: root.x0 - 0.013 * r,
                x1: root.x1 + 0.017 * r,
                y0: root.y0 - 0.011 * r,
                y1: root.y1 + 0.019 * r,
            };
            return locate_in_rect(f, target, region, grown, &mut count, &mut windings);
        }
        Err(e) => return Err(e),
    };
    let mut found = Vec::new();
    solve_rect(f, target, root, top, &mut count, &mut windings, &mut found)?;
    Ok(finish(found, region))
}

fn locate_in_rect<F, C>(
    f: &F,
    target: Complex64,
    region: &Disk,
    rect: Rect,
    count: &mut C,
    windings: &mut usize,
) -> Result<Vec<Complex64>>
where
    F: Holomorphic + ?Sized,
    C: FnMut(&Rect, &mut usize) -> Result<i64>,
{
    let top = count(&rect, windings)?;
    let mut found = Vec::new();
    solve_rect(f, target, rect, top, count, windings, &mut found)?;
    Ok(finish(found, region))
}

fn finish(mut found: Vec<Complex64>, region: &Disk) -> Vec<Complex64> {
    found.retain(|z| region.contains(*z));
    found.sort_by(|a, b| {
        let da = (a - region.center).norm();
        let db = (b - region.center).norm();
        da.total_cmp(&db).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im))
    });
    found
}

fn solve_rect<F, C>(
    f: &F,
    target: Complex64,
    rect: Rect,
    n: i64,
    count: &mut C,
    windings: &mut usize,
    out: &mut Vec<Complex64>,
) -> Result<()>
where
    F: Holomorphic + ?Sized,
    C: FnMut(&Rect, &mut usize) -> Result<i64>,
{
    let mut stack = vec![(rect, n)];
    while let Some((rect, n)) = stack.pop() {
        if n <= 0 {
            continue;
        }
        if n == 1 {
            if let Some(z) = newton(f, target, rect.center(), 60) {
                if rect.contains_loose(z) {
                    out.push(z);
                    continue;
                }
            }
        }
        if rect.size() < 1e-11 * (1.0 + rect.center().norm()) {
            push_cluster(f, target, &rect, n, out);
            continue;
        }
        let mut split_ok = None;
        for &(ox, oy) in &OFFSETS {
            let kids = rect.split(ox, oy);
            let mut counts = [0i64; 4];
            let mut ok = true;
            for (k, kid) in kids.iter().enumerate() {
                match count(kid, windings) {
                    Ok(c) => counts[k] = c,
                    Err(Error::Inconclusive(_)) if *windings <= MAX_WINDINGS => {
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if ok && counts.iter().sum::<i64>() == n {
                split_ok = Some((kids, counts));
                break;
            }
        }
        let Some((kids, counts)) = split_ok else {
            if rect.size() < 1e-6 * (1.0 + rect.center().norm()) {
                // a multiple root: rounding noise swamps every cut near it
                push_cluster(f, target, &rect, n, out);
                continue;
            }
            return Err(Error::inconclusive("could not split a region without cutting through a root"));
        };
        for (kid, c) in kids.into_iter().zip(counts) {
            stack.push((kid, c));
        }
    }
    Ok(())
}

fn push_cluster<F: Holomorphic + ?Sized>(f: &F, target: Complex64, rect: &Rect, n: i64, out: &mut Vec<Complex64>) {
    let z = newton(f, target, rect.center(), 20).filter(|z| rect.contains_loose(*z)).unwrap_or(rect.center());
    out.extend(std::iter::repeat_n(z, n as usize));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{rescale, EntireFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity() {
        let f = EntireFunction::monomial(5);
        let roots = locate_preimages(&f, c(1.0, 0.0), &Disk::centered(2.0).unwrap()).unwrap();
        assert_eq!(roots.len(), 5);
        for z in roots {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn double_root_is_reported_twice() {
        // (z - 0.3)^2 (z + 0.5)
        let f = EntireFunction::real_poly(&[0.045, -0.21, -0.1, 1.0]);
        let roots = locate_preimages(&f, c(0.0, 0.0), &Disk::centered(1.0).unwrap()).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().filter(|z| (*z - 0.3).norm() < 1e-5).count() == 2);
    }

    #[test]
    fn rescaled_exp_preimages_are_vertically_spaced() {
        let f = rescale(&EntireFunction::exp(), 20).unwrap();
        let region = Disk::new(c(0.0, 1.0), 0.3).unwrap();
        let target = c(0.0, 2.0);
        let roots = locate_preimages(&f, target, &region).unwrap();
        assert!(!roots.is_empty());
        let expected_re = (20.0f64 * 2.0).ln() / 20.0;
        for z in &roots {
            assert!((z.re - expected_re).abs() < 1e-12);
            assert!((f.eval(*z).unwrap() - target).norm() < 1e-12);
        }
    }
}
