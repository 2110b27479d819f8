//! Hénon maps `F(z, w) = (f_n(z) - δ w, z)`, Hénon-like checks on bidisks,
//! and degree certificates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{count_preimages, winding_number};
use crate::error::{Error, Result};
use crate::function::{rescale, Disk, EntireFunction, Holomorphic, LogValue, RescaledFunction};

pub type Point2 = [Complex64; 2];

/// `F(z, w) = (f(z) - δ w, z)` where `f` is already the rescaled map `f_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonMap<F = RescaledFunction> {
    pub f: F,
    pub delta: Complex64,
    /// Rescaling index the map was built with (1 when `f` is used as given).
    pub n: u32,
}

impl HenonMap<RescaledFunction> {
    pub fn rescaled(f: &EntireFunction, delta: Complex64, n: u32) -> Result<Self> {
        check_delta(delta)?;
        Ok(HenonMap { f: rescale(f, n)?, delta, n })
    }
}

fn check_delta(delta: Complex64) -> Result<()> {
    if delta == Complex64::new(0.0, 0.0) || !delta.is_finite() {
        return Err(Error::invalid("delta must be finite and nonzero"));
    }
    Ok(())
}

impl<F: Holomorphic> HenonMap<F> {
    pub fn new(f: F, delta: Complex64) -> Result<Self> {
        check_delta(delta)?;
        Ok(HenonMap { f, delta, n: 1 })
    }

    pub fn apply(&self, p: Point2) -> Result<Point2> {
        Ok([self.f.eval(p[0])? - self.delta * p[1], p[0]])
    }

    pub fn inverse(&self, p: Point2) -> Result<Point2> {
        Ok([p[1], (self.f.eval(p[1])? - p[0]) / self.delta])
    }

    /// `DF = [[f'(z), -δ], [1, 0]]`.
    pub fn jacobian(&self, p: Point2) -> Result<[[Complex64; 2]; 2]> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Ok([[self.f.deriv(p[0])?, -self.delta], [one, zero]])
    }

    /// `p, F(p), ..., F^steps(p)`.
    pub fn orbit(&self, p: Point2, steps: usize) -> Result<Vec<Point2>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(p);
        let mut q = p;
        for _ in 0..steps {
            q = self.apply(q)?;
            out.push(q);
        }
        Ok(out)
    }

    /// `|F(p)_1 - c|`, computed in the log domain when `f` overflows.
    fn first_distance(&self, p: Point2, c: Complex64) -> Result<f64> {
        let shift = self.delta * p[1] + c;
        match self.f.eval(p[0]) {
            Ok(v) => Ok((v - shift).norm()),
            Err(Error::Overflow { .. }) => {
                let v = self.f.eval_log(p[0])?;
                Ok(far_distance(v, shift))
            }
            Err(e) => Err(e),
        }
    }
}

fn far_distance(v: LogValue, shift: Complex64) -> f64 {
    match v.to_complex() {
        Some(x) => (x - shift).norm(),
        None => v.modulus(),
    }
}

/// `D_{r1}(c1) × D_{r2}(c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bidisk {
    pub horizontal: Disk,
    pub vertical: Disk,
}

impl Bidisk {
    pub fn new(horizontal: Disk, vertical: Disk) -> Self {
        Bidisk { horizontal, vertical }
    }

    pub fn centered(r1: f64, r2: f64) -> Result<Self> {
        Ok(Bidisk { horizontal: Disk::centered(r1)?, vertical: Disk::centered(r2)? })
    }

    pub fn contains_closed(&self, p: Point2) -> bool {
        self.horizontal.contains_closed(p[0]) && self.vertical.contains_closed(p[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    /// Positive means satisfied with that much room, in modulus units.
    pub slack: f64,
    /// The sample that realized the slack.
    pub witness: Option<Point2>,
    pub samples: usize,
    /// Set when the condition was settled by geometry rather than sampling.
    pub structural: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.slack > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonLikeReport {
    pub pass: bool,
    pub conditions: Vec<ConditionReport>,
}

impl HenonLikeReport {
    pub fn failed_condition(&self) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| !c.passed())
    }
}

fn best<I>(it: I, better: fn(f64, f64) -> bool) -> Result<(f64, Option<Point2>, usize)>
where
    I: ParallelIterator<Item = Result<(f64, Point2)>>,
{
    let init = if better(1.0, 0.0) { f64::NEG_INFINITY } else { f64::INFINITY };
    it.map(|r| r.map(|(s, p)| (s, Some(p), 1usize))).try_reduce(
        || (init, None, 0),
        |a, b| {
            let pick = match (a.1, b.1) {
                (None, _) => b,
                (_, None) => a,
                _ if better(b.0, a.0) => b,
                _ if better(a.0, b.0) => a,
                // ties resolve by coordinates so the witness is schedule-independent
                _ => {
                    let (pa, pb) = (a.1.unwrap(), b.1.unwrap());
                    if key(pb) < key(pa) {
                        b
                    } else {
                        a
                    }
                }
            };
            Ok((pick.0, pick.1, a.2 + b.2))
        },
    )
}

fn key(p: Point2) -> (u64, u64, u64, u64) {
    (p[0].re.to_bits(), p[0].im.to_bits(), p[1].re.to_bits(), p[1].im.to_bits())
}

/// Checks the three boundary conditions of a Hénon-like map on `bidisk`:
/// (1) some sampled interior point maps into the bidisk; (2) the vertical
/// boundary maps outside the closed bidisk; (3) the image of the closed
/// bidisk never lands on the horizontal boundary away from the vertical one.
///
/// `samples` is the number of points per boundary circle.
pub fn check_henon_like<F: Holomorphic>(map: &HenonMap<F>, bidisk: &Bidisk, samples: usize) -> Result<HenonLikeReport> {
    if samples < 8 {
        return Err(Error::invalid("check_henon_like needs at least 8 samples per circle"));
    }
    let (h, v) = (bidisk.horizontal, bidisk.vertical);
    let rings = (samples / 16).clamp(2, 16);
    let vertical_fill = v.closed_samples(rings, samples.min(64));

    // (1)
    let interior_h = h.closed_samples(rings, samples.min(64));
    let pts: Vec<Point2> = interior_h.iter().flat_map(|z| vertical_fill.iter().map(move |w| [*z, *w])).collect();
    let (s1, w1, n1) = best(
        pts.par_iter().map(|&p| {
            let img = map.apply(p);
            match img {
                Ok(q) => Ok(((h.radius - (q[0] - h.center).norm()).min(v.radius - (q[1] - v.center).norm()), p)),
                Err(Error::Overflow { .. }) => Ok((f64::NEG_INFINITY, p)),
                Err(e) => Err(e),
            }
        }),
        |a, b| a > b,
    )?;

    // (2)
    let vb: Vec<Point2> = Disk::boundary_angles(samples)
        .flat_map(|t| {
            let z = h.boundary_point(t);
            vertical_fill.iter().map(move |w| [z, *w])
        })
        .collect();
    let (s2, w2, n2) = best(
        vb.par_iter().map(|&p| {
            let d1 = map.first_distance(p, h.center)?;
            let d2 = (p[0] - v.center).norm();
            Ok(((d1 - h.radius).max(d2 - v.radius), p))
        }),
        |a, b| a < b,
    )?;

    // (3): F(p)_2 = z lies on ∂D_{r2}(c2) only for z on the arc
    // D̄_{r1}(c1) ∩ ∂D_{r2}(c2); there the first coordinate must leave D_{r1}.
    let gap = (h.center - v.center).norm();
    let cond3 = if gap + h.radius < v.radius || gap > h.radius + v.radius {
        ConditionReport {
            condition: "image avoids the horizontal boundary".into(),
            slack: (v.radius - gap - h.radius).max(gap - h.radius - v.radius),
            witness: None,
            samples: 0,
            structural: true,
        }
    } else {
        let arc: Vec<Point2> = Disk::boundary_angles(samples)
            .map(|t| v.boundary_point(t))
            .filter(|z| h.contains_closed(*z))
            .flat_map(|z| vertical_fill.iter().map(move |w| [z, *w]))
            .collect();
        let (s3, w3, n3) =
            best(arc.par_iter().map(|&p| Ok((map.first_distance(p, h.center)? - h.radius, p))), |a, b| a < b)?;
        ConditionReport {
            condition: "image avoids the horizontal boundary".into(),
            slack: if n3 == 0 { v.radius - gap } else { s3 },
            witness: w3,
            samples: n3,
            structural: n3 == 0,
        }
    };

    let conditions = vec![
        ConditionReport {
            condition: "interior point maps into the bidisk".into(),
            slack: s1,
            witness: w1,
            samples: n1,
            structural: false,
        },
        ConditionReport {
            condition: "vertical boundary maps outside the closed bidisk".into(),
            slack: s2,
            witness: w2,
            samples: n2,
            structural: false,
        },
        cond3,
    ];
    Ok(HenonLikeReport { pass: conditions.iter().all(ConditionReport::passed), conditions })
}

/// Degree of `z ↦ f_n(z) - δ line_w` over the horizontal disk, counted as
/// preimages of the horizontal center.
pub fn henon_degree<F: Holomorphic>(map: &HenonMap<F>, bidisk: &Bidisk, line_w: Complex64) -> Result<i64> {
    henon_degree_at(map, bidisk, line_w, bidisk.horizontal.center)
}

pub fn henon_degree_at<F: Holomorphic>(
    map: &HenonMap<F>,
    bidisk: &Bidisk,
    line_w: Complex64,
    u: Complex64,
) -> Result<i64> {
    if !bidisk.vertical.contains(line_w) {
        return Err(Error::invalid(format!("horizontal line w = {line_w} is outside the vertical disk")));
    }
    count_preimages(&map.f, u + map.delta * line_w, &bidisk.horizontal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSweep {
    pub lines: Vec<Complex64>,
    pub degrees: Vec<i64>,
    pub constant: bool,
}

/// `count` deterministic horizontal lines spread over the vertical disk.
pub fn sweep_lines(vertical: &Disk, count: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            vertical.center + Complex64::from_polar(0.9 * vertical.radius * k as f64 / count as f64, golden * k as f64)
        })
        .collect()
}

/// Degree over several horizontal lines; `constant` reports line independence.
pub fn degree_line_sweep<F: Holomorphic>(map: &HenonMap<F>, bidisk: &Bidisk, count: usize) -> Result<LineSweep> {
    let lines = sweep_lines(&bidisk.vertical, count.max(1));
    let degrees = lines.par_iter().map(|w| henon_degree(map, bidisk, *w)).collect::<Result<Vec<_>>>()?;
    let constant = degrees.windows(2).all(|p| p[0] == p[1]);
    Ok(LineSweep { lines, degrees, constant })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    HenonLike,
    PolynomialLike,
    MonomialDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub condition: String,
    /// Slack in modulus units (may be `inf` when the dominant side overflows).
    pub absolute: f64,
    /// Natural log of the ratio between the two sides of the inequality.
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub degree: u64,
    pub kind: CertificateKind,
    pub margins: Vec<Margin>,
    pub entropy_bound: f64,
    pub samples: usize,
}

pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-8;

fn finish_certificate(
    degree: u64,
    kind: CertificateKind,
    margins: Vec<Margin>,
    samples: usize,
    floor: f64,
    witness: Complex64,
) -> Result<DegreeCertificate> {
    for m in &margins {
        if !(m.log_ratio > 0.0) {
            return Err(Error::CertificateFailed {
                condition: m.condition.clone(),
                witness: format!("z = {witness}"),
                slack: m.absolute,
            });
        }
        if m.absolute < floor {
            return Err(Error::inconclusive(format!(
                "margin {:e} on `{}` is below the floor {floor:e}",
                m.absolute, m.condition
            )));
        }
    }
    Ok(DegreeCertificate { degree, kind, margins, entropy_bound: (degree as f64).ln(), samples })
}

/// Certifies `|f(z)| > (|δ| + 1) r` on `|z| = r` and returns the winding of
/// `f` around 0 on that circle as the Hénon-like degree on `D_r × D_r`.
pub fn certify_monomial_dominated<F: Holomorphic + ?Sized>(
    f: &F,
    delta: Complex64,
    r: f64,
    samples: usize,
) -> Result<DegreeCertificate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("radius must be positive"));
    }
    if samples < 64 {
        return Err(Error::invalid("monomial-dominated certificate needs at least 64 samples"));
    }
    let disk = Disk::centered(r)?;
    let (ln_min, argmin) = Disk::boundary_angles(samples)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|t| {
            let z = disk.boundary_point(*t);
            f.eval_log(z).map(|v| (v.ln_mag, z))
        })
        .try_reduce(
            || (f64::INFINITY, Complex64::new(f64::NAN, f64::NAN)),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1.re.to_bits() < a.1.re.to_bits()) { b } else { a }),
        )?;
    let threshold = (delta.norm() + 1.0) * r;
    let margin = Margin {
        condition: "|f| > (|delta| + 1) r on the circle".into(),
        absolute: ln_min.exp() - threshold,
        log_ratio: ln_min - threshold.ln(),
    };
    if !(margin.log_ratio > 0.0) {
        return finish_certificate(
            0,
            CertificateKind::MonomialDominated,
            vec![margin],
            samples,
            DEFAULT_MARGIN_FLOOR,
            argmin,
        );
    }
    let d = winding_number(f, &disk, Complex64::new(0.0, 0.0))?.index;
    if d <= 0 {
        return Err(Error::CertificateFailed {
            condition: "winding around 0 is positive".into(),
            witness: format!("circle |z| = {r}"),
            slack: d as f64,
        });
    }
    finish_certificate(
        d as u64,
        CertificateKind::MonomialDominated,
        vec![margin],
        samples,
        DEFAULT_MARGIN_FLOOR,
        argmin,
    )
}

/// Certifies `f = a z^n + g` polynomial-like of degree `n` on
/// `D_r ∩ f^{-1}(D_{R/2})`, `R = |a| r^n`, from `|g| < R / 2^n` on the closed
/// disk.
pub fn certify_polynomial_like<G: Holomorphic + ?Sized>(
    a: Complex64,
    n: u64,
    g: &G,
    r: f64,
    samples: usize,
) -> Result<DegreeCertificate> {
    if a == Complex64::new(0.0, 0.0) || !a.is_finite() {
        return Err(Error::invalid("leading coefficient must be finite and nonzero"));
    }
    certify_polynomial_like_ln(a.norm().ln(), n, g, r, samples)
}

/// As [`certify_polynomial_like`] with the leading coefficient given by `ln|a|`.
pub fn certify_polynomial_like_ln<G: Holomorphic + ?Sized>(
    ln_a: f64,
    n: u64,
    g: &G,
    r: f64,
    samples: usize,
) -> Result<DegreeCertificate> {
    if n < 2 {
        return Err(Error::invalid("polynomial-like degree must be at least 2"));
    }
    if !(r > 0.0 && r.is_finite()) || !ln_a.is_finite() {
        return Err(Error::invalid("radius must be positive and |a| finite"));
    }
    if samples < 64 {
        return Err(Error::invalid("polynomial-like certificate needs at least 64 samples"));
    }
    let ln_big_r = ln_a + n as f64 * r.ln();
    let ln2 = std::f64::consts::LN_2;
    if !(ln_big_r - ln2 > r.ln()) {
        return Err(Error::invalid(format!(
            "precondition R/2 > r violated: R = |a| r^n = {:e}, r = {r}",
            ln_big_r.exp()
        )));
    }
    let ln_bound = ln_big_r - n as f64 * ln2;
    let disk = Disk::centered(r)?;
    let rings = (samples / 32).clamp(4, 64);
    let pts = disk.closed_samples(rings, samples);
    let (ln_sup, argmax) = pts.par_iter().map(|z| g.eval_log(*z).map(|v| (v.ln_mag, *z))).try_reduce(
        || (f64::NEG_INFINITY, Complex64::new(0.0, 0.0)),
        |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1.re.to_bits() < a.1.re.to_bits()) { b } else { a }),
    )?;
    let margin = Margin {
        condition: "|g| < R / 2^n on the closed disk".into(),
        absolute: ln_bound.exp() - ln_sup.exp(),
        log_ratio: ln_bound - ln_sup,
    };
    finish_certificate(n, CertificateKind::PolynomialLike, vec![margin], pts.len(), DEFAULT_MARGIN_FLOOR, argmax)
}
