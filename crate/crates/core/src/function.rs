//! Entire functions, the rescaling family `f_n(z) = f(nz)/n`, disks, and
//! circle statistics.
//!
//! Every function is evaluatable both in the plain complex domain and in the
//! log domain (`ln|f|` plus a phase). Lacunary series are always accumulated
//! in the log domain because their coefficients and radii leave the `f64`
//! range after a handful of terms.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln|v|` together with `arg v`. Zero is represented by `ln_mag = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub ln_mag: f64,
    pub phase: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { ln_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(ln_mag: f64, phase: f64) -> Self {
        LogValue { ln_mag, phase }
    }

    pub fn from_complex(v: Complex64) -> Self {
        let m = v.norm();
        if m == 0.0 {
            LogValue::ZERO
        } else {
            LogValue { ln_mag: m.ln(), phase: v.arg() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_mag == f64::NEG_INFINITY
    }

    /// The plain value, or `None` when `|v|` is outside the finite `f64` range.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        let m = self.ln_mag.exp();
        if !m.is_finite() {
            return None;
        }
        let v = Complex64::from_polar(m, self.phase);
        v.is_finite().then_some(v)
    }

    /// `|v|`, possibly `+inf` when the magnitude is unrepresentable.
    pub fn modulus(&self) -> f64 {
        self.ln_mag.exp()
    }

    /// Stable log-sum-exp accumulation of complex terms.
    pub fn sum<I: IntoIterator<Item = LogValue>>(terms: I) -> LogValue {
        let terms: Vec<LogValue> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(top) = terms.iter().map(|t| t.ln_mag).reduce(f64::max) else {
            return LogValue::ZERO;
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &terms {
            acc += Complex64::from_polar((t.ln_mag - top).exp(), t.phase);
        }
        let m = acc.norm();
        if m == 0.0 {
            return LogValue::ZERO;
        }
        LogValue::new(top + m.ln(), acc.arg())
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;

    fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return LogValue::ZERO;
        }
        LogValue::new(self.ln_mag + other.ln_mag, wrap_phase(self.phase + other.phase))
    }
}

impl std::ops::Div for LogValue {
    type Output = LogValue;

    fn div(self, other: LogValue) -> LogValue {
        LogValue::new(self.ln_mag - other.ln_mag, wrap_phase(self.phase - other.phase))
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(TAU);
    if p > std::f64::consts::PI {
        p -= TAU;
    }
    p
}

/// Result of [`evaluate`]: a plain value when representable, otherwise the
/// log-domain value (the flag is the variant itself).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Plain(Complex64),
    Log(LogValue),
}

impl Evaluation {
    pub fn is_log_domain(&self) -> bool {
        matches!(self, Evaluation::Log(_))
    }

    pub fn log_value(&self) -> LogValue {
        match *self {
            Evaluation::Plain(v) => LogValue::from_complex(v),
            Evaluation::Log(l) => l,
        }
    }
}

/// Anything that can be evaluated like a holomorphic function.
pub trait Holomorphic: Sync {
    /// Plain evaluation; a non-finite result is [`Error::Overflow`].
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    fn deriv(&self, z: Complex64) -> Result<Complex64>;

    fn eval_log(&self, z: Complex64) -> Result<LogValue> {
        self.eval(z).map(LogValue::from_complex)
    }

    fn deriv_log(&self, z: Complex64) -> Result<LogValue> {
        self.deriv(z).map(LogValue::from_complex)
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (**self).eval(z)
    }
    fn deriv(&self, z: Complex64) -> Result<Complex64> {
        (**self).deriv(z)
    }
    fn eval_log(&self, z: Complex64) -> Result<LogValue> {
        (**self).eval_log(z)
    }
    fn deriv_log(&self, z: Complex64) -> Result<LogValue> {
        (**self).deriv_log(z)
    }
}

/// A holomorphic function given by a pair of closures (value, derivative).
pub struct FnHolomorphic<E, D> {
    value: E,
    derivative: D,
}

impl<E, D> FnHolomorphic<E, D>
where
    E: Fn(Complex64) -> Complex64 + Sync,
    D: Fn(Complex64) -> Complex64 + Sync,
{
    pub fn new(value: E, derivative: D) -> Self {
        FnHolomorphic { value, derivative }
    }
}

impl<E, D> Holomorphic for FnHolomorphic<E, D>
where
    E: Fn(Complex64) -> Complex64 + Sync,
    D: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        finite((self.value)(z), z)
    }
    fn deriv(&self, z: Complex64) -> Result<Complex64> {
        finite((self.derivative)(z), z)
    }
}

fn finite(v: Complex64, at: Complex64) -> Result<Complex64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { at })
    }
}

/// One term `a z^n` of a lacunary series, with `|a| = 2^log2_magnitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LacunaryTerm {
    pub log2_magnitude: f64,
    #[serde(default)]
    pub phase: f64,
    pub exponent: u64,
}

impl LacunaryTerm {
    fn term_log(&self, ln_abs_z: f64, arg_z: f64) -> LogValue {
        let n = self.exponent as f64;
        let ln = self.log2_magnitude * LN_2 + n * ln_abs_z;
        if ln == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        LogValue::new(ln, wrap_phase(self.phase + n * arg_z))
    }

    fn derivative_log(&self, ln_abs_z: f64, arg_z: f64) -> LogValue {
        let n = self.exponent as f64;
        let base = self.log2_magnitude * LN_2 + n.ln();
        if self.exponent == 1 {
            return LogValue::new(base, wrap_phase(self.phase));
        }
        let ln = base + (n - 1.0) * ln_abs_z;
        if ln == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        LogValue::new(ln, wrap_phase(self.phase + (n - 1.0) * arg_z))
    }
}

/// An entire function in one of the supported closed representations.
///
/// JSON form (tagged by `kind`):
/// - `{"kind": "exp"}`
/// - `{"kind": "poly", "coefficients": [[re, im], ...]}` (ascending powers)
/// - `{"kind": "lacunary", "terms": [{"log2_magnitude", "phase", "exponent"}], "truncation": n?}`
/// - `{"kind": "product", "zeros": [[re, im], ...], "truncation": n?}` for `prod (1 - z/a)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EntireFunction {
    Exp,
    Poly {
        coefficients: Vec<Complex64>,
    },
    Lacunary {
        terms: Vec<LacunaryTerm>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
    },
    Product {
        zeros: Vec<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
    },
}

impl EntireFunction {
    pub fn exp() -> Self {
        EntireFunction::Exp
    }

    /// Polynomial with ascending coefficients `c_0 + c_1 z + ...`.
    pub fn poly(coefficients: Vec<Complex64>) -> Self {
        EntireFunction::Poly { coefficients }
    }

    /// Polynomial with real ascending coefficients.
    pub fn real_poly(coefficients: &[f64]) -> Self {
        EntireFunction::poly(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); degree + 1];
        c[degree] = Complex64::new(1.0, 0.0);
        EntireFunction::poly(c)
    }

    pub fn lacunary(terms: Vec<LacunaryTerm>) -> Result<Self> {
        let f = EntireFunction::Lacunary { terms, truncation: None };
        f.validate()?;
        Ok(f)
    }

    pub fn product(zeros: Vec<Complex64>) -> Result<Self> {
        let f = EntireFunction::Product { zeros, truncation: None };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EntireFunction::Exp => Ok(()),
            EntireFunction::Poly { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::invalid("polynomial needs at least one coefficient"));
                }
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("polynomial coefficients must be finite"));
                }
                Ok(())
            }
            EntireFunction::Lacunary { terms, .. } => {
                let mut prev = 0u64;
                for t in terms {
                    if t.exponent <= prev {
                        return Err(Error::invalid("lacunary exponents must be strictly increasing positive integers"));
                    }
                    if !t.log2_magnitude.is_finite() || !t.phase.is_finite() {
                        return Err(Error::invalid("lacunary coefficients must be finite"));
                    }
                    prev = t.exponent;
                }
                Ok(())
            }
            EntireFunction::Product { zeros, .. } => {
                if zeros.iter().any(|a| *a == Complex64::new(0.0, 0.0) || !a.is_finite()) {
                    return Err(Error::invalid("product zeros must be finite and nonzero"));
                }
                Ok(())
            }
        }
    }

    /// Number of series/product terms actually used in evaluation.
    pub fn active_terms(&self) -> usize {
        match self {
            EntireFunction::Exp => 0,
            EntireFunction::Poly { coefficients } => coefficients.len(),
            EntireFunction::Lacunary { terms, truncation } => truncation.map_or(terms.len(), |t| t.min(terms.len())),
            EntireFunction::Product { zeros, truncation } => truncation.map_or(zeros.len(), |t| t.min(zeros.len())),
        }
    }

    /// Bound on `|f_full(z) - f_truncated(z)|` contributed by the terms dropped by
    /// `truncation`. Zero for untruncated representations.
    pub fn tail_bound(&self, z: Complex64) -> f64 {
        match self {
            EntireFunction::Lacunary { terms, .. } => {
                let used = self.active_terms();
                let (ln_r, _) = polar_log(z);
                let mags = terms[used..].iter().map(|t| LogValue::new(t.term_log(ln_r, 0.0).ln_mag, 0.0));
                LogValue::sum(mags).modulus()
            }
            EntireFunction::Product { zeros, .. } => {
                let used = self.active_terms();
                let head: Complex64 = zeros[..used].iter().map(|a| 1.0 - z / a).product();
                let tail: f64 = zeros[used..].iter().map(|a| (z / a).norm()).sum();
                head.norm() * tail.exp_m1()
            }
            _ => 0.0,
        }
    }

    fn lacunary_log(&self, z: Complex64, derivative: bool) -> LogValue {
        let EntireFunction::Lacunary { terms, .. } = self else {
            unreachable!("lacunary_log on non-lacunary function")
        };
        let (ln_r, arg) = polar_log(z);
        let used = self.active_terms();
        LogValue::sum(terms[..used].iter().map(|t| {
            if derivative {
                t.derivative_log(ln_r, arg)
            } else {
                t.term_log(ln_r, arg)
            }
        }))
    }
}

fn polar_log(z: Complex64) -> (f64, f64) {
    let r = z.norm();
    if r == 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (r.ln(), z.arg())
    }
}

impl Holomorphic for EntireFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            EntireFunction::Exp => finite(z.exp(), z),
            EntireFunction::Poly { coefficients } => {
                let v = coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
                finite(v, z)
            }
            EntireFunction::Lacunary { .. } => {
                self.lacunary_log(z, false).to_complex().ok_or(Error::Overflow { at: z })
            }
            EntireFunction::Product { zeros, .. } => {
                let used = self.active_terms();
                let v: Complex64 = zeros[..used].iter().map(|a| 1.0 - z / a).product();
                finite(v, z)
            }
        }
    }

    fn deriv(&self, z: Complex64) -> Result<Complex64> {
        match self {
            EntireFunction::Exp => finite(z.exp(), z),
            EntireFunction::Poly { coefficients } => {
                let v = coefficients
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * z + c * k as f64);
                finite(v, z)
            }
            EntireFunction::Lacunary { .. } => self.lacunary_log(z, true).to_complex().ok_or(Error::Overflow { at: z }),
            EntireFunction::Product { zeros, .. } => {
                let zeros = &zeros[..self.active_terms()];
                let factors: Vec<Complex64> = zeros.iter().map(|a| 1.0 - z / a).collect();
                let mut prefix = Vec::with_capacity(factors.len() + 1);
                prefix.push(Complex64::new(1.0, 0.0));
                for f in &factors {
                    prefix.push(prefix[prefix.len() - 1] * f);
                }
                let mut suffix = Complex64::new(1.0, 0.0);
                let mut total = Complex64::new(0.0, 0.0);
                for l in (0..factors.len()).rev() {
                    total += -prefix[l] * suffix / zeros[l];
                    suffix *= factors[l];
                }
                finite(total, z)
            }
        }
    }

    fn eval_log(&self, z: Complex64) -> Result<LogValue> {
        match self {
            EntireFunction::Exp => Ok(LogValue::new(z.re, wrap_phase(z.im))),
            EntireFunction::Lacunary { .. } => Ok(self.lacunary_log(z, false)),
            _ => self.eval(z).map(LogValue::from_complex),
        }
    }

    fn deriv_log(&self, z: Complex64) -> Result<LogValue> {
        match self {
            EntireFunction::Exp => Ok(LogValue::new(z.re, wrap_phase(z.im))),
            EntireFunction::Lacunary { .. } => Ok(self.lacunary_log(z, true)),
            _ => self.deriv(z).map(LogValue::from_complex),
        }
    }
}

/// Evaluate `f` at `z`, falling back to the log domain when the value is
/// outside the `f64` range.
pub fn evaluate<F: Holomorphic + ?Sized>(f: &F, z: Complex64) -> Result<Evaluation> {
    if !z.is_finite() {
        return Err(Error::invalid("evaluation point must be finite"));
    }
    match f.eval(z) {
        Ok(v) => Ok(Evaluation::Plain(v)),
        Err(Error::Overflow { .. }) => {
            let l = f.eval_log(z)?;
            if l.ln_mag.is_nan() {
                return Err(Error::Overflow { at: z });
            }
            Ok(Evaluation::Log(l))
        }
        Err(e) => Err(e),
    }
}

/// The rescaled function `f_n(z) = f(n z) / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledFunction {
    pub base: EntireFunction,
    pub n: u32,
}

pub fn rescale(f: &EntireFunction, n: u32) -> Result<RescaledFunction> {
    if n == 0 {
        return Err(Error::invalid("rescaling index n must be at least 1"));
    }
    Ok(RescaledFunction { base: f.clone(), n })
}

impl RescaledFunction {
    fn scale(&self) -> f64 {
        self.n as f64
    }
}

impl Holomorphic for RescaledFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let n = self.scale();
        Ok(self.base.eval(z * n)? / n)
    }

    fn deriv(&self, z: Complex64) -> Result<Complex64> {
        self.base.deriv(z * self.scale())
    }

    fn eval_log(&self, z: Complex64) -> Result<LogValue> {
        let n = self.scale();
        let v = self.base.eval_log(z * n)?;
        if v.is_zero() {
            return Ok(v);
        }
        Ok(LogValue::new(v.ln_mag - n.ln(), v.phase))
    }

    fn deriv_log(&self, z: Complex64) -> Result<LogValue> {
        self.base.deriv_log(z * self.scale())
    }
}

/// Euclidean disk `D_radius(center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::invalid(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    /// Disk centred at the origin.
    pub fn centered(radius: f64) -> Result<Self> {
        Disk::new(Complex64::new(0.0, 0.0), radius)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    pub fn contains_closed(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }

    /// Equispaced boundary angles `2 pi k / samples`. Doubling `samples`
    /// reproduces every previous angle bit-for-bit.
    pub fn boundary_angles(samples: usize) -> impl Iterator<Item = f64> {
        (0..samples).map(move |k| TAU * k as f64 / samples as f64)
    }

    /// Deterministic sample of the closed disk: the center plus `rings`
    /// concentric circles of `per_ring` points (the outermost on the boundary).
    pub fn closed_samples(&self, rings: usize, per_ring: usize) -> Vec<Complex64> {
        let mut pts = vec![self.center];
        for ring in 1..=rings {
            let rho = self.radius * ring as f64 / rings as f64;
            for k in 0..per_ring {
                let theta = TAU * (k as f64 + 0.5 * (ring % 2) as f64) / per_ring as f64;
                pts.push(self.center + Complex64::from_polar(rho, theta));
            }
        }
        pts
    }
}

/// `(min |f|, max |f|)` over `samples` equispaced points of the circle
/// `∂disk`. Values beyond the `f64` range are reported as `+inf`.
pub fn circle_modulus_range<F: Holomorphic + ?Sized>(f: &F, disk: &Disk, samples: usize) -> Result<(f64, f64)> {
    if samples < 64 {
        return Err(Error::invalid("circle sampling needs at least 64 samples"));
    }
    let (lo, hi) = (0..samples)
        .into_par_iter()
        .map(|k| {
            let z = disk.boundary_point(TAU * k as f64 / samples as f64);
            f.eval_log(z).map(|v| (v.ln_mag, v.ln_mag))
        })
        .try_reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| Ok((a.0.min(b.0), a.1.max(b.1))))?;
    Ok((lo.exp(), hi.exp()))
}
