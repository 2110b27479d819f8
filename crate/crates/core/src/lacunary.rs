//! Lacunary schedules `f(z) = Σ a_j z^{n_j}` whose topological entropy on
//! `D_{r_j}` equals a prescribed profile `h(r_j) = ln n_j`.
//!
//! All magnitudes are kept as base-2 logarithms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{EntireFunction, LacunaryTerm};
use crate::henon_like::{certify_monomial_dominated, certify_polynomial_like_ln};

/// A continuous, strictly increasing, unbounded entropy profile `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EntropyProfile {
    /// `h(R) = ln(1 + R)` on `[0, ∞)`.
    Log1p,
    /// `h(R) = ln R` on `[1, ∞)`.
    Log,
    /// Piecewise-linear through `(R, h)` points, extended past the last point
    /// with the last slope.
    Table { points: Vec<(f64, f64)> },
}

impl EntropyProfile {
    pub fn domain_start(&self) -> f64 {
        match self {
            EntropyProfile::Log1p => 0.0,
            EntropyProfile::Log => 1.0,
            EntropyProfile::Table { points } => points.first().map_or(0.0, |p| p.0),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            EntropyProfile::Log1p => (1.0 + r).ln(),
            EntropyProfile::Log => r.ln(),
            EntropyProfile::Table { points } => {
                let last = points.len() - 1;
                let seg = points.windows(2).position(|p| r <= p[1].0).unwrap_or(last - 1);
                let (x0, y0) = points[seg];
                let (x1, y1) = points[seg + 1];
                y0 + (y1 - y0) * (r - x0) / (x1 - x0)
            }
        }
    }

    /// Checks monotonicity and growth on a sample up to `horizon`.
    pub fn validate(&self, horizon: f64) -> Result<()> {
        if let EntropyProfile::Table { points } = self {
            if points.len() < 2 {
                return Err(Error::invalid("profile table needs at least two points"));
            }
            if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite() || p.0 < 0.0 || p.1 < 0.0) {
                return Err(Error::invalid("profile table points must be finite and nonnegative"));
            }
            if points.windows(2).any(|p| !(p[1].0 > p[0].0 && p[1].1 > p[0].1)) {
                return Err(Error::invalid("profile table must be strictly increasing"));
            }
            if points[0].0 == 0.0 && points[0].1 != 0.0 {
                return Err(Error::invalid("profile must satisfy h(0) = 0"));
            }
        }
        let start = self.domain_start();
        let end = horizon.max(start + 1.0);
        let mut prev = self.eval(start);
        for k in 1..=1024 {
            let x = start + (end - start) * k as f64 / 1024.0;
            let y = self.eval(x);
            if !(y > prev) {
                return Err(Error::invalid(format!("profile is not strictly increasing near R = {x}")));
            }
            prev = y;
        }
        Ok(())
    }

    /// `h^{-1}(y)` by bisection down to adjacent floating-point numbers.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let mut lo = self.domain_start();
        if !(y >= self.eval(lo)) || !y.is_finite() {
            return Err(Error::invalid(format!("{y} is outside the range of the profile")));
        }
        let mut hi = lo.max(1.0);
        while self.eval(hi) < y {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::invalid("profile does not reach the requested value"));
            }
        }
        for _ in 0..2100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = |x: f64| (self.eval(x) - y).abs();
        let best = if err(lo) < err(hi) { lo } else { hi };
        // every float on the plateau of minimal error is an equally good root;
        // prefer the one with the shortest binary expansion
        let e = err(best);
        let mut pick = best;
        for dir in [f64::next_down, f64::next_up] {
            let mut x = best;
            for _ in 0..64 {
                x = dir(x);
                if x < self.domain_start() || err(x) > e {
                    break;
                }
                if x.to_bits().trailing_zeros() > pick.to_bits().trailing_zeros() {
                    pick = x;
                }
            }
        }
        Ok(pick)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTerm {
    pub log2_a: f64,
    pub r: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunarySchedule {
    pub profile: EntropyProfile,
    pub terms: Vec<ScheduleTerm>,
}

impl LacunarySchedule {
    pub fn to_function(&self) -> Result<EntireFunction> {
        EntireFunction::lacunary(
            self.terms.iter().map(|t| LacunaryTerm { log2_magnitude: t.log2_a, phase: 0.0, exponent: t.n }).collect(),
        )
    }

    /// The series with term `skip` removed.
    pub fn remainder(&self, skip: usize) -> Result<EntireFunction> {
        EntireFunction::lacunary(
            self.terms
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, t)| LacunaryTerm { log2_magnitude: t.log2_a, phase: 0.0, exponent: t.n })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `h(r_j) = ln n_j`.
    ProfileMatch,
    /// `Σ_{i≠j} a_i r_j^{n_i} < a_j r_j^{n_j} / 2^{n_j}`.
    TailBelowLeading,
    /// `Σ_{i≠j} a_i r_j^{n_i} < r_j / 2^{n_j}` (reported only).
    TailBelowRadius,
    /// `a_j r_j^{n_j} > 2 r_j`.
    LeadingAboveRadius,
    /// `a_j <= 2^{-(j+1)j/2}`.
    CoefficientDecay,
    /// `a_{j+1} r_j^{n_{j+1}} <= a_j r_j^{n_j} / 2^{n_j+1}`.
    NextTermBelow,
    /// `a_j r_{j+1}^{n_j} <= a_{j+1} r_{j+1}^{n_{j+1}} / 2^{n_{j+1}+1}`.
    PreviousTermBelow,
    /// `r_j`, `n_j` strictly increase and `a_j` strictly decreases.
    Monotone,
    /// The pair `(j, j+1)` satisfies `(r_{j+1}/r_j)^{n_{j+1}-n_j} >= 2^{n_j+n_{j+1}+2}`.
    Ratio,
}

impl Inequality {
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            Inequality::TailBelowLeading
                | Inequality::TailBelowRadius
                | Inequality::LeadingAboveRadius
                | Inequality::Monotone
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub inequality: Inequality,
    /// 1-based index of the (first) term involved.
    pub term: usize,
    /// `log2(rhs) - log2(lhs)`; for `Zero`, minus the absolute error.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub checks: Vec<InequalityCheck>,
    /// Outcome over every check except the informational `TailBelowRadius`.
    pub pass: bool,
}

impl ScheduleReport {
    pub fn of(&self, inequality: Inequality) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(move |c| c.inequality == inequality)
    }

    pub fn first_failure(&self) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| !c.pass && c.inequality != Inequality::TailBelowRadius)
    }
}

const ZERO_TOL: f64 = 1e-9;

fn log2_sum(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp2()).sum::<f64>().log2()
}

fn check(inequality: Inequality, term: usize, lhs: f64, rhs: f64) -> InequalityCheck {
    let slack = rhs - lhs;
    // non-strict inequalities tolerate rounding of the log2 arithmetic
    let tol = 1e-12 * lhs.abs().max(rhs.abs()).max(1.0);
    let pass = if inequality.is_strict() { slack > 0.0 } else { slack >= -tol };
    InequalityCheck { inequality, term, slack, pass }
}

/// Checks every schedule inequality in the log domain.
pub fn verify_schedule(s: &LacunarySchedule) -> ScheduleReport {
    let t = &s.terms;
    let per_term: Vec<Vec<InequalityCheck>> = (0..t.len())
        .into_par_iter()
        .map(|j| {
            let tj = t[j];
            let idx = j + 1;
            let l2r = tj.r.log2();
            let n = tj.n as f64;
            let mut out = Vec::new();
            let err = (s.profile.eval(tj.r) - n.ln()).abs();
            out.push(InequalityCheck {
                inequality: Inequality::ProfileMatch,
                term: idx,
                slack: ZERO_TOL - err,
                pass: err <= ZERO_TOL,
            });
            let others =
                log2_sum(t.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, ti)| ti.log2_a + ti.n as f64 * l2r));
            out.push(check(Inequality::TailBelowLeading, idx, others, tj.log2_a + n * l2r - n));
            out.push(check(Inequality::TailBelowRadius, idx, others, l2r - n));
            out.push(check(Inequality::LeadingAboveRadius, idx, 1.0 + l2r, tj.log2_a + n * l2r));
            out.push(check(Inequality::CoefficientDecay, idx, tj.log2_a, -(((idx + 1) * idx) as f64) / 2.0));
            if let Some(next) = t.get(j + 1) {
                let nn = next.n as f64;
                let l2r_next = next.r.log2();
                out.push(check(
                    Inequality::NextTermBelow,
                    idx,
                    next.log2_a + nn * l2r,
                    tj.log2_a + n * l2r - (n + 1.0),
                ));
                out.push(check(
                    Inequality::PreviousTermBelow,
                    idx,
                    tj.log2_a + n * l2r_next,
                    next.log2_a + nn * l2r_next - (nn + 1.0),
                ));
                out.push(check(Inequality::Ratio, idx, n + nn + 2.0, (nn - n) * (l2r_next - l2r)));
                let mono = next.r > tj.r && next.n > tj.n && next.log2_a < tj.log2_a;
                out.push(InequalityCheck {
                    inequality: Inequality::Monotone,
                    term: idx,
                    slack: if mono { 1.0 } else { -1.0 },
                    pass: mono,
                });
            }
            out
        })
        .collect();
    let checks: Vec<InequalityCheck> = per_term.into_iter().flatten().collect();
    let pass = checks.iter().all(|c| c.pass || c.inequality == Inequality::TailBelowRadius);
    ScheduleReport { checks, pass }
}

/// `log2 a_{j+1} = log2 a_j + (n_j - n_{j+1}) log2 r_j - (n_j + 1)`.
pub fn next_log2_coefficient(prev: &ScheduleTerm, n_next: u64) -> f64 {
    prev.log2_a + (prev.n as f64 - n_next as f64) * prev.r.log2() - (prev.n as f64 + 1.0)
}

/// Natural-log form of the ratio inequality for consecutive terms:
/// `(n_{j+1} - n_j) ln(r_{j+1}/r_j) - (n_j + n_{j+1} + 2) ln 2`.
pub fn ratio_slack(r_j: f64, n_j: u64, r_next: f64, n_next: u64) -> f64 {
    (n_next as f64 - n_j as f64) * (r_next / r_j).ln() - (n_j + n_next + 2) as f64 * std::f64::consts::LN_2
}

pub const DEFAULT_N_CAP: u64 = 100_000_000;

/// Builds `terms` schedule terms for `profile`, each with the smallest
/// admissible exponent (searched up to `n_cap`).
pub fn build_schedule(profile: &EntropyProfile, terms: usize, n_cap: u64) -> Result<LacunarySchedule> {
    if terms == 0 {
        return Err(Error::invalid("a schedule needs at least one term"));
    }
    profile.validate(1e6)?;
    let mut s = LacunarySchedule { profile: profile.clone(), terms: Vec::with_capacity(terms) };
    let mut last_failure = Inequality::LeadingAboveRadius;

    let mut n = 2u64;
    loop {
        if n > n_cap {
            return Err(Error::invalid(format!("no first term with r > 2 up to n = {n_cap} ({last_failure:?} fails)")));
        }
        let r = profile.inverse((n as f64).ln())?;
        // r is only known to the bisection tolerance
        if r > 2.0 * (1.0 + 1e-12) {
            s.terms.push(ScheduleTerm { log2_a: -1.0, r, n });
            match verify_schedule(&s).first_failure() {
                None => break,
                Some(c) => last_failure = c.inequality,
            }
            s.terms.pop();
        }
        n += 1;
    }

    while s.terms.len() < terms {
        let prev = *s.terms.last().expect("nonempty");
        let mut n = prev.n + 1;
        loop {
            if n > n_cap {
                return Err(Error::invalid(format!(
                    "no admissible exponent for term {} up to n = {n_cap} ({last_failure:?} fails)",
                    s.terms.len() + 1
                )));
            }
            let r = profile.inverse((n as f64).ln())?;
            if ratio_slack(prev.r, prev.n, r, n) >= 0.0 {
                s.terms.push(ScheduleTerm { log2_a: next_log2_coefficient(&prev, n), r, n });
                match verify_schedule(&s).first_failure() {
                    None => break,
                    Some(c) => last_failure = c.inequality,
                }
                s.terms.pop();
            } else {
                last_failure = Inequality::Ratio;
            }
            n += 1;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificationStatus {
    Certified { degree: u64, entropy_bound: f64, log_margin: f64 },
    Failed { reason: String },
    LogDomainVerifiedOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub term: usize,
    pub r: f64,
    pub n: u64,
    pub log_n: f64,
    pub h_r: f64,
    pub gap: f64,
    pub polynomial_like: CertificationStatus,
    pub monomial_dominated: CertificationStatus,
}

pub const DEFAULT_CERTIFY_CAP: u64 = 64;

fn status(res: Result<crate::henon_like::DegreeCertificate>) -> CertificationStatus {
    match res {
        Ok(c) => CertificationStatus::Certified {
            degree: c.degree,
            entropy_bound: c.entropy_bound,
            log_margin: c.margins.iter().map(|m| m.log_ratio).fold(f64::INFINITY, f64::min),
        },
        Err(e) => CertificationStatus::Failed { reason: e.to_string() },
    }
}

/// Per-term entropy comparison, with polynomial-like and monomial-dominated
/// certificates for terms whose exponent is at most `certify_cap`.
pub fn entropy_growth_report(
    s: &LacunarySchedule,
    profile: &EntropyProfile,
    delta: Complex64,
    certify_cap: u64,
) -> Result<Vec<GrowthRow>> {
    let f = s.to_function()?;
    s.terms
        .par_iter()
        .enumerate()
        .map(|(j, t)| {
            let log_n = (t.n as f64).ln();
            let h_r = profile.eval(t.r);
            let (poly, mono) = if t.n <= certify_cap && t.n >= 2 {
                let g = s.remainder(j)?;
                let samples = (16 * t.n as usize).max(1024);
                (
                    status(certify_polynomial_like_ln(t.log2_a * std::f64::consts::LN_2, t.n, &g, t.r, samples)),
                    status(certify_monomial_dominated(&f, delta, t.r, samples)),
                )
            } else {
                (CertificationStatus::LogDomainVerifiedOnly, CertificationStatus::LogDomainVerifiedOnly)
            };
            Ok(GrowthRow {
                term: j + 1,
                r: t.r,
                n: t.n,
                log_n,
                h_r,
                gap: (log_n - h_r).abs(),
                polynomial_like: poly,
                monomial_dominated: mono,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_inverse() {
        let p = EntropyProfile::Log1p;
        assert_eq!(p.inverse(4f64.ln()).unwrap(), 3.0);
        let q = EntropyProfile::Log;
        assert!((q.inverse(2.0).unwrap() - 2f64.exp()).abs() < 1e-12);
        let t = EntropyProfile::Table { points: vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)] };
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(5.0), 4.0);
        assert!((t.inverse(2.5).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_profile_rejected() {
        let t = EntropyProfile::Table { points: vec![(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)] };
        assert!(build_schedule(&t, 1, 1000).is_err());
    }

    #[test]
    fn first_two_terms() {
        let s = build_schedule(&EntropyProfile::Log1p, 2, DEFAULT_N_CAP).unwrap();
        assert_eq!(s.terms[0], ScheduleTerm { log2_a: -1.0, r: 3.0, n: 4 });
        assert_eq!(s.terms[1].n, 14);
        assert!((s.terms[1].r - 13.0).abs() < 1e-12);
        let expected = (0.5f64 * 3f64.powi(-10) / 32.0).log2();
        assert!((s.terms[1].log2_a - expected).abs() < 1e-12);
        assert!(verify_schedule(&s).pass);
    }

    #[test]
    fn inflated_coefficient_breaks_tail_bound() {
        let mut s = build_schedule(&EntropyProfile::Log1p, 2, DEFAULT_N_CAP).unwrap();
        s.terms[1].log2_a += 1e6f64.log2();
        let rep = verify_schedule(&s);
        assert!(!rep.pass);
        assert!(rep.of(Inequality::TailBelowLeading).any(|c| c.term == 1 && !c.pass));
    }

    #[test]
    fn empty_and_single() {
        let empty = LacunarySchedule { profile: EntropyProfile::Log1p, terms: vec![] };
        let rep = verify_schedule(&empty);
        assert!(rep.checks.is_empty() && rep.pass);
        let one = build_schedule(&EntropyProfile::Log1p, 1, DEFAULT_N_CAP).unwrap();
        let rep = verify_schedule(&one);
        assert!(rep.pass);
        assert_eq!(rep.of(Inequality::TailBelowLeading).next().unwrap().slack, f64::INFINITY);
    }
}
