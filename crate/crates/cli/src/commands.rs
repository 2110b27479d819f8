use anyhow::{bail, Result};
use henon_core::contour::{quasinormality_probe, ProbeGrid};
use henon_core::error::Error;
use henon_core::function::{Disk, EntireFunction, Holomorphic};
use henon_core::henon_like::{
    certify_monomial_dominated, certify_polynomial_like, check_henon_like, degree_line_sweep, Bidisk, CertificateKind,
    HenonMap, Point2,
};
use henon_core::lacunary::{build_schedule, entropy_growth_report, verify_schedule, CertificationStatus};
use henon_core::periodic::{
    newton_sweep, periodic_itinerary_orbit, seed_grid, ItineraryOptions, NewtonOptions, PeriodicOrbit,
};
use henon_core::symbolic::{
    build_transition_table, count_admissible_words, separated_set_estimate, subshift_entropy_estimate, survivor_clouds,
    DiskLayout, TransitionStructure,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{CertifyMode, RunConfig};
use crate::output::{Outcome, Status, Table};
use crate::svg::Plot;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn num(x: f64) -> String {
    x.to_string()
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Success
    } else {
        Status::HonestFailure
    }
}

/// Splits `f = a z^n + g` at the top nonzero coefficient of a polynomial.
fn split_leading(f: &EntireFunction) -> Result<(Complex64, u64, EntireFunction)> {
    let EntireFunction::Poly { coefficients } = f else {
        bail!("polynomial-like mode needs a polynomial function");
    };
    let Some(n) = coefficients.iter().rposition(|c| c.norm() > 0.0) else {
        bail!("polynomial is identically zero");
    };
    let mut rest = coefficients[..n].to_vec();
    if rest.is_empty() {
        rest.push(Complex64::new(0.0, 0.0));
    }
    Ok((coefficients[n], n as u64, EntireFunction::poly(rest)))
}

fn circle_plot<F: Holomorphic>(f: &F, r: f64, threshold: f64) -> String {
    let samples = 256;
    let curve: Vec<(f64, f64)> = Disk::boundary_angles(samples)
        .map(|t| {
            let z = Complex64::from_polar(r, t);
            (t, f.eval_log(z).map(|v| v.ln_mag).unwrap_or(f64::NAN))
        })
        .collect();
    let lo = curve.iter().map(|p| p.1).chain([threshold.ln()]).filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    let hi =
        curve.iter().map(|p| p.1).chain([threshold.ln()]).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-3);
    let mut plot = Plot::new((0.0, std::f64::consts::TAU), (lo - 0.1 * span, hi + 0.1 * span));
    plot.polyline(&curve, PALETTE[0]);
    plot.polyline(&[(0.0, threshold.ln()), (std::f64::consts::TAU, threshold.ln())], PALETTE[1]);
    plot.finish(&format!("ln|f| on |z| = {r} against ln((|delta|+1) r)"), "theta", "ln|f|")
}

pub fn certify(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let o = &cfg.certify;
    let map = HenonMap::new(f.clone(), cfg.delta)?;
    let bidisk = Bidisk::centered(o.radius, o.radius)?;
    let attempt: std::result::Result<(u64, Value), Error> = match o.mode {
        CertifyMode::MonomialDominated => {
            certify_monomial_dominated(&f, cfg.delta, o.radius, o.samples).map(|c| (c.degree, json!(c)))
        }
        CertifyMode::PolynomialLike => {
            let (a, n, g) = split_leading(&f)?;
            certify_polynomial_like(a, n, &g, o.radius, o.samples).map(|c| (c.degree, json!(c)))
        }
        CertifyMode::HenonLike => match check_henon_like(&map, &bidisk, o.samples) {
            Ok(rep) if rep.pass => degree_line_sweep(&map, &bidisk, 1).and_then(|s| {
                let d = s.degrees[0];
                if d < 1 {
                    return Err(Error::CertificateFailed {
                        condition: "positive degree".into(),
                        witness: format!("line w = {}", s.lines[0]),
                        slack: d as f64,
                    });
                }
                Ok((
                    d as u64,
                    json!({
                        "degree": d,
                        "kind": CertificateKind::HenonLike,
                        "entropy_bound": (d as f64).ln(),
                        "conditions": rep.conditions,
                    }),
                ))
            }),
            Ok(rep) => {
                let c = rep.failed_condition().expect("a failed report names a condition");
                Err(Error::CertificateFailed {
                    condition: c.condition.clone(),
                    witness: format!("{:?}", c.witness),
                    slack: c.slack,
                })
            }
            Err(e) => Err(e),
        },
    };
    let (degree, certificate, failure) = match attempt {
        Ok((d, v)) => (Some(d), v, None),
        Err(e) if e.is_honest_failure() => (None, Value::Null, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut csv = None;
    let sweep = match degree {
        Some(_) => {
            let s = degree_line_sweep(&map, &bidisk, o.lines)?;
            let mut t = Table::new(&["line_re", "line_im", "degree"]);
            for (w, d) in s.lines.iter().zip(&s.degrees) {
                t.push(vec![num(w.re), num(w.im), d.to_string()]);
            }
            csv = Some(t);
            Some(s)
        }
        None => None,
    };
    let consistent = match (&sweep, degree) {
        (Some(s), Some(d)) => s.constant && s.degrees.iter().all(|&x| x == d as i64),
        _ => false,
    };
    let summary = match (degree, &failure) {
        (Some(d), _) => format!(
            "degree {d}, entropy bound ln {d} = {:.6}; line sweep {}",
            (d as f64).ln(),
            if consistent { "constant" } else { "NOT constant" }
        ),
        (None, Some(msg)) => format!("not certified: {msg}"),
        (None, None) => "not certified".into(),
    };
    let svg = match o.mode {
        CertifyMode::MonomialDominated => Some(circle_plot(&f, o.radius, (cfg.delta.norm() + 1.0) * o.radius)),
        _ => None,
    };
    Ok(Outcome {
        status: status_of(consistent),
        summary,
        result: json!({
            "mode": o.mode,
            "certificate": certificate,
            "failure": failure,
            "line_sweep": sweep.map(|s| json!({"lines": s.lines, "degrees": s.degrees, "constant": s.constant})),
        }),
        csv,
        svg,
    })
}

pub fn degree(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let o = &cfg.certify;
    let map = HenonMap::new(f, cfg.delta)?;
    let bidisk = Bidisk::centered(o.radius, o.radius)?;
    let s = match degree_line_sweep(&map, &bidisk, o.lines) {
        Ok(s) => s,
        Err(e) if e.is_honest_failure() => {
            return Ok(Outcome {
                status: Status::HonestFailure,
                summary: format!("degree sweep inconclusive: {e}"),
                result: json!({"failure": e.to_string()}),
                csv: None,
                svg: None,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(&["line_re", "line_im", "degree"]);
    for (w, d) in s.lines.iter().zip(&s.degrees) {
        t.push(vec![num(w.re), num(w.im), d.to_string()]);
    }
    let summary = if s.constant {
        format!("degree {} on all {} lines", s.degrees[0], s.lines.len())
    } else {
        format!("degree depends on the line: {:?}", s.degrees)
    };
    Ok(Outcome {
        status: status_of(s.constant),
        summary,
        result: json!({
            "degree": if s.constant { Some(s.degrees[0]) } else { None },
            "lines": s.lines,
            "degrees": s.degrees,
            "constant": s.constant,
        }),
        csv: Some(t),
        svg: None,
    })
}

pub fn probe(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let o = &cfg.probe;
    let grid = ProbeGrid::square(o.half_width, o.step);
    let rep = quasinormality_probe(&f, &o.n_values, grid, o.epsilon, o.proximity)?;
    let max_re = rep.flagged_points.iter().map(|p| p.re.abs()).fold(0.0, f64::max);
    let mut t = Table::new(&["x_re", "x_im", "neighbor_re", "neighbor_im", "n", "distance"]);
    for w in &rep.witnesses {
        t.push(vec![
            num(w.point.re),
            num(w.point.im),
            num(w.neighbor.re),
            num(w.neighbor.im),
            w.n.to_string(),
            num(w.distance),
        ]);
    }
    let mut plot = Plot::new((-o.half_width, o.half_width), (-o.half_width, o.half_width));
    for p in &rep.flagged_points {
        plot.dot(p.re, p.im, 1.5, PALETTE[1]);
    }
    let summary = format!("{} flagged of the grid points; max |Re x| over flags = {max_re}", rep.flagged_points.len());
    Ok(Outcome {
        status: Status::Success,
        summary,
        result: json!({"flag_count": rep.flagged_points.len(), "max_abs_re": max_re, "report": rep}),
        csv: Some(t),
        svg: Some(plot.finish("flagged grid points", "Re x", "Im x")),
    })
}

fn layout_plot(layout: &DiskLayout) -> Plot {
    let pts = layout.centers.iter().map(|c| (c.re, c.im));
    let mut plot = Plot::fitted(pts, layout.big_r);
    for (i, c) in layout.centers.iter().enumerate() {
        plot.circle(c.re, c.im, layout.r, "black", "none");
        plot.label(c.re + layout.r, c.im, &format!("x{i}"));
    }
    plot
}

fn build_structure(cfg: &RunConfig, f: &EntireFunction) -> Result<TransitionStructure> {
    let layout = cfg.geometry.layout();
    let o = &cfg.transition;
    Ok(build_transition_table(f, cfg.delta, &layout, o.n_min..=o.n_max, o.required)?)
}

fn structure_json(s: &TransitionStructure) -> Value {
    let islands: Vec<Value> = s
        .islands
        .iter()
        .map(|e| json!({"i": e.i, "l": e.l, "j": e.j, "degree": e.island.degree, "center_preimage": e.island.center_preimage}))
        .collect();
    json!({
        "layout": s.layout,
        "n": s.n,
        "required": s.required,
        "rich": s.rich,
        "min_size": s.table.min_size(),
        "table": s.table,
        "inconclusive": s.inconclusive,
        "islands": islands,
    })
}

pub fn transition(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let s = build_structure(cfg, &f)?;
    let h = subshift_entropy_estimate(&s.table);
    let k = s.k();
    let mut t = Table::new(&["i", "l", "size", "J"]);
    for i in 0..k {
        for l in 0..k {
            let js = s.table.get(i, l);
            let list: Vec<String> = js.iter().map(|j| j.to_string()).collect();
            t.push(vec![i.to_string(), l.to_string(), js.len().to_string(), list.join(" ")]);
        }
    }
    let mut plot = layout_plot(&s.layout);
    for e in &s.islands {
        let pts: Vec<(f64, f64)> =
            e.island.boundary.iter().chain(e.island.boundary.first()).map(|z| (z.re, z.im)).collect();
        plot.polyline(&pts, PALETTE[e.j % PALETTE.len()]);
    }
    let summary = format!(
        "n = {}, min #J = {} (required {}), {}; subshift entropy {:.9}",
        s.n,
        s.table.min_size(),
        s.required,
        if s.rich { "rich" } else { "NOT rich" },
        h.value
    );
    Ok(Outcome {
        status: status_of(s.rich),
        summary,
        result: json!({
            "structure": structure_json(&s),
            "entropy": h,
            "lower_bounds": {
                "ln_min_size": (s.table.min_size() as f64).ln(),
                "ln_k_minus_2": (k as f64 - 2.0).ln(),
            },
        }),
        csv: Some(t),
        svg: Some(plot.finish("disk layout and univalent islands", "Re z", "Im z")),
    })
}

/// Every `step`-th element so that at most `max` remain.
fn thin<T: Copy>(v: &[T], max: usize) -> Vec<T> {
    if v.len() <= max || max == 0 {
        return v.to_vec();
    }
    let step = v.len().div_ceil(max);
    v.iter().step_by(step).copied().collect()
}

pub fn entropy(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let o = &cfg.entropy;
    let s = build_structure(cfg, &f)?;
    let k = s.k() as u128;
    let h = subshift_entropy_estimate(&s.table);
    let words: Vec<Value> = (0..=o.max_word_length)
        .map(|m| {
            let count = count_admissible_words(&s.table, m);
            let bound = if m >= 2 && k >= 2 {
                (k - 2).checked_pow(m as u32 - 2).and_then(|p| p.checked_mul(k * k))
            } else {
                None
            };
            json!({"m": m, "count": count.to_string(), "rich_bound": bound.map(|b| b.to_string())})
        })
        .collect();
    let map = HenonMap::rescaled(&f, cfg.delta, s.n)?;
    let clouds = survivor_clouds(&map, &s, o.depth, o.grid_step)?;
    let deepest = clouds.iter().rev().find(|c| !c.points.is_empty()).unwrap_or(&clouds[0]);
    let seeds: Vec<Point2> = thin(&deepest.points, o.max_seeds);
    let epsilon = o.epsilon.unwrap_or(s.layout.min_gap() / 2.0);
    let steps = deepest.depth.max(1);
    let separated = if seeds.is_empty() { None } else { Some(separated_set_estimate(&map, &seeds, steps, epsilon)?) };
    let mut t = Table::new(&["depth", "z_re", "z_im", "w_re", "w_im"]);
    for p in &deepest.points {
        t.push(vec![deepest.depth.to_string(), num(p[0].re), num(p[0].im), num(p[1].re), num(p[1].im)]);
    }
    let mut plot = layout_plot(&s.layout);
    for p in &deepest.points {
        plot.dot(p[0].re, p[0].im, 1.0, PALETTE[0]);
    }
    let cloud_sizes: Vec<Value> =
        clouds.iter().map(|c| json!({"depth": c.depth, "points": c.points.len(), "grid_size": c.grid_size})).collect();
    let summary = format!(
        "n = {}, {}; subshift entropy {:.9}; survivors at depth {}: {}; separated set K = {}",
        s.n,
        if s.rich { "rich" } else { "NOT rich" },
        h.value,
        deepest.depth,
        deepest.points.len(),
        separated.as_ref().map(|e| e.k).unwrap_or(0)
    );
    Ok(Outcome {
        status: status_of(s.rich),
        summary,
        result: json!({
            "structure": structure_json(&s),
            "entropy": h,
            "word_counts": words,
            "survivors": cloud_sizes,
            "cloud_depth": deepest.depth,
            "separated": separated.map(|e| json!({"n_steps": e.n_steps, "epsilon": e.epsilon, "K": e.k, "rate": e.rate})),
        }),
        csv: Some(t),
        svg: Some(plot.finish("disk layout and survivor cloud (z projection)", "Re z", "Im z")),
    })
}

fn status_label(s: &CertificationStatus) -> String {
    match s {
        CertificationStatus::Certified { degree, .. } => format!("certified degree {degree}"),
        CertificationStatus::Failed { reason } => format!("failed: {reason}"),
        CertificationStatus::LogDomainVerifiedOnly => "log-domain only".into(),
    }
}

pub fn lacunary(cfg: &RunConfig) -> Result<Outcome> {
    let o = &cfg.lacunary;
    let s = build_schedule(&o.profile, o.terms, o.n_cap)?;
    let report = verify_schedule(&s);
    let rows = entropy_growth_report(&s, &o.profile, cfg.delta, o.certify_cap)?;
    let mut t =
        Table::new(&["term", "r", "n", "log2_a", "log_n", "h_r", "gap", "polynomial_like", "monomial_dominated"]);
    for (row, term) in rows.iter().zip(&s.terms) {
        t.push(vec![
            row.term.to_string(),
            num(row.r),
            row.n.to_string(),
            num(term.log2_a),
            num(row.log_n),
            num(row.h_r),
            num(row.gap),
            status_label(&row.polynomial_like),
            status_label(&row.monomial_dominated),
        ]);
    }
    let r_max = s.terms.last().map(|t| t.r).unwrap_or(1.0) * 1.1;
    let r0 = o.profile.domain_start();
    let curve: Vec<(f64, f64)> = (0..=200)
        .map(|q| {
            let r = r0 + (r_max - r0) * q as f64 / 200.0;
            (r, o.profile.eval(r))
        })
        .collect();
    let y_max = curve.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut plot = Plot::new((r0, r_max), (0.0, y_max * 1.05));
    plot.polyline(&curve, PALETTE[0]);
    for row in &rows {
        plot.dot(row.r, row.log_n, 3.0, PALETTE[1]);
    }
    let failure = report.first_failure().copied();
    let summary = match &failure {
        None => format!(
            "{} terms, n = {:?}; all inequalities hold",
            s.terms.len(),
            s.terms.iter().map(|t| t.n).collect::<Vec<_>>()
        ),
        Some(c) => format!("{:?} fails at term {} (slack {:e})", c.inequality, c.term, c.slack),
    };
    Ok(Outcome {
        status: status_of(report.pass),
        summary,
        result: json!({"schedule": s, "verification": report, "growth": rows}),
        csv: Some(t),
        svg: Some(plot.finish("ln n_j against h(r_j)", "r", "entropy")),
    })
}

fn orbit_table(orbits: &[PeriodicOrbit]) -> Table {
    let mut t = Table::new(&[
        "orbit",
        "index",
        "z_re",
        "z_im",
        "w_re",
        "w_im",
        "residual",
        "abs_lambda_u",
        "abs_lambda_s",
        "minimal",
        "saddle",
        "cone_mu",
    ]);
    for (q, o) in orbits.iter().enumerate() {
        for (idx, p) in o.points.iter().enumerate() {
            t.push(vec![
                q.to_string(),
                idx.to_string(),
                num(p[0].re),
                num(p[0].im),
                num(p[1].re),
                num(p[1].im),
                num(o.residual),
                num(o.multipliers.unstable.norm()),
                num(o.multipliers.stable.norm()),
                o.minimal.to_string(),
                o.saddle.to_string(),
                o.cone.as_ref().map(|c| num(c.mu)).unwrap_or_default(),
            ]);
        }
    }
    t
}

fn orbit_plot(orbits: &[PeriodicOrbit], layout: Option<&DiskLayout>) -> String {
    let mut plot = match layout {
        Some(l) => layout_plot(l),
        None => Plot::fitted(orbits.iter().flat_map(|o| o.points.iter().map(|p| (p[0].re, p[0].im))), 0.5),
    };
    for (q, o) in orbits.iter().enumerate() {
        let color = PALETTE[q % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = o.points.iter().map(|p| (p[0].re, p[0].im)).collect();
        pts.push(pts[0]);
        plot.polyline(&pts, color);
        for p in &o.points {
            plot.dot(p[0].re, p[0].im, 3.0, color);
        }
    }
    plot.finish("periodic cycles (z projection)", "Re z", "Im z")
}

pub fn periodic(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.function.load()?;
    let o = &cfg.periodic;
    let newton = NewtonOptions { residual_tol: cfg.tolerances.residual, ..NewtonOptions::default() };
    if let Some(itinerary) = &o.itinerary {
        let s = build_structure(cfg, &f)?;
        let map = HenonMap::rescaled(&f, cfg.delta, s.n)?;
        let opts = ItineraryOptions { tolerance: cfg.tolerances.graph, newton, ..ItineraryOptions::default() };
        return match periodic_itinerary_orbit(&map, &s, itinerary, &opts) {
            Ok(orbit) => {
                let cone_pass = orbit.cone.as_ref().is_some_and(|c| c.pass);
                let ok = orbit.minimal && orbit.saddle && cone_pass;
                let summary = format!(
                    "period {} at n = {}: residual {:e}, |lambda_u| = {:.6}, |lambda_s| = {:.6e}, cone {}",
                    orbit.period,
                    s.n,
                    orbit.residual,
                    orbit.multipliers.unstable.norm(),
                    orbit.multipliers.stable.norm(),
                    if cone_pass { "pass" } else { "fail" }
                );
                let orbits = vec![orbit];
                Ok(Outcome {
                    status: status_of(ok),
                    summary,
                    result: json!({"mode": "itinerary", "n": s.n, "rich": s.rich, "orbits": orbits}),
                    csv: Some(orbit_table(&orbits)),
                    svg: Some(orbit_plot(&orbits, Some(&s.layout))),
                })
            }
            Err(e @ (Error::NoConvergence(_) | Error::Singular(_))) => Ok(Outcome {
                status: Status::HonestFailure,
                summary: format!("no orbit: {e}"),
                result: json!({"mode": "itinerary", "n": s.n, "failure": e.to_string()}),
                csv: None,
                svg: None,
            }),
            Err(e) => Err(e.into()),
        };
    }
    let map = HenonMap::rescaled(&f, cfg.delta, o.n)?;
    let g = &o.seed_grid;
    let seeds = seed_grid(g.lo, g.hi, g.per_axis);
    let sweep = newton_sweep(&map, o.period, &seeds, &newton)?;
    let good = sweep.orbits.iter().filter(|x| x.minimal && x.saddle).count();
    let summary = format!(
        "{} seeds, {} converged, {} distinct cycles, {} minimal period-{} saddles",
        sweep.seeds,
        sweep.converged,
        sweep.orbits.len(),
        good,
        o.period
    );
    Ok(Outcome {
        status: status_of(good > 0),
        summary,
        result: json!({
            "mode": "sweep",
            "seeds": sweep.seeds,
            "converged": sweep.converged,
            "minimal_saddles": good,
            "orbits": sweep.orbits,
        }),
        csv: Some(orbit_table(&sweep.orbits)),
        svg: Some(orbit_plot(&sweep.orbits, None)),
    })
}
