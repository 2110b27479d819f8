mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use config::{CertifyMode, FunctionSource, RunConfig};
use output::Outcome;

/// Hénon-map toolkit: certificates, horseshoes, entropy, lacunary
/// schedules and periodic orbits.
#[derive(Parser, Debug)]
#[command(name = "henon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Monomial-dominated, polynomial-like or Hénon-like certificate.
    Certify,
    /// Horizontal-line degree over several lines.
    Degree,
    /// Quasi-normality probe of the rescaled family.
    Probe,
    /// Transition table search and richness verdict.
    Transition,
    /// Subshift entropy, word counts, survivor clouds, separated sets.
    Entropy,
    /// Build and verify a lacunary schedule.
    Lacunary,
    /// Itinerary orbit or Newton sweep for periodic cycles.
    Periodic,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Degree => "degree",
            Command::Probe => "probe",
            Command::Transition => "transition",
            Command::Entropy => "entropy",
            Command::Lacunary => "lacunary",
            Command::Periodic => "periodic",
        }
    }
}

#[derive(Args, Debug)]
struct Overrides {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Function as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    function: Option<String>,
    /// Jacobian δ as `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Certificate radius (certify, degree) or inner disk radius.
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Outer disk radius.
    #[arg(long = "R", global = true)]
    big_r: Option<f64>,
    /// Number of disks along the imaginary axis.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Largest rescaling index searched.
    #[arg(long, global = true)]
    n_max: Option<u32>,
    /// Probe epsilon, or the separation threshold for `entropy`.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Survivor depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Seeds per axis of the periodic seed grid.
    #[arg(long, global = true)]
    seed_grid: Option<usize>,
    /// Period for the Newton sweep.
    #[arg(long, global = true)]
    period: Option<usize>,
    /// Comma-separated itinerary, e.g. `1,2,3`.
    #[arg(long, global = true)]
    itinerary: Option<String>,
    /// Certificate mode.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<CertifyMode>,
    /// Number of lacunary terms.
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long, global = true)]
    emit_svg: bool,
    /// Skip the CSV table.
    #[arg(long, global = true)]
    no_csv: bool,
}

fn parse_mode(s: &str) -> std::result::Result<CertifyMode, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown mode `{s}` (monomial-dominated, polynomial-like, henon-like)"))
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let re = parts[0].parse::<f64>().with_context(|| format!("bad number `{}`", parts[0]))?;
    let im = match parts.len() {
        1 => 0.0,
        2 => parts[1].parse::<f64>().with_context(|| format!("bad number `{}`", parts[1]))?,
        _ => bail!("expected `re` or `re,im`, got `{s}`"),
    };
    Ok(Complex64::new(re, im))
}

fn resolve(cmd: Command, o: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = &o.function {
        cfg.function = FunctionSource::from_arg(f)?;
    }
    if let Some(d) = &o.delta {
        cfg.delta = parse_complex(d)?;
    }
    if let Some(r) = o.r {
        match cmd {
            Command::Certify | Command::Degree => cfg.certify.radius = r,
            _ => cfg.geometry.r = r,
        }
    }
    if let Some(r) = o.big_r {
        cfg.geometry.big_r = r;
    }
    if let Some(k) = o.k {
        cfg.geometry.k = k;
        cfg.geometry.centers = None;
    }
    if let Some(n) = o.n_max {
        cfg.transition.n_max = n;
    }
    if let Some(e) = o.epsilon {
        match cmd {
            Command::Entropy => cfg.entropy.epsilon = Some(e),
            _ => cfg.probe.epsilon = e,
        }
    }
    if let Some(d) = o.depth {
        cfg.entropy.depth = d;
    }
    if let Some(s) = o.seed_grid {
        cfg.periodic.seed_grid.per_axis = s;
    }
    if let Some(p) = o.period {
        cfg.periodic.period = p;
    }
    if let Some(it) = &o.itinerary {
        let symbols = it
            .split(',')
            .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad itinerary symbol `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        cfg.periodic.itinerary = Some(symbols);
    }
    if let Some(m) = o.mode {
        cfg.certify.mode = m;
    }
    if let Some(t) = o.terms {
        cfg.lacunary.terms = t;
    }
    if let Some(out) = &o.out {
        cfg.out = out.clone();
    }
    if o.emit_svg {
        cfg.emit_svg = true;
    }
    if o.no_csv {
        cfg.emit_csv = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8> {
    let cmd = cli.command;
    let cfg = resolve(cmd, &cli.overrides)?;
    let started = output::unix_now();
    let clock = Instant::now();
    let outcome: Outcome = match cmd {
        Command::Certify => commands::certify(&cfg)?,
        Command::Degree => commands::degree(&cfg)?,
        Command::Probe => commands::probe(&cfg)?,
        Command::Transition => commands::transition(&cfg)?,
        Command::Entropy => commands::entropy(&cfg)?,
        Command::Lacunary => commands::lacunary(&cfg)?,
        Command::Periodic => commands::periodic(&cfg)?,
    };
    let written = output::emit(cmd.name(), &cfg, &outcome, started, clock.elapsed().as_secs_f64())?;
    println!("{}: {}", cmd.name(), outcome.summary);
    for p in written {
        println!("  wrote {}", p.display());
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
