use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    HonestFailure,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::HonestFailure => 2,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().context("flushing CSV")
    }
}

pub struct Outcome {
    pub status: Status,
    pub summary: String,
    pub result: Value,
    pub csv: Option<Table>,
    pub svg: Option<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    command: &'a str,
    status: Status,
    summary: &'a str,
    config: &'a RunConfig,
    result: &'a Value,
}

#[derive(Serialize)]
struct Metadata<'a> {
    schema_version: u32,
    command: &'a str,
    tool_version: &'static str,
    started_unix: f64,
    elapsed_seconds: f64,
    argv: Vec<String>,
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Writes `<command>.json`, `<command>.meta.json` and the optional CSV and
/// SVG into the output directory; returns the written paths.
pub fn emit(command: &str, cfg: &RunConfig, outcome: &Outcome, started: f64, elapsed: f64) -> Result<Vec<PathBuf>> {
    let dir = &cfg.out;
    let mut written = Vec::new();
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command,
        status: outcome.status,
        summary: &outcome.summary,
        config: cfg,
        result: &outcome.result,
    };
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    let path = dir.join(format!("{command}.json"));
    write_atomic(&path, &json)?;
    written.push(path);

    let meta = Metadata {
        schema_version: SCHEMA_VERSION,
        command,
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix: started,
        elapsed_seconds: elapsed,
        argv: std::env::args().collect(),
    };
    let mut json = serde_json::to_vec_pretty(&meta)?;
    json.push(b'\n');
    let path = dir.join(format!("{command}.meta.json"));
    write_atomic(&path, &json)?;
    written.push(path);

    if cfg.emit_csv {
        if let Some(table) = &outcome.csv {
            let path = dir.join(format!("{command}.csv"));
            write_atomic(&path, &table.to_bytes()?)?;
            written.push(path);
        }
    }
    if cfg.emit_svg {
        if let Some(svg) = &outcome.svg {
            let path = dir.join(format!("{command}.svg"));
            write_atomic(&path, svg.as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}
