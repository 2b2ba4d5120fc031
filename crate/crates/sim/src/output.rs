//! Results CSV, plot-data CSV and run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use star_ris::Access;

use crate::config::{ExperimentConfig, SchemeKind};
use crate::experiment::{CellSummary, ExperimentOutput, ResultRow};
use crate::seed::RNG_NAME;

pub const RESULTS_FILE: &str = "results.csv";
pub const PLOTDATA_FILE: &str = "plotdata.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const RESULTS_HEADER: [&str; 11] = [
    "scheme",
    "access",
    "n_elements",
    "profile",
    "realization",
    "seed",
    "power_w",
    "power_dbm",
    "order",
    "iterations",
    "converged",
];

pub const PLOTDATA_HEADER: [&str; 8] = [
    "profile",
    "access",
    "scheme",
    "n_elements",
    "mean_dbm",
    "stderr_dbm",
    "count",
    "excluded",
];

/// Fixed-point decimal with 17 significant digits, which parses back to the
/// same `f64`.
pub fn format_watts(w: f64) -> String {
    if !w.is_finite() || w == 0.0 {
        return format!("{w}");
    }
    let magnitude = w.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{w:.decimals$}")
}

fn access_str(a: Access) -> &'static str {
    match a {
        Access::Noma => "NOMA",
        Access::Oma => "OMA",
    }
}

fn parse_access(s: &str) -> Option<Access> {
    match s {
        "NOMA" => Some(Access::Noma),
        "OMA" => Some(Access::Oma),
        _ => None,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn row_record(r: &ResultRow) -> [String; 11] {
    [
        r.scheme.as_str().to_string(),
        access_str(r.access).to_string(),
        r.n_elements.to_string(),
        r.profile.clone(),
        r.realization.to_string(),
        r.seed.to_string(),
        format_watts(r.power_w),
        format!("{}", r.power_dbm),
        r.order.clone(),
        r.iterations.to_string(),
        r.converged.to_string(),
    ]
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record(row_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        bail!("refusing to write {} with no rows", path.display());
    }
    let mut f = create(path)?;
    write_csv(rows, &mut f).with_context(|| format!("writing {}", path.display()))?;
    f.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Parses a results CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: record {}", path.display(), i + 1))?;
        let field = |k: usize| rec.get(k).unwrap_or_default();
        let ctx = || format!("{}: record {}", path.display(), i + 1);
        rows.push(ResultRow {
            scheme: SchemeKind::parse(field(0)).with_context(ctx)?,
            access: parse_access(field(1)).with_context(ctx)?,
            n_elements: field(2).parse().with_context(ctx)?,
            profile: field(3).to_string(),
            realization: field(4).parse().with_context(ctx)?,
            seed: field(5).parse().with_context(ctx)?,
            power_w: field(6).parse().with_context(ctx)?,
            power_dbm: field(7).parse().with_context(ctx)?,
            order: field(8).to_string(),
            iterations: field(9).parse().with_context(ctx)?,
            converged: field(10).parse().with_context(ctx)?,
        });
    }
    Ok(rows)
}

pub fn emit_plotdata(summary: &[CellSummary], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    {
        let mut w = csv::Writer::from_writer(&mut f);
        w.write_record(PLOTDATA_HEADER)?;
        for c in summary {
            w.write_record([
                c.profile.clone(),
                access_str(c.access).to_string(),
                c.scheme.as_str().to_string(),
                c.n_elements.to_string(),
                format!("{}", c.mean_dbm),
                format!("{}", c.stderr_dbm),
                c.count.to_string(),
                c.excluded.to_string(),
            ])?;
        }
        w.flush().with_context(|| format!("writing {}", path.display()))?;
    }
    f.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub software: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub rows: usize,
    pub excluded_rows: usize,
    pub config: &'a ExperimentConfig,
}

pub fn emit_manifest(cfg: &ExperimentConfig, out: &ExperimentOutput, path: &Path) -> Result<()> {
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        rng: RNG_NAME,
        rows: out.rows.len(),
        excluded_rows: out.excluded(),
        config: cfg,
    };
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

/// Writes all three files into `dir`, creating it if needed.
pub fn write_all(cfg: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<[PathBuf; 3]> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let paths = [dir.join(RESULTS_FILE), dir.join(PLOTDATA_FILE), dir.join(MANIFEST_FILE)];
    emit_csv(&out.rows, &paths[0])?;
    emit_plotdata(&out.summary, &paths[1])?;
    emit_manifest(cfg, out, &paths[2])?;
    Ok(paths)
}
