//! CSV report, sidecar metadata and debug dataset dumps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use screenfail_core::Dataset;

use crate::error::{HarnessError, Result};
use crate::harness::ExperimentReport;

pub const REPORT_HEADER: [&str; 9] =
    ["example", "n", "p", "variable", "failure_count", "replications", "failure_proportion", "mc_se", "seed"];

/// Datasets wider than this are not dumped.
pub const MAX_DUMP_P: usize = 10_000;

/// One row per (n, tracked variable); variables are written one-based.
pub fn write_report_csv<W: Write>(report: &ExperimentReport, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(REPORT_HEADER)?;
    for row in &report.rows {
        out.write_record([
            report.example.clone(),
            row.n.to_string(),
            row.p.to_string(),
            (row.variable + 1).to_string(),
            row.failure_count.to_string(),
            row.replications.to_string(),
            row.failure_proportion.to_string(),
            row.mc_se.to_string(),
            report.master_seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `key = value` lines; `invocation`, when given, is the command line that
/// reproduces the report.
pub fn write_sidecar<W: Write>(report: &ExperimentReport, invocation: Option<&str>, mut writer: W) -> Result<()> {
    writeln!(writer, "config_hash = {}", report.config_hash)?;
    writeln!(writer, "generator = {}", report.generator)?;
    writeln!(writer, "version = {}", report.version)?;
    writeln!(writer, "master_seed = {}", report.master_seed)?;
    writeln!(writer, "wall_time_secs = {:.3}", report.wall_time.as_secs_f64())?;
    if let Some(inv) = invocation {
        writeln!(writer, "invocation = {inv}")?;
    }
    Ok(())
}

/// `report.csv` → `report.meta.txt`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.txt")
}

/// Reads the `invocation` line back from a sidecar file's contents.
pub fn sidecar_invocation(contents: &str) -> Option<&str> {
    contents.lines().find_map(|l| l.strip_prefix("invocation = "))
}

pub fn save_report(report: &ExperimentReport, csv_path: &Path, invocation: Option<&str>) -> Result<PathBuf> {
    let mut csv_out = BufWriter::new(File::create(csv_path)?);
    write_report_csv(report, &mut csv_out)?;
    csv_out.flush()?;
    let meta = sidecar_path(csv_path);
    let mut meta_out = BufWriter::new(File::create(&meta)?);
    write_sidecar(report, invocation, &mut meta_out)?;
    meta_out.flush()?;
    Ok(meta)
}

/// Header `y,x1,...,xp` then one line per draw.
pub fn write_dataset_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let p = dataset.p();
    if p > MAX_DUMP_P {
        return Err(HarnessError::Config(format!("refusing to dump a dataset with p = {p} > {MAX_DUMP_P}")));
    }
    let mut out = csv::Writer::from_writer(writer);
    let header: Vec<String> = std::iter::once("y".to_string()).chain((1..=p).map(|j| format!("x{j}"))).collect();
    out.write_record(&header)?;
    for (k, &y) in dataset.y().iter().enumerate() {
        let record: Vec<String> = std::iter::once(y).chain(dataset.row(k).iter().copied()).map(|v| v.to_string()).collect();
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}
