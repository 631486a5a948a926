//! Per-cell aggregation of sweep records.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::csvio::fmt_real;
use crate::error::{BenchError, Result};
use crate::record::{ExperimentRecord, NormChoice};

pub const SUMMARY_HEADER: [&str; 7] = [
    "norm",
    "sampling_pct",
    "median_mse",
    "median_runtime_seconds",
    "converged_frac",
    "snr_db",
    "runtime_ratio_l21_l1",
];

/// Aggregate of one `(norm, sampling_pct, snr_db)` cell. Medians are over
/// converged rows only and NaN when there are none.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub norm: NormChoice,
    pub sampling_pct: f64,
    pub snr_db: f64,
    pub median_mse: f64,
    pub median_runtime_seconds: f64,
    pub converged_frac: f64,
    pub n_records: usize,
    /// Median l21 runtime over median l1 runtime in the same cell.
    pub runtime_ratio_l21_l1: Option<f64>,
}

/// Lower median (`sorted[(n - 1) / 2]`); NaN for an empty slice.
pub fn lower_median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

// Sampling and SNR are keyed by bit pattern; values come from the same
// sweep axes so equal cells have identical bits.
type CellKey = (NormChoice, OrdF64, OrdF64);

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub fn summarize(records: &[ExperimentRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(BenchError::InvalidArgument("no records to summarize".into()));
    }
    let mut cells: BTreeMap<CellKey, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.norm, OrdF64(r.sampling_pct), OrdF64(r.snr_db)))
            .or_default()
            .push(r);
    }
    let mut rows: Vec<SummaryRow> = cells
        .into_iter()
        .map(|((norm, s, snr), rs)| {
            let ok: Vec<&&ExperimentRecord> = rs.iter().filter(|r| r.converged && !r.failed()).collect();
            let mses: Vec<f64> = ok.iter().map(|r| r.mse).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.runtime_seconds).collect();
            SummaryRow {
                norm,
                sampling_pct: s.0,
                snr_db: snr.0,
                median_mse: lower_median(&mses),
                median_runtime_seconds: lower_median(&times),
                converged_frac: ok.len() as f64 / rs.len() as f64,
                n_records: rs.len(),
                runtime_ratio_l21_l1: None,
            }
        })
        .collect();

    let runtime_of = |rows: &[SummaryRow], norm, s: f64, snr: f64| {
        rows.iter()
            .find(|r| r.norm == norm && r.sampling_pct.to_bits() == s.to_bits() && r.snr_db.to_bits() == snr.to_bits())
            .map(|r| r.median_runtime_seconds)
    };
    let ratios: Vec<Option<f64>> = rows
        .iter()
        .map(|r| {
            let l1 = runtime_of(&rows, NormChoice::L1, r.sampling_pct, r.snr_db)?;
            let l21 = runtime_of(&rows, NormChoice::L21, r.sampling_pct, r.snr_db)?;
            Some(l21 / l1)
        })
        .collect();
    for (row, ratio) in rows.iter_mut().zip(ratios) {
        row.runtime_ratio_l21_l1 = ratio;
    }
    Ok(rows)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    let mut inner = || -> csv::Result<()> {
        w.write_record(SUMMARY_HEADER)?;
        for r in rows {
            w.write_record([
                r.norm.to_string(),
                fmt_real(r.sampling_pct),
                fmt_real(r.median_mse),
                fmt_real(r.median_runtime_seconds),
                fmt_real(r.converged_frac),
                fmt_real(r.snr_db),
                fmt_real(r.runtime_ratio_l21_l1.unwrap_or(f64::NAN)),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    inner().map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Path of the per-norm plot file next to a summary CSV:
/// `dir/summary.csv` -> `dir/summary_l21.dat`.
pub fn dat_path(summary: &Path, norm: NormChoice) -> PathBuf {
    let stem = summary.file_stem().and_then(|s| s.to_str()).unwrap_or("summary");
    summary.with_file_name(format!("{stem}_{norm}.dat"))
}

/// One whitespace-delimited file per norm for gnuplot; NaN medians are
/// written as `NaN`, which gnuplot skips.
pub fn write_dat_files(rows: &[SummaryRow], summary: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for norm in [NormChoice::L1, NormChoice::L21] {
        let mine: Vec<&SummaryRow> = rows.iter().filter(|r| r.norm == norm).collect();
        if mine.is_empty() {
            continue;
        }
        let path = dat_path(summary, norm);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        let inner = |w: &mut BufWriter<File>| -> std::io::Result<()> {
            writeln!(w, "# norm {norm}")?;
            writeln!(w, "# sampling_pct snr_db median_mse median_runtime_seconds converged_frac")?;
            for r in &mine {
                writeln!(
                    w,
                    "{} {} {:.16e} {:.16e} {}",
                    r.sampling_pct, r.snr_db, r.median_mse, r.median_runtime_seconds, r.converged_frac
                )?;
            }
            w.flush()
        };
        inner(&mut w).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
