//! CSV formats: experiment records and sparse channel fixtures.
//!
//! Reals are written with 17 significant digits so they parse back to the
//! same bits; NaN (a failed run) is written as an empty field.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use uwa_est_core::channel::sparse_entries;
use uwa_est_core::{ChannelGrid, DelayDopplerGrid};

use crate::error::{BenchError, Result};
use crate::record::{ExperimentRecord, NormChoice};

pub const RECORD_HEADER: [&str; 12] = [
    "seed",
    "norm",
    "L",
    "K",
    "sampling_pct",
    "snr_db",
    "sigma_used",
    "group_layout",
    "mse",
    "iterations",
    "runtime_seconds",
    "converged",
];

pub const CHANNEL_HEADER: [&str; 4] = ["row", "col", "re", "im"];

pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    if s.is_empty() {
        Ok(f64::NAN)
    } else {
        s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn record_fields(r: &ExperimentRecord) -> [String; 12] {
    [
        r.seed.to_string(),
        r.norm.to_string(),
        r.doppler_bins.to_string(),
        r.delay_taps.to_string(),
        fmt_real(r.sampling_pct),
        fmt_real(r.snr_db),
        fmt_real(r.sigma_used),
        r.group_layout.to_string(),
        fmt_real(r.mse),
        r.iterations.to_string(),
        fmt_real(r.runtime_seconds),
        r.converged.to_string(),
    ]
}

pub fn write_records<W: Write>(records: &[ExperimentRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = create(path)?;
    write_records(records, file).map_err(csv_err(path))
}

fn parse_record(row: &csv::StringRecord) -> std::result::Result<ExperimentRecord, String> {
    if row.len() != RECORD_HEADER.len() {
        return Err(format!("expected {} fields, found {}", RECORD_HEADER.len(), row.len()));
    }
    let int = |i: usize| row[i].parse::<u64>().map_err(|e| format!("bad integer '{}': {e}", &row[i]));
    Ok(ExperimentRecord {
        seed: int(0)?,
        norm: row[1].parse::<NormChoice>().map_err(|e| e.to_string())?,
        doppler_bins: int(2)? as usize,
        delay_taps: int(3)? as usize,
        sampling_pct: parse_real(&row[4])?,
        snr_db: parse_real(&row[5])?,
        sigma_used: parse_real(&row[6])?,
        group_layout: row[7].parse().map_err(|e: uwa_est_core::Error| e.to_string())?,
        mse: parse_real(&row[8])?,
        iterations: int(9)? as usize,
        runtime_seconds: parse_real(&row[10])?,
        converged: row[11].parse::<bool>().map_err(|e| format!("bad flag '{}': {e}", &row[11]))?,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(RECORD_HEADER) {
        return Err(BenchError::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err(path))?;
        let line = row.position().map_or(0, |p| p.line());
        out.push(parse_record(&row).map_err(|msg| BenchError::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        })?);
    }
    Ok(out)
}

/// Writes the nonzero entries of `h` as `row,col,re,im`.
pub fn write_channel_csv(h: &ChannelGrid, path: &Path) -> Result<()> {
    let file = create(path)?;
    let mut w = csv::Writer::from_writer(file);
    let mut inner = || -> csv::Result<()> {
        w.write_record(CHANNEL_HEADER)?;
        for (r, c, z) in sparse_entries(h) {
            w.write_record([r.to_string(), c.to_string(), fmt_real(z.re), fmt_real(z.im)])?;
        }
        w.flush()?;
        Ok(())
    };
    inner().map_err(csv_err(path))
}

/// Reads a sparse channel fixture onto `grid`.
pub fn read_channel_csv(path: &Path, grid: DelayDopplerGrid) -> Result<ChannelGrid> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    let parse_err = |line: u64, msg: String| BenchError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    if header.iter().ne(CHANNEL_HEADER) {
        return Err(parse_err(1, "unexpected header".into()));
    }
    let mut values = grid.zeros();
    for row in rdr.records() {
        let row = row.map_err(csv_err(path))?;
        let line = row.position().map_or(0, |p| p.line());
        let idx = |i: usize| row[i].parse::<usize>().map_err(|e| parse_err(line, e.to_string()));
        let (r, c) = (idx(0)?, idx(1)?);
        if r >= grid.doppler_bins() || c >= grid.delay_taps() {
            return Err(parse_err(line, format!("entry ({r}, {c}) outside grid")));
        }
        let re = parse_real(&row[2]).map_err(|m| parse_err(line, m))?;
        let im = parse_real(&row[3]).map_err(|m| parse_err(line, m))?;
        values[[r, c]] = Complex64::new(re, im);
    }
    Ok(ChannelGrid::new(grid, values)?)
}
