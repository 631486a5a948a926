//! `uwa-est`: run, sweep and fixture-export front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uwa_est::csvio::{write_channel_csv, write_records};
use uwa_est::experiment::channel_for;
use uwa_est::summary::{write_dat_files, write_summary_csv};
use uwa_est::{
    run_single, run_sweep, summarize, write_csv, BenchError, ChannelModel, ExperimentConfig,
    NormChoice, SigmaL1, SweepAxes,
};
use uwa_est_core::{ClusterSpec, DelayDopplerGrid, GroupLayout, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "uwa-est", version, about = "Sparse delay-Doppler channel estimation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one configuration and print its record.
    Run(RunArgs),
    /// Run a seeded sweep and write records plus a summary.
    Sweep(SweepArgs),
    /// Write the ground-truth channel for a seed as a sparse CSV fixture.
    ExportChannel(ExportArgs),
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    #[arg(long = "delay-taps", value_name = "K")]
    delay_taps: Option<usize>,
    #[arg(long = "doppler-bins", value_name = "L")]
    doppler_bins: Option<usize>,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long = "taps-per-cluster", default_value_t = 5)]
    taps_per_cluster: usize,
    #[arg(long = "doppler-spread", default_value_t = 1)]
    doppler_spread: usize,
    #[arg(long = "amplitude-decay", default_value_t = 0.8)]
    amplitude_decay: f64,
    /// Isolated random taps (clusters x taps-per-cluster of them) instead of clusters.
    #[arg(long)]
    scatter: bool,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long = "group-layout", default_value = "rows", value_parser = parse_layout)]
    group_layout: GroupLayout,
    /// l1-ball radius: `oracle` (||H_true||_1) or a number.
    #[arg(long = "sigma-l1", default_value = "oracle", value_parser = parse_sigma_l1)]
    sigma_l1: SigmaL1,
    /// Multiplier on the fidelity radius m * noise_std^2.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long = "max-iters", default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long = "admm-rho", default_value_t = 1.0)]
    admm_rho: f64,
    #[arg(long = "step-scale", default_value_t = 1.0)]
    step_scale: f64,
    /// Observe the l21 path through the sampling mask as well.
    #[arg(long = "l21-masked")]
    l21_masked: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 50.0)]
    sampling: f64,
    #[arg(long = "snr-db", default_value_t = 10.0, allow_hyphen_values = true)]
    snr_db: f64,
    #[arg(long, default_value = "l21", value_parser = parse_norm)]
    norm: NormChoice,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `paper`: 11x200 grid, sampling 10:90:10, 10 dB, both norms, 20 seeds.
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    channel: ChannelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// `start:stop:step` or a comma list.
    #[arg(long)]
    sampling: Option<String>,
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    seeds: Option<usize>,
    /// First seed; the sweep uses first-seed .. first-seed + seeds - 1.
    #[arg(long = "first-seed", default_value_t = 1)]
    first_seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Summary CSV; defaults to `summary_<out>` next to the records.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_layout(s: &str) -> Result<GroupLayout, String> {
    s.parse().map_err(|e: uwa_est_core::Error| e.to_string())
}

fn parse_norm(s: &str) -> Result<NormChoice, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_sigma_l1(s: &str) -> Result<SigmaL1, String> {
    if s == "oracle" {
        return Ok(SigmaL1::Oracle);
    }
    let v: f64 = s.parse().map_err(|_| format!("expected `oracle` or a number, got '{s}'"))?;
    if v > 0.0 && v.is_finite() {
        Ok(SigmaL1::Fixed(v))
    } else {
        Err(format!("l1 radius must be positive, got {v}"))
    }
}

fn invalid(msg: impl Into<String>) -> BenchError {
    BenchError::InvalidArgument(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, BenchError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| invalid(format!("bad {what} value '{p}'"))))
        .collect()
}

/// `a:b:step` (inclusive, float-safe) or `a,b,c`.
fn parse_range(s: &str, what: &str) -> Result<Vec<f64>, BenchError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s, what),
        [a, b, step] => {
            let num = |p: &str| p.trim().parse::<f64>().map_err(|_| invalid(format!("bad {what} range '{s}'")));
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(invalid(format!("bad {what} range '{s}'")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(invalid(format!("bad {what} range '{s}'"))),
    }
}

fn build_grid(args: &ChannelArgs, default: DelayDopplerGrid) -> Result<DelayDopplerGrid, BenchError> {
    let l = args.doppler_bins.unwrap_or(default.doppler_bins());
    let k = args.delay_taps.unwrap_or(default.delay_taps());
    Ok(DelayDopplerGrid::new(l, k)?)
}

fn build_channel(args: &ChannelArgs) -> ChannelModel {
    if args.scatter {
        ChannelModel::Scatter {
            taps: args.clusters * args.taps_per_cluster,
        }
    } else {
        ChannelModel::Clusters(ClusterSpec {
            n_clusters: args.clusters,
            taps_per_cluster: args.taps_per_cluster,
            doppler_spread_bins: args.doppler_spread,
            amplitude_decay: args.amplitude_decay,
            rng_seed: 0,
        })
    }
}

fn build_base(channel: &ChannelArgs, solver: &SolverArgs) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = SolverConfig::new(1.0);
    cfg.max_iters = solver.max_iters;
    cfg.tol = solver.tol;
    cfg.admm_rho = solver.admm_rho;
    cfg.step_scale = solver.step_scale;
    cfg.group_layout = solver.group_layout;
    cfg.validate()?;
    if !(solver.eta > 0.0 && solver.eta.is_finite()) {
        return Err(invalid(format!("eta must be positive, got {}", solver.eta)));
    }
    Ok(ExperimentConfig {
        grid: build_grid(channel, DelayDopplerGrid::benchmark_default())?,
        channel: build_channel(channel),
        sigma_l1: solver.sigma_l1,
        eta: solver.eta,
        l21_masked: solver.l21_masked,
        solver: cfg,
        ..ExperimentConfig::default()
    })
}

fn cmd_run(args: RunArgs) -> Result<(), BenchError> {
    if !(args.sampling > 0.0 && args.sampling <= 100.0) {
        return Err(invalid(format!("sampling must be in (0, 100], got {}", args.sampling)));
    }
    let config = ExperimentConfig {
        sampling_pct: args.sampling,
        snr_db: args.snr_db,
        norm: args.norm,
        seed: args.seed,
        ..build_base(&args.channel, &args.solver)?
    };
    let record = run_single(&config)?;
    write_records(std::slice::from_ref(&record), std::io::stdout()).map_err(|source| BenchError::Csv {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    if let Some(out) = &args.out {
        write_csv(&[record], out)?;
    }
    Ok(())
}

fn default_summary_path(out: &Path) -> PathBuf {
    let name = out.file_name().and_then(|n| n.to_str()).unwrap_or("records.csv");
    out.with_file_name(format!("summary_{name}"))
}

fn cmd_sweep(args: SweepArgs) -> Result<(), BenchError> {
    let (mut axes, mut n_seeds) = match args.preset.as_deref() {
        Some("paper") => (SweepAxes::preset(), 20),
        Some(other) => return Err(invalid(format!("unknown preset '{other}'"))),
        None => (
            SweepAxes {
                sampling_pct: vec![50.0],
                snr_db: vec![10.0],
                norms: vec![NormChoice::L1, NormChoice::L21],
            },
            1,
        ),
    };
    if let Some(s) = &args.sampling {
        axes.sampling_pct = parse_range(s, "sampling")?;
    }
    if axes.sampling_pct.iter().any(|&s| !(s > 0.0 && s <= 100.0)) {
        return Err(invalid("sampling values must be in (0, 100]"));
    }
    if let Some(s) = &args.snr_db {
        axes.snr_db = parse_range(s, "SNR")?;
    }
    if let Some(s) = &args.norm {
        axes.norms = parse_list(s, "norm")?;
    }
    if let Some(n) = args.seeds {
        n_seeds = n;
    }
    let base = ExperimentConfig {
        seed: args.first_seed,
        ..build_base(&args.channel, &args.solver)?
    };

    let records = run_sweep(&axes, &base, n_seeds)?;
    write_csv(&records, &args.out)?;
    let summary_path = args.summary.clone().unwrap_or_else(|| default_summary_path(&args.out));
    let rows = summarize(&records)?;
    write_summary_csv(&rows, &summary_path)?;
    let dats = write_dat_files(&rows, &summary_path)?;

    let failed = records.iter().filter(|r| r.failed()).count();
    eprintln!(
        "{} records ({} failed) -> {}; summary -> {}",
        records.len(),
        failed,
        args.out.display(),
        summary_path.display()
    );
    for d in dats {
        eprintln!("plot data -> {}", d.display());
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), BenchError> {
    let config = ExperimentConfig {
        grid: build_grid(&args.channel, DelayDopplerGrid::benchmark_default())?,
        channel: build_channel(&args.channel),
        seed: args.seed,
        ..ExperimentConfig::default()
    };
    let h = channel_for(&config)?;
    write_channel_csv(&h, &args.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ExportChannel(a) => cmd_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_invalid_argument() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
