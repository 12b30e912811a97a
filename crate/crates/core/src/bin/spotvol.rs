use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spotvol::bench::{run_bench, BandwidthRule, BenchConfig};
use spotvol::charfn::DEFAULT_FLOOR;
use spotvol::io::{
    fmt_f64, ingest_csv, write_estimate_csv, write_json, write_series_csv, Summary, SUMMARY_VERSION,
};
use spotvol::model::{parse_jumps, parse_noise, parse_rate, Model};
use spotvol::pipeline::{estimate, EstimateParams};
use spotvol::sim::ObservationSeries;
use spotvol::smoothing::{Kernel, SmoothingConfig};
use spotvol::tuning::{robust_scale, tune, GcvForm, TuneGrid, TuneOptions, TuneResult};
use spotvol::{Error, Result};

/// Frequency multiplier of the inverse robust scale when `--u` is omitted.
const DEFAULT_U_SCALE: f64 = 0.7;

#[derive(Parser)]
#[command(
    name = "spotvol",
    version,
    about = "Spot volatility and rate estimation from noisy high-frequency prices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a noisy price path and write it as `index,log_price`.
    Simulate(SimulateArgs),
    /// Estimate c̃ and r̃ from a CSV file or a simulated path.
    Estimate(EstimateArgs),
    /// Select (u, h1, h2, h) by generalised cross-validation.
    Tune(TuneArgs),
    /// Monte Carlo convergence benchmark over a ladder of sample sizes.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Diffusive volatility `c` of the driving Lévy process.
    #[arg(long, default_value_t = 1.0)]
    vol: f64,
    /// constant | sine:a:m
    #[arg(long, default_value = "sine:0.5:1")]
    rate: String,
    /// none | cp-two:λ:a:p | cp-gauss:λ:μ:sd | stable:β:γ
    #[arg(long, default_value = "none")]
    jumps: String,
    /// none | gauss:σ | rademacher:σ
    #[arg(long, default_value = "gauss:0.005")]
    noise: String,
    /// Itô semimartingale with calendar-time jumps instead of a time change.
    #[arg(long)]
    ito: bool,
}

impl ModelArgs {
    fn build(&self) -> Result<Model> {
        Model::build(
            self.ito,
            self.vol,
            parse_rate(&self.rate)?,
            parse_jumps(&self.jumps)?,
            parse_noise(&self.noise)?,
        )
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1 << 16)]
    n: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, short)]
    output: PathBuf,
    /// Optional CSV of the ground truth `t,rate,vol,noise_var`.
    #[arg(long)]
    truth: Option<PathBuf>,
}

/// Data source: a CSV file or a simulated path.
#[derive(Args)]
struct SourceArgs {
    /// Input CSV with header `index,log_price` or `t,log_price`.
    #[arg(long, short, conflicts_with = "seed")]
    input: Option<PathBuf>,
    /// Simulate the input with this seed instead of reading a file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1 << 16)]
    n: usize,
    #[command(flatten)]
    model: ModelArgs,
}

impl SourceArgs {
    fn load(&self) -> Result<ObservationSeries> {
        match (&self.input, self.seed) {
            (Some(path), _) => ingest_csv(path),
            (None, Some(seed)) => self.model.build()?.simulate(self.n, seed),
            (None, None) => Err(Error::config("give either --input or --seed")),
        }
    }
}

#[derive(Args)]
struct SmoothingArgs {
    /// uniform | epanechnikov | biweight
    #[arg(long, default_value = "epanechnikov")]
    kernel: Kernel,
    /// Number of local polynomial coefficients (1 = Nadaraya–Watson).
    #[arg(long = "order", default_value_t = 1)]
    order: usize,
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    floor: f64,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Frequency; defaults to 0.7 over the robust scale of the pre-averaged increments.
    #[arg(long)]
    u: Option<f64>,
    #[arg(long, default_value_t = 0.125)]
    h1: f64,
    #[arg(long, default_value_t = 1.0)]
    h2: f64,
    /// Smoothing bandwidth.
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    #[command(flatten)]
    smoothing: SmoothingArgs,
    /// Output CSV `t,c_tilde,r_tilde,guard_fraction`.
    #[arg(long, short)]
    output: PathBuf,
    /// JSON summary; defaults to the output path with a `.json` extension.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated frequency candidates; default scales with the data.
    #[arg(long, value_delimiter = ',')]
    u_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    h1_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    h2_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.4")]
    h_grid: Vec<f64>,
    /// self-weight | classical
    #[arg(long, default_value = "self-weight")]
    gcv_form: GcvForm,
    #[command(flatten)]
    smoothing: SmoothingArgs,
    /// JSON file with the selected point and the full score table.
    #[arg(long, short)]
    output: PathBuf,
    /// Also write the estimate at the selected point to this CSV.
    #[arg(long)]
    estimate: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Base seed; replicate `i` uses `seed + i`.
    #[arg(long)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "4096,16384,65536")]
    ladder: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    replicates: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    #[arg(long, default_value_t = 0.125)]
    h1: f64,
    #[arg(long, default_value_t = 1.0)]
    h2: f64,
    /// Bandwidth constant in `h = h0·n^{-1/(2(2α+1))}`.
    #[arg(long, default_value_t = 1.0)]
    h0: f64,
    /// Smoothness used by the bandwidth schedule.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Pick h per replicate by GCV over --h-grid instead of the schedule.
    #[arg(long)]
    gcv: bool,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.4")]
    h_grid: Vec<f64>,
    #[arg(long, default_value = "self-weight")]
    gcv_form: GcvForm,
    #[command(flatten)]
    smoothing: SmoothingArgs,
    /// JSON report; the table is always printed to stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn smoothing_config(args: &SmoothingArgs, h: f64) -> SmoothingConfig {
    SmoothingConfig {
        kernel: args.kernel,
        order: args.order,
        bandwidth: h,
        ridge: args.ridge,
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let series = args.model.build()?.simulate(args.n, args.seed)?;
    write_series_csv(&args.output, &series)?;
    if let (Some(path), Some(truth)) = (&args.truth, &series.truth) {
        let mut body = String::from("t,rate,vol,noise_var\n");
        for j in 0..truth.rate.len() {
            body.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(j as f64 / args.n as f64),
                fmt_f64(truth.rate[j]),
                fmt_f64(truth.vol[j]),
                fmt_f64(truth.noise_var[j])
            ));
        }
        std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

/// Writes CSV and summary; a degenerate normalisation still writes both and
/// then surfaces as an error so the exit code reflects it.
fn write_estimate(
    series: &ObservationSeries,
    params: &EstimateParams,
    csv: &Path,
    summary: &Path,
) -> Result<()> {
    let est = estimate(series, params, None)?;
    write_estimate_csv(csv, &est)?;
    write_json(summary, &Summary::new(params, &est))?;
    est.rate().map(|_| ())
}

fn run_estimate(args: &EstimateArgs) -> Result<()> {
    let series = args.source.load()?;
    let u = match args.u {
        Some(u) => u,
        None => DEFAULT_U_SCALE / robust_scale(&series)?,
    };
    let params = EstimateParams {
        u,
        h1: args.h1,
        h2: args.h2,
        floor: args.smoothing.floor,
        smoothing: smoothing_config(&args.smoothing, args.h),
    };
    let summary = args
        .summary
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    write_estimate(&series, &params, &args.output, &summary)
}

#[derive(serde::Serialize)]
struct TuneFile<'a> {
    version: u32,
    #[serde(flatten)]
    result: &'a TuneResult,
}

fn run_tune(args: &TuneArgs) -> Result<()> {
    let series = args.source.load()?;
    let mut grid = TuneGrid::default_for(&series)?;
    if let Some(u) = &args.u_grid {
        grid.u_candidates = u.clone();
    }
    grid.h1_candidates = args.h1_grid.clone();
    grid.h2_candidates = args.h2_grid.clone();
    grid.h_candidates = args.h_grid.clone();
    let cfg = smoothing_config(&args.smoothing, 0.1);
    let opts = TuneOptions {
        floor: args.smoothing.floor,
        form: args.gcv_form,
    };
    let result = tune(&series, &grid, &cfg, &opts)?;
    write_json(
        &args.output,
        &TuneFile {
            version: SUMMARY_VERSION,
            result: &result,
        },
    )?;
    let b = result.best;
    println!(
        "best u={} h1={} h2={} h={} gcv={}",
        b.u, b.h1, b.h2, b.h, result.score
    );
    if let Some(csv) = &args.estimate {
        let params = EstimateParams {
            u: b.u,
            h1: b.h1,
            h2: b.h2,
            floor: args.smoothing.floor,
            smoothing: cfg.with_bandwidth(b.h),
        };
        write_estimate(&series, &params, csv, &csv.with_extension("json"))?;
    }
    Ok(())
}

fn run_bench_cmd(args: &BenchArgs) -> Result<()> {
    let mut cfg = BenchConfig::new(
        args.model.build()?,
        args.ladder.clone(),
        args.replicates,
        args.seed,
    );
    cfg.u = args.u;
    cfg.h1 = args.h1;
    cfg.h2 = args.h2;
    cfg.floor = args.smoothing.floor;
    cfg.kernel = args.smoothing.kernel;
    cfg.order = args.smoothing.order;
    cfg.bandwidth = if args.gcv {
        BandwidthRule::Gcv {
            candidates: args.h_grid.clone(),
            form: args.gcv_form,
        }
    } else {
        BandwidthRule::Schedule {
            h0: args.h0,
            alpha: args.alpha,
        }
    };
    let report = run_bench(&cfg)?;
    println!("n,h,n2,rmse_r,rmse_c,degenerate");
    for p in &report.points {
        println!(
            "{},{:.6},{},{:.6e},{:.6e},{}",
            p.n, p.h, p.n2, p.rmse_r, p.rmse_c, p.degenerate
        );
    }
    match report.slope {
        Some(s) => println!("slope {s:.4}"),
        None => println!("slope n/a (fewer than 3 ladder points)"),
    }
    if let Some(path) = &args.output {
        write_json(path, &report)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Tune(a) => run_tune(a),
        Command::Bench(a) => run_bench_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
