//! CSV ingestion and output files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{Estimate, EstimateParams};
use crate::preaverage::BinLayout;
use crate::sim::ObservationSeries;
use crate::smoothing::Kernel;

/// Version of the JSON summary layout.
pub const SUMMARY_VERSION: u32 = 1;

/// Relative tolerance on the spacing of the time column.
const SPACING_TOL: f64 = 1e-9;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<ObservationSeries> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(io_err(path))?;
    parse_csv(&text)
}

/// Parses `index,log_price` or `t,log_price`. Row numbers in errors count
/// data rows from 1.
pub fn parse_csv(text: &str) -> Result<ObservationSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if headers.len() != 2
        || !matches!(headers[0].as_str(), "index" | "t")
        || headers[1] != "log_price"
    {
        return Err(Error::Format(format!(
            "expected header 'index,log_price' or 't,log_price', found '{}'",
            headers.join(",")
        )));
    }

    let mut stamps = Vec::new();
    let mut y = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            msg: e.to_string(),
        })?;
        let field = |k: usize, name: &str| -> Result<f64> {
            let raw = record.get(k).unwrap_or("");
            if raw.is_empty() {
                return Err(Error::Parse {
                    row,
                    msg: format!("missing {name}"),
                });
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    row,
                    msg: format!("{name} '{raw}' is not a finite number"),
                }),
            }
        };
        stamps.push(field(0, &headers[0])?);
        y.push(field(1, "log_price")?);
    }
    if y.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }
    check_spacing(&stamps, &headers[0])?;
    ObservationSeries::new(y)
}

fn check_spacing(stamps: &[f64], name: &str) -> Result<()> {
    if stamps.len() < 2 {
        return Ok(());
    }
    let step = stamps[1] - stamps[0];
    if !(step > 0.0) {
        return Err(Error::Format(format!(
            "{name} column is not increasing at row 2"
        )));
    }
    for (i, w) in stamps.windows(2).enumerate() {
        let d = w[1] - w[0];
        if (d - step).abs() > SPACING_TOL * step.abs() {
            return Err(Error::Format(format!(
                "{name} column is unevenly spaced at row {}: step {d} vs {step}",
                i + 2
            )));
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Formats with 17 significant digits so values survive a round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_series_csv(path: impl AsRef<Path>, series: &ObservationSeries) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = String::from("index,log_price\n");
    for (j, v) in series.y.iter().enumerate() {
        body.push_str(&format!("{j},{}\n", fmt_f64(*v)));
    }
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

/// `t,c_tilde,r_tilde,guard_fraction`; `r_tilde` is left empty when the
/// normalisation is degenerate.
pub fn estimate_csv(est: &Estimate) -> String {
    let mut body = String::from("t,c_tilde,r_tilde,guard_fraction\n");
    for i in 0..est.grid.len() {
        let r = est
            .r_tilde
            .as_ref()
            .map_or_else(String::new, |r| fmt_f64(r[i]));
        body.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(est.grid[i]),
            fmt_f64(est.c_tilde[i]),
            r,
            fmt_f64(est.guard_fraction[i])
        ));
    }
    body
}

pub fn write_estimate_csv(path: impl AsRef<Path>, est: &Estimate) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    out.write_all(estimate_csv(est).as_bytes())
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryParams {
    pub u: f64,
    pub h1: f64,
    pub h2: f64,
    pub h: f64,
    pub order: usize,
    pub kernel: Kernel,
    pub floor: f64,
    pub ridge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryLayout {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub n0: usize,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFlags {
    pub degenerate: bool,
    pub guard_failures: usize,
    pub guard_failure_fraction: f64,
    pub ridged_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: u32,
    pub params: SummaryParams,
    pub layout: SummaryLayout,
    pub denom: f64,
    pub flags: SummaryFlags,
}

impl Summary {
    pub fn new(params: &EstimateParams, est: &Estimate) -> Self {
        let BinLayout {
            n,
            n1,
            n2,
            n0,
            kappa,
            ..
        } = est.layout;
        let failures = est.local.guard_failures();
        Self {
            version: SUMMARY_VERSION,
            params: SummaryParams {
                u: params.u,
                h1: params.h1,
                h2: params.h2,
                h: params.smoothing.bandwidth,
                order: params.smoothing.order,
                kernel: params.smoothing.kernel,
                floor: params.floor,
                ridge: params.smoothing.ridge,
            },
            layout: SummaryLayout {
                n,
                n1,
                n2,
                n0,
                kappa,
            },
            denom: est.denom,
            flags: SummaryFlags {
                degenerate: est.is_degenerate(),
                guard_failures: failures,
                guard_failure_fraction: failures as f64 / n2 as f64,
                ridged_points: est.ridged.iter().filter(|r| **r).count(),
            },
        }
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(io_err(path))
}
