//! Step-size sweeps of walk matrix elements against the continuous-time
//! oracle, log-log order fits, and report emission.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteBialgebra, NormEstimator};
use crate::error::{Error, Result};
use crate::fock::{levy_matrix_element, step_count, walk_matrix_element, StepFunction};
use crate::linalg::{CVector, C64};
use crate::schurmann::SchurmannTriple;
use crate::walk::{beta_block_errors, beta_direct, max_step, BlockErrors};

/// Errors below this are treated as exact zeros by [`fit_order`].
pub const NOISE_FLOOR: f64 = 1e-13;

/// One `(f, g, t, a)` matrix-element experiment.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub name: String,
    pub f: StepFunction,
    pub g: StepFunction,
    pub t: f64,
    pub observable: CVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub h: f64,
    pub n: usize,
    pub walk_value: C64,
    pub oracle_value: C64,
    pub abs_error: f64,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub h: f64,
    pub reason: String,
}

pub type SweepEntry = std::result::Result<SweepRecord, SweepFailure>;

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Worker threads; 1 runs serially.
    pub jobs: usize,
    /// When false, `wall_time` is zero so records are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            record_timing: false,
        }
    }
}

/// `base · 2^{-j}` for `j = j_min..=j_max`.
pub fn dyadic_grid(base: f64, j_min: u32, j_max: u32) -> Vec<f64> {
    (j_min..=j_max)
        .map(|j| base * 0.5f64.powi(j as i32))
        .collect()
}

/// `λ^{-1} 2^{-j}`, `j = 3..=10` (base 1 when `λ = 0`).
pub fn default_grid(triple: &SchurmannTriple) -> Vec<f64> {
    let base = max_step(triple);
    dyadic_grid(if base.is_finite() { base } else { 1.0 }, 3, 10)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::Structure(
            "h grid must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn sweep_entry(
    alg: &FiniteBialgebra,
    triple: &SchurmannTriple,
    case: &TestCase,
    oracle: C64,
    h: f64,
    record_timing: bool,
) -> SweepEntry {
    let start = Instant::now();
    let fail = |e: Error| SweepFailure {
        h,
        reason: e.to_string(),
    };
    let beta = beta_direct(alg, triple, h).map_err(fail)?;
    let walk = walk_matrix_element(alg, &beta, &case.f, &case.g, case.t, &case.observable)
        .map_err(fail)?;
    Ok(SweepRecord {
        h,
        n: step_count(case.t, h),
        walk_value: walk,
        oracle_value: oracle,
        abs_error: (walk - oracle).norm(),
        wall_time: if record_timing {
            start.elapsed()
        } else {
            Duration::ZERO
        },
    })
}

/// Walk-vs-oracle records along `grid`, in grid order. Inadmissible step
/// sizes become per-entry failures.
pub fn sweep(
    alg: &FiniteBialgebra,
    triple: &SchurmannTriple,
    case: &TestCase,
    grid: &[f64],
    opts: SweepOptions,
) -> Result<Vec<SweepEntry>> {
    check_grid(grid)?;
    let oracle = levy_matrix_element(alg, triple, &case.f, &case.g, case.t, &case.observable)?;
    let run = |h: &f64| sweep_entry(alg, triple, case, oracle, *h, opts.record_timing);
    if opts.jobs <= 1 {
        return Ok(grid.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Structure(format!("thread pool: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(run).collect()))
}

/// Ordinary least squares on `(ln h, ln error)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fits `ln error = slope · ln h + intercept`, skipping errors below [`NOISE_FLOOR`].
pub fn fit_order(points: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e >= NOISE_FLOOR && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = usable.len();
    if n < 3 {
        return Err(Error::BelowNoiseFloor(n));
    }
    let nf = n as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Structure("fit needs distinct step sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        points_used: n,
    })
}

pub fn fit_records(records: &[SweepRecord]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.h, r.abs_error)).collect();
    fit_order(&pts)
}

/// Block deviations of `β^(h)` at one step size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub h: f64,
    pub errors: BlockErrors,
}

pub fn beta_bounds_sweep(
    alg: &FiniteBialgebra,
    triple: &SchurmannTriple,
    grid: &[f64],
    estimator: NormEstimator,
) -> Result<Vec<BoundsRecord>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&h| {
            let beta = beta_direct(alg, triple, h)?;
            Ok(BoundsRecord {
                h,
                errors: beta_block_errors(alg, triple, &beta, estimator)?,
            })
        })
        .collect()
}

/// Measured orders of the three block deviations. `e1` is `None` when every
/// `e1` is below the noise floor, i.e. the deviation vanishes identically.
#[derive(Debug)]
pub struct BoundsFit {
    pub e1: Option<FitResult>,
    pub e1_max: f64,
    pub e3: Result<FitResult>,
    pub e4: Result<FitResult>,
}

pub fn fit_bounds(records: &[BoundsRecord]) -> BoundsFit {
    let series = |pick: fn(&BlockErrors) -> f64| -> Vec<(f64, f64)> {
        records.iter().map(|r| (r.h, pick(&r.errors))).collect()
    };
    let e1_max = records.iter().map(|r| r.errors.e1).fold(0.0, f64::max);
    BoundsFit {
        e1: if e1_max < NOISE_FLOOR {
            None
        } else {
            fit_order(&series(|e| e.e1)).ok()
        },
        e1_max,
        e3: fit_order(&series(|e| e.e3)),
        e4: fit_order(&series(|e| e.e4)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Structure(format!("unknown report format {other:?}"))),
        }
    }
}

/// A [`SweepRecord`] as written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub h: f64,
    pub n: usize,
    pub walk_re: f64,
    pub walk_im: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub abs_error: f64,
    pub wall_time_us: u64,
}

impl From<&SweepRecord> for RecordRow {
    fn from(r: &SweepRecord) -> Self {
        Self {
            h: r.h,
            n: r.n,
            walk_re: r.walk_value.re,
            walk_im: r.walk_value.im,
            oracle_re: r.oracle_value.re,
            oracle_im: r.oracle_value.im,
            abs_error: r.abs_error,
            wall_time_us: r.wall_time.as_micros() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub label: String,
    #[serde(flatten)]
    pub fit: FitResult,
}

/// Identifiers carried into JSON reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub fixture: String,
    pub triple: String,
    pub testcase: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub records: Vec<RecordRow>,
    pub fits: Vec<NamedFit>,
}

pub const CSV_HEADER: &str = "h,n,walk_re,walk_im,oracle_re,oracle_im,abs_error,wall_time_us";

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records.iter().map(RecordRow::from) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            sci(r.h),
            r.n,
            sci(r.walk_re),
            sci(r.walk_im),
            sci(r.oracle_re),
            sci(r.oracle_im),
            sci(r.abs_error),
            r.wall_time_us
        );
    }
    s
}

pub fn render_json(
    records: &[SweepRecord],
    fits: &[NamedFit],
    meta: &ReportMeta,
) -> Result<String> {
    let report = Report {
        meta: meta.clone(),
        records: records.iter().map(RecordRow::from).collect(),
        fits: fits.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_report(
    records: &[SweepRecord],
    fits: &[NamedFit],
    meta: &ReportMeta,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let body = match format {
        ReportFormat::Csv => render_csv(records),
        ReportFormat::Json => render_json(records, fits, meta)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}
