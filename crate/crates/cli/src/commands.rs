use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;

use qlw_core::algebra::{parse_fixture, validate_bialgebra, NormEstimator, DEFAULT_SAMPLES};
use qlw_core::harness::{
    beta_bounds_sweep, emit_report, fit_bounds, fit_records, render_csv, render_json, sweep,
    FitResult, NamedFit, ReportFormat, ReportMeta, SweepOptions, SweepRecord,
};
use qlw_core::linalg::C64;
use qlw_core::schurmann::markov_semigroup;
use qlw_core::walk::{beta_direct, vacuum_density, walk_dense, walk_vacuum_sequence};

use crate::config::{classify, Experiment};
use crate::{Failure, Overrides};

fn io_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn complex(z: C64) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(io_err)
}

pub fn validate(path: &Path, tol: f64) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading fixture {}", path.display()))
        .map_err(io_err)?;
    let alg = parse_fixture(&text).map_err(classify)?;
    let report = validate_bialgebra(&alg, tol);
    println!("{}: dimension {}", path.display(), alg.dim());
    println!("{report}");
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "axioms above {tol:e}: {}",
            report.failures().join(", ")
        )))
    }
}

fn label_header(exp: &Experiment, first: &str) -> String {
    let mut s = String::from(first);
    for l in exp.algebra.labels() {
        let _ = write!(s, "\t{l}");
    }
    s
}

pub fn semigroup(config: &Path, times: &[f64], _common: &Overrides) -> Result<(), Failure> {
    let exp = Experiment::load(config)?;
    println!("{}", label_header(&exp, "t"));
    for &t in times {
        let p = markov_semigroup(&exp.algebra, &exp.triple, t).map_err(classify)?;
        let mut line = format!("{t}");
        for c in p.functional().coeffs.iter() {
            let _ = write!(line, "\t{}", complex(*c));
        }
        println!("{line}");
    }
    Ok(())
}

pub fn walk(
    config: &Path,
    h: Option<f64>,
    steps: Option<usize>,
    common: &Overrides,
) -> Result<(), Failure> {
    let exp = Experiment::load(config)?;
    let spec = exp.config.walk.as_ref();
    let h = h
        .or(spec.map(|w| w.h))
        .ok_or_else(|| io_err(anyhow::anyhow!("no [walk] table and no --h")))?;
    let steps = steps
        .or(spec.map(|w| w.steps))
        .ok_or_else(|| io_err(anyhow::anyhow!("no [walk] table and no --steps")))?;
    let beta = beta_direct(&exp.algebra, &exp.triple, h).map_err(classify)?;
    let seq = walk_vacuum_sequence(&exp.algebra, &beta, &vacuum_density(beta.hat_dim()), steps)
        .map_err(classify)?;

    println!("{}", label_header(&exp, "n"));
    let mut csv = String::from("n");
    for l in exp.algebra.labels() {
        let _ = write!(csv, ",{l}_re,{l}_im");
    }
    csv.push('\n');
    for (n, k) in seq.iter().enumerate() {
        let mut line = format!("{n}");
        let _ = write!(csv, "{n}");
        for c in k.coeffs.iter() {
            let _ = write!(line, "\t{}", complex(*c));
            let _ = write!(csv, ",{:.16e},{:.16e}", c.re, c.im);
        }
        csv.push('\n');
        println!("{line}");
    }

    // cross-check the largest n whose tensor power fits under the cap
    let cap = exp.dense_cap(common.cap);
    let hat = beta.hat_dim();
    let mut n_dense = 0;
    while n_dense < steps
        && hat
            .checked_pow(n_dense as u32 + 1)
            .is_some_and(|s| s <= cap)
    {
        n_dense += 1;
    }
    if n_dense > 0 {
        let dense = walk_dense(&exp.algebra, &beta, n_dense, cap).map_err(classify)?;
        let diff = (0..exp.algebra.dim())
            .map(|i| {
                let b = exp.algebra.basis(i);
                (dense.vacuum_compression(&b) - seq[n_dense].eval(&b)).norm()
            })
            .fold(0.0, f64::max);
        println!("dense check at n = {n_dense}: max deviation {diff:.3e}");
        if diff > 1e-10 {
            return Err(Failure::Check(format!(
                "dense walk deviates by {diff:.3e} at n = {n_dense}"
            )));
        }
    }
    if let Some(path) = &common.output {
        write_file(path, &csv)?;
    }
    Ok(())
}

fn case_path(base: &Path, name: &str, many: bool) -> PathBuf {
    if !many {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match base.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    base.with_file_name(file)
}

fn fit_line(label: &str, fit: &qlw_core::Result<FitResult>) -> String {
    match fit {
        Ok(f) => format!(
            "{label}: slope {:.4}, intercept {:.4}, r² {:.6} ({} points)",
            f.slope, f.intercept, f.r_squared, f.points_used
        ),
        Err(e) => format!("{label}: no fit ({e})"),
    }
}

pub fn converge(config: &Path, common: &Overrides) -> Result<(), Failure> {
    let exp = Experiment::load(config)?;
    let cases = exp.testcases()?;
    if cases.is_empty() {
        return Err(io_err(anyhow::anyhow!(
            "converge needs at least one [[testcase]]"
        )));
    }
    let grid = exp.grid(None)?;
    let seed = exp.seed(common.seed)?;
    let format = exp.format(common.format);
    let output = exp.output_path(common.output.clone());
    let opts = SweepOptions {
        jobs: common.jobs.max(1),
        record_timing: exp.config.record_timing,
    };
    let mut failures = Vec::new();
    for case in &cases {
        let entries = sweep(&exp.algebra, &exp.triple, case, &grid, opts).map_err(classify)?;
        let mut records: Vec<SweepRecord> = Vec::new();
        println!("testcase {} (t = {})", case.name, case.t);
        println!("h\tn\tabs_error");
        for e in entries {
            match e {
                Ok(r) => {
                    println!("{:.6e}\t{}\t{:.6e}", r.h, r.n, r.abs_error);
                    records.push(r);
                }
                Err(f) => {
                    println!("{:.6e}\tfailed: {}", f.h, f.reason);
                    failures.push(format!("{} at h = {}: {}", case.name, f.h, f.reason));
                }
            }
        }
        let fit = fit_records(&records);
        println!("{}", fit_line("fit", &fit));
        let fits: Vec<NamedFit> = fit
            .ok()
            .map(|f| NamedFit {
                label: "abs_error".into(),
                fit: f,
            })
            .into_iter()
            .collect();
        let meta = ReportMeta {
            fixture: exp.fixture_name.clone(),
            triple: exp.triple_name.clone(),
            testcase: case.name.clone(),
            seed,
        };
        match &output {
            Some(base) => {
                let path = case_path(base, &case.name, cases.len() > 1);
                emit_report(&records, &fits, &meta, format, &path)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(io_err)?;
                println!("wrote {}", path.display());
            }
            None => {
                let body = match format {
                    ReportFormat::Csv => render_csv(&records),
                    ReportFormat::Json => render_json(&records, &fits, &meta).map_err(classify)?,
                };
                print!("{body}");
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}

pub fn beta_bounds(config: &Path, common: &Overrides) -> Result<(), Failure> {
    let exp = Experiment::load(config)?;
    let bounds = exp.bounds();
    let grid = exp.grid(bounds.grid.as_ref())?;
    let estimator = NormEstimator {
        samples: DEFAULT_SAMPLES,
        seed: exp.seed(common.seed)?,
    };
    let records =
        beta_bounds_sweep(&exp.algebra, &exp.triple, &grid, estimator).map_err(classify)?;
    println!("h\te1\te3\te4");
    let mut csv = String::from("h,e1,e3,e4\n");
    for r in &records {
        println!(
            "{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}",
            r.h, r.errors.e1, r.errors.e3, r.errors.e4
        );
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.h, r.errors.e1, r.errors.e3, r.errors.e4
        );
    }
    let fit = fit_bounds(&records);
    let mut problems = Vec::new();
    match &fit.e1 {
        None => println!("e1: exact (max {:.3e}, below noise floor)", fit.e1_max),
        Some(f) => {
            println!("{}", fit_line("e1", &Ok(*f)));
            problems.push(format!(
                "e1 deviation does not vanish (max {:.3e})",
                fit.e1_max
            ));
        }
    }
    for (label, f, range) in [
        ("e3", &fit.e3, bounds.e3_slope),
        ("e4", &fit.e4, bounds.e4_slope),
    ] {
        println!("{}", fit_line(label, f));
        match f {
            Ok(f) if f.slope < range[0] || f.slope > range[1] => problems.push(format!(
                "{label} slope {:.4} outside [{}, {}]",
                f.slope, range[0], range[1]
            )),
            Ok(f) if f.r_squared < bounds.min_r_squared => problems.push(format!(
                "{label} r² {:.6} below {}",
                f.r_squared, bounds.min_r_squared
            )),
            Ok(_) => {}
            Err(e) => problems.push(format!("{label}: {e}")),
        }
    }
    if let Some(path) = &common.output {
        write_file(path, &csv)?;
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}
