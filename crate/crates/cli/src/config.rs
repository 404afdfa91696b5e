//! Experiment configuration files.
//!
//! Paths inside a config resolve relative to the config file's directory.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use qlw_core::algebra::{parse_fixture, FiniteBialgebra, DEFAULT_SEED};
use qlw_core::fock::StepFunction;
use qlw_core::harness::{default_grid, dyadic_grid, ReportFormat, TestCase};
use qlw_core::io::{pairs_to_vec, rows_to_mat, Pair};
use qlw_core::linalg::CVector;
use qlw_core::models;
use qlw_core::schurmann::{Representation, SchurmannTriple, TripleFile};
use qlw_core::walk::{check_step, DEFAULT_DENSE_CAP};

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fixture: PathBuf,
    pub triple: TripleSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub dense_cap: Option<usize>,
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub walk: Option<WalkSpec>,
    #[serde(default)]
    pub bounds: Option<BoundsSpec>,
    #[serde(default, rename = "testcase")]
    pub testcases: Vec<TestCaseSpec>,
}

/// Exactly one of `preset`, `file`, or `xi` (with `block` or `matrices`,
/// defaulting to the faithful representation).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub preset: Option<String>,
    pub file: Option<PathBuf>,
    pub block: Option<Vec<usize>>,
    pub matrices: Option<Vec<Vec<Vec<Pair>>>>,
    pub xi: Option<Vec<Pair>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub base: Option<f64>,
    pub j_min: Option<u32>,
    pub j_max: Option<u32>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    pub h: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default = "default_e3")]
    pub e3_slope: [f64; 2],
    #[serde(default = "default_e4")]
    pub e4_slope: [f64; 2],
    #[serde(default = "default_r2")]
    pub min_r_squared: f64,
    pub grid: Option<GridSpec>,
}

fn default_e3() -> [f64; 2] {
    [1.3, 1.7]
}

fn default_e4() -> [f64; 2] {
    [0.8, 1.2]
}

fn default_r2() -> f64 {
    0.99
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            e3_slope: default_e3(),
            e4_slope: default_e4(),
            min_r_squared: default_r2(),
            grid: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestCaseSpec {
    pub name: String,
    pub t: f64,
    pub observable: ObservableSpec,
    #[serde(default)]
    pub f: Vec<PieceSpec>,
    #[serde(default)]
    pub g: Vec<PieceSpec>,
}

/// A basis index, a basis label, or explicit coefficients.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Index(usize),
    Label(String),
    Coeffs(Vec<Pair>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub duration: f64,
    pub value: Vec<Pair>,
}

/// A parsed config with its fixture loaded and triple built.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub fixture_name: String,
    pub triple_name: String,
    pub algebra: FiniteBialgebra,
    pub triple: SchurmannTriple,
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

/// Maps library errors to exit-code classes: failed mathematical checks are
/// failures, everything else is a configuration problem.
pub fn classify(e: qlw_core::Error) -> Failure {
    use qlw_core::Error as E;
    match e {
        E::Validation(_)
        | E::NotARepresentation { .. }
        | E::NotAState { .. }
        | E::NotADensity(_) => Failure::Check(e.to_string()),
        other => Failure::Config(other.into()),
    }
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(config_err)?;
        let config: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(config_err)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let fixture_path = dir.join(&config.fixture);
        let fixture_text = std::fs::read_to_string(&fixture_path)
            .with_context(|| format!("reading fixture {}", fixture_path.display()))
            .map_err(config_err)?;
        let algebra = parse_fixture(&fixture_text).map_err(classify)?;
        let report =
            qlw_core::algebra::validate_bialgebra(&algebra, qlw_core::algebra::FIXTURE_TOL);
        if !report.passed {
            return Err(Failure::Check(format!(
                "fixture {} fails axioms {:?}\n{report}",
                fixture_path.display(),
                report.failures()
            )));
        }
        let fixture_name = stem(&config.fixture);
        let (triple, triple_name) = build_triple(&config.triple, &algebra, dir)?;
        let exp = Self {
            config,
            fixture_name,
            triple_name,
            algebra,
            triple,
        };
        for case in &exp.config.testcases {
            exp.testcase(case)?;
        }
        Ok(exp)
    }

    pub fn seed(&self, flag: Option<u64>) -> Result<u64, Failure> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Ok(s) = std::env::var("QLW_SEED") {
            return s
                .trim()
                .parse()
                .with_context(|| format!("QLW_SEED={s} is not an unsigned integer"))
                .map_err(config_err);
        }
        Ok(self.config.seed.unwrap_or(DEFAULT_SEED))
    }

    pub fn dense_cap(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.dense_cap).unwrap_or(DEFAULT_DENSE_CAP)
    }

    pub fn output_path(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.config.output.as_ref().and_then(|o| o.path.clone()))
    }

    pub fn format(&self, flag: Option<ReportFormat>) -> ReportFormat {
        flag.or_else(|| self.config.output.as_ref().and_then(|o| o.format))
            .unwrap_or(ReportFormat::Csv)
    }

    /// The sweep grid, checked to be strictly decreasing inside `(0, 1/λ]`.
    pub fn grid(&self, spec: Option<&GridSpec>) -> Result<Vec<f64>, Failure> {
        let grid = match spec.or(self.config.grid.as_ref()) {
            None => default_grid(&self.triple),
            Some(g) => match (&g.values, g.base, g.j_min, g.j_max) {
                (Some(v), None, None, None) => v.clone(),
                (None, Some(base), j_min, Some(j_max)) => {
                    dyadic_grid(base, j_min.unwrap_or(0), j_max)
                }
                _ => {
                    return Err(config_err(anyhow::anyhow!(
                        "grid needs either `values` or `base` and `j_max` (optional `j_min`)"
                    )))
                }
            },
        };
        if grid.is_empty() {
            return Err(config_err(anyhow::anyhow!("grid is empty")));
        }
        if grid
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
        {
            return Err(config_err(anyhow::anyhow!(
                "grid must be strictly decreasing"
            )));
        }
        for &h in &grid {
            check_step(&self.triple, h).map_err(classify)?;
        }
        Ok(grid)
    }

    pub fn bounds(&self) -> BoundsSpec {
        self.config.bounds.clone().unwrap_or_default()
    }

    pub fn testcases(&self) -> Result<Vec<TestCase>, Failure> {
        self.config
            .testcases
            .iter()
            .map(|c| self.testcase(c))
            .collect()
    }

    fn testcase(&self, spec: &TestCaseSpec) -> Result<TestCase, Failure> {
        let k = self.triple.k_dim();
        let d = self.algebra.dim();
        let ctx = |what: &str| format!("testcase {}: {what}", spec.name);
        if !(spec.t >= 0.0 && spec.t.is_finite()) {
            return Err(config_err(anyhow::anyhow!(ctx(
                "t must be finite and non-negative"
            ))));
        }
        let step = |pieces: &[PieceSpec], which: &str| -> Result<StepFunction, Failure> {
            let pieces = pieces
                .iter()
                .map(|p| (p.duration, pairs_to_vec(&p.value)))
                .collect();
            StepFunction::new(k, pieces)
                .map_err(|e| config_err(anyhow::anyhow!(ctx(&format!("{which}: {e}")))))
        };
        let observable = match &spec.observable {
            ObservableSpec::Index(i) if *i < d => self.algebra.basis(*i),
            ObservableSpec::Index(i) => {
                return Err(config_err(anyhow::anyhow!(ctx(&format!(
                    "basis index {i} ≥ dimension {d}"
                )))))
            }
            ObservableSpec::Label(l) => match self.algebra.labels().iter().position(|x| x == l) {
                Some(i) => self.algebra.basis(i),
                None => {
                    return Err(config_err(anyhow::anyhow!(ctx(&format!(
                        "unknown basis label {l}"
                    )))))
                }
            },
            ObservableSpec::Coeffs(c) if c.len() == d => pairs_to_vec(c),
            ObservableSpec::Coeffs(c) => {
                return Err(config_err(anyhow::anyhow!(ctx(&format!(
                    "observable has {} coefficients, algebra dimension is {d}",
                    c.len()
                )))))
            }
        };
        Ok(TestCase {
            name: spec.name.clone(),
            f: step(&spec.f, "f")?,
            g: step(&spec.g, "g")?,
            t: spec.t,
            observable,
        })
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn build_triple(
    spec: &TripleSpec,
    alg: &FiniteBialgebra,
    dir: &Path,
) -> Result<(SchurmannTriple, String), Failure> {
    let explicit = spec.block.is_some() || spec.matrices.is_some() || spec.xi.is_some();
    match (&spec.preset, &spec.file, explicit) {
        (Some(name), None, false) => {
            let m = models::model(name)
                .ok_or_else(|| config_err(anyhow::anyhow!("unknown triple preset {name}")))?;
            if m.algebra.data() != alg.data() {
                return Err(config_err(anyhow::anyhow!("preset {name} belongs to fixture {}", m.fixture)));
            }
            Ok((m.triple, name.clone()))
        }
        (None, Some(file), false) => {
            let path = dir.join(file);
            let t = TripleFile::load(&path).map_err(classify)?.into_triple(alg).map_err(classify)?;
            Ok((t, stem(file)))
        }
        (None, None, true) => {
            let xi = spec
                .xi
                .as_ref()
                .ok_or_else(|| config_err(anyhow::anyhow!("[triple] needs `xi`")))?;
            let rep = match (&spec.block, &spec.matrices) {
                (Some(_), Some(_)) => return Err(config_err(anyhow::anyhow!("give `block` or `matrices`, not both"))),
                (Some(b), None) => Representation::faithful_block(alg, b),
                (None, Some(ms)) => ms
                    .iter()
                    .map(|m| rows_to_mat(m, "triple matrix"))
                    .collect::<qlw_core::Result<Vec<_>>>()
                    .and_then(|mats| Representation::new(alg, mats)),
                (None, None) => Representation::faithful(alg),
            }
            .map_err(classify)?;
            let xi: CVector = pairs_to_vec(xi);
            let t = SchurmannTriple::from_rep_vector(alg, rep, xi).map_err(classify)?;
            Ok((t, "explicit".into()))
        }
        _ => Err(config_err(anyhow::anyhow!(
            "[triple] needs exactly one of `preset`, `file`, or `xi` with optional `block`/`matrices`"
        ))),
    }
}
