use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{format_pair_row, mat_to_rows, pairs_to_vec, rows_to_mat, vec_to_pairs, Pair};
use crate::linalg::C64;

use super::{validate_bialgebra, BialgebraData, FiniteBialgebra};

/// Tolerance applied when a fixture file is loaded.
pub const FIXTURE_TOL: f64 = 1e-9;

/// On-disk layout of a bialgebra fixture.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub dim: usize,
    pub labels: Vec<String>,
    pub mult: Vec<Vec<Vec<Pair>>>,
    pub unit: Vec<Pair>,
    pub star: Vec<Vec<Pair>>,
    pub counit: Vec<Pair>,
    pub coproduct: Vec<Vec<Pair>>,
    pub faithful_rep: Vec<Vec<Vec<Pair>>>,
}

impl FixtureFile {
    pub fn from_bialgebra(alg: &FiniteBialgebra) -> Self {
        let d = alg.dim();
        let data = alg.data();
        Self {
            dim: d,
            labels: data.labels.clone(),
            mult: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            (0..d)
                                .map(|k| crate::io::pair(&alg.mult(i, j, k)))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            unit: vec_to_pairs(&data.unit),
            star: mat_to_rows(&data.star),
            counit: vec_to_pairs(&data.counit),
            coproduct: mat_to_rows(&data.coproduct),
            faithful_rep: data.faithful_rep.iter().map(mat_to_rows).collect(),
        }
    }

    pub fn into_bialgebra(self) -> Result<FiniteBialgebra> {
        let d = self.dim;
        if self.labels.len() != d {
            return Err(Error::Structure(format!(
                "{} labels for dim {d}",
                self.labels.len()
            )));
        }
        if self.mult.len() != d
            || self
                .mult
                .iter()
                .any(|m| m.len() != d || m.iter().any(|r| r.len() != d))
        {
            return Err(Error::Structure(format!("mult must be {d}×{d}×{d}")));
        }
        let mult: Vec<C64> = self
            .mult
            .iter()
            .flat_map(|m| m.iter().flat_map(|r| r.iter().map(crate::io::c64)))
            .collect();
        let faithful_rep = self
            .faithful_rep
            .iter()
            .map(|m| rows_to_mat(m, "faithful_rep"))
            .collect::<Result<Vec<_>>>()?;
        FiniteBialgebra::new(BialgebraData {
            labels: self.labels,
            mult,
            unit: pairs_to_vec(&self.unit),
            star: rows_to_mat(&self.star, "star")?,
            counit: pairs_to_vec(&self.counit),
            coproduct: rows_to_mat(&self.coproduct, "coproduct")?,
            faithful_rep,
        })
    }

    /// JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        let labels = serde_json::to_string(&self.labels).expect("labels serialize");
        let _ = writeln!(s, "  \"dim\": {},\n  \"labels\": {labels},", self.dim);
        let block = |rows: &[Vec<Pair>], indent: &str| -> String {
            let lines: Vec<String> = rows
                .iter()
                .map(|r| format!("{indent}{}", format_pair_row(r)))
                .collect();
            format!("[\n{}\n{}]", lines.join(",\n"), &indent[2..])
        };
        let tensor = |mats: &[Vec<Vec<Pair>>]| -> String {
            let items: Vec<String> = mats
                .iter()
                .map(|m| format!("    {}", block(m, "      ")))
                .collect();
            format!("[\n{}\n  ]", items.join(",\n"))
        };
        let _ = writeln!(s, "  \"mult\": {},", tensor(&self.mult));
        let _ = writeln!(s, "  \"unit\": {},", format_pair_row(&self.unit));
        let _ = writeln!(s, "  \"star\": {},", block(&self.star, "    "));
        let _ = writeln!(s, "  \"counit\": {},", format_pair_row(&self.counit));
        let _ = writeln!(s, "  \"coproduct\": {},", block(&self.coproduct, "    "));
        let _ = writeln!(s, "  \"faithful_rep\": {}", tensor(&self.faithful_rep));
        s.push_str("}\n");
        s
    }
}

/// Parses a fixture without checking the axioms.
pub fn parse_fixture(json: &str) -> Result<FiniteBialgebra> {
    let file: FixtureFile =
        serde_json::from_str(json).map_err(|e| Error::Fixture(e.to_string()))?;
    file.into_bialgebra()
}

/// Loads a fixture and accepts it only if every axiom holds to [`FIXTURE_TOL`].
pub fn load_fixture(path: impl AsRef<Path>) -> Result<FiniteBialgebra> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    let alg = parse_fixture(&text)?;
    let report = validate_bialgebra(&alg, FIXTURE_TOL);
    if !report.passed {
        return Err(Error::Validation(Box::new(report)));
    }
    Ok(alg)
}

pub fn save_fixture(alg: &FiniteBialgebra, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, FixtureFile::from_bialgebra(alg).to_json())?;
    Ok(())
}
