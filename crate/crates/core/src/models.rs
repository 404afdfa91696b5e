//! The shipped fixtures and the named (bialgebra, triple) models used by the
//! example configs and the test suites.

use crate::algebra::{
    build_function_algebra, build_group_algebra, parse_fixture, s3_standard_irrep, FiniteBialgebra,
    Group,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::schurmann::{Representation, SchurmannTriple};

const KAC_PALJUTKIN_JSON: &str = include_str!("../../../fixtures/kac_paljutkin.json");

/// The 8-dimensional Kac–Paljutkin quantum group `ℂ⁴ ⊕ M₂(ℂ)`.
pub fn kac_paljutkin() -> FiniteBialgebra {
    parse_fixture(KAC_PALJUTKIN_JSON).expect("embedded Kac–Paljutkin fixture parses")
}

/// Every shipped fixture, by file stem.
pub fn shipped_fixtures() -> Vec<(&'static str, FiniteBialgebra)> {
    let z2 = Group::cyclic(2);
    let z3 = Group::cyclic(3);
    let s3 = Group::symmetric3();
    vec![
        ("function_z2", build_function_algebra(&z2)),
        ("function_z3", build_function_algebra(&z3)),
        ("function_s3", build_function_algebra(&s3)),
        ("group_z2", build_group_algebra(&z2)),
        ("group_z3", build_group_algebra(&z3)),
        ("group_s3", build_group_algebra(&s3)),
        ("kac_paljutkin", kac_paljutkin()),
    ]
}

pub fn fixture(name: &str) -> Option<FiniteBialgebra> {
    shipped_fixtures()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, a)| a)
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: &'static str,
    pub fixture: &'static str,
    pub algebra: FiniteBialgebra,
    pub triple: SchurmannTriple,
}

impl Model {
    pub fn commutative(&self) -> bool {
        let d = self.algebra.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                crate::linalg::max_abs_diff_vec(
                    &self.algebra.basis_product(i, j),
                    &self.algebra.basis_product(j, i),
                ) == 0.0
            })
        })
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn vector(entries: &[C64]) -> CVector {
    CVector::from_column_slice(entries)
}

fn scalar_rep(alg: &FiniteBialgebra, values: &[C64]) -> Result<Representation> {
    Representation::new(
        alg,
        values
            .iter()
            .map(|v| CMatrix::from_element(1, 1, *v))
            .collect(),
    )
}

fn build(name: &'static str, fixture_name: &'static str) -> Result<Model> {
    let alg = fixture(fixture_name).ok_or_else(|| Error::Fixture(fixture_name.into()))?;
    let (rep, xi) = match name {
        // ν(f) = f(1) on C(ℤ/2): the classical Poisson jump 0 → 1.
        "poisson_z2" => (
            Representation::faithful_block(&alg, &[1])?,
            vector(&[c(1.0, 0.0)]),
        ),
        "eval_z3" => (
            Representation::faithful_block(&alg, &[1, 2])?,
            vector(&[c(1.0, 0.0), c(0.0, 1.0)]),
        ),
        // evaluation at the transposition (12) and the 3-cycle 231
        "walk_s3" => (
            Representation::faithful_block(&alg, &[1, 4])?,
            vector(&[c(0.6, 0.0), c(0.0, 0.8)]),
        ),
        "character_z2" => (
            scalar_rep(&alg, &[c(1.0, 0.0), c(-1.0, 0.0)])?,
            vector(&[c(1.0, 0.0)]),
        ),
        "group_z3" => {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
            (
                scalar_rep(&alg, &[c(1.0, 0.0), w, w * w])?,
                vector(&[c(1.0, 0.0)]),
            )
        }
        "standard_s3" => (
            Representation::new(&alg, s3_standard_irrep())?,
            vector(&[c(0.6, 0.0), c(0.8, 0.0)]),
        ),
        // the M₂ block of ℂ⁴ ⊕ M₂
        "kac_paljutkin" => (
            Representation::faithful_block(&alg, &[4, 5])?,
            vector(&[c(0.6, 0.0), c(0.0, 0.8)]),
        ),
        "kac_paljutkin_faithful" => (
            Representation::faithful(&alg)?,
            vector(&[
                c(0.5, 0.0),
                c(0.0, 0.3),
                c(0.0, 0.0),
                c(0.3, 0.0),
                c(0.5, 0.0),
                c(-0.1, 0.4),
            ]),
        ),
        _ => return Err(Error::Fixture(format!("unknown model {name}"))),
    };
    let triple = SchurmannTriple::from_rep_vector(&alg, rep, xi)?;
    Ok(Model {
        name,
        fixture: fixture_name,
        algebra: alg,
        triple,
    })
}

pub const MODEL_NAMES: [(&str, &str); 8] = [
    ("poisson_z2", "function_z2"),
    ("eval_z3", "function_z3"),
    ("walk_s3", "function_s3"),
    ("character_z2", "group_z2"),
    ("group_z3", "group_z3"),
    ("standard_s3", "group_s3"),
    ("kac_paljutkin", "kac_paljutkin"),
    ("kac_paljutkin_faithful", "kac_paljutkin"),
];

pub fn model(name: &str) -> Option<Model> {
    MODEL_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .and_then(|(n, f)| build(n, f).ok())
}

pub fn standard_models() -> Vec<Model> {
    MODEL_NAMES
        .iter()
        .map(|(n, f)| build(n, f).expect("standard models are valid"))
        .collect()
}
