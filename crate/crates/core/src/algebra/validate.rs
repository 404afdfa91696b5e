use std::fmt;

use serde::Serialize;

use crate::linalg::{kron_vec, max_abs_diff, max_abs_diff_vec, CMatrix, CVector, ONE};

use super::FiniteBialgebra;

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResidual {
    pub axiom: &'static str,
    pub residual: f64,
}

/// Max absolute residual of every bialgebra axiom.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub residuals: Vec<AxiomResidual>,
    pub tol: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn residual(&self, axiom: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.axiom == axiom)
            .map(|r| r.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|r| r.residual.is_nan() || r.residual > self.tol)
            .map(|r| r.axiom)
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>12}  status", "axiom", "residual")?;
        for r in &self.residuals {
            let status = if r.residual <= self.tol { "ok" } else { "FAIL" };
            writeln!(f, "{:<28} {:>12.3e}  {status}", r.axiom, r.residual)?;
        }
        write!(
            f,
            "tol {:.1e}: {}",
            self.tol,
            if self.passed { "passed" } else { "failed" }
        )
    }
}

pub fn validate_bialgebra(alg: &FiniteBialgebra, tol: f64) -> ValidationReport {
    let residuals = vec![
        AxiomResidual {
            axiom: "associativity",
            residual: associativity(alg),
        },
        AxiomResidual {
            axiom: "unit",
            residual: unit_law(alg),
        },
        AxiomResidual {
            axiom: "involution",
            residual: involution(alg),
        },
        AxiomResidual {
            axiom: "counit_homomorphism",
            residual: counit_hom(alg),
        },
        AxiomResidual {
            axiom: "coproduct_homomorphism",
            residual: coproduct_hom(alg),
        },
        AxiomResidual {
            axiom: "coassociativity",
            residual: coassociativity(alg),
        },
        AxiomResidual {
            axiom: "counit_law",
            residual: counit_law(alg),
        },
        AxiomResidual {
            axiom: "faithful_rep_homomorphism",
            residual: rep_hom(alg),
        },
        AxiomResidual {
            axiom: "faithful_rep_injective",
            residual: rep_rank_deficiency(alg),
        },
    ];
    let passed = residuals.iter().all(|r| r.residual <= tol);
    ValidationReport {
        residuals,
        tol,
        passed,
    }
}

fn associativity(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let mut res = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let ij = alg.basis_product(i, j);
            for k in 0..d {
                let lhs = alg.product(&ij, &alg.basis(k));
                let rhs = alg.product(&alg.basis(i), &alg.basis_product(j, k));
                res = res.max(max_abs_diff_vec(&lhs, &rhs));
            }
        }
    }
    res
}

fn unit_law(alg: &FiniteBialgebra) -> f64 {
    let u = alg.unit();
    (0..alg.dim())
        .map(|i| {
            let b = alg.basis(i);
            max_abs_diff_vec(&alg.product(u, &b), &b).max(max_abs_diff_vec(&alg.product(&b, u), &b))
        })
        .fold(0.0, f64::max)
}

fn involution(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let mut res = max_abs_diff_vec(&alg.star(alg.unit()), alg.unit());
    for i in 0..d {
        let b = alg.basis(i);
        res = res.max(max_abs_diff_vec(&alg.star(&alg.star(&b)), &b));
        for j in 0..d {
            let lhs = alg.star(&alg.basis_product(i, j));
            let rhs = alg.product(&alg.basis_star(j), &alg.basis_star(i));
            res = res.max(max_abs_diff_vec(&lhs, &rhs));
        }
    }
    res
}

fn counit_hom(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let e = alg.counit();
    let mut res = (alg.counit_of(alg.unit()) - ONE).norm();
    for i in 0..d {
        res = res.max((alg.counit_of(&alg.basis_star(i)) - e[i].conj()).norm());
        for j in 0..d {
            res = res.max((alg.counit_of(&alg.basis_product(i, j)) - e[i] * e[j]).norm());
        }
    }
    res
}

/// Product in `A ⊗ A` of two `d²` coefficient vectors.
fn tensor_product(alg: &FiniteBialgebra, x: &CVector, y: &CVector) -> CVector {
    let d = alg.dim();
    let mut out = CVector::zeros(d * d);
    for (xi, xc) in x.iter().enumerate().filter(|(_, c)| c.norm() != 0.0) {
        let (p, q) = (xi / d, xi % d);
        for (yi, yc) in y.iter().enumerate().filter(|(_, c)| c.norm() != 0.0) {
            let (r, s) = (yi / d, yi % d);
            out += kron_vec(&alg.basis_product(p, r), &alg.basis_product(q, s)) * (xc * yc);
        }
    }
    out
}

fn tensor_star(alg: &FiniteBialgebra, x: &CVector) -> CVector {
    let d = alg.dim();
    let mut out = CVector::zeros(d * d);
    for (idx, c) in x.iter().enumerate().filter(|(_, c)| c.norm() != 0.0) {
        let (p, q) = (idx / d, idx % d);
        out += kron_vec(&alg.basis_star(p), &alg.basis_star(q)) * c.conj();
    }
    out
}

fn coproduct_hom(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let u = alg.unit();
    let mut res = max_abs_diff_vec(&alg.coproduct_of(u), &kron_vec(u, u));
    let images: Vec<CVector> = (0..d).map(|i| alg.coproduct_of(&alg.basis(i))).collect();
    for i in 0..d {
        let lhs = alg.coproduct_of(&alg.basis_star(i));
        res = res.max(max_abs_diff_vec(&lhs, &tensor_star(alg, &images[i])));
        for j in 0..d {
            let lhs = alg.coproduct_of(&alg.basis_product(i, j));
            let rhs = tensor_product(alg, &images[i], &images[j]);
            res = res.max(max_abs_diff_vec(&lhs, &rhs));
        }
    }
    res
}

fn coassociativity(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let cop = alg.coproduct();
    let mut res = 0.0f64;
    for i in 0..d {
        let mut left = CVector::zeros(d * d * d);
        let mut right = CVector::zeros(d * d * d);
        for &(j, k, c) in alg.coproduct_terms(i) {
            // (Δ ⊗ id): Δ(b_j) ⊗ b_k
            for pq in 0..d * d {
                left[pq * d + k] += c * cop[(pq, j)];
            }
            // (id ⊗ Δ): b_j ⊗ Δ(b_k)
            for qr in 0..d * d {
                right[j * d * d + qr] += c * cop[(qr, k)];
            }
        }
        res = res.max(max_abs_diff_vec(&left, &right));
    }
    res
}

fn counit_law(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let e = alg.counit();
    let mut res = 0.0f64;
    for i in 0..d {
        let mut left = CVector::zeros(d);
        let mut right = CVector::zeros(d);
        for &(j, k, c) in alg.coproduct_terms(i) {
            left[k] += c * e[j];
            right[j] += c * e[k];
        }
        let b = alg.basis(i);
        res = res
            .max(max_abs_diff_vec(&left, &b))
            .max(max_abs_diff_vec(&right, &b));
    }
    res
}

fn rep_hom(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let rho = alg.faithful_rep();
    let r = alg.rep_dim();
    let mut res = max_abs_diff(&alg.rep_of(alg.unit()), &CMatrix::identity(r, r));
    for i in 0..d {
        res = res.max(max_abs_diff(
            &alg.rep_of(&alg.basis_star(i)),
            &rho[i].adjoint(),
        ));
        for j in 0..d {
            let lhs = alg.rep_of(&alg.basis_product(i, j));
            res = res.max(max_abs_diff(&lhs, &(&rho[i] * &rho[j])));
        }
    }
    res
}

/// `d − rank` of the faithful representation viewed as a linear map `A → M_r`.
fn rep_rank_deficiency(alg: &FiniteBialgebra) -> f64 {
    let d = alg.dim();
    let r = alg.rep_dim();
    let stacked = CMatrix::from_fn(r * r, d, |p, i| alg.faithful_rep()[i][(p / r, p % r)]);
    let sv = stacked.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|s| **s > 1e-10 * top.max(1.0)).count();
    (d - rank.min(d)) as f64
}
