//! The scaled one-step homomorphisms `β^(h): A → B(ĥ)`, the walk recursion
//! `J_n = (J_{n−1} ⊗ β)Δ`, and the block deviations of `β^(h)` from the
//! stochastic generator.
//!
//! Walk matrix elements between product vectors never need the tensor power:
//! `⟨⊗u_i, J_n(a) ⊗v_i⟩ = (ω_1 ⋆ … ⋆ ω_n)(a)` with `ω_i = ⟨u_i, β(·) v_i⟩`.
//! [`walk_dense`] materializes `J_n` only as an oracle for that identity.

use serde::Serialize;

use crate::algebra::{
    convolve_unchecked, map_norm_estimate, FiniteBialgebra, Functional, NormEstimator,
};
use crate::error::{Error, Result};
use crate::io::mat_to_rows;
use crate::linalg::{
    basis_vector, hermitian_eigenvalues, kron_accumulate, max_abs_diff, re, CMatrix, CVector, C64,
    ONE, ZERO,
};
use crate::schurmann::{homomorphism_residuals, RepResiduals, SchurmannTriple};

/// Default bound on the matrix dimension `(1 + dim k)^n` of [`walk_dense`].
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Slack on the upper end of `(0, 1/λ]` for rounding in `λ · h`.
const RANGE_SLACK: f64 = 1e-12;

/// A unital *-homomorphism `A → B(ĥ)`, `ĥ = ℂΩ ⊕ k`, stored on the basis.
///
/// Block layout `[[β₁, β₂], [β₃, β₄]]` with respect to `ℂΩ ⊕ k`.
#[derive(Clone, Debug)]
pub struct WalkStep {
    pub h: f64,
    mats: Vec<CMatrix>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepResiduals {
    pub homomorphism: RepResiduals,
    /// `max ‖β₂(b_i) − β₃(b_i*)†‖`.
    pub adjoint_blocks: f64,
}

impl StepResiduals {
    pub fn max(&self) -> f64 {
        self.homomorphism.max().max(self.adjoint_blocks)
    }
}

impl WalkStep {
    pub fn from_mats(h: f64, mats: Vec<CMatrix>) -> Self {
        Self { h, mats }
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn hat_dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn k_dim(&self) -> usize {
        self.hat_dim() - 1
    }

    pub fn image(&self, x: &CVector) -> CMatrix {
        FiniteBialgebra::apply_linear(&self.mats, x)
    }

    pub fn beta1(&self, i: usize) -> C64 {
        self.mats[i][(0, 0)]
    }

    pub fn beta2(&self, i: usize) -> CMatrix {
        self.mats[i].view((0, 1), (1, self.k_dim())).into_owned()
    }

    pub fn beta3(&self, i: usize) -> CVector {
        self.mats[i]
            .view((1, 0), (self.k_dim(), 1))
            .column(0)
            .into_owned()
    }

    pub fn beta4(&self, i: usize) -> CMatrix {
        let k = self.k_dim();
        self.mats[i].view((1, 1), (k, k)).into_owned()
    }

    pub fn residuals(&self, alg: &FiniteBialgebra) -> StepResiduals {
        let homomorphism = homomorphism_residuals(alg, &self.mats);
        let k = self.k_dim();
        let mut adjoint_blocks = 0.0f64;
        for i in 0..alg.dim() {
            let b3_star = self
                .image(&alg.basis_star(i))
                .view((1, 0), (k, 1))
                .into_owned();
            adjoint_blocks = adjoint_blocks.max(max_abs_diff(&self.beta2(i), &b3_star.adjoint()));
        }
        StepResiduals {
            homomorphism,
            adjoint_blocks,
        }
    }

    pub fn max_abs_diff(&self, other: &WalkStep) -> f64 {
        self.mats
            .iter()
            .zip(other.mats.iter())
            .map(|(a, b)| max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    /// Debug dump: `{ "h", "mats": [[ [re, im] ]] }`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump {
            h: f64,
            mats: Vec<Vec<Vec<crate::io::Pair>>>,
        }
        serde_json::to_value(Dump {
            h: self.h,
            mats: self.mats.iter().map(mat_to_rows).collect(),
        })
        .expect("walk step serializes")
    }
}

/// Upper end of the admissible step interval, `1/λ` (infinite when `ξ̃ = 0`).
pub fn max_step(triple: &SchurmannTriple) -> f64 {
    if triple.lambda > 0.0 {
        1.0 / triple.lambda
    } else {
        f64::INFINITY
    }
}

pub fn check_step(triple: &SchurmannTriple, h: f64) -> Result<()> {
    let max = max_step(triple);
    if h.is_nan() || h <= 0.0 || triple.lambda * h > 1.0 + RANGE_SLACK {
        return Err(Error::StepOutOfRange { h, max });
    }
    Ok(())
}

/// `ε ⊕ ν`, the step for `ξ̃ = 0` and the `h → 0` limit of every step.
pub fn trivial_step(alg: &FiniteBialgebra, triple: &SchurmannTriple, h: f64) -> WalkStep {
    let k = triple.k_dim();
    let mats = (0..alg.dim())
        .map(|i| {
            let mut m = CMatrix::zeros(k + 1, k + 1);
            m[(0, 0)] = alg.counit()[i];
            m.view_mut((1, 1), (k, k)).copy_from(&triple.rep.mats()[i]);
            m
        })
        .collect();
    WalkStep::from_mats(h, mats)
}

/// `β^(h)` from the closed-form block formulas, with `s = √(1 − λh)`:
///
/// ```text
/// β₁(a) = (1 − λh) ε(a) + λh ν_ξ(a)
/// β₃(a) = √(λh) (ν(a)ξ − s ε(a) ξ + (s − 1) ν_ξ(a) ξ)
/// β₄(a) = (λh ε(a) + (2 − 2s − λh) ν_ξ(a)) |ξ⟩⟨ξ|
///         + (s − 1) |ν(a)ξ⟩⟨ξ| + (s − 1) |ξ⟩⟨ν(a*)ξ| + ν(a)
/// β₂(a) = β₃(a*)†
/// ```
pub fn beta_direct(alg: &FiniteBialgebra, triple: &SchurmannTriple, h: f64) -> Result<WalkStep> {
    check_step(triple, h)?;
    let Some(xi) = triple.unit_xi() else {
        return Ok(trivial_step(alg, triple, h));
    };
    let d = alg.dim();
    let k = triple.k_dim();
    let lh = (triple.lambda * h).min(1.0);
    let s = (1.0 - lh).max(0.0).sqrt();
    let rl = lh.sqrt();
    let eps = alg.counit();
    let nu = triple.rep.mats();
    let proj = &xi * xi.adjoint();

    let beta3: Vec<CVector> = (0..d)
        .map(|i| {
            let nu_xi = &nu[i] * &xi;
            let nu_xi_scalar = xi.dotc(&nu_xi);
            (&nu_xi - &xi * (eps[i] * s) + &xi * (nu_xi_scalar * (s - 1.0))) * re(rl)
        })
        .collect();

    let mats = (0..d)
        .map(|i| {
            let nu_xi = &nu[i] * &xi;
            let nu_xi_scalar = xi.dotc(&nu_xi);
            let nu_star_xi = triple.rep.image(&alg.basis_star(i)) * &xi;

            let beta1 = eps[i] * (1.0 - lh) + nu_xi_scalar * lh;
            let beta4 = &proj * (eps[i] * lh + nu_xi_scalar * (2.0 - 2.0 * s - lh))
                + &nu_xi * xi.adjoint() * C64::new(s - 1.0, 0.0)
                + &xi * nu_star_xi.adjoint() * C64::new(s - 1.0, 0.0)
                + &nu[i];
            let mut beta3_star = CVector::zeros(k);
            for (j, c) in alg.basis_star(i).iter().enumerate() {
                if *c != ZERO {
                    beta3_star += &beta3[j] * *c;
                }
            }

            let mut m = CMatrix::zeros(k + 1, k + 1);
            m[(0, 0)] = beta1;
            for p in 0..k {
                m[(p + 1, 0)] = beta3[i][p];
                m[(0, p + 1)] = beta3_star[p].conj();
            }
            m.view_mut((1, 1), (k, k)).copy_from(&beta4);
            m
        })
        .collect();
    Ok(WalkStep::from_mats(h, mats))
}

/// The rotation of the GNS space of `(1 − λh)ε + λh ν_ξ` onto `ℂΩ ⊕ k`.
#[derive(Clone, Debug)]
pub struct GnsRotation {
    /// `Ω_h = √(1 − λh) Ω ⊕ √(λh) ξ`.
    pub omega_h: CVector,
    /// `Σ_h = −√(λh) Ω ⊕ √(1 − λh) ξ`.
    pub sigma_h: CVector,
    /// `U_h(α Ω_h + α' Σ_h + η) = α Ω + α' ξ + η` for `η ⊥ Ω_h, Σ_h`.
    pub unitary: CMatrix,
}

pub fn gns_rotation(triple: &SchurmannTriple, h: f64) -> Result<GnsRotation> {
    check_step(triple, h)?;
    let k = triple.k_dim();
    let n = k + 1;
    let omega = basis_vector(n, 0);
    let Some(xi) = triple.unit_xi() else {
        return Ok(GnsRotation {
            omega_h: omega.clone(),
            sigma_h: CVector::zeros(n),
            unitary: CMatrix::identity(n, n),
        });
    };
    let lh = (triple.lambda * h).min(1.0);
    let s = (1.0 - lh).max(0.0).sqrt();
    let rl = lh.sqrt();
    let mut xi_hat = CVector::zeros(n);
    xi_hat.rows_mut(1, k).copy_from(&xi);

    let omega_h = &omega * re(s) + &xi_hat * re(rl);
    let sigma_h = -&omega * re(rl) + &xi_hat * re(s);
    let mut rest = CMatrix::identity(n, n) - &omega * omega.adjoint() - &xi_hat * xi_hat.adjoint();
    rest[(0, 0)] = ZERO;
    let unitary = &omega * omega_h.adjoint() + &xi_hat * sigma_h.adjoint() + rest;
    Ok(GnsRotation {
        omega_h,
        sigma_h,
        unitary,
    })
}

/// `β^(h)` through the GNS route: compress `ε ⊕ ν` by the projections onto
/// `ℂΩ_h` and its complement, then conjugate each block by `U_h`.
pub fn beta_gns(alg: &FiniteBialgebra, triple: &SchurmannTriple, h: f64) -> Result<WalkStep> {
    let rot = gns_rotation(triple, h)?;
    let base = trivial_step(alg, triple, h);
    if triple.lambda == 0.0 {
        return Ok(base);
    }
    let n = rot.omega_h.len();
    let p = &rot.omega_h * rot.omega_h.adjoint();
    let q = CMatrix::identity(n, n) - &p;
    let u = &rot.unitary;
    let ud = u.adjoint();
    let mats = base
        .mats()
        .iter()
        .map(|b| {
            let blocks = [&p * b * &p, &p * b * &q, &q * b * &p, &q * b * &q];
            blocks
                .iter()
                .fold(CMatrix::zeros(n, n), |acc, blk| acc + u * blk * &ud)
        })
        .collect();
    Ok(WalkStep::from_mats(h, mats))
}

/// `ω(·) = ⟨u, β(·) v⟩`, conjugate-linear in `u`.
pub fn slot_functional(beta: &WalkStep, u: &CVector, v: &CVector) -> Functional {
    Functional::new(CVector::from_iterator(
        beta.mats().len(),
        beta.mats().iter().map(|m| u.dotc(&(m * v))),
    ))
}

/// `a ↦ tr(ρ β(a))`.
pub fn density_functional(beta: &WalkStep, rho: &CMatrix) -> Functional {
    Functional::new(CVector::from_iterator(
        beta.mats().len(),
        beta.mats().iter().map(|m| (rho * m).trace()),
    ))
}

/// `ω_1 ⋆ ω_2 ⋆ … ⋆ ω_n`, starting from `ε`.
pub fn ordered_convolution<'a>(
    alg: &FiniteBialgebra,
    functionals: impl IntoIterator<Item = &'a Functional>,
) -> Functional {
    functionals
        .into_iter()
        .fold(Functional::counit(alg), |acc, w| {
            convolve_unchecked(alg, &acc, w)
        })
}

/// `|Ω⟩⟨Ω|` on a space of the given dimension.
pub fn vacuum_density(dim: usize) -> CMatrix {
    let mut rho = CMatrix::zeros(dim, dim);
    rho[(0, 0)] = ONE;
    rho
}

pub fn check_density(rho: &CMatrix, dim: usize, tol: f64) -> Result<()> {
    if rho.shape() != (dim, dim) {
        return Err(Error::NotADensity(format!(
            "shape {:?}, expected ({dim}, {dim})",
            rho.shape()
        )));
    }
    let asym = max_abs_diff(rho, &rho.adjoint());
    if asym > tol {
        return Err(Error::NotADensity(format!(
            "not Hermitian (residual {asym:.3e})"
        )));
    }
    let trace = rho.trace();
    if (trace - ONE).norm() > tol {
        return Err(Error::NotADensity(format!("trace {trace} ≠ 1")));
    }
    let low = hermitian_eigenvalues(rho)[0];
    if low < -tol {
        return Err(Error::NotADensity(format!("eigenvalue {low:.3e} < 0")));
    }
    Ok(())
}

/// `κ_0, …, κ_n` with `κ_0 = ε` and `κ_m = κ_{m−1} ⋆ (ρ ∘ β)`.
pub fn walk_vacuum_sequence(
    alg: &FiniteBialgebra,
    beta: &WalkStep,
    rho: &CMatrix,
    n: usize,
) -> Result<Vec<Functional>> {
    check_density(rho, beta.hat_dim(), 1e-12)?;
    let step = density_functional(beta, rho);
    let mut seq = Vec::with_capacity(n + 1);
    seq.push(Functional::counit(alg));
    for m in 0..n {
        let next = convolve_unchecked(alg, &seq[m], &step);
        seq.push(next);
    }
    Ok(seq)
}

/// `J_n(b_i)` as `(1 + dim k)^n`-square matrices, slot 1 the major tensor factor.
#[derive(Clone, Debug)]
pub struct DenseWalk {
    pub n: usize,
    pub mats: Vec<CMatrix>,
}

impl DenseWalk {
    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn image(&self, x: &CVector) -> CMatrix {
        FiniteBialgebra::apply_linear(&self.mats, x)
    }

    /// `⟨u_1 ⊗ … ⊗ u_n, J_n(a) v_1 ⊗ … ⊗ v_n⟩`.
    pub fn matrix_element(&self, u: &[CVector], v: &[CVector], a: &CVector) -> C64 {
        let uu = product_vector(u);
        let vv = product_vector(v);
        uu.dotc(&(self.image(a) * vv))
    }

    /// `⟨Ω^{⊗n}, J_n(a) Ω^{⊗n}⟩`.
    pub fn vacuum_compression(&self, a: &CVector) -> C64 {
        self.image(a)[(0, 0)]
    }
}

/// `v_1 ⊗ … ⊗ v_n` (the scalar 1 for an empty list).
pub fn product_vector(slots: &[CVector]) -> CVector {
    slots.iter().fold(CVector::from_element(1, ONE), |acc, v| {
        crate::linalg::kron_vec(&acc, v)
    })
}

/// Literal tensor-power walk, `J_0 = ε`, `J_m = (J_{m−1} ⊗ β)Δ`.
pub fn walk_dense(
    alg: &FiniteBialgebra,
    beta: &WalkStep,
    n: usize,
    cap: usize,
) -> Result<DenseWalk> {
    let hat = beta.hat_dim();
    let dim = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(hat));
    match dim {
        Some(dim) if dim <= cap => {}
        _ => {
            return Err(Error::DenseCapExceeded {
                dim: dim.unwrap_or(usize::MAX),
                cap,
            })
        }
    }
    let d = alg.dim();
    let mut current: Vec<CMatrix> = (0..d)
        .map(|i| CMatrix::from_element(1, 1, alg.counit()[i]))
        .collect();
    let mut size = 1;
    for _ in 0..n {
        size *= hat;
        current = (0..d)
            .map(|i| {
                let mut out = CMatrix::zeros(size, size);
                for &(j, k, c) in alg.coproduct_terms(i) {
                    kron_accumulate(&mut out, c, &current[j], &beta.mats()[k]);
                }
                out
            })
            .collect();
    }
    Ok(DenseWalk { n, mats: current })
}

/// Sampled norms of `β₁ − (ε + hγ)`, `β₃ − √h δ` and `β₄ − ν`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockErrors {
    pub e1: f64,
    pub e3: f64,
    pub e4: f64,
}

pub fn beta_block_errors(
    alg: &FiniteBialgebra,
    triple: &SchurmannTriple,
    beta: &WalkStep,
    estimator: NormEstimator,
) -> Result<BlockErrors> {
    let h = beta.h;
    let d = alg.dim();
    let eps = alg.counit();
    let dev1: Vec<CMatrix> = (0..d)
        .map(|i| CMatrix::from_element(1, 1, beta.beta1(i) - eps[i] - triple.gamma.coeffs[i] * h))
        .collect();
    let dev3: Vec<CMatrix> = (0..d)
        .map(|i| {
            let v = beta.beta3(i) - &triple.delta[i] * re(h.sqrt());
            CMatrix::from_column_slice(v.len(), 1, v.as_slice())
        })
        .collect();
    let dev4: Vec<CMatrix> = (0..d)
        .map(|i| beta.beta4(i) - &triple.rep.mats()[i])
        .collect();
    Ok(BlockErrors {
        e1: map_norm_estimate(alg, &dev1, estimator)?,
        e3: map_norm_estimate(alg, &dev3, estimator)?,
        e4: map_norm_estimate(alg, &dev4, estimator)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{convolve, DEFAULT_SEED};
    use crate::models::{model, standard_models, Model};

    fn poisson() -> Model {
        model("poisson_z2").unwrap()
    }

    fn test_vector(len: usize, shift: f64) -> CVector {
        CVector::from_fn(len, |i, _| {
            C64::new(
                (1.3 * i as f64 + shift).sin(),
                (0.7 * i as f64 - shift).cos(),
            )
        })
    }

    #[test]
    fn unit_maps_to_identity() {
        for m in standard_models() {
            let beta = beta_direct(&m.algebra, &m.triple, 0.5 / m.triple.lambda).unwrap();
            let one = beta.image(m.algebra.unit());
            let eye = CMatrix::identity(beta.hat_dim(), beta.hat_dim());
            assert!(max_abs_diff(&one, &eye) < 1e-14, "{}", m.name);
        }
    }

    #[test]
    fn poisson_endpoint_flips_deterministically() {
        let m = poisson();
        let beta = beta_direct(&m.algebra, &m.triple, 1.0).unwrap();
        assert!((beta.beta1(1) - ONE).norm() < 1e-15);
        assert!(beta.beta1(0).norm() < 1e-15);
    }

    #[test]
    fn homomorphism_on_s3() {
        let m = model("walk_s3").unwrap();
        let beta = beta_direct(&m.algebra, &m.triple, 0.25).unwrap();
        assert!(beta.residuals(&m.algebra).max() <= 1e-10);
        let m = model("standard_s3").unwrap();
        let beta = beta_direct(&m.algebra, &m.triple, 0.25).unwrap();
        assert!(beta.residuals(&m.algebra).max() <= 1e-10);
    }

    #[test]
    fn every_model_gives_homomorphisms() {
        for m in standard_models() {
            let top = max_step(&m.triple);
            for frac in [0.01, 0.3, 0.77, 1.0] {
                let h = frac * top;
                for beta in [
                    beta_direct(&m.algebra, &m.triple, h),
                    beta_gns(&m.algebra, &m.triple, h),
                ] {
                    let beta = beta.unwrap();
                    assert!(
                        beta.residuals(&m.algebra).max() <= 1e-10,
                        "{} h = {h}",
                        m.name
                    );
                }
            }
        }
    }

    #[test]
    fn rotation_is_orthonormal() {
        for m in standard_models() {
            let rot = gns_rotation(&m.triple, 0.5 / m.triple.lambda).unwrap();
            assert!(rot.omega_h.dotc(&rot.sigma_h).norm() < 1e-15);
            assert!((rot.omega_h.norm() - 1.0).abs() < 1e-15);
            assert!((rot.sigma_h.norm() - 1.0).abs() < 1e-15);
            let n = rot.unitary.nrows();
            let gram = rot.unitary.adjoint() * &rot.unitary;
            assert!(max_abs_diff(&gram, &CMatrix::identity(n, n)) < 1e-14);
        }
    }

    #[test]
    fn direct_and_gns_agree() {
        for m in standard_models() {
            let h = 0.3 / m.triple.lambda;
            let a = beta_direct(&m.algebra, &m.triple, h).unwrap();
            let b = beta_gns(&m.algebra, &m.triple, h).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-10, "{}", m.name);
        }
    }

    #[test]
    fn small_steps_approach_trivial_step() {
        for m in standard_models() {
            let dev = |j: i32| {
                let h = 2f64.powi(-j) / m.triple.lambda;
                beta_direct(&m.algebra, &m.triple, h)
                    .unwrap()
                    .max_abs_diff(&trivial_step(&m.algebra, &m.triple, h))
            };
            let (d5, d10) = (dev(5), dev(10));
            assert!(d10 < d5 / 4.0 && d10 < 0.1, "{}: {d5} {d10}", m.name);
        }
    }

    #[test]
    fn zero_vector_gives_trivial_step() {
        let m = model("kac_paljutkin").unwrap();
        let rep = m.triple.rep.clone();
        let t = SchurmannTriple::from_rep_vector(&m.algebra, rep, CVector::zeros(2)).unwrap();
        assert_eq!(max_step(&t), f64::INFINITY);
        let beta = beta_direct(&m.algebra, &t, 3.0).unwrap();
        assert_eq!(beta.max_abs_diff(&trivial_step(&m.algebra, &t, 3.0)), 0.0);
        let errs = beta_block_errors(&m.algebra, &t, &beta, NormEstimator::default()).unwrap();
        assert_eq!(
            errs,
            BlockErrors {
                e1: 0.0,
                e3: 0.0,
                e4: 0.0
            }
        );
    }

    #[test]
    fn steps_outside_range_are_rejected() {
        let m = poisson();
        for h in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                beta_direct(&m.algebra, &m.triple, h),
                Err(Error::StepOutOfRange { .. })
            ));
            assert!(beta_gns(&m.algebra, &m.triple, h).is_err());
        }
        assert!(check_step(&m.triple, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn poisson_vacuum_sequence() {
        let m = poisson();
        let h = 0.1;
        let beta = beta_direct(&m.algebra, &m.triple, h).unwrap();
        let seq = walk_vacuum_sequence(&m.algebra, &beta, &vacuum_density(2), 10).unwrap();
        assert_eq!(seq[0], Functional::counit(&m.algebra));
        // two-state chain flipping with probability h
        for (n, k) in seq.iter().enumerate() {
            let exact = (1.0 - (1.0 - 2.0 * h).powi(n as i32)) / 2.0;
            assert!((k.coeffs[1] - re(exact)).norm() < 1e-14, "n = {n}");
        }
        assert!((seq[10].coeffs[1].re - 0.4463129088).abs() < 1e-10);
        let k34 = convolve(&m.algebra, &seq[3], &seq[4]).unwrap();
        assert!(k34.max_abs_diff(&seq[7]) < 1e-14);
    }

    #[test]
    fn vacuum_sequence_gives_states() {
        for m in standard_models() {
            let beta = beta_direct(&m.algebra, &m.triple, 0.2 / m.triple.lambda).unwrap();
            let seq = walk_vacuum_sequence(&m.algebra, &beta, &vacuum_density(beta.hat_dim()), 6)
                .unwrap();
            for k in &seq {
                assert!(k.is_state(&m.algebra, 1e-10), "{}", m.name);
            }
        }
    }

    #[test]
    fn invalid_density_is_rejected() {
        let m = poisson();
        let beta = beta_direct(&m.algebra, &m.triple, 0.1).unwrap();
        let mut rho = vacuum_density(2);
        rho[(1, 1)] = ONE;
        assert!(matches!(
            walk_vacuum_sequence(&m.algebra, &beta, &rho, 3),
            Err(Error::NotADensity(_))
        ));
        assert!(walk_vacuum_sequence(&m.algebra, &beta, &vacuum_density(3), 3).is_err());
    }

    #[test]
    fn dense_walk_small_n() {
        let m = model("kac_paljutkin").unwrap();
        let beta = beta_direct(&m.algebra, &m.triple, 0.4).unwrap();
        let j1 = walk_dense(&m.algebra, &beta, 1, DEFAULT_DENSE_CAP).unwrap();
        for i in 0..m.algebra.dim() {
            assert!(max_abs_diff(&j1.mats[i], &beta.mats()[i]) < 1e-15);
        }
        let j2 = walk_dense(&m.algebra, &beta, 2, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(j2.dim(), 9);
        assert!(max_abs_diff(&j2.image(m.algebra.unit()), &CMatrix::identity(9, 9)) < 1e-14);
        // multiplicative, hence a unital *-homomorphism
        let res = homomorphism_residuals(&m.algebra, &j2.mats);
        assert!(res.max() < 1e-13, "{res:?}");
        let u = [test_vector(3, 0.1), test_vector(3, 0.5)];
        let v = [test_vector(3, 0.9), test_vector(3, -0.4)];
        let a = test_vector(8, 0.2);
        let fast = ordered_convolution(
            &m.algebra,
            &[
                slot_functional(&beta, &u[0], &v[0]),
                slot_functional(&beta, &u[1], &v[1]),
            ],
        );
        let dense = j2.matrix_element(&u, &v, &a);
        assert!((fast.eval(&a) - dense).norm() < 1e-13);
    }

    #[test]
    fn dense_vacuum_compression_matches_sequence() {
        let m = model("standard_s3").unwrap();
        let beta = beta_direct(&m.algebra, &m.triple, 0.3).unwrap();
        let j4 = walk_dense(&m.algebra, &beta, 4, DEFAULT_DENSE_CAP).unwrap();
        let seq = walk_vacuum_sequence(&m.algebra, &beta, &vacuum_density(3), 4).unwrap();
        for i in 0..m.algebra.dim() {
            let b = m.algebra.basis(i);
            assert!((j4.vacuum_compression(&b) - seq[4].eval(&b)).norm() <= 1e-11);
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let m = poisson();
        let beta = beta_direct(&m.algebra, &m.triple, 0.1).unwrap();
        assert!(walk_dense(&m.algebra, &beta, 12, 4096).is_ok());
        assert!(matches!(
            walk_dense(&m.algebra, &beta, 13, 4096),
            Err(Error::DenseCapExceeded {
                dim: 8192,
                cap: 4096
            })
        ));
        assert!(walk_dense(&m.algebra, &beta, 200, 4096).is_err());
    }

    #[test]
    fn block_error_orders() {
        for name in ["poisson_z2", "standard_s3", "kac_paljutkin"] {
            let m = model(name).unwrap();
            let est = NormEstimator::default();
            let errs = |h: f64| {
                let beta = beta_direct(&m.algebra, &m.triple, h).unwrap();
                beta_block_errors(&m.algebra, &m.triple, &beta, est).unwrap()
            };
            let (a, b) = (errs(0.1 / m.triple.lambda), errs(0.05 / m.triple.lambda));
            assert!(a.e1 < 1e-13 && b.e1 < 1e-13, "{name}");
            let r3 = a.e3 / b.e3;
            let r4 = a.e4 / b.e4;
            assert!((2.4..=3.2).contains(&r3), "{name}: {r3}");
            assert!((1.7..=2.3).contains(&r4), "{name}: {r4}");
        }
        assert_eq!(NormEstimator::default().seed, DEFAULT_SEED);
    }

    #[test]
    fn adjoint_blocks_are_consistent() {
        for m in standard_models() {
            let beta = beta_direct(&m.algebra, &m.triple, 0.6 / m.triple.lambda).unwrap();
            assert!(beta.residuals(&m.algebra).adjoint_blocks < 1e-14);
        }
    }
}
