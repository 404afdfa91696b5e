use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, CVector, C64, ONE, ZERO};

use super::FiniteBialgebra;

/// A linear functional `λ(Σ c_i b_i) = Σ c_i λ[i]`, stored by its values on the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    pub coeffs: CVector,
}

impl Functional {
    pub fn new(coeffs: CVector) -> Self {
        Self { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(CVector::zeros(dim))
    }

    pub fn counit(alg: &FiniteBialgebra) -> Self {
        Self::new(alg.counit().clone())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &CVector) -> C64 {
        self.coeffs.iter().zip(x.iter()).map(|(l, c)| l * c).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.coeffs * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.coeffs + &other.coeffs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff_vec(&self.coeffs, &other.coeffs)
    }

    /// `[λ(b_i* b_j)]`.
    pub fn gram(&self, alg: &FiniteBialgebra) -> CMatrix {
        let d = alg.dim();
        let stars: Vec<CVector> = (0..d).map(|i| alg.basis_star(i)).collect();
        CMatrix::from_fn(d, d, |i, j| {
            let mut s = ZERO;
            for (p, cp) in stars[i].iter().enumerate() {
                if *cp == ZERO {
                    continue;
                }
                for q in 0..d {
                    s += cp * alg.mult(p, j, q) * self.coeffs[q];
                }
            }
            s
        })
    }

    /// Largest `|λ(b_i*) − conj λ(b_i)|`.
    pub fn hermiticity_residual(&self, alg: &FiniteBialgebra) -> f64 {
        (0..alg.dim())
            .map(|i| (self.eval(&alg.basis_star(i)) - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, alg: &FiniteBialgebra, tol: f64) -> bool {
        self.hermiticity_residual(alg) <= tol
    }

    /// Smallest eigenvalue of the Gram matrix; nonnegative for positive functionals.
    pub fn positivity_residual(&self, alg: &FiniteBialgebra) -> f64 {
        hermitian_eigenvalues(&self.gram(alg))
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_state(&self, alg: &FiniteBialgebra, tol: f64) -> bool {
        State::certify(alg, self.clone(), tol).is_ok()
    }
}

/// A functional certified positive and unital.
#[derive(Clone, Debug)]
pub struct State {
    functional: Functional,
    positivity_residual: f64,
    unitality_residual: f64,
}

impl State {
    /// Certifies `λ` as a state: `λ(1) = 1` and `[λ(b_i* b_j)]` Hermitian PSD up to `tol`.
    pub fn certify(alg: &FiniteBialgebra, functional: Functional, tol: f64) -> Result<Self> {
        alg.check_len(functional.dim(), "functional")?;
        let unitality_residual = (functional.eval(alg.unit()) - ONE).norm();
        if unitality_residual > tol {
            return Err(Error::NotAState {
                reason: format!("λ(1) deviates from 1 by {unitality_residual:.3e}"),
            });
        }
        let gram = functional.gram(alg);
        let asym = crate::linalg::max_abs_diff(&gram, &gram.adjoint());
        if asym > tol {
            return Err(Error::NotAState {
                reason: format!("Gram matrix not Hermitian (residual {asym:.3e})"),
            });
        }
        let positivity_residual = functional.positivity_residual(alg);
        if positivity_residual < -tol {
            return Err(Error::NotAState {
                reason: format!("Gram matrix eigenvalue {positivity_residual:.3e} < 0"),
            });
        }
        Ok(Self {
            functional,
            positivity_residual,
            unitality_residual,
        })
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn into_functional(self) -> Functional {
        self.functional
    }

    /// Smallest Gram eigenvalue found during certification.
    pub fn positivity_residual(&self) -> f64 {
        self.positivity_residual
    }

    pub fn unitality_residual(&self) -> f64 {
        self.unitality_residual
    }

    pub fn eval(&self, x: &CVector) -> C64 {
        self.functional.eval(x)
    }
}

/// `(μ ⋆ ν)(a) = (μ ⊗ ν)Δ(a)`.
pub fn convolve(alg: &FiniteBialgebra, mu: &Functional, nu: &Functional) -> Result<Functional> {
    alg.check_len(mu.dim(), "left functional")?;
    alg.check_len(nu.dim(), "right functional")?;
    Ok(convolve_unchecked(alg, mu, nu))
}

pub(crate) fn convolve_unchecked(
    alg: &FiniteBialgebra,
    mu: &Functional,
    nu: &Functional,
) -> Functional {
    let d = alg.dim();
    let coeffs = CVector::from_fn(d, |i, _| {
        alg.coproduct_terms(i)
            .iter()
            .map(|&(j, k, c)| c * mu.coeffs[j] * nu.coeffs[k])
            .sum()
    });
    Functional::new(coeffs)
}

/// `T_γ = (id ⊗ γ)Δ` as a `d × d` matrix on coefficient columns, so `μ ∘ T_γ = μ ⋆ γ`.
pub fn convolution_operator(alg: &FiniteBialgebra, gamma: &Functional) -> CMatrix {
    let d = alg.dim();
    let mut t = CMatrix::zeros(d, d);
    for i in 0..d {
        for &(j, k, c) in alg.coproduct_terms(i) {
            t[(j, i)] += c * gamma.coeffs[k];
        }
    }
    t
}

/// `exp_⋆(tγ) = Σ tⁿ γ^{⋆n} / n!`, evaluated as `ε ∘ exp(t T_γ)`.
pub fn convolution_exponential(
    alg: &FiniteBialgebra,
    gamma: &Functional,
    t: f64,
) -> Result<Functional> {
    alg.check_len(gamma.dim(), "generator")?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(Functional::counit(alg));
    }
    let generator = convolution_operator(alg, gamma) * C64::new(t, 0.0);
    let flow = generator.exp();
    Ok(Functional::new(flow.tr_mul(alg.counit())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_function_algebra, build_group_algebra, Group};
    use crate::linalg::{basis_vector, re};
    use crate::models::shipped_fixtures;

    fn z2() -> FiniteBialgebra {
        build_function_algebra(&Group::cyclic(2))
    }

    fn delta_state(i: usize) -> Functional {
        Functional::new(basis_vector(2, i))
    }

    /// Poisson generator `λ(δ₁ − δ₀)` on C(ℤ/2).
    fn poisson_generator(rate: f64) -> Functional {
        Functional::new(CVector::from_vec(vec![re(-rate), re(rate)]))
    }

    /// `Σ_{n ≤ N} tⁿ γ^{⋆n}/n!` with `N` large enough for the tail bound.
    fn truncated_series(alg: &FiniteBialgebra, gamma: &Functional, t: f64) -> Functional {
        let norm = crate::linalg::op_norm(&convolution_operator(alg, gamma)) * t;
        let mut n_max = 1usize;
        let mut bound = 2.0 * norm;
        while bound > 1e-12 {
            n_max += 1;
            bound *= norm / n_max as f64;
        }
        let mut term = Functional::counit(alg);
        let mut sum = term.clone();
        for n in 1..=n_max + 1 {
            term = convolve(alg, &term, gamma).unwrap().scale(re(t / n as f64));
            sum = sum.add(&term);
        }
        sum
    }

    #[test]
    fn counit_is_neutral() {
        for (_, alg) in shipped_fixtures() {
            let e = Functional::counit(&alg);
            assert!(convolve(&alg, &e, &e).unwrap().max_abs_diff(&e) < 1e-15);
        }
    }

    #[test]
    fn delta_one_squared_is_delta_zero() {
        let alg = z2();
        let c = convolve(&alg, &delta_state(1), &delta_state(1)).unwrap();
        assert_eq!(c, delta_state(0));
    }

    #[test]
    fn two_step_chain() {
        let alg = z2();
        let p = 0.3;
        let mu = Functional::new(CVector::from_vec(vec![re(1.0 - p), re(p)]));
        let mu2 = convolve(&alg, &mu, &mu).unwrap();
        assert!((mu2.coeffs[1] - re(2.0 * p * (1.0 - p))).norm() < 1e-15);
    }

    #[test]
    fn exponential_at_zero_is_counit() {
        let alg = z2();
        let p = convolution_exponential(&alg, &poisson_generator(1.0), 0.0).unwrap();
        assert_eq!(p, Functional::counit(&alg));
    }

    #[test]
    fn poisson_closed_form() {
        let alg = z2();
        let p = convolution_exponential(&alg, &poisson_generator(1.0), 1.0).unwrap();
        let expected = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((p.coeffs[1].re - expected).abs() < 1e-12);
        assert!((expected - 0.4323323584).abs() < 1e-10);
    }

    #[test]
    fn exponential_semigroup_law() {
        for (_, alg) in shipped_fixtures() {
            let d = alg.dim();
            let gamma = Functional::new(CVector::from_fn(d, |i, _| {
                C64::new((i as f64 * 0.37).sin(), 0.2 * i as f64 - 0.5)
            }));
            let s = convolution_exponential(&alg, &gamma, 0.7).unwrap();
            let st = convolution_exponential(&alg, &gamma, 1.4).unwrap();
            let prod = convolve(&alg, &s, &s).unwrap();
            assert!(prod.max_abs_diff(&st) <= 1e-10);
        }
    }

    #[test]
    fn exponential_matches_truncated_series() {
        for (_, alg) in shipped_fixtures() {
            let d = alg.dim();
            let gamma = Functional::new(CVector::from_fn(d, |i, _| {
                C64::new(0.3 - 0.1 * i as f64, (i as f64).cos() * 0.2)
            }));
            for t in [0.1, 0.5, 1.3] {
                let exact = convolution_exponential(&alg, &gamma, t).unwrap();
                let series = truncated_series(&alg, &gamma, t);
                assert!(exact.max_abs_diff(&series) <= 1e-10, "t = {t}");
            }
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        let alg = z2();
        assert!(matches!(
            convolution_exponential(&alg, &poisson_generator(1.0), -0.1),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let alg = z2();
        assert!(convolve(&alg, &Functional::zero(3), &delta_state(0)).is_err());
    }

    #[test]
    fn state_certification() {
        let alg = build_group_algebra(&Group::symmetric3());
        assert!(Functional::counit(&alg).is_state(&alg, 1e-12));
        // Haar-like δ_e on ℂ[G] is a state, λ_g ↦ 2 is not unital
        let haar = Functional::new(basis_vector(6, 0));
        assert!(haar.is_state(&alg, 1e-12));
        let bad = Functional::new(CVector::from_element(6, re(2.0)));
        assert!(!bad.is_state(&alg, 1e-12));
        let neg = Functional::new(CVector::from_vec(vec![re(-1.0), re(2.0)]));
        let z = z2();
        assert!(matches!(
            State::certify(&z, neg, 1e-9),
            Err(Error::NotAState { .. })
        ));
    }

    #[test]
    fn hermitian_flag() {
        let alg = build_group_algebra(&Group::cyclic(3));
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let chi = Functional::new(CVector::from_vec(vec![ONE, w, w * w]));
        assert!(chi.is_hermitian(&alg, 1e-14));
        let skew = Functional::new(CVector::from_vec(vec![ONE, w, w]));
        assert!(!skew.is_hermitian(&alg, 1e-3));
    }
}
