//! Randomized invariants over the shipped fixtures and models.

use proptest::prelude::*;

use qlw_core::algebra::{convolution_exponential, convolve, Functional};
use qlw_core::fock::{walk_matrix_element, StepFunction};
use qlw_core::harness::fit_order;
use qlw_core::linalg::{max_abs_diff, CVector, C64};
use qlw_core::models::{model, shipped_fixtures, MODEL_NAMES};
use qlw_core::schurmann::{assemble_phi, SchurmannTriple};
use qlw_core::walk::{beta_direct, beta_gns, max_step, vacuum_density, walk_vacuum_sequence};

fn complex_vec(len: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| CVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn fixture_index() -> impl Strategy<Value = usize> {
    0..shipped_fixtures().len()
}

fn model_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(MODEL_NAMES.iter().map(|(n, _)| *n).collect::<Vec<_>>())
}

/// A model together with a fresh random `ξ̃` for its representation.
fn model_with_xi() -> impl Strategy<Value = (&'static str, CVector)> {
    model_name().prop_flat_map(|name| {
        let k = model(name).unwrap().triple.k_dim();
        (Just(name), complex_vec(k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative(idx in fixture_index(), seed in complex_vec(24)) {
        let (_, alg) = &shipped_fixtures()[idx];
        let d = alg.dim();
        let pick = |o: usize| Functional::new(CVector::from_fn(d, |i, _| seed[(i + o) % 24]));
        let (a, b, c) = (pick(0), pick(8), pick(16));
        let left = convolve(alg, &convolve(alg, &a, &b).unwrap(), &c).unwrap();
        let right = convolve(alg, &a, &convolve(alg, &b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);
    }

    #[test]
    fn exponential_is_a_semigroup(idx in fixture_index(), g in complex_vec(8), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (_, alg) = &shipped_fixtures()[idx];
        let gamma = Functional::new(g.rows(0, alg.dim()).into_owned());
        let ps = convolution_exponential(alg, &gamma, s).unwrap();
        let pt = convolution_exponential(alg, &gamma, t).unwrap();
        let pst = convolution_exponential(alg, &gamma, s + t).unwrap();
        prop_assert!(convolve(alg, &ps, &pt).unwrap().max_abs_diff(&pst) <= 1e-10);
    }

    #[test]
    fn steps_are_homomorphisms((name, xi) in model_with_xi(), frac in 0.001f64..1.0) {
        let m = model(name).unwrap();
        let triple = SchurmannTriple::from_rep_vector(&m.algebra, m.triple.rep.clone(), xi).unwrap();
        prop_assume!(triple.lambda > 1e-6);
        let h = frac * max_step(&triple);
        let a = beta_direct(&m.algebra, &triple, h).unwrap();
        let b = beta_gns(&m.algebra, &triple, h).unwrap();
        prop_assert!(a.residuals(&m.algebra).max() <= 1e-9);
        prop_assert!(a.max_abs_diff(&b) <= 1e-8);
    }

    #[test]
    fn semigroup_of_a_triple_is_a_state((name, xi) in model_with_xi(), t in 0.0f64..2.0) {
        let m = model(name).unwrap();
        let triple = SchurmannTriple::from_rep_vector(&m.algebra, m.triple.rep.clone(), xi).unwrap();
        prop_assert!(triple.conditional_positivity(&m.algebra) >= -1e-12);
        let p = convolution_exponential(&m.algebra, &triple.gamma, t).unwrap();
        prop_assert!(p.is_state(&m.algebra, 1e-10));
    }

    #[test]
    fn vacuum_walk_gives_states((name, xi) in model_with_xi(), frac in 0.01f64..1.0, n in 0usize..12) {
        let m = model(name).unwrap();
        let triple = SchurmannTriple::from_rep_vector(&m.algebra, m.triple.rep.clone(), xi).unwrap();
        prop_assume!(triple.lambda > 1e-6);
        let beta = beta_direct(&m.algebra, &triple, frac * max_step(&triple)).unwrap();
        let seq = walk_vacuum_sequence(&m.algebra, &beta, &vacuum_density(beta.hat_dim()), n).unwrap();
        prop_assert!(seq[n].is_state(&m.algebra, 1e-10));
    }

    #[test]
    fn phi_is_linear_and_star_compatible(name in model_name(), x in complex_vec(8), y in complex_vec(8), c in (-1.0f64..1.0, -1.0f64..1.0)) {
        let m = model(name).unwrap();
        let d = m.algebra.dim();
        let (x, y) = (x.rows(0, d).into_owned(), y.rows(0, d).into_owned());
        let c = C64::new(c.0, c.1);
        let phi = assemble_phi(&m.algebra, &m.triple);
        let lin = phi.image(&(&x * c + &y)) - (phi.image(&x) * c + phi.image(&y));
        prop_assert!(lin.iter().all(|z| z.norm() <= 1e-13));
        let star = phi.image(&m.algebra.star(&x));
        prop_assert!(max_abs_diff(&star, &phi.image(&x).adjoint()) <= 1e-13);
    }

    #[test]
    fn walk_matrix_elements_swap_under_adjoint(name in model_name(), fv in complex_vec(6), gv in complex_vec(6), x in complex_vec(8)) {
        let m = model(name).unwrap();
        let k = m.triple.k_dim();
        let d = m.algebra.dim();
        let f = StepFunction::constant(fv.rows(0, k).into_owned(), 0.6).unwrap();
        let g = StepFunction::constant(gv.rows(0, k).into_owned(), 1.0).unwrap();
        let x = x.rows(0, d).into_owned();
        let beta = beta_direct(&m.algebra, &m.triple, 0.125 / m.triple.lambda).unwrap();
        let fg = walk_matrix_element(&m.algebra, &beta, &f, &g, 1.0, &x).unwrap();
        let gf = walk_matrix_element(&m.algebra, &beta, &g, &f, 1.0, &m.algebra.star(&x)).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-12);
    }

    #[test]
    fn fit_recovers_power_laws(slope in 0.2f64..3.0, scale in 0.01f64..10.0) {
        let pts: Vec<(f64, f64)> = (0..8).map(|j| {
            let h = 0.5f64.powi(j);
            (h, scale * h.powf(slope))
        }).collect();
        let fit = fit_order(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-9);
        prop_assert!(fit.r_squared >= 1.0 - 1e-9);
    }
}
