#![allow(dead_code)]

use qlw_core::fock::StepFunction;
use qlw_core::harness::TestCase;
use qlw_core::linalg::{CVector, C64};
use qlw_core::models::Model;

/// `f = a·1_{[0, 1/2)} + b·1_{[1/2, 3/4)}` with slowly varying entries.
pub fn two_piece(k: usize, shift: f64) -> StepFunction {
    let a = CVector::from_fn(k, |p, _| C64::new(0.5 + 0.2 * p as f64 - shift, -0.3));
    let b = CVector::from_fn(k, |p, _| C64::new(-0.4, 0.25 * p as f64 + 0.1 + shift));
    StepFunction::new(k, vec![(0.5, a), (0.25, b)]).unwrap()
}

/// One value per slot of width `h`, so every slot vector differs.
pub fn per_slot(k: usize, h: f64, n: usize, seed: f64) -> StepFunction {
    let pieces = (0..n)
        .map(|i| {
            let v = CVector::from_fn(k, |p, _| {
                let x = seed + 0.9 * i as f64 + 1.7 * p as f64;
                C64::new(0.6 * x.sin(), 0.4 * (1.3 * x).cos())
            });
            (h, v)
        })
        .collect();
    StepFunction::new(k, pieces).unwrap()
}

pub fn test_element(d: usize, shift: f64) -> CVector {
    CVector::from_fn(d, |i, _| {
        C64::new(
            (1.1 * i as f64 + shift).cos(),
            (0.6 * i as f64 - shift).sin(),
        )
    })
}

pub fn nontrivial_case(m: &Model, observable: usize, name: &str) -> TestCase {
    let k = m.triple.k_dim();
    TestCase {
        name: name.into(),
        f: two_piece(k, 0.0),
        g: two_piece(k, 0.3),
        t: 1.0,
        observable: m.algebra.basis(observable),
    }
}
