//! Small dense complex linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = ONE;
    v
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.ncols() == 1 || m.nrows() == 1 {
        return m.norm();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * re(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `Σ coef · A ⊗ B` accumulated into `out`, with the first factor as the major index.
pub fn kron_accumulate(out: &mut CMatrix, coef: C64, a: &CMatrix, b: &CMatrix) {
    let (br, bc) = b.shape();
    debug_assert_eq!(out.nrows(), a.nrows() * br);
    debug_assert_eq!(out.ncols(), a.ncols() * bc);
    for ac in 0..a.ncols() {
        for ar in 0..a.nrows() {
            let s = coef * a[(ar, ac)];
            if s == ZERO {
                continue;
            }
            for c2 in 0..bc {
                let col = ac * bc + c2;
                for r2 in 0..br {
                    out[(ar * br + r2, col)] += s * b[(r2, c2)];
                }
            }
        }
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
    kron_accumulate(&mut out, ONE, a, b);
    out
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_nalgebra() {
        let a = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 + 1.0, j as f64));
        let b = CMatrix::from_fn(3, 2, |i, j| C64::new(j as f64 - 1.0, i as f64 * 0.5));
        assert!(max_abs_diff(&kron(&a, &b), &a.kronecker(&b)) < 1e-15);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![re(0.5), C64::new(0.0, -3.0)]));
        assert!((op_norm(&m) - 3.0).abs() < 1e-14);
    }
}
