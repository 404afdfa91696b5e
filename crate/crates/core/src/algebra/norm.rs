use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix, CVector, C64};

use super::FiniteBialgebra;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 200;

/// Sampling parameters for [`map_norm_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormEstimator {
    pub samples: usize,
    pub seed: u64,
}

impl Default for NormEstimator {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// Lower-bound estimate of the norm of a linear map `ψ: A → M_{p×q}` given on the basis.
///
/// Maximizes `‖ψ(x)‖_op` over the normalized basis elements and over `samples`
/// elements with standard complex Gaussian coefficients, each scaled so that
/// `‖x‖ = 1` in the faithful representation. The RNG is reseeded on every
/// call, so the same sample points are used for every map.
pub fn map_norm_estimate(
    alg: &FiniteBialgebra,
    psi: &[CMatrix],
    estimator: NormEstimator,
) -> Result<f64> {
    if psi.len() != alg.dim() {
        return Err(Error::Structure(format!(
            "map defined on {} basis elements, algebra has {}",
            psi.len(),
            alg.dim()
        )));
    }
    let shape = psi[0].shape();
    if psi.iter().any(|m| m.shape() != shape) {
        return Err(Error::Structure(
            "map images have inconsistent shapes".into(),
        ));
    }

    let mut best = 0.0f64;
    for (i, image) in psi.iter().enumerate() {
        let n = op_norm(&alg.faithful_rep()[i]);
        if n > 0.0 {
            best = best.max(op_norm(image) / n);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(estimator.seed);
    let d = alg.dim();
    for _ in 0..estimator.samples {
        let x = CVector::from_fn(d, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        });
        let n = alg.norm_of(&x);
        if n > 0.0 {
            best = best.max(op_norm(&FiniteBialgebra::apply_linear(psi, &x)) / n);
        }
    }
    Ok(best)
}
