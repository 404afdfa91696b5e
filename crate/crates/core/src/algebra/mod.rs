//! Finite-dimensional C*-bialgebras given by structure constants, with the
//! convolution calculus on their duals.

mod bialgebra;
mod fixture;
mod functional;
mod groups;
mod norm;
mod validate;

pub use bialgebra::{BialgebraData, FiniteBialgebra};
pub use fixture::{load_fixture, parse_fixture, save_fixture, FixtureFile, FIXTURE_TOL};
pub(crate) use functional::convolve_unchecked;
pub use functional::{convolution_exponential, convolution_operator, convolve, Functional, State};
pub use groups::{build_function_algebra, build_group_algebra, s3_standard_irrep, Group};
pub use norm::{map_norm_estimate, NormEstimator, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use validate::{validate_bialgebra, AxiomResidual, ValidationReport};

/// Default tolerance for axiom checks.
pub const AXIOM_TOL: f64 = 1e-9;
