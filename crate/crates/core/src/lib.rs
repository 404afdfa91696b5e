//! Quantum random walks on finite-dimensional C*-bialgebras and their
//! convergence to quantum Lévy processes.
//!
//! The pipeline: a [`FiniteBialgebra`](algebra::FiniteBialgebra) and a
//! representation/vector pair give a [`SchurmannTriple`](schurmann::SchurmannTriple);
//! the triple gives the scaled one-step homomorphisms
//! [`WalkStep`](walk::WalkStep); walk matrix elements between discretized
//! exponential vectors are compared with the continuous-time process in
//! [`fock`] and swept over step sizes in [`harness`].

pub mod algebra;
pub mod error;
pub mod fock;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod models;
pub mod schurmann;
pub mod walk;

pub use error::{Error, Result};
