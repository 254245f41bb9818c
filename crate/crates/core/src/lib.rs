//! Explicit eigenfunctions and proper p-harmonic functions on the compact
//! symmetric spaces SU(n)/SO(n), Sp(n)/U(n), SO(2n)/U(n) and SU(2n)/Sp(n),
//! together with the machinery that verifies them: jet differentiation along
//! one-parameter subgroups, an exact formal algebra for `φ^a (log φ)^b`, and a
//! seeded batch harness producing JSON reports.

pub mod diffops;
pub mod eigen;
pub mod error;
pub mod formal;
pub mod harness;
pub mod identities;
pub mod lie;
pub mod matrix;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{CMatrix, ExactMatrix, Matrix};
