//! Exact dynamics of two two-level atoms coupled resonantly to a single
//! cavity mode prepared in a thermal (or Fock) state.
//!
//! The library provides the closed-form evolution operator elements and the
//! five-operator Kraus channel they generate, a brute-force joint-unitary
//! oracle that every analytic formula is validated against, entanglement
//! measures (partial-transpose negativity, two-qubit entanglement of
//! formation), and end-to-end sweep scenarios for atom-atom and atom-field
//! entanglement against interaction time.

// Link the system BLAS/LAPACK backend.
use openblas_src as _;

pub mod entanglement;
pub mod error;
pub mod kraus;
pub mod numkernel;
pub mod propagator;
pub mod scenarios;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
