//! Bargmann invariants of ordered tuples of quantum states.
//!
//! The crate evaluates invariants `Tr(rho_1 ... rho_n)` for pure and mixed
//! tuples, describes the exact set of attainable values for each order, decides
//! joint (projective) unitary equivalence of tuples, rebuilds tuples from their
//! invariants, simulates the cycle-test estimator under shot noise, and applies
//! two-qubit invariant-based entanglement and imaginarity tests.
//!
//! Indices are zero-based throughout the API.

pub mod circulant;
pub mod equivalence;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod invariants;
pub mod linalg;
pub mod rng;
pub mod tolerance;
pub mod twoqubit;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rng::SplitRng;
