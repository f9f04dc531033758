//! Quasi-separability classification, finite-copy entanglement distillation
//! and bath-induced decay for two-qubit states.
//!
//! * [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver.
//! * [`states`]: validated density matrices, named families, concurrence, PPT.
//! * [`classify`]: "new state" reweighting and quasi-separability verdicts.
//! * [`protocol`]: exact simulation of one two-copy distillation round.
//! * [`dynamics`]: closed-form and RK4 solutions of the bath master equation.
//! * [`sweep`]: grid evaluation, parallel with the `parallel` feature.
//! * [`cli`]: the table-producing commands behind the `qsdistill` binary.

pub mod classify;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
