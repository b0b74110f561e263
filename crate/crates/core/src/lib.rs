//! Phase-space model of the linear-optics Gaussian cloning machine.
//!
//! An input single-mode Gaussian state is mixed with vacuum on a beam
//! splitter, the reflected port is measured by double-homodyne detection,
//! the record is fed forward as a displacement on the transmitted port, and
//! a second beam splitter produces the two clones. This crate propagates
//! first and second moments through that chain in closed form, computes
//! Uhlmann fidelities between Gaussian states, averages them over ensembles
//! of inputs, samples measurement trajectories, and carries an independent
//! truncated Fock-space engine used as a brute-force oracle.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![deny(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

mod error;
mod math;

pub mod ensemble;
pub mod fidelity;
pub mod fock;
pub mod optimize;
pub mod phase_space;
pub mod pipeline;
pub mod quadrature;
pub mod trajectory;

pub use error::{Error, Result};
pub use fidelity::{
    coherent_clone_fidelity, gaussian_fidelity, squeezed_clone_fidelity, thermal_clone_fidelity,
    Fidelity,
};
pub use phase_space::{
    CovMat, GaussianState, Mat2, ModeIndex, QuadVector, Symplectic4, TwoModeGaussianState,
};
pub use pipeline::{
    equivalent_added_noise, measurement_covariance, run_cloner, run_cloner_closed_form,
    symmetric_gain, ClonerConfig, CloneOutput, Propagation,
};

/// Tolerance used for the physicality checks `Det[σ] ≥ ¼` and positivity.
pub const PHYSICALITY_TOL: f64 = 1e-9;
