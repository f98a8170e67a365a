//! Collective-spin states for interferometric phase estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`spin`]: spin-J operators, eigenbases, Hermitian exponentials.
//! - [`states`]: coherent, Yurke, NOON, optimal phase and two-axis
//!   counter-twisted states.
//! - [`metrics`]: spin squeezing, sharpness, phase squeezing, canonical phase
//!   distributions and basis coefficient tables.
//! - [`twist`]: optimal counter-twisting times and their scaling with N.
//! - [`wigner`]: spherical Wigner functions on the Bloch sphere.
//! - [`io`]: JSON state records.
//!
//! Every state is stored in the `J_z` eigenbasis with coefficient index
//! `i` corresponding to `mu = i - J`.

pub mod error;
pub mod io;
pub mod metrics;
pub mod spin;
pub mod states;
pub mod twist;
pub mod wigner;

pub use error::{Error, Result};
pub use metrics::{PhaseDistribution, SqueezingReport};
pub use spin::{Axis, DensityMatrix, SpinOperator, SpinQuantum, SpinState};
pub use states::StateKind;
pub use twist::{Metric, TwistCurve, TwistOptimum};
pub use wigner::WignerGrid;

pub use num_complex::Complex64;
