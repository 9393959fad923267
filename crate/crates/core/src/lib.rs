//! Weak values of a phase-shift generator and the phase-estimation bounds they
//! determine, for finite-dimensional systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] holds the domain types (generators, states, measurements),
//!   unitary phase evolution and outcome probabilities.
//! * [`random`] generates seeded Haar / Hilbert–Schmidt ensembles.
//! * [`weak`] computes complex weak values, the phase-adjusted basis and the
//!   weak-value variance identity.
//! * [`metrology`] computes Fisher information, log-derivatives and the
//!   time-symmetric uncertainty bound.
//! * [`split`] separates a generator into its phase-visible and phase-invisible
//!   parts relative to a preparation/measurement pair.
//! * [`meter`] simulates a Gaussian von Neumann meter read out in position or
//!   momentum.
//! * [`optimize`] searches projective measurements for maximal Fisher
//!   information.

pub mod error;
pub mod linalg;
pub mod meter;
pub mod metrology;
pub mod optimize;
pub mod quantum;
pub mod random;
pub mod serialize;
pub mod split;
pub mod weak;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use quantum::{HermitianOperator, Measurement, QuantumState, Scenario, Tolerances};
