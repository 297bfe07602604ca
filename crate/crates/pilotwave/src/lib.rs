//! Numerical pilot-wave (de Broglie-Bohm) dynamics on periodic spectral grids.
//!
//! The crate provides the full simulation stack for two-particle
//! configuration spaces: discrete wave functions and state constructors,
//! split-step Schrödinger evolution, the guiding velocity field and
//! trajectory integration, quantum-equilibrium sampling with reproducible
//! seeded streams, conditional/effective wave functions, a statistical test
//! battery, and pointer-measurement simulation with POVM reconstruction by
//! linear inversion.
//!
//! Everything here is `no_std + alloc`; IO, configuration files and the
//! command line live in the companion `pilotwave-lab` crate.
//!
//! Conventions, fixed globally: natural units (`hbar = 1`, `m = 1` by
//! default), unitary FFT normalization, periodic boundaries, row index `x` /
//! column index `y` for two-particle amplitudes.

#![no_std]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod conditional;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod grid;
pub mod linalg;
pub mod povm;
pub mod sampling;
pub mod state;
pub mod stats;

pub use error::Error;
pub use grid::{Grid1, PhysicalParams};
pub use state::{WaveFunction1, WaveFunction2};

/// Complex double, the amplitude scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Result alias with the crate error type.
pub type Result<T> = core::result::Result<T, Error>;

/// Relative density floor below which the guiding field is treated as
/// undefined (nodes of the wave function).
pub const DEFAULT_EPS_NODE: f64 = 1e-12;
