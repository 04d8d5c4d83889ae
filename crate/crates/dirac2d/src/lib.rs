//! Numerical realization of the dynamical symmetries of the 2D Dirac
//! equation with equal scalar and vector potentials.
//!
//! The Coulomb system carries an SO(3) symmetry generated by a deformed
//! orbital angular momentum and two Runge-Lenz-type charges; the harmonic
//! oscillator carries an SU(2) symmetry generated by second-order tensor
//! charges. This crate builds every conserved operator matrix-free on a
//! periodic Fourier grid, verifies the commutation/Casimir identities by
//! residuals, and independently reproduces the closed-form spectra with a
//! radial finite-volume eigensolver.
//!
//! Modules:
//! - [`spectra`]: closed-form levels, quantum-number bookkeeping, the
//!   oscillator cubic, non-relativistic limits.
//! - [`grid`] / [`gridops`]: the periodic grid, spinor fields, and the
//!   matrix-free operator algebra.
//! - [`radial`]: sector-wise radial reduction, Sturm-sequence tridiagonal
//!   eigensolver, energy-dependent outer root-find, lift back to 2D.
//! - [`verifier`]: named identity checks with calibrated thresholds,
//!   convergence studies, and dense cross-checks.

pub mod error;
pub mod grid;
pub mod gridops;
pub mod params;
pub mod radial;
pub mod spectra;
pub mod verifier;

pub use error::{Error, Result};
pub use grid::{Grid2D, ScalarField, SpinorField};
pub use gridops::{BuiltOperator, Operator, OperatorKind, ScalarOperator, SpinorOperator};
pub use params::{PhysicalParams, Potential};
pub use spectra::{Branch, QuantumNumbers, SpectrumEntry};
