//! Phase-space solver for Wigner quasi-probability dynamics under polynomial
//! Hamiltonians with friction and momentum diffusion, discretized by a
//! wavelet-Galerkin multiresolution scheme.
//!
//! The evolution equation handled here is
//!
//! ```text
//! dW/dt = {H, W}
//!       + sum_{n>=1} hbar^(2n) (-1)^n / (2^(2n) (2n+1)!) U^(2n+1)(q) d^(2n+1)W/dp^(2n+1)
//!       + 2 gamma d/dp (p W) + D d^2W/dp^2
//! ```
//!
//! i.e. the Moyal bracket of a polynomial Hamiltonian (a finite series) plus
//! Caldeira-Leggett style friction and diffusion. Fields live on a periodic
//! dyadic `(q, p)` grid; the right-hand side is available both as a sparse
//! operator on scaling-function coefficients (the reduced algebraic system)
//! and as an independent finite-difference oracle on grid samples.
//!
//! Module map:
//! - [`wavelet`]: Daubechies filters, cascade evaluation, 1D/2D transforms,
//!   wavelet packets with entropy best basis, connection coefficients.
//! - [`phase_space`]: Wigner fields, canonical states, diagnostics,
//!   multiscale decompositions, regime classification.
//! - [`hamiltonian`]: polynomial Hamiltonians with optional time tables.
//! - [`moyal`]: right-hand-side terms, Galerkin assembly, grid oracle.
//! - [`solver`]: RK4 time stepping, stability estimates, steady states,
//!   coefficient thresholding.
//! - [`scenario`]: config parsing, presets, run orchestration, file output.

pub mod error;
pub mod hamiltonian;
pub mod moyal;
pub mod phase_space;
pub mod scenario;
pub mod solver;
pub mod wavelet;

pub use error::{Result, WignerError};
