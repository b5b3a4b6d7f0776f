//! Periodized Hermite functions on the unit circle and their mirror on the
//! integer lattice.
//!
//! The crate is organised around the chain
//!
//! ```text
//! ψ_n (real line)  ──periodize──▶  𝔠_n (circle)  ──Fourier──▶  iⁿ·χ_n (ℓ²(ℤ))
//! ```
//!
//! * [`hermite`]: Hermite polynomials (exact and floating), normalized Hermite
//!   functions and Gauss–Hermite quadrature.
//! * [`periodized`]: the periodized family `𝔠_n(φ) = Σ_k ψ_n(φ + 2kπ)`, its
//!   certified truncation and the circle-side operators Φ, D_φ, A±.
//! * [`sequences`]: the lattice sequences `χ_n = {ψ_n(m)}` with the 1/2π
//!   weighted scalar product and the operators M, D, B±.
//! * [`fourier`]: Fourier coefficients on the circle, synthesis, the
//!   Dirichlet kernel and the finite periodization identity.
//! * [`ladder`]: the shared tridiagonal operator algebra acting on finite
//!   combinations of basis indices.
//! * [`orthonormal`]: Gram matrices and the parity-split Gram–Schmidt process.
//! * [`eigensplit`]: the four Fourier eigenspace components of a function on
//!   the line.
//! * [`exact`]: exact integer determinants of Hermite value matrices.

pub mod error;
pub mod exact;
pub mod eigensplit;
pub mod fourier;
pub mod hermite;
pub mod io;
pub mod ladder;
pub mod orthonormal;
pub mod periodized;
pub mod realline;
pub mod sequences;

pub use error::{Error, Result};

pub use num_complex::Complex64 as C64;
