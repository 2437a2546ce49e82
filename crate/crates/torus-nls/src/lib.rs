//! Pseudo-spectral toolkit for the defocusing nonlinear Schrödinger equation
//! `(i d/dt + L_beta) u = |u|^{p-1} u` on the unit torus `T^3`, where
//! `L_beta = beta_1 d^2/dx_1^2 + beta_2 d^2/dx_2^2 + beta_3 d^2/dx_3^2` is the
//! anisotropic Laplacian of a rectangular torus with side lengths
//! `l_i = beta_i^{-1/2}`, and `3 < p < 5`.
//!
//! The crate bundles
//!
//! * torus geometry: the quadratic form `Q(k)` of the Laplacian symbol, its
//!   bilinear polarization, Diophantine margins and near-resonant lattice
//!   counting ([`torus`]);
//! * truncated Fourier fields with dyadic-annulus and box projections and the
//!   frequency multiplier `D` that is the identity below a scale `N` and
//!   `|k|/N` above `2N` ([`spectral`]);
//! * exact-substep Strang time stepping with dealiased nonlinear evaluation
//!   ([`dynamics`]);
//! * norms and functionals: Sobolev norms, the conserved energy, the modified
//!   energy `E[Du]`, discrete space-time `L^q` and dispersive `X^{s,b}` norms,
//!   closed-form exponent tables and log-log power-law fitting
//!   ([`diagnostics`]);
//! * declarative experiment drivers (growth runs, increment scans, space-time
//!   norm scans, resonance counts) with CSV/JSON emission and binary
//!   checkpoints ([`experiments`], [`plan`], [`checkpoint`]).
//!
//! Start with the runnable examples (`cargo run --example exponents`,
//! `cargo run --example growth_run`, ...) or the `torus-nls` binary.

pub mod checkpoint;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod plan;
pub mod spectral;
pub mod torus;
mod transform;

pub use error::{Error, Result};
pub use spectral::{FrequencyBox, Grid, MultiplierSpec, SpectralField};
pub use torus::{ResonanceQuery, TorusSpec};
