//! Spectral toolkit for constructing discretely self-similar (DSS) and
//! self-similar solutions of the 3D Navier-Stokes equations from critical
//! Besov-space data.
//!
//! The construction runs in five stages:
//! 1. split the divergence-free DSS data `f = a0 + b0` with `b0` small in
//!    the critical Besov seminorm ([`splitter`]),
//! 2. solve the small part by Picard iteration in the Kato space and pass
//!    to similarity variables ([`mild`]),
//! 3. build the boundary profile `U0` from the heat flow of `a0` and the
//!    revised profile `W` ([`leray`]),
//! 4. solve the time-periodic perturbed Leray system by a Galerkin
//!    Poincare-map fixed point ([`leray`]),
//! 5. reassemble `v = a + b` in physical variables and verify the scaling
//!    estimates ([`similarity`], [`pipeline`]).
//!
//! Everything is discretized on a large periodic box; all linear operators
//! are Fourier multipliers ([`field`]). Exact DSS fields are carried by
//! their fundamental-shell Fourier data ([`dssfield`]), and the example
//! fields of the function-space lemmas are built from wavelet coefficients
//! ([`wavelet`]).

pub mod besov;
pub mod chirpz;
pub mod dssfield;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod leray;
pub mod mild;
pub mod norms;
pub mod path;
pub mod pipeline;
pub mod similarity;
pub mod splitter;
pub mod wavelet;

pub use error::{DssError, Result};
pub use field::SpectralField;
pub use grid::BoxGrid;
