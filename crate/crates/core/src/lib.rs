//! Numerical toolkit for the Fujita-critical semilinear heat equation
//! `u_t = Δu + |u|^{p-1}u` with `p = 1 + 2/N` on radial data in L¹.
//!
//! The crate provides the building blocks of a desk-scale laboratory for
//! this doubly critical problem:
//!
//! * [`grid`] - log-graded radial grids with composite Gauss-Legendre
//!   panel quadrature for `∫ f(r) r^{N-1} dr`, and graded time meshes.
//! * [`quadrature`] - scalar quadrature helpers, in particular the
//!   log-weight integrals `∫ s^{-1}(-log s)^{-a} ds` together with their
//!   closed forms.
//! * [`kernel`] / [`semigroup`] - the radial heat kernel, its angular
//!   reduction, kernel matrices and `S(t)`, plus L^α-L^β smoothing
//!   diagnostics.
//! * [`gweight`] - the convex weight `g(u) = u [log(ρ+|u|)]^q`, its
//!   inverse and relatives, and the `X_{q,ρ}` integrability functionals.
//! * [`data`] - the explicit initial-data family (`φ₀`, `ψ`, Gaussians,
//!   caps and parabolic rescalings) and the Baras-Pierre mass-ratio test.
//! * [`duhamel`] / [`iterate`] / [`contraction`] - the Duhamel integral
//!   operator on graded meshes, supersolution construction and
//!   verification, monotone and Picard iteration, weighted sup-norm
//!   tracking and the L¹ contraction experiment.
//!
//! Everything is deterministic: fixed summation orders, immutable grids
//! and meshes, no global state. The crate is `no_std`-compatible
//! (`--no-default-features --features libm`); allocation is required.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("fujita-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod contraction;
pub mod data;
pub mod duhamel;
pub mod error;
pub mod grid;
pub mod gweight;
pub mod iterate;
pub mod kernel;
pub(crate) mod math;
pub mod mesh;
pub mod quadrature;
pub mod semigroup;
pub mod special;
pub mod trajectory;

pub use contraction::{contraction_experiment, ContractionReport, ContractionVerdict};
pub use data::{ball_mass, baras_pierre_report, BarasPierreReport, DataSpec, MassVerdict};
pub use duhamel::HeatPropagator;
pub use error::{Error, Result};
pub use grid::{InnerTail, RadialField, RadialGrid};
pub use gweight::{check_g_properties, jensen_check, xq_norm, GParams, GPropertyReport, SampleSpec};
pub use iterate::{
    build_supersolution, monotone_iterate, picard_iterate, verify_supersolution, IterationOptions,
    IterationReport, SupersolutionReport,
};
pub use kernel::{HeatKernel, KernelMatrix, KernelMethod, UniformConvolution1d};
pub use mesh::TimeMesh;
pub use quadrature::{log_weight_integral, LogWeightIntegral};
pub use semigroup::{apply_semigroup, lp_norm, smoothing_report, SmoothingReport};
pub use trajectory::{weighted_supnorm_track, Trajectory};
