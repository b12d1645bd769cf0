//! Numerical models for classical, entangled two-photon and thermal-light
//! (ghost) imaging.
//!
//! The crate is `no_std` + `alloc` when built without the default `std`
//! feature. Everything here is pure computation: file formats, configuration
//! and the command line live in the companion `ghostoptics` crate.
//!
//! Layout follows the physics from the bottom up:
//!
//! - [`specfun`]: J₁, `somb`, `sinc` and the two-photon kernel `2J₁(x)/x²`.
//! - [`model`]: geometries, sources, aperture masks and scan grids.
//! - [`quadrature`]: integration rules and the oscillatory sampling planner.
//! - [`propagation`]: Fresnel Green's functions and the lens pupil integral.
//! - [`classical`], [`correlation`], [`ghost`], [`thermal`]: first- and
//!   second-order images for each source class.
//! - [`speckle`]: Monte Carlo of chaotic light from random-phase sub-sources.
//! - [`metrics`]: profile measurements shared by tests and the CLI.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::too_many_arguments, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod classical;
pub mod correlation;
mod error;
pub mod ghost;
pub mod metrics;
pub mod model;
mod par;
pub mod propagation;
pub mod quadrature;
pub mod specfun;
pub mod speckle;
pub mod thermal;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use model::{
    ApertureMask, BitmapMask, Dim, ImagingGeometry, ScanGrid, ScenarioKind, SourceKind,
    SourceModel, SPEED_OF_LIGHT,
};
pub use quadrature::{Points, QuadratureSpec, Rule};
