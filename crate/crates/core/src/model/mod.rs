//! Declarative description of an optical setup: distances, sources,
//! aperture masks and detector scan grids.
//!
//! All quantities are SI: meters and rad/s. Transverse positions are
//! `[x, y]` pairs; one-dimensional scenarios use the `y = 0` line section.

mod geometry;
mod grid;
mod mask;
mod source;

pub use geometry::{
    lens_residual, magnification, validate_geometry, Field, ImagingGeometry, ScenarioKind,
    ValidationReport, Violation, DEFAULT_LENS_TOLERANCE,
};
pub use grid::{Dim, ScanGrid};
pub use mask::{ApertureMask, BitmapMask, Region, Segment};
pub use source::{omega_from_wavelength, wavelength_from_omega, SourceKind, SourceModel};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Transverse position or wavevector `[x, y]`.
pub type Vec2 = [f64; 2];

#[inline]
pub(crate) fn norm2(v: Vec2) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

#[inline]
pub(crate) fn norm(v: Vec2) -> f64 {
    libm::hypot(v[0], v[1])
}
