use core::f64::consts::PI;

use super::SPEED_OF_LIGHT;
use crate::error::{require_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    CoherentMonochromatic,
    ChaoticThermal,
    /// Degenerate collinear SPDC; `omega` is the pump frequency.
    EntangledSpdc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceModel {
    pub kind: SourceKind,
    /// rad/s. For SPDC this is ω_p; signal and idler carry ω_p / 2.
    pub omega: f64,
    /// Transverse half-width of a chaotic source, meters.
    pub extent: Option<f64>,
    /// Sub-source count for the chaotic Monte Carlo.
    pub sub_sources: usize,
}

impl SourceModel {
    pub fn coherent(omega: f64) -> Self {
        SourceModel {
            kind: SourceKind::CoherentMonochromatic,
            omega,
            extent: None,
            sub_sources: 1,
        }
    }

    pub fn chaotic(omega: f64, extent: f64, sub_sources: usize) -> Self {
        SourceModel {
            kind: SourceKind::ChaoticThermal,
            omega,
            extent: Some(extent),
            sub_sources,
        }
    }

    pub fn spdc(omega_pump: f64) -> Self {
        SourceModel {
            kind: SourceKind::EntangledSpdc,
            omega: omega_pump,
            extent: None,
            sub_sources: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("omega", self.omega)?;
        if self.kind == SourceKind::ChaoticThermal {
            let e = self.extent.ok_or(Error::MissingField("source extent"))?;
            require_positive("source extent", e)?;
        }
        if self.sub_sources == 0 {
            return Err(Error::invalid("sub_sources", "need at least one sub-source"));
        }
        Ok(())
    }

    /// Frequency of the light reaching a single detector.
    pub fn detected_omega(&self) -> f64 {
        match self.kind {
            SourceKind::EntangledSpdc => 0.5 * self.omega,
            _ => self.omega,
        }
    }
}

/// `ω = 2πc/λ`.
pub fn omega_from_wavelength(lambda: f64) -> Result<f64> {
    require_positive("wavelength", lambda)?;
    Ok(2.0 * PI * SPEED_OF_LIGHT / lambda)
}

/// `λ = 2πc/ω`.
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}
