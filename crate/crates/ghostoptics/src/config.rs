//! Scenario configuration: TOML with one table per concern.
//!
//! ```toml
//! scenario = "ghost-spdc"
//! seed = 0
//!
//! [geometry]
//! d_1 = 0.2
//! d_2 = 1.0
//! s_o = 0.6
//! f = 0.4
//! lens_radius = 0.0127
//!
//! [source]
//! kind = "spdc"
//! wavelength = 351.1e-9
//!
//! [mask]
//! kind = "bars"
//! intervals = [[-1.75e-3, -0.75e-3], [0.75e-3, 1.75e-3]]
//!
//! [grid]
//! dim = 1
//! extent = 6e-3
//! samples = 49
//! ```
//!
//! Unknown keys are rejected; errors carry the dotted path of the offending
//! key. Relative bitmap paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use ghostoptics_core::model::{omega_from_wavelength, ImagingGeometry, ScenarioKind, SourceKind, SourceModel};
use ghostoptics_core::propagation::PupilMethod;
use ghostoptics_core::quadrature::{Points, Rule};
use ghostoptics_core::{ApertureMask, Dim, QuadratureSpec, ScanGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RunError};
use crate::pgm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub geometry: GeometryConfig,
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub run: RunConfig,
    /// Directory that relative paths resolve against; not part of the file.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_o: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_i: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lens_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lens_tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKindConfig {
    Coherent,
    Chaotic,
    Spdc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub kind: SourceKindConfig,
    /// Vacuum wavelength, m. For `spdc` this is the pump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    /// Angular frequency, rad/s; alternative to `wavelength`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_sources: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaskConfig {
    DoubleSlit {
        separation: f64,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<f64>,
    },
    Disk {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Bars {
        intervals: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<f64>,
    },
    /// 8-bit PGM; pixel value / 255 is the transmission.
    Bitmap { path: PathBuf, pitch: f64 },
    /// Fully open: a wide bar covering `half_width` either side.
    Open { half_width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: u8,
    pub extent: f64,
    pub samples: usize,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleConfig {
    #[default]
    Midpoint,
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoTag {
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsConfig {
    Fixed(usize),
    Auto(AutoTag),
}

impl Default for PointsConfig {
    fn default() -> Self {
        PointsConfig::Auto(AutoTag::Auto)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PupilConfig {
    #[default]
    Auto,
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default)]
    pub rule: RuleConfig,
    #[serde(default)]
    pub points: PointsConfig,
    #[serde(default)]
    pub pupil: PupilConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    #[default]
    JointDiagonal,
    FullJoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceClassConfig {
    #[default]
    Thermal,
    Entangled,
}

/// Scenario-specific knobs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Two-photon laser/chaotic: diagonal profile or full joint map.
    #[serde(default)]
    pub mode: ModeConfig,
    /// Monte Carlo realizations (speckle-mc; optional cross-check for
    /// ghost-thermal-lensless and hbt-farfield).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    /// Relative standard error that triggers a warning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_floor: Option<f64>,
    #[serde(default)]
    pub source_class: SourceClassConfig,
    /// hbt-farfield: fixed detector position, m.
    #[serde(default)]
    pub x1: f64,
    /// hbt-farfield Monte Carlo: source-to-detector distance, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// ghost-secondary: ghost-plane grid; defaults to the output grid
    /// shrunk by the expected magnification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghost_grid: Option<GridConfig>,
    /// speckle-mc: also compute the analytic lensless image and compare.
    #[serde(default)]
    pub compare_analytic: bool,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            RunError::config(if path.is_empty() { ".".into() } else { path }, e.into_inner().message().trim())
        })?;
        cfg.scenario_kind()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn scenario_kind(&self) -> Result<ScenarioKind> {
        self.scenario
            .parse()
            .map_err(|_| RunError::config("scenario", format!("unknown scenario `{}`", self.scenario)))
    }

    pub fn imaging_geometry(&self) -> ImagingGeometry {
        let g = &self.geometry;
        let mut out = ImagingGeometry {
            s_o: g.s_o,
            s_i: g.s_i,
            f: g.f,
            lens_radius: g.lens_radius,
            d_1: g.d_1,
            d_2: g.d_2,
            d_a: g.d_a,
            d_b: g.d_b,
            ..ImagingGeometry::default()
        };
        if let Some(t) = g.lens_tolerance {
            out.lens_tolerance = t;
        }
        out
    }

    pub fn omega(&self) -> Result<f64> {
        match (self.source.wavelength, self.source.omega) {
            (Some(l), None) => omega_from_wavelength(l).map_err(|e| RunError::config("source.wavelength", e.to_string())),
            (None, Some(w)) if w > 0.0 && w.is_finite() => Ok(w),
            (None, Some(_)) => Err(RunError::config("source.omega", "must be positive")),
            (Some(_), Some(_)) => Err(RunError::config("source", "give either wavelength or omega, not both")),
            (None, None) => Err(RunError::config("source", "missing wavelength or omega")),
        }
    }

    pub fn source_model(&self) -> Result<SourceModel> {
        let omega = self.omega()?;
        let kind = match self.source.kind {
            SourceKindConfig::Coherent => SourceKind::CoherentMonochromatic,
            SourceKindConfig::Chaotic => SourceKind::ChaoticThermal,
            SourceKindConfig::Spdc => SourceKind::EntangledSpdc,
        };
        let model = SourceModel {
            kind,
            omega,
            extent: self.source.half_width,
            sub_sources: self.source.sub_sources.unwrap_or(1),
        };
        model.validate().map_err(|e| RunError::config("source", e.to_string()))?;
        Ok(model)
    }

    pub fn mask(&self) -> Result<ApertureMask> {
        let m = self.mask.as_ref().ok_or_else(|| RunError::config("mask", "this scenario needs a mask"))?;
        let mask = match m {
            MaskConfig::DoubleSlit { separation, width, length } => ApertureMask::DoubleSlit {
                separation: *separation,
                width: *width,
                length: *length,
            },
            MaskConfig::Disk { radius, center } => ApertureMask::Disk {
                center: *center,
                radius: *radius,
            },
            MaskConfig::Bars { intervals, length } => ApertureMask::Bars {
                intervals: intervals.iter().map(|p| (p[0], p[1])).collect(),
                length: *length,
            },
            MaskConfig::Bitmap { path, pitch } => {
                let full = match &self.base_dir {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                ApertureMask::Bitmap(pgm::read_mask(&full, *pitch)?)
            }
            MaskConfig::Open { half_width } => ApertureMask::Bars {
                intervals: vec![(-half_width, *half_width)],
                length: Some(2.0 * half_width),
            },
        };
        mask.validate().map_err(|e| RunError::config("mask", e.to_string()))?;
        Ok(mask)
    }

    pub fn grid(&self) -> Result<ScanGrid> {
        grid_from(&self.grid, "grid")
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            rule: match q.rule {
                RuleConfig::Midpoint => Rule::Midpoint,
                RuleConfig::GaussLegendre => Rule::GaussLegendre,
            },
            points: match q.points {
                PointsConfig::Fixed(n) => Points::Fixed(n),
                PointsConfig::Auto(_) => Points::Auto,
            },
        }
    }

    pub fn pupil_method(&self) -> PupilMethod {
        match self.quadrature.pupil {
            PupilConfig::Auto => PupilMethod::Auto,
            PupilConfig::ClosedForm => PupilMethod::ClosedForm,
            PupilConfig::Quadrature => PupilMethod::Quadrature,
        }
    }
}

pub fn grid_from(g: &GridConfig, path: &str) -> Result<ScanGrid> {
    let dim = match g.dim {
        1 => Dim::One,
        2 => Dim::Two,
        d => return Err(RunError::config(format!("{path}.dim"), format!("must be 1 or 2, got {d}"))),
    };
    let grid = ScanGrid {
        dim,
        extent: g.extent,
        samples: g.samples,
        offset: g.offset,
    };
    grid.validate().map_err(|e| RunError::config(path, e.to_string()))?;
    Ok(grid)
}
