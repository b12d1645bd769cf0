use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Default tolerance on the thin-lens residual `|1/s_o + 1/s_i − 1/f|`, m⁻¹.
pub const DEFAULT_LENS_TOLERANCE: f64 = 1e-9;

/// Relative thin-lens tolerance for the secondary re-imaging lens, whose
/// distances are only quoted to the millimeter.
const SECONDARY_RELATIVE_TOLERANCE: f64 = 0.04;

/// Axial distances and lens aperture. Which fields are needed depends on the
/// scenario; see [`ScenarioKind::required_fields`].
#[derive(Clone, Debug, PartialEq)]
pub struct ImagingGeometry {
    /// Object to lens.
    pub s_o: Option<f64>,
    /// Lens to image plane.
    pub s_i: Option<f64>,
    /// Focal length.
    pub f: Option<f64>,
    pub lens_radius: Option<f64>,
    /// Ghost imaging: source to lens (arm 1).
    pub d_1: Option<f64>,
    /// Ghost imaging: source to scanning detector (arm 2).
    pub d_2: Option<f64>,
    /// Lensless thermal imaging: source to object (arm A).
    pub d_a: Option<f64>,
    /// Lensless thermal imaging: source to scan plane (arm B).
    pub d_b: Option<f64>,
    /// Thin-lens tolerance, m⁻¹.
    pub lens_tolerance: f64,
}

impl Default for ImagingGeometry {
    fn default() -> Self {
        ImagingGeometry {
            s_o: None,
            s_i: None,
            f: None,
            lens_radius: None,
            d_1: None,
            d_2: None,
            d_a: None,
            d_b: None,
            lens_tolerance: DEFAULT_LENS_TOLERANCE,
        }
    }
}

/// Named geometry fields, used in error messages and the required-field table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    SO,
    SI,
    F,
    LensRadius,
    D1,
    D2,
    DA,
    DB,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::SO,
        Field::SI,
        Field::F,
        Field::LensRadius,
        Field::D1,
        Field::D2,
        Field::DA,
        Field::DB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::SO => "s_o",
            Field::SI => "s_i",
            Field::F => "f",
            Field::LensRadius => "lens_radius",
            Field::D1 => "d_1",
            Field::D2 => "d_2",
            Field::DA => "d_a",
            Field::DB => "d_b",
        }
    }
}

impl ImagingGeometry {
    /// Single-lens imaging geometry.
    pub fn lens(s_o: f64, s_i: f64, f: f64, lens_radius: f64) -> Self {
        ImagingGeometry {
            s_o: Some(s_o),
            s_i: Some(s_i),
            f: Some(f),
            lens_radius: Some(lens_radius),
            ..Default::default()
        }
    }

    /// Lensless two-arm geometry.
    pub fn lensless(d_a: f64, d_b: f64) -> Self {
        ImagingGeometry {
            d_a: Some(d_a),
            d_b: Some(d_b),
            ..Default::default()
        }
    }

    pub fn get(&self, field: Field) -> Option<f64> {
        match field {
            Field::SO => self.s_o,
            Field::SI => self.s_i,
            Field::F => self.f,
            Field::LensRadius => self.lens_radius,
            Field::D1 => self.d_1,
            Field::D2 => self.d_2,
            Field::DA => self.d_a,
            Field::DB => self.d_b,
        }
    }

    pub fn require(&self, field: Field) -> Result<f64> {
        self.get(field).ok_or(Error::MissingField(field.name()))
    }

    /// `s_i` if set, otherwise the unfolded ghost distance `d_1 + d_2`.
    pub fn image_distance(&self) -> Option<f64> {
        self.s_i.or(match (self.d_1, self.d_2) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        })
    }

    /// Thin-lens residual in m⁻¹, if the three distances are known.
    pub fn lens_residual(&self) -> Option<f64> {
        Some(lens_residual(self.s_o?, self.image_distance()?, self.f?))
    }

    /// `true` when the residual is within [`Self::lens_tolerance`].
    pub fn is_focused(&self) -> bool {
        self.lens_residual()
            .is_some_and(|r| r.abs() <= self.lens_tolerance)
    }
}

/// `1/s_o + 1/s_i − 1/f`.
pub fn lens_residual(s_o: f64, s_i: f64, f: f64) -> f64 {
    1.0 / s_o + 1.0 / s_i - 1.0 / f
}

/// Positive magnification `s_i / s_o`. Image inversion is applied by the image
/// formulas, not carried in the sign.
pub fn magnification(g: &ImagingGeometry) -> Result<f64> {
    let s_o = g.require(Field::SO)?;
    let s_i = g.image_distance().ok_or(Error::MissingField("s_i"))?;
    if !(s_o > 0.0 && s_i > 0.0) {
        return Err(Error::invalid("magnification", "s_o and s_i must be > 0"));
    }
    Ok(s_i / s_o)
}

/// The experiments the simulator knows how to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    ClassicalCoherent,
    ClassicalIncoherent,
    TwoPhotonSpdc,
    TwoPhotonLaser,
    TwoPhotonChaotic,
    GhostSpdc,
    GhostThermalLensless,
    GhostSecondary,
    HbtFarfield,
    SpeckleMc,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 10] = [
        ScenarioKind::ClassicalCoherent,
        ScenarioKind::ClassicalIncoherent,
        ScenarioKind::TwoPhotonSpdc,
        ScenarioKind::TwoPhotonLaser,
        ScenarioKind::TwoPhotonChaotic,
        ScenarioKind::GhostSpdc,
        ScenarioKind::GhostThermalLensless,
        ScenarioKind::GhostSecondary,
        ScenarioKind::HbtFarfield,
        ScenarioKind::SpeckleMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ClassicalCoherent => "classical-coherent",
            ScenarioKind::ClassicalIncoherent => "classical-incoherent",
            ScenarioKind::TwoPhotonSpdc => "two-photon-spdc",
            ScenarioKind::TwoPhotonLaser => "two-photon-laser",
            ScenarioKind::TwoPhotonChaotic => "two-photon-chaotic",
            ScenarioKind::GhostSpdc => "ghost-spdc",
            ScenarioKind::GhostThermalLensless => "ghost-thermal-lensless",
            ScenarioKind::GhostSecondary => "ghost-secondary",
            ScenarioKind::HbtFarfield => "hbt-farfield",
            ScenarioKind::SpeckleMc => "speckle-mc",
        }
    }

    /// Required-field matrix.
    ///
    /// | scenario                      | s_o | s_i | f | R | d_1 | d_2 | d_a | d_b |
    /// |-------------------------------|-----|-----|---|---|-----|-----|-----|-----|
    /// | classical-*, two-photon-*     |  x  |  x  | x | x |     |     |     |     |
    /// | ghost-spdc                    |  x  |     | x | x |  x  |  x  |     |     |
    /// | ghost-thermal-lensless        |     |     |   |   |     |     |  x  |  x  |
    /// | ghost-secondary               |     |  x  | x | x |     |     |  x  |  x  |
    /// | speckle-mc                    |     |     |   |   |     |     |  x  |  x  |
    /// | hbt-farfield                  |     |     |   |   |     |     |     |     |
    ///
    /// For `ghost-secondary` the re-imaging lens sees the ghost plane at
    /// object distance `d_b − d_a` and forms its image at `s_i`.
    pub fn required_fields(self) -> &'static [Field] {
        use Field::*;
        match self {
            ScenarioKind::ClassicalCoherent
            | ScenarioKind::ClassicalIncoherent
            | ScenarioKind::TwoPhotonSpdc
            | ScenarioKind::TwoPhotonLaser
            | ScenarioKind::TwoPhotonChaotic => &[SO, SI, F, LensRadius],
            ScenarioKind::GhostSpdc => &[D1, D2, SO, F, LensRadius],
            ScenarioKind::GhostThermalLensless | ScenarioKind::SpeckleMc => &[DA, DB],
            ScenarioKind::GhostSecondary => &[DA, DB, SI, F, LensRadius],
            ScenarioKind::HbtFarfield => &[],
        }
    }

    /// Scenarios whose closed-form kernel only exists on the focal plane.
    /// Other lens scenarios accept defocus and report the residual.
    pub fn demands_focus(self) -> bool {
        matches!(
            self,
            ScenarioKind::TwoPhotonSpdc | ScenarioKind::TwoPhotonLaser | ScenarioKind::TwoPhotonChaotic
        )
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown scenario `{s}`")))
    }
}

/// One violated constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    /// Signed residual in the constraint's natural unit (m or m⁻¹).
    pub residual: f64,
    pub tolerance: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub scenario: ScenarioKind,
    /// Thin-lens residual, m⁻¹, when a lens is involved.
    pub lens_residual: Option<f64>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Converts a failed report into an error.
    pub fn into_result(self) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.message.clone()).collect();
            Err(Error::invalid("geometry", msgs.join("; ")))
        }
    }
}

/// Checks a geometry against the constraints of `scenario`.
///
/// Missing required fields are errors; violated constraints are listed in the
/// returned report together with their residuals.
pub fn validate_geometry(g: &ImagingGeometry, scenario: ScenarioKind) -> Result<ValidationReport> {
    for &field in scenario.required_fields() {
        g.require(field)?;
    }
    let mut violations = Vec::new();
    for field in Field::ALL {
        if let Some(v) = g.get(field) {
            if !(v.is_finite() && v > 0.0) {
                violations.push(Violation {
                    constraint: "positive distance",
                    residual: v,
                    tolerance: 0.0,
                    message: format!("{} must be > 0, got {v}", field.name()),
                });
            }
        }
    }

    if let (Some(s_i), Some(d_1), Some(d_2)) = (g.s_i, g.d_1, g.d_2) {
        let r = s_i - (d_1 + d_2);
        if r.abs() > 1e-12 * s_i.abs().max(1.0) {
            violations.push(Violation {
                constraint: "unfolded image distance",
                residual: r,
                tolerance: 1e-12,
                message: format!("s_i must equal d_1 + d_2; residual {r:e} m"),
            });
        }
    }

    let lens_residual = match scenario {
        ScenarioKind::GhostSecondary => {
            let (d_a, d_b) = (g.require(Field::DA)?, g.require(Field::DB)?);
            let (s_i, f) = (g.require(Field::SI)?, g.require(Field::F)?);
            if d_b <= d_a {
                violations.push(Violation {
                    constraint: "secondary object distance",
                    residual: d_b - d_a,
                    tolerance: 0.0,
                    message: "d_b must exceed d_a so the ghost plane precedes the lens".into(),
                });
                None
            } else {
                let r = lens_residual(d_b - d_a, s_i, f);
                let tol = SECONDARY_RELATIVE_TOLERANCE / f;
                if r.abs() > tol {
                    violations.push(thin_lens_violation(r, tol));
                }
                Some(r)
            }
        }
        _ => {
            let r = g.lens_residual();
            if let Some(r) = r {
                if scenario.demands_focus() && !(r.abs() <= g.lens_tolerance) {
                    violations.push(thin_lens_violation(r, g.lens_tolerance));
                }
            }
            r
        }
    };

    Ok(ValidationReport {
        scenario,
        lens_residual,
        violations,
    })
}

fn thin_lens_violation(r: f64, tol: f64) -> Violation {
    Violation {
        constraint: "thin lens",
        residual: r,
        tolerance: tol,
        message: format!("1/s_o + 1/s_i - 1/f = {r:e} m^-1 exceeds {tol:e}"),
    }
}
