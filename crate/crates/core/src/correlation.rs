//! Second-order (coincidence) images for the three source classes.
//!
//! - Entangled SPDC: `G⁽²⁾(ρ,ρ) ∝ |∫ dρ_o A²(ρ_o) e^{iω_p|ρ_o|²/(2cs_o)}
//!   K(κ_p R|ρ_o + ρ/m|)|²` with `K(x) = 2J₁(x)/x²` at the pump frequency.
//!   The kernel is only area-integrable, so 1-D grids are refused.
//! - Coherent laser: the product of two coherent images.
//! - Chaotic light: `I(ρ₁)I(ρ₂) + |∫ dρ_o |A|² P*(ρ₁)P(ρ₂)|²`, reported as the
//!   product and interference terms separately.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::classical::{prepare, LensImager};
use crate::error::{require_positive, Error, Result};
use crate::model::{
    validate_geometry, ApertureMask, Dim, ImagingGeometry, ScanGrid, ScenarioKind, Vec2,
};
use crate::par;
use crate::propagation::PupilMethod;
use crate::quadrature::QuadratureSpec;
use crate::specfun::{kernel_unchecked, KernelConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationMode {
    /// Both detectors at the same point, scanned together.
    JointDiagonal,
    /// Every (ρ₁, ρ₂) pair of a 1-D grid; `values[i·n + j]` holds (ρ₁ᵢ, ρ₂ⱼ).
    FullJoint,
    /// One detector integrates over the object (bucket); the other scans.
    Bucket,
}

/// Non-negative correlation values normalized to unit peak of the total.
/// When present, `product` and `interference` share that normalization and
/// add up to `values`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMap {
    pub mode: CorrelationMode,
    pub grid: ScanGrid,
    pub values: Vec<f64>,
    pub product: Option<Vec<f64>>,
    pub interference: Option<Vec<f64>>,
    /// Normalization constant (raw peak of the total).
    pub peak: f64,
    /// Kernel evaluations that hit the regularization floor.
    pub clamped: usize,
    pub label: String,
}

impl CorrelationMap {
    pub(crate) fn from_raw(
        mode: CorrelationMode,
        grid: ScanGrid,
        total: Vec<f64>,
        parts: Option<(Vec<f64>, Vec<f64>)>,
        label: impl Into<String>,
    ) -> Self {
        let peak = total.iter().copied().fold(0.0, f64::max);
        let scale = |v: Vec<f64>| -> Vec<f64> {
            if peak > 0.0 {
                v.into_iter().map(|x| x / peak).collect()
            } else {
                alloc::vec![0.0; v.len()]
            }
        };
        let (product, interference) = match parts {
            Some((p, i)) => (Some(scale(p)), Some(scale(i))),
            None => (None, None),
        };
        CorrelationMap {
            mode,
            grid,
            values: scale(total),
            product,
            interference,
            peak,
            clamped: 0,
            label: label.into(),
        }
    }

    /// Samples per ρ axis.
    pub fn side(&self) -> usize {
        match self.mode {
            CorrelationMode::FullJoint => self.grid.samples,
            _ => self.grid.len(),
        }
    }
}

/// Degenerate collinear biphoton from a plane-wave pump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiphotonState {
    pub omega_pump: f64,
}

impl BiphotonState {
    pub fn new(omega_pump: f64) -> Result<Self> {
        require_positive("pump omega", omega_pump)?;
        Ok(BiphotonState { omega_pump })
    }

    /// Signal and idler frequency, `ω_p/2`.
    pub fn signal_omega(&self) -> f64 {
        0.5 * self.omega_pump
    }
}

/// Joint-scan two-photon image of an entangled pair source.
pub fn spdc_joint_image(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    state: &BiphotonState,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
    kernel: &KernelConfig,
) -> Result<CorrelationMap> {
    if grid.dim == Dim::One {
        return Err(Error::Unsupported(
            "the two-photon kernel 2J1(x)/x^2 diverges like 1/x and is not integrable along a \
             line; use a 2-D grid"
                .into(),
        ));
    }
    if !(kernel.floor > 0.0) {
        return Err(Error::invalid("kernel floor", "must be > 0"));
    }
    grid.validate()?;
    validate_geometry(g, ScenarioKind::TwoPhotonSpdc)?.into_result()?;
    let im = LensImager::new(
        mask,
        g,
        state.omega_pump,
        grid.dim,
        grid.max_radius(),
        quad,
        PupilMethod::ClosedForm,
    )?;
    let n = &im.nodes;
    let phase = im.object_phase();
    let rows = par::map_indexed(grid.len(), |k| {
        let rho = grid.point(k);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut clamped = 0usize;
        for j in 0..n.len() {
            let t = n.transmission[j];
            let kv = kernel_unchecked(im.pupil.beta(n.points[j], rho), kernel.floor);
            clamped += kv.clamped as usize;
            acc += (n.weights[j] * t * t * kv.value) * phase[j];
        }
        (acc.norm_sqr(), clamped)
    });
    let clamped = rows.iter().map(|r| r.1).sum();
    let raw = rows.into_iter().map(|r| r.0).collect();
    let mut map = CorrelationMap::from_raw(CorrelationMode::JointDiagonal, grid.clone(), raw, None, mask.label());
    map.clamped = clamped;
    Ok(map)
}

/// Laser-light `G⁽²⁾(ρ₁, ρ₂) = I(ρ₁)·I(ρ₂)` with `I` the (unnormalized)
/// coherent image.
pub fn laser_g2(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    rho1: Vec2,
    rho2: Vec2,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let im = point_imager(mask, g, omega, &[rho1, rho2], quad, ScenarioKind::TwoPhotonLaser)?;
    Ok(im.coherent_amplitude(rho1).norm_sqr() * im.coherent_amplitude(rho2).norm_sqr())
}

/// Chaotic-light `G⁽²⁾` split into its two terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChaoticG2 {
    /// `I(ρ₁)·I(ρ₂)`.
    pub product: f64,
    /// `|∫ |A|² P*(ρ₁) P(ρ₂)|²`.
    pub interference: f64,
    pub total: f64,
}

impl LensImager {
    pub fn chaotic_g2(&self, rho1: Vec2, rho2: Vec2) -> ChaoticG2 {
        let product = self.incoherent(rho1) * self.incoherent(rho2);
        let interference = self.cross(rho1, rho2).norm_sqr();
        ChaoticG2 {
            product,
            interference,
            total: product + interference,
        }
    }
}

pub fn chaotic_g2(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    rho1: Vec2,
    rho2: Vec2,
    quad: &QuadratureSpec,
) -> Result<ChaoticG2> {
    let im = point_imager(mask, g, omega, &[rho1, rho2], quad, ScenarioKind::TwoPhotonChaotic)?;
    Ok(im.chaotic_g2(rho1, rho2))
}

fn point_imager(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    points: &[Vec2],
    quad: &QuadratureSpec,
    scenario: ScenarioKind,
) -> Result<LensImager> {
    for p in points {
        crate::error::require_finite("rho", p[0])?;
        crate::error::require_finite("rho", p[1])?;
    }
    validate_geometry(g, scenario)?.into_result()?;
    let radius = points.iter().map(|p| crate::model::norm(*p)).fold(0.0, f64::max);
    let dim = if points.iter().all(|p| p[1] == 0.0) { Dim::One } else { Dim::Two };
    LensImager::new(mask, g, omega, dim, radius, quad, PupilMethod::Auto)
}

/// Chaotic joint-scan (ρ₁ = ρ₂) image with its decomposition.
pub fn chaotic_joint_scan(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<CorrelationMap> {
    let im = prepare(mask, g, omega, grid, quad, ScenarioKind::TwoPhotonChaotic)?;
    let terms = par::map_indexed(grid.len(), |k| {
        let p = grid.point(k);
        im.chaotic_g2(p, p)
    });
    Ok(decomposed(CorrelationMode::JointDiagonal, grid, &terms, mask.label()))
}

/// Chaotic `G⁽²⁾` over all pairs of a 1-D grid.
pub fn chaotic_full_joint(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<CorrelationMap> {
    if grid.dim != Dim::One {
        return Err(Error::Unsupported("full joint maps are built over 1-D grids".into()));
    }
    let im = prepare(mask, g, omega, grid, quad, ScenarioKind::TwoPhotonChaotic)?;
    let n = grid.samples;
    let intensity = par::map_indexed(n, |i| im.incoherent(grid.point(i)));
    let terms = par::map_indexed(n * n, |k| {
        let (i, j) = (k / n, k % n);
        let interference = im.cross(grid.point(i), grid.point(j)).norm_sqr();
        let product = intensity[i] * intensity[j];
        ChaoticG2 {
            product,
            interference,
            total: product + interference,
        }
    });
    Ok(decomposed(CorrelationMode::FullJoint, grid, &terms, mask.label()))
}

/// Laser `G⁽²⁾` over all pairs of a 1-D grid.
pub fn laser_full_joint(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<CorrelationMap> {
    if grid.dim != Dim::One {
        return Err(Error::Unsupported("full joint maps are built over 1-D grids".into()));
    }
    let im = prepare(mask, g, omega, grid, quad, ScenarioKind::TwoPhotonLaser)?;
    let n = grid.samples;
    let intensity = par::map_indexed(n, |i| im.coherent_amplitude(grid.point(i)).norm_sqr());
    let raw = (0..n * n).map(|k| intensity[k / n] * intensity[k % n]).collect();
    Ok(CorrelationMap::from_raw(CorrelationMode::FullJoint, grid.clone(), raw, None, mask.label()))
}

fn decomposed(mode: CorrelationMode, grid: &ScanGrid, terms: &[ChaoticG2], label: String) -> CorrelationMap {
    let total = terms.iter().map(|t| t.total).collect();
    let product = terms.iter().map(|t| t.product).collect();
    let interference = terms.iter().map(|t| t.interference).collect();
    CorrelationMap::from_raw(mode, grid.clone(), total, Some((product, interference)), label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::incoherent_image;
    use crate::model::omega_from_wavelength;

    fn setup() -> (ImagingGeometry, f64, ApertureMask) {
        let mask = ApertureMask::DoubleSlit {
            separation: 3e-5,
            width: 1e-5,
            length: None,
        };
        (ImagingGeometry::lens(0.6, 1.2, 0.4, 5e-3), omega_from_wavelength(702.2e-9).unwrap(), mask)
    }

    #[test]
    fn spdc_rejects_line_grids() {
        let (g, w, mask) = setup();
        let grid = ScanGrid::line(1e-4, 11).unwrap();
        let state = BiphotonState::new(2.0 * w).unwrap();
        let err = spdc_joint_image(&mask, &g, &state, &grid, &QuadratureSpec::default(), &KernelConfig::default());
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn chaotic_diagonal_interference_is_squared_image() {
        let (g, w, mask) = setup();
        let grid = ScanGrid::line(1e-4, 81).unwrap();
        let q = QuadratureSpec::default();
        let map = chaotic_joint_scan(&mask, &g, w, &grid, &q).unwrap();
        let img = incoherent_image(&mask, &g, w, &grid, &q).unwrap();
        let inter = map.interference.as_ref().unwrap();
        let prod = map.product.as_ref().unwrap();
        let top = inter.iter().copied().fold(0.0, f64::max);
        for k in 0..grid.len() {
            let want = img.values[k] * img.values[k] * top;
            assert!((inter[k] - want).abs() <= 1e-9 * top);
            assert!((prod[k] - inter[k]).abs() <= 1e-12);
            assert!((map.values[k] - prod[k] - inter[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn laser_factorizes_and_vanishes_at_zero() {
        let (g, w, _) = setup();
        let mask = ApertureMask::disk([0.0, 0.0], 1e-7);
        let q = QuadratureSpec::default();
        let zero = crate::propagation::FIRST_J1_ZERO * crate::model::SPEED_OF_LIGHT * 0.6 / (w * 5e-3) * 2.0;
        for rho2 in [0.0, 1e-5, 3e-5] {
            let v = laser_g2(&mask, &g, w, [zero, 0.0], [rho2, 0.0], &q).unwrap();
            let p = laser_g2(&mask, &g, w, [0.0, 0.0], [rho2, 0.0], &q).unwrap();
            assert!(v <= 1e-9 * p, "{v} vs {p}");
        }
        let same = laser_g2(&mask, &g, w, [1e-5, 0.0], [1e-5, 0.0], &q).unwrap();
        let im = point_imager(&mask, &g, w, &[[1e-5, 0.0]], &q, ScenarioKind::TwoPhotonLaser).unwrap();
        let i = im.coherent_amplitude([1e-5, 0.0]).norm_sqr();
        assert!((same - i * i).abs() <= 1e-12 * same);
    }

    #[test]
    fn chaotic_symmetry_and_decay() {
        let (g, w, mask) = setup();
        let q = QuadratureSpec::default();
        let a = chaotic_g2(&mask, &g, w, [1e-5, 0.0], [-2e-5, 0.0], &q).unwrap();
        let b = chaotic_g2(&mask, &g, w, [-2e-5, 0.0], [1e-5, 0.0], &q).unwrap();
        assert!((a.total - b.total).abs() <= 1e-12 * a.total);
        let near = chaotic_g2(&mask, &g, w, [3e-5, 0.0], [3e-5, 0.0], &q).unwrap();
        let far = chaotic_g2(&mask, &g, w, [3e-5, 0.0], [5e-3, 0.0], &q).unwrap();
        assert!(far.interference < 1e-4 * near.interference);
        assert!((far.total - far.product).abs() <= 1e-4 * near.total);
    }
}
