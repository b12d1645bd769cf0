//! First-order images through a thin lens.
//!
//! With `P` the pupil kernel of [`crate::propagation`], the incoherent image is
//! `I(ρ_i) = ∫ dρ_o |A(ρ_o)|² |P(ρ_o, ρ_i)|²` and the coherent image is
//! `I(ρ_i) = |∫ dρ_o A(ρ_o) e^{iω|ρ_o|²/(2cs_o)} P(ρ_o, ρ_i)|²`. Both are
//! evaluated by direct quadrature over the mask support. A point at `ρ_o`
//! images to `−m·ρ_o`.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::model::{
    norm, validate_geometry, ApertureMask, Dim, Field, ImagingGeometry, ScanGrid, ScenarioKind,
    Vec2, SPEED_OF_LIGHT as C,
};
use crate::par;
use crate::propagation::{cis, Pupil, PupilMethod};
use crate::quadrature::{NodePlan, Nodes, PhaseRate, QuadratureSpec};

/// Real, non-negative profile on a scan grid, normalized to unit peak.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityProfile {
    pub grid: ScanGrid,
    pub values: Vec<f64>,
    /// Peak before normalization (0 for an identically dark image).
    pub peak: f64,
    pub label: String,
}

impl IntensityProfile {
    /// Normalizes `raw` to unit peak. Negative round-off is clipped to 0.
    pub fn from_raw(grid: ScanGrid, raw: Vec<f64>, label: impl Into<String>) -> Self {
        let peak = raw.iter().copied().fold(0.0, f64::max);
        let values = if peak > 0.0 {
            raw.iter().map(|v| (v / peak).max(0.0)).collect()
        } else {
            alloc::vec![0.0; raw.len()]
        };
        IntensityProfile {
            grid,
            values,
            peak,
            label: label.into(),
        }
    }

    /// x coordinates of [`Self::row`].
    pub fn axis(&self) -> Vec<f64> {
        self.grid.axis()
    }

    /// Values along the central row (the whole profile in 1-D).
    pub fn row(&self) -> Vec<f64> {
        self.grid.central_row().into_iter().map(|k| self.values[k]).collect()
    }
}

/// A mask and lens geometry prepared for repeated image-plane evaluation.
#[derive(Clone, Debug)]
pub struct LensImager {
    pub pupil: Pupil,
    pub nodes: Nodes,
    object_phase: Vec<Complex64>,
}

impl LensImager {
    /// `image_radius` bounds the image-plane points that will be requested.
    pub fn new(
        mask: &ApertureMask,
        g: &ImagingGeometry,
        omega: f64,
        dim: Dim,
        image_radius: f64,
        quad: &QuadratureSpec,
        method: PupilMethod,
    ) -> Result<Self> {
        require_positive("omega", omega)?;
        mask.validate()?;
        let s_o = g.require(Field::SO)?;
        let s_i = g.image_distance().ok_or(Error::MissingField("s_i"))?;
        let r = g.require(Field::LensRadius)?;
        let k = omega / (C * s_o);
        let rate = PhaseRate {
            constant: k * r,
            per_radius: k,
        };
        let nodes = NodePlan::new(mask, dim, quad, rate, "object integral")?.nodes();
        let object_radius = nodes.points.iter().map(|p| norm(*p)).fold(0.0, f64::max);
        let beta_max = k * r * (object_radius + image_radius * s_o / s_i);
        let pupil = Pupil::new(g, omega, quad, method, beta_max)?;
        let a = omega / (2.0 * C * s_o);
        let object_phase = nodes
            .points
            .iter()
            .map(|p| cis(a * (p[0] * p[0] + p[1] * p[1])))
            .collect();
        Ok(LensImager {
            pupil,
            nodes,
            object_phase,
        })
    }

    /// `Σ w |A|² |P|²`.
    pub fn incoherent(&self, rho_i: Vec2) -> f64 {
        let n = &self.nodes;
        let mut acc = 0.0;
        for k in 0..n.len() {
            let t = n.transmission[k];
            acc += n.weights[k] * t * t * self.pupil.eval(n.points[k], rho_i).norm_sqr();
        }
        acc
    }

    /// `Σ w A e^{iω|ρ_o|²/(2cs_o)} P`.
    pub fn coherent_amplitude(&self, rho_i: Vec2) -> Complex64 {
        let n = &self.nodes;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n.len() {
            acc += (n.weights[k] * n.transmission[k]) * self.object_phase[k]
                * self.pupil.eval(n.points[k], rho_i);
        }
        acc
    }

    /// `Σ w |A|² P*(ρ₁) P(ρ₂)`.
    pub fn cross(&self, rho1: Vec2, rho2: Vec2) -> Complex64 {
        let n = &self.nodes;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n.len() {
            let t = n.transmission[k];
            let p1 = self.pupil.eval(n.points[k], rho1);
            let p2 = self.pupil.eval(n.points[k], rho2);
            acc += (n.weights[k] * t * t) * p1.conj() * p2;
        }
        acc
    }

    pub(crate) fn object_phase(&self) -> &[Complex64] {
        &self.object_phase
    }
}

pub(crate) fn prepare(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
    scenario: ScenarioKind,
) -> Result<LensImager> {
    grid.validate()?;
    validate_geometry(g, scenario)?.into_result()?;
    LensImager::new(mask, g, omega, grid.dim, grid.max_radius(), quad, PupilMethod::Auto)
}

/// Incoherent image of `mask`.
pub fn incoherent_image(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<IntensityProfile> {
    let im = prepare(mask, g, omega, grid, quad, ScenarioKind::ClassicalIncoherent)?;
    let raw = par::map_indexed(grid.len(), |k| im.incoherent(grid.point(k)));
    Ok(IntensityProfile::from_raw(grid.clone(), raw, mask.label()))
}

/// Coherent image of `mask`, including the Fresnel phase on the object.
pub fn coherent_image(
    mask: &ApertureMask,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<IntensityProfile> {
    let im = prepare(mask, g, omega, grid, quad, ScenarioKind::ClassicalCoherent)?;
    let raw = par::map_indexed(grid.len(), |k| im.coherent_amplitude(grid.point(k)).norm_sqr());
    Ok(IntensityProfile::from_raw(grid.clone(), raw, mask.label()))
}

/// Image of an ideal point source at `rho_o`: `|P(ρ_o, ρ_i)|²`.
pub fn point_image(
    rho_o: Vec2,
    g: &ImagingGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<IntensityProfile> {
    grid.validate()?;
    validate_geometry(g, ScenarioKind::ClassicalIncoherent)?.into_result()?;
    let s_o = g.require(Field::SO)?;
    let r = g.require(Field::LensRadius)?;
    let m = crate::model::magnification(g)?;
    let beta_max = omega * r / (C * s_o) * (norm(rho_o) + grid.max_radius() / m);
    let pupil = Pupil::new(g, omega, quad, PupilMethod::Auto, beta_max)?;
    let raw = par::map_indexed(grid.len(), |k| pupil.eval(rho_o, grid.point(k)).norm_sqr());
    Ok(IntensityProfile::from_raw(grid.clone(), raw, "point"))
}

/// Perfect-imaging limit `|A(−ρ_i/m)|²`.
pub fn geometric_image(mask: &ApertureMask, m: f64, grid: &ScanGrid) -> Result<IntensityProfile> {
    require_positive("magnification", m)?;
    let raw = grid
        .points()
        .into_iter()
        .map(|p| {
            let t = mask.transmission_at([-p[0] / m, -p[1] / m]);
            t * t
        })
        .collect();
    Ok(IntensityProfile::from_raw(grid.clone(), raw, mask.label()))
}

/// Largest absolute slope of the normalized profile between neighboring
/// samples, per meter. A flat profile has sharpness 0.
pub fn image_sharpness(profile: &IntensityProfile) -> f64 {
    let g = &profile.grid;
    let h = g.spacing();
    let n = g.samples;
    let v = &profile.values;
    let mut best: f64 = 0.0;
    match g.dim {
        Dim::One => {
            for i in 1..n {
                best = best.max((v[i] - v[i - 1]).abs());
            }
        }
        Dim::Two => {
            for j in 0..n {
                for i in 0..n {
                    let k = j * n + i;
                    if i > 0 {
                        best = best.max((v[k] - v[k - 1]).abs());
                    }
                    if j > 0 {
                        best = best.max((v[k] - v[k - n]).abs());
                    }
                }
            }
        }
    }
    best / h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use crate::model::omega_from_wavelength;
    use alloc::vec;

    fn setup() -> (ImagingGeometry, f64) {
        (
            ImagingGeometry::lens(0.6, 1.2, 0.4, 2e-3),
            omega_from_wavelength(702.2e-9).unwrap(),
        )
    }

    #[test]
    fn point_image_is_centered_at_minus_m_rho() {
        let (g, w) = setup();
        let grid = ScanGrid::line(1e-3, 401).unwrap();
        let rho_o = 1.5e-4;
        let p = point_image([rho_o, 0.0], &g, w, &grid, &QuadratureSpec::default()).unwrap();
        let c = metrics::centroid(&p.axis(), &p.values);
        assert!((c + 2.0 * rho_o).abs() < grid.spacing(), "{c}");
    }

    #[test]
    fn tiny_disk_incoherent_equals_coherent() {
        let (g, w) = setup();
        let grid = ScanGrid::line(4e-4, 161).unwrap();
        let mask = ApertureMask::disk([0.0, 0.0], 1e-7);
        let q = QuadratureSpec::default();
        let a = incoherent_image(&mask, &g, w, &grid, &q).unwrap();
        let b = coherent_image(&mask, &g, w, &grid, &q).unwrap();
        let d = metrics::max_abs_difference(&a.values, &b.values);
        assert!(d < 1e-3, "{d}");
    }

    #[test]
    fn opaque_mask_gives_dark_image() {
        let (g, w) = setup();
        let grid = ScanGrid::line(1e-3, 21).unwrap();
        let mask = ApertureMask::Bars {
            intervals: vec![],
            length: None,
        };
        let p = incoherent_image(&mask, &g, w, &grid, &QuadratureSpec::default()).unwrap();
        assert_eq!(p.peak, 0.0);
        assert!(p.values.iter().all(|v| *v == 0.0));
        assert_eq!(image_sharpness(&p), 0.0);
    }

    #[test]
    fn step_edge_sharpness() {
        let grid = ScanGrid::line(1.0, 11).unwrap();
        let raw = (0..11).map(|i| if i < 5 { 0.0 } else { 1.0 }).collect();
        let p = IntensityProfile::from_raw(grid.clone(), raw, "step");
        assert!((image_sharpness(&p) - 1.0 / grid.spacing()).abs() < 1e-12);
    }

    #[test]
    fn large_lens_approaches_geometric_image() {
        let w = omega_from_wavelength(702.2e-9).unwrap();
        let grid = ScanGrid::line(4e-3, 161).unwrap();
        let mask = ApertureMask::Bars {
            intervals: vec![(-1.75e-3, -0.75e-3), (0.75e-3, 1.75e-3)],
            length: None,
        };
        let ideal = geometric_image(&mask, 2.0, &grid).unwrap();
        let mut last = f64::INFINITY;
        for r in [0.5e-4, 1e-4, 2e-4, 4e-4] {
            let g = ImagingGeometry::lens(0.6, 1.2, 0.4, r);
            let p = incoherent_image(&mask, &g, w, &grid, &QuadratureSpec::default()).unwrap();
            let l1: f64 = p.values.iter().zip(&ideal.values).map(|(a, b)| (a - b).abs()).sum();
            assert!(l1 < last, "R = {r}: {l1} !< {last}");
            last = l1;
        }
    }
}
