//! Thermal (chaotic) light: far-field intensity interferometry, lensless
//! near-field ghost imaging, re-imaging of the ghost plane, and the mode-sum
//! form of `G⁽²⁾`.
//!
//! For a uniform incoherent source of half-width `W` the normalized
//! first-order correlation between a point `ρ₁` at distance `d_A` and a point
//! `ρ₂` at distance `d_B` is
//!
//! ```text
//! g₁₂(ρ₁, ρ₂) = (1/|S|) ∫_S ds e^{−iω|ρ₁−s|²/(2cd_A)} e^{+iω|ρ₂−s|²/(2cd_B)}
//! ```
//!
//! Square sources factor into one such integral per axis. The mean intensity
//! is 1 everywhere in these units, so the lensless coincidence image is
//! `∫ |A|² (1 + |g₁₂|²) dρ₁`: a flat product term plus the interference term
//! that carries the image.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::classical::IntensityProfile;
use crate::correlation::{CorrelationMap, CorrelationMode};
use crate::error::{require_finite, require_positive, Error, Result};
use crate::metrics;
use crate::model::{
    wavelength_from_omega, ApertureMask, Dim, ScanGrid, Vec2, DEFAULT_LENS_TOLERANCE,
    SPEED_OF_LIGHT as C,
};
use crate::par;
use crate::propagation::{cis, Pupil, PupilMethod};
use crate::quadrature::{rule_nodes, NodePlan, PhaseRate, QuadratureSpec};
use crate::specfun::sinc_unchecked;

/// Chaotic source description.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalSourceSpec {
    pub omega: f64,
    /// Angular size seen from the detectors, rad (far-field scenarios).
    pub angular_size: Option<f64>,
    /// Half-width of the source, m (near-field scenarios). Line sources in
    /// 1-D, squares in 2-D.
    pub half_width: Option<f64>,
    /// Sub-sources across the width; the pitch is `2W/N`.
    pub sub_sources: usize,
}

impl ThermalSourceSpec {
    pub fn far_field(omega: f64, angular_size: f64) -> Self {
        ThermalSourceSpec {
            omega,
            angular_size: Some(angular_size),
            half_width: None,
            sub_sources: 1,
        }
    }

    pub fn near_field(omega: f64, half_width: f64, sub_sources: usize) -> Self {
        ThermalSourceSpec {
            omega,
            angular_size: None,
            half_width: Some(half_width),
            sub_sources,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("omega", self.omega)?;
        if let Some(t) = self.angular_size {
            require_positive("angular_size", t)?;
        }
        if let Some(w) = self.half_width {
            require_positive("source half_width", w)?;
        }
        if self.angular_size.is_none() && self.half_width.is_none() {
            return Err(Error::MissingField("angular_size or half_width"));
        }
        if self.sub_sources == 0 {
            return Err(Error::invalid("sub_sources", "need at least one"));
        }
        Ok(())
    }

    pub fn require_half_width(&self) -> Result<f64> {
        self.validate()?;
        self.half_width.ok_or(Error::MissingField("source half_width"))
    }

    /// Sub-source spacing `2W/N`.
    pub fn pitch(&self) -> Option<f64> {
        self.half_width.map(|w| 2.0 * w / self.sub_sources as f64)
    }

    pub fn wavelength(&self) -> f64 {
        wavelength_from_omega(self.omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceClass {
    Thermal,
    Entangled,
}

/// Normalized far-field intensity correlation of two detectors at `x1`, `x2`.
///
/// Thermal: `1 + sinc²(πΔθ(x₁+x₂)/λ)`. Entangled: `sinc²(πΔθ(x₁−x₂)/λ)`.
pub fn hbt_farfield(x1: f64, x2: f64, src: &ThermalSourceSpec, lambda: f64, class: SourceClass) -> Result<f64> {
    require_finite("x1", x1)?;
    require_finite("x2", x2)?;
    require_positive("lambda", lambda)?;
    let dtheta = src.angular_size.ok_or(Error::MissingField("angular_size"))?;
    require_positive("angular_size", dtheta)?;
    let sq = |u: f64| {
        let s = sinc_unchecked(u);
        s * s
    };
    Ok(match class {
        SourceClass::Thermal => 1.0 + sq(PI * dtheta * (x1 + x2) / lambda),
        SourceClass::Entangled => sq(PI * dtheta * (x1 - x2) / lambda),
    })
}

/// One-axis correlation integral over `[−W, W]` with prepared nodes.
#[derive(Clone, Debug)]
struct AxisG12 {
    s: Vec<f64>,
    w: Vec<f64>,
    a_a: f64,
    a_b: f64,
    inv_len: f64,
}

impl AxisG12 {
    fn new(omega: f64, d_a: f64, d_b: f64, half_width: f64, max_1: f64, max_2: f64, quad: &QuadratureSpec) -> Result<Self> {
        let rate = omega / C * (max_1 / d_a + max_2 / d_b + half_width * (1.0 / d_a - 1.0 / d_b).abs());
        let n = quad.resolve(2.0 * half_width, rate, "source integral")?;
        let (s, w) = rule_nodes(quad.rule, -half_width, half_width, n);
        Ok(AxisG12 {
            s,
            w,
            a_a: omega / (2.0 * C * d_a),
            a_b: omega / (2.0 * C * d_b),
            inv_len: 0.5 / half_width,
        })
    }

    fn eval(&self, x1: f64, x2: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, w) in self.s.iter().zip(&self.w) {
            let p = -self.a_a * (x1 - s) * (x1 - s) + self.a_b * (x2 - s) * (x2 - s);
            acc += *w * cis(p);
        }
        acc * self.inv_len
    }
}

fn check_arms(d_a: f64, d_b: f64) -> Result<()> {
    require_positive("d_a", d_a)?;
    require_positive("d_b", d_b)?;
    Ok(())
}

/// Normalized `g₁₂(ρ₁, ρ₂)` by quadrature over the source (`|g₁₂(ρ,ρ)| = 1`
/// for equal arms).
pub fn lensless_g12(
    rho1: Vec2,
    rho2: Vec2,
    d_a: f64,
    d_b: f64,
    src: &ThermalSourceSpec,
    dim: Dim,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    check_arms(d_a, d_b)?;
    for v in [rho1[0], rho1[1], rho2[0], rho2[1]] {
        require_finite("rho", v)?;
    }
    let w = src.require_half_width()?;
    let ax = AxisG12::new(src.omega, d_a, d_b, w, rho1[0].abs(), rho2[0].abs(), quad)?;
    let gx = ax.eval(rho1[0], rho2[0]);
    Ok(match dim {
        Dim::One => gx,
        Dim::Two => {
            let ay = AxisG12::new(src.omega, d_a, d_b, w, rho1[1].abs(), rho2[1].abs(), quad)?;
            gx * ay.eval(rho1[1], rho2[1])
        }
    })
}

/// Closed form of [`lensless_g12`] for equal arms `d`:
/// `e^{iω(|ρ₂|²−|ρ₁|²)/(2cd)} Π sinc(ωWΔ/(cd))`.
pub fn lensless_g12_equal_arms(rho1: Vec2, rho2: Vec2, d: f64, src: &ThermalSourceSpec, dim: Dim) -> Result<Complex64> {
    require_positive("d", d)?;
    let w = src.require_half_width()?;
    let k = src.omega * w / (C * d);
    let (r1, r2) = match dim {
        Dim::One => ([rho1[0], 0.0], [rho2[0], 0.0]),
        Dim::Two => (rho1, rho2),
    };
    let phase = src.omega / (2.0 * C * d) * (r2[0] * r2[0] + r2[1] * r2[1] - r1[0] * r1[0] - r1[1] * r1[1]);
    let mut amp = sinc_unchecked(k * (r1[0] - r2[0]));
    if dim == Dim::Two {
        amp *= sinc_unchecked(k * (r1[1] - r2[1]));
    }
    Ok(amp * cis(phase))
}

/// Transverse coherence width on a plane at `d`: first zero of `|g₁₂|²`,
/// `λd/(2W)`.
pub fn coherence_width(src: &ThermalSourceSpec, d: f64) -> Result<f64> {
    Ok(src.wavelength() * d / (2.0 * src.require_half_width()?))
}

/// Lensless ghost image with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct LenslessImage {
    /// Bucket-mode map with product and interference terms.
    pub map: CorrelationMap,
    /// `d_A ≠ d_B`: the correlation is not point-to-point.
    pub defocused: bool,
    /// Source angular size over `λ/feature`; the near-field regime needs
    /// this well above 1.
    pub near_field_ratio: f64,
}

impl LenslessImage {
    /// Background-subtracted image (interference term) as a unit-peak profile.
    pub fn interference_profile(&self) -> IntensityProfile {
        IntensityProfile::from_raw(
            self.map.grid.clone(),
            self.map.interference.clone().unwrap_or_default(),
            self.map.label.clone(),
        )
    }
}

fn mask_feature(mask: &ApertureMask) -> f64 {
    match mask {
        ApertureMask::DoubleSlit { separation, .. } => *separation,
        _ => {
            let s = mask.segments_1d();
            match (s.first(), s.last()) {
                (Some(a), Some(b)) => b.b - a.a,
                _ => 0.0,
            }
        }
    }
}

/// Sorted unique values and the index of each input in that list.
fn unique_index(values: impl Iterator<Item = f64>) -> (Vec<f64>, Vec<usize>) {
    let v: Vec<f64> = values.collect();
    let mut u = v.clone();
    u.sort_by(f64::total_cmp);
    u.dedup();
    let idx = v
        .iter()
        .map(|x| u.binary_search_by(|p| p.total_cmp(x)).unwrap_or(0))
        .collect();
    (u, idx)
}

/// Coincidence image between a bucket detector behind `mask` (arm A) and a
/// scanning detector (arm B).
pub fn lensless_ghost_image(
    mask: &ApertureMask,
    d_a: f64,
    d_b: f64,
    src: &ThermalSourceSpec,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<LenslessImage> {
    check_arms(d_a, d_b)?;
    grid.validate()?;
    mask.validate()?;
    let w = src.require_half_width()?;
    let omega = src.omega;
    // |g₁₂|² is band-limited to 2ωW/(c d_A) in ρ₁.
    let rate = PhaseRate {
        constant: 2.0 * omega * w / (C * d_a),
        per_radius: 0.0,
    };
    let nodes = NodePlan::new(mask, grid.dim, quad, rate, "object integral")?.nodes();
    let r1 = nodes.points.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    let r2 = grid.offset.abs() + grid.extent;
    let axis = AxisG12::new(omega, d_a, d_b, w, r1, r2, quad)?;

    // Per-axis |g|² tables over unique object and scan coordinates.
    let (ux, ix) = unique_index(nodes.points.iter().map(|p| p[0]));
    let gx_axis = grid.axis();
    let tab_x = par::map_indexed(ux.len() * gx_axis.len(), |k| {
        axis.eval(ux[k / gx_axis.len()], gx_axis[k % gx_axis.len()]).norm_sqr()
    });
    let (uy, iy, tab_y, gy_axis) = match grid.dim {
        Dim::One => (alloc::vec![0.0], alloc::vec![0; nodes.len()], alloc::vec![1.0], alloc::vec![0.0]),
        Dim::Two => {
            let (uy, iy) = unique_index(nodes.points.iter().map(|p| p[1]));
            let ya: Vec<f64> = (0..grid.samples).map(|j| grid.y(j)).collect();
            let t = par::map_indexed(uy.len() * ya.len(), |k| {
                axis.eval(uy[k / ya.len()], ya[k % ya.len()]).norm_sqr()
            });
            (uy, iy, t, ya)
        }
    };
    let _ = uy;
    let nx = gx_axis.len();
    let ny = gy_axis.len();

    let bucket: f64 = (0..nodes.len())
        .map(|k| nodes.weights[k] * nodes.transmission[k] * nodes.transmission[k])
        .sum();
    let interference = par::map_indexed(grid.len(), |k| {
        let (i, j) = match grid.dim {
            Dim::One => (k, 0),
            Dim::Two => (k % grid.samples, k / grid.samples),
        };
        let mut acc = 0.0;
        for q in 0..nodes.len() {
            let t = nodes.transmission[q];
            acc += nodes.weights[q] * t * t * tab_x[ix[q] * nx + i] * tab_y[iy[q] * ny + j];
        }
        acc
    });
    let product = alloc::vec![bucket; grid.len()];
    let total = interference.iter().map(|v| v + bucket).collect();
    let map = CorrelationMap::from_raw(
        CorrelationMode::Bucket,
        grid.clone(),
        total,
        Some((product, interference)),
        mask.label(),
    );
    let feature = mask_feature(mask);
    let near_field_ratio = if feature > 0.0 {
        (2.0 * w / d_a) / (src.wavelength() / feature)
    } else {
        f64::INFINITY
    };
    Ok(LenslessImage {
        map,
        defocused: (d_a - d_b).abs() > 1e-12 * d_a.max(d_b),
        near_field_ratio,
    })
}

/// Thin lens re-imaging the ghost plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondaryLens {
    pub f: f64,
    /// Ghost plane to lens.
    pub object_dist: f64,
    /// Lens to detector plane.
    pub image_dist: f64,
    pub lens_radius: f64,
}

impl SecondaryLens {
    pub fn expected_magnification(&self) -> f64 {
        self.image_dist / self.object_dist
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondaryImage {
    pub profile: IntensityProfile,
    /// Ratio of lobe separations (image over ghost plane).
    pub measured_magnification: f64,
    pub expected_magnification: f64,
    /// Thin-lens residual, m⁻¹.
    pub lens_residual: f64,
    /// Residual quadratic pupil phase at the rim, rad.
    pub defocus_phase: f64,
    /// Defocus exceeds the quarter-wave depth of focus (|phase| > π/2).
    pub blurred: bool,
}

/// Incoherent re-imaging of a 1-D ghost-plane profile through a thin lens.
pub fn secondary_image(
    ghost: &IntensityProfile,
    lens: &SecondaryLens,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<SecondaryImage> {
    if ghost.grid.dim != Dim::One || grid.dim != Dim::One {
        return Err(Error::Unsupported("secondary imaging works on 1-D profiles".into()));
    }
    grid.validate()?;
    require_positive("omega", omega)?;
    let x = ghost.axis();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let kr = omega * lens.lens_radius / (C * lens.object_dist);
    let n = quad.resolve(hi - lo, kr, "ghost-plane integral")?.max(4 * x.len());
    let (xs, ws) = rule_nodes(quad.rule, lo, hi, n);
    let h = ghost.grid.spacing();
    let intensity: Vec<f64> = xs
        .iter()
        .map(|&p| {
            let u = (p - lo) / h;
            let i = (libm::floor(u) as usize).min(x.len() - 2);
            let t = u - i as f64;
            ghost.values[i] * (1.0 - t) + ghost.values[i + 1] * t
        })
        .collect();
    let inv_m = lens.object_dist / lens.image_dist;
    let beta_max = kr * (lo.abs().max(hi.abs()) + grid.max_radius() * inv_m);
    let pupil = Pupil::from_parts(
        lens.object_dist,
        lens.image_dist,
        lens.f,
        lens.lens_radius,
        DEFAULT_LENS_TOLERANCE,
        omega,
        quad,
        PupilMethod::Auto,
        beta_max,
    )?;
    let raw = par::map_indexed(grid.len(), |k| {
        let rho_i = grid.point(k);
        let mut acc = 0.0;
        for q in 0..xs.len() {
            acc += ws[q] * intensity[q] * pupil.eval([xs[q], 0.0], rho_i).norm_sqr();
        }
        acc
    });
    let profile = IntensityProfile::from_raw(grid.clone(), raw, format!("secondary({})", ghost.label));
    let measured = measured_magnification(&ghost.axis(), &ghost.values, &profile.axis(), &profile.values)?;
    Ok(SecondaryImage {
        profile,
        measured_magnification: measured,
        expected_magnification: lens.expected_magnification(),
        lens_residual: pupil.residual,
        defocus_phase: pupil.alpha,
        blurred: pupil.alpha.abs() > 0.5 * PI,
    })
}

/// Lobe-separation ratio, falling back to the ratio of RMS widths when either
/// profile has a single lobe.
pub fn measured_magnification(obj_axis: &[f64], obj: &[f64], img_axis: &[f64], img: &[f64]) -> Result<f64> {
    if let (Some(a), Some(b)) = (
        metrics::lobe_separation(obj_axis, obj, 0.5),
        metrics::lobe_separation(img_axis, img, 0.5),
    ) {
        return Ok(b / a);
    }
    let spread = |x: &[f64], v: &[f64]| {
        let c = metrics::centroid(x, v);
        let m: f64 = v.iter().sum();
        libm::sqrt(x.iter().zip(v).map(|(x, v)| v * (x - c) * (x - c)).sum::<f64>() / m)
    };
    let (a, b) = (spread(obj_axis, obj), spread(img_axis, img));
    if a > 0.0 && b.is_finite() {
        Ok(b / a)
    } else {
        Err(Error::Estimation("profiles too degenerate to measure magnification".into()))
    }
}

/// Mode-sum `G⁽²⁾` evaluated both ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModalG2 {
    /// Half the direct double sum `Σ_{κ,κ'} |g₂(κ)g₁(κ') + g₂(κ')g₁(κ)|²`.
    pub direct: f64,
    /// `Σ|g₁|² Σ|g₂|² + |Σ g₁* g₂|²`.
    pub factored: f64,
    pub product: f64,
    pub interference: f64,
}

/// [`ModalG2`] from per-mode propagator values `g₁(ρ₁, κ)`, `g₂(ρ₂, κ)`.
///
/// The ordered double sum counts every unordered mode pair twice, so the
/// direct form is halved to share the factored form's normalization.
pub fn modal_g2_from_values(g1: &[Complex64], g2: &[Complex64]) -> Result<ModalG2> {
    if g1.len() != g2.len() {
        return Err(Error::invalid("modes", "g1 and g2 tables differ in length"));
    }
    if g1.len() < 2 {
        return Err(Error::Domain(format!("need at least two modes, got {}", g1.len())));
    }
    let mut direct = 0.0;
    for k in 0..g1.len() {
        for q in 0..g1.len() {
            direct += (g2[k] * g1[q] + g2[q] * g1[k]).norm_sqr();
        }
    }
    let s1: f64 = g1.iter().map(|v| v.norm_sqr()).sum();
    let s2: f64 = g2.iter().map(|v| v.norm_sqr()).sum();
    let cross: Complex64 = g1.iter().zip(g2).map(|(a, b)| a.conj() * b).sum();
    let product = s1 * s2;
    let interference = cross.norm_sqr();
    Ok(ModalG2 {
        direct: 0.5 * direct,
        factored: product + interference,
        product,
        interference,
    })
}

/// [`modal_g2_from_values`] with propagators given as functions of
/// `(ρ, κ)`.
pub fn modal_g2(
    rho1: Vec2,
    rho2: Vec2,
    modes: &[Vec2],
    g1: impl Fn(Vec2, Vec2) -> Complex64,
    g2: impl Fn(Vec2, Vec2) -> Complex64,
) -> Result<ModalG2> {
    if modes.is_empty() {
        return Err(Error::Domain("empty mode list".into()));
    }
    let a: Vec<Complex64> = modes.iter().map(|k| g1(rho1, *k)).collect();
    let b: Vec<Complex64> = modes.iter().map(|k| g2(rho2, *k)).collect();
    modal_g2_from_values(&a, &b)
}

/// Describes a scenario's near-field status for reports.
pub fn near_field_note(ratio: f64) -> String {
    if ratio >= 5.0 {
        format!("near field (ratio {ratio:.1})")
    } else {
        format!("weak near-field condition (ratio {ratio:.1})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::omega_from_wavelength;
    use alloc::vec;
    use proptest::prelude::*;

    fn he_ne() -> f64 {
        omega_from_wavelength(632.8e-9).unwrap()
    }

    fn slits() -> ApertureMask {
        ApertureMask::DoubleSlit {
            separation: 1.5e-3,
            width: 0.2e-3,
            length: None,
        }
    }

    #[test]
    fn hbt_spot_values() {
        let lambda = 632.8e-9;
        let src = ThermalSourceSpec::far_field(he_ne(), 1e-4);
        assert_eq!(hbt_farfield(1e-3, -1e-3, &src, lambda, SourceClass::Thermal).unwrap(), 2.0);
        let x = lambda / 1e-4;
        let v = hbt_farfield(0.3 * x, 0.7 * x, &src, lambda, SourceClass::Thermal).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(hbt_farfield(2e-3, 2e-3, &src, lambda, SourceClass::Entangled).unwrap(), 1.0);
        let e = hbt_farfield(x, 0.0, &src, lambda, SourceClass::Entangled).unwrap();
        assert!(e < 1e-30);
    }

    #[test]
    fn g12_quadrature_matches_closed_form() {
        let src = ThermalSourceSpec::near_field(he_ne(), 0.5e-3, 256);
        let q = QuadratureSpec::new(crate::quadrature::Rule::GaussLegendre, crate::quadrature::Points::Auto);
        let mid = QuadratureSpec::default();
        for (a, b) in [(0.0, 0.0), (1e-4, 0.0), (7e-4, 6.5e-4), (-1e-3, 1.2e-3)] {
            let ana = lensless_g12_equal_arms([a, 0.0], [b, 0.0], 0.139, &src, Dim::One).unwrap();
            let num = lensless_g12([a, 0.0], [b, 0.0], 0.139, 0.139, &src, Dim::One, &q).unwrap();
            assert!((num - ana).norm() < 1e-9, "{a} {b}: {num} vs {ana}");
            let num = lensless_g12([a, 0.0], [b, 0.0], 0.139, 0.139, &src, Dim::One, &mid).unwrap();
            assert!((num - ana).norm() < 5e-3, "{a} {b}: {num} vs {ana}");
        }
        let num = lensless_g12([1e-4, -2e-5], [0.0, 3e-5], 0.139, 0.139, &src, Dim::Two, &q).unwrap();
        let ana = lensless_g12_equal_arms([1e-4, -2e-5], [0.0, 3e-5], 0.139, &src, Dim::Two).unwrap();
        assert!((num - ana).norm() < 1e-9);
    }

    #[test]
    fn unequal_arms_degrade_correlation() {
        let src = ThermalSourceSpec::near_field(he_ne(), 0.5e-3, 256);
        let q = QuadratureSpec::default();
        let peak = |d_b: f64| {
            (0..41)
                .map(|i| {
                    let x = -2e-4 + 1e-5 * i as f64;
                    lensless_g12([0.0, 0.0], [x, 0.0], 0.139, d_b, &src, Dim::One, &q).unwrap().norm_sqr()
                })
                .fold(0.0, f64::max)
        };
        assert!((peak(0.139) - 1.0).abs() < 1e-9);
        assert!(peak(0.4) < 0.5, "{}", peak(0.4));
    }

    #[test]
    fn lensless_image_recovers_slits_upright() {
        let src = ThermalSourceSpec::near_field(he_ne(), 0.5e-3, 256);
        let grid = ScanGrid::line(1.5e-3, 121).unwrap();
        let img = lensless_ghost_image(&slits(), 0.139, 0.139, &src, &grid, &QuadratureSpec::default()).unwrap();
        assert!(!img.defocused);
        assert!(img.near_field_ratio > 10.0);
        let p = img.interference_profile();
        let sep = metrics::lobe_separation(&p.axis(), &p.values, 0.5).unwrap();
        assert!((sep - 1.5e-3).abs() <= grid.spacing(), "{sep}");
        assert!(metrics::visibility(&img.map.values) <= 1.0 / 3.0 + 0.01);
        // Off-axis single slit stays where it is.
        let one = ApertureMask::Bars { intervals: vec![(0.4e-3, 0.6e-3)], length: None };
        let p = lensless_ghost_image(&one, 0.139, 0.139, &src, &grid, &QuadratureSpec::default())
            .unwrap()
            .interference_profile();
        let c = metrics::centroid(&p.axis(), &p.values);
        assert!((c - 0.5e-3).abs() <= grid.spacing(), "{c}");
    }

    #[test]
    fn opaque_mask_has_no_interference() {
        let src = ThermalSourceSpec::near_field(he_ne(), 0.5e-3, 256);
        let grid = ScanGrid::line(1e-3, 11).unwrap();
        let dark = ApertureMask::Bars { intervals: vec![], length: None };
        let img = lensless_ghost_image(&dark, 0.139, 0.139, &src, &grid, &QuadratureSpec::default()).unwrap();
        assert!(img.map.interference.unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn secondary_unit_magnification() {
        let grid = ScanGrid::line(2e-3, 201).unwrap();
        let raw = grid.axis().iter().map(|x| if (x.abs() - 0.75e-3).abs() < 0.1e-3 { 1.0 } else { 0.0 }).collect();
        let ghost = IntensityProfile::from_raw(grid.clone(), raw, "ghost");
        let lens = SecondaryLens { f: 0.085, object_dist: 0.17, image_dist: 0.17, lens_radius: 12.7e-3 };
        let out = secondary_image(&ghost, &lens, he_ne(), &grid, &QuadratureSpec::default()).unwrap();
        assert!((out.measured_magnification - 1.0).abs() < 0.01, "{}", out.measured_magnification);
        assert!(!out.blurred);
    }

    #[test]
    fn modal_forms_agree() {
        let g1 = [Complex64::new(0.3, 0.1), Complex64::new(0.3, 0.1)];
        let r = modal_g2_from_values(&g1, &g1).unwrap();
        assert!((r.direct - r.factored).abs() < 1e-15);
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let b = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let r = modal_g2_from_values(&a, &b).unwrap();
        assert_eq!(r.interference, 0.0);
        assert_eq!(r.factored, r.product);
        assert!(modal_g2_from_values(&[], &[]).is_err());
        assert!(modal_g2([0.0; 2], [0.0; 2], &[], |_, _| Complex64::new(1.0, 0.0), |_, _| Complex64::new(1.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn modal_identity_holds_for_random_tables(v in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let g1: Vec<Complex64> = (0..8).map(|k| Complex64::new(v[2 * k], v[2 * k + 1])).collect();
            let g2: Vec<Complex64> = (0..8).map(|k| Complex64::new(v[16 + 2 * k], v[17 + 2 * k])).collect();
            let r = modal_g2_from_values(&g1, &g2).unwrap();
            prop_assert!((r.direct - r.factored).abs() <= 1e-12 * r.factored.max(1e-300));
        }

        #[test]
        fn hbt_ranges(x1 in -5e-3f64..5e-3, x2 in -5e-3f64..5e-3) {
            let src = ThermalSourceSpec::far_field(he_ne(), 2e-4);
            let t = hbt_farfield(x1, x2, &src, 632.8e-9, SourceClass::Thermal).unwrap();
            let e = hbt_farfield(x1, x2, &src, 632.8e-9, SourceClass::Entangled).unwrap();
            prop_assert!((1.0..=2.0).contains(&t));
            prop_assert!((0.0..=1.0).contains(&e));
            prop_assert_eq!(t, hbt_farfield(x2, x1, &src, 632.8e-9, SourceClass::Thermal).unwrap());
        }
    }
}
