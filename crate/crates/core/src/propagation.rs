//! Fresnel Green's functions and the thin-lens pupil integral.
//!
//! Free propagation over distance `z` from an aperture `A` is
//!
//! ```text
//! g(ρ) = (−iω/2πc) (e^{iωz/c}/z) ∫ dρ₀ A(ρ₀) e^{iκ·ρ₀} e^{iω|ρ−ρ₀|²/(2cz)}
//! ```
//!
//! evaluated by direct quadrature. In one dimension the prefactor becomes
//! `√(ω/2πcz)·e^{−iπ/4}` so that an unobstructed plane wave keeps unit
//! amplitude in both cases.
//!
//! Through a thin lens of radius `R` the object-to-image kernel reduces to
//! the normalized radial pupil integral
//!
//! ```text
//! P(β, α) = 2 ∫₀¹ t J₀(βt) e^{iαt²} dt,   β = (ωR/c s_o)|ρ_o + ρ_i/m|,
//! α = (ω/2c)(1/s_o + 1/s_i − 1/f) R²
//! ```
//!
//! which is `somb(β)` on the focal plane. Off focus it is tabulated in β
//! (see [`Pupil`]).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::model::{norm, norm2, ApertureMask, Dim, Field, ImagingGeometry, ScanGrid, Vec2};
use crate::model::SPEED_OF_LIGHT as C;
use crate::par;
use crate::quadrature::{
    rule_nodes, NodePlan, Nodes, PhaseRate, Points, QuadEstimate, QuadratureSpec, Rule,
};
use crate::specfun;

#[inline]
pub(crate) fn cis(phase: f64) -> Complex64 {
    let (s, c) = libm::sincos(phase);
    Complex64::new(c, s)
}

/// `exp(iω|ρ−ρ₀|²/(2cz))`.
pub fn fresnel_phase(rho: Vec2, rho0: Vec2, z: f64, omega: f64) -> Result<Complex64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(alloc::format!("propagation distance must be > 0, got {z}")));
    }
    require_finite("omega", omega)?;
    let d = [rho[0] - rho0[0], rho[1] - rho0[1]];
    Ok(cis(omega * norm2(d) / (2.0 * C * z)))
}

/// Free-space prefactor multiplying the aperture integral.
pub fn free_prefactor(omega: f64, z: f64, dim: Dim) -> Complex64 {
    let carrier = cis(omega * z / C);
    match dim {
        Dim::Two => Complex64::new(0.0, -omega / (2.0 * PI * C * z)) * carrier,
        Dim::One => libm::sqrt(omega / (2.0 * PI * C * z)) * cis(-0.25 * PI) * carrier,
    }
}

/// Phase-rate bound for the free-propagation integrand at targets within
/// `target_radius` of the axis.
fn free_rate(kappa: Vec2, omega: f64, z: f64, target_radius: f64) -> PhaseRate {
    let k = omega / (C * z);
    PhaseRate {
        constant: norm(kappa) + k * target_radius,
        per_radius: k,
    }
}

fn check_free(omega: f64, z: f64, kappa: Vec2) -> Result<()> {
    require_positive("omega", omega)?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(alloc::format!("propagation distance must be > 0, got {z}")));
    }
    require_finite("kappa", kappa[0])?;
    require_finite("kappa", kappa[1])?;
    Ok(())
}

fn free_sum(nodes: &Nodes, kappa: Vec2, omega: f64, target: Vec2, z: f64) -> Complex64 {
    let a = omega / (2.0 * C * z);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((p, w), t) in nodes.points.iter().zip(&nodes.weights).zip(&nodes.transmission) {
        let d = [target[0] - p[0], target[1] - p[1]];
        let phase = kappa[0] * p[0] + kappa[1] * p[1] + a * norm2(d);
        acc += (w * t) * cis(phase);
    }
    acc
}

/// Field at `target` produced by a plane wave of transverse wavevector `kappa`
/// illuminating `mask`, propagated over `z`.
pub fn greens_free(
    kappa: Vec2,
    omega: f64,
    target: Vec2,
    z: f64,
    mask: &ApertureMask,
    dim: Dim,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    greens_free_estimate(kappa, omega, target, z, mask, dim, quad).map(|e| e.value)
}

/// [`greens_free`] with a Richardson error estimate from a half-resolution
/// evaluation.
pub fn greens_free_estimate(
    kappa: Vec2,
    omega: f64,
    target: Vec2,
    z: f64,
    mask: &ApertureMask,
    dim: Dim,
    quad: &QuadratureSpec,
) -> Result<QuadEstimate<Complex64>> {
    check_free(omega, z, kappa)?;
    require_finite("target", target[0])?;
    require_finite("target", target[1])?;
    let rate = free_rate(kappa, omega, z, norm(target));
    let plan = NodePlan::new(mask, dim, quad, rate, "free propagation")?;
    let pre = free_prefactor(omega, z, dim);
    let fine = pre * free_sum(&plan.nodes(), kappa, omega, target, z);
    let coarse = pre * free_sum(&plan.halved().nodes(), kappa, omega, target, z);
    Ok(QuadEstimate {
        value: fine,
        error_estimate: (fine - coarse).norm(),
    })
}

/// Complex field sampled on a scan grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMap {
    pub grid: ScanGrid,
    pub values: Vec<Complex64>,
    pub plane_z: f64,
    pub omega: f64,
}

impl FieldMap {
    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// [`greens_free`] over every point of `grid`, sharing one quadrature plan.
pub fn propagate_to_grid(
    kappa: Vec2,
    omega: f64,
    grid: &ScanGrid,
    z: f64,
    mask: &ApertureMask,
    quad: &QuadratureSpec,
) -> Result<FieldMap> {
    check_free(omega, z, kappa)?;
    grid.validate()?;
    let rate = free_rate(kappa, omega, z, grid.max_radius());
    let nodes = NodePlan::new(mask, grid.dim, quad, rate, "free propagation")?.nodes();
    let pre = free_prefactor(omega, z, grid.dim);
    let values = par::map_indexed(grid.len(), |k| {
        pre * free_sum(&nodes, kappa, omega, grid.point(k), z)
    });
    Ok(FieldMap {
        grid: grid.clone(),
        values,
        plane_z: z,
        omega,
    })
}

/// How the pupil integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PupilMethod {
    /// `somb` on focus; quadrature (tabulated in β) off focus.
    #[default]
    Auto,
    /// Closed form only; off-focus geometries are rejected.
    ClosedForm,
    /// Direct quadrature even on focus.
    Quadrature,
}

/// Minimum point count for the radial pupil integral.
fn pupil_required(beta: f64, alpha: f64) -> usize {
    crate::quadrature::required_points(1.0, beta.abs() + 2.0 * alpha.abs())
}

/// `2∫₀¹ t J₀(βt) e^{iαt²} dt` with `n` points of `rule`.
pub fn pupil_quadrature(beta: f64, alpha: f64, rule: Rule, n: usize) -> Complex64 {
    let (t, w) = rule_nodes(rule, 0.0, 1.0, n);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, w) in t.iter().zip(&w) {
        acc += (2.0 * w * t * specfun::j0(beta * t)) * cis(alpha * t * t);
    }
    acc
}

/// Default adaptive evaluation: one Gauss-Legendre panel per π of phase plus
/// one.
fn pupil_auto(beta: f64, alpha: f64) -> Complex64 {
    let panels = libm::ceil((beta.abs() + 2.0 * alpha.abs()) / PI) as usize + 1;
    pupil_quadrature(beta, alpha, Rule::GaussLegendre, 8 * panels)
}

/// Cubic (Catmull-Rom) table of `P(β, α)` for fixed α.
#[derive(Clone, Debug, PartialEq)]
struct PupilTable {
    h: f64,
    alpha: f64,
    values: Vec<Complex64>,
}

const TABLE_STEP: f64 = PI / 32.0;

impl PupilTable {
    fn new(alpha: f64, beta_max: f64) -> Self {
        let h = TABLE_STEP;
        let n = libm::ceil(beta_max / h) as usize + 3;
        let values = par::map_indexed(n, |k| pupil_auto(k as f64 * h, alpha));
        PupilTable { h, alpha, values }
    }

    fn eval(&self, beta: f64) -> Complex64 {
        let b = beta.abs();
        let u = b / self.h;
        let k = libm::floor(u) as usize;
        if k + 2 >= self.values.len() {
            return pupil_auto(b, self.alpha);
        }
        let t = u - k as f64;
        // P is even in β, so the sample left of the origin mirrors index 1.
        let p0 = if k == 0 { self.values[1] } else { self.values[k - 1] };
        let (p1, p2, p3) = (self.values[k], self.values[k + 1], self.values[k + 2]);
        let t2 = t * t;
        let t3 = t2 * t;
        (p1 * 2.0
            + (p2 - p0) * t
            + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2
            + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * t3)
            * 0.5
    }
}

#[derive(Clone, Debug, PartialEq)]
enum PupilEval {
    Closed,
    Table(PupilTable),
    Direct { rule: Rule, n: usize },
}

/// The pupil kernel of one lens geometry, prepared for repeated evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Pupil {
    /// `ωR/(c s_o)`, rad/m.
    pub kappa_r: f64,
    /// `1/m = s_o/s_i`.
    pub inv_m: f64,
    /// Residual quadratic pupil phase at the rim, rad.
    pub alpha: f64,
    /// Thin-lens residual, m⁻¹.
    pub residual: f64,
    eval: PupilEval,
}

impl Pupil {
    /// Prepares the pupil for `g` at `omega`; `beta_max` bounds the arguments
    /// that will be requested (only used to size the off-focus table).
    pub fn new(
        g: &ImagingGeometry,
        omega: f64,
        quad: &QuadratureSpec,
        method: PupilMethod,
        beta_max: f64,
    ) -> Result<Self> {
        require_positive("omega", omega)?;
        let s_o = require_positive("s_o", g.require(Field::SO)?)?;
        let s_i = require_positive("s_i", g.image_distance().ok_or(Error::MissingField("s_i"))?)?;
        let f = require_positive("f", g.require(Field::F)?)?;
        let r = require_positive("lens_radius", g.require(Field::LensRadius)?)?;
        Self::from_parts(s_o, s_i, f, r, g.lens_tolerance, omega, quad, method, beta_max)
    }

    pub(crate) fn from_parts(
        s_o: f64,
        s_i: f64,
        f: f64,
        r: f64,
        tolerance: f64,
        omega: f64,
        quad: &QuadratureSpec,
        method: PupilMethod,
        beta_max: f64,
    ) -> Result<Self> {
        let residual = crate::model::lens_residual(s_o, s_i, f);
        let focused = residual.abs() <= tolerance;
        let alpha = if focused { 0.0 } else { omega / (2.0 * C) * residual * r * r };
        let kappa_r = omega * r / (C * s_o);
        let direct = |alpha: f64| -> Result<PupilEval> {
            match quad.points {
                Points::Auto => Ok(PupilEval::Table(PupilTable::new(alpha, beta_max))),
                Points::Fixed(n) => {
                    quad.validate()?;
                    let required = pupil_required(beta_max, alpha);
                    if n < required {
                        return Err(Error::UnderSampled {
                            context: "pupil integral",
                            requested: n,
                            required,
                        });
                    }
                    Ok(PupilEval::Direct { rule: quad.rule, n })
                }
            }
        };
        let eval = match method {
            PupilMethod::Auto if focused => PupilEval::Closed,
            PupilMethod::Auto => direct(alpha)?,
            PupilMethod::ClosedForm if focused => PupilEval::Closed,
            PupilMethod::ClosedForm => {
                return Err(Error::Domain(alloc::format!(
                    "no closed-form pupil off focus (thin-lens residual {residual:e} m^-1)"
                )))
            }
            PupilMethod::Quadrature => direct(alpha)?,
        };
        Ok(Pupil {
            kappa_r,
            inv_m: s_o / s_i,
            alpha,
            residual,
            eval,
        })
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.eval, PupilEval::Closed)
    }

    /// `β = κR|ρ_o + ρ_i/m|`.
    #[inline]
    pub fn beta(&self, rho_o: Vec2, rho_i: Vec2) -> f64 {
        self.kappa_r * norm([rho_o[0] + rho_i[0] * self.inv_m, rho_o[1] + rho_i[1] * self.inv_m])
    }

    #[inline]
    pub fn eval_beta(&self, beta: f64) -> Complex64 {
        match &self.eval {
            PupilEval::Closed => Complex64::new(specfun::somb_unchecked(beta), 0.0),
            PupilEval::Table(t) => t.eval(beta),
            PupilEval::Direct { rule, n } => pupil_quadrature(beta, self.alpha, *rule, *n),
        }
    }

    #[inline]
    pub fn eval(&self, rho_o: Vec2, rho_i: Vec2) -> Complex64 {
        self.eval_beta(self.beta(rho_o, rho_i))
    }

    /// Object-plane radius of the first zero of the focused kernel.
    pub fn first_zero_object(&self) -> f64 {
        FIRST_J1_ZERO / self.kappa_r
    }
}

/// First positive zero of J₁.
pub const FIRST_J1_ZERO: f64 = 3.831_705_970_207_512;

/// Pupil integral for one object/image point pair, normalized to 1 at
/// `ρ_i = −m·ρ_o`.
pub fn lens_pupil_integral(
    rho_o: Vec2,
    rho_i: Vec2,
    g: &ImagingGeometry,
    omega: f64,
    quad: &QuadratureSpec,
    method: PupilMethod,
) -> Result<Complex64> {
    for v in [rho_o[0], rho_o[1], rho_i[0], rho_i[1]] {
        require_finite("rho", v)?;
    }
    require_positive("omega", omega)?;
    let s_o = require_positive("s_o", g.require(Field::SO)?)?;
    let s_i = require_positive("s_i", g.image_distance().ok_or(Error::MissingField("s_i"))?)?;
    let f = require_positive("f", g.require(Field::F)?)?;
    let r = require_positive("lens_radius", g.require(Field::LensRadius)?)?;
    let residual = crate::model::lens_residual(s_o, s_i, f);
    let focused = residual.abs() <= g.lens_tolerance;
    let inv_m = s_o / s_i;
    let beta = omega * r / (C * s_o)
        * norm([rho_o[0] + rho_i[0] * inv_m, rho_o[1] + rho_i[1] * inv_m]);
    let alpha = if focused { 0.0 } else { omega / (2.0 * C) * residual * r * r };
    match method {
        PupilMethod::Auto | PupilMethod::ClosedForm if focused => {
            return Ok(Complex64::new(specfun::somb_unchecked(beta), 0.0))
        }
        PupilMethod::ClosedForm => {
            return Err(Error::Domain(alloc::format!(
                "no closed-form pupil off focus (thin-lens residual {residual:e} m^-1)"
            )))
        }
        _ => {}
    }
    match quad.points {
        Points::Auto => Ok(pupil_auto(beta, alpha)),
        Points::Fixed(n) => {
            quad.validate()?;
            let required = pupil_required(beta, alpha);
            if n < required {
                return Err(Error::UnderSampled {
                    context: "pupil integral",
                    requested: n,
                    required,
                });
            }
            Ok(pupil_quadrature(beta, alpha, quad.rule, n))
        }
    }
}
