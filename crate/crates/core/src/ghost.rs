//! Ghost imaging with entangled photon pairs.
//!
//! Arm 1 runs from the source through a lens (distance `d_1`) to the object at
//! `s_o` behind it, where a bucket detector collects everything transmitted.
//! Arm 2 runs freely over `d_2` to a scanning detector. Unfolding the pair at
//! the source turns the two arms into one classical imaging path with image
//! distance `s_i = d_1 + d_2`, and the biphoton amplitude becomes
//!
//! ```text
//! Ψ(ρ_o, ρ₂) = e^{iω|ρ_o|²/(2cs_o)} P(ρ_o, ρ₂) e^{iω|ρ₂|²/(2cs_i)}
//! ```
//!
//! with `P` the pupil kernel. The coincidence image
//! `R(ρ₂) = ∫ |A(ρ_o)|² |Ψ(ρ_o, ρ₂)|² dρ_o` is inverted and magnified by
//! `m = s_i/s_o`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::classical::{IntensityProfile, LensImager};
use crate::error::{require_finite, require_positive, Result};
use crate::metrics;
use crate::model::{
    norm2, validate_geometry, ApertureMask, ImagingGeometry, ScanGrid, ScenarioKind, Vec2,
    DEFAULT_LENS_TOLERANCE, SPEED_OF_LIGHT as C,
};
use crate::par;
use crate::propagation::{cis, Pupil, PupilMethod, FIRST_J1_ZERO};
use crate::quadrature::{rule_nodes, required_points, QuadratureSpec, Rule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhostGeometry {
    /// Source to lens.
    pub d_1: f64,
    /// Source to scanning detector.
    pub d_2: f64,
    /// Lens to object.
    pub s_o: f64,
    pub f: f64,
    pub lens_radius: f64,
    pub lens_tolerance: f64,
}

impl GhostGeometry {
    pub fn new(d_1: f64, d_2: f64, s_o: f64, f: f64, lens_radius: f64) -> Result<Self> {
        let g = GhostGeometry {
            d_1,
            d_2,
            s_o,
            f,
            lens_radius,
            lens_tolerance: DEFAULT_LENS_TOLERANCE,
        };
        validate_geometry(&g.to_imaging(), ScenarioKind::GhostSpdc)?.into_result()?;
        Ok(g)
    }

    /// Reads the ghost fields of a general geometry.
    pub fn from_imaging(g: &ImagingGeometry) -> Result<Self> {
        use crate::model::Field::*;
        let mut out = Self::new(
            g.require(D1)?,
            g.require(D2)?,
            g.require(SO)?,
            g.require(F)?,
            g.require(LensRadius)?,
        )?;
        out.lens_tolerance = g.lens_tolerance;
        Ok(out)
    }

    /// Unfolded image distance `d_1 + d_2`.
    pub fn image_distance(&self) -> f64 {
        self.d_1 + self.d_2
    }

    pub fn magnification(&self) -> f64 {
        self.image_distance() / self.s_o
    }

    pub fn to_imaging(&self) -> ImagingGeometry {
        ImagingGeometry {
            s_o: Some(self.s_o),
            s_i: Some(self.image_distance()),
            f: Some(self.f),
            lens_radius: Some(self.lens_radius),
            d_1: Some(self.d_1),
            d_2: Some(self.d_2),
            lens_tolerance: self.lens_tolerance,
            ..Default::default()
        }
    }

    pub fn lens_residual(&self) -> f64 {
        crate::model::lens_residual(self.s_o, self.image_distance(), self.f)
    }
}

/// Ψ evaluator sharing one pupil.
struct Biphoton {
    pupil: Pupil,
    a_o: f64,
    a_i: f64,
}

impl Biphoton {
    fn new(g: &GhostGeometry, omega: f64, quad: &QuadratureSpec, method: PupilMethod, beta_max: f64) -> Result<Self> {
        let pupil = Pupil::new(&g.to_imaging(), omega, quad, method, beta_max)?;
        Ok(Biphoton {
            pupil,
            a_o: omega / (2.0 * C * g.s_o),
            a_i: omega / (2.0 * C * g.image_distance()),
        })
    }

    #[inline]
    fn psi(&self, rho_o: Vec2, rho_2: Vec2) -> Complex64 {
        cis(self.a_o * norm2(rho_o) + self.a_i * norm2(rho_2)) * self.pupil.eval(rho_o, rho_2)
    }
}

/// Biphoton amplitude for one object point and one scan position, with unit
/// modulus at `ρ₂ = −m·ρ_o` on focus.
pub fn ghost_wavefunction(
    rho_o: Vec2,
    rho_2: Vec2,
    g: &GhostGeometry,
    omega: f64,
    quad: &QuadratureSpec,
    method: PupilMethod,
) -> Result<Complex64> {
    for v in [rho_o[0], rho_o[1], rho_2[0], rho_2[1]] {
        require_finite("rho", v)?;
    }
    require_positive("omega", omega)?;
    let kr = omega * g.lens_radius / (C * g.s_o);
    let beta = kr * crate::model::norm([rho_o[0] + rho_2[0] / g.magnification(), rho_o[1] + rho_2[1] / g.magnification()]);
    Ok(Biphoton::new(g, omega, quad, method, beta)?.psi(rho_o, rho_2))
}

/// Coincidence counts between the bucket detector behind `mask` and the
/// scanning detector, over `grid`.
pub fn bucket_coincidence_image(
    mask: &ApertureMask,
    g: &GhostGeometry,
    omega: f64,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
) -> Result<IntensityProfile> {
    grid.validate()?;
    let im = LensImager::new(mask, &g.to_imaging(), omega, grid.dim, grid.max_radius(), quad, PupilMethod::Auto)?;
    let bi = Biphoton {
        pupil: im.pupil.clone(),
        a_o: omega / (2.0 * C * g.s_o),
        a_i: omega / (2.0 * C * g.image_distance()),
    };
    let n = &im.nodes;
    let raw = par::map_indexed(grid.len(), |k| {
        let rho_2 = grid.point(k);
        let mut acc = 0.0;
        for j in 0..n.len() {
            let t = n.transmission[j];
            acc += n.weights[j] * t * t * bi.psi(n.points[j], rho_2).norm_sqr();
        }
        acc
    });
    Ok(IntensityProfile::from_raw(grid.clone(), raw, mask.label()))
}

/// Settings for [`epr_correlation_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EprOptions {
    /// Conditioning object point.
    pub rho_o: f64,
    /// Half-width of the object field over which the marginal is taken.
    pub field_half_width: f64,
    /// Samples for each scan.
    pub samples: usize,
    /// Conditional scan half-width in units of the lobe radius.
    pub window_lobes: f64,
}

impl Default for EprOptions {
    fn default() -> Self {
        EprOptions {
            rho_o: 0.0,
            field_half_width: 2e-3,
            samples: 4001,
            window_lobes: 40.0,
        }
    }
}

/// Finite-aperture check of the point-to-point correlation `Δ(ρ₁ − ρ₂) → 0`
/// with both marginals broad.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EprReport {
    /// Main-lobe radius on the scan plane, `m·3.8317·c·s_o/(ωR)`.
    pub lobe_radius: f64,
    /// FWHM of `|Ψ(ρ_o, ρ₂)|²` over ρ₂ at fixed ρ_o.
    pub conditional_fwhm: f64,
    /// FWHM of `∫ |Ψ|² dρ_o` over ρ₂.
    pub marginal_fwhm: f64,
    pub width_ratio: f64,
    /// Fraction of the conditional mass inside the main lobe.
    pub lobe_mass_fraction: f64,
    /// Largest relative deviation of the marginal from its center value over
    /// the central half of the field.
    pub marginal_flatness: f64,
}

impl EprReport {
    pub fn passes(&self) -> bool {
        self.lobe_mass_fraction >= 0.9 && self.marginal_flatness < 0.05
    }
}

/// Line-section diagnostic of the biphoton's position correlation.
pub fn epr_correlation_check(g: &GhostGeometry, omega: f64, opts: &EprOptions) -> Result<EprReport> {
    require_positive("omega", omega)?;
    require_positive("field_half_width", opts.field_half_width)?;
    require_finite("rho_o", opts.rho_o)?;
    if opts.samples < 16 {
        return Err(crate::Error::invalid("samples", "need at least 16"));
    }
    let m = g.magnification();
    let kr = omega * g.lens_radius / (C * g.s_o);
    let lobe = m * FIRST_J1_ZERO / kr;
    let field = opts.field_half_width;
    let scan_half = (opts.window_lobes * lobe).max(1.25 * m * (field + opts.rho_o.abs()));
    let beta_max = kr * (opts.rho_o.abs() + field + scan_half / m) * 1.01;
    let bi = Biphoton::new(g, omega, &QuadratureSpec::default(), PupilMethod::Auto, beta_max)?;

    // Conditional scan around the conjugate point.
    let center = -m * opts.rho_o;
    let half = opts.window_lobes * lobe;
    let n = opts.samples;
    let h = 2.0 * half / (n - 1) as f64;
    let axis: Vec<f64> = (0..n).map(|i| center - half + i as f64 * h).collect();
    let cond: Vec<f64> = axis
        .iter()
        .map(|x| bi.psi([opts.rho_o, 0.0], [*x, 0.0]).norm_sqr())
        .collect();
    let trapz = |v: &[f64], inside: &dyn Fn(f64) -> bool| -> f64 {
        let mut s = 0.0;
        for i in 1..n {
            if inside(axis[i - 1]) && inside(axis[i]) {
                s += 0.5 * h * (v[i - 1] + v[i]);
            }
        }
        s
    };
    let total = trapz(&cond, &|_| true);
    let in_lobe = trapz(&cond, &|x| (x - center).abs() <= lobe);
    let conditional_fwhm = metrics::fwhm(&axis, &cond).unwrap_or(f64::NAN);

    // Marginal over a uniform object field.
    let need = required_points(2.0 * field, kr);
    let (xo, wo) = rule_nodes(Rule::GaussLegendre, -field, field, 4 * need);
    let maxis: Vec<f64> = (0..n).map(|i| -scan_half + 2.0 * scan_half * i as f64 / (n - 1) as f64).collect();
    let marg = par::map_indexed(n, |i| {
        xo.iter()
            .zip(&wo)
            .map(|(x, w)| w * bi.psi([*x, 0.0], [maxis[i], 0.0]).norm_sqr())
            .sum::<f64>()
    });
    let marginal_fwhm = metrics::fwhm(&maxis, &marg).unwrap_or(f64::NAN);
    let mid = marg[n / 2];
    let marginal_flatness = maxis
        .iter()
        .zip(&marg)
        .filter(|(x, _)| x.abs() <= 0.5 * m * field)
        .map(|(_, v)| (v / mid - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(EprReport {
        lobe_radius: lobe,
        conditional_fwhm,
        marginal_fwhm,
        width_ratio: conditional_fwhm / marginal_fwhm,
        lobe_mass_fraction: in_lobe / total,
        marginal_flatness,
    })
}
