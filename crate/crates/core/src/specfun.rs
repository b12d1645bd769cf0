//! Special functions behind every point-spread function in the crate.
//!
//! J₁ (and the J₀ used by the defocused pupil integral) are evaluated
//! piecewise: the ascending power series below [`SERIES_CUTOFF`] and the
//! Hankel asymptotic expansion above it. The cutoff sits at 12 rather than
//! the customary 8 because the asymptotic series cannot reach 1e-10 absolute
//! accuracy until its smallest term (about `e^{-2x}`) is that small.

use crate::error::{Error, Result};
use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// Below this |x| the power series is used; above it the asymptotic expansion.
pub const SERIES_CUTOFF: f64 = 12.0;

/// Default regularization floor for [`twophoton_kernel`].
pub const DEFAULT_KERNEL_FLOOR: f64 = 1e-6;

/// Finite, dimensionless special-function argument.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Radian1D(f64);

impl Radian1D {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(Radian1D(x))
        } else {
            Err(Error::Domain(alloc::format!(
                "special-function argument must be finite, got {x}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Radian1D {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        Radian1D::new(x)
    }
}

/// Tunables for the singular two-photon kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    /// |x| below this is evaluated at the floor instead.
    pub floor: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            floor: DEFAULT_KERNEL_FLOOR,
        }
    }
}

/// Kernel value plus whether the regularization floor was hit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub clamped: bool,
}

/// First-order Bessel function of the first kind.
pub fn bessel_j1(x: f64) -> Result<f64> {
    Radian1D::new(x).map(|x| j1(x.get()))
}

/// `somb(x) = 2 J₁(x) / x`, equal to 1 at the origin.
pub fn somb(x: f64) -> Result<f64> {
    Radian1D::new(x).map(|x| somb_unchecked(x.get()))
}

/// `sin(u) / u`, equal to 1 at the origin.
pub fn sinc(u: f64) -> Result<f64> {
    Radian1D::new(u).map(|u| sinc_unchecked(u.get()))
}

/// `2 J₁(x) / x²`, the image-plane kernel of the entangled biphoton.
///
/// The kernel diverges like `1/x` at the origin. Arguments closer to zero than
/// `config.floor` are evaluated at the floor (keeping the sign of `x`) and the
/// result is marked as clamped.
pub fn twophoton_kernel(x: f64, config: &KernelConfig) -> Result<KernelValue> {
    let x = Radian1D::new(x)?.get();
    if !(config.floor > 0.0) {
        return Err(Error::invalid("kernel floor", "must be > 0"));
    }
    Ok(kernel_unchecked(x, config.floor))
}

#[inline]
pub(crate) fn somb_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        2.0 * j1(x) / x
    }
}

#[inline]
pub(crate) fn sinc_unchecked(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        libm::sin(u) / u
    }
}

#[inline]
pub(crate) fn kernel_unchecked(x: f64, floor: f64) -> KernelValue {
    let (arg, clamped) = if x.abs() < floor {
        (if x < 0.0 { -floor } else { floor }, true)
    } else {
        (x, false)
    };
    KernelValue {
        value: 2.0 * j1(arg) / (arg * arg),
        clamped,
    }
}

/// J₁ without argument validation.
pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_CUTOFF {
        j1_series(ax)
    } else {
        let (p, q) = hankel_pq(1.0, ax);
        let (s, c) = libm::sincos(ax);
        // chi = x - 3π/4
        let cos_chi = (s - c) * FRAC_1_SQRT_2;
        let sin_chi = -(s + c) * FRAC_1_SQRT_2;
        libm::sqrt(2.0 / (PI * ax)) * (p * cos_chi - q * sin_chi)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// J₀ without argument validation; only the defocused pupil integral uses it.
pub(crate) fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_CUTOFF {
        j0_series(ax)
    } else {
        let (p, q) = hankel_pq(0.0, ax);
        let (s, c) = libm::sincos(ax);
        // chi = x - π/4
        let cos_chi = (c + s) * FRAC_1_SQRT_2;
        let sin_chi = (s - c) * FRAC_1_SQRT_2;
        libm::sqrt(2.0 / (PI * ax)) * (p * cos_chi - q * sin_chi)
    }
}

fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = h;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -h2 / (k * (k + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || k > 80.0 {
            break;
        }
    }
    sum
}

fn j0_series(x: f64) -> f64 {
    let h2 = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -h2 / (k * k);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || k > 80.0 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic factors P(ν, x), Q(ν, x), summed until the terms stop
/// decreasing.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k)
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * eight_x);
        let mag = a.abs();
        if mag >= last || mag < 1e-18 {
            break;
        }
        last = mag;
        // even k feed P with sign (-1)^{k/2}; odd k feed Q with sign (-1)^{(k-1)/2}
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
    }
    (p, q)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values from a 40-digit arbitrary-precision evaluation.
    const J1_REF: &[(f64, f64)] = &[
        (0.5, 0.24226845767487388638),
        (1.0, 0.44005058574493351596),
        (2.0, 0.5767248077568733872),
        (3.0, 0.33905895852593645893),
        (5.0, -0.32757913759146522204),
        (7.9, 0.21917939992175120327),
        (8.0, 0.23463634685391462438),
        (8.1, 0.24760776698159287663),
        (10.0, 0.04347274616886143667),
        (11.9, -0.22898324966192405505),
        (12.0, -0.22344710449062761237),
        (12.1, -0.21574897337692480827),
        (15.0, 0.20510403861352276115),
        (20.0, 0.066833124175850045579),
        (25.0, -0.12535024958028990465),
        (33.3, 0.12386214790148009055),
        (40.0, 0.12603831803758499921),
        (49.9, -0.1027969573688854436),
        (50.0, -0.097511828125175137661),
    ];

    const J0_REF: &[(f64, f64)] = &[
        (0.5, 0.93846980724081290423),
        (2.0, 0.22389077914123566805),
        (8.0, 0.17165080713755390609),
        (11.9, 0.02504944169958964508),
        (12.0, 0.047689310796833536624),
        (12.1, 0.069666773606807311849),
        (20.0, 0.16702466434058315473),
        (40.0, 0.0073668905842372895535),
        (50.0, 0.055812327669251815005),
    ];

    #[test]
    fn j1_matches_high_precision_reference_to_1e10() {
        for &(x, want) in J1_REF {
            let got = bessel_j1(x).unwrap();
            assert!((got - want).abs() < 1e-10, "J1({x}) = {got}, want {want}");
            assert!((bessel_j1(-x).unwrap() + want).abs() < 1e-10);
        }
    }

    #[test]
    fn j0_matches_high_precision_reference() {
        for &(x, want) in J0_REF {
            let got = j0(x);
            assert!((got - want).abs() < 1e-10, "J0({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j1(1.0).unwrap() - 0.4400505857).abs() < 1e-10);
        assert!(bessel_j1(3.8317059702).unwrap().abs() < 1e-8);
        assert_eq!(somb(0.0).unwrap(), 1.0);
        assert!(somb(3.8317059702).unwrap().abs() < 1e-8);
        assert_eq!(somb(1.7).unwrap(), somb(-1.7).unwrap());
        assert_eq!(sinc(0.0).unwrap(), 1.0);
        assert!(sinc(PI).unwrap().abs() < 1e-15);
        assert!((sinc(PI / 2.0).unwrap() - core::f64::consts::FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn kernel_values_and_clamp() {
        let cfg = KernelConfig::default();
        let k = twophoton_kernel(2.0, &cfg).unwrap();
        assert!((k.value - 0.2883624038784367).abs() < 1e-12);
        assert!(!k.clamped);
        assert!(twophoton_kernel(3.8317059702, &cfg).unwrap().value.abs() < 1e-8);
        let tiny = twophoton_kernel(1e-9, &cfg).unwrap();
        assert!(tiny.clamped);
        assert!((tiny.value - 1.0 / cfg.floor).abs() / (1.0 / cfg.floor) < 1e-9);
        let zero = twophoton_kernel(0.0, &cfg).unwrap();
        assert!(zero.clamped && zero.value > 0.0);
    }

    #[test]
    fn non_finite_arguments_are_rejected() {
        for f in [bessel_j1, somb, sinc] {
            assert!(matches!(f(f64::NAN), Err(Error::Domain(_))));
            assert!(matches!(f(f64::INFINITY), Err(Error::Domain(_))));
        }
        assert!(twophoton_kernel(f64::NAN, &KernelConfig::default()).is_err());
        assert!(Radian1D::try_from(f64::NEG_INFINITY).is_err());
    }

    /// Bessel's integral `J_n(x) = (1/π)∫₀^π cos(nτ − x sin τ) dτ`, evaluated
    /// with the trapezoid rule, which converges spectrally for this integrand.
    fn bessel_integral(n: f64, x: f64) -> f64 {
        let m = 2000;
        let h = PI / m as f64;
        let mut s = 0.5 * (libm::cos(0.0) + libm::cos(n * PI));
        for k in 1..m {
            let t = k as f64 * h;
            s += libm::cos(n * t - x * libm::sin(t));
        }
        s * h / PI
    }

    /// Direct power series `Σ (−1)ᵏ (x/2)^{2k+1} / (k!(k+1)!)`, summed to
    /// convergence with no range split.
    fn j1_power_series(x: f64) -> f64 {
        let h = 0.5 * x;
        let mut term = h;
        let mut sum = term;
        for k in 1..200 {
            term *= -h * h / (k as f64 * (k + 1) as f64);
            sum += term;
            if term.abs() < 1e-30 {
                break;
            }
        }
        sum
    }

    proptest::proptest! {
        #[test]
        fn j1_agrees_with_power_series(x in -20.0f64..20.0) {
            proptest::prop_assert!((bessel_j1(x).unwrap() - j1_power_series(x)).abs() < 1e-8);
        }

        #[test]
        fn somb_is_twice_j1_over_x(x in 1e-3f64..100.0) {
            let lhs = somb(x).unwrap() * x;
            proptest::prop_assert!((lhs - 2.0 * bessel_j1(x).unwrap()).abs() < 1e-13);
        }

        #[test]
        fn kernel_times_x_is_somb(x in 0.05f64..100.0) {
            let k = twophoton_kernel(x, &KernelConfig::default()).unwrap();
            proptest::prop_assert!(!k.clamped);
            proptest::prop_assert!((k.value * x - somb(x).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn j1_agrees_with_bessel_integral(x in -50.0f64..50.0) {
            let got = bessel_j1(x).unwrap();
            proptest::prop_assert!((got - bessel_integral(1.0, x)).abs() < 1e-10);
        }

        #[test]
        fn j0_agrees_with_bessel_integral(x in 0.0f64..50.0) {
            proptest::prop_assert!((j0(x) - bessel_integral(0.0, x)).abs() < 1e-10);
        }

        #[test]
        fn somb_bounded_and_even(x in -200.0f64..200.0) {
            let s = somb(x).unwrap();
            proptest::prop_assert!(s.abs() <= 1.0 + 1e-12);
            proptest::prop_assert_eq!(s, somb(-x).unwrap());
        }
    }
}
