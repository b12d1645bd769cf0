use core::f64::consts::PI;

use ghostoptics_core::classical::point_image;
use ghostoptics_core::metrics;
use ghostoptics_core::model::{omega_from_wavelength, SPEED_OF_LIGHT as C};
use ghostoptics_core::propagation::{greens_free, greens_free_estimate, propagate_to_grid, Pupil, PupilMethod};
use ghostoptics_core::quadrature::{Points, Rule};
use ghostoptics_core::{ApertureMask, Complex64, Dim, ImagingGeometry, QuadratureSpec, ScanGrid};

fn he_ne() -> f64 {
    omega_from_wavelength(632.8e-9).unwrap()
}

fn slit(a: f64, b: f64) -> ApertureMask {
    ApertureMask::Bars { intervals: vec![(a, b)], length: None }
}

#[test]
fn circular_aperture_on_axis_follows_zone_formula() {
    let w = he_ne();
    let a = 1e-3;
    let disk = ApertureMask::Disk { center: [0.0, 0.0], radius: a };
    let gl = QuadratureSpec::new(Rule::GaussLegendre, Points::Auto);
    let mid = QuadratureSpec::default();
    let (mut lo, mut hi) = (f64::MAX, 0.0f64);
    for k in 0..60 {
        let z = 0.2 + 1.8 * k as f64 / 59.0;
        let want = 4.0 * libm::sin(w * a * a / (4.0 * C * z)).powi(2);
        let got = greens_free([0.0; 2], w, [0.0; 2], z, &disk, Dim::Two, &gl).unwrap().norm_sqr();
        assert!((got - want).abs() < 1e-6, "z {z}: {got} vs {want}");
        let coarse = greens_free([0.0; 2], w, [0.0; 2], z, &disk, Dim::Two, &mid).unwrap().norm_sqr();
        assert!((coarse - want).abs() < 5e-2, "z {z}: {coarse} vs {want}");
        lo = lo.min(got);
        hi = hi.max(got);
    }
    assert!(lo < 0.05 && hi > 3.95, "{lo} {hi}");
}

#[test]
fn single_slit_far_field_is_sinc_squared() {
    let w = he_ne();
    let (a, z) = (0.1e-3, 2.0);
    let first_zero = 2.0 * PI * C * z / (w * a);
    let grid = ScanGrid::line(3.0 * first_zero, 241).unwrap();
    let f = propagate_to_grid([0.0; 2], w, &grid, z, &slit(-0.5 * a, 0.5 * a), &QuadratureSpec::default()).unwrap();
    let i = f.intensity();
    let peak = i.iter().cloned().fold(0.0, f64::max);
    let got: Vec<f64> = i.iter().map(|v| v / peak).collect();
    let want: Vec<f64> = grid
        .axis()
        .iter()
        .map(|x| {
            let u = w * a * x / (2.0 * C * z);
            if u == 0.0 { 1.0 } else { (libm::sin(u) / u).powi(2) }
        })
        .collect();
    assert!(metrics::rms_difference(&got, &want) < 0.02);
}

#[test]
fn wide_aperture_is_translation_invariant() {
    let w = he_ne();
    let wide = slit(-0.2, 0.2);
    let q = QuadratureSpec::new(Rule::GaussLegendre, Points::Auto);
    let mods: Vec<f64> = (0..21)
        .map(|k| {
            let x = -1e-3 + 1e-4 * k as f64;
            greens_free([0.0; 2], w, [x, 0.0], 0.1, &wide, Dim::One, &q).unwrap().norm()
        })
        .collect();
    let lo = mods.iter().cloned().fold(f64::MAX, f64::min);
    let hi = mods.iter().cloned().fold(0.0, f64::max);
    assert!((hi - lo) / hi < 1e-3, "{lo} {hi}");
    assert!((hi - 1.0).abs() < 1e-2);
}

#[test]
fn disjoint_masks_add_linearly() {
    let w = he_ne();
    let q = QuadratureSpec::fixed(Rule::Midpoint, 200);
    let a = slit(-0.6e-3, -0.2e-3);
    let b = slit(0.1e-3, 0.5e-3);
    let both = ApertureMask::Composite(vec![a.clone(), b.clone()]);
    for x in [0.0, 2e-4, -7e-4] {
        let kappa = [3e3, 0.0];
        let ga = greens_free(kappa, w, [x, 0.0], 0.05, &a, Dim::One, &q).unwrap();
        let gb = greens_free(kappa, w, [x, 0.0], 0.05, &b, Dim::One, &q).unwrap();
        let gab = greens_free(kappa, w, [x, 0.0], 0.05, &both, Dim::One, &q).unwrap();
        assert!((gab - ga - gb).norm() < 1e-12 * gab.norm().max(1.0));
    }
}

#[test]
fn far_field_modulus_decays_as_one_over_z() {
    let w = he_ne();
    let disk = ApertureMask::Disk { center: [0.0, 0.0], radius: 20e-6 };
    let q = QuadratureSpec::default();
    let base = greens_free([0.0; 2], w, [0.0; 2], 1.0, &disk, Dim::Two, &q).unwrap().norm();
    for z in [2.0, 4.0, 8.0] {
        let g = greens_free([0.0; 2], w, [0.0; 2], z, &disk, Dim::Two, &q).unwrap().norm();
        assert!((g * z / base - 1.0).abs() < 1e-3);
    }
}

#[test]
fn doubling_points_stays_within_error_estimate() {
    let w = he_ne();
    let m = slit(-0.3e-3, 0.4e-3);
    for n in [64, 128, 256] {
        let coarse = greens_free_estimate([0.0; 2], w, [1e-4, 0.0], 0.05, &m, Dim::One, &QuadratureSpec::fixed(Rule::Midpoint, n)).unwrap();
        let fine = greens_free([0.0; 2], w, [1e-4, 0.0], 0.05, &m, Dim::One, &QuadratureSpec::fixed(Rule::Midpoint, 2 * n)).unwrap();
        assert!((fine - coarse.value).norm() < coarse.error_estimate, "n {n}");
    }
}

#[test]
fn undersampled_free_propagation_reports_requirement() {
    let err = greens_free([0.0; 2], he_ne(), [0.0; 2], 0.05, &slit(-5e-3, 5e-3), Dim::One, &QuadratureSpec::fixed(Rule::Midpoint, 8))
        .unwrap_err();
    match err {
        ghostoptics_core::Error::UnderSampled { requested, required, .. } => assert!(required > requested),
        e => panic!("{e:?}"),
    }
}

#[test]
fn psf_first_zero_scales_inversely_with_radius() {
    let w = omega_from_wavelength(702.2e-9).unwrap();
    let q = QuadratureSpec::default();
    let mut widths = Vec::new();
    for r in [2e-3, 4e-3, 8e-3, 16e-3] {
        let g = ImagingGeometry::lens(0.6, 1.2, 0.4, r);
        let zero = Pupil::new(&g, w, &q, PupilMethod::Auto, 0.0).unwrap().first_zero_object() * 2.0;
        let grid = ScanGrid::line(2.0 * zero, 801).unwrap();
        let p = point_image([0.0; 2], &g, w, &grid, &q).unwrap();
        let x = metrics::first_minimum(&p.axis(), &p.values).unwrap();
        assert!((x / zero - 1.0).abs() < 1e-2, "{x} {zero}");
        widths.push(x * r);
    }
    for v in &widths {
        assert!((v / widths[0] - 1.0).abs() < 1e-2);
    }
}

#[test]
fn closed_and_quadrature_pupils_agree_relative_to_peak() {
    let w = omega_from_wavelength(702.2e-9).unwrap();
    let g = ImagingGeometry::lens(0.6, 1.2, 0.4, 12.7e-3);
    let q = QuadratureSpec::new(Rule::GaussLegendre, Points::Auto);
    let closed = Pupil::new(&g, w, &q, PupilMethod::ClosedForm, 0.0).unwrap();
    let z = closed.first_zero_object();
    for k in 0..64 {
        let rho_o = [3.0 * z * k as f64 / 63.0, 0.0];
        let rho_i = [0.5 * z, -0.25 * z];
        let a = closed.eval(rho_o, rho_i);
        let b = ghostoptics_core::propagation::lens_pupil_integral(rho_o, rho_i, &g, w, &q, PupilMethod::Quadrature).unwrap();
        assert!((a - b).norm() < 1e-3 * Complex64::new(1.0, 0.0).norm());
    }
}
