use ghostoptics_core::metrics;
use ghostoptics_core::model::omega_from_wavelength;
use ghostoptics_core::thermal::{lensless_g12, lensless_ghost_image, secondary_image, SecondaryLens, ThermalSourceSpec};
use ghostoptics_core::{ApertureMask, Dim, QuadratureSpec, ScanGrid};

const LAMBDA: f64 = 632.8e-9;
const D: f64 = 0.139;

fn slits() -> ApertureMask {
    ApertureMask::DoubleSlit { separation: 1.5e-3, width: 0.2e-3, length: None }
}

#[test]
fn coherence_width_scales_with_wavelength_distance_over_source_size() {
    let w = omega_from_wavelength(LAMBDA).unwrap();
    let q = QuadratureSpec::default();
    for size in [0.5e-3, 1e-3, 2e-3] {
        let src = ThermalSourceSpec::near_field(w, 0.5 * size, 256);
        let scale = LAMBDA * D / size;
        let x: Vec<f64> = (0..801).map(|k| -3.0 * scale + 6.0 * scale * k as f64 / 800.0).collect();
        let v: Vec<f64> = x
            .iter()
            .map(|x| lensless_g12([0.0; 2], [*x, 0.0], D, D, &src, Dim::One, &q).unwrap().norm_sqr())
            .collect();
        let fwhm = metrics::fwhm(&x, &v).unwrap();
        // sinc² half maximum sits at 1.39156 rad.
        let want = 2.0 * 1.391_557_377_981_53 / core::f64::consts::PI * scale;
        assert!((fwhm / want - 1.0).abs() < 0.05, "{size}: {fwhm} vs {want}");
    }
}

#[test]
fn two_dimensional_image_keeps_slit_geometry() {
    let w = omega_from_wavelength(LAMBDA).unwrap();
    let src = ThermalSourceSpec::near_field(w, 0.5e-3, 256);
    let mask = ApertureMask::DoubleSlit { separation: 1.5e-3, width: 0.2e-3, length: Some(1e-3) };
    let grid = ScanGrid::square(1.2e-3, 25).unwrap();
    let img = lensless_ghost_image(&mask, D, D, &src, &grid, &QuadratureSpec::default()).unwrap();
    let p = img.interference_profile();
    let row = p.row();
    let sep = metrics::lobe_separation(&grid.axis(), &row, 0.5).unwrap();
    assert!((sep - 1.5e-3).abs() <= grid.spacing(), "{sep}");
    // Symmetric in y about the slit centre line.
    let n = grid.samples;
    for j in 0..n / 2 {
        for i in 0..n {
            let a = p.values[j * n + i];
            let b = p.values[(n - 1 - j) * n + i];
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn secondary_lens_magnifies_ghost_plane() {
    let w = omega_from_wavelength(LAMBDA).unwrap();
    let src = ThermalSourceSpec::near_field(w, 0.5e-3, 256);
    let q = QuadratureSpec::default();
    let ghost = lensless_ghost_image(&slits(), D, D, &src, &ScanGrid::line(1.5e-3, 301).unwrap(), &q)
        .unwrap()
        .interference_profile();
    let lens = SecondaryLens { f: 0.085, object_dist: 0.253 - D, image_dist: 0.330, lens_radius: 12.7e-3 };
    let out = secondary_image(&ghost, &lens, w, &ScanGrid::line(4.5e-3, 301).unwrap(), &q).unwrap();
    assert!((out.measured_magnification - 2.89).abs() < 0.05, "{}", out.measured_magnification);
    assert!(out.lens_residual.abs() < 0.04 / 0.085);
    assert!(out.blurred);
}
