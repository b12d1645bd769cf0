use ghostoptics_core::metrics;
use ghostoptics_core::model::{omega_from_wavelength, SPEED_OF_LIGHT as C};
use ghostoptics_core::quadrature::{NodePlan, PhaseRate};
use ghostoptics_core::speckle::{mc_ghost_image, sub_source_positions, McOptions, Probe, SpeckleEnsemble};
use ghostoptics_core::thermal::{lensless_ghost_image, ThermalSourceSpec};
use ghostoptics_core::{ApertureMask, Complex64, Dim, QuadratureSpec, ScanGrid};

const D: f64 = 0.139;

fn source() -> ThermalSourceSpec {
    ThermalSourceSpec::near_field(omega_from_wavelength(632.8e-9).unwrap(), 0.5e-3, 256)
}

fn slits() -> ApertureMask {
    ApertureMask::DoubleSlit { separation: 1.5e-3, width: 0.2e-3, length: None }
}

/// Exact expectation of the sample covariance for the discrete source:
/// `Σ_k w_k t_k² (|g_N(x_k, y)|² − 1/N)` with `g_N` the sub-source average.
fn finite_source_expectation(mask: &ApertureMask, src: &ThermalSourceSpec, grid: &ScanGrid) -> Vec<f64> {
    let w = src.half_width.unwrap();
    let rate = PhaseRate { constant: 2.0 * src.omega * w / (C * D), per_radius: 0.0 };
    let nodes = NodePlan::new(mask, Dim::One, &QuadratureSpec::default(), rate, "oracle").unwrap().nodes();
    let s = sub_source_positions(src).unwrap();
    let n = s.len() as f64;
    let a = src.omega / (2.0 * C * D);
    grid.axis()
        .iter()
        .map(|y| {
            (0..nodes.len())
                .map(|k| {
                    let x = nodes.points[k][0];
                    let g: Complex64 = s
                        .iter()
                        .map(|s| Complex64::from_polar(1.0, a * ((y - s).powi(2) - (x - s).powi(2))))
                        .sum::<Complex64>()
                        / n;
                    nodes.weights[k] * nodes.transmission[k].powi(2) * (g.norm_sqr() - 1.0 / n)
                })
                .sum()
        })
        .collect()
}

#[test]
fn error_shrinks_as_inverse_square_root_of_realizations() {
    let src = source();
    let grid = ScanGrid::line(1.5e-3, 31).unwrap();
    let q = QuadratureSpec::default();
    let exact = finite_source_expectation(&slits(), &src, &grid);
    let mse = |n: usize| {
        (0..6)
            .map(|seed| {
                let img = mc_ghost_image(&slits(), D, D, &src, &grid, &q, &McOptions::new(n, 100 + seed)).unwrap();
                metrics::rms_difference(&img.covariance, &exact).powi(2)
            })
            .sum::<f64>()
            / 6.0
    };
    let ratio = (mse(1000) / mse(4000)).sqrt();
    assert!((ratio - 2.0).abs() < 0.6, "{ratio}");
}

#[test]
fn mc_image_matches_analytic_lensless_image() {
    let src = source();
    let grid = ScanGrid::line(1.5e-3, 61).unwrap();
    let q = QuadratureSpec::default();
    let analytic = lensless_ghost_image(&slits(), D, D, &src, &grid, &q).unwrap().interference_profile();
    let mc = mc_ghost_image(&slits(), D, D, &src, &grid, &q, &McOptions::new(20_000, 11)).unwrap();
    assert!(metrics::rms_difference(&analytic.values, &mc.profile.values) < 0.07);
    assert!(metrics::affine_fit_rms(&analytic.values, &mc.profile.values) < 0.07);
    let sep = metrics::lobe_separation(&grid.axis(), &mc.profile.values, 0.5).unwrap();
    assert!((sep - 1.5e-3).abs() <= grid.spacing());
    assert!(mc.relative_error.unwrap() < 0.1);
}

#[test]
fn open_bucket_gives_flat_profile() {
    let src = source();
    let grid = ScanGrid::line(1.0e-3, 21).unwrap();
    let open = ApertureMask::Bars { intervals: vec![(-5e-3, 5e-3)], length: None };
    let img = mc_ghost_image(&open, D, D, &src, &grid, &QuadratureSpec::default(), &McOptions::new(4000, 5)).unwrap();
    let c = &img.covariance;
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    let se = img.stderr.as_ref().unwrap();
    for (v, e) in c.iter().zip(se) {
        assert!((v - mean).abs() < 5.0 * e, "{v} {mean} {e}");
    }
    let slit_img = mc_ghost_image(&slits(), D, D, &src, &grid, &QuadratureSpec::default(), &McOptions::new(4000, 5)).unwrap();
    let c = &slit_img.covariance;
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    let se = slit_img.stderr.as_ref().unwrap();
    assert!(c.iter().zip(se).any(|(v, e)| (v - mean).abs() > 5.0 * e));
}

#[test]
fn mean_intensity_is_the_incoherent_sum() {
    let probes: Vec<Probe> = [0.0, 3e-4, -8e-4].iter().map(|x| Probe::new(*x, D)).collect();
    let ens = SpeckleEnsemble::generate(&source(), &probes, 8000, 77).unwrap();
    for p in 0..probes.len() {
        let col = ens.column(p);
        let n = col.len() as f64;
        let m = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((m - 1.0).abs() < 4.0 * sd / n.sqrt(), "{m}");
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let src = source();
    let grid = ScanGrid::line(1.5e-3, 21).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let img = mc_ghost_image(&slits(), D, D, &src, &grid, &QuadratureSpec::default(), &McOptions::new(1500, 8)).unwrap();
                let ens = SpeckleEnsemble::generate(&src, &[Probe::new(0.0, D)], 500, 8).unwrap();
                let lens = lensless_ghost_image(&slits(), D, D, &src, &grid, &QuadratureSpec::default()).unwrap();
                (img, ens, lens)
            })
    };
    let one = run(1);
    for t in [2, 4, 7] {
        let other = run(t);
        assert_eq!(one.0, other.0);
        assert_eq!(one.1, other.1);
        assert_eq!(one.2, other.2);
    }
}
