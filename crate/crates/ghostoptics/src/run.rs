//! Scenario execution: config in, files and a report out.

use std::path::Path;
use std::time::Instant;

use ghostoptics_core::classical::{coherent_image, image_sharpness, incoherent_image, IntensityProfile};
use ghostoptics_core::correlation::{chaotic_full_joint, chaotic_joint_scan, laser_full_joint, spdc_joint_image, BiphotonState, CorrelationMap};
use ghostoptics_core::ghost::{bucket_coincidence_image, GhostGeometry};
use ghostoptics_core::metrics;
use ghostoptics_core::model::{magnification, validate_geometry, Field, ImagingGeometry, ScenarioKind};
use ghostoptics_core::specfun::KernelConfig;
use ghostoptics_core::speckle::{hbt_monte_carlo, mc_ghost_image, McOptions, DEFAULT_SUB_SOURCES};
use ghostoptics_core::thermal::{hbt_farfield, lensless_ghost_image, secondary_image, SecondaryLens, SourceClass, ThermalSourceSpec};
use ghostoptics_core::{ApertureMask, Dim, ScanGrid};

use crate::config::{grid_from, ModeConfig, ScenarioConfig, SourceClassConfig};
use crate::csvio::{self, JOINT_HEADER, MAP_HEADER};
use crate::error::{Result, RunError};
use crate::pgm;
use crate::report::RunReport;

pub const REPORT_FILE: &str = "report.txt";

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    out: &'a Path,
    report: RunReport,
}

impl Ctx<'_> {
    fn metric(&mut self, name: &str, v: f64) {
        self.report.set_metric(name, v);
    }

    fn emit(&mut self, name: &str, bytes: &[u8], range: Option<(f64, f64)>) -> Result<()> {
        self.report.emit(self.out, name, bytes, range)
    }

    /// `<stem>.csv` holds the profile (central row in 2-D); 2-D grids add
    /// `<stem>_map.csv` and `<stem>.pgm`.
    fn profile(&mut self, stem: &str, grid: &ScanGrid, values: &[f64]) -> Result<()> {
        let row: Vec<f64> = grid.central_row().into_iter().map(|k| values[k]).collect();
        self.emit(&format!("{stem}.csv"), &csvio::profile_bytes(&grid.axis(), &row), None)?;
        if grid.dim == Dim::Two {
            self.emit(&format!("{stem}_map.csv"), &csvio::map_bytes(MAP_HEADER, &grid.points(), values), None)?;
            let (img, lo, hi) = pgm::heatmap(grid.samples, grid.samples, values);
            self.emit(&format!("{stem}.pgm"), &pgm::encode(&img), Some((lo, hi)))?;
        }
        Ok(())
    }

    fn joint(&mut self, stem: &str, map: &CorrelationMap) -> Result<()> {
        let axis = map.grid.axis();
        let n = axis.len();
        let pairs: Vec<[f64; 2]> = (0..n * n).map(|k| [axis[k / n], axis[k % n]]).collect();
        self.emit(&format!("{stem}_joint.csv"), &csvio::map_bytes(JOINT_HEADER, &pairs, &map.values), None)?;
        let (img, lo, hi) = pgm::heatmap(n, n, &map.values);
        self.emit(&format!("{stem}_joint.pgm"), &pgm::encode(&img), Some((lo, hi)))
    }

    fn shape_metrics(&mut self, axis: &[f64], row: &[f64]) {
        if let Some(v) = metrics::fwhm(axis, row) {
            self.metric("fwhm_m", v);
        }
        if let Some(v) = metrics::first_minimum(axis, row) {
            self.metric("first_zero_m", v);
        }
        self.metric("visibility", metrics::visibility(row));
    }
}

fn check_geometry(g: &ImagingGeometry, kind: ScenarioKind) -> Result<f64> {
    let r = validate_geometry(g, kind)?;
    let residual = r.lens_residual.unwrap_or(0.0);
    r.into_result()?;
    Ok(residual)
}

/// Extent of the mask support along x (outer edges of the outermost
/// features).
fn mask_outer_width(mask: &ApertureMask) -> Option<f64> {
    let s = mask.segments_1d();
    if s.len() < 2 {
        return None;
    }
    Some(s.last()?.b - s.first()?.a)
}

fn thermal_source(cfg: &ScenarioConfig) -> Result<ThermalSourceSpec> {
    let s = &cfg.source;
    let spec = ThermalSourceSpec {
        omega: cfg.omega()?,
        angular_size: s.angular_size,
        half_width: s.half_width,
        sub_sources: s.sub_sources.unwrap_or(DEFAULT_SUB_SOURCES),
    };
    spec.validate().map_err(|e| RunError::config("source", e.to_string()))?;
    Ok(spec)
}

/// Runs `cfg`, writing outputs and `report.txt` into `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let kind = cfg.scenario_kind()?;
    std::fs::create_dir_all(out).map_err(|e| RunError::io(out, e))?;
    let start = Instant::now();
    let mut ctx = Ctx {
        cfg,
        out,
        report: RunReport {
            scenario: kind.name().to_owned(),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config: cfg.to_toml_string(),
            ..RunReport::default()
        },
    };
    match kind {
        ScenarioKind::ClassicalCoherent | ScenarioKind::ClassicalIncoherent => classical(&mut ctx, kind)?,
        ScenarioKind::TwoPhotonSpdc => two_photon_spdc(&mut ctx)?,
        ScenarioKind::TwoPhotonLaser | ScenarioKind::TwoPhotonChaotic => two_photon_classical(&mut ctx, kind)?,
        ScenarioKind::GhostSpdc => ghost_spdc(&mut ctx)?,
        ScenarioKind::GhostThermalLensless => lensless(&mut ctx)?,
        ScenarioKind::GhostSecondary => secondary(&mut ctx)?,
        ScenarioKind::HbtFarfield => hbt(&mut ctx)?,
        ScenarioKind::SpeckleMc => speckle(&mut ctx)?,
    }
    let mut report = ctx.report;
    report.wall_clock_s = start.elapsed().as_secs_f64();
    let path = out.join(REPORT_FILE);
    std::fs::write(&path, report.to_text()).map_err(|e| RunError::io(&path, e))?;
    Ok(report)
}

fn classical(ctx: &mut Ctx, kind: ScenarioKind) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    let residual = check_geometry(&g, kind)?;
    let (mask, grid, quad, omega) = (cfg.mask()?, cfg.grid()?, cfg.quadrature(), cfg.omega()?);
    let p = if kind == ScenarioKind::ClassicalCoherent {
        coherent_image(&mask, &g, omega, &grid, &quad)?
    } else {
        incoherent_image(&mask, &g, omega, &grid, &quad)?
    };
    ctx.profile("profile", &grid, &p.values)?;
    let (axis, row) = (p.axis(), p.row());
    ctx.shape_metrics(&axis, &row);
    ctx.metric("sharpness_per_m", image_sharpness(&p));
    ctx.metric("lens_residual_per_m", residual);
    ctx.metric("expected_magnification", magnification(&g)?);
    magnification_metric(ctx, &mask, &axis, &row);
    Ok(())
}

fn magnification_metric(ctx: &mut Ctx, mask: &ApertureMask, axis: &[f64], row: &[f64]) {
    if let (Some(obj), Some(img)) = (mask_outer_width(mask), metrics::outer_width(axis, row, 0.5)) {
        if obj > 0.0 {
            ctx.metric("outer_width_m", img);
            ctx.metric("measured_magnification", img / obj);
        }
    }
}

fn two_photon_spdc(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    check_geometry(&g, ScenarioKind::TwoPhotonSpdc)?;
    let state = BiphotonState::new(cfg.omega()?)?;
    let kernel = match cfg.run.kernel_floor {
        Some(floor) => KernelConfig { floor },
        None => KernelConfig::default(),
    };
    let grid = cfg.grid()?;
    let map = spdc_joint_image(&cfg.mask()?, &g, &state, &grid, &cfg.quadrature(), &kernel)?;
    ctx.profile("profile", &grid, &map.values)?;
    let row: Vec<f64> = grid.central_row().into_iter().map(|k| map.values[k]).collect();
    ctx.shape_metrics(&grid.axis(), &row);
    ctx.metric("clamped_evaluations", map.clamped as f64);
    Ok(())
}

fn two_photon_classical(ctx: &mut Ctx, kind: ScenarioKind) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    check_geometry(&g, kind)?;
    let (mask, grid, quad, omega) = (cfg.mask()?, cfg.grid()?, cfg.quadrature(), cfg.omega()?);
    let chaotic = kind == ScenarioKind::TwoPhotonChaotic;
    match cfg.run.mode {
        ModeConfig::FullJoint => {
            if grid.dim != Dim::One {
                return Err(RunError::config("run.mode", "full-joint maps need a 1-D grid"));
            }
            let map = if chaotic {
                chaotic_full_joint(&mask, &g, omega, &grid, &quad)?
            } else {
                laser_full_joint(&mask, &g, omega, &grid, &quad)?
            };
            ctx.joint("g2", &map)?;
            let n = grid.samples;
            let diag: Vec<f64> = (0..n).map(|i| map.values[i * n + i]).collect();
            ctx.profile("profile", &grid, &diag)?;
            ctx.metric("visibility", metrics::visibility(&map.values));
        }
        ModeConfig::JointDiagonal => {
            let values = if chaotic {
                let map = chaotic_joint_scan(&mask, &g, omega, &grid, &quad)?;
                let (p, i) = (map.product.clone().unwrap_or_default(), map.interference.clone().unwrap_or_default());
                ctx.profile("product", &grid, &p)?;
                ctx.profile("interference", &grid, &i)?;
                map.values
            } else {
                let c = coherent_image(&mask, &g, omega, &grid, &quad)?;
                IntensityProfile::from_raw(grid.clone(), c.values.iter().map(|v| v * v).collect(), c.label).values
            };
            ctx.profile("profile", &grid, &values)?;
            let row: Vec<f64> = grid.central_row().into_iter().map(|k| values[k]).collect();
            ctx.shape_metrics(&grid.axis(), &row);
        }
    }
    Ok(())
}

fn ghost_spdc(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let mut ig = cfg.imaging_geometry();
    if let (Some(d1), Some(d2), None) = (ig.d_1, ig.d_2, ig.s_i) {
        ig.s_i = Some(d1 + d2);
    }
    let residual = check_geometry(&ig, ScenarioKind::GhostSpdc)?;
    let g = GhostGeometry::from_imaging(&ig)?;
    // Signal and idler are degenerate at half the pump frequency.
    let omega = cfg.source_model()?.detected_omega();
    let (mask, grid) = (cfg.mask()?, cfg.grid()?);
    let p = bucket_coincidence_image(&mask, &g, omega, &grid, &cfg.quadrature())?;
    ctx.profile("profile", &grid, &p.values)?;
    let (axis, row) = (p.axis(), p.row());
    ctx.shape_metrics(&axis, &row);
    ctx.metric("sharpness_per_m", image_sharpness(&p));
    ctx.metric("lens_residual_per_m", residual);
    ctx.metric("expected_magnification", g.magnification());
    magnification_metric(ctx, &mask, &axis, &row);
    Ok(())
}

fn lensless(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    check_geometry(&g, ScenarioKind::GhostThermalLensless)?;
    let (d_a, d_b) = (g.require(Field::DA)?, g.require(Field::DB)?);
    let src = thermal_source(cfg)?;
    let (mask, grid, quad) = (cfg.mask()?, cfg.grid()?, cfg.quadrature());
    let img = lensless_ghost_image(&mask, d_a, d_b, &src, &grid, &quad)?;
    let inter = img.interference_profile();
    ctx.profile("profile", &grid, &img.map.values)?;
    ctx.profile("interference", &grid, &inter.values)?;
    let (axis, row) = (grid.axis(), inter.row());
    let total_row: Vec<f64> = grid.central_row().into_iter().map(|k| img.map.values[k]).collect();
    ctx.metric("visibility", metrics::visibility(&total_row));
    ctx.metric("near_field_ratio", img.near_field_ratio);
    ctx.report.set_note("near_field", ghostoptics_core::thermal::near_field_note(img.near_field_ratio));
    if img.defocused {
        ctx.report.warnings.push("d_a differs from d_b: correlation is defocused".into());
    }
    lobe_metrics(ctx, &mask, &axis, &row);
    if let Some(n) = cfg.run.realizations {
        if grid.dim == Dim::One {
            let mc = mc_ghost_image(&mask, d_a, d_b, &src, &grid, &quad, &mc_options(cfg, n))?;
            ctx.profile("mc", &grid, &mc.profile.values)?;
            ctx.metric("mc_rms_vs_analytic", metrics::rms_difference(&inter.values, &mc.profile.values));
            if let Some(e) = mc.relative_error {
                ctx.metric("mc_relative_error", e);
            }
            ctx.report.warnings.extend(mc.warning);
        } else {
            ctx.report.warnings.push("Monte Carlo cross-check skipped: 1-D grids only".into());
        }
    }
    Ok(())
}

fn mc_options(cfg: &ScenarioConfig, realizations: usize) -> McOptions {
    McOptions {
        realizations,
        seed: cfg.seed,
        tolerance: cfg.run.tolerance,
    }
}

/// Lobe separation and its ratio to the mask's feature separation.
fn lobe_metrics(ctx: &mut Ctx, mask: &ApertureMask, axis: &[f64], row: &[f64]) {
    if let Some(sep) = metrics::lobe_separation(axis, row, 0.5) {
        ctx.metric("lobe_separation_m", sep);
        let segs = mask.segments_1d();
        if segs.len() >= 2 {
            let c = |s: &ghostoptics_core::model::Segment| 0.5 * (s.a + s.b);
            let obj = c(&segs[segs.len() - 1]) - c(&segs[0]);
            if obj > 0.0 {
                ctx.metric("measured_magnification", sep / obj);
            }
        }
    }
}

fn secondary(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    let residual = check_geometry(&g, ScenarioKind::GhostSecondary)?;
    let (d_a, d_b) = (g.require(Field::DA)?, g.require(Field::DB)?);
    let lens = SecondaryLens {
        f: g.require(Field::F)?,
        object_dist: d_b - d_a,
        image_dist: g.require(Field::SI)?,
        lens_radius: g.require(Field::LensRadius)?,
    };
    let src = thermal_source(cfg)?;
    let (mask, grid, quad) = (cfg.mask()?, cfg.grid()?, cfg.quadrature());
    if grid.dim != Dim::One {
        return Err(RunError::config("grid.dim", "ghost-secondary runs on 1-D grids"));
    }
    let ghost_grid = match &cfg.run.ghost_grid {
        Some(gg) => grid_from(gg, "run.ghost_grid")?,
        None => ScanGrid::new(Dim::One, grid.extent / lens.expected_magnification(), grid.samples, 0.0)?,
    };
    let ghost = lensless_ghost_image(&mask, d_a, d_a, &src, &ghost_grid, &quad)?.interference_profile();
    ctx.profile("ghost_plane", &ghost_grid, &ghost.values)?;
    let out = secondary_image(&ghost, &lens, src.omega, &grid, &quad)?;
    ctx.profile("profile", &grid, &out.profile.values)?;
    ctx.metric("measured_magnification", out.measured_magnification);
    ctx.metric("expected_magnification", out.expected_magnification);
    ctx.metric("lens_residual_per_m", residual);
    ctx.metric("defocus_phase_rad", out.defocus_phase);
    ctx.metric("blurred", if out.blurred { 1.0 } else { 0.0 });
    if out.blurred {
        ctx.report.warnings.push(format!("secondary lens defocus {:.2} rad exceeds pi/2", out.defocus_phase));
    }
    Ok(())
}

fn hbt(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let grid = cfg.grid()?;
    if grid.dim != Dim::One {
        return Err(RunError::config("grid.dim", "hbt-farfield scans one detector along a line"));
    }
    let mut src = thermal_source(cfg)?;
    let lambda = src.wavelength();
    let class = match cfg.run.source_class {
        SourceClassConfig::Thermal => SourceClass::Thermal,
        SourceClassConfig::Entangled => SourceClass::Entangled,
    };
    let x1 = cfg.run.x1;
    if src.angular_size.is_none() {
        let (w, z) = (src.half_width, cfg.run.distance);
        match (w, z) {
            (Some(w), Some(z)) if z > 0.0 => src.angular_size = Some(2.0 * w / z),
            _ => return Err(RunError::config("source.angular_size", "missing (or give half_width and run.distance)")),
        }
    }
    let axis = grid.axis();
    let values = axis
        .iter()
        .map(|x2| hbt_farfield(x1, *x2, &src, lambda, class))
        .collect::<std::result::Result<Vec<f64>, _>>()?;
    ctx.emit("profile.csv", &csvio::profile_bytes(&axis, &values), None)?;
    ctx.metric("peak", values.iter().copied().fold(f64::MIN, f64::max));
    ctx.metric("visibility", metrics::visibility(&values));
    if let (Some(n), SourceClass::Thermal) = (cfg.run.realizations, class) {
        let (w, z) = match (src.half_width, cfg.run.distance) {
            (Some(w), Some(z)) => (w, z),
            _ => return Err(RunError::config("run.distance", "Monte Carlo needs source.half_width and run.distance")),
        };
        let mc_src = ThermalSourceSpec { angular_size: Some(2.0 * w / z), ..src.clone() };
        let pairs: Vec<(f64, f64)> = axis.iter().map(|x2| (x1, *x2)).collect();
        let mc = hbt_monte_carlo(&mc_src, z, &pairs, n, cfg.seed)?;
        let g2: Vec<f64> = mc.iter().map(|s| s.g2_corrected).collect();
        let analytic: Vec<f64> = mc.iter().map(|s| s.analytic).collect();
        ctx.emit("mc.csv", &csvio::profile_bytes(&axis, &g2), None)?;
        let rms = metrics::rms_difference(&g2, &analytic) / analytic.iter().copied().fold(0.0, f64::max);
        ctx.metric("mc_relative_rms", rms);
    }
    Ok(())
}

fn speckle(ctx: &mut Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let g = cfg.imaging_geometry();
    check_geometry(&g, ScenarioKind::SpeckleMc)?;
    let (d_a, d_b) = (g.require(Field::DA)?, g.require(Field::DB)?);
    let src = thermal_source(cfg)?;
    let (mask, grid, quad) = (cfg.mask()?, cfg.grid()?, cfg.quadrature());
    let n = cfg.run.realizations.ok_or_else(|| RunError::config("run.realizations", "speckle-mc needs a realization count"))?;
    let mc = mc_ghost_image(&mask, d_a, d_b, &src, &grid, &quad, &mc_options(cfg, n))?;
    ctx.profile("profile", &grid, &mc.profile.values)?;
    ctx.emit("covariance.csv", &csvio::profile_bytes(&grid.axis(), &mc.covariance), None)?;
    if let Some(se) = &mc.stderr {
        ctx.emit("stderr.csv", &csvio::profile_bytes(&grid.axis(), se), None)?;
    }
    ctx.metric("realizations", n as f64);
    ctx.metric("sub_sources", src.sub_sources as f64);
    if let Some(e) = mc.relative_error {
        ctx.metric("relative_error", e);
    }
    ctx.report.warnings.extend(mc.warning.clone());
    lobe_metrics(ctx, &mask, &grid.axis(), &mc.profile.values);
    if cfg.run.compare_analytic {
        let a = lensless_ghost_image(&mask, d_a, d_b, &src, &grid, &quad)?.interference_profile();
        ctx.profile("analytic", &grid, &a.values)?;
        ctx.metric("rms_vs_analytic", metrics::rms_difference(&a.values, &mc.profile.values));
    }
    Ok(())
}
