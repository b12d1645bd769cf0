//! Monte Carlo chaotic light: `N` equal-amplitude point sub-sources on a line,
//! each with an independent uniform phase per realization.
//!
//! The field at a probe `x` on the plane `z` is
//! `E = N^{-1/2} Σₙ e^{iφₙ} e^{iω(x−sₙ)²/(2cz)}`, so `⟨I⟩ = 1` everywhere.
//! The common Fresnel prefactor of the plane is dropped.
//!
//! With unit phasors the fourth moment is `⟨|E|⁴⟩ = 2 − 1/N`, so every
//! sample covariance carries a constant `−1/N` offset relative to the
//! continuum `|g₁₂|²`.
//!
//! Randomness is counter based: realization `r` uses ChaCha8 stream `r` of
//! the master seed and draws one phase per sub-source in order. Results do
//! not depend on the number of worker threads.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::IntensityProfile;
use crate::error::{require_finite, require_positive, Error, Result};
use crate::model::{ApertureMask, Dim, ScanGrid, SPEED_OF_LIGHT as C};
use crate::par;
use crate::propagation::cis;
use crate::quadrature::{NodePlan, PhaseRate, QuadratureSpec};
use crate::thermal::{hbt_farfield, SourceClass, ThermalSourceSpec};

/// Sub-source count used when none is configured.
pub const DEFAULT_SUB_SOURCES: usize = 256;
/// Realizations per accumulation chunk of [`mc_ghost_image`].
pub const CHUNK: usize = 256;

/// Detector position `x` on the plane at distance `z` from the source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub x: f64,
    pub z: f64,
}

impl Probe {
    pub fn new(x: f64, z: f64) -> Self {
        Probe { x, z }
    }
}

/// Sub-source positions `sₙ = −W + (n+½)·2W/N`.
pub fn sub_source_positions(src: &ThermalSourceSpec) -> Result<Vec<f64>> {
    let w = src.require_half_width()?;
    let n = src.sub_sources;
    let pitch = 2.0 * w / n as f64;
    Ok((0..n).map(|k| -w + (k as f64 + 0.5) * pitch).collect())
}

/// Probe-by-source table of unit propagators.
#[derive(Clone, Debug)]
pub struct Propagator {
    n_probes: usize,
    n_src: usize,
    table: Vec<Complex64>,
    scale: f64,
}

impl Propagator {
    /// Refuses when adjacent sub-sources differ in phase by π or more at
    /// some probe (a single sub-source always passes), reporting the sub-source count that would suffice.
    pub fn new(src: &ThermalSourceSpec, probes: &[Probe]) -> Result<Self> {
        let s = sub_source_positions(src)?;
        let w = src.require_half_width()?;
        let pitch = 2.0 * w / s.len() as f64;
        let k = src.omega / C;
        let mut worst = 0.0f64;
        for p in probes {
            require_finite("probe x", p.x)?;
            require_positive("plane_z", p.z)?;
            worst = worst.max(k * (p.x.abs() + w) / p.z);
        }
        if s.len() > 1 && worst * pitch >= PI {
            return Err(Error::UnderSampled {
                context: "speckle sub-sources",
                requested: s.len(),
                required: libm::ceil(2.0 * w * worst / PI) as usize + 1,
            });
        }
        let mut table = Vec::with_capacity(probes.len() * s.len());
        for p in probes {
            let a = k / (2.0 * p.z);
            table.extend(s.iter().map(|s| cis(a * (p.x - s) * (p.x - s))));
        }
        Ok(Propagator {
            n_probes: probes.len(),
            n_src: s.len(),
            table,
            scale: 1.0 / libm::sqrt(s.len() as f64),
        })
    }

    /// Intensities of realization `r` into `out`.
    fn realize(&self, seed: u64, r: u64, phasors: &mut Vec<Complex64>, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r);
        phasors.clear();
        phasors.extend((0..self.n_src).map(|_| cis(rng.gen::<f64>() * 2.0 * PI)));
        for (p, o) in out.iter_mut().enumerate() {
            let row = &self.table[p * self.n_src..(p + 1) * self.n_src];
            let e: Complex64 = row.iter().zip(phasors.iter()).map(|(g, u)| g * u).sum();
            *o = (e * self.scale).norm_sqr();
        }
    }

    fn sample(&self, seed: u64, r: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_probes];
        self.realize(seed, r, &mut Vec::with_capacity(self.n_src), &mut out);
        out
    }
}

/// One realization of intensities at `probes` on the plane `plane_z`.
pub fn sample_field(src: &ThermalSourceSpec, plane_z: f64, probes: &[f64], seed: u64, realization: u64) -> Result<Vec<f64>> {
    require_positive("plane_z", plane_z)?;
    let probes: Vec<Probe> = probes.iter().map(|x| Probe::new(*x, plane_z)).collect();
    Ok(Propagator::new(src, &probes)?.sample(seed, realization))
}

/// Intensity records, realization-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeckleEnsemble {
    pub source: ThermalSourceSpec,
    pub seed: u64,
    pub realizations: usize,
    pub probes: Vec<Probe>,
    records: Vec<f64>,
}

impl SpeckleEnsemble {
    pub fn generate(src: &ThermalSourceSpec, probes: &[Probe], realizations: usize, seed: u64) -> Result<Self> {
        if realizations == 0 {
            return Err(Error::invalid("realizations", "must be positive"));
        }
        let prop = Propagator::new(src, probes)?;
        let rows = par::map_indexed(realizations, |r| prop.sample(seed, r as u64));
        Ok(SpeckleEnsemble {
            source: src.clone(),
            seed,
            realizations,
            probes: probes.to_vec(),
            records: rows.concat(),
        })
    }

    pub fn record(&self, r: usize) -> &[f64] {
        let p = self.probes.len();
        &self.records[r * p..(r + 1) * p]
    }

    pub fn column(&self, probe: usize) -> Vec<f64> {
        (0..self.realizations).map(|r| self.record(r)[probe]).collect()
    }

    pub fn records(&self) -> &[f64] {
        &self.records
    }
}

/// Sample moments of a probe pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationEstimate {
    pub mean_i1: f64,
    pub mean_i2: f64,
    pub mean_i1i2: f64,
    /// Unbiased `⟨ΔI₁ΔI₂⟩`.
    pub covariance: f64,
    /// `⟨I₁I₂⟩/(Ī₁Ī₂)`.
    pub g2: f64,
    /// `⟨ΔI₁ΔI₂⟩/(Ī₁Ī₂)`.
    pub normalized_cov: f64,
}

pub fn estimate_pair(i1: &[f64], i2: &[f64]) -> Result<CorrelationEstimate> {
    let n = i1.len();
    if n < 2 || i2.len() != n {
        return Err(Error::Domain(format!("need two equal series of ≥ 2 realizations, got {n} and {}", i2.len())));
    }
    let nf = n as f64;
    let m1 = i1.iter().sum::<f64>() / nf;
    let m2 = i2.iter().sum::<f64>() / nf;
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::Estimation("zero mean intensity, cannot normalize".into()));
    }
    let m12 = i1.iter().zip(i2).map(|(a, b)| a * b).sum::<f64>() / nf;
    let cov = i1.iter().zip(i2).map(|(a, b)| (a - m1) * (b - m2)).sum::<f64>() / (nf - 1.0);
    Ok(CorrelationEstimate {
        mean_i1: m1,
        mean_i2: m2,
        mean_i1i2: m12,
        covariance: cov,
        g2: m12 / (m1 * m2),
        normalized_cov: cov / (m1 * m2),
    })
}

pub fn estimate_correlations(ens: &SpeckleEnsemble, p1: usize, p2: usize) -> Result<CorrelationEstimate> {
    let np = ens.probes.len();
    if p1 >= np || p2 >= np {
        return Err(Error::invalid("probe", format!("index out of range for {np} probes")));
    }
    estimate_pair(&ens.column(p1), &ens.column(p2))
}

/// Monte Carlo point of the far-field correlation curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HbtSample {
    pub x1: f64,
    pub x2: f64,
    pub g2: f64,
    /// `g2 + 1/N`, the finite-source offset removed.
    pub g2_corrected: f64,
    /// `1 + sinc²(πΔθ(x₁+x₂)/λ)` with `Δθ = 2W/z`.
    pub analytic: f64,
}

/// Intensity correlation of detector pairs on a plane at `z`.
///
/// Arm 1 is read on a mirrored axis (`x₁ → −x₁`), matching the convention in
/// which the thermal peak lies on `x₁ = −x₂`.
pub fn hbt_monte_carlo(src: &ThermalSourceSpec, z: f64, pairs: &[(f64, f64)], realizations: usize, seed: u64) -> Result<Vec<HbtSample>> {
    let w = src.require_half_width()?;
    require_positive("z", z)?;
    let probes: Vec<Probe> = pairs
        .iter()
        .flat_map(|&(x1, x2)| [Probe::new(-x1, z), Probe::new(x2, z)])
        .collect();
    let ens = SpeckleEnsemble::generate(src, &probes, realizations, seed)?;
    let far = ThermalSourceSpec::far_field(src.omega, 2.0 * w / z);
    let bias = 1.0 / src.sub_sources as f64;
    pairs
        .iter()
        .enumerate()
        .map(|(k, &(x1, x2))| {
            let e = estimate_correlations(&ens, 2 * k, 2 * k + 1)?;
            Ok(HbtSample {
                x1,
                x2,
                g2: e.g2,
                g2_corrected: e.g2 + bias,
                analytic: hbt_farfield(x1, x2, &far, src.wavelength(), SourceClass::Thermal)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOptions {
    pub realizations: usize,
    pub seed: u64,
    /// Relative standard error (to the image peak) above which a warning is
    /// attached.
    pub tolerance: Option<f64>,
}

impl McOptions {
    pub fn new(realizations: usize, seed: u64) -> Self {
        McOptions {
            realizations,
            seed,
            tolerance: None,
        }
    }
}

/// Fluctuation-correlation ghost image.
#[derive(Clone, Debug, PartialEq)]
pub struct McGhostImage {
    /// Unit-peak `⟨ΔI_bucket ΔI₂⟩ + B/N`, where `B` is the bucket transmission
    /// integral: the finite-source offset is added back before normalizing.
    pub profile: IntensityProfile,
    /// Unnormalized covariance per scan point.
    pub covariance: Vec<f64>,
    /// Batch-means standard error per scan point (`None` with one batch).
    pub stderr: Option<Vec<f64>>,
    /// Largest standard error over the largest `|covariance|`.
    pub relative_error: Option<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
struct Moments {
    n: f64,
    b: f64,
    i: Vec<f64>,
    bi: Vec<f64>,
}

impl Moments {
    fn zero(p: usize) -> Self {
        Moments { n: 0.0, b: 0.0, i: vec![0.0; p], bi: vec![0.0; p] }
    }

    fn add(&mut self, o: &Moments) {
        self.n += o.n;
        self.b += o.b;
        for k in 0..self.i.len() {
            self.i[k] += o.i[k];
            self.bi[k] += o.bi[k];
        }
    }

    fn covariance(&self) -> Vec<f64> {
        let mb = self.b / self.n;
        let corr = self.n / (self.n - 1.0);
        (0..self.i.len())
            .map(|k| (self.bi[k] / self.n - mb * self.i[k] / self.n) * corr)
            .collect()
    }
}

/// Ghost image from simulated speckle: a bucket detector behind `mask` at
/// `d_a`, a scanning detector at `d_b`. Line sources and 1-D grids only.
pub fn mc_ghost_image(
    mask: &ApertureMask,
    d_a: f64,
    d_b: f64,
    src: &ThermalSourceSpec,
    grid: &ScanGrid,
    quad: &QuadratureSpec,
    opts: &McOptions,
) -> Result<McGhostImage> {
    if grid.dim != Dim::One {
        return Err(Error::Unsupported("Monte Carlo ghost imaging runs on 1-D grids".into()));
    }
    grid.validate()?;
    mask.validate()?;
    require_positive("d_a", d_a)?;
    require_positive("d_b", d_b)?;
    if opts.realizations < 2 {
        return Err(Error::Domain("need at least two realizations".into()));
    }
    let w = src.require_half_width()?;
    let rate = PhaseRate {
        constant: 2.0 * src.omega * w / (C * d_a),
        per_radius: 0.0,
    };
    let nodes = NodePlan::new(mask, Dim::One, quad, rate, "bucket integral")?.nodes();
    let axis = grid.axis();
    let mut probes: Vec<Probe> = nodes.points.iter().map(|p| Probe::new(p[0], d_a)).collect();
    probes.extend(axis.iter().map(|x| Probe::new(*x, d_b)));
    let prop = Propagator::new(src, &probes)?;
    let bucket_w: Vec<f64> = (0..nodes.len())
        .map(|k| nodes.weights[k] * nodes.transmission[k] * nodes.transmission[k])
        .collect();
    let nk = nodes.len();
    let np = axis.len();

    let chunks = opts.realizations.div_ceil(CHUNK);
    let parts = par::map_indexed(chunks, |c| {
        let mut m = Moments::zero(np);
        let mut ph = Vec::with_capacity(prop.n_src);
        let mut out = vec![0.0; prop.n_probes];
        let end = ((c + 1) * CHUNK).min(opts.realizations);
        for r in c * CHUNK..end {
            prop.realize(opts.seed, r as u64, &mut ph, &mut out);
            let b: f64 = bucket_w.iter().zip(&out[..nk]).map(|(w, i)| w * i).sum();
            m.n += 1.0;
            m.b += b;
            for (k, i) in out[nk..].iter().enumerate() {
                m.i[k] += i;
                m.bi[k] += b * i;
            }
        }
        m
    });
    let mut total = Moments::zero(np);
    for p in &parts {
        total.add(p);
    }
    let covariance = total.covariance();

    let full: Vec<&Moments> = parts.iter().filter(|m| m.n >= 2.0).collect();
    let stderr = (full.len() >= 2).then(|| {
        let covs: Vec<Vec<f64>> = full.iter().map(|m| m.covariance()).collect();
        let nb = covs.len() as f64;
        (0..np)
            .map(|k| {
                let mean = covs.iter().map(|c| c[k]).sum::<f64>() / nb;
                let var = covs.iter().map(|c| (c[k] - mean) * (c[k] - mean)).sum::<f64>() / (nb - 1.0);
                libm::sqrt(var / nb)
            })
            .collect::<Vec<f64>>()
    });
    let scale = covariance.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let relative_error = stderr
        .as_ref()
        .map(|s| s.iter().fold(0.0f64, |a, v| a.max(*v)) / scale);
    let warning = match (opts.tolerance, relative_error) {
        (Some(tol), Some(e)) if e > tol => Some(format!(
            "relative standard error {e:.3e} exceeds tolerance {tol:.3e} after {} realizations",
            opts.realizations
        )),
        (Some(_), None) => Some(format!(
            "{} realizations form a single batch; no error estimate",
            opts.realizations
        )),
        _ => None,
    };
    let offset = bucket_w.iter().sum::<f64>() / src.sub_sources as f64;
    let profile = IntensityProfile::from_raw(
        grid.clone(),
        covariance.iter().map(|c| c + offset).collect(),
        format!("mc({})", mask.label()),
    );
    Ok(McGhostImage {
        profile,
        covariance,
        stderr,
        relative_error,
        realizations: opts.realizations,
        seed: opts.seed,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::omega_from_wavelength;
    use crate::thermal::lensless_g12_equal_arms;

    fn src(n: usize) -> ThermalSourceSpec {
        ThermalSourceSpec::near_field(omega_from_wavelength(632.8e-9).unwrap(), 0.5e-3, n)
    }

    #[test]
    fn single_source_is_constant() {
        for r in 0..20 {
            let v = sample_field(&src(1), 0.139, &[0.0, 1e-4], 7, r).unwrap();
            assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_source_is_refused() {
        let err = sample_field(&src(4), 0.139, &[0.0], 1, 0).unwrap_err();
        match err {
            Error::UnderSampled { requested, required, .. } => assert!(required > requested),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let probes = [Probe::new(0.0, 0.139), Probe::new(5e-5, 0.139)];
        let a = SpeckleEnsemble::generate(&src(64), &probes, 300, 42).unwrap();
        let b = SpeckleEnsemble::generate(&src(64), &probes, 300, 42).unwrap();
        let c = SpeckleEnsemble::generate(&src(64), &probes, 300, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records(), c.records());
        assert!(a.records().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn intensity_is_negative_exponential() {
        let ens = SpeckleEnsemble::generate(&src(1000), &[Probe::new(0.0, 0.139)], 10_000, 2024).unwrap();
        let mut v = ens.column(0);
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let ks = v
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let f = 1.0 - libm::exp(-x);
                (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS {ks}");
    }

    #[test]
    fn g2_bounds_and_coherence_decay() {
        let s = src(256);
        let xs = [0.0, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4];
        let mut probes = vec![Probe::new(0.0, 0.139)];
        probes.extend(xs.iter().map(|x| Probe::new(*x, 0.139)));
        let ens = SpeckleEnsemble::generate(&s, &probes, 10_000, 9).unwrap();
        let same = estimate_correlations(&ens, 0, 1).unwrap();
        assert!((same.g2 - 2.0).abs() < 0.05, "{}", same.g2);
        let far = estimate_correlations(&ens, 0, 6).unwrap();
        assert!((far.g2 - 1.0).abs() < 0.05, "{}", far.g2);
        let mut sq = 0.0;
        for (k, x) in xs.iter().enumerate() {
            let e = estimate_correlations(&ens, 0, k + 1).unwrap();
            let g = lensless_g12_equal_arms([0.0; 2], [*x, 0.0], 0.139, &s, Dim::One).unwrap().norm_sqr();
            sq += (e.normalized_cov - g).powi(2);
        }
        assert!(libm::sqrt(sq / xs.len() as f64) < 0.05);
        let c: Vec<f64> = (1..=4).map(|k| estimate_correlations(&ens, 0, k).unwrap().covariance).collect();
        assert!(c.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn too_few_realizations_or_dark_fail() {
        let ens = SpeckleEnsemble::generate(&src(16), &[Probe::new(0.0, 0.139)], 1, 1).unwrap();
        assert!(matches!(estimate_correlations(&ens, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(estimate_pair(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::Estimation(_))));
    }

    #[test]
    fn hbt_peak_on_antidiagonal() {
        let s = src(256);
        let out = hbt_monte_carlo(&s, 0.139, &[(1e-4, -1e-4), (1e-3, 1e-3)], 8000, 5).unwrap();
        assert!((out[0].g2_corrected - 2.0).abs() < 0.08);
        assert!((out[1].g2_corrected - out[1].analytic).abs() < 0.08);
    }

    #[test]
    fn ghost_chunking_is_deterministic_and_warns() {
        let mask = ApertureMask::DoubleSlit { separation: 1.5e-3, width: 0.2e-3, length: None };
        let grid = ScanGrid::line(1.5e-3, 31).unwrap();
        let q = QuadratureSpec::default();
        let mut o = McOptions::new(600, 3);
        o.tolerance = Some(1e-6);
        let a = mc_ghost_image(&mask, 0.139, 0.139, &src(256), &grid, &q, &o).unwrap();
        let b = mc_ghost_image(&mask, 0.139, 0.139, &src(256), &grid, &q, &o).unwrap();
        assert_eq!(a, b);
        assert!(a.warning.is_some());
        assert_eq!(a.stderr.as_ref().unwrap().len(), 31);
    }
}
