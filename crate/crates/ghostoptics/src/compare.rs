//! Profile comparison over unit-peak normalized values.

use std::path::Path;

use ghostoptics_core::metrics;

use crate::csvio::read_profile;
use crate::error::{Result, RunError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub rms: f64,
    pub max_abs: f64,
    /// First zero of `a` over first zero of `b`, when both have one.
    pub first_zero_ratio: Option<f64>,
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        v.iter().map(|x| x / peak).collect()
    } else {
        v.to_vec()
    }
}

pub fn compare_values(xa: &[f64], a: &[f64], xb: &[f64], b: &[f64]) -> std::result::Result<Comparison, String> {
    if xa.len() != xb.len() {
        return Err(format!("coordinate_m axes differ in length: {} vs {}", xa.len(), xb.len()));
    }
    let scale = xa.iter().chain(xb).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if let Some(k) = (0..xa.len()).find(|&k| (xa[k] - xb[k]).abs() > 1e-9 * scale) {
        return Err(format!("coordinate_m axes differ at row {}: {} vs {}", k + 1, xa[k], xb[k]));
    }
    let (na, nb) = (normalized(a), normalized(b));
    let first_zero_ratio = match (metrics::first_minimum(xa, &na), metrics::first_minimum(xb, &nb)) {
        (Some(za), Some(zb)) if zb != 0.0 => Some(za / zb),
        _ => None,
    };
    Ok(Comparison {
        rms: metrics::rms_difference(&na, &nb),
        max_abs: metrics::max_abs_difference(&na, &nb),
        first_zero_ratio,
    })
}

/// Compares two `coordinate_m,value` CSV profiles.
pub fn compare_profiles(a: &Path, b: &Path) -> Result<Comparison> {
    let (xa, va) = read_profile(a)?;
    let (xb, vb) = read_profile(b)?;
    compare_values(&xa, &va, &xb, &vb).map_err(|m| RunError::format(b, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_profiles_have_zero_distance() {
        let x = [-1.0, 0.0, 1.0];
        let c = compare_values(&x, &[0.2, 2.0, 0.2], &x, &[0.1, 1.0, 0.1]).unwrap();
        assert_eq!(c.rms, 0.0);
        assert_eq!(c.max_abs, 0.0);
    }

    #[test]
    fn mismatched_axes_are_named() {
        let e = compare_values(&[0.0, 1.0], &[1.0, 1.0], &[0.0, 2.0], &[1.0, 1.0]).unwrap_err();
        assert!(e.contains("row 2"), "{e}");
        let e = compare_values(&[0.0], &[1.0], &[0.0, 1.0], &[1.0, 1.0]).unwrap_err();
        assert!(e.contains("length"), "{e}");
    }
}
