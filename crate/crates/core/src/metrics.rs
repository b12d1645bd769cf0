//! Measurements on sampled profiles: widths, zeros, lobes and distances.
//!
//! All functions take an ascending coordinate axis and matching values.

use alloc::vec::Vec;

/// Index of the largest value (first one on ties).
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| *v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Intensity-weighted mean coordinate.
pub fn centroid(axis: &[f64], values: &[f64]) -> f64 {
    let m: f64 = values.iter().sum();
    axis.iter().zip(values).map(|(x, v)| x * v).sum::<f64>() / m
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// in units of the spacing, clamped to [−½, ½].
fn parabolic_offset(a: f64, b: f64, c: f64) -> f64 {
    let den = a - 2.0 * b + c;
    if den.abs() < f64::MIN_POSITIVE {
        0.0
    } else {
        (0.5 * (a - c) / den).clamp(-0.5, 0.5)
    }
}

/// Distance from the global maximum to the first local minimum on its right,
/// refined by a parabola through the three samples around the minimum.
pub fn first_minimum(axis: &[f64], values: &[f64]) -> Option<f64> {
    let p = argmax(values)?;
    let mut i = p + 1;
    while i + 1 < values.len() && values[i + 1] < values[i] {
        i += 1;
    }
    if i + 1 >= values.len() {
        return None;
    }
    let h = axis[i + 1] - axis[i];
    let x = axis[i] + h * parabolic_offset(values[i - 1], values[i], values[i + 1]);
    Some(x - axis[p])
}

fn crossing(x0: f64, x1: f64, v0: f64, v1: f64, level: f64) -> f64 {
    if v1 == v0 {
        x0
    } else {
        x0 + (level - v0) / (v1 - v0) * (x1 - x0)
    }
}

/// Full width at half maximum of the peak containing the global maximum.
pub fn fwhm(axis: &[f64], values: &[f64]) -> Option<f64> {
    let p = argmax(values)?;
    let half = 0.5 * values[p];
    let mut l = p;
    while l > 0 && values[l - 1] > half {
        l -= 1;
    }
    let mut r = p;
    while r + 1 < values.len() && values[r + 1] > half {
        r += 1;
    }
    if l == 0 || r + 1 == values.len() {
        return None;
    }
    let xl = crossing(axis[l - 1], axis[l], values[l - 1], values[l], half);
    let xr = crossing(axis[r], axis[r + 1], values[r], values[r + 1], half);
    Some(xr - xl)
}

/// Distance between the outermost crossings of `threshold·max`.
pub fn outer_width(axis: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let level = threshold * values[argmax(values)?];
    let first = values.iter().position(|v| *v > level)?;
    let last = values.iter().rposition(|v| *v > level)?;
    if first == 0 || last + 1 == values.len() {
        return None;
    }
    let xl = crossing(axis[first - 1], axis[first], values[first - 1], values[first], level);
    let xr = crossing(axis[last], axis[last + 1], values[last], values[last + 1], level);
    Some(xr - xl)
}

/// A contiguous run of samples above a threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lobe {
    pub start: usize,
    pub end: usize,
    pub centroid: f64,
    pub mass: f64,
}

/// Runs above `threshold·max`, with intensity centroids.
pub fn lobes(axis: &[f64], values: &[f64], threshold: f64) -> Vec<Lobe> {
    let mut out = Vec::new();
    let Some(p) = argmax(values) else {
        return out;
    };
    let level = threshold * values[p];
    let mut i = 0;
    while i < values.len() {
        if values[i] > level {
            let start = i;
            while i < values.len() && values[i] > level {
                i += 1;
            }
            let (xs, vs) = (&axis[start..i], &values[start..i]);
            out.push(Lobe {
                start,
                end: i,
                centroid: centroid(xs, vs),
                mass: vs.iter().sum(),
            });
        } else {
            i += 1;
        }
    }
    out
}

/// Centroid distance between the outermost of the two heaviest lobes.
pub fn lobe_separation(axis: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let mut l = lobes(axis, values, threshold);
    if l.len() < 2 {
        return None;
    }
    l.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    Some((l[0].centroid - l[1].centroid).abs())
}

/// `(max − min)/(max + min)`.
pub fn visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min == 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

pub fn rms_difference(a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::sqrt(s / a.len() as f64)
}

pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Least-squares fit `estimate ≈ gain·reference + offset`.
pub fn affine_fit(reference: &[f64], estimate: &[f64]) -> (f64, f64) {
    let n = reference.len() as f64;
    let mr = reference.iter().sum::<f64>() / n;
    let me = estimate.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (r, e) in reference.iter().zip(estimate) {
        sxy += (r - mr) * (e - me);
        sxx += (r - mr) * (r - mr);
    }
    let gain = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (gain, me - gain * mr)
}

/// RMS residual of the affine fit, in units of the fitted reference peak
/// `gain·max(reference)`. Insensitive to overall scale and constant offsets.
pub fn affine_fit_rms(reference: &[f64], estimate: &[f64]) -> f64 {
    let (gain, offset) = affine_fit(reference, estimate);
    let peak = reference.iter().copied().fold(0.0, f64::max) * gain;
    let resid: Vec<f64> = reference.iter().map(|r| gain * r + offset).collect();
    rms_difference(&resid, estimate) / peak.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::somb_unchecked;
    use alloc::vec;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn somb_squared_zero_and_fwhm() {
        let x = grid(801, -10.0, 10.0);
        let v: Vec<f64> = x.iter().map(|x| somb_unchecked(*x).powi(2)).collect();
        let z = first_minimum(&x, &v).unwrap();
        assert!((z - 3.8317).abs() < 1e-3, "{z}");
        let w = fwhm(&x, &v).unwrap();
        assert!((w - 2.0 * 1.6163).abs() < 1e-2, "{w}");
    }

    #[test]
    fn widths_and_lobes_of_bars() {
        let x = grid(81, -4.0, 4.0);
        let v: Vec<f64> = x
            .iter()
            .map(|x| if (x.abs() - 2.0).abs() <= 0.5 { 1.0 } else { 0.0 })
            .collect();
        let w = outer_width(&x, &v, 0.5).unwrap();
        assert!((w - 5.1).abs() < 1e-9, "{w}");
        let l = lobes(&x, &v, 0.5);
        assert_eq!(l.len(), 2);
        assert!((lobe_separation(&x, &v, 0.5).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn visibility_and_distances() {
        assert!((visibility(&[1.0, 2.0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(visibility(&[0.0, 0.0]), 0.0);
        assert_eq!(rms_difference(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        let r = vec![0.0, 0.5, 1.0, 0.25];
        let e: Vec<f64> = r.iter().map(|v| 3.0 * v + 0.2).collect();
        let (g, o) = affine_fit(&r, &e);
        assert!((g - 3.0).abs() < 1e-12 && (o - 0.2).abs() < 1e-12);
        assert!(affine_fit_rms(&r, &e) < 1e-12);
    }
}
