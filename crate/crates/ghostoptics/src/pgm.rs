//! Binary PGM (P5, 8-bit).

use std::path::Path;

use ghostoptics_core::model::BitmapMask;

use crate::error::{Result, RunError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gray {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

pub fn encode(img: &Gray) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn decode(bytes: &[u8], origin: &Path) -> Result<Gray> {
    let bad = |m: &str| RunError::format(origin, m);
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("only binary P5 graymaps are supported"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (width, height, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must be 1..=255"));
    }
    pos += 1;
    let n = width * height;
    if bytes.len() < pos + n {
        return Err(bad("pixel data shorter than header declares"));
    }
    let data = bytes[pos..pos + n]
        .iter()
        .map(|&v| if maxval == 255 { v } else { ((v as usize * 255 + maxval / 2) / maxval) as u8 })
        .collect();
    Ok(Gray { width, height, data })
}

pub fn write(path: &Path, img: &Gray) -> Result<()> {
    std::fs::write(path, encode(img)).map_err(|e| RunError::io(path, e))
}

pub fn read(path: &Path) -> Result<Gray> {
    let bytes = std::fs::read(path).map_err(|e| RunError::io(path, e))?;
    decode(&bytes, path)
}

/// Linear map of `values` onto 0..=255; returns the image with the min and
/// max that map to 0 and 255.
pub fn heatmap(width: usize, height: usize, values: &[f64]) -> (Gray, f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let data = values
        .iter()
        .map(|v| if span > 0.0 { ((v - lo) / span * 255.0).round() as u8 } else { 0 })
        .collect();
    (Gray { width, height, data }, lo, hi)
}

pub fn read_mask(path: &Path, pitch: f64) -> Result<BitmapMask> {
    let g = read(path)?;
    BitmapMask::new(g.width, g.height, pitch, g.data).map_err(|e| RunError::format(path, e.to_string()))
}

pub fn write_mask(path: &Path, mask: &BitmapMask) -> Result<()> {
    write(
        path,
        &Gray {
            width: mask.width(),
            height: mask.height(),
            data: mask.data().to_vec(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_comments_and_maxval_are_handled() {
        let mut bytes = b"P5\n# made by hand\n2 1\n15\n".to_vec();
        bytes.extend_from_slice(&[0, 15]);
        let g = decode(&bytes, Path::new("x.pgm")).unwrap();
        assert_eq!(g.data, vec![0, 255]);
        assert!(decode(b"P2\n1 1\n255\n0", Path::new("x")).is_err());
        assert!(decode(b"P5\n4 4\n255\n\x00", Path::new("x")).is_err());
    }

    #[test]
    fn heatmap_spans_full_range() {
        let (g, lo, hi) = heatmap(3, 1, &[2.0, 3.0, 4.0]);
        assert_eq!(g.data, vec![0, 128, 255]);
        assert_eq!((lo, hi), (2.0, 4.0));
        assert_eq!(heatmap(2, 1, &[1.0, 1.0]).0.data, vec![0, 0]);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let data: Vec<u8> = (0..w * h).map(|k| (seed.rotate_left(k as u32 % 64) as u8) ^ k as u8).collect();
            let g = Gray { width: w, height: h, data };
            prop_assert_eq!(decode(&encode(&g), Path::new("t")).unwrap(), g);
        }
    }
}
