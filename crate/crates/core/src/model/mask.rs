use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::Vec2;
use crate::error::{require_finite, require_positive, Error, Result};

/// Real transmission function A(ρ) ∈ [0, 1] on the object or source plane.
///
/// Slits and bars are strips along y. In two dimensions they need a finite
/// `length`; one-dimensional scenarios only look at the `y = 0` line.
#[derive(Clone, Debug, PartialEq)]
pub enum ApertureMask {
    /// Two slits of full width `width` centered at ±`separation`/2.
    DoubleSlit {
        separation: f64,
        width: f64,
        length: Option<f64>,
    },
    Disk { center: Vec2, radius: f64 },
    /// Open x-intervals `[a, b]`.
    Bars {
        intervals: Vec<(f64, f64)>,
        length: Option<f64>,
    },
    Bitmap(BitmapMask),
    /// Union of non-overlapping masks.
    Composite(Vec<ApertureMask>),
}

/// A piece of the 1-D support with constant transmission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub transmission: f64,
}

impl Segment {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b <= self.a
    }
}

/// A piece of the 2-D support with constant transmission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Rect {
        x: (f64, f64),
        y: (f64, f64),
        transmission: f64,
    },
    Disk {
        center: Vec2,
        radius: f64,
        transmission: f64,
    },
}

impl Region {
    pub fn transmission(&self) -> f64 {
        match *self {
            Region::Rect { transmission, .. } | Region::Disk { transmission, .. } => transmission,
        }
    }

    /// Largest |ρ| inside the region.
    pub fn max_radius(&self) -> f64 {
        match *self {
            Region::Rect { x, y, .. } => libm::hypot(
                x.0.abs().max(x.1.abs()),
                y.0.abs().max(y.1.abs()),
            ),
            Region::Disk { center, radius, .. } => libm::hypot(center[0], center[1]) + radius,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rect { x, y, .. } => (x.1 - x.0) * (y.1 - y.0),
            Region::Disk { radius, .. } => core::f64::consts::PI * radius * radius,
        }
    }
}

/// 8-bit grayscale transmission map, centered on the optical axis.
///
/// Row 0 is the top (largest y). Pixel `(i, j)` covers the cell centered at
/// `x = (i + ½ − w/2)·pitch`, `y = (h/2 − j − ½)·pitch`; lookups use the
/// nearest sample and return 0 outside the recorded area.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitmapMask {
    width: usize,
    height: usize,
    pitch_bits: u64,
    data: Vec<u8>,
}

impl BitmapMask {
    pub fn new(width: usize, height: usize, pitch: f64, data: Vec<u8>) -> Result<Self> {
        require_positive("bitmap pitch", pitch)?;
        if width == 0 || height == 0 {
            return Err(Error::invalid("bitmap", "empty image"));
        }
        if data.len() != width * height {
            return Err(Error::invalid(
                "bitmap",
                format!("expected {} samples, got {}", width * height, data.len()),
            ));
        }
        Ok(BitmapMask {
            width,
            height,
            pitch_bits: pitch.to_bits(),
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pitch(&self) -> f64 {
        f64::from_bits(self.pitch_bits)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Transmission of pixel `(i, j)`.
    pub fn sample(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.width + i] as f64 / 255.0
    }

    fn column_of(&self, x: f64) -> Option<usize> {
        let u = libm::floor(x / self.pitch() + 0.5 * self.width as f64);
        (u >= 0.0 && u < self.width as f64).then_some(u as usize)
    }

    fn row_of(&self, y: f64) -> Option<usize> {
        let v = libm::floor(0.5 * self.height as f64 - y / self.pitch());
        (v >= 0.0 && v < self.height as f64).then_some(v as usize)
    }

    fn column_edge(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * self.width as f64) * self.pitch()
    }

    fn row_edge(&self, j: usize) -> f64 {
        (0.5 * self.height as f64 - j as f64) * self.pitch()
    }

    fn transmission(&self, rho: Vec2) -> f64 {
        match (self.column_of(rho[0]), self.row_of(rho[1])) {
            (Some(i), Some(j)) => self.sample(i, j),
            _ => 0.0,
        }
    }

    /// Runs of equal non-zero value along row `j`.
    fn row_runs(&self, j: usize) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.width {
            let v = self.data[j * self.width + i];
            let start = i;
            while i < self.width && self.data[j * self.width + i] == v {
                i += 1;
            }
            if v != 0 {
                out.push(Segment {
                    a: self.column_edge(start),
                    b: self.column_edge(i),
                    transmission: v as f64 / 255.0,
                });
            }
        }
        out
    }
}

impl ApertureMask {
    /// Convenience constructor for a point-like disk.
    pub fn disk(center: Vec2, radius: f64) -> Self {
        ApertureMask::Disk { center, radius }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ApertureMask::DoubleSlit {
                separation,
                width,
                length,
            } => {
                require_positive("slit separation", *separation)?;
                require_positive("slit width", *width)?;
                if width >= separation {
                    return Err(Error::invalid("slit width", "slits overlap (width ≥ separation)"));
                }
                if let Some(l) = length {
                    require_positive("slit length", *l)?;
                }
            }
            ApertureMask::Disk { center, radius } => {
                require_finite("disk center", center[0])?;
                require_finite("disk center", center[1])?;
                require_positive("disk radius", *radius)?;
            }
            ApertureMask::Bars { intervals, length } => {
                for &(a, b) in intervals {
                    require_finite("bar edge", a)?;
                    require_finite("bar edge", b)?;
                    if !(b > a) {
                        return Err(Error::invalid("bar", format!("empty interval [{a}, {b}]")));
                    }
                }
                if let Some(l) = length {
                    require_positive("bar length", *l)?;
                }
            }
            ApertureMask::Bitmap(_) => {}
            ApertureMask::Composite(parts) => {
                for p in parts {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// A(ρ). Non-finite positions are rejected.
    pub fn transmission(&self, rho: Vec2) -> Result<f64> {
        require_finite("rho", rho[0])?;
        require_finite("rho", rho[1])?;
        Ok(self.transmission_at(rho))
    }

    pub(crate) fn transmission_at(&self, rho: Vec2) -> f64 {
        let within_length = |length: &Option<f64>| match length {
            Some(l) => rho[1].abs() <= 0.5 * l,
            None => true,
        };
        match self {
            ApertureMask::DoubleSlit {
                separation,
                width,
                length,
            } => {
                let inside = (rho[0].abs() - 0.5 * separation).abs() <= 0.5 * width;
                if inside && within_length(length) {
                    1.0
                } else {
                    0.0
                }
            }
            ApertureMask::Disk { center, radius } => {
                let dx = rho[0] - center[0];
                let dy = rho[1] - center[1];
                if dx * dx + dy * dy <= radius * radius {
                    1.0
                } else {
                    0.0
                }
            }
            ApertureMask::Bars { intervals, length } => {
                let inside = intervals.iter().any(|&(a, b)| rho[0] >= a && rho[0] <= b);
                if inside && within_length(length) {
                    1.0
                } else {
                    0.0
                }
            }
            ApertureMask::Bitmap(bm) => bm.transmission(rho),
            ApertureMask::Composite(parts) => parts
                .iter()
                .map(|p| p.transmission_at(rho))
                .fold(0.0, f64::max),
        }
    }

    /// Support on the `y = 0` line as constant-transmission segments, sorted.
    pub fn segments_1d(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        self.push_segments(&mut out);
        out.retain(|s| !s.is_empty() && s.transmission > 0.0);
        out.sort_by(|p, q| p.a.total_cmp(&q.a));
        out
    }

    fn push_segments(&self, out: &mut Vec<Segment>) {
        let full = |a, b| Segment {
            a,
            b,
            transmission: 1.0,
        };
        match self {
            ApertureMask::DoubleSlit {
                separation, width, ..
            } => {
                let (c, h) = (0.5 * separation, 0.5 * width);
                out.push(full(-c - h, -c + h));
                out.push(full(c - h, c + h));
            }
            ApertureMask::Disk { center, radius } => {
                if center[1].abs() < *radius {
                    let h = libm::sqrt(radius * radius - center[1] * center[1]);
                    out.push(full(center[0] - h, center[0] + h));
                }
            }
            ApertureMask::Bars { intervals, .. } => {
                out.extend(intervals.iter().map(|&(a, b)| full(a, b)));
            }
            ApertureMask::Bitmap(bm) => {
                if let Some(j) = bm.row_of(0.0) {
                    out.extend(bm.row_runs(j));
                }
            }
            ApertureMask::Composite(parts) => {
                for p in parts {
                    p.push_segments(out);
                }
            }
        }
    }

    /// Support in the plane as constant-transmission regions.
    pub fn regions_2d(&self) -> Result<Vec<Region>> {
        let mut out = Vec::new();
        self.push_regions(&mut out)?;
        Ok(out)
    }

    fn push_regions(&self, out: &mut Vec<Region>) -> Result<()> {
        let need_length = |length: &Option<f64>, what: &str| {
            length.ok_or_else(|| {
                Error::Unsupported(format!("{what} needs a finite `length` in two dimensions"))
            })
        };
        match self {
            ApertureMask::DoubleSlit { length, .. } | ApertureMask::Bars { length, .. } => {
                let l = need_length(length, if matches!(self, ApertureMask::Bars { .. }) {
                    "bars mask"
                } else {
                    "double slit"
                })?;
                for s in self.segments_1d() {
                    out.push(Region::Rect {
                        x: (s.a, s.b),
                        y: (-0.5 * l, 0.5 * l),
                        transmission: 1.0,
                    });
                }
            }
            ApertureMask::Disk { center, radius } => out.push(Region::Disk {
                center: *center,
                radius: *radius,
                transmission: 1.0,
            }),
            ApertureMask::Bitmap(bm) => {
                for j in 0..bm.height {
                    let y = (bm.row_edge(j + 1), bm.row_edge(j));
                    for s in bm.row_runs(j) {
                        out.push(Region::Rect {
                            x: (s.a, s.b),
                            y,
                            transmission: s.transmission,
                        });
                    }
                }
            }
            ApertureMask::Composite(parts) => {
                for p in parts {
                    p.push_regions(out)?;
                }
            }
        }
        Ok(())
    }

    /// ∫ A(x, 0) dx.
    pub fn line_integral(&self) -> f64 {
        self.segments_1d().iter().map(|s| s.len() * s.transmission).sum()
    }

    /// Short human-readable identifier.
    pub fn label(&self) -> String {
        match self {
            ApertureMask::DoubleSlit {
                separation, width, ..
            } => format!("double-slit(d={separation:e},a={width:e})"),
            ApertureMask::Disk { center, radius } => {
                format!("disk(c=[{:e},{:e}],r={radius:e})", center[0], center[1])
            }
            ApertureMask::Bars { intervals, .. } => format!("bars(n={})", intervals.len()),
            ApertureMask::Bitmap(bm) => {
                format!("bitmap({}x{},pitch={:e})", bm.width, bm.height, bm.pitch())
            }
            ApertureMask::Composite(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("union({})", inner.join(","))
            }
        }
    }
}

impl From<BitmapMask> for ApertureMask {
    fn from(bm: BitmapMask) -> Self {
        ApertureMask::Bitmap(bm)
    }
}

impl From<Vec<ApertureMask>> for ApertureMask {
    fn from(parts: Vec<ApertureMask>) -> Self {
        ApertureMask::Composite(parts)
    }
}
