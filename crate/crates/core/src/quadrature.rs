//! Integration rules and the oscillatory sampling planner.
//!
//! Every integral in the crate runs over an aperture whose integrand phase
//! varies at a bounded rate (rad/m). Adjacent samples must differ in phase by
//! less than π, so an interval of length `L` needs at least `L·rate/π`
//! samples. [`Points::Auto`] oversamples that minimum; an explicit
//! [`Points::Fixed`] below it is refused with [`Error::UnderSampled`].

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ApertureMask, Dim, Region, Vec2};

pub const MIN_POINTS: usize = 8;
/// [`Points::Auto`] multiple of the minimum count, per rule. The midpoint
/// rule's error falls only quadratically with step, so it gets more.
pub const AUTO_OVERSAMPLING: usize = 4;
pub const AUTO_OVERSAMPLING_MIDPOINT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    Midpoint,
    /// Composite 8-point Gauss-Legendre panels.
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Points {
    #[default]
    Auto,
    /// Points per axis of every mask primitive.
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub points: Points,
}

impl QuadratureSpec {
    pub fn new(rule: Rule, points: Points) -> Self {
        QuadratureSpec { rule, points }
    }

    pub fn fixed(rule: Rule, n: usize) -> Self {
        QuadratureSpec {
            rule,
            points: Points::Fixed(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.points {
            Points::Fixed(n) if n < MIN_POINTS => Err(Error::invalid(
                "points_per_axis",
                alloc::format!("must be ≥ {MIN_POINTS}, got {n}"),
            )),
            _ => Ok(()),
        }
    }

    /// Point count for one axis of length `span` with phase rate `rate`.
    pub fn resolve(&self, span: f64, rate: f64, context: &'static str) -> Result<usize> {
        self.validate()?;
        let required = required_points(span, rate);
        match self.points {
            Points::Auto => Ok(required
                * match self.rule {
                    Rule::Midpoint => AUTO_OVERSAMPLING_MIDPOINT,
                    Rule::GaussLegendre => AUTO_OVERSAMPLING,
                }),
            Points::Fixed(n) if n < required => Err(Error::UnderSampled {
                context,
                requested: n,
                required,
            }),
            Points::Fixed(n) => Ok(n),
        }
    }
}

/// `max(8, ⌈span·rate/π⌉)`: the fewest samples keeping adjacent phase
/// differences below π.
pub fn required_points(span: f64, rate: f64) -> usize {
    let n = libm::ceil(span.abs() * rate.abs() / PI);
    if n.is_finite() && n > MIN_POINTS as f64 {
        n as usize
    } else {
        MIN_POINTS
    }
}

/// Phase rate bound `constant + per_radius·|ρ|max`, in rad/m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRate {
    pub constant: f64,
    pub per_radius: f64,
}

impl PhaseRate {
    pub fn at(&self, radius: f64) -> f64 {
        self.constant + self.per_radius * radius
    }
}

/// An integral value with a Richardson-style error estimate
/// `|I(n) − I(n/2)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error_estimate: f64,
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes and weights for ∫ₐᵇ with `n` points (rounded up to whole panels for
/// Gauss-Legendre).
pub fn rule_nodes(rule: Rule, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n.max(1);
    match rule {
        Rule::Midpoint => {
            let h = (b - a) / n as f64;
            let x = (0..n).map(|k| a + (k as f64 + 0.5) * h).collect();
            (x, alloc::vec![h; n])
        }
        Rule::GaussLegendre => {
            let panels = n.div_ceil(8);
            let h = (b - a) / panels as f64;
            let mut x = Vec::with_capacity(panels * 8);
            let mut w = Vec::with_capacity(panels * 8);
            for p in 0..panels {
                let mid = a + (p as f64 + 0.5) * h;
                for k in 0..4 {
                    for s in [-1.0, 1.0] {
                        x.push(mid + s * 0.5 * h * GL8_X[k]);
                        w.push(0.5 * h * GL8_W[k]);
                    }
                }
            }
            (x, w)
        }
    }
}

/// Weighted sample points covering a mask's support.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Nodes {
    pub points: Vec<Vec2>,
    /// Quadrature weight (length or area element).
    pub weights: Vec<f64>,
    /// Mask transmission A at each point.
    pub transmission: Vec<f64>,
}

impl Nodes {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn push(&mut self, p: Vec2, w: f64, t: f64) {
        self.points.push(p);
        self.weights.push(w);
        self.transmission.push(t);
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Piece {
    Segment { a: f64, b: f64, t: f64, n: usize },
    Rect { region: Region, nx: usize, ny: usize },
    Disk { region: Region, nr: usize, nt: usize },
}

/// Resolved per-primitive point counts for one mask.
#[derive(Clone, Debug, PartialEq)]
pub struct NodePlan {
    rule: Rule,
    pieces: Vec<Piece>,
}

impl NodePlan {
    /// Plans quadrature over `mask` in `dim` dimensions under `rate`.
    pub fn new(
        mask: &ApertureMask,
        dim: Dim,
        spec: &QuadratureSpec,
        rate: PhaseRate,
        context: &'static str,
    ) -> Result<Self> {
        let mut pieces = Vec::new();
        match dim {
            Dim::One => {
                for s in mask.segments_1d() {
                    let r = rate.at(s.a.abs().max(s.b.abs()));
                    let n = spec.resolve(s.len(), r, context)?;
                    pieces.push(Piece::Segment {
                        a: s.a,
                        b: s.b,
                        t: s.transmission,
                        n,
                    });
                }
            }
            Dim::Two => {
                for region in mask.regions_2d()? {
                    let r = rate.at(region.max_radius());
                    match region {
                        Region::Rect { x, y, .. } => {
                            let nx = spec.resolve(x.1 - x.0, r, context)?;
                            let ny = spec.resolve(y.1 - y.0, r, context)?;
                            pieces.push(Piece::Rect { region, nx, ny });
                        }
                        Region::Disk { radius, .. } => {
                            let nr = spec.resolve(radius, r, context)?;
                            let nt = spec.resolve(2.0 * PI * radius, r, context)?;
                            pieces.push(Piece::Disk { region, nr, nt });
                        }
                    }
                }
            }
        }
        Ok(NodePlan {
            rule: spec.rule,
            pieces,
        })
    }

    /// The same plan with every count halved (floored at the minimum), used
    /// for error estimates.
    pub fn halved(&self) -> NodePlan {
        let h = |n: usize| (n / 2).max(MIN_POINTS);
        let pieces = self
            .pieces
            .iter()
            .map(|p| match *p {
                Piece::Segment { a, b, t, n } => Piece::Segment { a, b, t, n: h(n) },
                Piece::Rect { region, nx, ny } => Piece::Rect {
                    region,
                    nx: h(nx),
                    ny: h(ny),
                },
                Piece::Disk { region, nr, nt } => Piece::Disk {
                    region,
                    nr: h(nr),
                    nt: h(nt),
                },
            })
            .collect();
        NodePlan {
            rule: self.rule,
            pieces,
        }
    }

    /// The same plan with every count doubled.
    pub fn doubled(&self) -> NodePlan {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match *p {
                Piece::Segment { a, b, t, n } => Piece::Segment { a, b, t, n: 2 * n },
                Piece::Rect { region, nx, ny } => Piece::Rect {
                    region,
                    nx: 2 * nx,
                    ny: 2 * ny,
                },
                Piece::Disk { region, nr, nt } => Piece::Disk {
                    region,
                    nr: 2 * nr,
                    nt: 2 * nt,
                },
            })
            .collect();
        NodePlan {
            rule: self.rule,
            pieces,
        }
    }

    pub fn nodes(&self) -> Nodes {
        let mut out = Nodes::default();
        for piece in &self.pieces {
            match *piece {
                Piece::Segment { a, b, t, n } => {
                    let (x, w) = rule_nodes(self.rule, a, b, n);
                    for (x, w) in x.into_iter().zip(w) {
                        out.push([x, 0.0], w, t);
                    }
                }
                Piece::Rect { region, nx, ny } => {
                    let Region::Rect { x, y, transmission } = region else {
                        unreachable!()
                    };
                    let (xs, wx) = rule_nodes(self.rule, x.0, x.1, nx);
                    let (ys, wy) = rule_nodes(self.rule, y.0, y.1, ny);
                    for (yv, wyv) in ys.iter().zip(&wy) {
                        for (xv, wxv) in xs.iter().zip(&wx) {
                            out.push([*xv, *yv], wxv * wyv, transmission);
                        }
                    }
                }
                Piece::Disk { region, nr, nt } => {
                    let Region::Disk {
                        center,
                        radius,
                        transmission,
                    } = region
                    else {
                        unreachable!()
                    };
                    let (rs, wr) = rule_nodes(self.rule, 0.0, radius, nr);
                    let dt = 2.0 * PI / nt as f64;
                    for (r, w) in rs.iter().zip(&wr) {
                        for k in 0..nt {
                            let (s, c) = libm::sincos((k as f64 + 0.5) * dt);
                            out.push(
                                [center[0] + r * c, center[1] + r * s],
                                w * r * dt,
                                transmission,
                            );
                        }
                    }
                }
            }
        }
        out
    }
}
