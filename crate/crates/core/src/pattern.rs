//! Finite point patterns with exact coordinates.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{Cyclo, CycloOrder};
use crate::error::{Error, Result};
use crate::spatial::GridIndex;

/// Quantization step for patterns without an exact coordinate ring.
pub const FLOAT_KEY_STEP: f64 = 1e-9;

/// Coordinate ring in which point positions are known exactly.
///
/// Every point carries an integer key; differences of keys are exact
/// translation vectors in the ring, which is what patch comparison and
/// module reduction work with.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Frame {
    /// No exact ring: keys are coordinates rounded to [`FLOAT_KEY_STEP`].
    Float { dim: usize },
    /// `Z^d` (d ≤ 2) with unit spacing.
    Integer { dim: usize },
    /// `Z[τ] ⊂ R`: key `(m, n)` is the number `m + nτ`.
    Golden,
    /// `Z[ζ_n] ⊂ C` with positions `scale · Σ c_k ζ^k`.
    Cyclo { order: CycloOrder, scale: f64 },
}

impl Frame {
    pub fn dim(&self) -> usize {
        match self {
            Frame::Float { dim } | Frame::Integer { dim } => *dim,
            Frame::Golden => 1,
            Frame::Cyclo { .. } => 2,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Frame::Float { .. })
    }

    /// Physical position of an exact key (origin at key zero).
    pub fn position(&self, key: &Key) -> [f64; 2] {
        match self {
            Frame::Float { .. } => [key[0] as f64 * FLOAT_KEY_STEP, key[1] as f64 * FLOAT_KEY_STEP],
            Frame::Integer { .. } => [key[0] as f64, key[1] as f64],
            Frame::Golden => [key[0] as f64 + key[1] as f64 * crate::TAU, 0.0],
            Frame::Cyclo { order, scale } => {
                let (x, y) = Cyclo::new(*order, *key).to_complex();
                [x * scale, y * scale]
            }
        }
    }

    pub fn float_key(pos: [f64; 2]) -> Key {
        [(pos[0] / FLOAT_KEY_STEP).round() as i64, (pos[1] / FLOAT_KEY_STEP).round() as i64, 0, 0]
    }
}

/// Exact coordinates in the pattern's [`Frame`], zero-padded to 4 entries.
pub type Key = [i64; 4];

pub fn key_sub(a: &Key, b: &Key) -> Key {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn key_add(a: &Key, b: &Key) -> Key {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Interval { lo: f64, hi: f64 },
    Box { lo: [f64; 2], hi: [f64; 2] },
    Ball { center: [f64; 2], radius: f64 },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi }
    }

    pub fn square(half: f64) -> Self {
        Region::Box { lo: [-half, -half], hi: [half, half] }
    }

    pub fn ball(radius: f64) -> Self {
        Region::Ball { center: [0.0, 0.0], radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Region::Interval { lo, hi } => p[0] >= *lo && p[0] <= *hi,
            Region::Box { lo, hi } => p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1],
            Region::Ball { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= radius * radius
            }
        }
    }

    /// Length or area.
    pub fn volume(&self) -> f64 {
        match self {
            Region::Interval { lo, hi } => (hi - lo).max(0.0),
            Region::Box { lo, hi } => ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(0.0),
            Region::Ball { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    /// Region shrunk by `r` on every side, or `None` if nothing is left.
    pub fn shrink(&self, r: f64) -> Option<Region> {
        let out = match self {
            Region::Interval { lo, hi } => Region::Interval { lo: lo + r, hi: hi - r },
            Region::Box { lo, hi } => Region::Box { lo: [lo[0] + r, lo[1] + r], hi: [hi[0] - r, hi[1] - r] },
            Region::Ball { center, radius } => Region::Ball { center: *center, radius: radius - r },
        };
        let ok = match &out {
            Region::Interval { lo, hi } => lo < hi,
            Region::Box { lo, hi } => lo[0] < hi[0] && lo[1] < hi[1],
            Region::Ball { radius, .. } => *radius > 0.0,
        };
        ok.then_some(out)
    }

    pub fn translate(&self, v: [f64; 2]) -> Region {
        match self {
            Region::Interval { lo, hi } => Region::Interval { lo: lo + v[0], hi: hi + v[0] },
            Region::Box { lo, hi } => {
                Region::Box { lo: [lo[0] + v[0], lo[1] + v[1]], hi: [hi[0] + v[0], hi[1] + v[1]] }
            }
            Region::Ball { center, radius } => {
                Region::Ball { center: [center[0] + v[0], center[1] + v[1]], radius: *radius }
            }
        }
    }

    /// Axis-aligned bounds `(lo, hi)`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Region::Interval { lo, hi } => ([*lo, 0.0], [*hi, 0.0]),
            Region::Box { lo, hi } => (*lo, *hi),
            Region::Ball { center, radius } => {
                ([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius])
            }
        }
    }

    /// Largest distance between two points of the region.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub pos: [f64; 2],
    pub key: Key,
    /// Marker distinguishing decorated points (tile type, orientation).
    /// Plain point sets use 0.
    pub label: u32,
    /// Embedding-lattice preimage, empty for free-form patterns.
    pub preimage: Vec<i64>,
}

/// A finite, uniformly discrete point configuration.
#[derive(Clone, Debug)]
pub struct Pattern {
    frame: Frame,
    points: Vec<Point>,
    region: Region,
    tag: String,
    singular: bool,
    min_distance: f64,
}

impl Pattern {
    /// Validates uniform discreteness: distinct points with equal labels
    /// must be at positive distance.
    pub fn new(frame: Frame, mut points: Vec<Point>, region: Region, tag: impl Into<String>) -> Result<Self> {
        if frame.dim() != region.dim() {
            return Err(Error::invalid(format!(
                "frame dimension {} does not match region dimension {}",
                frame.dim(),
                region.dim()
            )));
        }
        sort_points(&mut points);
        let min_distance = min_separation(&points);
        if points.len() > 1 && min_distance <= 0.0 {
            return Err(Error::invalid("pattern is not uniformly discrete (coincident points)"));
        }
        Ok(Pattern { frame, points, region, tag: tag.into(), singular: false, min_distance })
    }

    /// Free-form pattern from float coordinates.
    pub fn from_positions(positions: &[[f64; 2]], region: Region) -> Result<Self> {
        let dim = region.dim();
        let points = positions
            .iter()
            .map(|&pos| Point { pos, key: Frame::float_key(pos), label: 0, preimage: Vec::new() })
            .collect();
        Pattern::new(Frame::Float { dim }, points, region, "free-form")
    }

    /// Pattern of integer points (`Z` or `Z²` subsets).
    pub fn from_integer_points(coords: &[[i64; 2]], region: Region) -> Result<Self> {
        let dim = region.dim();
        let points = coords
            .iter()
            .map(|c| Point {
                pos: [c[0] as f64, c[1] as f64],
                key: [c[0], c[1], 0, 0],
                label: 0,
                preimage: if dim == 1 { vec![c[0]] } else { vec![c[0], c[1]] },
            })
            .collect();
        Pattern::new(Frame::Integer { dim }, points, region, "integer-lattice")
    }

    /// All points of `Z^dim` inside the region.
    pub fn integer_lattice(region: Region) -> Result<Self> {
        let (lo, hi) = region.bounds();
        let dim = region.dim();
        let mut coords = Vec::new();
        let ys = if dim == 1 { 0..=0 } else { (lo[1].ceil() as i64)..=(hi[1].floor() as i64) };
        for y in ys {
            for x in (lo[0].ceil() as i64)..=(hi[0].floor() as i64) {
                if region.contains([x as f64, y as f64]) {
                    coords.push([x, y]);
                }
            }
        }
        Pattern::from_integer_points(&coords, region)
    }

    pub(crate) fn with_singular(mut self, singular: bool) -> Self {
        self.singular = singular;
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Set when generated from a singular torus parameter.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.region.volume()
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| p.pos).collect()
    }

    /// Restrict to points inside `region`.
    pub fn restrict(&self, region: Region) -> Pattern {
        let points = self.points.iter().filter(|p| region.contains(p.pos)).cloned().collect();
        Pattern { points, region, ..self.clone() }
    }

    /// Translate by an exact key difference; float positions follow the frame.
    pub fn translate_exact(&self, by: &Key) -> Pattern {
        let v = self.frame.position(by);
        let points = self
            .points
            .iter()
            .map(|p| Point {
                pos: [p.pos[0] + v[0], p.pos[1] + v[1]],
                key: key_add(&p.key, by),
                ..p.clone()
            })
            .collect();
        Pattern { points, region: self.region.translate(v), ..self.clone() }
    }

    /// Replace frame and keys wholesale (used after exact rotations).
    pub(crate) fn remapped(&self, frame: Frame, points: Vec<Point>, region: Region) -> Pattern {
        let mut points = points;
        sort_points(&mut points);
        Pattern { frame, points, region, ..self.clone() }
    }

    /// Delimited text: one point per line, coordinates then preimage.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let d = self.dim();
        let n = self.points.first().map_or(0, |p| p.preimage.len());
        let mut header: Vec<String> = ["x", "y"][..d].iter().map(|s| s.to_string()).collect();
        header.extend((0..n).map(|j| format!("n{j}")));
        header.push("label".into());
        writeln!(out, "{}", header.join(",")).unwrap();
        for p in &self.points {
            let mut fields: Vec<String> = p.pos[..d].iter().map(|v| fmt_num(*v)).collect();
            fields.extend(p.preimage.iter().map(|v| v.to_string()));
            fields.push(p.label.to_string());
            writeln!(out, "{}", fields.join(",")).unwrap();
        }
        out
    }
}

/// Fixed 12-significant-digit number format used by all text outputs.
pub fn fmt_num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Deterministic order: by physical coordinates, ties by key then label.
fn sort_points(points: &mut [Point]) {
    points.sort_by(|a, b| {
        a.pos[0]
            .total_cmp(&b.pos[0])
            .then(a.pos[1].total_cmp(&b.pos[1]))
            .then(a.key.cmp(&b.key))
            .then(a.label.cmp(&b.label))
    });
}

/// Smallest distance between two points sharing a label; ∞ if none.
fn min_separation(points: &[Point]) -> f64 {
    if points.len() < 2 {
        return f64::INFINITY;
    }
    let positions: Vec<[f64; 2]> = points.iter().map(|p| p.pos).collect();
    let (lo, hi) = bounds_of(&positions);
    let area_side = ((hi[0] - lo[0]).max(hi[1] - lo[1])).max(1e-12);
    let cell = (area_side / (points.len() as f64).sqrt()).max(1e-9);
    let index = GridIndex::new(&positions, cell);
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        index.for_each_within(p.pos, cell, |j, d| {
            if j > i && points[j].label == p.label && d < best {
                best = d;
            }
        });
    }
    if best.is_infinite() {
        // no pair closer than one cell; a coarse global bound is enough
        best = cell;
    }
    best
}

pub(crate) fn bounds_of(pos: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pos {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_points_rejected() {
        let r = Region::square(2.0);
        assert!(Pattern::from_positions(&[[0.0, 0.0], [0.0, 0.0]], r.clone()).is_err());
        let p = Pattern::from_positions(&[[0.0, 0.0], [0.5, 0.0], [1.5, 1.0]], r).unwrap();
        assert!((p.min_distance() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn integer_lattice_counts() {
        let p = Pattern::integer_lattice(Region::Box { lo: [0.0, 0.0], hi: [3.0, 2.0] }).unwrap();
        assert_eq!(p.len(), 12);
        let c = Pattern::integer_lattice(Region::interval(0.0, 9.5)).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.frame(), &Frame::Integer { dim: 1 });
    }

    #[test]
    fn region_shrink() {
        assert!(Region::interval(0.0, 1.0).shrink(0.6).is_none());
        assert_eq!(Region::interval(0.0, 10.0).shrink(1.0), Some(Region::interval(1.0, 9.0)));
        assert!(Region::ball(1.0).shrink(2.0).is_none());
    }

    #[test]
    fn csv_format_is_fixed() {
        let p = Pattern::from_integer_points(&[[1, 0], [3, 0]], Region::interval(0.0, 4.0)).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "x,n0,label");
        assert_eq!(csv.lines().nth(1).unwrap(), "1.00000000000e0,1,0");
    }
}
