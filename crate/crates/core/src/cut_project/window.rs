//! Acceptance domains with exact boundaries.
//!
//! Exact values are coefficient arrays: `[a, b, ..]` means `a + bτ` for
//! intervals and `Σ c_k ζ^k` for polygons. Membership is half-open:
//! `[lo, hi)` for intervals, and for polygons a boundary point belongs to
//! the window iff a tiny push in direction `(1, δ)` moves it inside
//! (bottom and left edges closed, top and right open).

use serde::{Deserialize, Serialize};

use crate::algebra::cyclo::quad_sign;
use crate::algebra::{Cyclo, CycloOrder};
use crate::error::{Error, Result};
use crate::TAU;

/// Float decisions farther than this from the boundary are trusted.
pub(crate) const FLOAT_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Window {
    /// `[lo, hi)` with endpoints in `Z[τ]`; `lo == hi` is the empty window.
    Interval { lo: [i64; 2], hi: [i64; 2] },
    /// Convex polygon, counterclockwise, vertices in `Z[ζ_n]`, physical
    /// coordinates multiplied by `scale`.
    Polygon { order: CycloOrder, vertices: Vec<Cyclo>, scale: f64 },
}

pub(crate) fn golden_f64(v: [i64; 2]) -> f64 {
    v[0] as f64 + v[1] as f64 * TAU
}

fn golden_sign(v: [i64; 2]) -> i32 {
    quad_sign(v, 1, 1)
}

fn cyclo_cmp(a: &Cyclo, b: &Cyclo) -> std::cmp::Ordering {
    let d = *a - *b;
    d.re_sign().cmp(&0).then(d.im_sign().cmp(&0))
}

impl Window {
    pub fn interval(lo: [i64; 2], hi: [i64; 2]) -> Result<Self> {
        if golden_sign([hi[0] - lo[0], hi[1] - lo[1]]) < 0 {
            return Err(Error::invalid("interval window needs lo ≤ hi"));
        }
        Ok(Window::Interval { lo, hi })
    }

    /// Validated polygon: at least three vertices, strictly convex, CCW.
    pub fn polygon(order: CycloOrder, vertices: Vec<Cyclo>, scale: f64) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::invalid("polygon window needs at least 3 vertices"));
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if (b - a).cross_sign(c - b) <= 0 {
                return Err(Error::invalid("polygon window must be strictly convex and counterclockwise"));
            }
        }
        Ok(Window::Polygon { order, vertices, scale })
    }

    /// Exact convex hull of ring points.
    pub fn hull(order: CycloOrder, points: &[Cyclo], scale: f64) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(cyclo_cmp);
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::invalid("hull of fewer than 3 distinct points"));
        }
        let turn = |o: Cyclo, a: Cyclo, b: Cyclo| (a - o).cross_sign(b - o);
        let mut lower: Vec<Cyclo> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Cyclo> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Window::polygon(order, lower, scale)
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Interval { .. } => 1,
            Window::Polygon { .. } => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Window::Interval { lo, hi } if lo == hi)
    }

    /// Vertices (or endpoints) as floats.
    pub fn vertices_f64(&self) -> Vec<[f64; 2]> {
        match self {
            Window::Interval { lo, hi } => vec![[golden_f64(*lo), 0.0], [golden_f64(*hi), 0.0]],
            Window::Polygon { vertices, scale, .. } => vertices
                .iter()
                .map(|v| {
                    let (x, y) = v.to_complex();
                    [x * scale, y * scale]
                })
                .collect(),
        }
    }

    /// Length or area.
    pub fn measure(&self) -> f64 {
        let v = self.vertices_f64();
        match self {
            Window::Interval { .. } => v[1][0] - v[0][0],
            Window::Polygon { .. } => {
                let n = v.len();
                0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>()
            }
        }
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        crate::pattern::bounds_of(&self.vertices_f64())
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices_f64();
        let mut d: f64 = 0.0;
        for a in &v {
            for b in &v {
                d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        d
    }

    /// Signed distance to the boundary, positive inside.
    pub fn signed_distance(&self, u: [f64; 2]) -> f64 {
        match self {
            Window::Interval { .. } => {
                let v = self.vertices_f64();
                (u[0] - v[0][0]).min(v[1][0] - u[0])
            }
            Window::Polygon { .. } => {
                let v = self.vertices_f64();
                let n = v.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (v[i], v[(i + 1) % n]);
                        let e = [b[0] - a[0], b[1] - a[1]];
                        (e[0] * (u[1] - a[1]) - e[1] * (u[0] - a[0])) / e[0].hypot(e[1])
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Float membership with the half-open rule applied to float edges.
    pub fn contains_f64(&self, u: [f64; 2]) -> bool {
        if self.is_empty() {
            return false;
        }
        match self {
            Window::Interval { .. } => {
                let v = self.vertices_f64();
                u[0] >= v[0][0] && u[0] < v[1][0]
            }
            Window::Polygon { .. } => {
                let v = self.vertices_f64();
                let n = v.len();
                (0..n).all(|i| {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let c = e[0] * (u[1] - a[1]) - e[1] * (u[0] - a[0]);
                    c > 0.0 || (c == 0.0 && edge_closed_f64(e))
                })
            }
        }
    }

    /// Exact membership of the ring value `p / d` (`d > 0`).
    pub fn contains_exact(&self, p: [i64; 4], d: i64) -> bool {
        match self {
            Window::Interval { lo, hi } => {
                let below = [p[0] - d * lo[0], p[1] - d * lo[1]];
                let above = [d * hi[0] - p[0], d * hi[1] - p[1]];
                golden_sign(below) >= 0 && golden_sign(above) > 0
            }
            Window::Polygon { order, vertices, .. } => {
                let p = Cyclo::new(*order, p);
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i].scale(d);
                    let e = vertices[(i + 1) % n] - vertices[i];
                    match e.cross_sign(p - a) {
                        1 => true,
                        0 => edge_closed_exact(e),
                        _ => false,
                    }
                })
            }
        }
    }

    /// Whether `p / d` lies exactly on the boundary.
    pub fn on_boundary_exact(&self, p: [i64; 4], d: i64) -> bool {
        match self {
            Window::Interval { lo, hi } => {
                [lo, hi].iter().any(|e| p[0] == d * e[0] && p[1] == d * e[1])
            }
            Window::Polygon { order, vertices, .. } => {
                let p = Cyclo::new(*order, p);
                let n = vertices.len();
                let signs: Vec<i32> =
                    (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).cross_sign(p - vertices[i].scale(d))).collect();
                signs.iter().all(|&s| s >= 0) && signs.contains(&0)
            }
        }
    }

    /// Point reflection through the origin.
    pub fn negated(&self) -> Window {
        match self {
            Window::Interval { lo, hi } => Window::Interval { lo: [-hi[0], -hi[1]], hi: [-lo[0], -lo[1]] },
            Window::Polygon { order, vertices, scale } => {
                Window::Polygon { order: *order, vertices: vertices.iter().map(|v| -*v).collect(), scale: *scale }
            }
        }
    }

    /// Same vertex set regardless of starting vertex.
    pub fn same_shape(&self, other: &Window) -> bool {
        match (self, other) {
            (Window::Interval { .. }, Window::Interval { .. }) => self == other,
            (Window::Polygon { vertices: a, .. }, Window::Polygon { vertices: b, .. }) => {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort();
                b.sort();
                a == b
            }
            _ => false,
        }
    }
}

/// Closed iff the outward normal `(e.y, −e.x)` points to the lower left.
fn edge_closed_f64(e: [f64; 2]) -> bool {
    e[1] < 0.0 || (e[1] == 0.0 && e[0] > 0.0)
}

fn edge_closed_exact(e: Cyclo) -> bool {
    match e.im_sign() {
        0 => e.re_sign() > 0,
        s => s < 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_z8() -> Window {
        // 0, 1, 1+i, i  with i = ζ₈²
        let o = CycloOrder::Eight;
        let v = vec![Cyclo::zero(o), Cyclo::one(o), Cyclo::new(o, [1, 0, 1, 0]), Cyclo::new(o, [0, 0, 1, 0])];
        Window::polygon(o, v, 1.0).unwrap()
    }

    #[test]
    fn half_open_square() {
        let w = unit_square_z8();
        let o = CycloOrder::Eight;
        let p = |x: i64, y: i64| Cyclo::new(o, [x, 0, y, 0]).c;
        // scaled by 2: corners 0,2,2+2i,2i; midpoints of edges
        assert!(w.contains_exact(p(0, 0), 2));
        assert!(w.contains_exact(p(1, 0), 2));
        assert!(w.contains_exact(p(0, 1), 2));
        assert!(!w.contains_exact(p(2, 1), 2));
        assert!(!w.contains_exact(p(1, 2), 2));
        assert!(!w.contains_exact(p(2, 0), 2));
        assert!(w.contains_exact(p(1, 1), 2));
        assert!(w.on_boundary_exact(p(2, 1), 2));
        assert!(!w.on_boundary_exact(p(1, 1), 2));
        // float rule agrees
        assert!(w.contains_f64([0.0, 0.0]) && !w.contains_f64([1.0, 0.5]) && w.contains_f64([0.5, 0.0]));
    }

    #[test]
    fn half_open_tiles_the_plane() {
        // Translates of the unit square by Z² cover each probe exactly once.
        let w = unit_square_z8();
        let o = CycloOrder::Eight;
        for (x, y) in [(0, 0), (3, 0), (0, 3), (3, 3), (1, 2)] {
            let mut hits = 0;
            for tx in -2..=2 {
                for ty in -2..=2 {
                    let q = Cyclo::new(o, [x - 3 * tx, 0, y - 3 * ty, 0]);
                    if w.contains_exact(q.c, 3) {
                        hits += 1;
                    }
                }
            }
            assert_eq!(hits, 1, "probe ({x},{y})/3");
        }
    }

    #[test]
    fn golden_interval() {
        let w = Window::interval([1, -1], [1, 0]).unwrap();
        assert!((w.measure() - TAU).abs() < 1e-12);
        assert!(w.contains_exact([1, -1, 0, 0], 1));
        assert!(!w.contains_exact([1, 0, 0, 0], 1));
        assert!(w.contains_exact([0, 0, 0, 0], 1));
        assert!(Window::interval([1, 0], [1, -1]).is_err());
        assert!(Window::interval([1, 0], [1, 0]).unwrap().is_empty());
    }

    #[test]
    fn hull_removes_interior_and_collinear() {
        let o = CycloOrder::Eight;
        let pts: Vec<Cyclo> = [[0, 0, 0, 0], [2, 0, 0, 0], [2, 0, 2, 0], [0, 0, 2, 0], [1, 0, 0, 0], [1, 0, 1, 0]]
            .iter()
            .map(|c| Cyclo::new(o, *c))
            .collect();
        let w = Window::hull(o, &pts, 1.0).unwrap();
        match &w {
            Window::Polygon { vertices, .. } => assert_eq!(vertices.len(), 4),
            _ => unreachable!(),
        }
        assert!((w.measure() - 4.0).abs() < 1e-12);
    }
}
