//! Tilings by golden triangles and Penrose rhombs with vertices in Z[ζ₅].
//!
//! Triangles are stored as `(kind, A, B, C)`: `A` is the apex between the
//! two equal legs, `BC` the base. Kind 0 is the acute 36-72-72 triangle,
//! kind 1 the obtuse 108-36-36 one. The order of `B` and `C` is the
//! decoration: mirror images are distinct tiles.
//!
//! A rhomb is the union of two mirror triangles on a common base and is
//! stored by one of its halves; the other apex is `B + C − A`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{Cyclo, CycloOrder, GoldenInt};
use crate::error::{Error, Result};
use crate::pattern::{fmt_num, Frame, Pattern, Point, Region};
use crate::spatial::GridIndex;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileFamily {
    /// Half-rhombs of the rhombic Penrose tiling.
    Robinson,
    /// Half-kites and half-darts.
    KiteDart,
    /// Thin (kind 0) and thick (kind 1) Penrose rhombs.
    Rhomb,
}

impl TileFamily {
    pub fn name(self) -> &'static str {
        match self {
            TileFamily::Robinson => "robinson",
            TileFamily::KiteDart => "kite-dart",
            TileFamily::Rhomb => "rhomb",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub kind: u8,
    pub a: Cyclo,
    pub b: Cyclo,
    pub c: Cyclo,
}

/// Direction of a planar vector in units of π/10, rounded.
fn direction(v: Cyclo) -> i64 {
    let (x, y) = v.to_complex();
    ((y.atan2(x) / (PI / 10.0)).round() as i64).rem_euclid(20)
}

pub fn pos(z: Cyclo) -> [f64; 2] {
    let (x, y) = z.to_complex();
    [x, y]
}

impl Tile {
    pub fn triangle(kind: u8, a: Cyclo, b: Cyclo, c: Cyclo) -> Tile {
        Tile { kind, a, b, c }
    }

    /// Rhomb with apex `a` and decorated base `(b, c)`, re-anchored at
    /// whichever apex has its diagonal pointing into the upper half plane.
    pub fn rhomb(kind: u8, a: Cyclo, b: Cyclo, c: Cyclo) -> Tile {
        let t = Tile { kind, a, b, c };
        let bis = direction(b + c - a - a);
        if bis < 10 {
            t
        } else {
            Tile { a: t.far_apex(), ..t }
        }
    }

    /// `B + C − A`: the apex of the mirror half.
    pub fn far_apex(&self) -> Cyclo {
        self.b + self.c - self.a
    }

    /// Counter-clockwise when `chirality() == 0`.
    pub fn chirality(&self) -> u8 {
        u8::from((self.b - self.a).cross_sign(self.c - self.a) < 0)
    }

    /// Vertices in counter-clockwise order.
    pub fn polygon(&self, family: TileFamily) -> Vec<Cyclo> {
        let ccw = self.chirality() == 0;
        match (family, ccw) {
            (TileFamily::Rhomb, true) => vec![self.a, self.b, self.far_apex(), self.c],
            (TileFamily::Rhomb, false) => vec![self.a, self.c, self.far_apex(), self.b],
            (_, true) => vec![self.a, self.b, self.c],
            (_, false) => vec![self.a, self.c, self.b],
        }
    }

    /// Twice the area in units of sin 72°.
    pub fn area2(&self, family: TileFamily) -> GoldenInt {
        let t = (self.b - self.a).cross(self.c - self.a);
        let t = if self.chirality() == 0 { t } else { -t };
        if family == TileFamily::Rhomb {
            t.clone() + t
        } else {
            t
        }
    }

    /// Orientation in units of π/10: the leg `AB` for triangles, the
    /// apex diagonal for rhombs.
    pub fn rotation(&self, family: TileFamily) -> i64 {
        match family {
            TileFamily::Rhomb => direction(self.b + self.c - self.a - self.a),
            _ => direction(self.b - self.a),
        }
    }

    /// Proto-tile index: kind and mirror image.
    pub fn proto(&self) -> u32 {
        2 * self.kind as u32 + self.chirality() as u32
    }

    /// Point label combining proto-tile and orientation.
    pub fn label(&self, family: TileFamily) -> u32 {
        20 * self.proto() + self.rotation(family) as u32
    }

    pub fn translate(&self, v: Cyclo) -> Tile {
        Tile { a: self.a + v, b: self.b + v, c: self.c + v, ..*self }
    }

    pub fn scale(&self, s: Cyclo) -> Tile {
        Tile { a: self.a * s, b: self.b * s, c: self.c * s, ..*self }
    }
}

/// Whether two convex CCW polygons share interior points (exact).
pub fn overlaps(p: &[Cyclo], q: &[Cyclo]) -> bool {
    let separated = |p: &[Cyclo], q: &[Cyclo]| {
        (0..p.len()).any(|i| {
            let (s, e) = (p[i], p[(i + 1) % p.len()]);
            q.iter().all(|&v| (e - s).cross_sign(v - s) <= 0)
        })
    };
    !separated(p, q) && !separated(q, p)
}

/// Whether every vertex of `inner` lies in the closed convex CCW polygon `outer`.
pub fn inside(inner: &[Cyclo], outer: &[Cyclo]) -> bool {
    inner.iter().all(|&v| {
        (0..outer.len()).all(|i| {
            let (s, e) = (outer[i], outer[(i + 1) % outer.len()]);
            (e - s).cross_sign(v - s) >= 0
        })
    })
}

/// One placed tile in export form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub label: u32,
    /// Units of π/10.
    pub rotation: i64,
    /// Anchor vertex as Z[ζ₅] coefficients.
    pub translation: [i64; 4],
}

/// A finite patch of tiles, optionally with the convex outline it fills.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingConfig {
    pub family: TileFamily,
    pub tiles: Vec<Tile>,
    /// Counter-clockwise convex outline covered by the tiles, when known.
    pub outline: Option<Vec<Cyclo>>,
}

/// Which points of a tiling a [`Pattern`] is made of.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum View {
    /// Tile anchors labelled by proto-tile and orientation.
    Tiles,
    /// Rhombs assembled from mirror triangle pairs (Robinson tilings only).
    Rhombs,
    /// All tile vertices, unlabelled.
    Vertices,
}

pub const FRAME: Frame = Frame::Cyclo { order: CycloOrder::Five, scale: 1.0 };

impl TilingConfig {
    pub fn new(family: TileFamily, tiles: Vec<Tile>) -> Self {
        TilingConfig { family, tiles, outline: None }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Tiles per kind.
    pub fn counts(&self) -> [u64; 2] {
        let mut n = [0u64; 2];
        for t in &self.tiles {
            n[t.kind as usize] += 1;
        }
        n
    }

    pub fn total_area2(&self) -> GoldenInt {
        self.tiles.iter().fold(GoldenInt::from_ints(0, 0), |acc, t| acc + t.area2(self.family))
    }

    /// Tiles in canonical order, for exact comparison.
    pub fn sorted(&self) -> Vec<Tile> {
        let mut t = self.tiles.clone();
        t.sort_unstable();
        t
    }

    pub fn placements(&self) -> Vec<Placement> {
        self.tiles
            .iter()
            .map(|t| Placement { label: t.proto(), rotation: t.rotation(self.family), translation: t.a.c })
            .collect()
    }

    /// Records `label,rotation,t0,t1,t2,t3,denominator` with the
    /// translation `Σ t_k ζ^k / denominator`.
    pub fn to_records(&self) -> String {
        let mut out = String::from("label,rotation,t0,t1,t2,t3,den\n");
        for p in self.placements() {
            let t = p.translation;
            let _ = writeln!(out, "{},{},{},{},{},{},1", p.label, p.rotation, t[0], t[1], t[2], t[3]);
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let polys: Vec<Vec<[f64; 2]>> =
            self.tiles.iter().map(|t| t.polygon(self.family).into_iter().map(pos).collect()).collect();
        let all: Vec<[f64; 2]> = polys.iter().flatten().copied().collect();
        let (lo, hi) = crate::pattern::bounds_of(&all);
        let w = (hi[0] - lo[0]).max(1e-9);
        let h = (hi[1] - lo[1]).max(1e-9);
        let s = 800.0 / w.max(h);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
            w * s + 20.0,
            h * s + 20.0
        );
        const FILL: [&str; 2] = ["#d9534f", "#428bca"];
        for (t, poly) in self.tiles.iter().zip(&polys) {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| format!("{},{}", fmt_num((p[0] - lo[0]) * s + 10.0), fmt_num((hi[1] - p[1]) * s + 10.0)))
                .collect();
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>",
                pts.join(" "),
                FILL[t.kind as usize % 2]
            );
        }
        out.push_str("</svg>\n");
        out
    }

    /// Exact pairwise overlap check between nearby tiles.
    pub fn check_no_overlap(&self) -> Result<()> {
        let anchors: Vec<[f64; 2]> = self.tiles.iter().map(|t| pos(t.a)).collect();
        let polys: Vec<Vec<Cyclo>> = self.tiles.iter().map(|t| t.polygon(self.family)).collect();
        let reach = polys
            .iter()
            .zip(&anchors)
            .flat_map(|(p, a)| p.iter().map(move |&v| dist(pos(v), *a)))
            .fold(0.0, f64::max);
        let index = GridIndex::new(&anchors, (2.0 * reach).max(1.0));
        for (i, a) in anchors.iter().enumerate() {
            for j in index.within(*a, 2.0 * reach + 1e-6) {
                if j > i && overlaps(&polys[i], &polys[j]) {
                    return Err(Error::RuleInconsistency(format!(
                        "tiles {i} and {j} overlap near ({:.3}, {:.3})",
                        a[0], a[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rhombs formed by mirror triangle pairs on a shared base; unpaired
    /// triangles (at the patch boundary) are dropped.
    pub fn paired_rhombs(&self) -> Result<TilingConfig> {
        if self.family != TileFamily::Robinson {
            return Err(Error::invalid("rhombs are assembled from Robinson triangles"));
        }
        let mut by_base: BTreeMap<(Cyclo, Cyclo), Vec<&Tile>> = BTreeMap::new();
        for t in &self.tiles {
            by_base.entry((t.b, t.c)).or_default().push(t);
        }
        let mut rhombs = Vec::new();
        for ((b, c), group) in by_base {
            match group.as_slice() {
                [_] => {}
                [s, t] if s.kind == t.kind && s.a == t.far_apex() => {
                    rhombs.push(Tile::rhomb(s.kind, s.a, b, c));
                }
                _ => {
                    return Err(Error::RuleInconsistency(format!(
                        "base ({:?}, {:?}) is shared by {} incompatible triangles",
                        pos(b),
                        pos(c),
                        group.len()
                    )))
                }
            }
        }
        rhombs.sort_unstable();
        Ok(TilingConfig { family: TileFamily::Rhomb, tiles: rhombs, outline: self.outline.clone() })
    }

    /// Points of the tiling in the `Z[ζ₅]` frame.
    pub fn to_pattern(&self, view: View, region: Region) -> Result<Pattern> {
        let tiled;
        let (cfg, view) = match (view, self.family) {
            (View::Rhombs, TileFamily::Robinson) => {
                tiled = self.paired_rhombs()?;
                (&tiled, View::Tiles)
            }
            (View::Rhombs, TileFamily::Rhomb) => (self, View::Tiles),
            (View::Rhombs, _) => return Err(Error::invalid("kite-dart tilings have no rhomb view")),
            _ => (self, view),
        };
        let mut points = BTreeMap::new();
        for t in &cfg.tiles {
            match view {
                View::Vertices => {
                    for v in t.polygon(cfg.family) {
                        points.insert((v.c, 0), v);
                    }
                }
                _ => {
                    points.insert((t.a.c, t.label(cfg.family)), t.a);
                }
            }
        }
        let points = points
            .into_iter()
            .map(|((key, label), z)| Point { pos: pos(z), key, label, preimage: Vec::new() })
            .filter(|p| region.contains(p.pos))
            .collect();
        Pattern::new(FRAME, points, region, cfg.family.name())
    }

    /// Largest ball inside the outline, if one is set.
    pub fn inscribed_ball(&self) -> Option<Region> {
        let o: Vec<[f64; 2]> = self.outline.as_ref()?.iter().map(|&v| pos(v)).collect();
        Some(inscribed_ball(&o))
    }

    /// Distance from `p` to the complement of the outline (negative outside).
    pub fn depth_in_outline(&self, p: [f64; 2]) -> Option<f64> {
        let o: Vec<[f64; 2]> = self.outline.as_ref()?.iter().map(|&v| pos(v)).collect();
        Some(edge_depth(&o, p))
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Signed distance to the boundary of a convex CCW polygon (positive inside).
pub(crate) fn edge_depth(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    (0..poly.len())
        .map(|i| {
            let (s, e) = (poly[i], poly[(i + 1) % poly.len()]);
            let (dx, dy) = (e[0] - s[0], e[1] - s[1]);
            (dx * (p[1] - s[1]) - dy * (p[0] - s[0])) / dx.hypot(dy)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Incircle of a triangle; for other polygons the ball about the vertex
/// centroid touching the nearest edge.
fn inscribed_ball(poly: &[[f64; 2]]) -> Region {
    let center = if poly.len() == 3 {
        let l = |i: usize| dist(poly[(i + 1) % 3], poly[(i + 2) % 3]);
        let (la, lb, lc) = (l(0), l(1), l(2));
        let s = la + lb + lc;
        [
            (la * poly[0][0] + lb * poly[1][0] + lc * poly[2][0]) / s,
            (la * poly[0][1] + lb * poly[1][1] + lc * poly[2][1]) / s,
        ]
    } else {
        let n = poly.len() as f64;
        [poly.iter().map(|p| p[0]).sum::<f64>() / n, poly.iter().map(|p| p[1]).sum::<f64>() / n]
    };
    Region::Ball { center, radius: edge_depth(poly, center) }
}

/// Periodic tiling by translates of one thick rhomb spanned by the edges
/// 1 and ζ₁₀²: a rhomb tiling that is not a Penrose tiling.
pub fn periodic_thick_rhombs(n: i64) -> TilingConfig {
    let u = Cyclo::unit_root(CycloOrder::Five, 0);
    let w = Cyclo::unit_root(CycloOrder::Five, 2);
    let mut tiles = Vec::new();
    for i in -n..n {
        for j in -n..n {
            let p = u.scale(i) + w.scale(j);
            // 108° apex at p + u; the base joins the two 72° corners.
            tiles.push(Tile::rhomb(1, p + u, p, p + u + w));
        }
    }
    tiles.sort_unstable();
    TilingConfig::new(TileFamily::Rhomb, tiles)
}
