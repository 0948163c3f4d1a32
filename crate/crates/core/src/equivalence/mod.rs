//! Local isomorphism: point-anchored r-patches, atlases, symmetry and
//! local derivability tests, and limit translation modules.
//!
//! All verdicts here are finite-sample tests. They can refute an
//! equivalence but only ever give evidence for one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::algebra::hnf::hermite_normal_form;
use crate::algebra::symmetry::OrthogonalMap;
use crate::algebra::Cyclo;
use crate::error::{Error, Result};
use crate::pattern::{key_sub, Frame, Key, Pattern, Point, Region};
use crate::spatial::GridIndex;

mod rules;
#[cfg(test)]
mod tests;

pub use rules::{derive, DerivationRule, Structure};

/// Relative key of `to` seen from `from`: exact when the frame is,
/// otherwise the quantized float difference.
fn relative(frame: &Frame, from: &Point, to: &Point) -> Key {
    if frame.is_exact() {
        key_sub(&to.key, &from.key)
    } else {
        Frame::float_key([to.pos[0] - from.pos[0], to.pos[1] - from.pos[1]])
    }
}

fn key_norm(frame: &Frame, k: &Key) -> f64 {
    let p = frame.position(k);
    p[0].hypot(p[1])
}

/// A pattern around one of its points, translated to the origin.
///
/// Entries are `(relative key, label)` in lexicographic order; the anchor
/// itself is the entry with key zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RPatch {
    pub points: Vec<(Key, u32)>,
}

impl RPatch {
    /// Anchored at the pattern point with index `anchor`.
    pub fn around(p: &Pattern, index: &GridIndex, anchor: usize, r: f64) -> RPatch {
        let pts = p.points();
        let a = &pts[anchor];
        let frame = p.frame();
        let mut points = Vec::new();
        // The float query is padded; membership is decided on the relative
        // key so that translates agree bit for bit.
        index.for_each_within(a.pos, r + 1e-6, |i, _| {
            let k = relative(frame, a, &pts[i]);
            if key_norm(frame, &k) <= r {
                points.push((k, pts[i].label));
            }
        });
        points.sort_unstable();
        RPatch { points }
    }
}

/// Set of canonical r-patches seen in a sample region.
#[derive(Clone, Debug)]
pub struct PatchAtlas {
    pub radius: f64,
    pub patches: BTreeSet<RPatch>,
    pub sample_region: Region,
    /// Number of anchors the atlas was built from.
    pub samples: usize,
}

impl PatchAtlas {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn contains(&self, patch: &RPatch) -> bool {
        self.patches.contains(patch)
    }

    /// One record per patch: `radius;count;x0 y0 ... label;...`.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for patch in &self.patches {
            let _ = write!(out, "{};{}", self.radius, patch.points.len());
            for (k, l) in &patch.points {
                let _ = write!(out, ";{} {} {} {} {}", k[0], k[1], k[2], k[3], l);
            }
            out.push('\n');
        }
        out
    }
}

fn grid(p: &Pattern, r: f64) -> GridIndex {
    GridIndex::new(&p.positions(), r.max(1e-3))
}

fn default_sample(p: &Pattern, r: f64) -> Result<Region> {
    p.region().shrink(r).ok_or_else(|| {
        Error::invalid(format!("region too small for patches of radius {r} (nothing left after shrinking)"))
    })
}

/// Atlas of r-patches anchored at the points inside `sample_region`
/// (default: the pattern region shrunk by `r`).
pub fn extract_atlas(p: &Pattern, r: f64, sample_region: Option<&Region>) -> Result<PatchAtlas> {
    if !(r >= 0.0) {
        return Err(Error::invalid("patch radius must be non-negative"));
    }
    let sample = match sample_region {
        Some(s) => s.clone(),
        None => default_sample(p, r)?,
    };
    let index = grid(p, r);
    let mut patches = BTreeSet::new();
    let mut samples = 0;
    for (i, pt) in p.points().iter().enumerate() {
        if sample.contains(pt.pos) {
            patches.insert(RPatch::around(p, &index, i, r));
            samples += 1;
        }
    }
    Ok(PatchAtlas { radius: r, patches, sample_region: sample, samples })
}

/// Atlas of the patches anchored at points accepted by `keep`; the
/// caller guarantees those patches are not clipped.
pub fn extract_atlas_where(p: &Pattern, r: f64, keep: impl Fn([f64; 2]) -> bool) -> PatchAtlas {
    let index = grid(p, r);
    let mut patches = BTreeSet::new();
    let mut samples = 0;
    for (i, pt) in p.points().iter().enumerate() {
        if keep(pt.pos) {
            patches.insert(RPatch::around(p, &index, i, r));
            samples += 1;
        }
    }
    PatchAtlas { radius: r, patches, sample_region: p.region().clone(), samples }
}

/// Same r-patches in both directions (atlases equal as sets).
pub fn li_equivalent(a: &Pattern, b: &Pattern, r: f64) -> Result<bool> {
    if a.frame() != b.frame() {
        let (fa, fb) = (as_float(a), as_float(b));
        return Ok(extract_atlas(&fa, r, None)?.patches == extract_atlas(&fb, r, None)?.patches);
    }
    Ok(extract_atlas(a, r, None)?.patches == extract_atlas(b, r, None)?.patches)
}

/// The same points in the float frame.
pub fn as_float(p: &Pattern) -> Pattern {
    let dim = p.dim();
    let points = p.points().iter().map(|q| Point { key: Frame::float_key(q.pos), ..q.clone() }).collect();
    p.remapped(Frame::Float { dim }, points, p.region().clone())
}

/// Index `k` with `T = ρ^k`, where ρ generates the frame's rotations
/// (or ±1 on a line).
fn exact_power(frame: &Frame, t: &OrthogonalMap) -> Option<i64> {
    if t.dimension() == 1 {
        return matches!(frame, Frame::Golden | Frame::Integer { dim: 1 })
            .then(|| if t.matrix()[0][0] > 0.0 { 0 } else { 1 });
    }
    let rot = t.exact()?;
    let n = match frame {
        Frame::Cyclo { order, .. } => order.rotation_order() as i64,
        Frame::Integer { dim: 2 } => 4,
        _ => return None,
    };
    (rot.p * n % rot.q == 0).then(|| rot.p * n / rot.q)
}

fn rotate_region(region: &Region, t: &OrthogonalMap) -> Region {
    let ap = |p: [f64; 2]| {
        let v = t.apply(&p[..t.dimension()]);
        [v[0], *v.get(1).unwrap_or(&0.0)]
    };
    match region {
        Region::Interval { lo, hi } => {
            let (a, b) = (ap([*lo, 0.0])[0], ap([*hi, 0.0])[0]);
            Region::Interval { lo: a.min(b), hi: a.max(b) }
        }
        Region::Ball { center, radius } => Region::Ball { center: ap(*center), radius: *radius },
        Region::Box { lo, hi } => {
            let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
            let half = ((hi[0] - lo[0]) / 2.0).min((hi[1] - lo[1]) / 2.0);
            Region::Ball { center: ap(c), radius: half }
        }
    }
}

/// Image `T(A)`, exact when `T` is a rotation of the frame's ring.
pub fn apply_orthogonal(p: &Pattern, t: &OrthogonalMap) -> Result<Pattern> {
    if t.dimension() != p.dim() {
        return Err(Error::invalid("map dimension does not match the pattern"));
    }
    let region = rotate_region(p.region(), t);
    let map_pos = |pos: [f64; 2]| {
        let v = t.apply(&pos[..t.dimension()]);
        [v[0], *v.get(1).unwrap_or(&0.0)]
    };
    let frame = *p.frame();
    let exact = exact_power(&frame, t);
    let points: Vec<Point> = p
        .points()
        .iter()
        .map(|q| {
            let key = match (exact, &frame) {
                (Some(k), Frame::Cyclo { order, .. }) => {
                    (Cyclo::new(*order, q.key) * Cyclo::unit_root(*order, k)).c
                }
                (Some(k), Frame::Integer { dim: 2 }) => {
                    let mut v = [q.key[0], q.key[1]];
                    for _ in 0..k.rem_euclid(4) {
                        v = [-v[1], v[0]];
                    }
                    [v[0], v[1], 0, 0]
                }
                (Some(k), _) if k % 2 == 1 => q.key.map(|v| -v),
                (Some(_), _) => q.key,
                (None, _) => Frame::float_key(map_pos(q.pos)),
            };
            Point { pos: map_pos(q.pos), key, ..q.clone() }
        })
        .filter(|q| region.contains(q.pos))
        .collect();
    let frame = if exact.is_some() { frame } else { Frame::Float { dim: p.dim() } };
    Ok(p.remapped(frame, points, region))
}

/// Whether `A` and `T(A)` have the same r-patches.
///
/// Labels are carried along unchanged, so decorated patterns must use
/// rotation-invariant labels. Both atlases are sampled from the same
/// T-invariant central ball.
pub fn generalized_symmetry(a: &Pattern, t: &OrthogonalMap, r: f64) -> Result<bool> {
    let ta = apply_orthogonal(a, t)?;
    let (a, ta) = if ta.frame() == a.frame() { (a.clone(), ta) } else { (as_float(a), as_float(&ta)) };
    let sample = central_ball(a.region(), r)?;
    let lhs = extract_atlas(&a, r, Some(&sample))?;
    let rhs = extract_atlas(&ta, r, Some(&rotate_region(&sample, t)))?;
    Ok(lhs.patches == rhs.patches)
}

/// Largest ball about the origin whose r-neighbourhood fits the region.
fn central_ball(region: &Region, r: f64) -> Result<Region> {
    let (lo, hi) = region.bounds();
    let reach = match region {
        Region::Ball { center, radius } => radius - center[0].hypot(center[1]),
        Region::Interval { .. } => (-lo[0]).min(hi[0]),
        Region::Box { .. } => (-lo[0]).min(hi[0]).min(-lo[1]).min(hi[1]),
    } - r;
    if reach <= 0.0 {
        return Err(Error::invalid("region does not contain a ball about the origin of the patch radius"));
    }
    Ok(match region {
        Region::Interval { .. } => Region::Interval { lo: -reach, hi: reach },
        _ => Region::Ball { center: [0.0, 0.0], radius: reach },
    })
}

/// Outcome of an empirical local-derivability test.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivability {
    pub holds: bool,
    pub anchors: usize,
    /// Anchor pairs with equal A-patches whose B-content was compared.
    pub pairs_checked: usize,
    /// Positions of the first two anchors with equal A-patches but
    /// different B-content.
    pub violation: Option<([f64; 2], [f64; 2])>,
}

/// Whether the B-content within `rho` of each A-point is a function of
/// the A r-patch there, judged on all anchors in the sample region.
pub fn is_locally_derivable(
    a: &Pattern,
    b: &Pattern,
    r: f64,
    rho: f64,
    sample_region: Option<&Region>,
) -> Result<Derivability> {
    let sample = match sample_region {
        Some(s) => s.clone(),
        None => default_sample(a, r.max(rho))?,
    };
    let shared = a.frame() == b.frame() && a.frame().is_exact();
    let ai = grid(a, r);
    let bi = grid(b, rho);
    let bpts = b.points();
    let mut seen: BTreeMap<RPatch, (Vec<(Key, u32)>, [f64; 2])> = BTreeMap::new();
    let mut out = Derivability { holds: true, anchors: 0, pairs_checked: 0, violation: None };
    for (i, pt) in a.points().iter().enumerate() {
        if !sample.contains(pt.pos) {
            continue;
        }
        out.anchors += 1;
        let patch = RPatch::around(a, &ai, i, r);
        let mut content = Vec::new();
        bi.for_each_within(pt.pos, rho + 1e-6, |j, _| {
            let q = &bpts[j];
            let k = if shared {
                key_sub(&q.key, &pt.key)
            } else {
                Frame::float_key([q.pos[0] - pt.pos[0], q.pos[1] - pt.pos[1]])
            };
            let d = if shared { key_norm(b.frame(), &k) } else { key_norm(&Frame::Float { dim: 2 }, &k) };
            if d <= rho {
                content.push((k, q.label));
            }
        });
        content.sort_unstable();
        match seen.get(&patch) {
            Some((c, at)) => {
                out.pairs_checked += 1;
                if *c != content && out.violation.is_none() {
                    out.holds = false;
                    out.violation = Some((*at, pt.pos));
                }
            }
            None => {
                seen.insert(patch, (content, pt.pos));
            }
        }
    }
    Ok(out)
}

/// Z-module generated by the translations between equal r-patches.
#[derive(Clone, Debug, PartialEq)]
pub struct LtmEstimate {
    pub radius: f64,
    /// Distinct translations collected (differences to the first
    /// occurrence of each patch class).
    pub generators: usize,
    pub rank: usize,
    /// Hermite basis in the frame's key coordinates.
    pub basis: Vec<Vec<i64>>,
    /// No patch occurred twice; the module estimate is empty.
    pub degenerate: bool,
}

fn key_rank(frame: &Frame) -> usize {
    match frame {
        Frame::Float { dim } | Frame::Integer { dim } => *dim,
        Frame::Golden => 2,
        Frame::Cyclo { .. } => 4,
    }
}

pub fn ltm_estimate(p: &Pattern, r: f64, sample_region: Option<&Region>) -> Result<LtmEstimate> {
    let sample = match sample_region {
        Some(s) => s.clone(),
        None => default_sample(p, r)?,
    };
    let n = key_rank(p.frame());
    let index = grid(p, r);
    let mut first: BTreeMap<RPatch, Key> = BTreeMap::new();
    let mut gens: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (i, pt) in p.points().iter().enumerate() {
        if !sample.contains(pt.pos) {
            continue;
        }
        let patch = RPatch::around(p, &index, i, r);
        match first.get(&patch) {
            Some(k0) => {
                gens.insert(key_sub(&pt.key, k0)[..n].to_vec());
            }
            None => {
                first.insert(patch, pt.key);
            }
        }
    }
    let generators = gens.len();
    // Reduce in batches so the working matrix stays small.
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let all: Vec<Vec<i64>> = gens.into_iter().collect();
    for chunk in all.chunks(64) {
        let mut rows = basis.clone();
        rows.extend(chunk.iter().cloned());
        basis = hermite_normal_form(&rows);
    }
    Ok(LtmEstimate { radius: r, generators, rank: basis.len(), basis, degenerate: generators == 0 })
}
