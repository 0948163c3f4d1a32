//! Dart-rhombus tilings on a periodic triangular lattice.
//!
//! Every lattice triangle is cut into three 30-30-120 triangles by joining
//! its centroid to the corners. A rhombus is the pair of small triangles on
//! either side of a lattice edge; a dart is a pair of small triangles inside
//! one lattice triangle that share a short edge. So each lattice triangle
//! carries either three rhombus halves or one rhombus half plus a dart, and
//! a tiling is the same thing as a set of lattice edges (the rhombi) that
//! meets every lattice triangle in one or three edges.
//!
//! Cells are indexed by `(i, j)` on an `l1 × l2` torus. The up triangle of a
//! cell has corners `(i,j), (i+1,j), (i,j+1)`, the down triangle
//! `(i+1,j), (i,j+1), (i+1,j+1)`. Edge orientation 0 runs along the first
//! lattice vector, 1 along the second, 2 along their difference.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pattern::fmt_num;

/// Largest torus (in lattice triangles) that the exhaustive search accepts.
pub const ENUMERATION_BUDGET: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileKind {
    /// Orientation 0..3: direction of the lattice edge it straddles.
    Rhombus(u8),
    /// Orientation 0..6: `3·down + k`, where `k` is the lattice edge of its
    /// triangle that carries a rhombus half.
    Dart(u8),
}

impl TileKind {
    /// 0..3 for rhombi, 3..9 for darts.
    pub fn label(self) -> u8 {
        match self {
            TileKind::Rhombus(o) => o,
            TileKind::Dart(o) => 3 + o,
        }
    }
}

/// A tile and the lattice triangle it is anchored to (the up triangle of
/// the edge for a rhombus).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileRecord {
    pub kind: TileKind,
    pub cell: (usize, usize),
    pub down: bool,
}

/// Corner pairs of the three edges, for up and down triangles.
const EDGE_CORNERS: [[[usize; 2]; 3]; 2] = [[[0, 1], [0, 2], [1, 2]], [[1, 2], [0, 2], [0, 1]]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPattern {
    /// Every lattice edge carries a rhombus.
    AllRhombi,
    /// Rhombi on the orientation-2 edges only; every triangle holds a dart.
    Darts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveSet {
    /// Toggle the six edges around one lattice vertex.
    Local,
    /// Local moves plus toggling a straight non-contractible loop.
    LocalAndWinding,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DartRhombusConfig {
    l1: usize,
    l2: usize,
    occupied: Vec<bool>,
}

struct Torus {
    l1: usize,
    l2: usize,
}

impl Torus {
    fn cell(&self, i: isize, j: isize) -> usize {
        let i = i.rem_euclid(self.l1 as isize) as usize;
        let j = j.rem_euclid(self.l2 as isize) as usize;
        i * self.l2 + j
    }

    fn edge(&self, i: isize, j: isize, o: usize) -> usize {
        3 * self.cell(i, j) + o
    }

    fn n_edges(&self) -> usize {
        3 * self.l1 * self.l2
    }

    fn n_triangles(&self) -> usize {
        2 * self.l1 * self.l2
    }

    /// Edges of triangle `t = 2·cell + down`, indexed by orientation.
    fn triangle_edges(&self, t: usize) -> [usize; 3] {
        let c = t / 2;
        let (i, j) = ((c / self.l2) as isize, (c % self.l2) as isize);
        if t % 2 == 0 {
            [self.edge(i, j, 0), self.edge(i, j, 1), self.edge(i, j, 2)]
        } else {
            [self.edge(i, j + 1, 0), self.edge(i + 1, j, 1), self.edge(i, j, 2)]
        }
    }

    /// (up, down) triangles sharing edge `e`.
    fn edge_triangles(&self, e: usize) -> [usize; 2] {
        let c = e / 3;
        let (i, j) = ((c / self.l2) as isize, (c % self.l2) as isize);
        let down = match e % 3 {
            0 => self.cell(i, j - 1),
            1 => self.cell(i - 1, j),
            _ => c,
        };
        [2 * c, 2 * down + 1]
    }

    fn moves(&self, set: MoveSet) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.l1 as isize {
            for j in 0..self.l2 as isize {
                out.push(vec![
                    self.edge(i, j, 0),
                    self.edge(i - 1, j, 0),
                    self.edge(i, j, 1),
                    self.edge(i, j - 1, 1),
                    self.edge(i - 1, j, 2),
                    self.edge(i, j - 1, 2),
                ]);
            }
        }
        if set == MoveSet::LocalAndWinding {
            for j in 0..self.l2 as isize {
                out.push((0..self.l1 as isize).flat_map(|i| [self.edge(i, j, 2), self.edge(i + 1, j, 1)]).collect());
            }
            for i in 0..self.l1 as isize {
                out.push((0..self.l2 as isize).flat_map(|j| [self.edge(i, j, 2), self.edge(i, j + 1, 0)]).collect());
            }
        }
        out
    }
}

fn check_dims(l1: usize, l2: usize) -> Result<()> {
    if l1 == 0 || l2 == 0 {
        return Err(Error::invalid("torus has no triangles"));
    }
    Ok(())
}

fn lattice_point(i: f64, j: f64) -> [f64; 2] {
    [i + 0.5 * j, j * 3f64.sqrt() / 2.0]
}

impl DartRhombusConfig {
    /// Rhombus occupancy per edge (index `3·(i·l2 + j) + orientation`).
    pub fn new(l1: usize, l2: usize, occupied: Vec<bool>) -> Result<Self> {
        check_dims(l1, l2)?;
        if occupied.len() != 3 * l1 * l2 {
            return Err(Error::invalid(format!("expected {} edge flags, got {}", 3 * l1 * l2, occupied.len())));
        }
        let c = DartRhombusConfig { l1, l2, occupied };
        c.validate()?;
        Ok(c)
    }

    pub fn seed(l1: usize, l2: usize, pattern: SeedPattern) -> Result<Self> {
        check_dims(l1, l2)?;
        let occupied = (0..3 * l1 * l2)
            .map(|e| match pattern {
                SeedPattern::AllRhombi => true,
                SeedPattern::Darts => e % 3 == 2,
            })
            .collect();
        DartRhombusConfig::new(l1, l2, occupied)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.l1, self.l2)
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    fn torus(&self) -> Torus {
        Torus { l1: self.l1, l2: self.l2 }
    }

    /// Tiles with the small triangles (`3·t + edge orientation`) they cover.
    fn tiles_with_parts(&self) -> Vec<(TileRecord, Vec<usize>)> {
        let tor = self.torus();
        let mut out = Vec::new();
        for (e, &occ) in self.occupied.iter().enumerate() {
            if occ {
                let [u, d] = tor.edge_triangles(e);
                let c = e / 3;
                out.push((
                    TileRecord { kind: TileKind::Rhombus((e % 3) as u8), cell: (c / self.l2, c % self.l2), down: false },
                    vec![3 * u + e % 3, 3 * d + e % 3],
                ));
            }
        }
        for t in 0..tor.n_triangles() {
            let edges = tor.triangle_edges(t);
            let occ: Vec<usize> = (0..3).filter(|&k| self.occupied[edges[k]]).collect();
            if occ.len() == 1 {
                let k = occ[0];
                let c = t / 2;
                out.push((
                    TileRecord {
                        kind: TileKind::Dart((3 * (t % 2) + k) as u8),
                        cell: (c / self.l2, c % self.l2),
                        down: t % 2 == 1,
                    },
                    (0..3).filter(|&m| m != k).map(|m| 3 * t + m).collect(),
                ));
            }
        }
        out
    }

    pub fn tiles(&self) -> Vec<TileRecord> {
        self.tiles_with_parts().into_iter().map(|(r, _)| r).collect()
    }

    /// Rhombi per orientation.
    pub fn rhombus_counts(&self) -> [usize; 3] {
        let mut n = [0; 3];
        for (e, &occ) in self.occupied.iter().enumerate() {
            n[e % 3] += occ as usize;
        }
        n
    }

    pub fn dart_count(&self) -> usize {
        self.tiles().iter().filter(|t| matches!(t.kind, TileKind::Dart(_))).count()
    }

    /// Perfect cover, alternation rule and dart rule.
    pub fn validate(&self) -> Result<()> {
        let tor = self.torus();
        let tiles = self.tiles_with_parts();
        let mut cover = vec![0u8; 3 * tor.n_triangles()];
        for (_, parts) in &tiles {
            for &s in parts {
                cover[s] += 1;
            }
        }
        if let Some(s) = cover.iter().position(|&c| c != 1) {
            return Err(Error::invalid(format!(
                "small triangle {} of lattice triangle {} covered {} times",
                s % 3,
                s / 3,
                cover[s]
            )));
        }
        // short edges are (lattice triangle, corner)
        let mut owners: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (idx, (_, parts)) in tiles.iter().enumerate() {
            let mut mine: Vec<(usize, usize)> = parts
                .iter()
                .flat_map(|&s| EDGE_CORNERS[(s / 3) % 2][s % 3].map(|c| (s / 3, c)))
                .collect();
            mine.sort_unstable();
            mine.dedup();
            for se in mine {
                owners.entry(se).or_default().push(idx);
            }
        }
        for (se, ts) in &owners {
            for a in 0..ts.len() {
                for b in a + 1..ts.len() {
                    match (tiles[ts[a]].0.kind, tiles[ts[b]].0.kind) {
                        (TileKind::Rhombus(x), TileKind::Rhombus(y)) if x == y => {
                            return Err(Error::invalid(format!("parallel rhombi share short edge {se:?}")))
                        }
                        (TileKind::Dart(_), TileKind::Dart(_)) => {
                            return Err(Error::invalid(format!("darts share short edge {se:?}")))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Header `label,orientation,i,j,half`, one row per tile.
    pub fn to_records(&self) -> String {
        let mut out = String::from("label,orientation,i,j,half\n");
        for t in self.tiles() {
            let (name, o) = match t.kind {
                TileKind::Rhombus(o) => ("rhombus", o),
                TileKind::Dart(o) => ("dart", o),
            };
            let _ = writeln!(out, "{name},{o},{},{},{}", t.cell.0, t.cell.1, if t.down { "down" } else { "up" });
        }
        out
    }

    fn polygon(&self, t: &TileRecord) -> Vec<[f64; 2]> {
        let (i, j) = (t.cell.0 as f64, t.cell.1 as f64);
        let corners = if t.down {
            [lattice_point(i + 1.0, j), lattice_point(i, j + 1.0), lattice_point(i + 1.0, j + 1.0)]
        } else {
            [lattice_point(i, j), lattice_point(i + 1.0, j), lattice_point(i, j + 1.0)]
        };
        let centroid = [
            (corners[0][0] + corners[1][0] + corners[2][0]) / 3.0,
            (corners[0][1] + corners[1][1] + corners[2][1]) / 3.0,
        ];
        match t.kind {
            TileKind::Rhombus(o) => {
                let [a, b] = EDGE_CORNERS[0][o as usize].map(|c| corners[c]);
                let mirror = [a[0] + b[0] - centroid[0], a[1] + b[1] - centroid[1]];
                vec![a, centroid, b, mirror]
            }
            TileKind::Dart(o) => {
                let k = (o % 3) as usize;
                let [u, w] = EDGE_CORNERS[t.down as usize][k];
                let v = 3 - u - w;
                vec![corners[u], corners[v], corners[w], centroid]
            }
        }
    }

    /// Snapshot drawing; tiles are drawn at their anchor cell.
    pub fn to_svg(&self) -> String {
        let polys: Vec<(TileRecord, Vec<[f64; 2]>)> = self.tiles().into_iter().map(|t| (t, self.polygon(&t))).collect();
        let all: Vec<[f64; 2]> = polys.iter().flat_map(|(_, p)| p.iter().copied()).collect();
        let (lo, hi) = crate::pattern::bounds_of(&all);
        let s = 800.0 / (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
            (hi[0] - lo[0]) * s + 20.0,
            (hi[1] - lo[1]) * s + 20.0
        );
        const FILL: [&str; 4] = ["#f0ad4e", "#5bc0de", "#5cb85c", "#d9534f"];
        for (t, poly) in &polys {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| format!("{},{}", fmt_num((p[0] - lo[0]) * s + 10.0), fmt_num((hi[1] - p[1]) * s + 10.0)))
                .collect();
            let fill = match t.kind {
                TileKind::Rhombus(o) => FILL[o as usize],
                TileKind::Dart(_) => FILL[3],
            };
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"0.5\"/>",
                pts.join(" ")
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

/// `ln n` for arbitrarily large `n` (−∞ for 0).
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Depth-first search over edge occupations with parity pruning.
#[derive(Clone)]
struct Search<'a> {
    tor: &'a Torus,
    edge_tris: Vec<[usize; 2]>,
    deg: Vec<u8>,
    open: Vec<u8>,
    n: [usize; 3],
    left: [usize; 3],
    target: Option<[usize; 3]>,
    occ: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(tor: &'a Torus, target: Option<[usize; 3]>) -> Self {
        let per = tor.l1 * tor.l2;
        Search {
            tor,
            edge_tris: (0..tor.n_edges()).map(|e| tor.edge_triangles(e)).collect(),
            deg: vec![0; tor.n_triangles()],
            open: vec![3; tor.n_triangles()],
            n: [0; 3],
            left: [per; 3],
            target,
            occ: vec![false; tor.n_edges()],
        }
    }

    /// Assign edge `e` (which must be the next one); false if pruned.
    fn push(&mut self, e: usize, v: bool) -> bool {
        let o = e % 3;
        self.occ[e] = v;
        self.left[o] -= 1;
        self.n[o] += v as usize;
        let mut ok = true;
        for t in self.edge_tris[e] {
            self.deg[t] += v as u8;
            self.open[t] -= 1;
            ok &= self.open[t] > 0 || self.deg[t] % 2 == 1;
        }
        if let Some(tg) = self.target {
            ok &= self.n[o] <= tg[o] && self.n[o] + self.left[o] >= tg[o];
        }
        ok
    }

    fn pop(&mut self, e: usize) {
        let o = e % 3;
        let v = self.occ[e];
        self.left[o] += 1;
        self.n[o] -= v as usize;
        for t in self.edge_tris[e] {
            self.deg[t] -= v as u8;
            self.open[t] += 1;
        }
        self.occ[e] = false;
    }

    fn run(&mut self, e: usize, leaf: &mut dyn FnMut(&Self)) {
        if e == self.tor.n_edges() {
            leaf(self);
            return;
        }
        for v in [false, true] {
            if self.push(e, v) {
                self.run(e + 1, leaf);
            }
            self.pop(e);
        }
    }
}

fn check_budget(l1: usize, l2: usize) -> Result<()> {
    let tri = 2 * l1 * l2;
    if tri > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{l1}×{l2} torus has {tri} triangles (budget {ENUMERATION_BUDGET}); \
             the search would visit about 2^{} complete tilings",
            l1 * l2 + 1
        )));
    }
    Ok(())
}

/// Runs the search split over the first few edges, one thread per prefix,
/// and merges the per-thread results in prefix order.
fn parallel_search<T: Send>(
    tor: &Torus,
    target: Option<[usize; 3]>,
    init: impl Fn() -> T + Sync,
    leaf: impl Fn(&mut T, &Search) + Sync,
) -> Vec<T> {
    let depth = tor.n_edges().min(4);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..1usize << depth)
            .map(|prefix| {
                let (init, leaf) = (&init, &leaf);
                scope.spawn(move || {
                    let mut acc = init();
                    let mut s = Search::new(tor, target);
                    let mut alive = true;
                    for e in 0..depth {
                        alive &= s.push(e, prefix >> e & 1 == 1);
                    }
                    if alive {
                        s.run(depth, &mut |s| leaf(&mut acc, s));
                    }
                    acc
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search thread")).collect()
    })
}

/// Exact number of valid tilings of the `l1 × l2` torus, optionally with
/// a prescribed number of rhombi in each orientation. Zero for an empty
/// torus.
pub fn enumerate_configs(l1: usize, l2: usize, rhombi: Option<[usize; 3]>) -> Result<BigUint> {
    if l1 == 0 || l2 == 0 {
        return Ok(BigUint::zero());
    }
    check_budget(l1, l2)?;
    let tor = Torus { l1, l2 };
    let parts = parallel_search(&tor, rhombi, || 0u64, |c, _| *c += 1);
    Ok(parts.into_iter().map(BigUint::from).sum())
}

/// Exact counts grouped by rhombus numbers per orientation.
pub fn count_by_orientation(l1: usize, l2: usize) -> Result<BTreeMap<[usize; 3], BigUint>> {
    let mut out = BTreeMap::new();
    if l1 == 0 || l2 == 0 {
        return Ok(out);
    }
    check_budget(l1, l2)?;
    let tor = Torus { l1, l2 };
    let parts = parallel_search(&tor, None, BTreeMap::<[usize; 3], u64>::new, |m, s| *m.entry(s.n).or_insert(0) += 1);
    for m in parts {
        for (k, v) in m {
            *out.entry(k).or_insert_with(BigUint::zero) += v;
        }
    }
    Ok(out)
}

/// Every valid tiling, in lexicographic order of edge flags (false first).
pub fn enumerate_all(l1: usize, l2: usize) -> Result<Vec<DartRhombusConfig>> {
    if l1 == 0 || l2 == 0 {
        return Ok(Vec::new());
    }
    if l1 * l2 > 12 {
        return Err(Error::BudgetExceeded(format!("listing all tilings of a {l1}×{l2} torus needs 2^{} entries", l1 * l2 + 1)));
    }
    let tor = Torus { l1, l2 };
    let parts = parallel_search(&tor, None, Vec::new, |v, s| v.push(s.occ.clone()));
    Ok(parts.into_iter().flatten().map(|occupied| DartRhombusConfig { l1, l2, occupied }).collect())
}

/// One torus of the size ladder with its exact count.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderRung {
    pub l1: usize,
    pub l2: usize,
    pub count: BigUint,
    /// Lattice triangles (each is three small triangles).
    pub triangles: usize,
    pub tiles: usize,
    pub per_tile: f64,
    pub per_small_triangle: f64,
}

/// Exact counts for every torus `l1 ≤ l2` within `budget` triangles,
/// ordered by size.
pub fn torus_ladder(budget: usize) -> Result<Vec<LadderRung>> {
    let mut dims: Vec<(usize, usize)> = (1..=budget)
        .flat_map(|a| (a..=budget).map(move |b| (a, b)))
        .filter(|&(a, b)| 2 * a * b <= budget.min(ENUMERATION_BUDGET))
        .collect();
    dims.sort_by_key(|&(a, b)| (a * b, a));
    dims.into_iter()
        .map(|(l1, l2)| {
            let count = enumerate_configs(l1, l2, None)?;
            let ln = ln_big(&count);
            Ok(LadderRung {
                l1,
                l2,
                triangles: 2 * l1 * l2,
                tiles: 3 * l1 * l2,
                per_tile: ln / (3 * l1 * l2) as f64,
                per_small_triangle: ln / (6 * l1 * l2) as f64,
                count,
            })
        })
        .collect()
}

/// Lazy Metropolis chain over toggle moves. Moves are involutions picked
/// uniformly, so proposals are symmetric and the uniform measure is
/// stationary.
pub struct McChain {
    state: DartRhombusConfig,
    moves: Vec<Vec<usize>>,
    edge_tris: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    rng: ChaCha8Rng,
    pub accepted: u64,
    pub rejected: u64,
}

impl McChain {
    pub fn new(init: DartRhombusConfig, moves: MoveSet, rng: ChaCha8Rng) -> Result<Self> {
        init.validate()?;
        let tor = init.torus();
        Ok(McChain {
            moves: tor.moves(moves),
            edge_tris: (0..tor.n_edges()).map(|e| tor.edge_triangles(e)).collect(),
            tri_edges: (0..tor.n_triangles()).map(|t| tor.triangle_edges(t)).collect(),
            state: init,
            rng,
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn state(&self) -> &DartRhombusConfig {
        &self.state
    }

    pub fn step(&mut self) {
        if self.rng.gen_bool(0.5) {
            return;
        }
        let m = self.rng.gen_range(0..self.moves.len());
        let occ = &mut self.state.occupied;
        for &e in &self.moves[m] {
            occ[e] = !occ[e];
        }
        let ok = self.moves[m].iter().flat_map(|&e| self.edge_tris[e]).all(|t| {
            let d = self.tri_edges[t].iter().filter(|&&e| occ[e]).count();
            d % 2 == 1
        });
        if ok {
            self.accepted += 1;
        } else {
            for &e in &self.moves[m] {
                occ[e] = !occ[e];
            }
            self.rejected += 1;
        }
    }
}

/// State after `steps` chain steps from `init`.
pub fn mc_sample(init: &DartRhombusConfig, steps: u64, moves: MoveSet, seed: u64) -> Result<DartRhombusConfig> {
    let mut chain = McChain::new(init.clone(), moves, ChaCha8Rng::seed_from_u64(seed))?;
    for _ in 0..steps {
        chain.step();
    }
    Ok(chain.state.clone())
}

/// Independent chains on separate streams of one seed, run in parallel.
pub fn mc_chains(
    init: &DartRhombusConfig,
    steps: u64,
    moves: MoveSet,
    seed: u64,
    chains: usize,
) -> Result<Vec<DartRhombusConfig>> {
    init.validate()?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|k| {
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    let mut chain = McChain::new(init.clone(), moves, rng)?;
                    for _ in 0..steps {
                        chain.step();
                    }
                    Ok(chain.state.clone())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
    })
}
