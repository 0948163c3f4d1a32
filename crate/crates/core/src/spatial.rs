//! Uniform grid index for radius queries on planar point sets.

use std::collections::HashMap;

pub struct GridIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    pos: Vec<[f64; 2]>,
}

impl GridIndex {
    pub fn new(pos: &[[f64; 2]], cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell must be positive");
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in pos.iter().enumerate() {
            buckets.entry(Self::cell_of(p, cell)).or_default().push(i);
        }
        GridIndex { cell, buckets, pos: pos.to_vec() }
    }

    fn cell_of(p: &[f64; 2], cell: f64) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// Calls `f(index, distance)` for every point within `r` of `q`.
    pub fn for_each_within(&self, q: [f64; 2], r: f64, mut f: impl FnMut(usize, f64)) {
        let (cx, cy) = Self::cell_of(&q, self.cell);
        let span = (r / self.cell).ceil() as i64;
        for dx in -span..=span {
            for dy in -span..=span {
                let Some(bucket) = self.buckets.get(&(cx + dx, cy + dy)) else { continue };
                for &i in bucket {
                    let p = self.pos[i];
                    let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                    if d <= r {
                        f(i, d);
                    }
                }
            }
        }
    }

    /// Indices within `r` of `q`, ascending.
    pub fn within(&self, q: [f64; 2], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(q, r, |i, _| out.push(i));
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_brute_force() {
        let pos: Vec<[f64; 2]> =
            (0..200).map(|i| [((i * 37) % 101) as f64 * 0.13, ((i * 53) % 97) as f64 * 0.11]).collect();
        let g = GridIndex::new(&pos, 0.7);
        let q = [5.0, 4.0];
        let brute: Vec<usize> = (0..pos.len())
            .filter(|&i| ((pos[i][0] - q[0]).powi(2) + (pos[i][1] - q[1]).powi(2)).sqrt() <= 2.3)
            .collect();
        assert_eq!(g.within(q, 2.3), brute);
    }
}
