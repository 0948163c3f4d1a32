//! Symbolic and geometric inflation rules, subword complexity, and
//! atlas-based inflation and matching-rule checks.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::pattern::{Frame, Pattern, Point, Region};

mod inflation;
pub mod tiling;

pub use inflation::{
    build_atlas_by_inflation, inflation_symmetry_check, matching_rule_check, square_regrouping_locality,
    atlas_in_outline, AtlasBuild, GeometricInflation, InflationRule, MatchReport, Reference,
};
pub use tiling::{periodic_thick_rhombs, Placement, Tile, TileFamily, TilingConfig, View};

/// A substitution on a small alphabet of ASCII letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSubstitution {
    alphabet: Vec<u8>,
    images: Vec<Vec<u8>>,
}

impl SymbolicSubstitution {
    pub fn new(rules: &[(char, &str)]) -> Result<Self> {
        let alphabet: Vec<u8> = rules.iter().map(|&(c, _)| c as u8).collect();
        let images: Vec<Vec<u8>> = rules.iter().map(|&(_, w)| w.as_bytes().to_vec()).collect();
        let mut seen = HashSet::new();
        if !alphabet.iter().all(|c| seen.insert(*c)) {
            return Err(Error::invalid("letters must be distinct"));
        }
        for w in &images {
            if w.is_empty() || w.iter().any(|c| !alphabet.contains(c)) {
                return Err(Error::invalid("images must be non-empty words over the alphabet"));
            }
        }
        Ok(SymbolicSubstitution { alphabet, images })
    }

    /// a → ab, b → a.
    pub fn fibonacci() -> Self {
        SymbolicSubstitution::new(&[('a', "ab"), ('b', "a")]).expect("valid rule")
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    fn index(&self, c: u8) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|&x| x == c)
            .ok_or_else(|| Error::invalid(format!("letter {:?} not in alphabet", c as char)))
    }

    /// k-fold image of `word`.
    pub fn substitute(&self, word: &[u8], k: usize) -> Result<Vec<u8>> {
        let mut w = word.to_vec();
        for _ in 0..k {
            let mut next = Vec::with_capacity(w.len() * 2);
            for &c in &w {
                next.extend_from_slice(&self.images[self.index(c)?]);
            }
            w = next;
        }
        Ok(w)
    }

    /// `M[i][j]` = occurrences of letter i in the image of letter j.
    pub fn matrix(&self) -> Vec<Vec<u128>> {
        let n = self.alphabet.len();
        let mut m = vec![vec![0u128; n]; n];
        for (j, img) in self.images.iter().enumerate() {
            for &c in img {
                m[self.index(c).expect("validated")][j] += 1;
            }
        }
        m
    }

    pub fn counts(&self, word: &[u8]) -> Result<Vec<u128>> {
        let mut v = vec![0u128; self.alphabet.len()];
        for &c in word {
            v[self.index(c)?] += 1;
        }
        Ok(v)
    }

    /// Letter counts after `k` steps predicted by `M^k · counts(word)`.
    pub fn predicted_counts(&self, word: &[u8], k: usize) -> Result<Vec<u128>> {
        let m = self.matrix();
        let mut v = self.counts(word)?;
        for _ in 0..k {
            v = m.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        }
        Ok(v)
    }

    /// Some power of the matrix (up to n² steps) is strictly positive.
    pub fn is_primitive(&self) -> bool {
        let m = self.matrix();
        let n = m.len();
        let mut p: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        for _ in 0..n * n {
            if p.iter().flatten().all(|&x| x) {
                return true;
            }
            p = (0..n).map(|i| (0..n).map(|j| (0..n).any(|l| p[i][l] && m[l][j] > 0)).collect()).collect();
        }
        false
    }

    /// Prefix of the one-sided fixed point starting with `seed` (which
    /// must begin its own image).
    pub fn fixed_point(&self, seed: u8, len: usize) -> Result<Vec<u8>> {
        let img = &self.images[self.index(seed)?];
        if img.first() != Some(&seed) || img.len() < 2 {
            return Err(Error::invalid("seed letter is not the start of a growing fixed point"));
        }
        let mut w = vec![seed];
        while w.len() < len {
            w = self.substitute(&w, 1)?;
        }
        w.truncate(len);
        Ok(w)
    }
}

/// Factor count of one length over a word prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complexity {
    pub n: usize,
    pub count: usize,
    /// The count over the first half of the prefix already equals `count`.
    pub stable: bool,
}

fn distinct_factors(word: &[u8], n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    if word.len() < n {
        return 0;
    }
    word.windows(n).collect::<HashSet<_>>().len()
}

/// Number of distinct length-`n` factors of `word`, with a doubling check.
pub fn complexity(word: &[u8], n: usize) -> Complexity {
    let count = distinct_factors(word, n);
    let half = distinct_factors(&word[..word.len() / 2], n);
    Complexity { n, count, stable: word.len() >= 2 * n && half == count }
}

/// `log(p(n))/n` for n = 1..=n_max.
pub fn complexity_entropy(word: &[u8], n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    Ok((1..=n_max).map(|n| (distinct_factors(word, n).max(1) as f64).ln() / n as f64).collect())
}

/// Chain with gaps τ for `a` and 1 for `b`, starting at 0, in the Z[τ] frame.
pub fn word_to_chain(word: &[u8]) -> Result<Pattern> {
    let mut key = [0i64; 4];
    let mut points = Vec::with_capacity(word.len() + 1);
    let push = |points: &mut Vec<Point>, key: [i64; 4]| {
        points.push(Point { pos: Frame::Golden.position(&key), key, label: 0, preimage: Vec::new() })
    };
    push(&mut points, key);
    for &c in word {
        match c {
            b'a' => key[1] += 1,
            b'b' => key[0] += 1,
            _ => return Err(Error::invalid("chain words use the letters a and b")),
        }
        push(&mut points, key);
    }
    let end = Frame::Golden.position(&key)[0];
    Pattern::new(Frame::Golden, points, Region::interval(0.0, end), "fibonacci-substitution")
}

/// Gap word of a chain: `a` for gaps ≈ τ, `b` for gaps ≈ 1.
pub fn chain_to_word(p: &Pattern) -> Result<Vec<u8>> {
    p.points()
        .windows(2)
        .map(|w| {
            let gap = w[1].pos[0] - w[0].pos[0];
            if (gap - crate::TAU).abs() < 1e-6 {
                Ok(b'a')
            } else if (gap - 1.0).abs() < 1e-6 {
                Ok(b'b')
            } else {
                Err(Error::invalid(format!("gap {gap} is neither 1 nor τ")))
            }
        })
        .collect()
}

/// Exact letter-frequency ratio `#a / #b` after `k` steps from `a`.
pub fn fibonacci_ratio(k: usize) -> f64 {
    let s = SymbolicSubstitution::fibonacci();
    let v = s.predicted_counts(b"a", k).expect("valid word");
    v[0] as f64 / v[1].max(1) as f64
}

/// Registered rule names.
pub const RULES: [&str; 3] = ["fibonacci", "penrose-robinson", "ttt"];

/// Count each length-`n` factor (for reporting).
pub fn factor_table(word: &[u8], n: usize) -> BTreeMap<Vec<u8>, usize> {
    let mut t = BTreeMap::new();
    for w in word.windows(n.max(1)) {
        *t.entry(w.to_vec()).or_insert(0) += 1;
    }
    t
}
