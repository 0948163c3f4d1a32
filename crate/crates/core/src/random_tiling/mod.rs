//! Random-tiling ensembles: i.i.d. binary chains and the dart-rhombus
//! tilings of the triangular lattice, with exact counting, Monte Carlo
//! sampling and entropy scans.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

mod dart_rhombus;
#[cfg(test)]
mod tests;

pub use dart_rhombus::{
    count_by_orientation, enumerate_all, ln_big, enumerate_configs, mc_chains, mc_sample, torus_ladder, DartRhombusConfig,
    LadderRung, McChain, MoveSet, SeedPattern, TileKind, TileRecord, ENUMERATION_BUDGET,
};

/// `−ν log ν − (1−ν) log(1−ν)` in nats, with `0 log 0 = 0`.
pub fn bernoulli_entropy(nu_a: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    h(nu_a) + h(1.0 - nu_a)
}

/// I.i.d. chain of `a`/`b` letters with `P(a) = nu_a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryEnsemble {
    pub nu_a: f64,
    pub n: usize,
    pub seed: u64,
}

impl BinaryEnsemble {
    pub fn new(nu_a: f64, n: usize, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu_a) {
            return Err(Error::invalid(format!("frequency {nu_a} outside [0, 1]")));
        }
        Ok(BinaryEnsemble { nu_a, n, seed })
    }

    pub fn nu_b(&self) -> f64 {
        1.0 - self.nu_a
    }
}

pub fn sample_binary_chain(e: &BinaryEnsemble) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(e.seed);
    (0..e.n).map(|_| if rng.gen_bool(e.nu_a) { b'a' } else { b'b' }).collect()
}

/// Empirical entropy of the overlapping length-`b` blocks, per letter.
pub fn block_entropy(word: &[u8], b: usize) -> Result<f64> {
    if b == 0 || word.len() < b {
        return Err(Error::invalid("block length must be in 1..=word length"));
    }
    let mut freq: HashMap<&[u8], u64> = HashMap::new();
    for w in word.windows(b) {
        *freq.entry(w).or_insert(0) += 1;
    }
    let total = (word.len() - b + 1) as f64;
    let s: f64 = freq
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    // a single observed block gives exactly 0 (not -0)
    Ok(if freq.len() == 1 { 0.0 } else { s / b as f64 })
}

/// One grid point of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub params: Vec<f64>,
    pub entropy: f64,
    /// Zero for exact values.
    pub error: f64,
}

/// Full quadratic least-squares model around a centre.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFit {
    pub center: Vec<f64>,
    /// Points within this distance of the centre were used.
    pub radius: f64,
    /// Constant, linear, then upper-triangular quadratic coefficients.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyScan {
    pub family: String,
    pub points: Vec<ScanPoint>,
    pub argmax: usize,
    pub fit: Option<QuadraticFit>,
}

impl EntropyScan {
    fn new(family: &str, points: Vec<ScanPoint>, fit_radius: Option<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empty density grid"));
        }
        if let Some(p) = points.iter().find(|p| !p.entropy.is_finite()) {
            return Err(Error::invalid(format!("entropy not finite at {:?}", p.params)));
        }
        let argmax = (0..points.len())
            .max_by(|&i, &j| points[i].entropy.total_cmp(&points[j].entropy).then(j.cmp(&i)))
            .expect("non-empty");
        let center = points[argmax].params.clone();
        let fit = match fit_radius {
            Some(r) => quadratic_fit(&points, &center, r),
            None => {
                // smallest ball that determines the full quadratic
                let mut radii: Vec<f64> = points.iter().map(|p| dist(&p.params, &center)).collect();
                radii.sort_by(f64::total_cmp);
                radii.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                radii.into_iter().find_map(|r| quadratic_fit(&points, &center, r))
            }
        };
        Ok(EntropyScan { family: family.to_string(), points, argmax, fit })
    }

    pub fn max(&self) -> &ScanPoint {
        &self.points[self.argmax]
    }

    /// Second differences along a 1-D grid (empty otherwise).
    pub fn second_differences(&self) -> Vec<f64> {
        if self.points.first().map_or(true, |p| p.params.len() != 1) {
            return Vec::new();
        }
        self.points.windows(3).map(|w| w[2].entropy - 2.0 * w[1].entropy + w[0].entropy).collect()
    }

    /// Delimited text: parameters, entropy, error.
    pub fn to_records(&self) -> String {
        let mut out = String::from("# family=");
        out.push_str(&self.family);
        out.push('\n');
        for p in &self.points {
            let mut cols: Vec<String> = p.params.iter().map(|&v| crate::pattern::fmt_num(v)).collect();
            cols.push(crate::pattern::fmt_num(p.entropy));
            cols.push(crate::pattern::fmt_num(p.error));
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        if let Some(f) = &self.fit {
            out.push_str(&format!("# quadratic fit r2={} radius={}\n", crate::pattern::fmt_num(f.r2), f.radius));
        }
        out
    }
}

fn monomials(x: &[f64]) -> Vec<f64> {
    let mut row = vec![1.0];
    row.extend_from_slice(x);
    for i in 0..x.len() {
        for j in i..x.len() {
            row.push(x[i] * x[j]);
        }
    }
    row
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Least-squares quadratic over the points within `radius` of `center`;
/// `None` unless the model is fully determined with a spare point.
fn quadratic_fit(points: &[ScanPoint], center: &[f64], radius: f64) -> Option<QuadraticFit> {
    let local: Vec<(Vec<f64>, f64)> = points
        .iter()
        .filter_map(|p| {
            let d: Vec<f64> = p.params.iter().zip(center).map(|(a, c)| a - c).collect();
            (dist(&p.params, center) <= radius + 1e-12).then_some((d, p.entropy))
        })
        .collect();
    let ncoef = monomials(&vec![0.0; center.len()]).len();
    if local.len() < ncoef + 1 {
        return None;
    }
    let a = DMatrix::from_fn(local.len(), ncoef, |i, j| monomials(&local[i].0)[j]);
    let y = DVector::from_iterator(local.len(), local.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    if svd.rank(1e-9) < ncoef {
        return None;
    }
    let coef = svd.solve(&y, 1e-12).ok()?;
    let resid = &y - &a * &coef;
    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = resid.iter().map(|v| v * v).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(QuadraticFit {
        center: center.to_vec(),
        radius,
        coefficients: coef.iter().copied().collect(),
        residuals: resid.iter().copied().collect(),
        r2,
    })
}

/// Ensembles accepted by [`entropy_scan`].
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Exact entropies on the given ν_a grid.
    Binary(Vec<f64>),
    /// Exact counts on the L×L torus, grouped by the number of rhombi in
    /// each of the three orientations; entropy per tile.
    DartRhombus { l: usize },
}

/// Entropy over a density grid, with a quadratic fit over the grid
/// points within `fit_radius` of the maximum (by default the smallest
/// such ball that determines the fit).
pub fn entropy_scan(family: &Family, fit_radius: Option<f64>) -> Result<EntropyScan> {
    match family {
        Family::Binary(grid) => {
            if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::invalid(format!("ν_a = {v} outside [0, 1]")));
            }
            let points =
                grid.iter().map(|&v| ScanPoint { params: vec![v], entropy: bernoulli_entropy(v), error: 0.0 }).collect();
            EntropyScan::new("binary", points, fit_radius)
        }
        Family::DartRhombus { l } => {
            let table = count_by_orientation(*l, *l)?;
            let tiles = (3 * l * l) as f64;
            let points = table
                .iter()
                .map(|(n, c)| ScanPoint {
                    params: n.iter().map(|&v| v as f64).collect(),
                    entropy: ln_big(c) / tiles,
                    error: 0.0,
                })
                .collect();
            EntropyScan::new("dart-rhombus", points, fit_radius)
        }
    }
}
