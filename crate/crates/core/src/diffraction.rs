//! Kinematic diffraction of point sets: autocorrelation, finite-patch
//! structure factors, the lattice Poisson baseline and analytic Bragg
//! amplitudes of model sets.
//!
//! Fourier kernel is `e^{−2πik·x}` throughout.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{ExactField, Lattice};
use crate::cut_project::{ProjectionScheme, TorusParameter, Window};
use crate::error::{Error, Result};
use crate::pattern::{fmt_num, key_sub, Frame, Key, Pattern};
use crate::spatial::GridIndex;
use crate::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrelationEntry {
    pub z: [f64; 2],
    /// Exact difference in the pattern's frame.
    pub key: Key,
    pub nu: f64,
}

/// Coefficients `ν(z)` per unit volume for all differences `|z| ≤ r_max`.
#[derive(Clone, Debug)]
pub struct Autocorrelation {
    pub entries: Vec<AutocorrelationEntry>,
    pub volume: f64,
}

impl Autocorrelation {
    pub fn nu(&self, key: &Key) -> f64 {
        self.entries.iter().find(|e| &e.key == key).map_or(0.0, |e| e.nu)
    }

    pub fn central(&self) -> f64 {
        self.nu(&[0; 4])
    }
}

/// Differences are grouped by exact key; free-form patterns use keys
/// quantized at 1e-9. Normalized by the region volume.
pub fn autocorrelation(p: &Pattern, r_max: f64) -> Result<Autocorrelation> {
    if !(r_max > 0.0) {
        return Err(Error::invalid("r_max must be positive"));
    }
    if p.is_empty() {
        return Err(Error::invalid("autocorrelation of an empty pattern"));
    }
    let volume = p.region().volume();
    let counts = difference_counts(p, r_max);
    let entries = counts
        .into_iter()
        .map(|(key, (z, c))| AutocorrelationEntry { z, key, nu: c as f64 / volume })
        .collect();
    Ok(Autocorrelation { entries, volume })
}

/// Pair counts per exact difference, ordered by key.
fn difference_counts(p: &Pattern, r_max: f64) -> BTreeMap<Key, ([f64; 2], u64)> {
    let pts = p.points();
    let mut counts: BTreeMap<Key, ([f64; 2], u64)> = BTreeMap::new();
    let mut add = |i: usize, j: usize| {
        let (a, b) = (&pts[i], &pts[j]);
        let key = match p.frame() {
            Frame::Float { .. } => {
                Frame::float_key([a.pos[0] - b.pos[0], a.pos[1] - b.pos[1]])
            }
            _ => key_sub(&a.key, &b.key),
        };
        let e = counts.entry(key).or_insert(([a.pos[0] - b.pos[0], a.pos[1] - b.pos[1]], 0));
        e.1 += 1;
    };
    if r_max >= p.region().diameter() {
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                add(i, j);
            }
        }
    } else {
        let pos = p.positions();
        let index = GridIndex::new(&pos, r_max.max(1e-6));
        for (i, x) in pos.iter().enumerate() {
            for j in index.within(*x, r_max) {
                add(i, j);
            }
        }
    }
    counts
}

/// `(1/V) Σ_x e^{−2πik·x}`, accumulated in the pattern's sorted order.
pub fn structure_factor(p: &Pattern, k: [f64; 2]) -> Complex64 {
    let v = p.region().volume();
    let mut s = Complex64::new(0.0, 0.0);
    for q in p.points() {
        let phase = k[0] * q.pos[0] + k[1] * q.pos[1];
        // reduce before scaling to keep the angle small
        let frac = phase - phase.round();
        s += Complex64::from_polar(1.0, -2.0 * PI * frac);
    }
    s / v
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Numeric,
    Analytic,
    Lattice,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Numeric => "numeric",
            Provenance::Analytic => "analytic",
            Provenance::Lattice => "lattice",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Peak {
    pub k: [f64; 2],
    /// Internal-space component of the dual preimage.
    pub k_int: Option<[f64; 2]>,
    pub amplitude: Option<Complex64>,
    pub intensity: f64,
    /// Dual-lattice coordinates when known.
    pub preimage: Option<Vec<i64>>,
}

impl Peak {
    pub fn k_int_norm(&self) -> Option<f64> {
        self.k_int.map(|v| v[0].hypot(v[1]))
    }

    pub fn k_norm(&self) -> f64 {
        self.k[0].hypot(self.k[1])
    }
}

/// Peaks sorted by descending intensity (ties: by |k|, then k).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub entries: Vec<Peak>,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn new(mut entries: Vec<Peak>, provenance: Provenance) -> Self {
        entries.sort_by(|a, b| {
            b.intensity
                .total_cmp(&a.intensity)
                .then(a.k_norm().total_cmp(&b.k_norm()))
                .then(a.k[0].total_cmp(&b.k[0]))
                .then(a.k[1].total_cmp(&b.k[1]))
        });
        Spectrum { entries, provenance }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Delimited text: k components, |k_int|, intensity.
    pub fn to_csv(&self, dim: usize) -> String {
        let mut out = String::new();
        let cols: Vec<&str> = ["kx", "ky"][..dim].to_vec();
        writeln!(out, "{},k_int_norm,intensity", cols.join(",")).unwrap();
        for e in &self.entries {
            let mut f: Vec<String> = e.k[..dim].iter().map(|v| fmt_num(*v)).collect();
            f.push(e.k_int_norm().map_or_else(|| "nan".to_string(), fmt_num));
            f.push(fmt_num(e.intensity));
            writeln!(out, "{}", f.join(",")).unwrap();
        }
        out
    }

    /// Disc plot: one disc per peak above `floor` (relative to the
    /// strongest), disc area proportional to intensity.
    pub fn to_svg(&self, floor: f64, k_max: f64) -> String {
        let size = 600.0;
        let half = size / 2.0;
        let scale = half / k_max.max(1e-12);
        let top = self.entries.first().map_or(1.0, |e| e.intensity).max(1e-300);
        let r_top = 0.04 * half;
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#).unwrap();
        for e in &self.entries {
            let rel = e.intensity / top;
            if rel < floor || e.k[0].abs() > k_max || e.k[1].abs() > k_max {
                continue;
            }
            let r = r_top * rel.sqrt();
            writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="black"/>"#,
                half + e.k[0] * scale,
                half - e.k[1] * scale,
                r
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Dirac comb of a lattice: peaks on all dual points `|k| ≤ cutoff`, each
/// of intensity `d²` with `d = 1/covolume`.
pub fn lattice_diffraction<F: ExactField>(lattice: &Lattice<F>, cutoff: f64) -> Result<Spectrum> {
    if !(cutoff > 0.0) {
        return Err(Error::invalid("cutoff must be positive"));
    }
    let d = lattice.density().to_f64();
    let dual = lattice.dual();
    let entries = dual
        .points_within(cutoff)
        .into_iter()
        .map(|(coords, v)| Peak {
            k: [v[0], v.get(1).copied().unwrap_or(0.0)],
            k_int: None,
            amplitude: Some(Complex64::new(d, 0.0)),
            intensity: d * d,
            preimage: Some(coords),
        })
        .collect();
    Ok(Spectrum::new(entries, Provenance::Lattice))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `|k|·diam(W)` below which the window transform switches to its power
/// series; at this size the boundary sum loses at most ~1e-14 to
/// cancellation while 24 series terms are exact to rounding.
const SERIES_THRESHOLD: f64 = 0.1;
const SERIES_TERMS: usize = 24;

/// `∫_W e^{2πik·u} du`.
pub fn window_transform(w: &Window, k: [f64; 2]) -> Result<Complex64> {
    let v = w.vertices_f64();
    match w {
        Window::Interval { .. } => {
            let (lo, hi) = (v[0][0], v[1][0]);
            let len = hi - lo;
            let mid = 0.5 * (lo + hi);
            Ok(Complex64::from_polar(len * sinc(PI * k[0] * len), 2.0 * PI * k[0] * mid))
        }
        Window::Polygon { .. } => {
            let kk = k[0] * k[0] + k[1] * k[1];
            if kk.sqrt() * w.diameter() < SERIES_THRESHOLD {
                return Ok(polygon_series(&v, k));
            }
            let n = v.len();
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let (a, b) = (v[i], v[(i + 1) % n]);
                let d = [b[0] - a[0], b[1] - a[1]];
                let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                // outward normal times edge length for a counterclockwise polygon
                let kn = k[0] * d[1] - k[1] * d[0];
                let kd = k[0] * d[0] + k[1] * d[1];
                let km = k[0] * m[0] + k[1] * m[1];
                s += Complex64::from_polar(kn * sinc(PI * kd), 2.0 * PI * km);
            }
            Ok(s / Complex64::new(0.0, 2.0 * PI * kk))
        }
    }
}

/// Power series `Σ (2πi)^n/n! ∫_W (k·u)^n du` over a fan triangulation;
/// for a triangle `∫ (k·u)^n = 2|T| n!/(n+2)! Σ_{a+b+c=n} α^a β^b γ^c`.
fn polygon_series(v: &[[f64; 2]], k: [f64; 2]) -> Complex64 {
    let dot = |p: [f64; 2]| k[0] * p[0] + k[1] * p[1];
    let mut total = Complex64::new(0.0, 0.0);
    for i in 1..v.len() - 1 {
        let (p0, p1, p2) = (v[0], v[i], v[i + 1]);
        let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
        let (al, be, ga) = (dot(p0), dot(p1), dot(p2));
        // h_n = complete homogeneous symmetric polynomial of degree n
        let mut h = vec![0.0; SERIES_TERMS + 1];
        for (n, hn) in h.iter_mut().enumerate() {
            let mut s = 0.0;
            for a in 0..=n {
                for b in 0..=n - a {
                    s += al.powi(a as i32) * be.powi(b as i32) * ga.powi((n - a - b) as i32);
                }
            }
            *hn = s;
        }
        let mut coef = Complex64::new(1.0, 0.0); // (2πi)^n / n!
        for (n, hn) in h.iter().enumerate() {
            // 2|T| n!/(n+2)! · (2πi)^n/n! = 2|T| (2πi)^n / (n+2)!
            let fact = ((n + 1) * (n + 2)) as f64;
            total += coef * (2.0 * area * hn / fact);
            coef *= Complex64::new(0.0, 2.0 * PI) / (n + 1) as f64;
        }
    }
    total
}

/// Reciprocal-space data of a projection scheme: `M^{-T}` splits a dual
/// vector `h` into physical `q`, internal `κ` and height `η` parts.
struct DualSplit {
    minv_t: DMatrix<f64>,
    d: usize,
    ni: usize,
    height: bool,
}

impl DualSplit {
    fn new(scheme: &ProjectionScheme) -> Result<Self> {
        let m = scheme.full_matrix();
        let minv_t = m.try_inverse().ok_or(Error::SingularBasis)?.transpose();
        Ok(DualSplit {
            minv_t,
            d: scheme.physical_dimension(),
            ni: scheme.internal_dimension(),
            height: scheme.has_height(),
        })
    }

    fn split(&self, h: &[i64]) -> ([f64; 2], [f64; 2], f64) {
        let n = h.len();
        let v: Vec<f64> = (0..n).map(|r| (0..n).map(|c| self.minv_t[(r, c)] * h[c] as f64).sum()).collect();
        let mut q = [0.0; 2];
        let mut kap = [0.0; 2];
        q[..self.d].copy_from_slice(&v[..self.d]);
        kap[..self.ni].copy_from_slice(&v[self.d..self.d + self.ni]);
        let eta = if self.height { v[n - 1] } else { 0.0 };
        (q, kap, eta)
    }
}

fn amplitude_at(scheme: &ProjectionScheme, kap: [f64; 2], eta: f64) -> Result<Complex64> {
    let mut a = Complex64::new(0.0, 0.0);
    for (class, w) in scheme.windows() {
        if w.is_empty() {
            continue;
        }
        let phase = Complex64::from_polar(1.0, 2.0 * PI * (eta * *class as f64).rem_euclid(1.0));
        a += phase * window_transform(w, kap)?;
    }
    Ok(a / scheme.covolume())
}

/// Bragg peak of the model set at `γ = 0` for dual coordinates `k_pre`:
/// returns `(k, k_int, amplitude)`.
pub fn bragg_amplitude(scheme: &ProjectionScheme, k_pre: &[i64]) -> Result<([f64; 2], [f64; 2], Complex64)> {
    if k_pre.len() != scheme.dimension() {
        return Err(Error::invalid("dual vector has the wrong length"));
    }
    let split = DualSplit::new(scheme)?;
    let (q, kap, eta) = split.split(k_pre);
    Ok((q, kap, amplitude_at(scheme, kap, eta)?))
}

/// Constant `c` with `|a(k)|² ≤ c/|k_int|²`: each boundary piece
/// contributes at most `length/(2π|k_int|)` to the window transform
/// (endpoints count 1 each for intervals).
pub fn envelope_constant(scheme: &ProjectionScheme) -> f64 {
    let boundary: f64 = scheme
        .windows()
        .iter()
        .filter(|(_, w)| !w.is_empty())
        .map(|(_, w)| match w {
            Window::Interval { .. } => 2.0,
            Window::Polygon { .. } => {
                let v = w.vertices_f64();
                (0..v.len()).map(|i| {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    (b[0] - a[0]).hypot(b[1] - a[1])
                }).sum()
            }
        })
        .sum();
    (boundary / (2.0 * PI * scheme.covolume())).powi(2)
}

/// All Bragg peaks with `|k| ≤ k_max` and intensity at least
/// `floor · d²`. Exhaustive: the envelope bounds `|k_int|` from above, and
/// dual vectors are enumerated over the resulting box (for height-indexed
/// schemes modulo the all-ones vector, fixing `h_0 = 0`).
pub fn model_set_spectrum(
    scheme: &ProjectionScheme,
    gamma: &TorusParameter,
    k_max: f64,
    floor: f64,
) -> Result<Spectrum> {
    if !(floor > 0.0) {
        return Err(Error::invalid("intensity floor must be positive"));
    }
    if !(k_max > 0.0) {
        return Err(Error::invalid("k range must be positive"));
    }
    if gamma.len() != scheme.dimension() {
        return Err(Error::invalid("torus parameter has the wrong length"));
    }
    let n = scheme.dimension();
    let d = scheme.physical_dimension();
    let ni = scheme.internal_dimension();
    let dens = scheme.density();
    let min_intensity = floor * dens * dens;
    let kap_max = (envelope_constant(scheme) / min_intensity).sqrt();
    let g = gamma.to_f64();
    let split = DualSplit::new(scheme)?;
    // h = M^T (q, κ, η); with h_0 = 0 eliminating η when a height exists.
    let mt = scheme.full_matrix().transpose();
    let free: Vec<usize> = if scheme.has_height() { (1..n).collect() } else { (0..n).collect() };
    let ranges: Vec<(i64, i64)> = free
        .iter()
        .map(|&j| {
            let mut span = 0.0;
            for r in 0..d + ni {
                let mut c = mt[(j, r)];
                if scheme.has_height() {
                    c -= mt[(0, r)];
                }
                span += c.abs() * if r < d { k_max } else { kap_max };
            }
            let b = (span + 1e-9).floor() as i64;
            (-b, b)
        })
        .collect();
    let mut entries = Vec::new();
    let mut h = vec![0i64; n];
    let mut cur = vec![0i64; free.len()];
    for (c, r) in cur.iter_mut().zip(&ranges) {
        *c = r.0;
    }
    'outer: loop {
        for (slot, &j) in free.iter().enumerate() {
            h[j] = cur[slot];
        }
        let (q, kap, eta) = split.split(&h);
        if q[0].hypot(q[1]) <= k_max + 1e-12 && kap[0].hypot(kap[1]) <= kap_max + 1e-12 {
            let phase = -2.0 * PI * h.iter().zip(&g).map(|(a, b)| *a as f64 * b).sum::<f64>().rem_euclid(1.0);
            let a = amplitude_at(scheme, kap, eta)? * Complex64::from_polar(1.0, phase);
            let intensity = a.norm_sqr();
            if intensity >= min_intensity {
                entries.push(Peak { k: q, k_int: Some(kap), amplitude: Some(a), intensity, preimage: Some(h.clone()) });
            }
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                break 'outer;
            }
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
    Ok(Spectrum::new(entries, Provenance::Analytic))
}

/// Numeric spectrum of a finite patch at given wave vectors.
pub fn numeric_spectrum(p: &Pattern, ks: &[[f64; 2]]) -> Spectrum {
    let entries = ks
        .iter()
        .map(|&k| {
            let a = structure_factor(p, k);
            Peak { k, k_int: None, amplitude: Some(a), intensity: a.norm_sqr(), preimage: None }
        })
        .collect();
    Spectrum::new(entries, Provenance::Numeric)
}

/// Largest relative gap between `V|S(k)|²` and `Σ_z ν(z) e^{−2πik·z}`
/// over `ks`, normalized by the central value `V d²`. With `r_max = None`
/// all differences enter and both sides agree up to rounding; a finite
/// `r_max` truncates the autocorrelation and exposes the finite-size gap.
pub fn wiener_check(p: &Pattern, ks: &[[f64; 2]], r_max: Option<f64>) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::invalid("wiener check of an empty pattern"));
    }
    let v = p.region().volume();
    let r = r_max.unwrap_or(f64::INFINITY).min(p.region().diameter() * 2.0 + 1.0);
    let ac = autocorrelation(p, r)?;
    let central = v * ac.central().powi(2);
    let mut worst: f64 = 0.0;
    for &k in ks {
        let lhs = v * structure_factor(p, k).norm_sqr();
        let mut rhs = Complex64::new(0.0, 0.0);
        for e in &ac.entries {
            let phase = k[0] * e.z[0] + k[1] * e.z[1];
            rhs += Complex64::from_polar(e.nu, -2.0 * PI * (phase - phase.round()));
        }
        worst = worst.max((lhs - rhs.re).abs().max(rhs.im.abs()) / central);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostPeriod {
    pub m: u64,
    pub t: f64,
    /// Sampled `sup_x |f(x) − f(x+t)|`.
    pub deviation: f64,
}

/// `f(x) = sin x + sin τx`.
pub fn quasiperiodic_signal(x: f64) -> f64 {
    x.sin() + (TAU * x).sin()
}

/// Almost periods `t = 2πm`, `1 ≤ m ≤ max_m`, of [`quasiperiodic_signal`]
/// with sampled sup-deviation below `eps`.
///
/// Every `m` in range is screened on a coarse subset of the sample grid
/// (a coarse sup ≥ ε already disqualifies); survivors, which cluster at
/// the convergent denominators of τ and their neighbours, are checked on
/// all `samples` points spread over many periods of `sin τx`.
pub fn almost_periods(eps: f64, max_m: u64, samples: usize) -> Result<Vec<AlmostPeriod>> {
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let span = 2.0 * PI * 1000.0;
    let stride = (samples / 1000).max(1);
    let sup_over = |t: f64, step: usize| {
        let mut sup: f64 = 0.0;
        for i in (0..samples).step_by(step) {
            let x = span * (i as f64 + 0.5) / samples as f64;
            sup = sup.max((quasiperiodic_signal(x) - quasiperiodic_signal(x + t)).abs());
        }
        sup
    };
    let mut out = Vec::new();
    for m in 1..=max_m {
        let t = 2.0 * PI * m as f64;
        if stride > 1 && sup_over(t, stride) >= eps {
            continue;
        }
        let sup = sup_over(t, 1);
        if sup < eps {
            out.push(AlmostPeriod { m, t, deviation: sup });
        }
    }
    Ok(out)
}
