//! The three built-in projection schemes and their descriptors.

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::window::Window;
use crate::algebra::{hermite_normal_form, Cyclo, CycloOrder};
use crate::error::{Error, Result};
use crate::pattern::Frame;
use crate::TAU;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Fibonacci,
    AmmannBeenker,
    Penrose,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Fibonacci => "fibonacci",
            SchemeKind::AmmannBeenker => "ammann-beenker",
            SchemeKind::Penrose => "penrose",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fibonacci" => Ok(SchemeKind::Fibonacci),
            "ammann-beenker" => Ok(SchemeKind::AmmannBeenker),
            "penrose" => Ok(SchemeKind::Penrose),
            _ => Err(Error::invalid(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Embedding `Z^n` with physical and internal projections and one window
/// per discrete class.
///
/// For Penrose the class is the height `Σ y_j`; classes 1..4 carry
/// pentagonal windows and heights 0 and 5 are single points, so they are
/// never accepted. The vector (1,1,1,1,1) projects to zero in both spaces
/// and only shifts the height by 5, so every point has exactly one
/// representative with height in 1..4.
#[derive(Clone, Debug)]
pub struct ProjectionScheme {
    pub(crate) kind: SchemeKind,
    pub(crate) n: usize,
    pub(crate) d: usize,
    /// Float physical image of `e_j`.
    pub(crate) phys: Vec<[f64; 2]>,
    /// Float internal image of `e_j` (1D schemes use the first entry).
    pub(crate) internal: Vec<[f64; 2]>,
    /// Exact physical image of `e_j` in frame coordinates.
    pub(crate) phys_exact: Vec<[i64; 4]>,
    /// Exact internal image of `e_j` in window coordinates.
    pub(crate) internal_exact: Vec<[i64; 4]>,
    pub(crate) has_height: bool,
    pub(crate) windows: Vec<(i64, Window)>,
    pub(crate) frame: Frame,
    pub(crate) covolume: f64,
}

fn golden_pair(v: [i64; 2]) -> [i64; 4] {
    [v[0], v[1], 0, 0]
}

fn cyclo_f64(c: Cyclo, s: f64) -> [f64; 2] {
    let (x, y) = c.to_complex();
    [x * s, y * s]
}

impl ProjectionScheme {
    /// `Z²` with physical `m + nτ` and internal `m + n(1−τ)`; window
    /// `[1−τ, 1)`, the internal image of the half-open unit square.
    pub fn fibonacci() -> Self {
        let window = Window::interval([1, -1], [1, 0]).expect("valid interval");
        ProjectionScheme::build(
            SchemeKind::Fibonacci,
            1,
            vec![[1.0, 0.0], [TAU, 0.0]],
            vec![[1.0, 0.0], [1.0 - TAU, 0.0]],
            vec![golden_pair([1, 0]), golden_pair([0, 1])],
            vec![golden_pair([1, 0]), golden_pair([1, -1])],
            false,
            vec![(0, window)],
            Frame::Golden,
        )
    }

    /// `Z⁴` with physical `ζ₈^j/√2` and internal `ζ₈^{3j}/√2`; the window
    /// is the octagon spanned by the internal images of the unit cube.
    pub fn ammann_beenker() -> Self {
        let o = CycloOrder::Eight;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phys_c: Vec<Cyclo> = (0..4).map(|j| Cyclo::zeta_pow(o, j)).collect();
        let int_c: Vec<Cyclo> = (0..4).map(|j| Cyclo::zeta_pow(o, 3 * j)).collect();
        let corners: Vec<Cyclo> = (0..16u32)
            .map(|mask| {
                (0..4).filter(|j| mask >> j & 1 == 1).fold(Cyclo::zero(o), |acc, j| acc + int_c[j])
            })
            .collect();
        let window = Window::hull(o, &corners, s).expect("octagon");
        ProjectionScheme::build(
            SchemeKind::AmmannBeenker,
            2,
            phys_c.iter().map(|&c| cyclo_f64(c, s)).collect(),
            int_c.iter().map(|&c| cyclo_f64(c, s)).collect(),
            phys_c.iter().map(|c| c.c).collect(),
            int_c.iter().map(|c| c.c).collect(),
            false,
            vec![(0, window)],
            Frame::Cyclo { order: o, scale: s },
        )
    }

    /// `Z⁵` with physical `ζ₅^j` and internal `ζ₅^{2j}`; class-`k` window
    /// is the hull of internal images of unit-cube vertices with `k` ones.
    pub fn penrose() -> Self {
        let o = CycloOrder::Five;
        let phys_c: Vec<Cyclo> = (0..5).map(|j| Cyclo::zeta_pow(o, j)).collect();
        let int_c: Vec<Cyclo> = (0..5).map(|j| Cyclo::zeta_pow(o, 2 * j)).collect();
        let windows = (1..=4)
            .map(|k| {
                let pts: Vec<Cyclo> = (0..32u32)
                    .filter(|m| m.count_ones() == k)
                    .map(|mask| {
                        (0..5).filter(|j| mask >> j & 1 == 1).fold(Cyclo::zero(o), |acc, j| acc + int_c[j])
                    })
                    .collect();
                (k as i64, Window::hull(o, &pts, 1.0).expect("pentagon"))
            })
            .collect();
        ProjectionScheme::build(
            SchemeKind::Penrose,
            2,
            phys_c.iter().map(|&c| cyclo_f64(c, 1.0)).collect(),
            int_c.iter().map(|&c| cyclo_f64(c, 1.0)).collect(),
            phys_c.iter().map(|c| c.c).collect(),
            int_c.iter().map(|c| c.c).collect(),
            true,
            windows,
            Frame::Cyclo { order: o, scale: 1.0 },
        )
    }

    pub fn by_kind(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::Fibonacci => Self::fibonacci(),
            SchemeKind::AmmannBeenker => Self::ammann_beenker(),
            SchemeKind::Penrose => Self::penrose(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        kind: SchemeKind,
        d: usize,
        phys: Vec<[f64; 2]>,
        internal: Vec<[f64; 2]>,
        phys_exact: Vec<[i64; 4]>,
        internal_exact: Vec<[i64; 4]>,
        has_height: bool,
        windows: Vec<(i64, Window)>,
        frame: Frame,
    ) -> Self {
        let n = phys.len();
        let mut s = ProjectionScheme {
            kind,
            n,
            d,
            phys,
            internal,
            phys_exact,
            internal_exact,
            has_height,
            windows,
            frame,
            covolume: 0.0,
        };
        s.covolume = s.full_matrix().determinant().abs();
        debug_assert!(s.check_injective(), "internal map must be injective");
        s
    }

    /// Rows: physical coordinates, internal coordinates, height.
    pub(crate) fn full_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        let ni = n - self.d - usize::from(self.has_height);
        for j in 0..n {
            for r in 0..self.d {
                m[(r, j)] = self.phys[j][r];
            }
            for r in 0..ni {
                m[(self.d + r, j)] = self.internal[j][r];
            }
            if self.has_height {
                m[(n - 1, j)] = 1.0;
            }
        }
        m
    }

    /// No nonzero lattice vector has zero internal image (with the height
    /// index appended when present); checked exactly via module rank.
    fn check_injective(&self) -> bool {
        // rank of the n×k integer matrix [internal_exact | height]
        let cols: Vec<Vec<i64>> = self
            .internal_exact
            .iter()
            .map(|r| {
                let mut row = r.to_vec();
                if self.has_height {
                    row.push(1);
                }
                row
            })
            .collect();
        hermite_normal_form(&cols).len() == self.n
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Embedding dimension `n`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Physical dimension `d`.
    pub fn physical_dimension(&self) -> usize {
        self.d
    }

    /// Internal dimension (excluding the discrete height index).
    pub fn internal_dimension(&self) -> usize {
        self.n - self.d - usize::from(self.has_height)
    }

    pub fn has_height(&self) -> bool {
        self.has_height
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn windows(&self) -> &[(i64, Window)] {
        &self.windows
    }

    pub fn window(&self, class: i64) -> Option<&Window> {
        self.windows.iter().find(|(c, _)| *c == class).map(|(_, w)| w)
    }

    /// Replace one class window (e.g. to shrink it).
    pub fn with_window(mut self, class: i64, window: Window) -> Result<Self> {
        let slot = self
            .windows
            .iter_mut()
            .find(|(c, _)| *c == class)
            .ok_or_else(|| Error::invalid(format!("no window for class {class}")))?;
        if slot.1.dim() != window.dim() {
            return Err(Error::invalid("replacement window has the wrong dimension"));
        }
        slot.1 = window;
        Ok(self)
    }

    /// Covolume of the embedding lattice in (physical, internal, height)
    /// coordinates.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Points per unit length/area: total window measure over covolume.
    pub fn density(&self) -> f64 {
        self.windows.iter().map(|(_, w)| w.measure()).sum::<f64>() / self.covolume
    }

    pub fn physical_image(&self, y: &[f64]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (v, a) in y.iter().zip(&self.phys) {
            p[0] += v * a[0];
            p[1] += v * a[1];
        }
        p
    }

    pub fn internal_image(&self, y: &[f64]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (v, a) in y.iter().zip(&self.internal) {
            p[0] += v * a[0];
            p[1] += v * a[1];
        }
        p
    }

    pub fn descriptor(&self) -> SchemeDescriptor {
        let ni = self.internal_dimension();
        SchemeDescriptor {
            name: self.kind.name().to_string(),
            embedding_dimension: self.n,
            physical_dimension: self.d,
            lattice_basis: (0..self.n).map(|i| (0..self.n).map(|j| i64::from(i == j)).collect()).collect(),
            physical_rows: (0..self.d).map(|r| self.phys.iter().map(|p| p[r]).collect()).collect(),
            internal_rows: (0..ni).map(|r| self.internal.iter().map(|p| p[r]).collect()).collect(),
            height_row: self.has_height.then(|| vec![1; self.n]),
            windows: self
                .windows
                .iter()
                .map(|(c, w)| WindowDescriptor { class: *c, vertices: w.vertices_f64(), exact: w.clone() })
                .collect(),
            covolume: self.covolume,
            density: self.density(),
            notes: match self.kind {
                SchemeKind::Penrose => vec![
                    "embedding Z^5 is redundant: (1,1,1,1,1) has zero physical and internal image".into(),
                    "class = height sum of coordinates; accepted classes 1..4".into(),
                ],
                _ => Vec::new(),
            },
        }
    }

    /// Rebuild a built-in scheme from its descriptor, checking windows.
    pub fn from_descriptor(desc: &SchemeDescriptor) -> Result<Self> {
        let mut s = ProjectionScheme::by_kind(SchemeKind::parse(&desc.name)?);
        for w in &desc.windows {
            let replaced = s.clone().with_window(w.class, w.exact.clone())?;
            s = replaced;
        }
        if s.descriptor().embedding_dimension != desc.embedding_dimension {
            return Err(Error::invalid("descriptor dimension mismatch"));
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDescriptor {
    pub class: i64,
    pub vertices: Vec<[f64; 2]>,
    pub exact: Window,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDescriptor {
    pub name: String,
    pub embedding_dimension: usize,
    pub physical_dimension: usize,
    pub lattice_basis: Vec<Vec<i64>>,
    pub physical_rows: Vec<Vec<f64>>,
    pub internal_rows: Vec<Vec<f64>>,
    pub height_row: Option<Vec<i64>>,
    pub windows: Vec<WindowDescriptor>,
    pub covolume: f64,
    pub density: f64,
    pub notes: Vec<String>,
}

/// Offset `γ` of the lattice, i.e. a point of the torus `R^n / Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum TorusParameter {
    Exact(Vec<Rational64>),
    Float(Vec<f64>),
}

impl TorusParameter {
    pub fn zero(n: usize) -> Self {
        TorusParameter::Exact(vec![Rational64::from_integer(0); n])
    }

    pub fn len(&self) -> usize {
        match self {
            TorusParameter::Exact(v) => v.len(),
            TorusParameter::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TorusParameter::Exact(_))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            TorusParameter::Exact(v) => v.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect(),
            TorusParameter::Float(v) => v.clone(),
        }
    }

    /// Parses comma-separated entries, each an integer, a fraction `p/q`
    /// or a decimal. Any decimal makes the whole parameter a float one.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        let exact: Option<Vec<Rational64>> = parts
            .iter()
            .map(|p| match p.split_once('/') {
                Some((a, b)) => {
                    let (a, b) = (a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?);
                    (b != 0).then(|| Rational64::new(a, b))
                }
                None => p.parse::<i64>().ok().map(Rational64::from_integer),
            })
            .collect();
        if let Some(v) = exact {
            return Ok(TorusParameter::Exact(v));
        }
        let floats: std::result::Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
        match floats {
            Ok(v) if v.iter().all(|x| x.is_finite()) => Ok(TorusParameter::Float(v)),
            _ => Err(Error::invalid(format!("cannot parse torus parameter '{s}'"))),
        }
    }

    /// Integer part and common-denominator numerators of the fractional
    /// part: `γ = floor + frac / den`.
    pub(crate) fn split_exact(v: &[Rational64]) -> (Vec<i64>, Vec<i64>, i64) {
        let floor: Vec<i64> = v.iter().map(|r| r.floor().to_integer()).collect();
        let den = v.iter().fold(1i64, |acc, r| num_integer::lcm(acc, *r.denom()));
        let frac = v
            .iter()
            .zip(&floor)
            .map(|(r, f)| ((r - Rational64::from_integer(*f)) * Rational64::from_integer(den)).to_integer())
            .collect();
        (floor, frac, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_density_and_covolume() {
        let s = ProjectionScheme::fibonacci();
        assert!((s.covolume() - 5f64.sqrt()).abs() < 1e-12);
        assert!((s.density() - TAU / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ammann_beenker_window_is_octagon() {
        let s = ProjectionScheme::ammann_beenker();
        match s.window(0).unwrap() {
            Window::Polygon { vertices, .. } => assert_eq!(vertices.len(), 8),
            _ => panic!("expected polygon"),
        }
        assert!((s.covolume() - 1.0).abs() < 1e-12);
        // octagon of edge 1/√2·... : area = 2(1+√2)·a² with a = edge length
        let v = s.window(0).unwrap().vertices_f64();
        let a = ((v[1][0] - v[0][0]).powi(2) + (v[1][1] - v[0][1]).powi(2)).sqrt();
        assert!((s.density() - 2.0 * (1.0 + 2f64.sqrt()) * a * a).abs() < 1e-12);
    }

    #[test]
    fn penrose_windows_are_pentagons_and_inversion_pairs() {
        let s = ProjectionScheme::penrose();
        for (_, w) in s.windows() {
            match w {
                Window::Polygon { vertices, .. } => assert_eq!(vertices.len(), 5),
                _ => panic!(),
            }
        }
        for k in 1..=4 {
            assert!(s.window(k).unwrap().same_shape(&s.window(5 - k).unwrap().negated()));
        }
        assert!((s.covolume() - 25.0 * 5f64.sqrt() / 4.0).abs() < 1e-9);
        // vertex density of the unit-edge rhombic Penrose tiling
        let thick = (72f64).to_radians().sin();
        let thin = (36f64).to_radians().sin();
        let mean_area = (TAU * thick + thin) / (TAU + 1.0);
        assert!((s.density() - 1.0 / mean_area).abs() < 1e-9);
    }

    #[test]
    fn descriptor_round_trip() {
        for kind in [SchemeKind::Fibonacci, SchemeKind::AmmannBeenker, SchemeKind::Penrose] {
            let s = ProjectionScheme::by_kind(kind);
            let d = s.descriptor();
            let back = ProjectionScheme::from_descriptor(&d).unwrap();
            assert_eq!(back.descriptor(), d);
        }
    }

    #[test]
    fn torus_parameter_parsing() {
        let p = TorusParameter::parse("1/3, -2, 0").unwrap();
        assert!(p.is_exact());
        let (floor, frac, den) = match &p {
            TorusParameter::Exact(v) => TorusParameter::split_exact(v),
            _ => unreachable!(),
        };
        assert_eq!((floor, frac, den), (vec![0, -2, 0], vec![1, 0, 0], 3));
        assert!(!TorusParameter::parse("0.5,0.1").unwrap().is_exact());
        assert!(TorusParameter::parse("x").is_err());
    }
}
