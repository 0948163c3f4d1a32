//! Crystallographic restriction and minimal embedding dimensions.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Rotation by `2π·p/q` in the plane.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ExactRotation {
    pub p: i64,
    pub q: i64,
}

impl ExactRotation {
    /// Reduced to `0 ≤ p < q`, `gcd(p, q) = 1`.
    pub fn reduced(self) -> Self {
        let p = self.p.rem_euclid(self.q);
        let g = p.gcd(&self.q);
        ExactRotation { p: p / g, q: self.q / g }
    }

    pub fn angle(self) -> f64 {
        2.0 * PI * self.p as f64 / self.q as f64
    }
}

/// An orthogonal n×n matrix, checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMap {
    matrix: Vec<Vec<f64>>,
    tolerance: f64,
    exact: Option<ExactRotation>,
}

pub const ORTHOGONALITY_TOL: f64 = 1e-9;
pub const CHARPOLY_TOL: f64 = 1e-9;

impl OrthogonalMap {
    pub fn new(matrix: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("orthogonal map must be a non-empty square matrix"));
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| matrix[k][i] * matrix[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > tolerance {
                    return Err(Error::invalid(format!(
                        "matrix is not orthogonal: column product ({i},{j}) = {dot}"
                    )));
                }
            }
        }
        Ok(OrthogonalMap { matrix, tolerance, exact: None })
    }

    pub fn identity(n: usize) -> Self {
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        OrthogonalMap { matrix: m, tolerance: ORTHOGONALITY_TOL, exact: Some(ExactRotation { p: 0, q: 1 }) }
            .strip_exact_unless_planar()
    }

    fn strip_exact_unless_planar(mut self) -> Self {
        if self.matrix.len() != 2 {
            self.exact = None;
        }
        self
    }

    /// Planar rotation by `2π·p/q`, carrying its exact description.
    pub fn rotation(p: i64, q: i64) -> Self {
        let r = ExactRotation { p, q }.reduced();
        let a = r.angle();
        OrthogonalMap {
            matrix: vec![vec![a.cos(), -a.sin()], vec![a.sin(), a.cos()]],
            tolerance: ORTHOGONALITY_TOL,
            exact: Some(r),
        }
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn exact(&self) -> Option<ExactRotation> {
        self.exact
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Coefficients `c_0..c_n` of `det(xI − R) = Σ c_k x^k`
    /// (Faddeev–LeVerrier; `c_n = 1`).
    pub fn char_poly(&self) -> Vec<f64> {
        let n = self.matrix.len();
        let a = &self.matrix;
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut m = vec![vec![0.0; n]; n];
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1} I
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<f64>();
                }
                next[i][i] += coeffs[n - k + 1];
            }
            m = next;
            let am_trace: f64 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<f64>()).sum();
            coeffs[n - k] = -am_trace / k as f64;
        }
        coeffs
    }
}

/// Allowed rotation orders of a crystallographic point set in dimension `n`.
pub fn crystallographic_orders(n: usize) -> Result<BTreeSet<u32>> {
    match n {
        1 => Ok([1, 2].into_iter().collect()),
        2 | 3 => Ok([1, 2, 3, 4, 6].into_iter().collect()),
        _ => Err(Error::Unsupported(format!("crystallographic orders for dimension {n}"))),
    }
}

/// True iff the characteristic polynomial of `r` has integer coefficients.
///
/// With an exact planar description the trace 2cos(2πp/q) is an algebraic
/// integer of degree φ(q)/2 (q ≥ 3), hence rational exactly when φ(q) ≤ 2.
/// Otherwise the polynomial is expanded in floating point and each
/// coefficient must round to an integer within [`CHARPOLY_TOL`].
pub fn is_crystallographic_rotation(r: &OrthogonalMap) -> bool {
    if let Some(e) = r.exact() {
        let e = e.reduced();
        return e.q <= 2 || euler_totient(e.q as u64) <= 2;
    }
    r.char_poly().iter().all(|c| (c - c.round()).abs() <= CHARPOLY_TOL)
}

/// Euler's totient, with φ(1) = 1.
pub fn euler_totient(n: u64) -> u64 {
    assert!(n >= 1, "totient needs n ≥ 1");
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SymmetryType {
    /// Planar n-fold rotational symmetry.
    Planar(u64),
    Icosahedral,
}

/// Minimal embedding-lattice dimension for a quasiperiodic point set of
/// the given symmetry.
pub fn min_embedding_dim(symmetry: SymmetryType) -> Result<u64> {
    match symmetry {
        SymmetryType::Planar(0) => Err(Error::invalid("n-fold symmetry needs n ≥ 1")),
        SymmetryType::Planar(n) => Ok(euler_totient(n)),
        SymmetryType::Icosahedral => Ok(6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn float_rotation(angle: f64) -> OrthogonalMap {
        OrthogonalMap::new(vec![vec![angle.cos(), -angle.sin()], vec![angle.sin(), angle.cos()]], 1e-9).unwrap()
    }

    #[test]
    fn totient_values() {
        let brute = |n: u64| (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
        assert_eq!(euler_totient(1), 1);
        assert_eq!(euler_totient(10), 4);
        assert_eq!(euler_totient(7), 6);
        for n in 1..200 {
            assert_eq!(euler_totient(n), brute(n), "n={n}");
        }
    }

    #[test]
    fn orders_by_dimension() {
        assert_eq!(crystallographic_orders(1).unwrap(), [1, 2].into());
        assert_eq!(crystallographic_orders(2).unwrap(), [1, 2, 3, 4, 6].into());
        assert_eq!(crystallographic_orders(3).unwrap(), [1, 2, 3, 4, 6].into());
        assert!(matches!(crystallographic_orders(4), Err(Error::Unsupported(_))));
        assert!(crystallographic_orders(0).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert!(is_crystallographic_rotation(&OrthogonalMap::identity(3)));
        assert!(is_crystallographic_rotation(&float_rotation(PI / 3.0)));
        assert!(!is_crystallographic_rotation(&float_rotation(PI / 4.0)));
        assert!(is_crystallographic_rotation(&OrthogonalMap::rotation(1, 6)));
        assert!(!is_crystallographic_rotation(&OrthogonalMap::rotation(1, 8)));
    }

    #[test]
    fn exact_and_float_routes_agree() {
        let allowed = crystallographic_orders(2).unwrap();
        for q in 1..=12i64 {
            let exact = is_crystallographic_rotation(&OrthogonalMap::rotation(1, q));
            let float = is_crystallographic_rotation(&float_rotation(2.0 * PI / q as f64));
            assert_eq!(exact, allowed.contains(&(q as u32)), "q={q}");
            assert_eq!(float, exact, "q={q}");
        }
    }

    #[test]
    fn three_dimensional_rotation_about_axis() {
        let a = 2.0 * PI / 5.0;
        let m = vec![vec![a.cos(), -a.sin(), 0.0], vec![a.sin(), a.cos(), 0.0], vec![0.0, 0.0, 1.0]];
        assert!(!is_crystallographic_rotation(&OrthogonalMap::new(m, 1e-9).unwrap()));
        let b = PI / 2.0;
        let m = vec![vec![1.0, 0.0, 0.0], vec![0.0, b.cos(), -b.sin()], vec![0.0, b.sin(), b.cos()]];
        assert!(is_crystallographic_rotation(&OrthogonalMap::new(m, 1e-9).unwrap()));
    }

    #[test]
    fn non_orthogonal_rejected() {
        assert!(OrthogonalMap::new(vec![vec![1.0, 1.0], vec![0.0, 1.0]], 1e-9).is_err());
    }

    #[test]
    fn embedding_dimensions() {
        for n in [5, 8, 10, 12] {
            assert_eq!(min_embedding_dim(SymmetryType::Planar(n)).unwrap(), 4);
        }
        assert_eq!(min_embedding_dim(SymmetryType::Icosahedral).unwrap(), 6);
    }
}
