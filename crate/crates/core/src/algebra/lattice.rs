//! Lattices with exact bases and their duals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::quad::{QuadRat, QuadRing};
use crate::error::{Error, Result};

/// A field with exact arithmetic and an exact sign.
pub trait ExactField:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i32;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;

    fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl ExactField for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl<R: QuadRing> ExactField for QuadRat<R> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        QuadRat::is_zero(self)
    }
    fn signum(&self) -> i32 {
        QuadRat::signum(self)
    }
    fn to_f64(&self) -> f64 {
        QuadRat::to_f64(self)
    }
    fn from_i64(v: i64) -> Self {
        QuadRat::from_ints(v, 0)
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

/// Determinant by fraction-field Gaussian elimination.
pub fn determinant<F: ExactField>(m: &Matrix<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut det = F::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return F::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / p.clone();
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan; `None` for singular input.
pub fn inverse<F: ExactField>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.len();
    let mut a: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..2 * n {
            a[col][c] = a[col][c].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose<F: Clone>(m: &Matrix<F>) -> Matrix<F> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul<F: ExactField>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(F::zero(), |acc, k| acc + row[k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// A full-rank lattice `{Σ m_i b_i : m ∈ Z^n}` with basis vectors `b_i`
/// stored as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<F: ExactField> {
    basis: Matrix<F>,
    covolume: F,
}

impl<F: ExactField> Lattice<F> {
    pub fn new(basis: Matrix<F>) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("lattice basis must be a non-empty square matrix"));
        }
        let det = determinant(&basis);
        if det.is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(Lattice { covolume: det.abs(), basis })
    }

    /// The standard lattice Z^n.
    pub fn integer(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
            .collect();
        Lattice { basis, covolume: F::one() }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn covolume(&self) -> &F {
        &self.covolume
    }

    pub fn density(&self) -> F {
        F::one() / self.covolume.clone()
    }

    /// Dual lattice `{y : x·y ∈ Z for all x}`. Its basis B* satisfies
    /// `B · B*ᵀ = I`, i.e. B* is the inverse transpose.
    pub fn dual(&self) -> Self {
        let inv = inverse(&self.basis).expect("validated basis is invertible");
        let basis = transpose(&inv);
        Lattice { covolume: F::one() / self.covolume.clone(), basis }
    }

    /// Gram-type product `B · B'ᵀ` of two bases.
    pub fn pairing(&self, other: &Self) -> Matrix<F> {
        mat_mul(&self.basis, &transpose(&other.basis))
    }

    /// True when both bases generate the same point set: the change of
    /// basis matrix is integral and unimodular.
    pub fn same_lattice(&self, other: &Self) -> bool
    where
        F: IntegralCheck,
    {
        if self.dimension() != other.dimension() {
            return false;
        }
        let inv = inverse(&other.basis).expect("validated basis is invertible");
        let change = mat_mul(&self.basis, &inv);
        if !change.iter().flatten().all(F::is_integral) {
            return false;
        }
        let d = determinant(&change);
        d == F::one() || d == -F::one()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.basis.iter().map(|r| r.iter().map(ExactField::to_f64).collect()).collect()
    }

    /// All lattice points with Euclidean norm ≤ `radius`.
    pub fn points_within(&self, radius: f64) -> Vec<(Vec<i64>, Vec<f64>)> {
        let b = self.to_f64();
        let n = b.len();
        // coefficient bound: |m_i| = |x · b*_i| ≤ radius · |b*_i|
        let dual = self.dual().to_f64();
        let bounds: Vec<i64> = dual
            .iter()
            .map(|r| (radius * r.iter().map(|v| v * v).sum::<f64>().sqrt()).floor() as i64)
            .collect();
        let mut out = Vec::new();
        let mut m: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            let x: Vec<f64> = (0..n).map(|j| (0..n).map(|i| m[i] as f64 * b[i][j]).sum()).collect();
            if x.iter().map(|v| v * v).sum::<f64>().sqrt() <= radius * (1.0 + 1e-12) + 1e-12 {
                out.push((m.clone(), x));
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                m[i] += 1;
                if m[i] > bounds[i] {
                    m[i] = -bounds[i];
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }
}

/// Fields where "is an integer" has a meaning (rational, or rational
/// coefficients in a quadratic ring: integrality of both coefficients).
pub trait IntegralCheck {
    fn is_integral(&self) -> bool;
}

impl IntegralCheck for BigRational {
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl<R: QuadRing> IntegralCheck for QuadRat<R> {
    fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
