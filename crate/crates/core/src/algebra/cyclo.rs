//! Cyclotomic integers `Z[ζ₅]` and `Z[ζ₈]` as integer 4-vectors.
//!
//! Both rings have rank 4 with basis `1, ζ, ζ², ζ³`. For n = 5 the
//! reduction is `ζ⁴ = −1 − ζ − ζ² − ζ³`; for n = 8 it is `ζ⁴ = −1`.
//! They are the exact coordinate rings of planar decagonal and
//! octagonal point sets: every vertex of a Penrose or Ammann–Beenker
//! pattern with unit edges is such an integer combination.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::quad::{Golden, QuadInt};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CycloOrder {
    Five,
    Eight,
}

impl CycloOrder {
    pub fn n(self) -> u32 {
        match self {
            CycloOrder::Five => 5,
            CycloOrder::Eight => 8,
        }
    }

    /// Order of the rotation group acting on the ring's unit circle
    /// points: ±ζ₅ generates the 10th roots of unity.
    pub fn rotation_order(self) -> u32 {
        match self {
            CycloOrder::Five => 10,
            CycloOrder::Eight => 8,
        }
    }
}

/// An element `Σ c_k ζ^k`, k = 0..3.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cyclo {
    pub order: CycloOrder,
    pub c: [i64; 4],
}

impl Cyclo {
    pub fn zero(order: CycloOrder) -> Self {
        Cyclo { order, c: [0; 4] }
    }

    pub fn one(order: CycloOrder) -> Self {
        Cyclo { order, c: [1, 0, 0, 0] }
    }

    pub fn new(order: CycloOrder, c: [i64; 4]) -> Self {
        Cyclo { order, c }
    }

    /// ζ^k for any integer k (negative allowed).
    pub fn zeta_pow(order: CycloOrder, k: i64) -> Self {
        let n = order.n() as i64;
        let k = k.rem_euclid(n) as usize;
        let mut c = [0i64; 4];
        match (order, k) {
            (_, k) if k < 4 => c[k] = 1,
            (CycloOrder::Five, 4) => c = [-1, -1, -1, -1],
            (CycloOrder::Eight, k) => c[k - 4] = -1,
            _ => unreachable!(),
        }
        Cyclo { order, c }
    }

    /// Primitive root of unity of order [`CycloOrder::rotation_order`]
    /// raised to `k`: for n = 5 this is e^{iπk/5} = (−ζ³)^k.
    pub fn unit_root(order: CycloOrder, k: i64) -> Self {
        match order {
            CycloOrder::Eight => Self::zeta_pow(order, k),
            CycloOrder::Five => {
                let k = k.rem_euclid(10);
                let z = Self::zeta_pow(order, 3 * k);
                if k % 2 == 1 {
                    -z
                } else {
                    z
                }
            }
        }
    }

    /// Embed an integer vector `x ∈ Z^m` as `Σ x_j ζ^j` (m ≤ n).
    pub fn from_lattice(order: CycloOrder, x: &[i64]) -> Self {
        x.iter()
            .enumerate()
            .fold(Self::zero(order), |acc, (j, &v)| acc + Self::zeta_pow(order, j as i64).scale(v))
    }

    pub fn scale(self, s: i64) -> Self {
        Cyclo { order: self.order, c: self.c.map(|v| v * s) }
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; 4]
    }

    /// Complex conjugate, ζ ↦ ζ^{-1}.
    pub fn conj(self) -> Self {
        let mut acc = Self::zero(self.order);
        for (k, &v) in self.c.iter().enumerate() {
            acc = acc + Self::zeta_pow(self.order, -(k as i64)).scale(v);
        }
        acc
    }

    pub fn to_complex(self) -> (f64, f64) {
        let n = self.order.n() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &v) in self.c.iter().enumerate() {
            let ang = 2.0 * PI * k as f64 / n;
            re += v as f64 * ang.cos();
            im += v as f64 * ang.sin();
        }
        (re, im)
    }

    /// The golden ratio τ = 1 + ζ + ζ⁴ inside Z[ζ₅].
    pub fn tau() -> Self {
        Self::one(CycloOrder::Five) + Self::zeta_pow(CycloOrder::Five, 1) + Self::zeta_pow(CycloOrder::Five, 4)
    }

    /// 1/τ = τ − 1 = ζ + ζ⁴.
    pub fn tau_inv() -> Self {
        Self::zeta_pow(CycloOrder::Five, 1) + Self::zeta_pow(CycloOrder::Five, 4)
    }

    /// Imaginary part of an element of Z[ζ₅], divided by sin 72°,
    /// as an exact element of Z[τ].
    ///
    /// Im ζ = sin72, Im ζ² = sin144 = sin72/τ, Im ζ³ = −sin72/τ.
    pub fn im_over_sin72(self) -> QuadInt<Golden> {
        assert_eq!(self.order, CycloOrder::Five, "im_over_sin72 needs Z[ζ₅]");
        let [_, c1, c2, c3] = self.c;
        QuadInt::from_ints(c1 - c2 + c3, c2 - c3)
    }

    /// Twice the signed area of the triangle (0, self, other) in units
    /// of sin 72°; exact for Z[ζ₅].
    pub fn cross(self, other: Self) -> QuadInt<Golden> {
        (self.conj() * other).im_over_sin72()
    }
}

impl Cyclo {
    /// `2·Re` as coefficients `[a, b]` of `a + bθ` (θ = τ for n = 5,
    /// θ = √2 for n = 8).
    pub fn re2(self) -> [i64; 2] {
        let [c0, c1, c2, c3] = self.c;
        match self.order {
            CycloOrder::Five => [2 * c0 - c1, c1 - c2 - c3],
            CycloOrder::Eight => [2 * c0, c1 - c3],
        }
    }

    /// A fixed positive multiple of `Im` as `[a, b]`: `Im/sin72°` for
    /// n = 5 and `2·Im` for n = 8.
    pub fn im_scaled(self) -> [i64; 2] {
        let [_, c1, c2, c3] = self.c;
        match self.order {
            CycloOrder::Five => [c1 - c2 + c3, c2 - c3],
            CycloOrder::Eight => [2 * c2, c1 + c3],
        }
    }

    fn ring_pq(self) -> (i128, i128) {
        match self.order {
            CycloOrder::Five => (1, 1),
            CycloOrder::Eight => (0, 2),
        }
    }

    pub fn re_sign(self) -> i32 {
        let (p, q) = self.ring_pq();
        quad_sign(self.re2(), p, q)
    }

    pub fn im_sign(self) -> i32 {
        let (p, q) = self.ring_pq();
        quad_sign(self.im_scaled(), p, q)
    }

    /// Exact sign of the planar cross product `self × other`.
    pub fn cross_sign(self, other: Self) -> i32 {
        (self.conj() * other).im_sign()
    }

    /// Exact sign of the dot product `self · other`.
    pub fn dot_sign(self, other: Self) -> i32 {
        (self.conj() * other).re_sign()
    }
}

/// Exact sign of `a + bθ` for θ the positive root of `x² = p·x + q`
/// with negative conjugate.
pub fn quad_sign(v: [i64; 2], p: i128, q: i128) -> i32 {
    let a = v[0] as i128;
    let b = v[1] as i128;
    let sa = a.signum() as i32;
    let sb = b.signum() as i32;
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let norm = a * a + a * b * p - b * b * q;
    norm.signum() as i32 * sa
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        debug_assert_eq!(self.order, rhs.order);
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(rhs.c) {
            *x += y;
        }
        Cyclo { order: self.order, c }
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        self + (-rhs)
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { order: self.order, c: self.c.map(|v| -v) }
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        debug_assert_eq!(self.order, rhs.order);
        let mut prod = [0i64; 7];
        for i in 0..4 {
            for j in 0..4 {
                prod[i + j] += self.c[i] * rhs.c[j];
            }
        }
        // reduce degrees 6, 5, 4 downward
        for d in (4..7).rev() {
            let v = prod[d];
            if v == 0 {
                continue;
            }
            prod[d] = 0;
            match self.order {
                CycloOrder::Five => {
                    for k in 0..4 {
                        prod[d - 4 + k] -= v;
                    }
                }
                CycloOrder::Eight => prod[d - 4] -= v,
            }
        }
        Cyclo { order: self.order, c: [prod[0], prod[1], prod[2], prod[3]] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn powers_match_complex_roots() {
        for order in [CycloOrder::Five, CycloOrder::Eight] {
            let n = order.n() as f64;
            for k in -12..12 {
                let z = Cyclo::zeta_pow(order, k).to_complex();
                let ang = 2.0 * PI * k as f64 / n;
                assert!(close(z, (ang.cos(), ang.sin())), "{order:?} k={k}");
            }
            let r = order.rotation_order() as f64;
            for k in 0..20 {
                let z = Cyclo::unit_root(order, k).to_complex();
                let ang = 2.0 * PI * k as f64 / r;
                assert!(close(z, (ang.cos(), ang.sin())), "{order:?} root k={k}");
            }
        }
    }

    #[test]
    fn multiplication_is_exact() {
        let z = Cyclo::zeta_pow(CycloOrder::Five, 1);
        let mut p = Cyclo::one(CycloOrder::Five);
        for _ in 0..5 {
            p = p * z;
        }
        assert_eq!(p, Cyclo::one(CycloOrder::Five));
        let t = Cyclo::tau();
        assert_eq!(t * Cyclo::tau_inv(), Cyclo::one(CycloOrder::Five));
        assert_eq!(t * t, t + Cyclo::one(CycloOrder::Five));
        let w = Cyclo::zeta_pow(CycloOrder::Eight, 1);
        assert_eq!(w * w * w * w, -Cyclo::one(CycloOrder::Eight));
    }

    #[test]
    fn cross_is_exact_area() {
        let a = Cyclo::new(CycloOrder::Five, [2, -1, 3, 1]);
        let b = Cyclo::new(CycloOrder::Five, [-1, 4, 0, 2]);
        let (ax, ay) = a.to_complex();
        let (bx, by) = b.to_complex();
        let sin72 = (2.0 * PI / 5.0).sin();
        let exact = a.cross(b).to_f64() * sin72;
        assert!((exact - (ax * by - ay * bx)).abs() < 1e-9);
        assert_eq!(a.cross(a).signum(), 0);
    }

    #[test]
    fn exact_signs_match_floats() {
        for order in [CycloOrder::Five, CycloOrder::Eight] {
            for seed in 0..400i64 {
                let c = [seed % 7 - 3, (seed / 7) % 7 - 3, (seed / 49) % 5 - 2, seed % 3 - 1];
                let z = Cyclo::new(order, c);
                let (re, im) = z.to_complex();
                if re.abs() > 1e-9 {
                    assert_eq!(z.re_sign(), re.signum() as i32, "{z:?}");
                }
                if im.abs() > 1e-9 {
                    assert_eq!(z.im_sign(), im.signum() as i32, "{z:?}");
                }
            }
        }
    }
}
