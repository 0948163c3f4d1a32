//! Exact arithmetic in the real quadratic rings `Z[τ]` and `Z[√2]` and
//! their fraction fields.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A real quadratic ring `Z[θ]` where θ is the larger root of
/// `x² = P·x + Q`. Both shipped rings satisfy `θ' < 0 < θ` for the
/// conjugate root θ', which the exact sign test relies on.
pub trait QuadRing: Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Hash + 'static {
    const P: i64;
    const Q: i64;
    const NAME: &'static str;
    const SYMBOL: &'static str;
    fn theta() -> f64;
}

/// θ = τ = (1+√5)/2, τ² = τ + 1.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Golden;

/// θ = √2, θ² = 2.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Silver;

impl QuadRing for Golden {
    const P: i64 = 1;
    const Q: i64 = 1;
    const NAME: &'static str = "golden";
    const SYMBOL: &'static str = "τ";
    fn theta() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }
}

impl QuadRing for Silver {
    const P: i64 = 0;
    const Q: i64 = 2;
    const NAME: &'static str = "sqrt2";
    const SYMBOL: &'static str = "√2";
    fn theta() -> f64 {
        std::f64::consts::SQRT_2
    }
}

/// Coefficient types usable in [`Quad`]: `BigInt` for the rings,
/// `BigRational` for the fraction fields.
pub trait Coeff:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Eq
    + Hash
    + Signed
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// The number `a + b·θ`.
pub struct Quad<T, R> {
    pub a: T,
    pub b: T,
    _ring: PhantomData<R>,
}

/// Element of `Z[θ]` with arbitrary-precision coefficients.
pub type QuadInt<R> = Quad<BigInt, R>;
/// Element of `Q(θ)`.
pub type QuadRat<R> = Quad<BigRational, R>;
/// `Z[τ]`, the ring housing the golden ratio.
pub type GoldenInt = QuadInt<Golden>;
/// `Q(√5)`.
pub type GoldenRat = QuadRat<Golden>;

impl<T: Clone, R> Clone for Quad<T, R> {
    fn clone(&self) -> Self {
        Quad { a: self.a.clone(), b: self.b.clone(), _ring: PhantomData }
    }
}

impl<T: PartialEq, R> PartialEq for Quad<T, R> {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl<T: Eq, R> Eq for Quad<T, R> {}

impl<T: Hash, R> Hash for Quad<T, R> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

impl<T: fmt::Debug, R: QuadRing> fmt::Debug for Quad<T, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}{})", self.a, self.b, R::SYMBOL)
    }
}

impl<T: fmt::Display, R: QuadRing> fmt::Display for Quad<T, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}{}", self.a, self.b, R::SYMBOL)
    }
}

impl<T: Coeff, R: QuadRing> Quad<T, R> {
    pub fn new(a: T, b: T) -> Self {
        Quad { a, b, _ring: PhantomData }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(T::from_i64(a), T::from_i64(b))
    }

    pub fn from_coeff(a: T) -> Self {
        Self::new(a, T::zero())
    }

    /// θ itself.
    pub fn theta() -> Self {
        Self::from_ints(0, 1)
    }

    /// Galois conjugation θ ↦ P − θ (τ ↦ 1−τ, √2 ↦ −√2).
    pub fn conj(&self) -> Self {
        let p = T::from_i64(R::P);
        Self::new(self.a.clone() + self.b.clone() * p, -self.b.clone())
    }

    /// Field norm `x · conj(x)`, an element of the coefficient type.
    pub fn norm(&self) -> T {
        let p = T::from_i64(R::P);
        let q = T::from_i64(R::Q);
        self.a.clone() * self.a.clone() + self.a.clone() * self.b.clone() * p
            - self.b.clone() * self.b.clone() * q
    }

    /// Exact sign in {-1, 0, 1} of the real number `a + bθ`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the conjugate a + bθ' has the sign of a (θ' < 0),
        // and sign(x)·sign(x') = sign(norm).
        let sn = sign_of(&self.norm());
        sn * sa
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        // a + bθ loses precision when a ≈ -bθ; use the conjugate form then.
        let t = R::theta();
        let a = self.a.to_f64_lossy();
        let b = self.b.to_f64_lossy();
        let direct = a + b * t;
        if direct.abs() < 1e-6 * (a.abs() + (b * t).abs()) {
            let n = self.norm().to_f64_lossy();
            let conj = a + b * (R::P as f64 - t);
            if conj != 0.0 {
                return n / conj;
            }
        }
        direct
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

fn sign_of<T: Signed>(v: &T) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

impl<R: QuadRing> QuadRat<R> {
    pub fn from_int(x: &QuadInt<R>) -> Self {
        Self::new(
            BigRational::from_integer(x.a.clone()),
            BigRational::from_integer(x.b.clone()),
        )
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.a / n.clone(), c.b / n))
    }

    /// Returns the ring element when both coefficients are integers.
    pub fn to_int(&self) -> Option<QuadInt<R>> {
        if self.a.is_integer() && self.b.is_integer() {
            Some(QuadInt::new(self.a.to_integer(), self.b.to_integer()))
        } else {
            None
        }
    }
}

impl<R: QuadRing> QuadInt<R> {
    /// Units of Z[θ] have norm ±1.
    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }
}

impl<T: Coeff, R: QuadRing> PartialOrd for Quad<T, R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl<T: Coeff, R: QuadRing> Ord for Quad<T, R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl<T: Coeff, R: QuadRing> Add for Quad<T, R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl<T: Coeff, R: QuadRing> Sub for Quad<T, R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl<T: Coeff, R: QuadRing> Mul for Quad<T, R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // (a + bθ)(c + dθ) = ac + bdQ + (ad + bc + bdP)θ
        let p = T::from_i64(R::P);
        let q = T::from_i64(R::Q);
        let bd = self.b.clone() * rhs.b.clone();
        Self::new(
            self.a.clone() * rhs.a.clone() + bd.clone() * q,
            self.a * rhs.b + self.b * rhs.a + bd * p,
        )
    }
}

impl<T: Coeff, R: QuadRing> Neg for Quad<T, R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl<R: QuadRing> Div for QuadRat<R> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip().expect("division by zero in quadratic field")
    }
}

impl<T: Coeff, R: QuadRing> Zero for Quad<T, R> {
    fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        Quad::is_zero(self)
    }
}

impl<T: Coeff, R: QuadRing> One for Quad<T, R> {
    fn one() -> Self {
        Self::new(T::one(), T::zero())
    }
}
