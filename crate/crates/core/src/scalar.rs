//! Exact complex scalars with rational real and imaginary parts.
//!
//! `GaussRat` is the coefficient domain for every series in this crate.
//! Both parts are kept as reduced `BigRational`s (positive denominators),
//! so equality is structural and arithmetic never rounds.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// A Gaussian rational: `re + im*i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Real rational `p/q`. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    /// Complex rational `p/q + (r/s)i`.
    pub fn from_ratios(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator");
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Real and strictly positive.
    pub fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = z * conj(z)`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero GaussRat");
        Self::new(&self.re / &n, -&self.im / &n)
    }

    /// Integer power, negative exponents allowed (panics on 0^negative).
    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Exact square root in the Gaussian rationals, if one exists.
    ///
    /// Returns the root `x` with `x.re > 0`, or `x.re == 0 && x.im >= 0`.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        // |x|^2 = |self| must itself be rational: norm_sqr a perfect square.
        let norm = rational_sqrt(&self.norm_sqr())?;
        // x = p + qi with p^2 = (re + |self|)/2, q^2 = (|self| - re)/2.
        let two = BigRational::from_integer(BigInt::from(2));
        let p2 = (&self.re + &norm) / &two;
        let q2 = (&norm - &self.re) / &two;
        let p = rational_sqrt(&p2)?;
        let mut q = rational_sqrt(&q2)?;
        // sign of q fixed by 2pq = im
        if !self.im.is_zero() {
            if p.is_zero() {
                return None; // im != 0 forces p != 0
            }
            q = &self.im / (&two * &p);
            if &q * &q != q2 {
                return None;
            }
        }
        let root = Self::new(p, q);
        debug_assert_eq!(&root * &root, *self);
        Some(root)
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(
            BigInt::from(sn),
            BigInt::from(sd),
        ))
    } else {
        None
    }
}

/// Exact `n`-th root of a positive rational, if one exists.
pub fn rational_nth_root(r: &BigRational, n: u32) -> Option<BigRational> {
    assert!(n >= 1);
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let negative = r.is_negative();
    if negative && n % 2 == 0 {
        return None;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let rn = num.nth_root(n);
    let rd = den.nth_root(n);
    if pow_uint(&rn, n) == *num && pow_uint(&rd, n) == *den {
        let mut root = BigRational::new(BigInt::from(rn), BigInt::from(rd));
        if negative {
            root = -root;
        }
        Some(root)
    } else {
        None
    }
}

fn pow_uint(b: &BigUint, n: u32) -> BigUint {
    let mut acc = BigUint::one();
    for _ in 0..n {
        acc *= b;
    }
    acc
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        self * &rhs.inv()
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                $trait::$method(&self, &rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Parse a rational in `p/q` or `p` form.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_basics() {
        let a = GaussRat::from_ratios(1, 2, -3, 4);
        let b = GaussRat::from_ratios(2, 3, 5, 7);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.inv(), GaussRat::one());
    }

    #[test]
    fn conjugation_and_norm() {
        let a = GaussRat::from_ratios(3, 5, 4, 5);
        assert_eq!(a.norm_sqr(), BigRational::one()); // (3/5)^2+(4/5)^2 = 1
        assert_eq!(&a * &a.conj(), GaussRat::one());
    }

    #[test]
    fn exact_square_roots() {
        // (3+4i)^2 = -7+24i
        let c = GaussRat::from_ratios(-7, 1, 24, 1);
        let r = c.sqrt().unwrap();
        assert_eq!(&r * &r, c);
        assert!(GaussRat::from_int(2).sqrt().is_none());
        assert_eq!(GaussRat::from_ratio(9, 4).sqrt().unwrap(), GaussRat::from_ratio(3, 2));
        // pure imaginary: (1+i)^2 = 2i
        let tw = GaussRat::from_ratios(0, 1, 2, 1);
        let r = tw.sqrt().unwrap();
        assert_eq!(&r * &r, tw);
    }

    #[test]
    fn integer_powers() {
        let a = GaussRat::from_ratios(1, 2, 1, 3);
        assert_eq!(a.pow(0), GaussRat::one());
        assert_eq!(a.pow(3), &(&a * &a) * &a);
        assert_eq!(&a.pow(-2) * &a.pow(2), GaussRat::one());
    }

    #[test]
    fn nth_roots() {
        let r = BigRational::new(BigInt::from(27), BigInt::from(8));
        assert_eq!(
            rational_nth_root(&r, 3).unwrap(),
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert!(rational_nth_root(&r, 2).is_none());
    }

    #[test]
    fn parse_fractions() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(parse_rational("-5").unwrap(), BigRational::from_integer(BigInt::from(-5)));
        assert!(parse_rational("1/0").is_none());
    }
}
