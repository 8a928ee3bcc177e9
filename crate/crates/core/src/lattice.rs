//! Integer relation lattices for one row of exponents.
//!
//! `relation_lattice(v)` brings the row vector `v` to `(g, 0, ..., 0)` by
//! unimodular column operations (a single-row Hermite reduction) and returns
//! the gcd `g`, one Bezout combination, and a complete basis of the kernel
//! `{ k : sum k_i v_i = 0 }`. The multiplicative-system solver consumes the
//! kernel basis; completeness matters, a finite-index sublattice would make
//! the consistency test too weak.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub struct LatticeReduction {
    /// gcd of the entries (zero for the zero vector).
    pub gcd: BigInt,
    /// Coefficients with `sum bezout_i * v_i = gcd`.
    pub bezout: Vec<BigInt>,
    /// Basis of the integer kernel of `v`.
    pub kernel: Vec<Vec<BigInt>>,
}

/// Extended gcd: returns `(g, x, y)` with `x a + y b = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a.clone(), -BigInt::one(), BigInt::zero());
        }
        return (a.clone(), BigInt::one(), BigInt::zero());
    }
    let (g, x1, y1) = ext_gcd(b, &(a % b));
    let y = &x1 - &(a / b) * &y1;
    (g, y1, y)
}

pub fn relation_lattice(v: &[i64]) -> LatticeReduction {
    let n = v.len();
    let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    // U starts as the identity, stored column-wise.
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut col = vec![BigInt::zero(); n];
            col[i] = BigInt::one();
            col
        })
        .collect();
    for i in 1..n {
        if w[i].is_zero() {
            continue;
        }
        if w[0].is_zero() {
            w.swap(0, i);
            u.swap(0, i);
            continue;
        }
        let (g, x, y) = ext_gcd(&w[0], &w[i]);
        let a = &w[0] / &g;
        let b = &w[i] / &g;
        let col0: Vec<BigInt> = (0..n).map(|r| &(&x * &u[0][r]) + &(&y * &u[i][r])).collect();
        let coli: Vec<BigInt> = (0..n).map(|r| &(&a * &u[i][r]) - &(&b * &u[0][r])).collect();
        u[0] = col0;
        u[i] = coli;
        w[0] = g;
        w[i] = BigInt::zero();
    }
    // Normalize the sign of the pivot.
    if w.first().map_or(false, |g| g.is_negative()) {
        w[0] = -w[0].clone();
        for e in u[0].iter_mut() {
            *e = -e.clone();
        }
    }
    let gcd = w.first().cloned().unwrap_or_else(BigInt::zero);
    let bezout = u.first().cloned().unwrap_or_default();
    let kernel = if gcd.is_zero() {
        u
    } else {
        u.into_iter().skip(1).collect()
    };
    LatticeReduction { gcd, bezout, kernel }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(v: &[i64], k: &[BigInt]) -> BigInt {
        v.iter().zip(k).map(|(&a, b)| BigInt::from(a) * b).sum()
    }

    #[test]
    fn bezout_and_kernel() {
        let v = [6i64, 10, 15];
        let r = relation_lattice(&v);
        assert_eq!(r.gcd, BigInt::from(1));
        assert_eq!(dot(&v, &r.bezout), BigInt::from(1));
        assert_eq!(r.kernel.len(), 2);
        for k in &r.kernel {
            assert_eq!(dot(&v, k), BigInt::zero());
        }
    }

    #[test]
    fn zero_vector_kernel_is_everything() {
        let r = relation_lattice(&[0, 0, 0]);
        assert_eq!(r.gcd, BigInt::zero());
        assert_eq!(r.kernel.len(), 3);
    }

    #[test]
    fn kernel_is_complete() {
        // (2, 4): the kernel is generated by (2, -1), not only (4, -2)
        let r = relation_lattice(&[2, 4]);
        assert_eq!(r.gcd, BigInt::from(2));
        assert_eq!(r.kernel.len(), 1);
        let k = &r.kernel[0];
        let g = ext_gcd(&k[0], &k[1]).0;
        assert_eq!(g, BigInt::one(), "kernel generator must be primitive");
    }

    #[test]
    fn negatives_and_single_entries() {
        let r = relation_lattice(&[-4]);
        assert_eq!(r.gcd, BigInt::from(4));
        assert_eq!(dot(&[-4], &r.bezout), BigInt::from(4));
        assert!(r.kernel.is_empty());
    }
}
