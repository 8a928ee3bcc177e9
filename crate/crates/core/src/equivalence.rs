//! Root-free decision of rigid-biholomorphic equivalence between normalized
//! hypersurfaces.
//!
//! Two normal forms are equivalent exactly when some dilation-rotation with
//! parameters `s > 0` (real) and `t` on the unit circle matches their
//! coefficients slotwise: each nonzero slot imposes one constraint
//! `s^m t^n = c` with integer exponents and a nonzero Gaussian-rational
//! right-hand side. Because the positive reals and the circle are divisible
//! groups, the system is solvable iff every integer relation among the
//! exponent vectors holds for the right-hand sides; both families of checks
//! reduce to exact rational identities on squared moduli, so no square root
//! is ever extracted. Verdicts are always "up to truncation": all inputs
//! are finite jets.

use crate::hypersurface::Hypersurface;
use crate::lattice::relation_lattice;
use crate::scalar::{rational_nth_root, GaussRat};
use crate::series::Exponent4;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// One constraint `s^m t^n = c`, `c != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub m: i64,
    pub n: i64,
    pub c: GaussRat,
    /// The coefficient slot this constraint came from (for witnesses).
    pub slot: Exponent4,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiplicativeSystem {
    pub constraints: Vec<Constraint>,
}

/// What pins the dilation part `s^2` when the system is consistent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalePin {
    /// No constraint involves `s`.
    Free,
    /// `s^2` is the stated rational.
    Pinned(BigRational),
    /// `s^(2 exponent) = power`; no rational root exists, the pair is the
    /// certificate.
    Certificate { exponent: u32, power: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    EquivalentUpToTruncation,
    Inequivalent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Consistent system; carries the scale information.
    Consistent { scale: ScalePin },
    /// A slot nonzero on one side and zero on the other.
    SupportMismatch { slot: Exponent4 },
    /// An integer relation among the `s`-exponents fails on the moduli:
    /// `prod |c_i|^(2 k_i) != 1`.
    ModulusRelation { relation: Vec<BigInt>, value: BigRational },
    /// An integer relation among the `t`-exponents fails on the unit parts:
    /// `prod c_i^(k_i)` is not the positive real square root of the
    /// corresponding modulus product.
    UnitRelation { relation: Vec<BigInt>, value: GaussRat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceDecision {
    pub verdict: Verdict,
    pub witness: Witness,
}

impl fmt::Display for EquivalenceDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::EquivalentUpToTruncation => write!(f, "equivalent (up to truncation)"),
            Verdict::Inequivalent => write!(f, "inequivalent"),
        }
    }
}

fn pow_big(q: &BigRational, k: &BigInt) -> BigRational {
    let e = k.to_i64().expect("relation exponent out of range");
    if e == 0 {
        return BigRational::one();
    }
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

fn pow_gauss(c: &GaussRat, k: &BigInt) -> GaussRat {
    c.pow(k.to_i64().expect("relation exponent out of range"))
}

/// Assemble the constraint system relating two normal forms slotwise.
/// Exponents are `m = a + c - 2` and `n = a + 2b - c - 2d`; a support
/// mismatch short-circuits to inequivalent.
pub fn build_system(
    h: &Hypersurface,
    hp: &Hypersurface,
) -> Result<MultiplicativeSystem, EquivalenceDecision> {
    let degree = h.degree().min(hp.degree());
    let mut slots: Vec<Exponent4> = h
        .series()
        .support()
        .chain(hp.series().support())
        .map(|(e, _)| *e)
        .filter(|e| e.total() <= degree)
        .collect();
    slots.sort();
    slots.dedup();
    let mut system = MultiplicativeSystem::default();
    for e in slots {
        let a = h.series().coeff(e);
        let b = hp.series().coeff(e);
        if a.is_zero() != b.is_zero() {
            return Err(EquivalenceDecision {
                verdict: Verdict::Inequivalent,
                witness: Witness::SupportMismatch { slot: e },
            });
        }
        if a.is_zero() {
            continue;
        }
        let c = &a / &b;
        system.constraints.push(Constraint {
            m: e.a as i64 + e.c as i64 - 2,
            n: e.a as i64 + 2 * e.b as i64 - e.c as i64 - 2 * e.d as i64,
            c,
            slot: e,
        });
    }
    Ok(system)
}

/// Decide consistency of `s^m_i t^n_i = c_i` over `s > 0`, `|t| = 1`.
pub fn solve_system(system: &MultiplicativeSystem) -> EquivalenceDecision {
    let ms: Vec<i64> = system.constraints.iter().map(|c| c.m).collect();
    let ns: Vec<i64> = system.constraints.iter().map(|c| c.n).collect();
    let norms: Vec<BigRational> = system.constraints.iter().map(|c| c.c.norm_sqr()).collect();

    // (i) relations of the s-exponents must hold on squared moduli.
    let mred = relation_lattice(&ms);
    for k in &mred.kernel {
        let mut prod = BigRational::one();
        for (q, ki) in norms.iter().zip(k) {
            prod *= pow_big(q, ki);
        }
        if !prod.is_one() {
            return EquivalenceDecision {
                verdict: Verdict::Inequivalent,
                witness: Witness::ModulusRelation { relation: k.clone(), value: prod },
            };
        }
    }

    // (ii) relations of the t-exponents must hold on unit parts:
    // prod c^k must be the positive real with square prod |c|^2k.
    let nred = relation_lattice(&ns);
    for k in &nred.kernel {
        let mut prod = GaussRat::one();
        let mut modulus = BigRational::one();
        for (cst, ki) in system.constraints.iter().zip(k) {
            prod = &prod * &pow_gauss(&cst.c, ki);
            modulus *= pow_big(&cst.c.norm_sqr(), ki);
        }
        let ok = prod.is_positive_real() && (&prod.re * &prod.re) == modulus && prod.im.is_zero();
        if !ok {
            return EquivalenceDecision {
                verdict: Verdict::Inequivalent,
                witness: Witness::UnitRelation { relation: k.clone(), value: prod },
            };
        }
    }

    // Consistent; extract what is known about s^2.
    let scale = if mred.gcd.is_zero() {
        ScalePin::Free
    } else {
        let g = mred.gcd.to_u32().expect("gcd out of range");
        let mut q = BigRational::one();
        for (nrm, xi) in norms.iter().zip(&mred.bezout) {
            q *= pow_big(nrm, xi);
        }
        // s^(2g) = q
        match rational_nth_root(&q, g) {
            Some(root) => ScalePin::Pinned(root),
            None => ScalePin::Certificate { exponent: g, power: q },
        }
    };
    EquivalenceDecision {
        verdict: Verdict::EquivalentUpToTruncation,
        witness: Witness::Consistent { scale },
    }
}

/// Replay a consistent witness: check that a concrete dilation-rotation
/// parameter `lambda` satisfies every constraint of the system exactly.
pub fn witness_satisfied_by(system: &MultiplicativeSystem, lambda: &GaussRat) -> bool {
    // s^m t^n = lambda^((m+n)/2) conj(lambda)^((m-n)/2); m and n always have
    // the same parity here (m - n = 2(c + d - b - 1) on coefficient slots).
    system.constraints.iter().all(|cst| {
        if (cst.m - cst.n) % 2 != 0 {
            return false;
        }
        let x = (cst.m + cst.n) / 2;
        let y = (cst.m - cst.n) / 2;
        &lambda.pow(x) * &lambda.conj().pow(y) == cst.c
    })
}
