//! The rigid equivalence problem for rigid hypersurfaces `u = F(z, zbar)`
//! in C^2: prenormalization, the relative invariant
//! `R = (F_zzzbzb F_zzb - F_zzzb F_zzbzb) / F_zzb^2`, its transformation
//! law, the sphere test, and the equivalence decision.
//!
//! Series live in the `(z, zbar)` slice of the four-variable series type
//! (`zeta` exponents stay zero), and a rigid map `(f(z), a w + g(z))` is a
//! three-variable rigid map whose middle component is the identity.

use crate::equivalence::{
    solve_system, Constraint, EquivalenceDecision, MultiplicativeSystem, Verdict, Witness,
};
use crate::error::CoreError;
use crate::rigid_maps::RigidMap;
use crate::scalar::GaussRat;
use crate::series::{Exponent4, HoloSeries2, TruncSeries, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A rigid graph `u = F(z, zbar)` held as a truncated polynomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ToyHypersurface {
    f: TruncSeries,
    degree: u32,
}

impl ToyHypersurface {
    pub fn new(f: TruncSeries, degree: u32) -> Self {
        assert!(
            f.support().all(|(e, _)| e.b == 0 && e.d == 0),
            "toy series may not involve zeta"
        );
        Self { f: f.truncated(degree), degree }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Monomial coefficient of `z^j zbar^k`.
    pub fn coeff(&self, j: u32, k: u32) -> GaussRat {
        self.f.coeff(Exponent4::new(j, 0, k, 0))
    }

    pub fn is_real(&self) -> bool {
        self.f.is_real()
    }

    /// Heisenberg sphere `u = z zbar`.
    pub fn sphere(degree: u32) -> Self {
        let f = TruncSeries::var(Var::Z, degree).mul(&TruncSeries::var(Var::ZBar, degree));
        Self { f, degree }
    }
}

/// A rigid map of C^2, `(z, w) -> (f(z), a w + g(z))`, stored as a
/// three-variable rigid map with identity middle component.
pub fn toy_map(f: TruncSeries, g: TruncSeries, a: BigRational) -> Result<RigidMap, CoreError> {
    assert!(f.support().all(|(e, _)| e.b == 0 && e.c == 0 && e.d == 0));
    assert!(g.support().all(|(e, _)| e.b == 0 && e.c == 0 && e.d == 0));
    let order = f.valid_order().min(g.valid_order());
    RigidMap::new(
        HoloSeries2::new(f),
        HoloSeries2::new(TruncSeries::var(Var::Zeta, order)),
        HoloSeries2::new(g),
        a,
    )
}

/// Image of a toy graph under a toy map (fundamental equation
/// `a F + g/2 + conj(g)/2 = F'(f, conj f)`).
pub fn apply_toy(map: &RigidMap, h: &ToyHypersurface) -> Result<ToyHypersurface, CoreError> {
    let image = map.apply(&crate::hypersurface::Hypersurface::from_series(
        h.f.clone(),
        h.degree,
        crate::hypersurface::Convention::Monomial,
    ))?;
    Ok(ToyHypersurface::new(image.series().clone(), h.degree))
}

/// Numerator of the relative invariant:
/// `F_zzzbzb F_zzb - F_zzzb F_zzbzb`.
pub fn r_numerator(h: &ToyHypersurface) -> TruncSeries {
    let fzzb = h.f.derive(Var::Z).derive(Var::ZBar);
    let fzzzb = fzzb.derive(Var::Z);
    let fzzbzb = fzzb.derive(Var::ZBar);
    let fzzzbzb = fzzzb.derive(Var::ZBar);
    fzzzbzb.mul(&fzzb).sub(&fzzzb.mul(&fzzbzb))
}

/// The relative invariant `R` as a scalar field.
pub fn invariant_r(h: &ToyHypersurface) -> Result<TruncSeries, CoreError> {
    if h.degree < 4 {
        return Err(CoreError::InsufficientOrder { have: h.degree, need: 4 });
    }
    let fzzb = h.f.derive(Var::Z).derive(Var::ZBar);
    r_numerator(h).divide_by_unit(&fzzb.mul(&fzzb))
}

/// Levi nondegenerate and flat to the achievable truncation order:
/// the numerator of `R` vanishes identically.
pub fn sphere_test(h: &ToyHypersurface) -> Result<bool, CoreError> {
    if h.coeff(1, 1).is_zero() {
        return Err(CoreError::ZeroLeviPivot);
    }
    Ok(r_numerator(h).is_zero())
}

/// Residual of the transformation law of the `R`-numerator:
/// `Num(F) - (1/a^2) (f_z conj(f)_zb)^3 Num(F') o (f, conj f)`;
/// identically zero when `F'` is the image of `F`.
pub fn r_law_residual(h: &ToyHypersurface, map: &RigidMap) -> Result<TruncSeries, CoreError> {
    let image = apply_toy(map, h)?;
    let f = map.f().series();
    let fbar = map.f().conj_to_antiholo();
    let zeta = TruncSeries::var(Var::Zeta, f.valid_order());
    let zetabar = TruncSeries::var(Var::ZetaBar, f.valid_order());
    let pulled = r_numerator(&image).substitute(&[f, &zeta, &fbar, &zetabar])?;
    let fz = f.derive(Var::Z);
    let fzbar = fbar.derive(Var::ZBar);
    let a2 = GaussRat::new(map.rho() * map.rho(), BigRational::from_integer(BigInt::from(0)));
    let rhs = pulled.mul(&fz.mul(&fzbar).pow(3)).scale(&a2.inv());
    let lhs = r_numerator(h);
    let order = lhs.valid_order().min(rhs.valid_order());
    Ok(lhs.truncated(order).sub(&rhs.truncated(order)))
}

/// Prenormalization: kill harmonic terms, scale the Levi form, absorb the
/// `(j, 1)` and `(1, k)` slots. Returns the normalized graph and the
/// composed map.
///
/// The Levi scaling avoids square roots: `z' = F_11 z` with `a = F_11`
/// reaches `F'_11 = 1` inside the rationals; the classical square-root
/// scaling differs from this by a dilation, under which the `(2,2)` slot
/// picks up one factor of `F_11`.
pub fn prenormalize_c2(h: &ToyHypersurface) -> Result<(ToyHypersurface, RigidMap), CoreError> {
    let order = h.degree;
    // 1. harmonic removal: w' = w - 2 chi(z), chi = F(z, 0)
    let mut chi = TruncSeries::zero(order);
    for (e, c) in h.f.support() {
        if e.c == 0 {
            chi.set_coeff(*e, c.clone());
        }
    }
    let m1 = toy_map(
        TruncSeries::var(Var::Z, order),
        chi.scale(&GaussRat::from_int(-2)),
        BigRational::from_integer(BigInt::from(1)),
    )?;
    let h1 = apply_toy(&m1, h)?;
    // 2. Levi scaling: z' = F_11 z, a = F_11
    let f11 = h1.coeff(1, 1);
    if f11.is_zero() {
        return Err(CoreError::ZeroLeviPivot);
    }
    if !f11.is_real() {
        return Err(CoreError::Invalid("Levi coefficient must be real".into()));
    }
    let m2 = toy_map(
        TruncSeries::var(Var::Z, order).scale(&f11),
        TruncSeries::zero(order),
        f11.re.clone(),
    )?;
    let h2 = apply_toy(&m2, &h1)?;
    debug_assert!(h2.coeff(1, 1).is_one());
    // 3. absorption: z' = z + sum_{j >= 2} F_{j,1} z^j
    let mut absorb = TruncSeries::var(Var::Z, order);
    for (e, c) in h2.f.support() {
        if e.c == 1 && e.a >= 2 {
            absorb.set_coeff(Exponent4::new(e.a, 0, 0, 0), c.clone());
        }
    }
    let m3 = toy_map(absorb, TruncSeries::zero(order), BigRational::from_integer(BigInt::from(1)))?;
    let h3 = apply_toy(&m3, &h2)?;
    let composed = m1.compose(&m2)?.compose(&m3)?;
    Ok((h3, composed))
}

/// Prenormalized shape: no harmonic slots, `F_11 = 1`, no `(j,1)/(1,k)`
/// slots other than it.
pub fn is_prenormalized_c2(h: &ToyHypersurface) -> bool {
    h.coeff(1, 1).is_one()
        && h.f.support().all(|(e, _)| {
            let (j, k) = (e.a, e.c);
            (j >= 2 && k >= 2) || (j == 1 && k == 1)
        })
}

/// Decide rigid equivalence of two toy graphs: prenormalize both, then ask
/// for a dilation-rotation matching the remaining slots,
/// `F_{j,k} = F'_{j,k} s^(j+k-2) t^(j-k)`.
pub fn equivalent_c2(
    h: &ToyHypersurface,
    hp: &ToyHypersurface,
) -> Result<EquivalenceDecision, CoreError> {
    let (n, _) = prenormalize_c2(h)?;
    let (np, _) = prenormalize_c2(hp)?;
    let degree = n.degree.min(np.degree);
    let mut slots: Vec<Exponent4> = n
        .f
        .support()
        .chain(np.f.support())
        .map(|(e, _)| *e)
        .filter(|e| e.total() <= degree)
        .collect();
    slots.sort();
    slots.dedup();
    let mut system = MultiplicativeSystem::default();
    for e in slots {
        let a = n.f.coeff(e);
        let b = np.f.coeff(e);
        if a.is_zero() != b.is_zero() {
            return Ok(EquivalenceDecision {
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
            n: e.a as i64 - e.c as i64,
            c,
            slot: e,
        });
    }
    Ok(solve_system(&system))
}

/// Deterministic random toy graph with `F_11 = 1`, reality enforced,
/// harmonic slots included when `with_harmonic` is set.
pub fn random_toy(seed: u64, degree: u32, with_harmonic: bool) -> ToyHypersurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut small = |rng: &mut ChaCha8Rng| -> BigRational {
        BigRational::new(BigInt::from(rng.gen_range(-2i64..=2)), BigInt::from(rng.gen_range(1i64..=3)))
    };
    let mut f = TruncSeries::zero(degree);
    f.set_coeff(Exponent4::new(1, 0, 1, 0), GaussRat::one());
    for j in 0..=degree {
        for k in 0..=(degree - j) {
            if (j, k) == (1, 1) || (j, k) == (0, 0) || k > j {
                continue;
            }
            if k == 0 && !with_harmonic {
                continue;
            }
            let v = if j == k {
                GaussRat::new(small(&mut rng), BigRational::from_integer(BigInt::from(0)))
            } else {
                GaussRat::new(small(&mut rng), small(&mut rng))
            };
            f.set_coeff(Exponent4::new(j, 0, k, 0), v.clone());
            if j != k {
                f.set_coeff(Exponent4::new(k, 0, j, 0), v.conj());
            }
        }
    }
    ToyHypersurface::new(f, degree)
}

/// Deterministic random toy map.
pub fn random_toy_map(seed: u64, order: u32) -> RigidMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut f = TruncSeries::var(Var::Z, order);
        let mut g = TruncSeries::zero(order);
        for j in 2..=order {
            let p = rng.gen_range(-1i64..=1);
            let q = rng.gen_range(2i64..=3);
            let r = rng.gen_range(-1i64..=1);
            f.set_coeff(Exponent4::new(j, 0, 0, 0), GaussRat::from_ratios(p, q, r, 3));
            g.set_coeff(Exponent4::new(j, 0, 0, 0), GaussRat::from_ratios(r, 2, p, 3));
        }
        let lin = GaussRat::from_ratios(rng.gen_range(1i64..=2), 1, rng.gen_range(-1i64..=1), 2);
        f.set_coeff(Exponent4::new(1, 0, 0, 0), lin);
        let a = BigRational::new(BigInt::from(rng.gen_range(1i64..=3)), BigInt::from(2));
        if let Ok(m) = toy_map(f, g, a) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::ScalePin;
    use crate::scalar::rational_sqrt;

    fn origin(s: &TruncSeries) -> GaussRat {
        s.eval(&[GaussRat::zero(), GaussRat::zero(), GaussRat::zero(), GaussRat::zero()])
    }

    #[test]
    fn sphere_is_flat() {
        let s = ToyHypersurface::sphere(6);
        assert!(sphere_test(&s).unwrap());
        assert!(invariant_r(&s).unwrap().is_zero());
        let (n, m) = prenormalize_c2(&s).unwrap();
        assert_eq!(n.series(), s.series());
        assert!(m.is_identity());
    }

    #[test]
    fn quartic_example_r_value() {
        // u = z zbar + z^2 zbar^2: R = 4 / (1 + 4 z zbar)^2, value 4 at 0
        let mut f = TruncSeries::var(Var::Z, 8).mul(&TruncSeries::var(Var::ZBar, 8));
        f.set_coeff(Exponent4::new(2, 0, 2, 0), GaussRat::one());
        let h = ToyHypersurface::new(f, 8);
        let r = invariant_r(&h).unwrap();
        assert_eq!(origin(&r), GaussRat::from_int(4));
        assert!(!sphere_test(&h).unwrap());
        let o = r.valid_order();
        let t = TruncSeries::var(Var::Z, o).mul(&TruncSeries::var(Var::ZBar, o));
        let denom = TruncSeries::one(o).add(&t.scale(&GaussRat::from_int(4)));
        let expected = TruncSeries::constant(GaussRat::from_int(4), o)
            .divide_by_unit(&denom.mul(&denom))
            .unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn product_graphs_are_spherical() {
        // u = f(z) conj(f)(zbar) with f = z + z^2
        let o = 7;
        let fz = TruncSeries::var(Var::Z, o).add(&TruncSeries::var(Var::Z, o).pow(2));
        let h = ToyHypersurface::new(fz.mul(&fz.conj()), o);
        assert!(sphere_test(&h).unwrap());
    }

    #[test]
    fn prenormalization_shape_and_formula() {
        // u = z zbar + z^2 zbar + z zbar^2 has F'_22 = -1
        let mut f = TruncSeries::var(Var::Z, 6).mul(&TruncSeries::var(Var::ZBar, 6));
        f.set_coeff(Exponent4::new(2, 0, 1, 0), GaussRat::one());
        f.set_coeff(Exponent4::new(1, 0, 2, 0), GaussRat::one());
        let h = ToyHypersurface::new(f, 6);
        let (n, m) = prenormalize_c2(&h).unwrap();
        assert!(is_prenormalized_c2(&n));
        assert_eq!(n.coeff(2, 2), GaussRat::from_int(-1));
        // the returned map realizes the normalization
        assert_eq!(apply_toy(&m, &h).unwrap().series(), n.series());
    }

    #[test]
    fn prenormalization_matches_closed_form_on_unit_pivot() {
        for seed in [1u64, 2, 3, 4, 5] {
            let h = random_toy(seed, 6, true);
            // the closed form is stated for the graph after harmonic removal
            let mut chi = TruncSeries::zero(6);
            for (e, c) in h.series().support() {
                if e.c == 0 {
                    chi.set_coeff(*e, c.clone());
                }
            }
            let cleaned = ToyHypersurface::new(h.series().sub(&chi).sub(&chi.conj()), 6);
            let f11 = cleaned.coeff(1, 1);
            assert!(f11.is_one());
            let expected =
                &(&cleaned.coeff(2, 2) * &f11) - &(&cleaned.coeff(2, 1) * &cleaned.coeff(1, 2));
            let (n, _) = prenormalize_c2(&h).unwrap();
            assert_eq!(n.coeff(2, 2), expected, "seed {}", seed);
            // R(0) of the prenormalized graph is 4 F'_22
            let r0 = origin(&invariant_r(&n).unwrap());
            assert_eq!(r0, expected.scale_int(4), "seed {}", seed);
        }
    }

    #[test]
    fn variant_scaling_factor_on_general_pivot() {
        // with F_11 != 1 the pipeline value differs from the printed
        // square-root-normalized bracket by exactly one factor of F_11
        let mut f = TruncSeries::var(Var::Z, 6)
            .mul(&TruncSeries::var(Var::ZBar, 6))
            .scale(&GaussRat::from_int(3));
        f.set_coeff(Exponent4::new(2, 0, 1, 0), GaussRat::from_ratios(1, 2, 1, 3));
        f.set_coeff(Exponent4::new(1, 0, 2, 0), GaussRat::from_ratios(1, 2, -1, 3));
        f.set_coeff(Exponent4::new(2, 0, 2, 0), GaussRat::from_ratio(1, 5));
        let h = ToyHypersurface::new(f, 6);
        let f11 = h.coeff(1, 1);
        let bracket =
            &(&(&h.coeff(2, 2) * &f11) - &(&h.coeff(2, 1) * &h.coeff(1, 2))) / &f11.pow(3);
        let (n, _) = prenormalize_c2(&h).unwrap();
        assert_eq!(&n.coeff(2, 2) * &f11, bracket);
    }

    #[test]
    fn transformation_law_on_dilation() {
        // pure dilation z' = 2z, w' = 4w: factors (1/16) * 64 = 4
        let h = random_toy(11, 6, false);
        let m = toy_map(
            TruncSeries::var(Var::Z, 6).scale(&GaussRat::from_int(2)),
            TruncSeries::zero(6),
            BigRational::from_integer(BigInt::from(4)),
        )
        .unwrap();
        assert!(r_law_residual(&h, &m).unwrap().is_zero());
    }

    #[test]
    fn transformation_law_on_random_maps() {
        for seed in [21u64, 22, 23] {
            let h = random_toy(seed, 6, true);
            let m = random_toy_map(100 + seed, 6);
            let res = r_law_residual(&h, &m).unwrap();
            assert!(res.is_zero(), "law fails on seed {}", seed);
        }
    }

    #[test]
    fn sphere_verdict_is_map_invariant() {
        let h = random_toy(31, 6, false);
        let m = random_toy_map(131, 6);
        let before = sphere_test(&h).unwrap();
        let after = sphere_test(&apply_toy(&m, &h).unwrap()).unwrap();
        assert_eq!(before, after);
        let s = ToyHypersurface::sphere(6);
        let moved = apply_toy(&m, &s).unwrap();
        assert!(sphere_test(&moved).unwrap());
    }

    #[test]
    fn prenormalization_is_idempotent() {
        let h = random_toy(41, 6, true);
        let (n, _) = prenormalize_c2(&h).unwrap();
        let (n2, m2) = prenormalize_c2(&n).unwrap();
        assert_eq!(n.series(), n2.series());
        assert!(m2.is_identity());
    }

    #[test]
    fn equivalence_reflexive_and_rotation_stable() {
        let h = random_toy(51, 6, false);
        let d = equivalent_c2(&h, &h).unwrap();
        assert_eq!(d.verdict, Verdict::EquivalentUpToTruncation);
        // unimodular rotation lambda = (3+4i)/5 acts as z' = lambda z, w' = w
        let lambda = GaussRat::from_ratios(3, 5, 4, 5);
        let m = toy_map(
            TruncSeries::var(Var::Z, 6).scale(&lambda),
            TruncSeries::zero(6),
            BigRational::from_integer(BigInt::from(1)),
        )
        .unwrap();
        let moved = apply_toy(&m, &h).unwrap();
        let d = equivalent_c2(&h, &moved).unwrap();
        assert_eq!(d.verdict, Verdict::EquivalentUpToTruncation);
        if let Witness::Consistent { scale: ScalePin::Pinned(s2) } = d.witness {
            assert!(rational_sqrt(&s2).is_some());
        }
    }

    #[test]
    fn conflicting_ratios_are_inequivalent() {
        // slot (2,2) forces s^2 = 1/2 while slot (3,3) forces s^4 = 1
        let mut f1 = TruncSeries::var(Var::Z, 6).mul(&TruncSeries::var(Var::ZBar, 6));
        f1.set_coeff(Exponent4::new(2, 0, 2, 0), GaussRat::one());
        f1.set_coeff(Exponent4::new(3, 0, 3, 0), GaussRat::one());
        let mut f2 = TruncSeries::var(Var::Z, 6).mul(&TruncSeries::var(Var::ZBar, 6));
        f2.set_coeff(Exponent4::new(2, 0, 2, 0), GaussRat::from_int(2));
        f2.set_coeff(Exponent4::new(3, 0, 3, 0), GaussRat::one());
        let h1 = ToyHypersurface::new(f1, 6);
        let h2 = ToyHypersurface::new(f2, 6);
        let d = equivalent_c2(&h1, &h2).unwrap();
        assert_eq!(d.verdict, Verdict::Inequivalent);
    }
}
