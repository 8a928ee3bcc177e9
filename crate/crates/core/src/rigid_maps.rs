//! The rigid transformation group fixing the origin:
//! `(z, zeta, w) -> (f(z, zeta), g(z, zeta), rho w + h(z, zeta))` with
//! holomorphic `f, g, h` vanishing at 0, invertible Jacobian of `(f, g)`,
//! and a nonzero real rational `rho`.
//!
//! The action on a rigid graph `u = F` is the fundamental equation
//! `2 rho F + h + conj(h) = 2 F'(f, g, conj f, conj g)`, solved for `F'`
//! through the inverse map. Composition, inversion, truncation groups, and
//! the dilation-rotation isotropy live here as well.

use crate::error::CoreError;
use crate::hypersurface::Hypersurface;
use crate::scalar::GaussRat;
use crate::series::{invert_pair, HoloSeries2, TruncSeries, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RigidMap {
    f: HoloSeries2,
    g: HoloSeries2,
    h: HoloSeries2,
    rho: BigRational,
}

impl RigidMap {
    pub fn new(f: HoloSeries2, g: HoloSeries2, h: HoloSeries2, rho: BigRational) -> Result<Self, CoreError> {
        if rho.is_zero() {
            return Err(CoreError::ZeroScaling);
        }
        if !f.coeff(0, 0).is_zero() || !g.coeff(0, 0).is_zero() || !h.coeff(0, 0).is_zero() {
            return Err(CoreError::NonzeroConstantTerm("map component"));
        }
        let jac = &(&f.coeff(1, 0) * &g.coeff(0, 1)) - &(&f.coeff(0, 1) * &g.coeff(1, 0));
        if jac.is_zero() {
            return Err(CoreError::SingularJacobian);
        }
        Ok(Self { f, g, h, rho })
    }

    pub fn identity(order: u32) -> Self {
        Self {
            f: HoloSeries2::new(TruncSeries::var(Var::Z, order)),
            g: HoloSeries2::new(TruncSeries::var(Var::Zeta, order)),
            h: HoloSeries2::zero(order),
            rho: BigRational::from_integer(BigInt::from(1)),
        }
    }

    pub fn f(&self) -> &HoloSeries2 {
        &self.f
    }

    pub fn g(&self) -> &HoloSeries2 {
        &self.g
    }

    pub fn h(&self) -> &HoloSeries2 {
        &self.h
    }

    pub fn rho(&self) -> &BigRational {
        &self.rho
    }

    pub fn order(&self) -> u32 {
        self.f.valid_order().min(self.g.valid_order()).min(self.h.valid_order())
    }

    pub fn is_identity(&self) -> bool {
        let o = self.order();
        *self == Self::identity(o)
    }

    /// Drop components of degree above `delta`.
    pub fn truncated(&self, delta: u32) -> Self {
        Self {
            f: self.f.truncated(delta),
            g: self.g.truncated(delta),
            h: self.h.truncated(delta),
            rho: self.rho.clone(),
        }
    }

    /// Image of the graph `u = F` under this map:
    /// `F' = rho F(ft, gt, conj) + h(ft, gt)/2 + conj(h(ft, gt))/2`
    /// with `(ft, gt)` the inverse pair of `(f, g)`.
    pub fn apply(&self, hsurf: &Hypersurface) -> Result<Hypersurface, CoreError> {
        let delta = hsurf.degree();
        let (ft, gt) = invert_pair(&self.f, &self.g, delta)?;
        let ft_bar = ft.conj_to_antiholo();
        let gt_bar = gt.conj_to_antiholo();
        let rho = GaussRat::new(self.rho.clone(), BigRational::zero());
        let substituted = hsurf
            .series()
            .substitute(&[ft.series(), gt.series(), &ft_bar, &gt_bar])?
            .scale(&rho);
        let half = GaussRat::from_ratio(1, 2);
        let h_pulled = self.h.compose(&ft, &gt)?.into_series();
        let out = substituted
            .add(&h_pulled.scale(&half))
            .add(&h_pulled.conj().scale(&half));
        Ok(Hypersurface::from_monomial_series(out, delta, hsurf.convention()))
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &RigidMap) -> Result<RigidMap, CoreError> {
        let f = other.f.compose(&self.f, &self.g)?;
        let g = other.g.compose(&self.f, &self.g)?;
        // w'' = rho2 (rho1 w + h1) + h2(f1, g1)
        let rho2 = GaussRat::new(other.rho.clone(), BigRational::zero());
        let h = HoloSeries2::new(
            self.h
                .series()
                .scale(&rho2)
                .add(other.h.compose(&self.f, &self.g)?.series()),
        );
        RigidMap::new(f, g, h, &self.rho * &other.rho)
    }

    /// Group inverse up to the shared degree budget.
    pub fn inverse(&self) -> Result<RigidMap, CoreError> {
        let delta = self.order();
        let (ft, gt) = invert_pair(&self.f, &self.g, delta)?;
        let rho_inv = BigRational::from_integer(BigInt::from(1)) / &self.rho;
        let scale = GaussRat::new(-rho_inv.clone(), BigRational::zero());
        let h = HoloSeries2::new(self.h.compose(&ft, &gt)?.series().scale(&scale));
        RigidMap::new(ft, gt, h, rho_inv)
    }
}

/// Dilation-rotation `z' = lambda z, zeta' = (lambda/conj lambda) zeta,
/// w' = |lambda|^2 w`; a pure rotation exactly when `|lambda|^2 = 1`.
pub fn dilation_rotation(lambda: &GaussRat, order: u32) -> Result<RigidMap, CoreError> {
    if lambda.is_zero() {
        return Err(CoreError::ZeroScaling);
    }
    let ratio = lambda / &lambda.conj();
    let f = HoloSeries2::new(TruncSeries::var(Var::Z, order).scale(lambda));
    let g = HoloSeries2::new(TruncSeries::var(Var::Zeta, order).scale(&ratio));
    RigidMap::new(f, g, HoloSeries2::zero(order), lambda.norm_sqr())
}

/// Real dimension of the degree-`delta` truncation group: `2 delta^2 + 6 delta + 1`.
pub fn rt_dim(delta: u32) -> u64 {
    let d = delta as u64;
    2 * d * d + 6 * d + 1
}

/// Real dimension of the space of degree-`delta` graphs:
/// `(2 delta^3 + 3 delta^2 - 5 delta) / 6`.
pub fn h_dim(delta: u32) -> u64 {
    let d = delta as u64;
    (2 * d * d * d + 3 * d * d - 5 * d) / 6
}

/// Deterministic random rigid map with small rational coefficients.
/// `with_h` controls whether a nonzero `h` component is drawn.
pub fn random_rigid_map(seed: u64, order: u32, with_h: bool) -> RigidMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = |rng: &mut ChaCha8Rng| -> GaussRat {
        let p = rng.gen_range(-1i64..=1);
        let q = rng.gen_range(2i64..=3);
        let r = rng.gen_range(-1i64..=1);
        GaussRat::from_ratios(p, q, r, 3)
    };
    loop {
        let mut f = HoloSeries2::zero(order);
        let mut g = HoloSeries2::zero(order);
        let mut h = HoloSeries2::zero(order);
        for a in 0..=order {
            for b in 0..=(order - a) {
                if a + b == 0 {
                    continue;
                }
                f.set_coeff(a, b, small(&mut rng));
                g.set_coeff(a, b, small(&mut rng));
                if with_h && a + b >= 2 {
                    h.set_coeff(a, b, small(&mut rng));
                }
            }
        }
        // keep the linear part near the identity so samples stay tame
        f.set_coeff(1, 0, &GaussRat::one() + &f.coeff(1, 0));
        g.set_coeff(0, 1, &GaussRat::one() + &g.coeff(0, 1));
        let rho = BigRational::new(BigInt::from(rng.gen_range(1i64..=3)), BigInt::from(2));
        if let Ok(m) = RigidMap::new(f, g, h, rho) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::{gm_model, random_rank1, Convention};

    #[test]
    fn dimension_tables() {
        assert_eq!(rt_dim(1), 9);
        assert_eq!(rt_dim(2), 21);
        assert_eq!(rt_dim(3), 37);
        assert_eq!(rt_dim(4), 57);
        assert_eq!(rt_dim(5), 81);
        assert_eq!(rt_dim(6), 109);
        assert_eq!(rt_dim(7), 141);
        assert_eq!(h_dim(2), 3);
        assert_eq!(h_dim(3), 11);
        assert_eq!(h_dim(4), 26);
        assert_eq!(h_dim(5), 50);
        assert_eq!(h_dim(6), 85);
        assert_eq!(h_dim(7), 133);
        assert_eq!(h_dim(8), 196);
    }

    #[test]
    fn identity_action() {
        let h = random_rank1(11, 5);
        let id = RigidMap::identity(5);
        assert_eq!(id.apply(&h).unwrap().series(), h.series());
    }

    #[test]
    fn apply_then_inverse_restores() {
        let h = random_rank1(12, 5);
        let m = random_rigid_map(5, 5, true);
        let image = m.apply(&h).unwrap();
        let back = m.inverse().unwrap().apply(&image).unwrap();
        assert_eq!(back.series(), h.series());
    }

    #[test]
    fn compose_matches_sequential_application() {
        let h = random_rank1(13, 5);
        let m1 = random_rigid_map(21, 5, false);
        let m2 = random_rigid_map(22, 5, true);
        let seq = m2.apply(&m1.apply(&h).unwrap()).unwrap();
        let joint = m1.compose(&m2).unwrap().apply(&h).unwrap();
        assert_eq!(seq.series(), joint.series());
    }

    #[test]
    fn composition_with_inverse_is_identity() {
        let m = random_rigid_map(31, 5, true);
        let e = m.compose(&m.inverse().unwrap()).unwrap();
        assert!(e.is_identity());
    }

    #[test]
    fn associativity_on_samples() {
        let m1 = random_rigid_map(41, 4, false);
        let m2 = random_rigid_map(42, 4, true);
        let m3 = random_rigid_map(43, 4, false);
        let lhs = m1.compose(&m2).unwrap().compose(&m3).unwrap();
        let rhs = m1.compose(&m2.compose(&m3).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_of_shear() {
        // (z + zeta^2, zeta, w) has inverse (z - zeta^2, zeta, w)
        let o = 5;
        let f = HoloSeries2::new(TruncSeries::var(Var::Z, o).add(&TruncSeries::var(Var::Zeta, o).pow(2)));
        let g = HoloSeries2::new(TruncSeries::var(Var::Zeta, o));
        let m = RigidMap::new(f, g, HoloSeries2::zero(o), BigRational::from_integer(BigInt::from(1))).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv.f().coeff(0, 2), GaussRat::from_int(-1));
        assert_eq!(inv.f().coeff(1, 0), GaussRat::one());
    }

    #[test]
    fn dilation_rotation_homomorphism() {
        let l1 = GaussRat::from_ratios(1, 2, 1, 3);
        let l2 = GaussRat::from_ratios(-2, 1, 1, 5);
        let d1 = dilation_rotation(&l1, 4).unwrap();
        let d2 = dilation_rotation(&l2, 4).unwrap();
        let d12 = dilation_rotation(&(&l1 * &l2), 4).unwrap();
        assert_eq!(d1.compose(&d2).unwrap(), d12);
        // unimodular lambda gives a pure rotation
        let u = GaussRat::from_ratios(3, 5, 4, 5);
        let r = dilation_rotation(&u, 4).unwrap();
        assert_eq!(*r.rho(), BigRational::from_integer(BigInt::from(1)));
        assert!(dilation_rotation(&GaussRat::one(), 4).unwrap().is_identity());
    }

    #[test]
    fn dilation_rotation_coefficient_law() {
        // Under z' = lambda z, zeta' = (lambda/lbar) zeta, w' = |lambda|^2 w,
        // each coefficient picks up lambda^(1-a-b+d) lbar^(1+b-c-d).
        let h = random_rank1(17, 5);
        let lambda = GaussRat::from_ratios(2, 3, 1, 2);
        let lbar = lambda.conj();
        let image = dilation_rotation(&lambda, 5).unwrap().apply(&h).unwrap();
        for (e, c) in h.series().support() {
            let factor = &lambda.pow(1 - e.a as i64 - e.b as i64 + e.d as i64)
                * &lbar.pow(1 + e.b as i64 - e.c as i64 - e.d as i64);
            assert_eq!(image.series().coeff(*e), c * &factor, "slot {:?}", e);
        }
    }

    #[test]
    fn levi_covariance() {
        // det Hess(F') composed with the map, times Jac * conj(Jac),
        // equals rho^2 det Hess(F).
        for seed in [3u64, 4] {
            let h = random_rank1(seed, 5);
            let m = random_rigid_map(100 + seed, 5, false);
            let image = m.apply(&h).unwrap();
            let jac = m
                .f()
                .series()
                .derive(Var::Z)
                .mul(&m.g().series().derive(Var::Zeta))
                .sub(&m.f().series().derive(Var::Zeta).mul(&m.g().series().derive(Var::Z)));
            let jac_bar = jac.conj();
            let fbar = m.f().conj_to_antiholo();
            let gbar = m.g().conj_to_antiholo();
            let pulled = image
                .levi_det()
                .substitute(&[m.f().series(), m.g().series(), &fbar, &gbar])
                .unwrap();
            let rho2 = GaussRat::new(m.rho() * m.rho(), BigRational::zero());
            let lhs = pulled.mul(&jac).mul(&jac_bar);
            let rhs = h.levi_det().scale(&rho2);
            let order = lhs.valid_order().min(rhs.valid_order());
            assert_eq!(lhs.truncated(order), rhs.truncated(order));
        }
    }

    #[test]
    fn action_factors_through_truncation() {
        // Perturbing the map above degree delta - 1 leaves the image
        // unchanged up to degree delta.
        let delta = 5;
        let h = random_rank1(19, delta);
        let m = random_rigid_map(55, delta, false);
        let mut f2 = m.f().clone();
        f2.set_coeff(3, 2, GaussRat::from_ratio(7, 2)); // degree 5 > delta - 1
        let m2 = RigidMap::new(f2, m.g().clone(), m.h().clone(), m.rho().clone()).unwrap();
        let a = m.apply(&h).unwrap();
        let b = m2.apply(&h).unwrap();
        assert_eq!(a.series(), b.series());
    }

    #[test]
    fn residue_subgroup_is_normal() {
        // Conjugating an element that is the identity to degree delta - 1 by
        // an arbitrary map stays the identity to degree delta - 1.
        let order = 5;
        let delta = 4;
        let mut f = HoloSeries2::new(TruncSeries::var(Var::Z, order));
        f.set_coeff(2, 2, GaussRat::from_ratios(1, 2, 1, 3)); // degree 4 = delta
        let g = HoloSeries2::new(TruncSeries::var(Var::Zeta, order));
        let r = RigidMap::new(f, g, HoloSeries2::zero(order), BigRational::from_integer(BigInt::from(1))).unwrap();
        let m = random_rigid_map(77, order, false);
        let conj = m.inverse().unwrap().compose(&r).unwrap().compose(&m).unwrap();
        let id = RigidMap::identity(order);
        assert_eq!(conj.truncated(delta - 1).f(), id.truncated(delta - 1).f());
        assert_eq!(conj.truncated(delta - 1).g(), id.truncated(delta - 1).g());
        assert_eq!(*conj.rho(), BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn reality_preserved_by_action() {
        let h = random_rank1(23, 5);
        let m = random_rigid_map(87, 5, true);
        let image = m.apply(&h).unwrap();
        assert!(image.series().is_real());
        assert_eq!(image.convention(), Convention::Monomial);
    }

    #[test]
    fn gm_model_fixed_by_isotropy() {
        let m = gm_model(6);
        let lambda = GaussRat::from_ratios(3, 2, -1, 2);
        let image = dilation_rotation(&lambda, 6).unwrap().apply(&m).unwrap();
        assert_eq!(image.series(), m.series());
    }
}
