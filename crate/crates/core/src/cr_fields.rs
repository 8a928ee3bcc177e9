//! CR vector fields of a rigid graph as derivations on scalar fields, the
//! fundamental functions `k` (slant) and `P`, and the differential-operator
//! route to the relative invariants.
//!
//! In the rigid case every field is independent of `v`, so the tangential
//! operators act as plain partials on scalar fields:
//! `L1 = d/dz, L2 = d/dzeta, L1b = d/dzbar, L2b = d/dzetabar`, the
//! transversal `T` annihilates everything, and the Levi-kernel field is
//! `K = k L1 + L2`. Valid orders are budgeted by the series layer; an
//! invariant is only reported when the certificate still covers its value.

use crate::error::CoreError;
use crate::hypersurface::Hypersurface;
use crate::scalar::GaussRat;
use crate::series::{Exponent4, TruncSeries, Var};

/// Scalar fields on a rigid hypersurface are truncated series in
/// `(z, zeta, zbar, zetabar)`.
pub type ScalarField = TruncSeries;

/// Evaluated invariant triple at the origin; `q0` is real.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantTriple {
    pub i0: GaussRat,
    pub v0: GaussRat,
    pub q0: GaussRat,
}

pub fn l1(phi: &ScalarField) -> ScalarField {
    phi.derive(Var::Z)
}

pub fn l2(phi: &ScalarField) -> ScalarField {
    phi.derive(Var::Zeta)
}

pub fn l1bar(phi: &ScalarField) -> ScalarField {
    phi.derive(Var::ZBar)
}

pub fn l2bar(phi: &ScalarField) -> ScalarField {
    phi.derive(Var::ZetaBar)
}

/// The transversal derivation `T = ell d/dv`; zero on rigid scalar fields.
pub fn t_field(phi: &ScalarField) -> ScalarField {
    TruncSeries::zero(phi.valid_order().saturating_sub(1))
}

/// Coefficient of `T = i [L1, L1b]`: `ell = -2 F_zzbar`.
pub fn ell(h: &Hypersurface) -> ScalarField {
    h.series()
        .derive(Var::Z)
        .derive(Var::ZBar)
        .scale(&GaussRat::from_int(-2))
}

/// Slant function `k = -F_szb / F_zzb` (`s` is zeta).
pub fn slant_k(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let fzzb = h.series().derive(Var::Z).derive(Var::ZBar);
    let fszb = h.series().derive(Var::Zeta).derive(Var::ZBar);
    fszb.neg().divide_by_unit(&fzzb)
}

/// Second fundamental function `P = F_zzzb / F_zzb`.
pub fn fundamental_p(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let fzzb = h.series().derive(Var::Z).derive(Var::ZBar);
    let fzzzb = fzzb.derive(Var::Z);
    fzzzb.divide_by_unit(&fzzb)
}

/// Levi-kernel derivation `K(phi) = k phi_z + phi_zeta`.
pub fn field_k(phi: &ScalarField, k: &ScalarField) -> ScalarField {
    k.mul(&phi.derive(Var::Z)).add(&phi.derive(Var::Zeta))
}

/// Conjugate kernel derivation `Kb(phi) = kb phi_zbar + phi_zetabar`.
pub fn field_kbar(phi: &ScalarField, k: &ScalarField) -> ScalarField {
    k.conj().mul(&phi.derive(Var::ZBar)).add(&phi.derive(Var::ZetaBar))
}

fn re_part(x: &ScalarField) -> ScalarField {
    x.add(&x.conj()).scale(&GaussRat::from_ratio(1, 2))
}

/// First relative invariant as a scalar field:
/// `I0 = -1/3 K(L1b L1b k)/(L1b k)^2 + 1/3 K(L1b k) L1b L1b k/(L1b k)^3
///       + 2/3 L1 L1(kb)/L1(kb) + 2/3 L1 L1b(k)/L1b(k)`.
pub fn i0_field(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let k = slant_k(h)?;
    let kz_b = l1bar(&k);
    let kz_bb = l1bar(&kz_b);
    let third = GaussRat::from_ratio(1, 3);
    let two_thirds = GaussRat::from_ratio(2, 3);
    let t1 = field_k(&kz_bb, &k)
        .divide_by_unit(&kz_b.mul(&kz_b))?
        .scale(&-&third);
    let t2 = field_k(&kz_b, &k)
        .mul(&kz_bb)
        .divide_by_unit(&kz_b.mul(&kz_b).mul(&kz_b))?
        .scale(&third);
    // the third term is the conjugate of L1b L1b (k) / L1b(k)
    let t3 = kz_bb.divide_by_unit(&kz_b)?.conj().scale(&two_thirds);
    let t4 = l1(&kz_b).divide_by_unit(&kz_b)?.scale(&two_thirds);
    Ok(t1.add(&t2).add(&t3).add(&t4))
}

/// Second relative invariant as a scalar field:
/// `V0 = -L1b^3 k / (L1b k) / 3 + 5/9 (L1b^2 k / L1b k)^2
///       - 1/9 (L1b^2 k / L1b k) Pb + 1/3 L1b(Pb) - 1/9 Pb^2`.
pub fn v0_field(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let k = slant_k(h)?;
    let p_bar = fundamental_p(h)?.conj();
    let kb1 = l1bar(&k);
    let kb2 = l1bar(&kb1);
    let kb3 = l1bar(&kb2);
    let q = kb2.divide_by_unit(&kb1)?;
    let t1 = kb3.divide_by_unit(&kb1)?.scale(&GaussRat::from_ratio(-1, 3));
    let t2 = q.mul(&q).scale(&GaussRat::from_ratio(5, 9));
    let t3 = q.mul(&p_bar).scale(&GaussRat::from_ratio(-1, 9));
    let t4 = l1bar(&p_bar).scale(&GaussRat::from_ratio(1, 3));
    let t5 = p_bar.mul(&p_bar).scale(&GaussRat::from_ratio(-1, 9));
    Ok(t1.add(&t2).add(&t3).add(&t4).add(&t5))
}

/// `B = (L1b L1b k / L1b k - Pb) / 3`.
pub fn b_field(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let k = slant_k(h)?;
    let p_bar = fundamental_p(h)?.conj();
    let kb1 = l1bar(&k);
    let kb2 = l1bar(&kb1);
    Ok(kb2
        .divide_by_unit(&kb1)?
        .sub(&p_bar)
        .scale(&GaussRat::from_ratio(1, 3)))
}

/// Finalized form of the secondary invariant, manifestly real:
/// `Q0 = B I0 + conj(B I0) - B conj(B)
///       + 2/3 Re{ L1 [ L1b L1b k / L1b k ] } + 1/3 Re( L1b(P) )`.
pub fn q0_final_field(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let k = slant_k(h)?;
    let p = fundamental_p(h)?;
    let b = b_field(h)?;
    let i0 = i0_field(h)?;
    let kb1 = l1bar(&k);
    let kb2 = l1bar(&kb1);
    let bi0 = b.mul(&i0);
    let t12 = bi0.add(&bi0.conj());
    let t3 = b.mul(&b.conj()).neg();
    let t4 = re_part(&l1(&kb2.divide_by_unit(&kb1)?)).scale(&GaussRat::from_ratio(2, 3));
    let t5 = re_part(&l1bar(&p)).scale(&GaussRat::from_ratio(1, 3));
    Ok(t12.add(&t3).add(&t4).add(&t5))
}

/// Definitional route to the secondary invariant:
/// `Q0 = { B I0 + L1b(I0) - conj(B) Kb(I0) / L1(kb) - K(V0) / L1b(k) } / 2`.
/// Consumes one more derivative than the final route.
pub fn q0_def_field(h: &Hypersurface) -> Result<ScalarField, CoreError> {
    let k = slant_k(h)?;
    let b = b_field(h)?;
    let i0 = i0_field(h)?;
    let v0 = v0_field(h)?;
    let kb1 = l1bar(&k);
    let t1 = b.mul(&i0);
    let t2 = l1bar(&i0);
    let t3 = b
        .conj()
        .mul(&field_kbar(&i0, &k))
        .divide_by_unit(&l1(&k.conj()))?
        .neg();
    let t4 = field_k(&v0, &k).divide_by_unit(&kb1)?.neg();
    Ok(t1.add(&t2).add(&t3).add(&t4).scale(&GaussRat::from_ratio(1, 2)))
}

fn at_origin(s: &ScalarField) -> GaussRat {
    s.eval(&[GaussRat::zero(), GaussRat::zero(), GaussRat::zero(), GaussRat::zero()])
}

fn require_order(h: &Hypersurface, need: u32) -> Result<(), CoreError> {
    if h.degree() < need {
        return Err(CoreError::InsufficientOrder { have: h.degree(), need });
    }
    Ok(())
}

/// Differential-route invariant values at the origin.
pub fn invariant_i0_diff(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    require_order(h, 5)?;
    Ok(at_origin(&i0_field(h)?))
}

pub fn invariant_v0_diff(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    require_order(h, 5)?;
    Ok(at_origin(&v0_field(h)?))
}

pub fn invariant_q0_final(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    require_order(h, 5)?;
    Ok(at_origin(&q0_final_field(h)?))
}

pub fn invariant_q0_def(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    require_order(h, 6)?;
    Ok(at_origin(&q0_def_field(h)?))
}

/// Residuals of the three kernel-field identities and of the bracket
/// relation `[K, L1b] = -L1b(k) L1`; every series must vanish identically.
#[derive(Clone, Debug)]
pub struct OperatorIdentityReport {
    /// `K(Pb) + P L1b(k) + L1b(L1(k))`
    pub identity1: ScalarField,
    /// `K(L1b(Pb)) + L1b(k) (L1b(P) + L1(Pb)) + P L1b(L1b(k)) + L1b(L1b(L1(k)))`
    pub identity2: ScalarField,
    /// `Kb(I0) + 2 conj(I0) L1(kb)`
    pub identity3: ScalarField,
    /// `[K, L1b](phi) + L1b(k) L1(phi)` on a probe field
    pub bracket: ScalarField,
}

impl OperatorIdentityReport {
    pub fn all_zero(&self) -> bool {
        self.identity1.is_zero()
            && self.identity2.is_zero()
            && self.identity3.is_zero()
            && self.bracket.is_zero()
    }

    pub fn failing(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.identity1.is_zero() {
            out.push("identity1");
        }
        if !self.identity2.is_zero() {
            out.push("identity2");
        }
        if !self.identity3.is_zero() {
            out.push("identity3");
        }
        if !self.bracket.is_zero() {
            out.push("bracket");
        }
        out
    }
}

pub fn verify_operator_identities(h: &Hypersurface) -> Result<OperatorIdentityReport, CoreError> {
    require_order(h, 5)?;
    let k = slant_k(h)?;
    let p = fundamental_p(h)?;
    let p_bar = p.conj();
    let kb1 = l1bar(&k);

    let identity1 = field_k(&p_bar, &k)
        .add(&p.mul(&kb1))
        .add(&l1bar(&l1(&k)));

    let two_re_l1b_p = l1bar(&p).add(&l1(&p_bar));
    let identity2 = field_k(&l1bar(&p_bar), &k)
        .add(&kb1.mul(&two_re_l1b_p))
        .add(&p.mul(&l1bar(&kb1)))
        .add(&l1bar(&l1bar(&l1(&k))));

    let i0 = i0_field(h)?;
    let identity3 = field_kbar(&i0, &k).add(
        &i0.conj()
            .mul(&l1(&k.conj()))
            .scale(&GaussRat::from_int(2)),
    );

    // bracket probe: phi = k itself exercises all derivative slots
    let phi = &k;
    let bracket = field_k(&l1bar(phi), &k)
        .sub(&l1bar(&field_k(phi, &k)))
        .add(&kb1.mul(&l1(phi)));

    let trim = |s: ScalarField, o: u32| s.truncated(o);
    let o1 = h.degree().saturating_sub(4);
    let o2 = h.degree().saturating_sub(5);
    Ok(OperatorIdentityReport {
        identity1: trim(identity1, o1),
        identity2: trim(identity2, o2),
        identity3: trim(identity3, h.degree().saturating_sub(6).max(0)),
        bracket,
    })
}

// ---------------------------------------------------------------------------
// Closed-form fixtures: polynomials in the Taylor jets F_{a,b,c,d}.
// ---------------------------------------------------------------------------

const I0_NUMERATOR: &str = include_str!("../fixtures/i0_numerator.txt");
const V0_NUMERATOR: &str = include_str!("../fixtures/v0_numerator.txt");

/// One parsed monomial: integer coefficient and `(slot, power)` factors.
pub struct JetMonomial {
    pub coeff: i64,
    pub factors: Vec<(Exponent4, u32)>,
}

/// Parse a fixture polynomial: one monomial per line,
/// `<coef> F_{a,b,c,d}^e ...`; `#` starts a comment.
pub fn parse_jet_polynomial(text: &str) -> Vec<JetMonomial> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeff: i64 = parts
            .next()
            .expect("missing coefficient")
            .parse()
            .expect("bad coefficient");
        let mut factors = Vec::new();
        for tok in parts {
            let tok = tok.strip_prefix("F_{").expect("bad factor");
            let (idx, pow) = match tok.split_once('}') {
                Some((idx, rest)) => {
                    let pow = rest.strip_prefix('^').map_or(1, |p| p.parse().expect("bad power"));
                    (idx, pow)
                }
                None => panic!("bad factor"),
            };
            let nums: Vec<u32> = idx.split(',').map(|s| s.trim().parse().expect("bad index")).collect();
            assert_eq!(nums.len(), 4);
            factors.push((Exponent4::new(nums[0], nums[1], nums[2], nums[3]), pow));
        }
        out.push(JetMonomial { coeff, factors });
    }
    out
}

fn eval_jet_polynomial(monomials: &[JetMonomial], h: &Hypersurface) -> GaussRat {
    let mut acc = GaussRat::zero();
    for m in monomials {
        let mut term = GaussRat::from_int(m.coeff);
        for (e, p) in &m.factors {
            let v = h.taylor_coeff(e.a, e.b, e.c, e.d);
            term = &term * &v.pow(*p as i64);
        }
        acc = &acc + &term;
    }
    acc
}

/// `F_{0,1,1,0} F_{1,0,2,0} - F_{0,1,2,0} F_{1,0,1,0}` (Taylor jets).
pub fn pivot_d1(h: &Hypersurface) -> GaussRat {
    &(&h.taylor_coeff(0, 1, 1, 0) * &h.taylor_coeff(1, 0, 2, 0))
        - &(&h.taylor_coeff(0, 1, 2, 0) * &h.taylor_coeff(1, 0, 1, 0))
}

/// `F_{1,0,0,1} F_{2,0,1,0} - F_{1,0,1,0} F_{2,0,0,1}` (Taylor jets).
pub fn pivot_d2(h: &Hypersurface) -> GaussRat {
    &(&h.taylor_coeff(1, 0, 0, 1) * &h.taylor_coeff(2, 0, 1, 0))
        - &(&h.taylor_coeff(1, 0, 1, 0) * &h.taylor_coeff(2, 0, 0, 1))
}

/// Closed-form first invariant on jets with `F_{1,0,1,0} = 1`:
/// the 52-term numerator over `D1^3 D2`.
pub fn i0_closed_form(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    if !h.taylor_coeff(1, 0, 1, 0).is_one() {
        return Err(CoreError::Invalid("closed form requires unit Levi pivot".into()));
    }
    let num = eval_jet_polynomial(&parse_jet_polynomial(I0_NUMERATOR), h);
    let den = &pivot_d1(h).pow(3) * &pivot_d2(h);
    if den.is_zero() {
        return Err(CoreError::Degenerate);
    }
    Ok(&num / &den)
}

/// Closed-form second invariant: the 11-term numerator over
/// `3 F_{1,0,1,0} D1^2`.
pub fn v0_closed_form(h: &Hypersurface) -> Result<GaussRat, CoreError> {
    let num = eval_jet_polynomial(&parse_jet_polynomial(V0_NUMERATOR), h);
    let t = h.taylor_coeff(1, 0, 1, 0);
    let den = &(&pivot_d1(h).pow(2) * &t).scale_int(3) * &GaussRat::one();
    if den.is_zero() {
        return Err(CoreError::Degenerate);
    }
    Ok(&num / &den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::{gm_model, lightcone_tube, random_rank1};

    #[test]
    fn fields_on_simple_inputs() {
        let m = gm_model(6);
        let zzb = TruncSeries::var(Var::Z, 6).mul(&TruncSeries::var(Var::ZBar, 6));
        assert_eq!(l1(&zzb), TruncSeries::var(Var::ZBar, 5));
        assert!(t_field(&zzb).is_zero());
        let k = slant_k(&m).unwrap();
        // k(0) = 0, L1b(k)(0) = -1 for the model
        assert_eq!(at_origin(&k), GaussRat::zero());
        assert_eq!(at_origin(&l1bar(&k)), GaussRat::from_int(-1));
        // K(constant) = 0, K(zeta) = 1
        let one = TruncSeries::one(6);
        assert!(field_k(&one, &k).is_zero());
        let zeta = TruncSeries::var(Var::Zeta, 6);
        let kz = field_k(&zeta, &k);
        assert_eq!(kz.coeff(Exponent4::new(0, 0, 0, 0)), GaussRat::one());
        assert_eq!(kz.num_terms(), 1);
    }

    #[test]
    fn slant_of_cubic_truncation() {
        // u = z zbar + z^2 zetabar/2 + zbar^2 zeta/2: k = -zbar + O(2), k(0) = 0
        let mut f = TruncSeries::zero(5);
        f.set_coeff(Exponent4::new(1, 0, 1, 0), GaussRat::one());
        f.set_coeff(Exponent4::new(2, 0, 0, 1), GaussRat::from_ratio(1, 2));
        f.set_coeff(Exponent4::new(0, 1, 2, 0), GaussRat::from_ratio(1, 2));
        let h = crate::hypersurface::Hypersurface::from_series(f, 5, crate::hypersurface::Convention::Monomial);
        let k = slant_k(&h).unwrap();
        assert_eq!(at_origin(&k), GaussRat::zero());
        assert_eq!(k.coeff(Exponent4::new(0, 0, 1, 0)), GaussRat::from_int(-1));
    }

    #[test]
    fn fundamental_p_vanishes_on_model_center() {
        let m = gm_model(6);
        let p = fundamental_p(&m).unwrap();
        assert_eq!(at_origin(&p), GaussRat::zero());
    }

    #[test]
    fn model_invariants_vanish() {
        for delta in [6u32, 7] {
            let m = gm_model(delta);
            assert_eq!(invariant_i0_diff(&m).unwrap(), GaussRat::zero());
            assert_eq!(invariant_v0_diff(&m).unwrap(), GaussRat::zero());
            assert_eq!(invariant_q0_final(&m).unwrap(), GaussRat::zero());
            assert_eq!(invariant_q0_def(&m).unwrap(), GaussRat::zero());
        }
    }

    #[test]
    fn tube_invariants_vanish_after_cleanup() {
        let (t, _) = lightcone_tube(7).remove_pluriharmonic();
        assert_eq!(invariant_i0_diff(&t).unwrap(), GaussRat::zero());
        assert_eq!(invariant_v0_diff(&t).unwrap(), GaussRat::zero());
        assert_eq!(invariant_q0_final(&t).unwrap(), GaussRat::zero());
    }

    #[test]
    fn q0_routes_agree_and_are_real() {
        for seed in [1u64, 2, 3] {
            let h = random_rank1(seed, 6);
            let qf = invariant_q0_final(&h).unwrap();
            let qd = invariant_q0_def(&h).unwrap();
            assert!(qf.is_real(), "Q0 not real on seed {}", seed);
            assert_eq!(qf, qd, "route mismatch on seed {}", seed);
        }
    }

    #[test]
    fn operator_identities_hold() {
        let m = gm_model(7);
        let rep = verify_operator_identities(&m).unwrap();
        assert!(rep.all_zero(), "failing on model: {:?}", rep.failing());
        for seed in [4u64, 5] {
            let h = random_rank1(seed, 6);
            let rep = verify_operator_identities(&h).unwrap();
            assert!(rep.all_zero(), "failing on seed {}: {:?}", seed, rep.failing());
        }
    }

    #[test]
    fn closed_forms_parse() {
        assert_eq!(parse_jet_polynomial(I0_NUMERATOR).len(), 52);
        assert_eq!(parse_jet_polynomial(V0_NUMERATOR).len(), 11);
    }

    #[test]
    fn closed_forms_vanish_on_model() {
        let m = gm_model(6);
        assert_eq!(i0_closed_form(&m).unwrap(), GaussRat::zero());
        assert_eq!(v0_closed_form(&m).unwrap(), GaussRat::zero());
    }

    #[test]
    fn insufficient_order_is_refused() {
        let m = gm_model(4);
        assert!(matches!(
            invariant_i0_diff(&m),
            Err(CoreError::InsufficientOrder { .. })
        ));
    }
}
