//! Truncated formal power series in the four commuting variables
//! `z, zeta, zbar, zetabar`, with exact `GaussRat` coefficients.
//!
//! Invariants:
//! - no stored exponent has total degree above `valid_order`;
//! - no stored coefficient is zero;
//! - every coefficient of total degree <= `valid_order` is exact.
//!
//! `valid_order` is a conservative certificate. Binary operations take the
//! minimum of the contributing certificates, derivatives lose one order,
//! and nothing ever reports a larger order than these rules allow.

use crate::error::CoreError;
use crate::scalar::GaussRat;
use std::collections::BTreeMap;
use std::fmt;

/// The four series variables, in storage order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    Z,
    Zeta,
    ZBar,
    ZetaBar,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Z, Var::Zeta, Var::ZBar, Var::ZetaBar];

}

/// Monomial exponent `z^a zeta^b zbar^c zetabar^d`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Exponent4 {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Exponent4 {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self { a, b, c, d }
    }

    pub fn total(&self) -> u32 {
        self.a + self.b + self.c + self.d
    }

    /// Weighted degree: `z` and `zbar` carry weight 1, `zeta` and `zetabar` weight 0.
    pub fn weight(&self) -> u32 {
        self.a + self.c
    }

    /// Exponent of the conjugate monomial (variable swap `z <-> zbar`, `zeta <-> zetabar`).
    pub fn swapped(&self) -> Self {
        Self::new(self.c, self.d, self.a, self.b)
    }

    /// Dependent means a multiple of `zeta * zetabar`.
    pub fn is_dependent(&self) -> bool {
        self.b >= 1 && self.d >= 1
    }

    fn get(&self, v: Var) -> u32 {
        match v {
            Var::Z => self.a,
            Var::Zeta => self.b,
            Var::ZBar => self.c,
            Var::ZetaBar => self.d,
        }
    }

    fn with(&self, v: Var, value: u32) -> Self {
        let mut e = *self;
        match v {
            Var::Z => e.a = value,
            Var::Zeta => e.b = value,
            Var::ZBar => e.c = value,
            Var::ZetaBar => e.d = value,
        }
        e
    }
}

/// Sparse truncated power series with a validity certificate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    coeffs: BTreeMap<Exponent4, GaussRat>,
    valid_order: u32,
}

impl TruncSeries {
    pub fn zero(valid_order: u32) -> Self {
        Self { coeffs: BTreeMap::new(), valid_order }
    }

    pub fn constant(c: GaussRat, valid_order: u32) -> Self {
        let mut s = Self::zero(valid_order);
        s.set_coeff(Exponent4::new(0, 0, 0, 0), c);
        s
    }

    pub fn one(valid_order: u32) -> Self {
        Self::constant(GaussRat::one(), valid_order)
    }

    pub fn var(v: Var, valid_order: u32) -> Self {
        let mut s = Self::zero(valid_order);
        let e = Exponent4::new(0, 0, 0, 0).with(v, 1);
        s.set_coeff(e, GaussRat::one());
        s
    }

    pub fn monomial(e: Exponent4, c: GaussRat, valid_order: u32) -> Self {
        let mut s = Self::zero(valid_order);
        s.set_coeff(e, c);
        s
    }

    pub fn valid_order(&self) -> u32 {
        self.valid_order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&Exponent4, &GaussRat)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at `e`; zero for absent entries within the certificate.
    /// Panics when `e` lies beyond the valid order (the value is unknown).
    pub fn coeff(&self, e: Exponent4) -> GaussRat {
        assert!(
            e.total() <= self.valid_order,
            "coefficient at total degree {} requested, series only valid to {}",
            e.total(),
            self.valid_order
        );
        self.coeffs.get(&e).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Raw stored coefficient, without the certificate check. Absent
    /// entries are `None`; beyond the certificate the value means nothing.
    pub fn coeff_raw(&self, e: &Exponent4) -> Option<&GaussRat> {
        self.coeffs.get(e)
    }

    /// Set coefficient at `e`, pruning zeros; ignores exponents beyond the certificate.
    pub fn set_coeff(&mut self, e: Exponent4, c: GaussRat) {
        if e.total() > self.valid_order {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    fn add_assign_coeff(&mut self, e: Exponent4, c: &GaussRat) {
        if c.is_zero() || e.total() > self.valid_order {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(GaussRat::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    /// Drop stored terms above `order` and lower the certificate to it.
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.valid_order);
        let mut out = Self::zero(order);
        for (e, c) in &self.coeffs {
            if e.total() <= order {
                out.coeffs.insert(*e, c.clone());
            }
        }
        out
    }

    /// Smallest total degree present, or `None` for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| e.total()).min()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.valid_order.min(rhs.valid_order);
        let mut out = self.truncated(order);
        for (e, c) in &rhs.coeffs {
            out.add_assign_coeff(*e, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.valid_order);
        for (e, c) in &self.coeffs {
            out.coeffs.insert(*e, -c);
        }
        out
    }

    pub fn scale(&self, k: &GaussRat) -> Self {
        let mut out = Self::zero(self.valid_order);
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.coeffs {
            out.set_coeff(*e, k * c);
        }
        out
    }

    /// Cauchy product, truncated to the minimum certificate.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.valid_order.min(rhs.valid_order);
        let mut out = Self::zero(order);
        for (ea, ca) in &self.coeffs {
            let ta = ea.total();
            if ta > order {
                continue;
            }
            for (eb, cb) in &rhs.coeffs {
                if ta + eb.total() > order {
                    continue;
                }
                let e = Exponent4::new(ea.a + eb.a, ea.b + eb.b, ea.c + eb.c, ea.d + eb.d);
                out.add_assign_coeff(e, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.valid_order);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient `self / unit`, exact up to the minimum certificate.
    /// The divisor must have a nonzero constant term.
    pub fn divide_by_unit(&self, unit: &Self) -> Result<Self, CoreError> {
        let u0 = unit.coeffs.get(&Exponent4::new(0, 0, 0, 0)).cloned().unwrap_or_else(GaussRat::zero);
        if u0.is_zero() {
            return Err(CoreError::NonUnitDivisor);
        }
        let order = self.valid_order.min(unit.valid_order);
        let u0_inv = u0.inv();
        // Solve Q * U = S degree by degree.
        let mut q = Self::zero(order);
        let mut rem = self.truncated(order);
        for n in 0..=order {
            let level: Vec<(Exponent4, GaussRat)> = rem
                .coeffs
                .iter()
                .filter(|(e, _)| e.total() == n)
                .map(|(e, c)| (*e, c.clone()))
                .collect();
            for (e, c) in level {
                let qc = &c * &u0_inv;
                q.set_coeff(e, qc.clone());
                // rem -= qc * z^e * U
                for (eu, cu) in &unit.coeffs {
                    let et = Exponent4::new(e.a + eu.a, e.b + eu.b, e.c + eu.c, e.d + eu.d);
                    if et.total() <= order {
                        rem.add_assign_coeff(et, &-&(&qc * cu));
                    }
                }
            }
        }
        debug_assert!(rem.is_zero(), "division left a nonzero remainder");
        Ok(q)
    }

    /// Formal partial derivative; the certificate drops by one.
    pub fn derive(&self, v: Var) -> Self {
        let order = self.valid_order.saturating_sub(1);
        let mut out = Self::zero(order);
        for (e, c) in &self.coeffs {
            let k = e.get(v);
            if k == 0 {
                continue;
            }
            let de = e.with(v, k - 1);
            out.add_assign_coeff(de, &c.scale_int(k as i64));
        }
        out
    }

    /// Coefficient conjugation composed with the variable swap
    /// `(z, zeta) <-> (zbar, zetabar)`; real series are fixed points.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.valid_order);
        for (e, c) in &self.coeffs {
            out.coeffs.insert(e.swapped(), c.conj());
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Restriction to monomials of weighted degree `nu`.
    pub fn weighted_component(&self, nu: u32) -> Self {
        let mut out = Self::zero(self.valid_order);
        for (e, c) in &self.coeffs {
            if e.weight() == nu {
                out.coeffs.insert(*e, c.clone());
            }
        }
        out
    }

    /// Composition `self(s_z, s_zeta, s_zbar, s_zetabar)`.
    /// Every substituted series must have zero constant term.
    pub fn substitute(&self, subs: &[&TruncSeries; 4]) -> Result<Self, CoreError> {
        let mut order = self.valid_order;
        for (i, s) in subs.iter().enumerate() {
            if !s.coeffs.get(&Exponent4::new(0, 0, 0, 0)).map_or(true, |c| c.is_zero()) {
                return Err(CoreError::NonzeroConstantTerm(["z", "zeta", "zbar", "zetabar"][i]));
            }
            order = order.min(s.valid_order);
        }
        // Highest power of each variable that can still contribute.
        let max_pow = |v: Var| self.coeffs.keys().map(|e| e.get(v)).max().unwrap_or(0).min(order);
        let pows: Vec<Vec<TruncSeries>> = Var::ALL
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut p = vec![TruncSeries::one(order)];
                for k in 1..=max_pow(v) {
                    p.push(p[(k - 1) as usize].mul(subs[i]));
                }
                p
            })
            .collect();
        // Group by the (a, b) part so holomorphic/antiholomorphic products stay small.
        let mut groups: BTreeMap<(u32, u32), TruncSeries> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if e.total() > order {
                continue;
            }
            let anti = pows[2][e.c as usize].mul(&pows[3][e.d as usize]);
            groups
                .entry((e.a, e.b))
                .or_insert_with(|| TruncSeries::zero(order))
                .add_assign_series(&anti.scale(c));
        }
        let mut out = Self::zero(order);
        for ((a, b), tail) in groups {
            let head = pows[0][a as usize].mul(&pows[1][b as usize]);
            out.add_assign_series(&head.mul(&tail));
        }
        Ok(out)
    }

    fn add_assign_series(&mut self, rhs: &Self) {
        debug_assert!(rhs.valid_order >= self.valid_order || rhs.coeffs.keys().all(|e| e.total() <= self.valid_order));
        for (e, c) in &rhs.coeffs {
            self.add_assign_coeff(*e, c);
        }
    }

    /// Exact polynomial evaluation at a point (the stored truncation is
    /// treated as the polynomial itself).
    pub fn eval(&self, p: &[GaussRat; 4]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for (v, x) in [e.a, e.b, e.c, e.d].into_iter().zip(p.iter()) {
                term = &term * &x.pow(v as i64);
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Exact Taylor shift: substitute `var -> var + offset[var]` into the
    /// stored polynomial. The certificate is kept; callers re-validate any
    /// structural property (the shifted polynomial is exact as a polynomial).
    pub fn shifted(&self, offset: &[GaussRat; 4]) -> Self {
        let order = self.valid_order;
        // Binomial expansion per variable, one variable at a time.
        let mut cur = self.clone();
        for (vi, v) in Var::ALL.iter().enumerate() {
            if offset[vi].is_zero() {
                continue;
            }
            let mut next = Self::zero(order);
            for (e, c) in &cur.coeffs {
                let k = e.get(*v);
                // (x + t)^k = sum_j C(k,j) t^(k-j) x^j
                let mut binom = GaussRat::one();
                let mut tpow = GaussRat::one();
                let mut per_j: Vec<GaussRat> = Vec::with_capacity(k as usize + 1);
                for _ in 0..=k {
                    per_j.push(GaussRat::zero());
                }
                for j in (0..=k).rev() {
                    // binom = C(k, j), tpow = t^(k-j)
                    per_j[j as usize] = &binom * &tpow;
                    if j > 0 {
                        binom = &binom.scale_int(j as i64) * &GaussRat::from_ratio(1, (k - j + 1) as i64);
                        tpow = &tpow * &offset[vi];
                    }
                }
                for j in 0..=k {
                    let coeff = &per_j[j as usize] * c;
                    next.add_assign_coeff(e.with(*v, j), &coeff);
                }
            }
            cur = next;
        }
        cur
    }
}

impl GaussRat {
    /// Multiply by a small integer.
    pub fn scale_int(&self, k: i64) -> GaussRat {
        self * &GaussRat::from_int(k)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O({})", self.valid_order + 1);
        }
        let names = ["z", "s", "Z", "S"]; // s = zeta, Z = zbar, S = zetabar
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (v, n) in names.iter().zip([e.a, e.b, e.c, e.d]) {
                if n == 1 {
                    write!(f, "*{}", v)?;
                } else if n > 1 {
                    write!(f, "*{}^{}", v, n)?;
                }
            }
        }
        write!(f, " + O({})", self.valid_order + 1)
    }
}

/// A truncated series that depends only on `(z, zeta)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HoloSeries2(TruncSeries);

impl HoloSeries2 {
    pub fn new(s: TruncSeries) -> Self {
        assert!(
            s.support().all(|(e, _)| e.c == 0 && e.d == 0),
            "holomorphic series may not involve zbar or zetabar"
        );
        Self(s)
    }

    pub fn zero(order: u32) -> Self {
        Self(TruncSeries::zero(order))
    }

    pub fn series(&self) -> &TruncSeries {
        &self.0
    }

    pub fn into_series(self) -> TruncSeries {
        self.0
    }

    pub fn valid_order(&self) -> u32 {
        self.0.valid_order()
    }

    pub fn coeff(&self, a: u32, b: u32) -> GaussRat {
        self.0.coeff(Exponent4::new(a, b, 0, 0))
    }

    pub fn set_coeff(&mut self, a: u32, b: u32, c: GaussRat) {
        self.0.set_coeff(Exponent4::new(a, b, 0, 0), c);
    }

    /// The antiholomorphic series with conjugated coefficients,
    /// living in `(zbar, zetabar)`.
    pub fn conj_to_antiholo(&self) -> TruncSeries {
        self.0.conj()
    }

    /// Compose with a holomorphic pair: `self(f, g)`.
    pub fn compose(&self, f: &HoloSeries2, g: &HoloSeries2) -> Result<HoloSeries2, CoreError> {
        let z = TruncSeries::zero(self.0.valid_order());
        let out = self.0.substitute(&[f.series(), g.series(), &z, &z])?;
        Ok(HoloSeries2::new(out))
    }

    pub fn truncated(&self, order: u32) -> Self {
        Self(self.0.truncated(order))
    }
}

/// Inverse of a holomorphic pair `(f, g)` fixing the origin, solved degree
/// by degree up to total degree `delta` via 2x2 linear systems.
pub fn invert_pair(
    f: &HoloSeries2,
    g: &HoloSeries2,
    delta: u32,
) -> Result<(HoloSeries2, HoloSeries2), CoreError> {
    let f10 = f.coeff(1, 0);
    let f01 = f.coeff(0, 1);
    let g10 = g.coeff(1, 0);
    let g01 = g.coeff(0, 1);
    if !f.coeff(0, 0).is_zero() || !g.coeff(0, 0).is_zero() {
        return Err(CoreError::NonzeroConstantTerm("map component"));
    }
    let det = &(&f10 * &g01) - &(&f01 * &g10);
    if det.is_zero() {
        return Err(CoreError::SingularJacobian);
    }
    let det_inv = det.inv();
    // Jacobian inverse rows.
    let inv = [
        [&g01 * &det_inv, -&(&f01 * &det_inv)],
        [-&(&g10 * &det_inv), &f10 * &det_inv],
    ];
    let mut ft = HoloSeries2::zero(delta);
    let mut gt = HoloSeries2::zero(delta);
    ft.set_coeff(1, 0, &inv[0][0] * &GaussRat::one());
    ft.set_coeff(0, 1, inv[0][1].clone());
    gt.set_coeff(1, 0, inv[1][0].clone());
    gt.set_coeff(0, 1, inv[1][1].clone());
    for n in 2..=delta {
        // Residual of the current partial inverse.
        let rf = f.truncated(delta).compose(&ft, &gt)?;
        let rg = g.truncated(delta).compose(&ft, &gt)?;
        let mut done = true;
        for j in 0..=n {
            let a = j;
            let b = n - j;
            let mut rfc = rf.coeff(a, b);
            let mut rgc = rg.coeff(a, b);
            if a == 1 && b == 0 {
                rfc = &rfc - &GaussRat::one();
            }
            if a == 0 && b == 1 {
                rgc = &rgc - &GaussRat::one();
            }
            if rfc.is_zero() && rgc.is_zero() {
                continue;
            }
            done = false;
            // Correction enters linearly through the Jacobian.
            let dz = &(&inv[0][0] * &rfc) + &(&inv[0][1] * &rgc);
            let dg = &(&inv[1][0] * &rfc) + &(&inv[1][1] * &rgc);
            ft.set_coeff(a, b, &ft.coeff(a, b) - &dz);
            gt.set_coeff(a, b, &gt.coeff(a, b) - &dg);
        }
        if done {
            continue;
        }
    }
    Ok((ft, gt))
}
