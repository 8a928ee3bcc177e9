//! Rigid graphed hypersurfaces `u = F(z, zeta, zbar, zetabar)` in C^3:
//! validation, the Levi and 2-nondegeneracy determinants, completion of
//! dependent jets on the Levi-rank-1 variety, recentering, and the model
//! generators (light-cone model, tube, seeded random samples).
//!
//! Two coefficient conventions coexist. MONOMIAL stores the coefficient of
//! `z^a zeta^b zbar^c zetabar^d`; TAYLOR stores that value times `a!b!c!d!`.
//! Series are held in monomial form internally; `taylor_coeff` rescales on
//! access, and constructors accept either convention.

use crate::error::CoreError;
use crate::scalar::GaussRat;
use crate::series::{Exponent4, TruncSeries, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Convention {
    Monomial,
    Taylor,
}

pub fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n as u64 {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

/// `a! b! c! d!` as a real scalar.
pub fn exponent_factorial(e: Exponent4) -> GaussRat {
    let f = factorial(e.a) * factorial(e.b) * factorial(e.c) * factorial(e.d);
    GaussRat::new(f, BigRational::from_integer(BigInt::from(0)))
}

/// A rigid graph in C^3, held as a truncated polynomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypersurface {
    /// Graphing function, monomial convention.
    f: TruncSeries,
    degree: u32,
    convention: Convention,
}

impl Hypersurface {
    /// Build from a series given in `convention`; stored internally in
    /// monomial form, truncated to `degree`.
    pub fn from_series(series: TruncSeries, degree: u32, convention: Convention) -> Self {
        let mut f = TruncSeries::zero(degree);
        for (e, c) in series.support() {
            if e.total() > degree {
                continue;
            }
            let v = match convention {
                Convention::Monomial => c.clone(),
                Convention::Taylor => c / &exponent_factorial(*e),
            };
            f.set_coeff(*e, v);
        }
        Self { f, degree, convention }
    }

    pub(crate) fn from_monomial_series(f: TruncSeries, degree: u32, convention: Convention) -> Self {
        Self { f: f.truncated(degree), degree, convention }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.f
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Coefficient of the monomial `z^a zeta^b zbar^c zetabar^d`.
    pub fn monomial_coeff(&self, a: u32, b: u32, c: u32, d: u32) -> GaussRat {
        self.f.coeff(Exponent4::new(a, b, c, d))
    }

    /// Taylor coefficient: monomial coefficient times `a!b!c!d!`.
    pub fn taylor_coeff(&self, a: u32, b: u32, c: u32, d: u32) -> GaussRat {
        let e = Exponent4::new(a, b, c, d);
        &self.f.coeff(e) * &exponent_factorial(e)
    }

    /// Levi determinant `F_zzb F_ssb - F_zsb F_szb` (valid order drops by two).
    pub fn levi_det(&self) -> TruncSeries {
        let fz = self.f.derive(Var::Z);
        let fs = self.f.derive(Var::Zeta);
        let fzzb = fz.derive(Var::ZBar);
        let fssb = fs.derive(Var::ZetaBar);
        let fzsb = fz.derive(Var::ZetaBar);
        let fszb = fs.derive(Var::ZBar);
        fzzb.mul(&fssb).sub(&fzsb.mul(&fszb))
    }

    /// 2-nondegeneracy determinant at the origin:
    /// `det [[F_zzb, F_zsb], [F_zzzb, F_zzsb]](0)`.
    pub fn nondeg_det(&self) -> GaussRat {
        let m00 = self.taylor_coeff(1, 0, 1, 0);
        let m01 = self.taylor_coeff(1, 0, 0, 1);
        let m10 = self.taylor_coeff(2, 0, 1, 0);
        let m11 = self.taylor_coeff(2, 0, 0, 1);
        &(&m00 * &m11) - &(&m01 * &m10)
    }

    pub fn validate(&self) -> ValidationReport {
        let reality = self.f.is_real();
        let through_origin = self
            .f
            .coeff_raw(&Exponent4::new(0, 0, 0, 0))
            .map_or(true, |c| c.is_zero());
        let pluriharmonic_free = self
            .f
            .support()
            .all(|(e, _)| !(e.c == 0 && e.d == 0) && !(e.a == 0 && e.b == 0));
        let levi = self.levi_det();
        let rank1_to_degree = if levi.is_zero() {
            self.degree
        } else {
            levi.valuation().map_or(self.degree, |v| (v + 1).min(self.degree))
        };
        ValidationReport {
            reality,
            through_origin,
            pluriharmonic_free,
            levi_pivot_nonzero: !self.monomial_coeff(1, 0, 1, 0).is_zero(),
            rank1_to_degree,
            two_nondegenerate: !self.nondeg_det().is_zero(),
            degree: self.degree,
        }
    }

    /// Kill pluriharmonic terms via `w' = w - 2 chi(z, zeta)` with
    /// `chi = F(z, zeta, 0, 0)`. Returns the cleaned graph together with
    /// `chi` (the caller assembles the rigid map `h = -2 chi` from it).
    pub fn remove_pluriharmonic(&self) -> (Hypersurface, TruncSeries) {
        let mut chi = TruncSeries::zero(self.degree);
        for (e, c) in self.f.support() {
            if e.c == 0 && e.d == 0 {
                chi.set_coeff(*e, c.clone());
            }
        }
        let out = self.f.sub(&chi).sub(&chi.conj());
        (
            Hypersurface { f: out, degree: self.degree, convention: self.convention },
            chi,
        )
    }

    /// Exact polynomial recentering at `(z0, zeta0)` followed by
    /// pluriharmonic removal. The degree is preserved; structural flags are
    /// not assumed and must be re-read from `validate` (the shifted
    /// truncation is exact as a polynomial, not as a jet of a completed
    /// series, so rank-1 typically degrades).
    pub fn recenter(&self, z0: &GaussRat, zeta0: &GaussRat) -> Result<Hypersurface, CoreError> {
        let offset = [z0.clone(), zeta0.clone(), z0.conj(), zeta0.conj()];
        let mut f = self.f.shifted(&offset);
        f.set_coeff(Exponent4::new(0, 0, 0, 0), GaussRat::zero());
        let h = Hypersurface { f, degree: self.degree, convention: self.convention };
        let (h, _) = h.remove_pluriharmonic();
        if h.monomial_coeff(1, 0, 1, 0).is_zero() {
            return Err(CoreError::ZeroLeviPivot);
        }
        Ok(h)
    }

    /// Independent jets (slots with `b*d = 0`), monomial convention.
    pub fn independent_jets(&self) -> JetTable {
        let mut jets = JetTable::new(self.degree, Convention::Monomial);
        for (e, c) in self.f.support() {
            if !e.is_dependent() {
                jets.coeffs.insert(*e, c.clone());
            }
        }
        jets
    }
}

/// Structural validation flags; `rank1_to_degree` is the largest degree d
/// such that the Levi determinant is O(d-1) on the stored truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub reality: bool,
    pub through_origin: bool,
    pub pluriharmonic_free: bool,
    pub levi_pivot_nonzero: bool,
    pub rank1_to_degree: u32,
    pub two_nondegenerate: bool,
    pub degree: u32,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.reality
            && self.through_origin
            && self.pluriharmonic_free
            && self.levi_pivot_nonzero
            && self.rank1_to_degree >= self.degree
            && self.two_nondegenerate
    }
}

/// Independent coefficients (`b = 0` or `d = 0`) up to a degree, kept in
/// the convention they were entered with.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetTable {
    coeffs: BTreeMap<Exponent4, GaussRat>,
    degree: u32,
    convention: Convention,
}

impl JetTable {
    pub fn new(degree: u32, convention: Convention) -> Self {
        Self { coeffs: BTreeMap::new(), degree, convention }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn set(&mut self, a: u32, b: u32, c: u32, d: u32, v: GaussRat) {
        let e = Exponent4::new(a, b, c, d);
        assert!(!e.is_dependent(), "dependent slot ({},{},{},{}) in jet table", a, b, c, d);
        assert!(e.total() <= self.degree, "slot beyond jet degree");
        if v.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, v);
        }
    }

    pub fn get(&self, a: u32, b: u32, c: u32, d: u32) -> GaussRat {
        self.coeffs
            .get(&Exponent4::new(a, b, c, d))
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Exponent4, &GaussRat)> {
        self.coeffs.iter()
    }

    /// Reality pairing: the value at `e` is the conjugate of the value at
    /// the swapped slot whenever that slot is independent too.
    pub fn reality_consistent(&self) -> bool {
        self.coeffs.iter().all(|(e, c)| {
            let s = e.swapped();
            if s.is_dependent() {
                return true;
            }
            if *e == s {
                c.is_real()
            } else {
                self.coeffs.get(&s).map_or(false, |cs| *cs == c.conj())
            }
        })
    }

    fn monomial_value(&self, e: &Exponent4, c: &GaussRat) -> GaussRat {
        match self.convention {
            Convention::Monomial => c.clone(),
            Convention::Taylor => c / &exponent_factorial(*e),
        }
    }
}

/// Fill in the dependent coefficients (`b >= 1` and `d >= 1`) as the unique
/// values making the Levi determinant vanish to order `degree - 2`.
///
/// Unknowns are processed by (b+d, total degree, lexicographic); each enters
/// its defining equation linearly with pivot `F_{1,0,1,0} * b * d`, every
/// other term of that equation being already determined under this order.
pub fn complete_dependents(jets: &JetTable) -> Result<Hypersurface, CoreError> {
    let degree = jets.degree;
    let mut f = TruncSeries::zero(degree);
    for (e, c) in jets.entries() {
        f.set_coeff(*e, jets.monomial_value(e, c));
    }
    let pivot = f.coeff(Exponent4::new(1, 0, 1, 0));
    if pivot.is_zero() {
        return Err(CoreError::ZeroLeviPivot);
    }

    let mut unknowns: Vec<Exponent4> = Vec::new();
    for n in 2..=degree {
        for a in 0..=n {
            for b in 0..=(n - a) {
                for c in 0..=(n - a - b) {
                    let d = n - a - b - c;
                    let e = Exponent4::new(a, b, c, d);
                    if e.is_dependent() {
                        unknowns.push(e);
                    }
                }
            }
        }
    }
    unknowns.sort_by_key(|e| (e.b + e.d, e.total(), e.a, e.b, e.c, e.d));

    for u in unknowns {
        // The unknown enters the Levi coefficient at this exponent through
        // the pairing with the constant term of F_zzb; every other entry of
        // that equation is of strictly smaller (b+d, degree) class.
        let target = Exponent4::new(u.a, u.b - 1, u.c, u.d - 1);
        let residual = levi_coeff(&f, target);
        let denom = pivot.scale_int((u.b * u.d) as i64);
        f.set_coeff(u, &-&residual / &denom);
    }

    let h = Hypersurface { f, degree, convention: jets.convention };
    let levi = h.levi_det();
    let flat = levi.is_zero() || levi.valuation().map_or(true, |v| v + 1 >= degree);
    if !flat {
        return Err(CoreError::Invalid("rank-1 completion failed".into()));
    }
    Ok(h)
}

/// Coefficient of the Levi determinant of `f` at exponent `t`, by direct
/// convolution; absent entries count as zero (unsolved dependents never
/// occur in the equations that are consulted before they are set).
fn levi_coeff(f: &TruncSeries, t: Exponent4) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (e, c) in f.support() {
        // F_zzb factor from slot e needs a z and a zbar.
        if e.a >= 1 && e.c >= 1 {
            let e1 = Exponent4::new(e.a - 1, e.b, e.c - 1, e.d);
            if e1.a <= t.a && e1.b <= t.b && e1.c <= t.c && e1.d <= t.d {
                let e2 = Exponent4::new(t.a - e1.a, t.b - e1.b + 1, t.c - e1.c, t.d - e1.d + 1);
                if let Some(p) = f.coeff_raw(&e2) {
                    let mult = (e.a * e.c * e2.b * e2.d) as i64;
                    acc = &acc + &(c * p).scale_int(mult);
                }
            }
        }
        // -F_zsb * F_szb
        if e.a >= 1 && e.d >= 1 {
            let e1 = Exponent4::new(e.a - 1, e.b, e.c, e.d - 1);
            if e1.a <= t.a && e1.b <= t.b && e1.c <= t.c && e1.d <= t.d {
                let e2 = Exponent4::new(t.a - e1.a, t.b - e1.b + 1, t.c - e1.c + 1, t.d - e1.d);
                if let Some(p) = f.coeff_raw(&e2) {
                    let mult = (e.a * e.d * e2.b * e2.c) as i64;
                    acc = &acc - &(c * p).scale_int(mult);
                }
            }
        }
    }
    acc
}

/// The light-cone model
/// `u = (z zbar + z^2 zetabar / 2 + zbar^2 zeta / 2) / (1 - zeta zetabar)`,
/// truncated to total degree `delta`.
pub fn gm_model(delta: u32) -> Hypersurface {
    assert!(delta >= 3);
    let mut f = TruncSeries::zero(delta);
    let half = GaussRat::from_ratio(1, 2);
    let mut i = 0u32;
    while 2 + 2 * i <= delta {
        f.set_coeff(Exponent4::new(1, i, 1, i), GaussRat::one());
        i += 1;
    }
    let mut i = 0u32;
    while 3 + 2 * i <= delta {
        f.set_coeff(Exponent4::new(2, i, 0, i + 1), half.clone());
        f.set_coeff(Exponent4::new(0, i + 1, 2, i), half.clone());
        i += 1;
    }
    Hypersurface { f, degree: delta, convention: Convention::Monomial }
}

/// Tube over the light cone, `u = (z + zbar)^2 / (4 - 2 zeta - 2 zetabar)`,
/// truncated to total degree `delta`. Contains pluriharmonic terms.
pub fn lightcone_tube(delta: u32) -> Hypersurface {
    assert!(delta >= 3);
    let z = TruncSeries::var(Var::Z, delta);
    let zb = TruncSeries::var(Var::ZBar, delta);
    let s = TruncSeries::var(Var::Zeta, delta);
    let sb = TruncSeries::var(Var::ZetaBar, delta);
    let num = z.add(&zb).pow(2).scale(&GaussRat::from_ratio(1, 4));
    let w = s.add(&sb).scale(&GaussRat::from_ratio(1, 2));
    let mut geo = TruncSeries::one(delta);
    let mut wp = TruncSeries::one(delta);
    for _ in 1..=delta {
        wp = wp.mul(&w);
        geo = geo.add(&wp);
    }
    Hypersurface { f: num.mul(&geo), degree: delta, convention: Convention::Monomial }
}

/// Exact truncation of the light-cone model recentered at a rational point
/// `(z0, zeta0)` of its graph, pluriharmonic part removed. Requires
/// `1 - zeta0 conj(zeta0) != 0`.
pub fn gm_model_recentered(z0: &GaussRat, zeta0: &GaussRat, delta: u32) -> Hypersurface {
    let one_minus = &GaussRat::one() - &(zeta0 * &zeta0.conj());
    assert!(!one_minus.is_zero(), "recenter point outside the model chart");
    let z = TruncSeries::var(Var::Z, delta);
    let zb = TruncSeries::var(Var::ZBar, delta);
    let s = TruncSeries::var(Var::Zeta, delta);
    let sb = TruncSeries::var(Var::ZetaBar, delta);
    let zz = z.add(&TruncSeries::constant(z0.clone(), delta));
    let zzb = zb.add(&TruncSeries::constant(z0.conj(), delta));
    let ss = s.add(&TruncSeries::constant(zeta0.clone(), delta));
    let ssb = sb.add(&TruncSeries::constant(zeta0.conj(), delta));
    let half = GaussRat::from_ratio(1, 2);
    let num = zz
        .mul(&zzb)
        .add(&zz.pow(2).mul(&ssb).scale(&half))
        .add(&zzb.pow(2).mul(&ss).scale(&half));
    // 1/(1 - ss ssb) = (1/one_minus) * sum w^k, w = (s sb0 + sb s0 + s sb)/one_minus
    let w = s
        .scale(&zeta0.conj())
        .add(&sb.scale(zeta0))
        .add(&s.mul(&sb))
        .scale(&one_minus.inv());
    let mut geo = TruncSeries::one(delta);
    let mut wp = TruncSeries::one(delta);
    for _ in 1..=delta {
        wp = wp.mul(&w);
        geo = geo.add(&wp);
    }
    let mut f = num.mul(&geo).scale(&one_minus.inv());
    f.set_coeff(Exponent4::new(0, 0, 0, 0), GaussRat::zero());
    let h = Hypersurface { f, degree: delta, convention: Convention::Monomial };
    let (h, _) = h.remove_pluriharmonic();
    h
}

/// Deterministic random Levi-rank-1, 2-nondegenerate sample.
///
/// Independent jets are drawn from a bounded rational set with
/// `F_{1,0,1,0} = 1`, dependent jets completed; degenerate draws are
/// rejected and redrawn, so the result is a pure function of the seed.
pub fn random_rank1(seed: u64, delta: u32) -> Hypersurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let jets = draw_jets(&mut rng, delta);
        let h = match complete_dependents(&jets) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let report = h.validate();
        // Nonzero pivots needed by the pipeline and the closed-form fixtures.
        let d1 = &(&h.taylor_coeff(0, 1, 1, 0) * &h.taylor_coeff(1, 0, 2, 0))
            - &(&h.taylor_coeff(0, 1, 2, 0) * &h.taylor_coeff(1, 0, 1, 0));
        if report.all_pass() && !d1.is_zero() {
            return h;
        }
    }
}

fn draw_jets(rng: &mut ChaCha8Rng, delta: u32) -> JetTable {
    let mut jets = JetTable::new(delta, Convention::Monomial);
    let small = |rng: &mut ChaCha8Rng| -> BigRational {
        let p = rng.gen_range(-2i64..=2);
        let q = rng.gen_range(1i64..=3);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    };
    for n in 2..=delta {
        for a in 0..=n {
            for b in 0..=(n - a) {
                for c in 0..=(n - a - b) {
                    let d = n - a - b - c;
                    let e = Exponent4::new(a, b, c, d);
                    // skip dependent, pluriharmonic, and conjugate-duplicate slots
                    if e.is_dependent() || a + b == 0 || c + d == 0 || e.swapped() < e {
                        continue;
                    }
                    if e == Exponent4::new(1, 0, 1, 0) {
                        jets.set(1, 0, 1, 0, GaussRat::one());
                        continue;
                    }
                    let v = if e == e.swapped() {
                        GaussRat::new(small(rng), BigRational::from_integer(BigInt::from(0)))
                    } else {
                        GaussRat::new(small(rng), small(rng))
                    };
                    if e == Exponent4::new(2, 0, 0, 1) && v.is_zero() {
                        jets.set(2, 0, 0, 1, GaussRat::from_ratio(1, 2));
                        jets.set(0, 1, 2, 0, GaussRat::from_ratio(1, 2));
                        continue;
                    }
                    jets.set(a, b, c, d, v.clone());
                    if e != e.swapped() {
                        let s = e.swapped();
                        jets.set(s.a, s.b, s.c, s.d, v.conj());
                    }
                }
            }
        }
    }
    jets
}
