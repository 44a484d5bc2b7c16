//! The interpolating series T and the twisted Poincare pairing, classically
//! and over a weight disk.
//!
//! With alpha = (0 -1; M 0) and q = M the pairing is
//!   [Phi, Psi] = kappa(-1) q^ell sum_x sum_r q^r binom(kappa, r)
//!                Phi(g_x{0,inf})_r [Psi(alpha^-1 g_x{1,inf}) - Psi(alpha^-1 g_x{-1,inf})]_r,
//! which at classical weights is B(phi, W psi) for the intersection form B below.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::dist::{eval_distribution, recenter, AnalyticFunction, DistWeight, MomentDistribution};
use crate::error::{prec_err, Error, Result};
use crate::finmod::mat_vec_mod;
use crate::modsym::classical::ClassicalSpace;
use crate::modsym::family::{DistSymbolSpace, FamilyWeight};
use crate::modsym::p1::mul2;
use crate::modsym::{w_terms, CoeffModule, Mat2, SymbolSpace};
use crate::padic::PAdic;
use crate::polyrep::binomial;
use crate::ring::{mat_vec, Mat, Ring, ZpkSeries, QQ};
use crate::weightspace::{binom_kappa, disk_binomial, eval_character, DiskElem, DiskRing, Kappa, TorusElement, WeightDisk};

/// Coefficients of T in (z - e)^r.
#[derive(Clone, Debug)]
pub struct TSeries {
    pub center: i64,
    pub coeffs: Vec<DiskElem>,
    pub ell: i64,
    pub component: usize,
}

/// kappa(t(-1)) = (-1)^{n_c}; the family part is trivial on -1.
pub fn kappa_sign(kappa: Kappa) -> i64 {
    let n = match kappa {
        Kappa::Classical(l, _) => l.n(),
        Kappa::Disk(d) => d.center.n(),
    };
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn prime_of(kappa: Kappa) -> u64 {
    match kappa {
        Kappa::Classical(_, p) => p,
        Kappa::Disk(d) => d.p,
    }
}

fn stratum(kappa: Kappa) -> i64 {
    match kappa {
        Kappa::Classical(l, _) => l.lambda2,
        Kappa::Disk(d) => d.ell,
    }
}

/// kappa(t(x)) * x^{-r} expanded as x0^.. (1 + rho y)^{s - r}: coefficients b_m rho^m.
fn torus_series(kappa: Kappa, r: u64, rho: &PAdic, ring: &DiskRing, len: usize) -> Result<Vec<DiskElem>> {
    let mut out = Vec::with_capacity(len);
    let mut rp = PAdic::one(ring.p, ring.n + 64);
    for m in 0..len {
        let b = match kappa {
            Kappa::Classical(l, _) => {
                let top = l.n() - r as i64;
                let mut c = BigInt::one();
                for i in 0..m as i64 {
                    c = c * BigInt::from(top - i) / BigInt::from(i + 1);
                }
                ring.from_bigint(&c)
            }
            Kappa::Disk(d) => {
                let dd = WeightDisk::with_scale(d.p, d.center, ring.n, ring.m, d.ring.scale)?;
                let s = ring.sub(&dd.weight_log()?, &ring.from_i64(r as i64));
                disk_binomial(ring, &s, m as u64)?
            }
        };
        out.push(ring.scale_pad(&rp, &b));
        rp = rp.mul(rho);
    }
    Ok(out)
}

/// kappa(t(1 + q e z)) q^ell z^r / (1 + q e z)^r in powers of (z - e), to `len` terms.
pub fn psi_integrand(kappa: Kappa, r: u64, e: i64, q: i64, ring: &DiskRing, len: usize) -> Result<Vec<DiskElem>> {
    let p = prime_of(kappa);
    if q.rem_euclid(p as i64) != 0 {
        return Err(Error::Domain(format!("need |q|_p < 1, got q = {}", q)));
    }
    let big = ring.n + 64;
    let x0 = PAdic::from_int(p, 1 + q * e * e, big);
    // x = x0 (1 + rho y), y = z - e
    let rho = PAdic::from_int(p, q * e, big).div(&x0)?;
    let t0 = TorusElement { x: x0.clone(), y: x0.inv()? };
    let k0 = eval_character(kappa, &t0, ring)?;
    let lead = ring.mul(&k0, &ring.constant(x0.inv()?.pow(r).mul(&qpow(p, q, stratum(kappa), big)?)));
    let tor = torus_series(kappa, r, &rho, ring, len)?;
    // (e + y)^r
    let mut ey = vec![ring.zero(); len];
    for (i, c) in ey.iter_mut().enumerate().take((r as usize + 1).min(len)) {
        let v = binomial(r as usize, i) * num_traits::pow(BigInt::from(e), r as usize - i);
        *c = ring.from_bigint(&v);
    }
    let mut out = vec![ring.zero(); len];
    for (i, a) in ey.iter().enumerate() {
        if ring.is_zero(a) {
            continue;
        }
        for (j, b) in tor.iter().enumerate().take(len - i) {
            out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
        }
    }
    Ok(out.iter().map(|x| ring.mul(&lead, x)).collect())
}

fn qpow(p: u64, q: i64, e: i64, prec: i64) -> Result<PAdic> {
    let b = PAdic::from_int(p, q, prec);
    if e >= 0 {
        Ok(b.pow(e as u64))
    } else {
        Ok(b.inv()?.pow((-e) as u64))
    }
}

/// psi_{kappa,r} = kappa(t(1 + q e z)) q^ell z^r (z - e)^r / (1 + q e z)^r around e.
pub fn psi_function(kappa: Kappa, r: u64, e: i64, q: i64, ring: &DiskRing, j_trunc: usize) -> Result<AnalyticFunction> {
    let base = psi_integrand(kappa, r, e, q, ring, j_trunc)?;
    let mut c = vec![ring.zero(); j_trunc];
    for (i, x) in base.iter().enumerate() {
        if i + (r as usize) < j_trunc {
            c[i + r as usize] = x.clone();
        }
    }
    Ok(AnalyticFunction::global(prime_of(kappa), e, c))
}

fn kappa_of(w: &DistWeight, p: u64) -> Kappa<'_> {
    match w {
        DistWeight::Classical(l) => Kappa::Classical(*l, p),
        DistWeight::Disk(d) => Kappa::Disk(d),
    }
}

/// T = kappa(-1) sum_r q^r binom(kappa, r) mu(psi_r / (z-e)^r) (z - e)^r.
///
/// The factor (z - e)^r of psi is the expansion variable, so mu is applied to
/// kappa(t(1 + q e z)) q^ell z^r / (1 + q e z)^r.
pub fn build_t_series(mu: &MomentDistribution, e: i64, q: i64, ell: i64) -> Result<TSeries> {
    let kappa = kappa_of(&mu.weight, mu.p);
    if stratum(kappa) != ell {
        return Err(Error::WeightMismatch(format!("weight is in stratum {}, asked for {}", stratum(kappa), ell)));
    }
    let ring = mu.ring();
    let m = mu.nmom();
    let sign = kappa_sign(kappa);
    let work = DiskRing::scaled(ring.p, ring.n + 64, ring.m, ring.scale);
    let mut coeffs = Vec::with_capacity(m);
    for r in 0..m as u64 {
        let b = match kappa {
            Kappa::Classical(l, _) => {
                if l.n() < 0 || r as i64 > l.n() {
                    coeffs.push(ring.zero());
                    continue;
                }
                work.from_bigint(&binomial(l.n() as usize, r as usize))
            }
            Kappa::Disk(d) => {
                let dd = WeightDisk::with_scale(d.p, d.center, work.n, d.ring.m, d.ring.scale)?;
                binom_kappa(Kappa::Disk(&dd), r, &work)?
            }
        };
        let f = AnalyticFunction::global(mu.p, e, psi_integrand(kappa, r, e, q, &work, m)?);
        let val = eval_distribution(mu, &f)?;
        let qr = qpow(mu.p, q, r as i64, work.n)?.scale_int(sign);
        let c = ring.mul(&ring.scale_pad(&qr, &b), &val);
        coeffs.push(c);
    }
    Ok(TSeries { center: e, coeffs, ell, component: 1 })
}

/// Patch per-center expansions into one function on the residue disks mod p^s.
/// Centers in the same disk must agree after recentering.
pub fn patch_t_series(ts: &[TSeries], ring: &DiskRing, s: u32) -> Result<AnalyticFunction> {
    let p = ring.p;
    let pm = (p as i64).pow(s);
    let mut chosen: Vec<Option<&TSeries>> = vec![None; pm as usize];
    for t in ts {
        let k = t.center.rem_euclid(pm) as usize;
        match chosen[k] {
            None => chosen[k] = Some(t),
            Some(u) => {
                let rc = recenter(ring, &u.coeffs, u.center, t.center);
                let h = PAdic::from_int(p, t.center - u.center, ring.n + 64);
                let vh = h.valuation().unwrap_or(ring.n + 64);
                let j = rc.len() as i64;
                // the omitted tail is assumed no larger than the last two recorded terms
                let tail = u.coeffs.iter().rev().take(2).flat_map(|c| c.c.iter().map(|x| x.val_bound())).min().unwrap_or(0);
                for (i, (a, b)) in rc.iter().zip(&t.coeffs).enumerate() {
                    let tol = tail + (j - i as i64) * vh;
                    for (x, y) in a.c.iter().zip(&b.c) {
                        let d = x.sub(y);
                        if !d.with_prec(d.prec().min(tol)).is_zero() {
                            return Err(Error::Contract(format!(
                                "T-series centers {} and {} disagree at (z-e)^{}",
                                u.center, t.center, i
                            )));
                        }
                    }
                }
            }
        }
    }
    let mut exps = Vec::with_capacity(pm as usize);
    for (k, c) in chosen.iter().enumerate() {
        let t = c.ok_or_else(|| Error::Invalid(format!("no center in the residue disk {} mod {}", k, pm)))?;
        exps.push((t.center, t.coeffs.clone()));
    }
    if s == 0 {
        let (e, c) = exps.pop().unwrap();
        return Ok(AnalyticFunction::global(p, e, c));
    }
    Ok(AnalyticFunction { p, s, expansions: exps })
}

/// sum_r (-1)^r binom(n, r) a_r b_{n - r} over any ring.
fn pd<R: Ring>(r: &R, a: &[R::El], b: &[R::El]) -> R::El {
    let n = a.len() - 1;
    let mut acc = r.zero();
    for i in 0..=n {
        let c = binomial(n, i) * if i % 2 == 0 { 1 } else { -1 };
        acc = r.add(&acc, &r.mul(&r.from_bigint(&c), &r.mul(&a[i], &b[n - i])));
    }
    acc
}

fn path_of(g: &Mat2, m: &Mat2) -> ((i128, i128), (i128, i128)) {
    let gm = mul2(g, m);
    ((gm[1], gm[3]), (gm[0], gm[2]))
}

const TRANS_P: Mat2 = [1, 1, 0, 1];
const TRANS_M: Mat2 = [1, -1, 0, 1];
const ONE: Mat2 = [1, 0, 0, 1];

/// Intersection form B(phi, psi) = sum_x pd(phi(g_x{0,inf}), psi(g_x{1,inf}) - psi(g_x{-1,inf})).
pub fn intersection_form<C: CoeffModule>(sp: &SymbolSpace<C>, phi: &[<C::R as Ring>::El], psi: &[<C::R as Ring>::El]) -> <C::R as Ring>::El {
    let r = sp.coeff.ring();
    let mut acc = r.zero();
    for g in &sp.pres.p1.lifts {
        let (a, b) = path_of(g, &ONE);
        let v = mat_vec(r, &sp.path_matrix(a, b), phi);
        let (a, b) = path_of(g, &TRANS_P);
        let w1 = mat_vec(r, &sp.path_matrix(a, b), psi);
        let (a, b) = path_of(g, &TRANS_M);
        let w2 = mat_vec(r, &sp.path_matrix(a, b), psi);
        let w: Vec<_> = w1.iter().zip(&w2).map(|(x, y)| r.sub(x, y)).collect();
        acc = r.add(&acc, &pd(r, &v, &w));
    }
    acc
}

/// [phi, psi] = B(phi, W psi) on free-value vectors.
pub fn twisted_pairing_generic<C: CoeffModule>(sp: &SymbolSpace<C>, phi: &[<C::R as Ring>::El], psi: &[<C::R as Ring>::El]) -> <C::R as Ring>::El {
    let w = sp.operator(&w_terms(sp.pres.level()));
    let wpsi = mat_vec(sp.coeff.ring(), &w, psi);
    intersection_form(sp, phi, &wpsi)
}

/// Classical twisted pairing over Q, symbols given in basis coordinates.
pub fn classical_twisted_pairing(cs: &ClassicalSpace, phi: &[BigRational], psi: &[BigRational]) -> BigRational {
    let a = mat_vec(&QQ, &cs.basis, phi);
    let b = mat_vec(&QQ, &cs.basis, psi);
    twisted_pairing_generic(&cs.space, &a, &b)
}

/// Precomputed data for the disk (or classical D-valued) pairing.
pub struct FamilyPairing<'a> {
    pub fs: &'a DistSymbolSpace,
    pub sr: ZpkSeries,
    /// kappa(-1) q^{ell + r} binom(kappa, r) mod p^N
    pub coef: Vec<Vec<u64>>,
    left: Vec<Mat<u64>>,
    right: Vec<Mat<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingRecord {
    pub level: i64,
    pub p: u64,
    pub ell: i64,
    pub weight: String,
    pub epsilon: String,
    pub value: String,
    pub precision: i64,
}

impl<'a> FamilyPairing<'a> {
    pub fn new(fs: &'a DistSymbolSpace) -> Result<FamilyPairing<'a>> {
        let p = fs.p;
        let zn = fs.zn;
        let sr = ZpkSeries::new(zn, fs.m_u);
        let q = fs.level;
        let big = fs.n as i64 + 3 * fs.nmom() as i64 + 16;
        let mut coef = Vec::with_capacity(fs.nmom());
        let (sign, ell) = match &fs.weight {
            FamilyWeight::Classical(l) => (kappa_sign(Kappa::Classical(*l, p)), l.lambda2),
            FamilyWeight::Disk(d) => (kappa_sign(Kappa::Disk(d)), d.ell),
        };
        let work = DiskRing::scaled(p, big, fs.m_u, 0);
        for r in 0..fs.nmom() as u64 {
            let b: DiskElem = match &fs.weight {
                FamilyWeight::Classical(l) => {
                    if r as i64 > l.n() {
                        work.zero()
                    } else {
                        work.from_bigint(&binomial(l.n() as usize, r as usize))
                    }
                }
                FamilyWeight::Disk(d) => {
                    let dd = WeightDisk::with_scale(p, d.center, big, d.ring.m, d.ring.scale)?;
                    binom_kappa(Kappa::Disk(&dd), r, &dd.ring)?
                }
            };
            let f = qpow(p, q, ell + r as i64, big)?.scale_int(sign);
            let v: Vec<u64> = b
                .c
                .iter()
                .map(|x| {
                    let y = x.mul(&f);
                    if y.val_bound() < 0 {
                        return Err(Error::Domain("pairing coefficient not integral".into()));
                    }
                    y.residue_u64(fs.n as i64).map_err(|_| prec_err("pairing", format!("binom(kappa, {}) lost precision", r)))
                })
                .collect::<Result<_>>()?;
            coef.push(v);
        }
        let beta: Mat2 = [0, 1, -(q as i128), 0];
        let mut left = Vec::new();
        let mut right = Vec::new();
        for g in &fs.space.pres.p1.lifts {
            let (a, b) = path_of(g, &ONE);
            left.push(fs.path_matrix(a, b)?);
            let bg = mul2(&beta, g);
            let (a, b) = path_of(&bg, &TRANS_P);
            let m1 = fs.path_matrix(a, b)?;
            let (a, b) = path_of(&bg, &TRANS_M);
            let m2 = fs.path_matrix(a, b)?;
            let d = Mat { rows: m1.rows, cols: m1.cols, d: m1.d.iter().zip(&m2.d).map(|(x, y)| zn.subm(*x, *y)).collect() };
            right.push(d);
        }
        Ok(FamilyPairing { fs, sr, coef, left, right })
    }

    /// [Phi, Psi] as a u-series mod p^N.
    pub fn pair(&self, phi: &[u64], psi: &[u64]) -> Vec<u64> {
        let fs = self.fs;
        let zn = fs.zn;
        let sr = &self.sr;
        let mut acc = sr.zero();
        for (l, rm) in self.left.iter().zip(&self.right) {
            let a = fs.moments_of(&mat_vec_mod(&zn, l, phi));
            let b = fs.moments_of(&mat_vec_mod(&zn, rm, psi));
            for r in 0..fs.nmom() {
                if sr.is_zero(&self.coef[r]) {
                    continue;
                }
                acc = sr.add(&acc, &sr.mul(&self.coef[r], &sr.mul(&a[r], &b[r])));
            }
        }
        acc
    }

    /// Value at u = u0 (an element of Z/p^N).
    pub fn pair_at(&self, phi: &[u64], psi: &[u64], u0: u64) -> u64 {
        self.sr.eval(&self.pair(phi, psi), u0)
    }
}
