//! Truncated distributions on Z_p: moment vectors, the weight-kappa action
//! of Delta^+ and the specialization map to V_lambda.
//!
//! For gamma = (a b; c d) with p | c and d a unit, write cz + d = d(1 + rho z).
//! The action on moments is (gamma mu)_j = sum_t G[j][t] mu_t where G[j][t] is
//! the z^t coefficient of kappa(t_gamma(z)) ((az + b)/(cz + d))^j.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{prec_err, Error, Result};
use crate::modsym::Mat2;
use crate::padic::{padic_log, PAdic};
use crate::polyrep::{DualVector, WeightPoint};
use crate::ring::{Mat, Ring, Zpk, ZpkSeries};
use crate::weightspace::{disk_binomial, DiskElem, DiskRing, WeightDisk};

/// Moment j kept mod p^{N - j}: the classical weight filtration.
pub fn classical_caps(n: u32) -> Vec<u32> {
    (0..n).map(|j| n - j).collect()
}

/// Moment j kept mod p^{N - floor(j (p-2)/(p-1))}: the family filtration.
pub fn family_caps(p: u64, n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut j = 0u64;
    loop {
        let drop = (j * (p - 2) / (p - 1)) as u32;
        if drop >= n {
            return out;
        }
        out.push(n - drop);
        j += 1;
    }
}

struct FamilyData {
    /// p^m binom(log(1+w)/log(gamma), m) as u-series mod p^K.
    pm: Vec<Vec<u64>>,
    ring: DiskRing,
    lg: PAdic,
    cache: RefCell<HashMap<u64, Vec<u64>>>,
}

/// Precomputed data for the weight-kappa action mod p^K on M moments.
pub struct ActionData {
    pub p: u64,
    pub nmom: usize,
    pub sr: ZpkSeries,
    ell: i64,
    nc: i64,
    /// binom(nc, m) mod p^K
    bin: Vec<u64>,
    family: Option<FamilyData>,
}

fn gen_binomials(n: i64, count: usize, z: &Zpk) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut b = BigInt::one();
    for m in 0..count {
        out.push(z.from_bigint(&b));
        b = b * BigInt::from(n - m as i64) / BigInt::from(m as i64 + 1);
    }
    out
}

fn residue(x: &PAdic, k: u32) -> Result<u64> {
    x.residue_u64(k as i64)
}

impl ActionData {
    /// Classical weight lambda on M moments mod p^K.
    pub fn classical(p: u64, lam: WeightPoint, nmom: usize, k: u32) -> ActionData {
        let z = Zpk::new(p, k);
        ActionData {
            p,
            nmom,
            sr: ZpkSeries::new(z, 1),
            ell: lam.lambda2,
            nc: lam.n(),
            bin: gen_binomials(lam.n(), nmom, &z),
            family: None,
        }
    }

    /// The universal character of a disk, as series in its variable u.
    pub fn disk(d: &WeightDisk, nmom: usize, k: u32) -> Result<ActionData> {
        let p = d.p;
        let z = Zpk::new(p, k);
        let m_u = d.ring.m;
        let guard = k as i64 + 2 * nmom as i64 + 12;
        let ring = DiskRing::scaled(p, guard, m_u, d.ring.scale);
        let lg = crate::padic::padic_log(&PAdic::from_int(p, 1 + p as i64, guard + 4))?;
        let l = ring.scale_pad(&lg.inv()?, &ring.log_one_plus_w());
        let mut pm = Vec::with_capacity(nmom);
        for m in 0..nmom {
            let b = disk_binomial(&ring, &l, m as u64)?;
            let pmul = PAdic::from_parts(p, BigInt::one(), m as i64, guard + m as i64);
            let mut c = Vec::with_capacity(m_u);
            for x in &b.c {
                let y = x.mul(&pmul);
                if y.val_bound() < 0 {
                    return Err(Error::Domain(format!("disk too large: p^{} binom(L, {}) is not integral", m, m)));
                }
                c.push(residue(&y, k).map_err(|_| prec_err("dist", format!("P_{} lost precision", m)))?);
            }
            pm.push(c);
        }
        let nc = d.center.lambda1 - d.ell;
        Ok(ActionData {
            p,
            nmom,
            sr: ZpkSeries::new(z, m_u),
            ell: d.ell,
            nc,
            bin: gen_binomials(nc, nmom, &z),
            family: Some(FamilyData { pm, ring, lg, cache: RefCell::new(HashMap::new()) }),
        })
    }

    pub fn is_family(&self) -> bool {
        self.family.is_some()
    }

    fn z(&self) -> Zpk {
        self.sr.base
    }

    /// (1+w)^{log<d>/log gamma} as a u-series.
    fn family_factor(&self, d: u64) -> Result<Vec<u64>> {
        let f = self.family.as_ref().unwrap();
        if let Some(v) = f.cache.borrow().get(&d) {
            return Ok(v.clone());
        }
        let k = self.z().k;
        let x = PAdic::from_int(self.p, d as i64, f.ring.n);
        let e = padic_log(&x.principal_part()?)?.div(&f.lg)?;
        let s = f.ring.one_plus_w_pow(&e)?;
        let v: Vec<u64> = s.c.iter().map(|c| residue(c, k)).collect::<Result<_>>()?;
        f.cache.borrow_mut().insert(d, v.clone());
        Ok(v)
    }

    /// Moment matrix of gamma; entries are u-series.
    pub fn matrix(&self, g: &Mat2) -> Result<Mat<Vec<u64>>> {
        let z = self.z();
        let sr = self.sr;
        let p = self.p as i128;
        let q = z.m as i128;
        let (a, b, c, d) = (g[0], g[1], g[2], g[3]);
        let det = a * d - b * c;
        if det == 0 || c.rem_euclid(p) != 0 || d.rem_euclid(p) == 0 {
            return Err(Error::Domain(format!("{:?} is not in Delta^+", g)));
        }
        let red = |x: i128| x.rem_euclid(q) as u64;
        let dinv = z.inv_unit(red(d)).unwrap();
        let rho1 = z.mulm(red(c / p), dinv);
        let rho = z.mulm(red(p), rho1);
        let dm = red(det);
        let dpow = if self.ell >= 0 {
            z.powm(dm, self.ell as u64)
        } else {
            let inv = z.inv_unit(dm).ok_or_else(|| Error::Domain("negative det twist with non-unit det".into()))?;
            z.powm(inv, (-self.ell) as u64)
        };
        let dn = if self.nc >= 0 { z.powm(red(d), self.nc as u64) } else { z.powm(dinv, (-self.nc) as u64) };
        let scalar = z.mulm(dpow, dn);
        let mm = self.nmom;
        // (1 + rho z)^{nc}
        let mut base = vec![sr.zero(); mm];
        let mut rp = 1 % z.m;
        for (t, bt) in base.iter_mut().enumerate() {
            *bt = sr.constant(z.mulm(z.mulm(self.bin[t], rp), scalar));
            rp = z.mulm(rp, rho);
        }
        let phi0 = if let Some(f) = &self.family {
            let td = self.family_factor(red(d))?;
            let mut h = vec![sr.zero(); mm];
            let mut rp = 1 % z.m;
            for (t, ht) in h.iter_mut().enumerate() {
                *ht = sr.scale(rp, &f.pm[t]);
                rp = z.mulm(rp, rho1);
            }
            let bh = series_mul(&sr, &base, &h, mm);
            bh.into_iter().map(|x| sr.mul(&x, &td)).collect()
        } else {
            base
        };
        // F(z) = (a z + b) d^{-1} / (1 + rho z)
        let mut geo = vec![0u64; mm];
        let nrho = z.neg(&rho);
        let mut t = 1 % z.m;
        for g in geo.iter_mut() {
            *g = t;
            t = z.mulm(t, nrho);
        }
        let am = z.mulm(red(a), dinv);
        let bm = z.mulm(red(b), dinv);
        let mut f = vec![0u64; mm];
        for i in 0..mm {
            let mut v = z.mulm(bm, geo[i]);
            if i > 0 {
                v = z.addm(v, z.mulm(am, geo[i - 1]));
            }
            f[i] = v;
        }
        let mut out = Mat::from_fn(mm, mm, |_, _| sr.zero());
        let mut phi = phi0;
        for j in 0..mm {
            for (tt, x) in phi.iter().enumerate() {
                out.set(j, tt, x.clone());
            }
            if j + 1 < mm {
                let mut next = vec![sr.zero(); mm];
                for (i, x) in phi.iter().enumerate() {
                    if sr.is_zero(x) {
                        continue;
                    }
                    for (k2, fk) in f.iter().enumerate().take(mm - i) {
                        if *fk != 0 {
                            next[i + k2] = sr.add(&next[i + k2], &sr.scale(*fk, x));
                        }
                    }
                }
                phi = next;
            }
        }
        Ok(out)
    }

    /// Checks v(G[j][t]) >= caps[j] - caps[t] wherever caps[t] < caps[j].
    pub fn is_stable(&self, g: &Mat<Vec<u64>>, caps: &[u32]) -> bool {
        let z = self.z();
        let n = caps.len().min(self.nmom);
        for j in 0..n {
            for t in 0..n {
                if caps[t] < caps[j] {
                    let need = caps[j] - caps[t];
                    if g.at(j, t).iter().any(|x| z.val(*x) < need) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn series_mul(sr: &ZpkSeries, a: &[Vec<u64>], b: &[Vec<u64>], len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![sr.zero(); len];
    for (i, x) in a.iter().enumerate() {
        if sr.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = sr.add(&out[i + j], &sr.mul(x, y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistWeight {
    Classical(WeightPoint),
    Disk(WeightDisk),
}

/// gamma = (a b; c d) with det != 0, p | c and d a unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaPlusElement {
    pub m: Mat2,
}

impl DeltaPlusElement {
    pub fn new(p: u64, m: Mat2) -> Result<DeltaPlusElement> {
        let p = p as i128;
        if m[0] * m[3] - m[1] * m[2] == 0 {
            return Err(Error::NotInvertible("determinant zero".into()));
        }
        if m[2].rem_euclid(p) != 0 || m[3].rem_euclid(p) == 0 {
            return Err(Error::Domain("need p | c and d a unit".into()));
        }
        Ok(DeltaPlusElement { m })
    }
}

/// Moments mu_j = mu(z^j), j < M, with mu_j known mod p^{max(N - j, 1)}.
#[derive(Clone, Debug)]
pub struct MomentDistribution {
    pub weight: DistWeight,
    pub p: u64,
    pub n: i64,
    pub moments: Vec<DiskElem>,
}

impl MomentDistribution {
    pub fn ring_for(weight: &DistWeight, p: u64, n: i64) -> DiskRing {
        match weight {
            DistWeight::Classical(_) => DiskRing::new(p, n, 1),
            DistWeight::Disk(d) => DiskRing::scaled(p, n, d.ring.m, d.ring.scale),
        }
    }

    pub fn cap(&self, j: usize) -> i64 {
        match self.weight {
            DistWeight::Classical(_) => (self.n - j as i64).max(1),
            DistWeight::Disk(_) => (self.n - (j as i64 * (self.p as i64 - 2)) / (self.p as i64 - 1)).max(1),
        }
    }

    pub fn new(weight: DistWeight, p: u64, n: i64, moments: Vec<DiskElem>) -> MomentDistribution {
        let mut d = MomentDistribution { weight, p, n, moments };
        for j in 0..d.moments.len() {
            let c = d.cap(j);
            d.moments[j] = DiskElem { c: d.moments[j].c.iter().map(|x| x.with_prec(c)).collect() };
        }
        d
    }

    /// A distribution with integer moments.
    pub fn from_ints(weight: DistWeight, p: u64, n: i64, moments: &[i64]) -> MomentDistribution {
        let r = Self::ring_for(&weight, p, n);
        let m = moments.iter().map(|x| r.from_i64(*x)).collect();
        MomentDistribution::new(weight, p, n, m)
    }

    pub fn nmom(&self) -> usize {
        self.moments.len()
    }

    pub fn ring(&self) -> DiskRing {
        Self::ring_for(&self.weight, self.p, self.n)
    }

    /// min_j v(mu_j), the norm exponent (|mu| = p^{-norm}).
    pub fn norm_val(&self) -> i64 {
        self.moments.iter().flat_map(|m| m.c.iter().map(|x| x.val_bound())).min().unwrap_or(i64::MAX)
    }

    fn action_data(&self, k: u32) -> Result<ActionData> {
        match &self.weight {
            DistWeight::Classical(lam) => Ok(ActionData::classical(self.p, *lam, self.nmom(), k)),
            DistWeight::Disk(d) => ActionData::disk(d, self.nmom(), k),
        }
    }

    /// Truncation slope: v(G[j][t]) >= slope * (t - j) for t > j.
    fn slope(&self) -> (i64, i64) {
        match self.weight {
            DistWeight::Classical(_) => (1, 1),
            DistWeight::Disk(_) => (self.p as i64 - 2, self.p as i64 - 1),
        }
    }
}

fn lift(p: u64, x: u64, prec: i64) -> PAdic {
    PAdic::from_bigint(p, &BigInt::from(x), prec)
}

/// (gamma mu) with (gamma mu)(f) = mu(kappa(t_gamma(z)) f(gamma z)).
pub fn act_weight_kappa(mu: &MomentDistribution, gamma: &DeltaPlusElement) -> Result<MomentDistribution> {
    let m = mu.nmom();
    let nv = mu.norm_val().min(0);
    let (sn, sd) = mu.slope();
    for j in 0..m {
        let trunc = nv + ((m - j) as i64 * sn) / sd;
        if trunc < mu.cap(j) {
            return Err(prec_err(
                "dist",
                format!("moment {} needs moments beyond M = {} (known to p^{} of p^{})", j, m, trunc, mu.cap(j)),
            ));
        }
    }
    let k = (mu.n + m as i64 + 4) as u32;
    let ad = mu.action_data(k)?;
    let g = ad.matrix(&gamma.m)?;
    let ring = mu.ring();
    let pk = k as i64;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = ring.zero();
        for t in 0..m {
            let e = DiskElem { c: g.at(j, t).iter().map(|x| lift(mu.p, *x, pk)).collect() };
            acc = ring.add(&acc, &ring.mul(&e, &mu.moments[t]));
        }
        out.push(acc);
    }
    Ok(MomentDistribution::new(mu.weight.clone(), mu.p, mu.n, out))
}

/// Restriction of mu to polynomials of degree <= n: coordinates (mu_0, ..., mu_n).
pub fn specialize_rho(mu: &MomentDistribution) -> Result<DualVector> {
    let DistWeight::Classical(lam) = mu.weight else {
        return Err(Error::WeightMismatch("specialize a disk distribution first".into()));
    };
    let n = lam.n() as usize;
    if mu.nmom() <= n {
        return Err(prec_err("dist", format!("need more than {} moments, have {}", n, mu.nmom())));
    }
    let coeffs = (0..=n).map(|j| mu.moments[j].c[0].to_rational()).collect();
    DualVector::new(lam, coeffs)
}

/// Evaluate a disk distribution at a classical weight on the disk.
pub fn specialize_disk(mu: &MomentDistribution, lam: WeightPoint, tail_val: i64) -> Result<MomentDistribution> {
    let DistWeight::Disk(d) = &mu.weight else {
        return Err(Error::WeightMismatch("not a disk distribution".into()));
    };
    let r = mu.ring();
    let u = d.point_of(lam)?;
    let mom: Vec<DiskElem> = mu.moments.iter().map(|x| DiskElem { c: vec![r.eval_at(x, &u, tail_val)] }).collect();
    let mut out = MomentDistribution { weight: DistWeight::Classical(lam), p: mu.p, n: mu.n, moments: mom };
    for j in 0..out.moments.len() {
        let c = out.cap(j);
        out.moments[j].c[0] = out.moments[j].c[0].with_prec(c);
    }
    Ok(out)
}

/// Locally analytic function on Z_p: expansions in (z - e) on e + p^s Z_p.
#[derive(Clone, Debug)]
pub struct AnalyticFunction {
    pub p: u64,
    pub s: u32,
    /// (center e, coefficients of (z - e)^j)
    pub expansions: Vec<(i64, Vec<DiskElem>)>,
}

fn binom_u(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// Coefficients of f(z) = sum c_j (z - e)^j rewritten around e2.
pub fn recenter(ring: &DiskRing, c: &[DiskElem], e: i64, e2: i64) -> Vec<DiskElem> {
    let h = e2 - e;
    let mut out = vec![ring.zero(); c.len()];
    for (j, cj) in c.iter().enumerate() {
        // (z - e)^j = ((z - e2) + h)^j
        for i in 0..=j {
            let f = binom_u(j, i) * num_traits::pow(BigInt::from(h), j - i);
            let t = ring.scale_pad(&PAdic::from_bigint(ring.p, &f, ring.n + 64), cj);
            out[i] = ring.add(&out[i], &t);
        }
    }
    out
}

impl AnalyticFunction {
    /// A single expansion around e valid on all of Z_p (s = 0).
    pub fn global(p: u64, e: i64, coeffs: Vec<DiskElem>) -> AnalyticFunction {
        AnalyticFunction { p, s: 0, expansions: vec![(e, coeffs)] }
    }

    pub fn j_trunc(&self) -> usize {
        self.expansions.iter().map(|(_, c)| c.len()).max().unwrap_or(0)
    }

    /// sup over coefficients: the norm exponent min v(c_j) + s j.
    pub fn norm_val(&self) -> i64 {
        self.expansions
            .iter()
            .flat_map(|(_, c)| c.iter().enumerate().flat_map(move |(j, x)| x.c.iter().map(move |y| y.val_bound() - (self.s as i64) * j as i64)))
            .min()
            .unwrap_or(i64::MAX)
    }
}

/// mu(f). Functions must be globally given by one expansion (s = 0), or
/// by disk expansions that are recenterings of each other.
pub fn eval_distribution(mu: &MomentDistribution, f: &AnalyticFunction) -> Result<DiskElem> {
    if f.j_trunc() > mu.nmom() {
        return Err(prec_err("dist", format!("function has {} terms, distribution {} moments", f.j_trunc(), mu.nmom())));
    }
    let ring = mu.ring();
    let (e, c) = &f.expansions[0];
    for (e2, c2) in f.expansions.iter().skip(1) {
        let rc = recenter(&ring, c, *e, *e2);
        for (x, y) in rc.iter().zip(c2) {
            if !ring.sub(x, y).c.iter().all(|t| t.is_zero()) {
                return Err(Error::Unsupported("locally analytic function not globally analytic: local moments needed".into()));
            }
        }
    }
    let c0 = recenter(&ring, c, *e, 0);
    let mut acc = ring.zero();
    for (j, cj) in c0.iter().enumerate() {
        acc = ring.add(&acc, &ring.mul(cj, &mu.moments[j]));
    }
    Ok(acc)
}

/// Dirac-type moments (a^j).
pub fn dirac(weight: DistWeight, p: u64, n: i64, a: i64, m: usize) -> MomentDistribution {
    let mut v = Vec::with_capacity(m);
    let mut t = BigInt::one();
    for _ in 0..m {
        v.push(t.to_i64().expect("moment overflow"));
        t *= a;
    }
    MomentDistribution::from_ints(weight, p, n, &v)
}

pub fn rational_moments(mu: &MomentDistribution) -> Vec<BigRational> {
    mu.moments.iter().map(|m| if m.c[0].is_zero() { BigRational::zero() } else { m.c[0].to_rational() }).collect()
}
