//! Classical weights, one-parameter weight disks over truncated power
//! series rings, the family character and binom(kappa, r).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{prec_err, Error, Result};
use crate::padic::{ext_binomial, padic_log, ppow, vp_factorial, PAdic};
use crate::ring::{Field, Ring};

pub use crate::polyrep::WeightPoint;

/// Q_p with a working absolute precision, as a ring for generic code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PAdicField {
    pub p: u64,
    pub prec: i64,
}

impl Ring for PAdicField {
    type El = PAdic;
    fn zero(&self) -> PAdic {
        PAdic::zero(self.p, self.prec)
    }
    fn one(&self) -> PAdic {
        PAdic::one(self.p, self.prec)
    }
    fn add(&self, a: &PAdic, b: &PAdic) -> PAdic {
        a.add(b)
    }
    fn neg(&self, a: &PAdic) -> PAdic {
        a.neg()
    }
    fn mul(&self, a: &PAdic, b: &PAdic) -> PAdic {
        a.mul(b)
    }
    fn sub(&self, a: &PAdic, b: &PAdic) -> PAdic {
        a.sub(b)
    }
    fn from_i64(&self, x: i64) -> PAdic {
        PAdic::from_int(self.p, x, self.prec)
    }
    fn from_bigint(&self, x: &BigInt) -> PAdic {
        PAdic::from_bigint(self.p, x, self.prec)
    }
    fn is_zero(&self, a: &PAdic) -> bool {
        a.is_zero()
    }
}

impl Field for PAdicField {
    fn inv(&self, a: &PAdic) -> Option<PAdic> {
        a.inv().ok()
    }
}

/// Truncated power series ring Q_p[[u]]/(u^m) with absolute precision n,
/// where u = w / p^scale and w is the weight-space coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskRing {
    pub p: u64,
    pub n: i64,
    pub m: usize,
    pub scale: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskElem {
    pub c: Vec<PAdic>,
}

impl DiskRing {
    pub fn new(p: u64, n: i64, m: usize) -> DiskRing {
        DiskRing { p, n, m, scale: 0 }
    }
    pub fn scaled(p: u64, n: i64, m: usize, scale: i64) -> DiskRing {
        DiskRing { p, n, m, scale }
    }
    pub fn base(&self) -> PAdicField {
        PAdicField { p: self.p, prec: self.n }
    }
    pub fn constant(&self, x: PAdic) -> DiskElem {
        let mut c = vec![PAdic::zero(self.p, self.n); self.m];
        c[0] = x;
        DiskElem { c }
    }
    pub fn from_coeffs(&self, mut c: Vec<PAdic>) -> DiskElem {
        c.resize(self.m, PAdic::zero(self.p, self.n));
        c.truncate(self.m);
        DiskElem { c }
    }
    /// The variable u.
    pub fn var(&self) -> DiskElem {
        let mut e = self.constant(PAdic::zero(self.p, self.n));
        if self.m > 1 {
            e.c[1] = PAdic::one(self.p, self.n);
        }
        e
    }
    /// w = p^scale u.
    pub fn w(&self) -> DiskElem {
        let mut e = self.constant(PAdic::zero(self.p, self.n));
        if self.m > 1 {
            e.c[1] = PAdic::from_parts(self.p, BigInt::one(), self.scale, self.n);
        }
        e
    }
    pub fn is_unit(&self, a: &DiskElem) -> bool {
        !a.c[0].is_zero()
    }
    pub fn inv(&self, a: &DiskElem) -> Result<DiskElem> {
        let a0 = a.c[0].inv().map_err(|_| Error::NotInvertible("disk element with zero constant term".into()))?;
        let mut b = vec![a0.clone()];
        for k in 1..self.m {
            let mut s = PAdic::zero(self.p, self.n);
            for j in 1..=k {
                s = s.add(&a.c[j].mul(&b[k - j]));
            }
            b.push(s.mul(&a0).neg());
        }
        Ok(DiskElem { c: b })
    }
    pub fn scale_pad(&self, s: &PAdic, a: &DiskElem) -> DiskElem {
        DiskElem { c: a.c.iter().map(|x| x.mul(s)).collect() }
    }
    /// Minimum absolute precision over the coefficients.
    pub fn prec_of(&self, a: &DiskElem) -> i64 {
        a.c.iter().map(|x| x.prec()).min().unwrap_or(self.n)
    }
    /// Lower bound on the coefficient valuations.
    pub fn min_val(&self, a: &DiskElem) -> i64 {
        a.c.iter().map(|x| x.val_bound().min(x.prec())).min().unwrap_or(self.n)
    }
    /// Power series exp-free power (1 + p^scale u)^s for s in Z_p.
    pub fn one_plus_w_pow(&self, s: &PAdic) -> Result<DiskElem> {
        let mut c = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let b = ext_binomial(s, i as u64)?;
            c.push(b.mul(&PAdic::from_parts(self.p, BigInt::one(), self.scale * i as i64, self.n + self.scale * i as i64)));
        }
        Ok(self.from_coeffs(c))
    }
    /// log(1 + p^scale u) truncated.
    pub fn log_one_plus_w(&self) -> DiskElem {
        let mut c = vec![PAdic::zero(self.p, self.n)];
        for i in 1..self.m {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let num = BigRational::new(BigInt::from(sign) * ppow(self.p, self.scale * i as i64), BigInt::from(i));
            c.push(PAdic::from_rational(self.p, &num, self.n));
        }
        self.from_coeffs(c)
    }
    /// Value of u at the classical point lambda1 = center + j, as an exact rational.
    pub fn u_at(&self, j: i64) -> BigRational {
        let g = BigRational::from_integer(BigInt::from(1 + self.p));
        let w = if j >= 0 {
            num_traits::pow(g, j as usize)
        } else {
            num_traits::pow(g.recip(), (-j) as usize)
        } - BigRational::one();
        w / BigRational::from_integer(ppow(self.p, self.scale))
    }
    /// Evaluate at u = `u` (exact). The precision accounts for coefficient
    /// precision and the u^m truncation, assuming the omitted tail has
    /// coefficients of valuation at least `tail_val`.
    pub fn eval_at(&self, a: &DiskElem, u: &BigRational, tail_val: i64) -> PAdic {
        let p = self.p;
        let big = self.n + 64 * self.m as i64 + 64;
        let up = PAdic::from_rational(p, u, big);
        let vu = up.valuation().unwrap_or(big);
        let mut acc = PAdic::zero(p, big);
        let mut pw = PAdic::one(p, big);
        for i in 0..self.m {
            acc = acc.add(&a.c[i].mul(&pw));
            pw = pw.mul(&up);
        }
        let trunc = if u.is_zero() { i64::MAX / 4 } else { self.m as i64 * vu + tail_val };
        acc.with_prec(trunc.min(acc.prec()))
    }
}

impl Ring for DiskRing {
    type El = DiskElem;
    fn zero(&self) -> DiskElem {
        self.constant(PAdic::zero(self.p, self.n))
    }
    fn one(&self) -> DiskElem {
        self.constant(PAdic::one(self.p, self.n))
    }
    fn add(&self, a: &DiskElem, b: &DiskElem) -> DiskElem {
        DiskElem { c: a.c.iter().zip(&b.c).map(|(x, y)| x.add(y)).collect() }
    }
    fn neg(&self, a: &DiskElem) -> DiskElem {
        DiskElem { c: a.c.iter().map(|x| x.neg()).collect() }
    }
    fn sub(&self, a: &DiskElem, b: &DiskElem) -> DiskElem {
        DiskElem { c: a.c.iter().zip(&b.c).map(|(x, y)| x.sub(y)).collect() }
    }
    fn mul(&self, a: &DiskElem, b: &DiskElem) -> DiskElem {
        let mut c = vec![PAdic::zero(self.p, self.n); self.m];
        for i in 0..self.m {
            if a.c[i].is_zero() && a.c[i].prec() >= self.n {
                continue;
            }
            for j in 0..self.m - i {
                c[i + j] = c[i + j].add(&a.c[i].mul(&b.c[j]));
            }
        }
        DiskElem { c }
    }
    fn from_i64(&self, x: i64) -> DiskElem {
        self.constant(PAdic::from_int(self.p, x, self.n))
    }
    fn from_bigint(&self, x: &BigInt) -> DiskElem {
        self.constant(PAdic::from_bigint(self.p, x, self.n))
    }
    fn is_zero(&self, a: &DiskElem) -> bool {
        a.c.iter().all(|x| x.is_zero())
    }
}

/// A weight disk in the stratum ell, centred at (lambda1_c, ell).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDisk {
    pub p: u64,
    pub ell: i64,
    pub center: WeightPoint,
    pub ring: DiskRing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub p: u64,
    pub ell: i64,
    pub center: [i64; 2],
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl WeightDisk {
    pub fn new(p: u64, center: WeightPoint, n: i64, m: usize) -> Result<WeightDisk> {
        WeightDisk::with_scale(p, center, n, m, 0)
    }
    pub fn with_scale(p: u64, center: WeightPoint, n: i64, m: usize, scale: i64) -> Result<WeightDisk> {
        if p == 2 || p < 2 {
            return Err(Error::Unsupported("weight disks need an odd prime".into()));
        }
        Ok(WeightDisk { p, ell: center.lambda2, center, ring: DiskRing::scaled(p, n, m, scale) })
    }
    pub fn from_spec(s: &DiskSpec) -> Result<WeightDisk> {
        if s.center[1] != s.ell {
            return Err(Error::Invalid("center lambda2 must equal ell".into()));
        }
        WeightDisk::new(s.p, WeightPoint::new(s.center[0], s.center[1]), s.n, s.m)
    }
    pub fn spec(&self) -> DiskSpec {
        DiskSpec { p: self.p, ell: self.ell, center: [self.center.lambda1, self.center.lambda2], n: self.ring.n, m: self.ring.m }
    }
    pub fn gamma(&self) -> PAdic {
        PAdic::from_int(self.p, 1 + self.p as i64, self.ring.n + 8)
    }
    /// Does the classical weight lie on this disk?
    pub fn contains(&self, lam: WeightPoint) -> bool {
        lam.lambda2 == self.ell && (lam.lambda1 - self.center.lambda1).rem_euclid(self.p as i64 - 1) == 0
    }
    /// Value of the disk variable u at a classical weight on the disk.
    pub fn point_of(&self, lam: WeightPoint) -> Result<BigRational> {
        if !self.contains(lam) {
            return Err(Error::Domain(format!("{:?} is not on the disk (stratum {}, center {:?})", lam, self.ell, self.center)));
        }
        Ok(self.ring.u_at(lam.lambda1 - self.center.lambda1))
    }
    /// Specialize at a classical weight; the omitted u-tail is assumed to
    /// have valuation at least `tail_val`.
    pub fn specialize(&self, a: &DiskElem, lam: WeightPoint, tail_val: i64) -> Result<PAdic> {
        let u = self.point_of(lam)?;
        Ok(self.ring.eval_at(a, &u, tail_val))
    }
    pub fn log_gamma(&self) -> PAdic {
        padic_log(&self.gamma()).expect("log of 1+p")
    }
    /// log(kappa(t(gamma))) / log(gamma) = n_c + log(1+w)/log(gamma).
    pub fn weight_log(&self) -> Result<DiskElem> {
        let r = &self.ring;
        let lg = self.log_gamma();
        let l = r.log_one_plus_w();
        let inv = lg.inv()?;
        let mut e = r.scale_pad(&inv, &l);
        e.c[0] = PAdic::from_int(self.p, self.center.n(), r.n);
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusElement {
    pub x: PAdic,
    pub y: PAdic,
}

#[derive(Clone, Copy, Debug)]
pub enum Kappa<'a> {
    Classical(WeightPoint, u64),
    Disk(&'a WeightDisk),
}

fn pow_signed(x: &PAdic, e: i64) -> Result<PAdic> {
    if e >= 0 {
        Ok(x.pow(e as u64))
    } else {
        Ok(x.inv()?.pow((-e) as u64))
    }
}

/// kappa(diag(x, y)) as a disk element (a constant for classical weights).
pub fn eval_character(kappa: Kappa, t: &TorusElement, ring: &DiskRing) -> Result<DiskElem> {
    if t.x.valuation() != Some(0) || t.y.valuation() != Some(0) {
        return Err(Error::Domain("torus entries must be units".into()));
    }
    match kappa {
        Kappa::Classical(lam, _) => {
            let v = pow_signed(&t.x, lam.lambda1)?.mul(&pow_signed(&t.y, lam.lambda2)?);
            Ok(ring.constant(v.with_prec(ring.n)))
        }
        Kappa::Disk(d) => {
            let base = pow_signed(&t.y, d.ell)?.mul(&pow_signed(&t.x, d.center.lambda1)?);
            let px = t.x.principal_part()?;
            let s = padic_log(&px)?.div(&d.log_gamma())?;
            let fam = d.ring.one_plus_w_pow(&s)?;
            Ok(d.ring.scale_pad(&base, &fam))
        }
    }
}

/// binom(kappa, r) with kappa classical (returns a constant) or a disk.
pub fn binom_kappa(kappa: Kappa, r: u64, ring: &DiskRing) -> Result<DiskElem> {
    match kappa {
        Kappa::Classical(lam, p) => {
            let prec = ring.n + vp_factorial(p, r) + 4;
            let g = PAdic::from_int(p, 1 + p as i64, prec + 2);
            let tg = TorusElement { x: g.clone(), y: g.inv()? };
            let kt = pow_signed(&tg.x, lam.lambda1)?.mul(&pow_signed(&tg.y, lam.lambda2)?);
            let s = padic_log(&kt)?.div(&padic_log(&g)?)?;
            let b = ext_binomial(&s, r)?;
            Ok(ring.constant(b.with_prec(ring.n)))
        }
        Kappa::Disk(d) => disk_binomial(&d.ring, &d.weight_log()?, r),
    }
}

/// Falling factorial of length r over r! in the disk ring.
pub fn disk_binomial(ring: &DiskRing, s: &DiskElem, r: u64) -> Result<DiskElem> {
    let mut acc = ring.one();
    for i in 0..r {
        let t = ring.sub(s, &ring.from_i64(i as i64));
        acc = ring.mul(&acc, &t);
    }
    let mut f = BigInt::one();
    for i in 2..=r {
        f *= i;
    }
    let fi = PAdic::from_bigint(ring.p, &f, ring.n + 64).inv()?;
    let out = ring.scale_pad(&fi, &acc);
    if out.c.iter().all(|x| x.prec() <= 0 && x.is_zero()) {
        return Err(prec_err("weightspace", format!("binom(kappa, {}) lost all digits", r)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_character() {
        let ring = DiskRing::new(7, 20, 1);
        let t = TorusElement { x: PAdic::from_int(7, 2, 20), y: PAdic::from_int(7, 5, 20) };
        let v = eval_character(Kappa::Classical(WeightPoint::new(3, 1), 7), &t, &ring).unwrap();
        assert_eq!(v.c[0], PAdic::from_int(7, 40, 20));
    }

    #[test]
    fn disk_character_specializes() {
        let p = 5;
        let d = WeightDisk::new(p, WeightPoint::new(2, 0), 30, 8).unwrap();
        let t = TorusElement { x: PAdic::from_int(p, 7, 40), y: PAdic::from_int(p, 3, 40) };
        let v = eval_character(Kappa::Disk(&d), &t, &d.ring).unwrap();
        let id = TorusElement { x: PAdic::one(p, 40), y: PAdic::one(p, 40) };
        assert!(d.ring.sub(&eval_character(Kappa::Disk(&d), &id, &d.ring).unwrap(), &d.ring.one()).c.iter().all(|x| x.is_zero()));
        for k in [2, 2 + 4 * 25] {
            let lam = WeightPoint::new(k, 0);
            let s = d.specialize(&v, lam, -4).unwrap();
            let direct = PAdic::from_int(p, 7, 40).pow(k as u64);
            assert!(s.prec() >= 10, "precision {}", s.prec());
            assert!(s.agrees(&direct));
        }
    }

    #[test]
    fn binomial_classical_and_disk() {
        let ring = DiskRing::new(3, 20, 1);
        let b = binom_kappa(Kappa::Classical(WeightPoint::new(5, 2), 3), 2, &ring).unwrap();
        assert_eq!(b.c[0], PAdic::from_int(3, 3, 20));
        let d = WeightDisk::new(3, WeightPoint::new(4, 0), 30, 8).unwrap();
        let b1 = binom_kappa(Kappa::Disk(&d), 1, &d.ring).unwrap();
        let s = d.specialize(&b1, WeightPoint::new(4 + 18, 0), -3).unwrap();
        assert!(s.prec() >= 15);
        assert!(s.agrees(&PAdic::from_int(3, 22, 40)));
    }

    #[test]
    fn strata_disjoint() {
        let d = WeightDisk::new(3, WeightPoint::new(2, 1), 10, 4).unwrap();
        assert!(!d.contains(WeightPoint::new(4, 0)));
        assert!(d.contains(WeightPoint::new(4, 1)));
        assert!(d.point_of(WeightPoint::new(3, 1)).is_err());
    }
}
