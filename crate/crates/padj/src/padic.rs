//! p-adic scalars with tracked absolute precision.
//!
//! A `PAdic` stores `p^val * unit`, where the unit is known modulo
//! `p^(prec - val)`. Every operation returns the precision it can prove.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{prec_err, Error, Result};

#[derive(Clone, Debug)]
pub struct PAdic {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: i64,
}

pub fn ppow(p: u64, k: i64) -> BigInt {
    if k <= 0 {
        return BigInt::one();
    }
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Valuation of a nonzero integer.
pub fn vp_int(p: u64, x: &BigInt) -> i64 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

pub fn vp_rat(p: u64, x: &BigRational) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(p, x.numer()) - vp_int(p, x.denom()))
    }
}

pub fn vp_u64(p: u64, mut n: u64) -> i64 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn vp_factorial(p: u64, r: u64) -> i64 {
    let mut v = 0;
    let mut q = r / p;
    while q > 0 {
        v += q as i64;
        q /= p;
    }
    v
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

impl PAdic {
    /// `p^shift * value` known modulo `p^prec`.
    pub fn from_parts(p: u64, value: BigInt, shift: i64, prec: i64) -> PAdic {
        if value.is_zero() || shift >= prec {
            return PAdic::zero(p, prec);
        }
        let pb = BigInt::from(p);
        let mut v = shift;
        let mut u = value;
        while v < prec {
            let (q, r) = u.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            u = q;
            v += 1;
        }
        if v >= prec {
            return PAdic::zero(p, prec);
        }
        let m = ppow(p, prec - v);
        PAdic { p, val: v, unit: u.mod_floor(&m), prec }
    }

    pub fn zero(p: u64, prec: i64) -> PAdic {
        PAdic { p, val: prec, unit: BigInt::zero(), prec }
    }

    pub fn one(p: u64, prec: i64) -> PAdic {
        PAdic::from_int(p, 1, prec)
    }

    pub fn from_int(p: u64, x: i64, prec: i64) -> PAdic {
        PAdic::from_parts(p, BigInt::from(x), 0, prec)
    }

    pub fn from_bigint(p: u64, x: &BigInt, prec: i64) -> PAdic {
        PAdic::from_parts(p, x.clone(), 0, prec)
    }

    pub fn from_rational(p: u64, x: &BigRational, prec: i64) -> PAdic {
        if x.is_zero() {
            return PAdic::zero(p, prec);
        }
        let vd = vp_int(p, x.denom());
        let d = x.denom() / ppow(p, vd);
        let v = vp_int(p, x.numer()) - vd;
        if v >= prec {
            return PAdic::zero(p, prec);
        }
        let n = x.numer() / ppow(p, v + vd);
        let m = ppow(p, prec - v);
        let u = (n * modinv(&d.mod_floor(&m), &m)).mod_floor(&m);
        PAdic { p, val: v, unit: u, prec }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Absolute precision: the value is known modulo `p^prec`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation, or `None` when the value is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound for the valuation (the precision for zero).
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn with_prec(&self, prec: i64) -> PAdic {
        if prec >= self.prec {
            return self.clone();
        }
        PAdic::from_parts(self.p, self.unit.clone(), self.val, prec)
    }

    /// Claims more precision than known; only for exact inputs.
    pub fn lift_prec(&self, prec: i64) -> PAdic {
        PAdic::from_parts(self.p, self.unit.clone(), self.val, prec)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        if self.val >= 0 {
            BigRational::from_integer(&self.unit * ppow(self.p, self.val))
        } else {
            BigRational::new(self.unit.clone(), ppow(self.p, -self.val))
        }
    }

    /// Representative in `[0, p^prec)`; requires an integral value.
    pub fn to_bigint(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        if self.val < 0 {
            return Err(Error::Domain(format!("{} is not integral", self)));
        }
        Ok(&self.unit * ppow(self.p, self.val))
    }

    /// Signed representative with least absolute value.
    pub fn to_bigint_centered(&self) -> Result<BigInt> {
        let x = self.to_bigint()?;
        let m = ppow(self.p, self.prec);
        if &x * 2 > m {
            Ok(x - m)
        } else {
            Ok(x)
        }
    }

    /// Residue modulo `m = p^k`, with `k <= prec`.
    pub fn residue_u64(&self, k: i64) -> Result<u64> {
        if k > self.prec {
            return Err(prec_err("padic", format!("need {} digits, have {}", k, self.prec)));
        }
        let m = ppow(self.p, k);
        Ok(self.to_bigint()?.mod_floor(&m).to_u64().unwrap())
    }

    fn check(&self, o: &PAdic) {
        assert_eq!(self.p, o.p, "mixed primes");
    }

    pub fn add(&self, o: &PAdic) -> PAdic {
        self.check(o);
        let prec = self.prec.min(o.prec);
        let s = self.val.min(o.val).min(prec);
        let a = &self.unit * ppow(self.p, self.val - s);
        let b = &o.unit * ppow(self.p, o.val - s);
        PAdic::from_parts(self.p, a + b, s, prec)
    }

    pub fn neg(&self) -> PAdic {
        if self.is_zero() {
            return self.clone();
        }
        PAdic::from_parts(self.p, -self.unit.clone(), self.val, self.prec)
    }

    pub fn sub(&self, o: &PAdic) -> PAdic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PAdic) -> PAdic {
        self.check(o);
        let prec = (self.val + o.prec).min(o.val + self.prec);
        if self.is_zero() || o.is_zero() {
            return PAdic::zero(self.p, prec);
        }
        PAdic::from_parts(self.p, &self.unit * &o.unit, self.val + o.val, prec)
    }

    pub fn inv(&self) -> Result<PAdic> {
        if self.is_zero() {
            return Err(Error::NotInvertible(format!("zero mod {}^{}", self.p, self.prec)));
        }
        let rel = self.prec - self.val;
        let m = ppow(self.p, rel);
        let u = modinv(&self.unit, &m);
        Ok(PAdic { p: self.p, val: -self.val, unit: u, prec: rel - self.val })
    }

    pub fn div(&self, o: &PAdic) -> Result<PAdic> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u64) -> PAdic {
        let mut r = PAdic::one(self.p, self.prec.max(0) + 1 + self.val.abs() * e as i64);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    pub fn scale_int(&self, k: i64) -> PAdic {
        self.mul(&PAdic::from_int(self.p, k, self.prec + vp_u64_signed(self.p, k)))
    }

    /// Equal modulo `p^k`.
    pub fn eq_mod(&self, o: &PAdic, k: i64) -> bool {
        let d = self.sub(o);
        d.is_zero() || d.val >= k
    }

    /// Equality at the common precision.
    pub fn agrees(&self, o: &PAdic) -> bool {
        self.sub(o).is_zero()
    }

    /// Teichmuller representative of a unit.
    pub fn teichmuller(&self) -> Result<PAdic> {
        if self.valuation() != Some(0) {
            return Err(Error::Domain("Teichmuller lift needs a unit".into()));
        }
        let m = ppow(self.p, self.prec);
        let mut t = self.unit.clone();
        for _ in 0..self.prec {
            t = t.modpow(&BigInt::from(self.p), &m);
        }
        Ok(PAdic::from_parts(self.p, t, 0, self.prec))
    }

    /// Principal-unit part `x / omega(x)`.
    pub fn principal_part(&self) -> Result<PAdic> {
        let w = self.teichmuller()?;
        self.div(&w)
    }
}

fn vp_u64_signed(p: u64, k: i64) -> i64 {
    if k == 0 {
        0
    } else {
        vp_u64(p, k.unsigned_abs())
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.prec)
        } else {
            write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.prec)
        }
    }
}

impl PartialEq for PAdic {
    fn eq(&self, o: &PAdic) -> bool {
        self.p == o.p && self.agrees(o)
    }
}

/// `log(x)` for `v_p(x - 1) >= 1`, p odd.
pub fn padic_log(x: &PAdic) -> Result<PAdic> {
    let p = x.p;
    if p == 2 {
        return Err(Error::Unsupported("p = 2".into()));
    }
    let target = x.prec;
    if target < 1 {
        return Err(prec_err("padic", "log needs at least one digit"));
    }
    let one = PAdic::one(p, target);
    let y = x.sub(&one);
    if let Some(v) = y.valuation() {
        if v < 1 {
            return Err(Error::Domain(format!("log needs |x-1| < 1, got v(x-1) = {}", v)));
        }
    } else {
        return Ok(PAdic::zero(p, target));
    }
    let yv = y.val;
    let yr = y.to_rational();
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut k: u64 = 1;
    loop {
        term = &term * &yr;
        let tv = k as i64 * yv - vp_u64(p, k);
        if tv >= target && tail_done(p, k, yv, target) {
            break;
        }
        let t = &term / BigRational::from_integer(BigInt::from(k));
        if k % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        k += 1;
    }
    Ok(PAdic::from_rational(p, &sum, target))
}

fn tail_done(p: u64, k: u64, yv: i64, target: i64) -> bool {
    // all j >= k have j*yv - v_p(j) >= target
    let mut j = k;
    let limit = k + 4 * p * (1 + target as u64);
    while j < limit {
        if (j as i64) * yv - vp_u64(p, j) < target {
            return false;
        }
        j += 1;
    }
    true
}

/// Falling factorial of length r over r!.
pub fn ext_binomial(x: &PAdic, r: u64) -> Result<PAdic> {
    let p = x.p;
    if r == 0 {
        return Ok(PAdic::one(p, x.prec.max(1)));
    }
    let mut num = x.clone();
    for i in 1..r {
        num = num.mul(&x.sub(&PAdic::from_int(p, i as i64, x.prec.max(1))));
    }
    let vf = vp_factorial(p, r);
    let mut f = BigInt::one();
    for i in 2..=r {
        f *= i;
    }
    let fu = f / ppow(p, vf);
    if num.is_zero() && num.prec - vf <= 0 {
        return Err(prec_err("padic", format!("binomial({}, {}) has no known digits", x, r)));
    }
    let m = ppow(p, (num.prec - num.val).max(1));
    let inv = modinv(&fu.mod_floor(&m), &m);
    if num.is_zero() {
        return Ok(PAdic::zero(p, num.prec - vf));
    }
    Ok(PAdic::from_parts(p, &num.unit * inv, num.val - vf, num.prec - vf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_roundtrip() {
        let p = 5;
        let a = PAdic::from_rational(p, &q(7, 3), 10);
        let b = PAdic::from_rational(p, &q(-2, 25), 10);
        let s = a.add(&b);
        assert_eq!(s, PAdic::from_rational(p, &q(7 * 25 - 6, 75), 10));
        let m = a.mul(&b);
        assert_eq!(m, PAdic::from_rational(p, &q(-14, 75), 8));
        let d = a.div(&b).unwrap();
        assert_eq!(d, PAdic::from_rational(p, &q(-175, 6), 10));
        assert_eq!(b.valuation(), Some(-2));
        assert_eq!(m.prec(), 8);
    }

    #[test]
    fn precision_is_pessimistic() {
        let p = 3;
        let a = PAdic::from_int(p, 9, 5);
        let b = PAdic::from_int(p, 4, 3);
        assert_eq!(a.mul(&b).prec(), 5);
        assert_eq!(a.inv().unwrap().prec(), 5 - 4);
        let z = PAdic::zero(p, 4);
        assert!(z.mul(&b).is_zero());
        assert_eq!(z.mul(&b).prec(), 4);
    }

    #[test]
    fn log_examples() {
        let p = 5;
        assert!(padic_log(&PAdic::one(p, 10)).unwrap().is_zero());
        let x = PAdic::from_int(p, 6, 4);
        let l = padic_log(&x).unwrap();
        let mut s = BigRational::zero();
        for k in 1..=6i64 {
            let t = q(num_traits::pow(5i64, k as usize), k);
            if k % 2 == 1 {
                s += t
            } else {
                s -= t
            }
        }
        assert_eq!(l, PAdic::from_rational(p, &s, 4));
        let l2 = padic_log(&PAdic::from_int(p, 36, 4)).unwrap();
        assert_eq!(l2, l.add(&l));
        assert!(padic_log(&PAdic::from_int(p, 2, 4)).is_err());
    }

    #[test]
    fn binomial_examples() {
        let p = 3;
        assert_eq!(ext_binomial(&PAdic::from_int(p, 7, 10), 3).unwrap(), PAdic::from_int(p, 35, 10));
        let half = PAdic::from_rational(p, &q(1, 2), 12);
        assert_eq!(ext_binomial(&half, 2).unwrap(), PAdic::from_rational(p, &q(-1, 8), 11));
        assert!(ext_binomial(&PAdic::from_int(p, 7, 1), 3).is_err());
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        let p = 7;
        let x = PAdic::from_int(p, 3, 12);
        let w = x.teichmuller().unwrap();
        assert_eq!(w.pow(6), PAdic::one(p, 12));
        assert!(w.eq_mod(&x, 1));
    }
}
