//! Local zeta integrals at p for the refined and spherical Whittaker
//! vectors, the p-adic multiplier, and truncated-sum checks.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalParams {
    pub q: u64,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub vol: BigRational,
}

impl LocalParams {
    pub fn new(q: u64, alpha: BigRational, beta: BigRational) -> Result<LocalParams> {
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::Domain("Hecke parameters must be nonzero".into()));
        }
        if q < 2 {
            return Err(Error::Domain("q must exceed 1".into()));
        }
        Ok(LocalParams { q, alpha, beta, vol: BigRational::one() })
    }

    fn qr(&self) -> BigRational {
        BigRational::from_integer(self.q.into())
    }

    /// alpha beta^{-1} q^{-1}
    pub fn ratio(&self) -> BigRational {
        &self.alpha / (&self.beta * self.qr())
    }

    fn check_convergent(&self) -> Result<()> {
        if self.ratio().abs() >= BigRational::one() {
            return Err(Error::Domain(format!("|alpha/(beta q)| = {} is not < 1", self.ratio())));
        }
        Ok(())
    }

    fn denom(&self) -> BigRational {
        let one = BigRational::one();
        (&one - self.ratio()) * (&one - self.qr().recip())
    }
}

fn powi(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// q^{-m} sum_{l=0}^m alpha^l beta^{m-l}, zero for m < 0.
pub fn whittaker_spherical(m: i64, prm: &LocalParams) -> BigRational {
    if m < 0 {
        return BigRational::zero();
    }
    let mut s = BigRational::zero();
    for l in 0..=m {
        s += powi(&prm.alpha, l) * powi(&prm.beta, m - l);
    }
    s * powi(&prm.qr(), -m)
}

/// q^{-m} alpha^m, zero for m < 0.
pub fn whittaker_refined(m: i64, prm: &LocalParams) -> BigRational {
    if m < 0 {
        return BigRational::zero();
    }
    powi(&(&prm.alpha / prm.qr()), m)
}

pub fn i1_closed(prm: &LocalParams) -> Result<BigRational> {
    prm.check_convergent()?;
    Ok(&prm.vol * &prm.alpha / prm.qr() / prm.denom())
}

pub fn i2_closed(prm: &LocalParams) -> Result<BigRational> {
    prm.check_convergent()?;
    Ok(&prm.vol * &prm.beta / prm.qr() / prm.denom())
}

pub fn psi_at_one(prm: &LocalParams) -> Result<BigRational> {
    prm.check_convergent()?;
    Ok(&prm.vol * (&prm.alpha - &prm.beta) / prm.qr() / prm.denom())
}

/// prod_v (1 - beta_v alpha_v^{-1} q_v^{-1})(alpha_v - beta_v) q_v^{-1}.
pub fn ep_multiplier(places: &[LocalParams]) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for v in places {
        if v.alpha.is_zero() {
            return Err(Error::Domain("alpha_v = 0".into()));
        }
        let qv = v.qr();
        let f = (BigRational::one() - &v.beta / (&v.alpha * &qv)) * (&v.alpha - &v.beta) / &qv;
        acc *= f;
    }
    Ok(acc)
}

/// Truncated unfolded sums (I1, I2) over n < terms.
/// I1 = omega * vol * sum_{n>=1} omega^{-n} W_alpha(n) W(n-1),
/// I2 = beta q^{-1} vol * sum_{n>=0} omega^{-n} W_alpha(n) W(n), omega = alpha beta / q.
pub fn truncated_sums(prm: &LocalParams, terms: usize) -> (BigRational, BigRational) {
    let omega = &prm.alpha * &prm.beta / prm.qr();
    let mut s1 = BigRational::zero();
    let mut s2 = BigRational::zero();
    for n in 0..terms as i64 {
        let wn = whittaker_refined(n, prm);
        let om = powi(&omega, -n);
        s1 += &om * &wn * whittaker_spherical(n - 1, prm);
        s2 += &om * &wn * whittaker_spherical(n, prm);
    }
    (&omega * &prm.vol * s1, &prm.beta / prm.qr() * &prm.vol * s2)
}

/// Same sums in floating point, for parameter sweeps.
pub fn truncated_sums_f64(q: f64, alpha: f64, beta: f64, terms: usize) -> (f64, f64) {
    let omega = alpha * beta / q;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut wsph_prev = 0.0;
    for n in 0..terms as i32 {
        let wn = (alpha / q).powi(n);
        let wsph: f64 = (0..=n).map(|l| alpha.powi(l) * beta.powi(n - l)).sum::<f64>() / q.powi(n);
        let om = omega.powi(-n);
        s1 += om * wn * wsph_prev;
        s2 += om * wn * wsph;
        wsph_prev = wsph;
    }
    (omega * s1, beta / q * s2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaRow {
    pub alpha: String,
    pub beta: String,
    pub q: u64,
    pub i1: String,
    pub i2: String,
    pub psi: String,
    pub e_p: String,
    pub truncation_error: f64,
}

pub fn zeta_row(prm: &LocalParams, terms: usize) -> Result<ZetaRow> {
    let i1 = i1_closed(prm)?;
    let i2 = i2_closed(prm)?;
    let psi = psi_at_one(prm)?;
    let ep = ep_multiplier(std::slice::from_ref(prm))?;
    let (t1, t2) = truncated_sums(prm, terms);
    let err = (&t1 - &t2 - &psi).abs().to_f64().unwrap_or(f64::NAN);
    Ok(ZetaRow {
        alpha: prm.alpha.to_string(),
        beta: prm.beta.to_string(),
        q: prm.q,
        i1: i1.to_string(),
        i2: i2.to_string(),
        psi: psi.to_string(),
        e_p: ep.to_string(),
        truncation_error: err,
    })
}
