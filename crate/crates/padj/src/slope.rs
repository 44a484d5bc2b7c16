//! Newton polygons, slope factorizations and slope projectors, over Q_p
//! (`PAdicField`) or over a truncated disk ring (`DiskRing`).
//!
//! Polynomials are coefficient vectors, low degree first. Slopes are root
//! valuations, so X^2 - pX + p^3 has slopes 1 and 2.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{prec_err, Error, Result};
use crate::padic::PAdic;
use crate::ring::{charpoly, identity, mat_mul, poly_at_mat, Mat, Ring};
use crate::weightspace::{DiskElem, DiskRing, PAdicField};

/// A ring with a valuation read off at the centre u = 0.
pub trait LocalRing: Ring + Clone {
    /// Valuation at u = 0; the precision bound for zero.
    fn val0(&self, a: &Self::El) -> i64;
    /// Smallest valuation among the non-constant u-coefficients (`i64::MAX` over Q_p).
    fn tail_val(&self, a: &Self::El) -> i64;
    fn inv_local(&self, a: &Self::El) -> Result<Self::El>;
    fn prec(&self) -> i64;
    fn at_prec(&self, prec: i64) -> Self;
    /// Move an element into this ring, padding known digits with zeros.
    fn coerce(&self, a: &Self::El) -> Self::El;
}

impl LocalRing for PAdicField {
    fn val0(&self, a: &PAdic) -> i64 {
        a.val_bound()
    }
    fn tail_val(&self, _: &PAdic) -> i64 {
        i64::MAX
    }
    fn inv_local(&self, a: &PAdic) -> Result<PAdic> {
        a.inv()
    }
    fn prec(&self) -> i64 {
        self.prec
    }
    fn at_prec(&self, prec: i64) -> PAdicField {
        PAdicField { p: self.p, prec }
    }
    fn coerce(&self, a: &PAdic) -> PAdic {
        if a.prec() >= self.prec {
            a.with_prec(self.prec)
        } else {
            a.lift_prec(self.prec)
        }
    }
}

impl LocalRing for DiskRing {
    fn val0(&self, a: &DiskElem) -> i64 {
        a.c[0].val_bound()
    }
    fn tail_val(&self, a: &DiskElem) -> i64 {
        a.c[1..].iter().map(|x| x.val_bound()).min().unwrap_or(i64::MAX)
    }
    fn inv_local(&self, a: &DiskElem) -> Result<DiskElem> {
        self.inv(a)
    }
    fn prec(&self) -> i64 {
        self.n
    }
    fn at_prec(&self, prec: i64) -> DiskRing {
        DiskRing { n: prec, ..*self }
    }
    fn coerce(&self, a: &DiskElem) -> DiskElem {
        let f = PAdicField { p: self.p, prec: self.n };
        self.from_coeffs(a.c.iter().map(|x| f.coerce(x)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: BigRational,
    pub mult: usize,
}

/// Vertices of the lower convex hull of the points (i, v_i).
fn lower_hull(v: &[i64]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..v.len() {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            // drop b if it lies on or above the chord a -> i
            let lhs = (v[b] as i128 - v[a] as i128) * (i - a) as i128;
            let rhs = (v[i] as i128 - v[a] as i128) * (b - a) as i128;
            if lhs >= rhs {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

fn degree<R: Ring>(r: &R, f: &[R::El]) -> Result<usize> {
    let d = f.iter().rposition(|c| !r.is_zero(c)).ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    if d + 1 != f.len() {
        return Err(Error::Domain("leading coefficient is not a unit".into()));
    }
    Ok(d)
}

/// Newton polygon of a polynomial with unit leading coefficient, slopes increasing.
/// Coefficients that vanish to working precision sit at their precision bound.
pub fn newton_polygon<R: LocalRing>(r: &R, f: &[R::El]) -> Result<Vec<Segment>> {
    let d = degree(r, f)?;
    if r.val0(&f[d]) != 0 {
        return Err(Error::Domain("leading coefficient is not a unit".into()));
    }
    let v: Vec<i64> = f.iter().map(|c| r.val0(c)).collect();
    let h = lower_hull(&v);
    let mut out = Vec::new();
    for w in h.windows(2).rev() {
        let len = w[1] - w[0];
        out.push(Segment { slope: BigRational::new(BigInt::from(v[w[0]] - v[w[1]]), BigInt::from(len as i64)), mult: len });
    }
    Ok(out)
}

/// The Newton polygon is the same at every point of the closed disk when each
/// vertex coefficient is dominated by its constant term and no tail coefficient
/// dips below the hull.
fn check_constant<R: LocalRing>(r: &R, f: &[R::El]) -> Result<()> {
    let v: Vec<i64> = f.iter().map(|c| r.val0(c)).collect();
    let h = lower_hull(&v);
    for w in h.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in a..=b {
            let t = r.tail_val(&f[i]);
            if t == i64::MAX {
                continue;
            }
            // hull height at i is v_a + (v_b - v_a)(i - a)/(b - a)
            let lhs = (t as i128 - v[a] as i128) * (b - a) as i128;
            let rhs = (v[b] as i128 - v[a] as i128) * (i - a) as i128;
            let vertex = i == a || i == b;
            if lhs < rhs || (vertex && t <= v[i]) {
                return Err(Error::NotAdapted(format!("Newton polygon varies across the disk at X^{}", i)));
            }
        }
    }
    Ok(())
}

fn poly_mul<R: Ring>(r: &R, a: &[R::El], b: &[R::El]) -> Vec<R::El> {
    let mut out = vec![r.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = r.add(&out[i + j], &r.mul(x, y));
        }
    }
    out
}

/// Solve A x = b by elimination, pivoting on the smallest valuation at u = 0.
fn solve_local<R: LocalRing>(r: &R, a: &Mat<R::El>, b: &[R::El]) -> Result<Vec<R::El>> {
    let n = a.rows;
    let mut m: Vec<Vec<R::El>> = (0..n).map(|i| {
        let mut row = a.row(i);
        row.push(b[i].clone());
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&i| r.val0(&m[i][col]) < r.prec() && !r.is_zero(&m[i][col]))
            .min_by_key(|&i| r.val0(&m[i][col]))
            .ok_or_else(|| Error::NotInvertible("singular Sylvester system".into()))?;
        m.swap(col, piv);
        let inv = r.inv_local(&m[col][col])?;
        for j in col..=n {
            m[col][j] = r.mul(&inv, &m[col][j]);
        }
        for i in 0..n {
            if i == col || r.is_zero(&m[i][col]) {
                continue;
            }
            let fct = m[i][col].clone();
            for j in col..=n {
                let t = r.mul(&fct, &m[col][j]);
                m[i][j] = r.sub(&m[i][j], &t);
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Sylvester matrix of (dQ, dS) -> S dQ + Q dS with deg dQ < deg Q, deg dS < deg S.
fn sylvester<R: Ring>(r: &R, q: &[R::El], s: &[R::El]) -> Mat<R::El> {
    let e = q.len() - 1;
    let k = s.len() - 1;
    let d = e + k;
    let mut m = Mat::from_fn(d, d, |_, _| r.zero());
    for j in 0..e {
        for (i, c) in s.iter().enumerate() {
            m.set(i + j, j, c.clone());
        }
    }
    for j in 0..k {
        for (i, c) in q.iter().enumerate() {
            m.set(i + j, e + j, c.clone());
        }
    }
    m
}

/// Rank by elimination with valuation pivoting; entries zero to their
/// tracked precision count as zero.
pub fn rank_local<R: LocalRing>(r: &R, a: &Mat<R::El>) -> usize {
    let mut m: Vec<Vec<R::El>> = (0..a.rows).map(|i| a.row(i)).collect();
    let mut rank = 0;
    for col in 0..a.cols {
        let piv = (rank..a.rows).filter(|&i| !r.is_zero(&m[i][col])).min_by_key(|&i| r.val0(&m[i][col]));
        let Some(piv) = piv else { continue };
        if r.val0(&m[piv][col]) >= r.prec() {
            continue;
        }
        m.swap(rank, piv);
        let Ok(inv) = r.inv_local(&m[rank][col]) else { continue };
        for i in rank + 1..a.rows {
            if r.is_zero(&m[i][col]) {
                continue;
            }
            let fct = r.mul(&m[i][col], &inv);
            for j in col..a.cols {
                let t = r.mul(&fct, &m[rank][j]);
                m[i][j] = r.sub(&m[i][j], &t);
            }
        }
        rank += 1;
    }
    rank
}

fn split_index(segs: &[Segment], nu: &BigRational) -> Result<usize> {
    if segs.iter().any(|s| &s.slope == nu) {
        return Err(Error::NotAdapted(format!("a Newton slope equals {}", nu)));
    }
    Ok(segs.iter().filter(|s| &s.slope > nu).map(|s| s.mult).sum())
}

/// Factor f = Q S with Q monic carrying the slopes <= nu and S the slopes > nu.
/// Q and S are representatives with Q S = f at working precision.
pub fn slope_factor<R: LocalRing>(r: &R, f: &[R::El], nu: &BigRational) -> Result<(Vec<R::El>, Vec<R::El>)> {
    let (q, s, _) = factor_with_loss(r, f, nu)?;
    Ok((q, s))
}

/// Digits of Q and S not pinned down by Q S = f mod p^N: minus the smallest
/// valuation in the inverse Sylvester matrix.
fn separation_loss<R: LocalRing>(r: &R, q: &[R::El], s: &[R::El]) -> Result<i64> {
    let m = sylvester(r, q, s);
    let mut worst = 0i64;
    for j in 0..m.rows {
        let mut b = vec![r.zero(); m.rows];
        b[j] = r.one();
        for x in solve_local(r, &m, &b)? {
            if !r.is_zero(&x) {
                worst = worst.min(r.val0(&x).min(r.tail_val(&x)));
            }
        }
    }
    Ok(-worst)
}

fn factor_with_loss<R: LocalRing>(r: &R, f: &[R::El], nu: &BigRational) -> Result<(Vec<R::El>, Vec<R::El>, i64)> {
    let segs = newton_polygon(r, f)?;
    check_constant(r, f)?;
    let d = f.len() - 1;
    let k = split_index(&segs, nu)?;
    let e = d - k;
    let lc_inv = r.inv_local(&f[d])?;
    if k == 0 {
        return Ok((f.iter().map(|c| r.mul(c, &lc_inv)).collect(), vec![f[d].clone()], 0));
    }
    if e == 0 {
        return Ok((vec![r.one()], f.to_vec(), 0));
    }
    if r.val0(&f[k]) >= r.prec() {
        return Err(prec_err("slope", format!("vertex coefficient of X^{} vanishes at working precision", k)));
    }
    let target = r.prec();
    let mut guard = 8;
    while guard <= 4 * target + 64 {
        let wr = r.at_prec(target + guard);
        let ff: Vec<R::El> = f.iter().map(|c| wr.coerce(c)).collect();
        let ad = ff[d].clone();
        let ak_inv = wr.inv_local(&ff[k])?;
        let ad_inv = wr.inv_local(&ad)?;
        let mut q: Vec<R::El> = ff[k..].iter().map(|c| wr.mul(c, &ad_inv)).collect();
        let sc = wr.mul(&ad, &ak_inv);
        let mut s: Vec<R::El> = ff[..=k].iter().map(|c| wr.mul(c, &sc)).collect();
        for _ in 0..64 {
            let err: Vec<R::El> = {
                let qs = poly_mul(&wr, &q, &s);
                ff.iter().zip(&qs).map(|(a, b)| wr.sub(a, b)).collect()
            };
            if err.iter().all(|c| r.val0(c) >= target && r.tail_val(c) >= target) {
                let q: Vec<R::El> = q.iter().map(|c| r.coerce(c)).collect();
                let s: Vec<R::El> = s.iter().map(|c| r.coerce(c)).collect();
                let back = poly_mul(r, &q, &s);
                if back.iter().zip(f).all(|(a, b)| r.is_zero(&r.sub(a, b))) {
                    let loss = separation_loss(&wr, &q, &s)?;
                    return Ok((q, s, loss));
                }
                break;
            }
            let m = sylvester(&wr, &q, &s);
            let x = solve_local(&wr, &m, &err[..d])?;
            for j in 0..e {
                q[j] = wr.coerce(&wr.add(&q[j], &x[j]));
            }
            for j in 0..k {
                s[j] = wr.coerce(&wr.add(&s[j], &x[e + j]));
            }
        }
        guard *= 2;
    }
    Err(prec_err("slope", "Hensel iteration did not separate the slope factors"))
}

#[derive(Clone, Debug)]
pub struct SlopeDatum<E> {
    pub nu: BigRational,
    pub charpoly: Vec<E>,
    pub q: Vec<E>,
    pub s: Vec<E>,
    /// Digits of Q and S beyond precision minus `loss` are a choice of representative.
    pub loss: i64,
    pub projector: Mat<E>,
}

/// Charpoly, slope factorization and the projector onto the slope <= nu summand.
pub fn slope_datum<R: LocalRing>(r: &R, u: &Mat<R::El>, nu: &BigRational) -> Result<SlopeDatum<R::El>> {
    let cp = charpoly(r, u);
    let (q, s, loss) = factor_with_loss(r, &cp, nu)?;
    let n = u.rows;
    let known = r.at_prec((r.prec() - loss).max(0));
    let qk: Vec<R::El> = q.iter().map(|c| known.coerce(c)).collect();
    let sk: Vec<R::El> = s.iter().map(|c| known.coerce(c)).collect();
    let projector = if s.len() == 1 {
        identity(r, n)
    } else if q.len() == 1 {
        Mat::from_fn(n, n, |_, _| r.zero())
    } else {
        // A Q + B S = 1, and B(U) S(U) is the identity on ker Q(U), zero on ker S(U)
        let m = sylvester(r, &qk, &sk);
        let mut one = vec![r.zero(); m.rows];
        one[0] = r.one();
        let x = solve_local(r, &m, &one)?;
        let b = &x[..q.len() - 1];
        mat_mul(r, &poly_at_mat(r, b, u), &poly_at_mat(r, &sk, u))
    };
    Ok(SlopeDatum { nu: nu.clone(), charpoly: cp, q, s, loss, projector })
}

pub fn slope_projector<R: LocalRing>(r: &R, u: &Mat<R::El>, nu: &BigRational) -> Result<Mat<R::El>> {
    Ok(slope_datum(r, u, nu)?.projector)
}

/// Parse a slope bound written as "0.5", "3/2" or "2".
pub fn parse_nu(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("bad slope {}", s));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((i, f)) = s.split_once('.') {
        let den = num_traits::pow(BigInt::from(10), f.len());
        let neg = i.trim_start().starts_with('-');
        let ip: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        let fp: BigInt = if f.is_empty() { BigInt::zero() } else { f.parse().map_err(|_| bad())? };
        let fr = BigRational::new(fp, den);
        let v = BigRational::from_integer(ip.clone()) + if neg { -fr } else { fr };
        return Ok(v);
    }
    let a: BigInt = s.trim().parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(a))
}

/// No Newton slope equals nu.
pub fn is_adapted(segs: &[Segment], nu: &BigRational) -> bool {
    segs.iter().all(|s| &s.slope != nu)
}
