//! Polynomial modules L_lambda, their duals V_lambda, matrix actions, theta
//! and the explicit pairing. Scalars are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{mat_mul, mat_vec, Mat, QQ};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightPoint {
    pub lambda1: i64,
    pub lambda2: i64,
}

impl WeightPoint {
    pub fn new(lambda1: i64, lambda2: i64) -> WeightPoint {
        WeightPoint { lambda1, lambda2 }
    }
    /// n(lambda) = lambda1 - lambda2.
    pub fn n(&self) -> i64 {
        self.lambda1 - self.lambda2
    }
    /// w(lambda) = lambda1 + lambda2.
    pub fn w(&self) -> i64 {
        self.lambda1 + self.lambda2
    }
    pub fn is_dominant(&self) -> bool {
        self.lambda1 >= self.lambda2
    }
    fn dim(&self) -> Result<usize> {
        if !self.is_dominant() {
            return Err(Error::Invalid(format!("weight {:?} is not dominant", self)));
        }
        Ok(self.n() as usize + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyVector {
    pub weight: WeightPoint,
    pub coeffs: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    pub weight: WeightPoint,
    pub coeffs: Vec<BigRational>,
}

impl PolyVector {
    pub fn new(weight: WeightPoint, coeffs: Vec<BigRational>) -> Result<PolyVector> {
        if coeffs.len() != weight.dim()? {
            return Err(Error::Invalid("coefficient count must be n+1".into()));
        }
        Ok(PolyVector { weight, coeffs })
    }
}

impl DualVector {
    pub fn new(weight: WeightPoint, coeffs: Vec<BigRational>) -> Result<DualVector> {
        if coeffs.len() != weight.dim()? {
            return Err(Error::Invalid("coefficient count must be n+1".into()));
        }
        Ok(DualVector { weight, coeffs })
    }
    /// The basis vector l_r.
    pub fn basis(weight: WeightPoint, r: usize) -> DualVector {
        let n = weight.n() as usize;
        let mut c = vec![BigRational::zero(); n + 1];
        c[r] = BigRational::one();
        DualVector { weight, coeffs: c }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GL2 {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl GL2 {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<GL2> {
        let g = GL2 { a, b, c, d };
        if g.det().is_zero() {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        Ok(g)
    }
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<GL2> {
        let f = |x: i64| BigRational::from_integer(x.into());
        GL2::new(f(a), f(b), f(c), f(d))
    }
    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }
    pub fn mul(&self, o: &GL2) -> GL2 {
        GL2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
    /// alpha' = det(alpha) alpha^{-1}.
    pub fn adjugate(&self) -> GL2 {
        GL2 { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }
}

fn binom_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

pub fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        BigInt::zero()
    } else {
        binom_row(n)[r].clone()
    }
}

fn poly_pow2(a: &BigRational, b: &BigRational, e: usize) -> Vec<BigRational> {
    // (a z + b)^e, low to high
    let bin = binom_row(e);
    let mut out = Vec::with_capacity(e + 1);
    for i in 0..=e {
        let t = BigRational::from_integer(bin[i].clone()) * num_traits::pow(a.clone(), i) * num_traits::pow(b.clone(), e - i);
        out.push(t);
    }
    out
}

fn det_power(det: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(det.clone(), k as usize)
    } else {
        num_traits::pow(det.recip(), (-k) as usize)
    }
}

/// Matrix R with (P|alpha) = R p for coefficient column p.
pub fn right_action_matrix(weight: WeightPoint, alpha: &GL2) -> Result<Mat<BigRational>> {
    let m = weight.dim()?;
    let n = m - 1;
    let dt = alpha.det();
    if dt.is_zero() {
        return Err(Error::NotInvertible("singular matrix".into()));
    }
    let s = det_power(&dt, weight.lambda2);
    let mut out = Mat::from_fn(m, m, |_, _| BigRational::zero());
    for r in 0..=n {
        let p1 = poly_pow2(&alpha.a, &alpha.b, r);
        let p2 = poly_pow2(&alpha.c, &alpha.d, n - r);
        for (i, u) in p1.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (j, v) in p2.iter().enumerate() {
                let t = out.at(i + j, r) + u * v;
                out.set(i + j, r, t);
            }
        }
    }
    Ok(out.map(|x| x * &s))
}

/// Matrix of the left action on V_lambda in the l_r basis.
pub fn left_action_matrix(weight: WeightPoint, alpha: &GL2) -> Result<Mat<BigRational>> {
    Ok(right_action_matrix(weight, alpha)?.transpose())
}

pub fn act_right_poly(p: &PolyVector, alpha: &GL2) -> Result<PolyVector> {
    let r = right_action_matrix(p.weight, alpha)?;
    Ok(PolyVector { weight: p.weight, coeffs: mat_vec(&QQ, &r, &p.coeffs) })
}

/// Left action on L_lambda: alpha P = P|alpha'.
pub fn act_left_poly(alpha: &GL2, p: &PolyVector) -> Result<PolyVector> {
    act_right_poly(p, &alpha.adjugate())
}

pub fn act_left_dual(alpha: &GL2, l: &DualVector) -> Result<DualVector> {
    let r = left_action_matrix(l.weight, alpha)?;
    Ok(DualVector { weight: l.weight, coeffs: mat_vec(&QQ, &r, &l.coeffs) })
}

/// theta: l_r -> (-1)^r binom(n, r) z^{n-r}.
pub fn theta_matrix(weight: WeightPoint) -> Result<Mat<BigRational>> {
    let m = weight.dim()?;
    let n = m - 1;
    let bin = binom_row(n);
    Ok(Mat::from_fn(m, m, |i, j| {
        if i + j == n {
            let s = if j % 2 == 0 { 1 } else { -1 };
            BigRational::from_integer(&bin[j] * s)
        } else {
            BigRational::zero()
        }
    }))
}

pub fn theta_map(l: &DualVector) -> Result<PolyVector> {
    let t = theta_matrix(l.weight)?;
    Ok(PolyVector { weight: l.weight, coeffs: mat_vec(&QQ, &t, &l.coeffs) })
}

/// The evaluation pairing <l, P>_can = l(P).
pub fn pair_can(l: &DualVector, p: &PolyVector) -> Result<BigRational> {
    if l.weight != p.weight {
        return Err(Error::WeightMismatch(format!("{:?} vs {:?}", l.weight, p.weight)));
    }
    Ok(l.coeffs.iter().zip(&p.coeffs).map(|(a, b)| a * b).sum())
}

/// sum_r (-1)^r binom(n,r) a_r b_{n-r}.
pub fn pair_dual(l1: &DualVector, l2: &DualVector) -> Result<BigRational> {
    if l1.weight != l2.weight {
        return Err(Error::WeightMismatch(format!("{:?} vs {:?}", l1.weight, l2.weight)));
    }
    Ok(pair_dual_coeffs(&l1.coeffs, &l2.coeffs))
}

pub fn pair_dual_coeffs(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let n = a.len() - 1;
    let bin = binom_row(n);
    let mut acc = BigRational::zero();
    for r in 0..=n {
        let t = &a[r] * &b[n - r] * BigRational::from_integer(bin[r].clone());
        if r % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// Gram matrix of pair_dual in the l_r basis.
pub fn pair_gram(weight: WeightPoint) -> Result<Mat<BigRational>> {
    let m = weight.dim()?;
    let mut g = Mat::from_fn(m, m, |_, _| BigRational::zero());
    for i in 0..m {
        for j in 0..m {
            let v = pair_dual(&DualVector::basis(weight, i), &DualVector::basis(weight, j))?;
            g.set(i, j, v);
        }
    }
    Ok(g)
}

/// Left action of a matrix on L_lambda (through alpha') as a matrix.
pub fn left_poly_matrix(weight: WeightPoint, alpha: &GL2) -> Result<Mat<BigRational>> {
    right_action_matrix(weight, &alpha.adjugate())
}

pub fn compose_check(weight: WeightPoint, a: &GL2, b: &GL2) -> Result<bool> {
    let ra = right_action_matrix(weight, a)?;
    let rb = right_action_matrix(weight, b)?;
    let rab = right_action_matrix(weight, &a.mul(b))?;
    Ok(mat_mul(&QQ, &rb, &ra) == rab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat_i, rank};

    fn w(a: i64, b: i64) -> WeightPoint {
        WeightPoint::new(a, b)
    }

    #[test]
    fn spec_examples() {
        let lam = w(2, 0);
        let p = PolyVector::new(lam, vec![rat_i(0), rat_i(1), rat_i(0)]).unwrap();
        let g = GL2::from_ints(1, 1, 0, 1).unwrap();
        let q = act_right_poly(&p, &g).unwrap();
        assert_eq!(q.coeffs, vec![rat_i(1), rat_i(1), rat_i(0)]);
        let s = w(1, 1);
        let p0 = PolyVector::new(s, vec![rat_i(3)]).unwrap();
        let g2 = GL2::from_ints(2, 1, 1, 3).unwrap();
        assert_eq!(act_right_poly(&p0, &g2).unwrap().coeffs, vec![rat_i(15)]);
        let t = theta_map(&DualVector::basis(lam, 1)).unwrap();
        assert_eq!(t.coeffs, vec![rat_i(0), rat_i(-2), rat_i(0)]);
        let t3 = theta_map(&DualVector::basis(w(3, 0), 3)).unwrap();
        assert_eq!(t3.coeffs, vec![rat_i(-1), rat_i(0), rat_i(0), rat_i(0)]);
        let v = pair_dual(&DualVector::basis(lam, 0), &DualVector::basis(lam, 2)).unwrap();
        assert_eq!(v, rat_i(1));
    }

    #[test]
    fn duality_exhaustive() {
        let g = GL2::from_ints(3, -2, 5, 7).unwrap();
        for n in 0..=4 {
            let lam = w(n, 0);
            for r in 0..=n as usize {
                let l = act_left_dual(&g, &DualVector::basis(lam, r)).unwrap();
                for s in 0..=n as usize {
                    let mut c = vec![rat_i(0); n as usize + 1];
                    c[s] = rat_i(1);
                    let zs = PolyVector::new(lam, c).unwrap();
                    let lhs = pair_can(&l, &zs).unwrap();
                    let rhs = act_right_poly(&zs, &g).unwrap().coeffs[r].clone();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gram_antidiagonal_and_perfect() {
        let lam = w(5, 1);
        let g = pair_gram(lam).unwrap();
        assert_eq!(rank(&QQ, &g), 5);
        for i in 0..5 {
            for j in 0..5 {
                if i + j != 4 {
                    assert!(g.at(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn theta_intertwines() {
        let g = GL2::from_ints(2, 1, -3, 4).unwrap();
        for n in 0..=4 {
            let lam = w(n + 1, 1);
            let th = theta_matrix(lam).unwrap();
            let lhs = mat_mul(&QQ, &th, &left_action_matrix(lam, &g).unwrap());
            let rhs = mat_mul(&QQ, &left_poly_matrix(lam, &g).unwrap(), &th);
            assert_eq!(lhs, rhs);
        }
    }
}
