//! Classical symbols with values in V_lambda, over Q and over Z/p^K.

use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::p1::{cusp_parabolics, is_squarefree, num_cusps, psl_index, Mat2};
use super::{hecke_terms, iota_terms, up_terms, w_terms, CoeffModule, Presentation, SymbolSpace};
use crate::error::{Error, Result};
use crate::polyrep::{left_action_matrix, WeightPoint, GL2};
use crate::ring::{
    charpoly, column_basis, coords_in, identity, mat_mul, mat_pow, mat_scale, mat_sub, nullspace, rank, Mat,
    Zpk, QQ,
};

pub fn gl2_of(g: &Mat2) -> GL2 {
    let q = |x: i128| BigRational::from_integer(BigInt::from(x));
    GL2::new(q(g[0]), q(g[1]), q(g[2]), q(g[3])).expect("singular matrix")
}

#[derive(Clone, Copy, Debug)]
pub struct VCoeff {
    pub weight: WeightPoint,
}

impl CoeffModule for VCoeff {
    type R = QQ;
    fn ring(&self) -> &QQ {
        &QQ
    }
    fn dim(&self) -> usize {
        (self.weight.n() + 1) as usize
    }
    fn act(&self, g: &Mat2) -> Mat<BigRational> {
        left_action_matrix(self.weight, &gl2_of(g)).expect("bad weight")
    }
}

/// V_lambda reduced mod p^K; entries must be p-integral.
#[derive(Clone, Copy, Debug)]
pub struct VCoeffZp {
    pub weight: WeightPoint,
    pub ring: Zpk,
}

impl CoeffModule for VCoeffZp {
    type R = Zpk;
    fn ring(&self) -> &Zpk {
        &self.ring
    }
    fn dim(&self) -> usize {
        (self.weight.n() + 1) as usize
    }
    fn act(&self, g: &Mat2) -> Mat<u64> {
        let q = left_action_matrix(self.weight, &gl2_of(g)).expect("bad weight");
        q.map(|x| self.ring.from_rational(x).expect("action not p-integral"))
    }
}

/// Kronecker-type symbol (d / p) for d in {-1, -3}, p prime.
fn legendre_small(d: i64, p: i64) -> i64 {
    if p == 2 {
        return if d == -1 { 0 } else { -1 };
    }
    if d.rem_euclid(p) == 0 {
        return 0;
    }
    let e = (p - 1) / 2;
    let mut r = 1i64;
    let b = d.rem_euclid(p);
    for _ in 0..e {
        r = r * b % p;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

fn prime_divisors(n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            out.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn elliptic_counts(n: i64) -> (i64, i64) {
    let ps = prime_divisors(n);
    let nu2 = if n % 4 == 0 { 0 } else { ps.iter().map(|&p| 1 + legendre_small(-1, p)).product() };
    let nu3 = if n % 9 == 0 { 0 } else { ps.iter().map(|&p| 1 + legendre_small(-3, p)).product() };
    (nu2, nu3)
}

/// dim S_k(Gamma0(N)) from the genus formula.
pub fn dim_cusp_forms(n: i64, k: i64) -> i64 {
    if k % 2 == 1 || k < 2 {
        return 0;
    }
    let mu = psl_index(n);
    let (nu2, nu3) = elliptic_counts(n);
    let c = num_cusps(n) as i64;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    let g = g12 / 12;
    if k == 2 {
        return g;
    }
    (k - 1) * (g - 1) + (k / 2 - 1) * c + nu2 * (k / 4) + nu3 * (k / 3)
}

/// dim of the full symbol space: two copies of S_k plus the boundary part.
pub fn dim_symbols(n: i64, k: i64) -> i64 {
    if k % 2 == 1 {
        return 0;
    }
    let c = num_cusps(n) as i64;
    2 * dim_cusp_forms(n, k) + if k == 2 { c - 1 } else { c }
}

pub fn smallest_good_prime(n: i64) -> i64 {
    let mut q = 2;
    loop {
        if n % q != 0 && prime_divisors(q) == vec![q] {
            return q;
        }
        q += 1;
    }
}

/// Symbols over Q with a chosen basis of the solution space.
pub struct ClassicalSpace {
    pub level: i64,
    pub weight: WeightPoint,
    pub space: SymbolSpace<VCoeff>,
    /// Columns span the symbols inside the free-value coordinates.
    pub basis: Mat<BigRational>,
}

impl ClassicalSpace {
    pub fn new(level: i64, weight: WeightPoint) -> Result<ClassicalSpace> {
        Self::with_presentation(Rc::new(Presentation::new(level)), weight)
    }

    pub fn with_presentation(pres: Rc<Presentation>, weight: WeightPoint) -> Result<ClassicalSpace> {
        if !weight.is_dominant() {
            return Err(Error::Domain(format!("weight {:?} is not dominant", weight)));
        }
        let level = pres.level();
        let space = SymbolSpace::new(pres, VCoeff { weight });
        let c = space.constraint_matrix();
        let ker = if c.rows == 0 {
            (0..space.total_dim())
                .map(|i| (0..space.total_dim()).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
                .collect()
        } else {
            nullspace(&QQ, &c)
        };
        let basis = if ker.is_empty() {
            Mat::from_fn(space.total_dim(), 0, |_, _| BigRational::zero())
        } else {
            Mat::from_cols(&ker)
        };
        Ok(ClassicalSpace { level, weight, space, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    pub fn weight_k(&self) -> i64 {
        self.weight.n() + 2
    }

    /// Restrict an operator on free values to the basis.
    pub fn restrict(&self, op: &Mat<BigRational>) -> Result<Mat<BigRational>> {
        let img = mat_mul(&QQ, op, &self.basis);
        coords_in(&QQ, &self.basis, &img).ok_or_else(|| Error::Contract("operator does not preserve the space".into()))
    }

    pub fn hecke(&self, l: i64) -> Result<Mat<BigRational>> {
        if self.level % l == 0 {
            return self.restrict(&self.space.operator(&up_terms(l)));
        }
        self.restrict(&self.space.operator(&hecke_terms(l)))
    }

    pub fn atkin_lehner(&self) -> Result<Mat<BigRational>> {
        self.restrict(&self.space.operator(&w_terms(self.level)))
    }

    pub fn iota(&self) -> Result<Mat<BigRational>> {
        self.restrict(&self.space.operator(&iota_terms()))
    }

    /// Eisenstein eigenvalue of T_q on boundary symbols.
    pub fn eisenstein_eigenvalue(&self, q: i64) -> BigRational {
        let qq = BigRational::from_integer(q.into());
        let n = self.weight.n();
        let l2 = self.weight.lambda2;
        let tw = if l2 >= 0 { num_traits::pow(qq.clone(), l2 as usize) } else { num_traits::pow(qq.recip(), (-l2) as usize) };
        tw * (BigRational::one() + num_traits::pow(qq, (n + 1) as usize))
    }

    /// Basis (in space coordinates) of the cuspidal part: the image of (T_q - e_q)^dim.
    pub fn cuspidal_coords(&self) -> Result<Mat<BigRational>> {
        let d = self.dim();
        if d == 0 {
            return Ok(Mat::from_fn(0, 0, |_, _| BigRational::zero()));
        }
        let q = smallest_good_prime(self.level);
        let t = self.hecke(q)?;
        let e = mat_sub(&QQ, &t, &mat_scale(&QQ, &self.eisenstein_eigenvalue(q), &identity(&QQ, d)));
        let p = mat_pow(&QQ, &e, d as u64);
        let cols = column_basis(&QQ, &p);
        Ok(if cols.is_empty() { Mat::from_fn(d, 0, |_, _| BigRational::zero()) } else { Mat::from_cols(&cols) })
    }

    /// Operator restricted to an invariant subspace given in space coordinates.
    pub fn restrict_to(&self, op: &Mat<BigRational>, sub: &Mat<BigRational>) -> Result<Mat<BigRational>> {
        if sub.cols == 0 {
            return Ok(Mat::from_fn(0, 0, |_, _| BigRational::zero()));
        }
        coords_in(&QQ, sub, &mat_mul(&QQ, op, sub)).ok_or_else(|| Error::Contract("subspace not invariant".into()))
    }

    /// The eps-eigenspace of iota inside a subspace (space coordinates).
    pub fn sign_part(&self, sub: &Mat<BigRational>, eps: i64) -> Result<Mat<BigRational>> {
        let i = self.restrict_to(&self.iota()?, sub)?;
        let k = mat_sub(&QQ, &i, &mat_scale(&QQ, &BigRational::from_integer(eps.into()), &identity(&QQ, i.rows)));
        let ns = nullspace(&QQ, &k);
        if ns.is_empty() {
            return Ok(Mat::from_fn(sub.rows, 0, |_, _| BigRational::zero()));
        }
        Ok(mat_mul(&QQ, sub, &Mat::from_cols(&ns)))
    }

    /// Free-value vector of the symbol with space coordinates v.
    pub fn values(&self, v: &[BigRational]) -> Vec<BigRational> {
        crate::ring::mat_vec(&QQ, &self.basis, v)
    }

    /// Value of a symbol (free-value vector) on {r, s}.
    pub fn eval_path(&self, vals: &[BigRational], r: (i128, i128), s: (i128, i128)) -> Vec<BigRational> {
        crate::ring::mat_vec(&QQ, &self.space.path_matrix(r, s), vals)
    }

    /// Checks that each cusp-stabilizer restriction phi({s, pi s}) lies in (pi - 1)V.
    pub fn boundary_vanishes(&self, vals: &[BigRational]) -> bool {
        let m = self.space.m();
        for ((a, c), pi) in cusp_parabolics(self.level) {
            let t = (pi[0] * a + pi[1] * c, pi[2] * a + pi[3] * c);
            let v = self.eval_path(vals, (a, c), t);
            let pm = mat_sub(&QQ, &self.space.coeff.act(&pi), &identity(&QQ, m));
            let mut aug = pm.clone();
            let r0 = rank(&QQ, &pm);
            aug = Mat::from_fn(m, m + 1, |i, j| if j < m { aug.at(i, j).clone() } else { v[i].clone() });
            if rank(&QQ, &aug) != r0 {
                return false;
            }
        }
        true
    }

    pub fn summary(&self) -> Result<SpaceSummary> {
        let cusp = self.cuspidal_coords()?;
        let q = smallest_good_prime(self.level);
        let t = self.hecke(q)?;
        let cp = charpoly(&QQ, &t);
        Ok(SpaceSummary {
            level: self.level,
            weight: self.weight,
            dim: self.dim(),
            cusp_dim: cusp.cols,
            cusp_plus: self.sign_part(&cusp, 1)?.cols,
            cusp_minus: self.sign_part(&cusp, -1)?.cols,
            q,
            hecke_charpoly: cp.iter().map(|c| c.to_string()).collect(),
            squarefree: is_squarefree(self.level),
        })
    }
}

/// Operator tags for `hecke_matrix`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeckeTag {
    T(i64),
    U(i64),
    /// Diamond-type operator; trivial character here.
    S(i64),
    W,
    Iota,
}

pub type ManinSymbolSpace = ClassicalSpace;

#[derive(Clone, Debug, Serialize)]
pub struct HeckeOperatorMatrix {
    pub tag: HeckeTag,
    pub matrix: Vec<Vec<String>>,
}

pub fn mat_strings(m: &Mat<BigRational>) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect()
}

impl ClassicalSpace {
    pub fn hecke_matrix(&self, tag: HeckeTag) -> Result<Mat<BigRational>> {
        let n = self.level;
        match tag {
            HeckeTag::T(q) if q > 1 && n % q != 0 => self.restrict(&self.space.operator(&hecke_terms(q))),
            HeckeTag::U(p) if p > 1 && n % p == 0 => self.restrict(&self.space.operator(&up_terms(p))),
            HeckeTag::S(q) if q > 1 && n % q != 0 => Ok(identity(&QQ, self.dim())),
            HeckeTag::W if is_squarefree(n) => self.atkin_lehner(),
            HeckeTag::W => Err(Error::Unsupported(format!("level {} is not square-free", n))),
            HeckeTag::Iota => self.iota(),
            _ => Err(Error::Domain(format!("{:?} is incompatible with level {}", tag, n))),
        }
    }

    /// W^2 = (-N)^{n + 2 lambda2}, the action of alpha^2 = -N.
    pub fn w_square_scalar(&self) -> BigRational {
        let nn = BigRational::from_integer((-self.level).into());
        let w = self.weight.n() + 2 * self.weight.lambda2;
        let a = if w >= 0 { num_traits::pow(nn.clone(), w as usize) } else { num_traits::pow(nn.recip(), (-w) as usize) };
        a
    }

    /// (plus, minus) bases of the iota eigenspaces of the whole space.
    pub fn epsilon_decompose(&self) -> Result<(Mat<BigRational>, Mat<BigRational>)> {
        let all = identity(&QQ, self.dim());
        Ok((self.sign_part(&all, 1)?, self.sign_part(&all, -1)?))
    }

    pub fn dump(&self, tags: &[HeckeTag]) -> Result<SpaceDump> {
        let mut ops = Vec::new();
        for &t in tags {
            ops.push(HeckeOperatorMatrix { tag: t, matrix: mat_strings(&self.hecke_matrix(t)?) });
        }
        Ok(SpaceDump {
            level: self.level,
            weight: self.weight,
            dim: self.dim(),
            cuspidal_basis: mat_strings(&self.cuspidal_coords()?.transpose()),
            operators: ops,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceDump {
    pub level: i64,
    pub weight: WeightPoint,
    pub dim: usize,
    /// Rows are cuspidal basis vectors in space coordinates.
    pub cuspidal_basis: Vec<Vec<String>>,
    pub operators: Vec<HeckeOperatorMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceSummary {
    pub level: i64,
    pub weight: WeightPoint,
    pub dim: usize,
    pub cusp_dim: usize,
    pub cusp_plus: usize,
    pub cusp_minus: usize,
    pub q: i64,
    /// Coefficients of det(X - T_q), low degree first.
    pub hecke_charpoly: Vec<String>,
    pub squarefree: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_formula() {
        assert_eq!(dim_cusp_forms(11, 2), 1);
        assert_eq!(dim_cusp_forms(33, 2), 3);
        assert_eq!(dim_cusp_forms(1, 12), 1);
        assert_eq!(dim_cusp_forms(1, 10), 0);
        assert_eq!(dim_cusp_forms(14, 2), 1);
        assert_eq!(dim_cusp_forms(15, 2), 1);
        assert_eq!(dim_cusp_forms(11, 4), 2);
    }
}
