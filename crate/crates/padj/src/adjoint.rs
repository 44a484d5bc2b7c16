//! Scalar-product ideals, Noether differents and the adjoint L-ideal for a
//! finite free algebra T over R = Q[w]/(g).
//!
//! R-elements are coefficient vectors in w (low first, length deg g). An
//! element of T is either R-level (`Vec<V>`, one R-coefficient per basis
//! vector e_i) or flat over Q (index i * deg g + a for e_i w^a). All ideal
//! questions become exact linear algebra over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{charpoly, nullspace, Mat, Ring, QQ};

pub type Q = BigRational;
pub type V = Vec<Q>;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

/// A Q-subspace stored as reduced row echelon rows.
#[derive(Clone, Debug, PartialEq)]
pub struct QSpace {
    pub ambient: usize,
    pub basis: Vec<V>,
    pivots: Vec<usize>,
}

impl QSpace {
    pub fn span(ambient: usize, gens: &[V]) -> QSpace {
        if gens.is_empty() {
            return QSpace::zero(ambient);
        }
        let mut m = Mat::from_rows(gens.to_vec());
        let piv = crate::ring::rref(&QQ, &mut m);
        let basis = (0..piv.len()).map(|i| m.row(i)).collect();
        QSpace { ambient, basis, pivots: piv }
    }
    pub fn zero(ambient: usize) -> QSpace {
        QSpace { ambient, basis: vec![], pivots: vec![] }
    }
    pub fn whole(ambient: usize) -> QSpace {
        let gens: Vec<V> = (0..ambient).map(|i| unit_vec(ambient, i)).collect();
        QSpace::span(ambient, &gens)
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    /// Remainder of v against the basis; zero iff v lies in the space.
    pub fn reduce(&self, v: &[Q]) -> V {
        let mut v = v.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let f = v[c].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        v
    }
    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
    pub fn contains_space(&self, o: &QSpace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }
    pub fn sum(&self, o: &QSpace) -> QSpace {
        let mut g = self.basis.clone();
        g.extend(o.basis.iter().cloned());
        QSpace::span(self.ambient, &g)
    }
    /// {y : b . y = 0 for every basis vector b}.
    pub fn annihilator(&self) -> QSpace {
        if self.basis.is_empty() {
            return QSpace::whole(self.ambient);
        }
        let m = Mat::from_rows(self.basis.clone());
        QSpace::span(self.ambient, &nullspace(&QQ, &m))
    }
    pub fn intersect(&self, o: &QSpace) -> QSpace {
        self.annihilator().sum(&o.annihilator()).annihilator()
    }
    /// Coordinates of a complement: the non-pivot entries of the remainder.
    fn quotient_coords(&self, v: &[Q]) -> V {
        let r = self.reduce(v);
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).map(|c| r[c].clone()).collect()
    }
    fn complement_basis(&self) -> Vec<V> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).map(|c| unit_vec(self.ambient, c)).collect()
    }
}

fn unit_vec(n: usize, i: usize) -> V {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// R = Q[w]/(g) with g monic of degree at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseRing {
    pub modulus: V,
}

impl BaseRing {
    pub fn new(modulus: V) -> Result<BaseRing> {
        if modulus.len() < 2 || !modulus.last().unwrap().is_one() {
            return Err(Error::Invalid("base modulus must be monic of degree >= 1".into()));
        }
        Ok(BaseRing { modulus })
    }
    /// R = Q.
    pub fn rational() -> BaseRing {
        BaseRing { modulus: vec![Q::zero(), Q::one()] }
    }
    /// Q[w]/(w^m).
    pub fn truncated(m: usize) -> BaseRing {
        let mut g = vec![Q::zero(); m + 1];
        g[m] = Q::one();
        BaseRing { modulus: g }
    }
    pub fn dim(&self) -> usize {
        self.modulus.len() - 1
    }
    pub fn reduce(&self, f: &[Q]) -> V {
        let d = self.dim();
        let mut f = f.to_vec();
        for i in (d..f.len()).rev() {
            if f[i].is_zero() {
                continue;
            }
            let c = f[i].clone();
            for j in 0..=d {
                f[i - d + j] -= &c * &self.modulus[j];
            }
        }
        f.resize(d, Q::zero());
        f.truncate(d);
        f
    }
    pub fn scalar(&self, c: Q) -> V {
        let mut v = vec![Q::zero(); self.dim()];
        v[0] = c;
        v
    }
    pub fn w(&self) -> V {
        self.reduce(&[Q::zero(), Q::one()])
    }
    pub fn eval(&self, a: &[Q], w0: &Q) -> Q {
        a.iter().rev().fold(Q::zero(), |acc, c| acc * w0 + c)
    }
    pub fn is_root(&self, w0: &Q) -> bool {
        self.eval(&self.modulus, w0).is_zero()
    }
    /// Q[w]/(h) for a monic h dividing g; reduction R -> R' is `reduce` by h.
    pub fn quotient(&self, h: V) -> Result<BaseRing> {
        let r = BaseRing::new(h)?;
        if r.reduce(&self.modulus).iter().any(|c| !c.is_zero()) {
            return Err(Error::Invalid("new modulus must divide the old one".into()));
        }
        Ok(r)
    }
}

impl Ring for BaseRing {
    type El = V;
    fn zero(&self) -> V {
        vec![Q::zero(); self.dim()]
    }
    fn one(&self) -> V {
        self.scalar(Q::one())
    }
    fn add(&self, a: &V, b: &V) -> V {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn neg(&self, a: &V) -> V {
        a.iter().map(|x| -x).collect()
    }
    fn mul(&self, a: &V, b: &V) -> V {
        let mut out = vec![Q::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(&out)
    }
    fn from_i64(&self, x: i64) -> V {
        self.scalar(qi(x))
    }
    fn is_zero(&self, a: &V) -> bool {
        a.iter().all(|x| x.is_zero())
    }
    fn from_bigint(&self, x: &BigInt) -> V {
        self.scalar(Q::from_integer(x.clone()))
    }
}

/// Commutative R-algebra, free of rank `rank`, with e_i e_j = sum_k mult[i][j][k] e_k.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub base: BaseRing,
    pub rank: usize,
    pub mult: Vec<Vec<Vec<V>>>,
    pub unit: Vec<V>,
}

impl FiniteAlgebra {
    pub fn new(base: BaseRing, rank: usize, mult: Vec<Vec<Vec<V>>>, unit: Vec<V>) -> Result<FiniteAlgebra> {
        let r = &base;
        let fix = |x: &V| r.reduce(x);
        if mult.len() != rank || mult.iter().any(|m| m.len() != rank || m.iter().any(|c| c.len() != rank)) || unit.len() != rank {
            return Err(Error::Invalid("multiplication tensor has the wrong shape".into()));
        }
        let mult = mult.iter().map(|a| a.iter().map(|b| b.iter().map(fix).collect()).collect()).collect();
        let unit = unit.iter().map(fix).collect();
        let t = FiniteAlgebra { base, rank, mult, unit };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let n = self.rank;
        let e = |i: usize| self.basis_r(i);
        for i in 0..n {
            if self.mul_r(&self.unit, &e(i)) != e(i) {
                return Err(Error::Invalid("unit law fails".into()));
            }
            for j in 0..n {
                if self.mult[i][j] != self.mult[j][i] {
                    return Err(Error::Invalid("multiplication is not commutative".into()));
                }
                for k in 0..n {
                    let a = self.mul_r(&self.mul_r(&e(i), &e(j)), &e(k));
                    let b = self.mul_r(&e(i), &self.mul_r(&e(j), &e(k)));
                    if a != b {
                        return Err(Error::Invalid("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// T = R[y]/(f) with f monic in y (R-coefficients, low first); basis 1, y, ..., y^{n-1}.
    pub fn monogenic(base: BaseRing, f: &[V]) -> Result<FiniteAlgebra> {
        let n = f.len() - 1;
        if n == 0 || !base.is_zero(&base.sub(&f[n], &base.one())) {
            return Err(Error::Invalid("monogenic polynomial must be monic of degree >= 1".into()));
        }
        let r = base.clone();
        // y^m reduced for m < 2n - 1
        let mut pows: Vec<Vec<V>> = Vec::new();
        let mut cur = vec![r.zero(); n];
        cur[0] = r.one();
        for _ in 0..2 * n - 1 {
            pows.push(cur.clone());
            // multiply by y
            let top = cur[n - 1].clone();
            let mut next = vec![r.zero(); n];
            for i in (1..n).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..n {
                next[i] = r.sub(&next[i], &r.mul(&top, &f[i]));
            }
            cur = next;
        }
        let mult = (0..n).map(|i| (0..n).map(|j| pows[i + j].clone()).collect()).collect();
        FiniteAlgebra::new(base, n, mult, pows[0].clone())
    }

    /// Product algebra A x B (same base).
    pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        if a.base != b.base {
            return Err(Error::Invalid("product needs a common base".into()));
        }
        let r = &a.base;
        let n = a.rank + b.rank;
        let mut mult = vec![vec![vec![r.zero(); n]; n]; n];
        for i in 0..a.rank {
            for j in 0..a.rank {
                for k in 0..a.rank {
                    mult[i][j][k] = a.mult[i][j][k].clone();
                }
            }
        }
        for i in 0..b.rank {
            for j in 0..b.rank {
                for k in 0..b.rank {
                    mult[a.rank + i][a.rank + j][a.rank + k] = b.mult[i][j][k].clone();
                }
            }
        }
        let mut unit = a.unit.clone();
        unit.extend(b.unit.iter().cloned());
        FiniteAlgebra::new(a.base.clone(), n, mult, unit)
    }

    pub fn dim_q(&self) -> usize {
        self.rank * self.base.dim()
    }
    pub fn basis_r(&self, i: usize) -> Vec<V> {
        let r = &self.base;
        (0..self.rank).map(|k| if k == i { r.one() } else { r.zero() }).collect()
    }
    pub fn flat(&self, x: &[V]) -> V {
        x.iter().flat_map(|c| c.iter().cloned()).collect()
    }
    pub fn unflat(&self, v: &[Q]) -> Vec<V> {
        v.chunks(self.base.dim()).map(|c| c.to_vec()).collect()
    }
    pub fn mul_r(&self, x: &[V], y: &[V]) -> Vec<V> {
        let r = &self.base;
        let mut out = vec![r.zero(); self.rank];
        for i in 0..self.rank {
            if r.is_zero(&x[i]) {
                continue;
            }
            for j in 0..self.rank {
                if r.is_zero(&y[j]) {
                    continue;
                }
                let xy = r.mul(&x[i], &y[j]);
                for k in 0..self.rank {
                    out[k] = r.add(&out[k], &r.mul(&xy, &self.mult[i][j][k]));
                }
            }
        }
        out
    }
    pub fn mul_q(&self, x: &[Q], y: &[Q]) -> V {
        self.flat(&self.mul_r(&self.unflat(x), &self.unflat(y)))
    }
    pub fn one_q(&self) -> V {
        self.flat(&self.unit)
    }
    /// r * 1_T.
    pub fn from_r(&self, a: &V) -> Vec<V> {
        self.unit.iter().map(|u| self.base.mul(a, u)).collect()
    }
    pub fn mult_matrix(&self, x: &[Q]) -> Mat<Q> {
        let d = self.dim_q();
        let cols: Vec<V> = (0..d).map(|j| self.mul_q(x, &unit_vec(d, j))).collect();
        Mat::from_cols(&cols)
    }
    /// The ideal generated by `gens`.
    pub fn ideal(&self, gens: &[V]) -> QSpace {
        let d = self.dim_q();
        let mut all = Vec::new();
        for g in gens {
            for j in 0..d {
                all.push(self.mul_q(g, &unit_vec(d, j)));
            }
        }
        QSpace::span(d, &all)
    }
    pub fn is_ideal(&self, s: &QSpace) -> bool {
        let d = self.dim_q();
        s.basis.iter().all(|g| (0..d).all(|j| s.contains(&self.mul_q(g, &unit_vec(d, j)))))
    }
    pub fn trace_q(&self, x: &[Q]) -> Q {
        let m = self.mult_matrix(x);
        (0..m.rows).fold(Q::zero(), |acc, i| acc + m.at(i, i))
    }
    /// Nilradical: the kernel of the Q-trace form (characteristic zero).
    pub fn radical(&self) -> QSpace {
        let d = self.dim_q();
        let m = Mat::from_fn(d, d, |i, j| self.trace_q(&self.mul_q(&unit_vec(d, i), &unit_vec(d, j))));
        QSpace::span(d, &nullspace(&QQ, &m))
    }
    /// T' = T tensor_R R' for a quotient R' of R.
    pub fn base_change(&self, base: &BaseRing) -> Result<FiniteAlgebra> {
        let mult = self.mult.iter().map(|a| a.iter().map(|b| b.iter().map(|c| base.reduce(c)).collect()).collect()).collect();
        let unit = self.unit.iter().map(|c| base.reduce(c)).collect();
        FiniteAlgebra::new(base.clone(), self.rank, mult, unit)
    }
    /// Image of a flat element under T -> T'.
    pub fn reduce_to(&self, other: &FiniteAlgebra, x: &[Q]) -> V {
        let rx = self.unflat(x);
        other.flat(&rx.iter().map(|c| other.base.reduce(c)).collect::<Vec<_>>())
    }

    // -- T tensor_R T, R-level index i * n + j --

    fn tt_dim(&self) -> usize {
        self.rank * self.rank * self.base.dim()
    }
    fn tt_unflat(&self, v: &[Q]) -> Vec<V> {
        v.chunks(self.base.dim()).map(|c| c.to_vec()).collect()
    }
    fn tt_flat(&self, x: &[V]) -> V {
        x.iter().flat_map(|c| c.iter().cloned()).collect()
    }
    fn tt_mul(&self, x: &[V], y: &[V]) -> Vec<V> {
        let n = self.rank;
        let r = &self.base;
        let mut out = vec![r.zero(); n * n];
        for a in 0..n * n {
            if r.is_zero(&x[a]) {
                continue;
            }
            let (i, j) = (a / n, a % n);
            for b in 0..n * n {
                if r.is_zero(&y[b]) {
                    continue;
                }
                let (k, l) = (b / n, b % n);
                let c = r.mul(&x[a], &y[b]);
                for s in 0..n {
                    if r.is_zero(&self.mult[i][k][s]) {
                        continue;
                    }
                    let cs = r.mul(&c, &self.mult[i][k][s]);
                    for t in 0..n {
                        if r.is_zero(&self.mult[j][l][t]) {
                            continue;
                        }
                        out[s * n + t] = r.add(&out[s * n + t], &r.mul(&cs, &self.mult[j][l][t]));
                    }
                }
            }
        }
        out
    }
    fn tt_mul_q(&self, x: &[Q], y: &[Q]) -> V {
        self.tt_flat(&self.tt_mul(&self.tt_unflat(x), &self.tt_unflat(y)))
    }
    /// x tensor y for R-level x, y.
    fn pure(&self, x: &[V], y: &[V]) -> Vec<V> {
        let n = self.rank;
        let r = &self.base;
        (0..n * n).map(|a| r.mul(&x[a / n], &y[a % n])).collect()
    }
    /// The multiplication map m : T tensor T -> T as a Q-matrix.
    fn m_matrix(&self) -> Mat<Q> {
        let cols: Vec<V> = (0..self.tt_dim()).map(|c| self.m_apply(&unit_vec(self.tt_dim(), c))).collect();
        Mat::from_cols(&cols)
    }
    fn m_apply(&self, v: &[Q]) -> V {
        let n = self.rank;
        let x = self.tt_unflat(v);
        let r = &self.base;
        let mut out = vec![r.zero(); n];
        for a in 0..n * n {
            if r.is_zero(&x[a]) {
                continue;
            }
            for k in 0..n {
                out[k] = r.add(&out[k], &r.mul(&x[a], &self.mult[a / n][a % n][k]));
            }
        }
        self.flat(&out)
    }
    /// e_i tensor 1 - 1 tensor e_i, which generate I.
    fn standard_generators(&self) -> Vec<Vec<V>> {
        (0..self.rank)
            .map(|i| {
                let a = self.pure(&self.basis_r(i), &self.unit);
                let b = self.pure(&self.unit, &self.basis_r(i));
                a.iter().zip(&b).map(|(x, y)| self.base.sub(x, y)).collect()
            })
            .collect()
    }
}

/// Q-matrix of a linear map given on basis vectors.
fn matrix_of(dim_in: usize, f: impl Fn(&V) -> V) -> Mat<Q> {
    let cols: Vec<V> = (0..dim_in).map(|c| f(&unit_vec(dim_in, c))).collect();
    Mat::from_cols(&cols)
}

fn stack(ms: &[Mat<Q>]) -> Mat<Q> {
    let mut rows = Vec::new();
    for m in ms {
        for i in 0..m.rows {
            rows.push(m.row(i));
        }
    }
    Mat::from_rows(rows)
}

/// I = ker(m) inside T tensor_R T.
#[derive(Clone, Debug)]
pub struct MultiplicationKernel {
    pub space: QSpace,
    /// The elements t tensor 1 - 1 tensor t generate I as an ideal.
    pub standard_spans: bool,
}

pub fn kernel_of_multiplication(t: &FiniteAlgebra) -> Result<MultiplicationKernel> {
    let m = t.m_matrix();
    let d2 = t.tt_dim();
    let space = QSpace::span(d2, &nullspace(&QQ, &m));
    for v in &space.basis {
        if t.m_apply(v).iter().any(|x| !x.is_zero()) {
            return Err(Error::Contract("kernel vector not killed by m".into()));
        }
    }
    let gens: Vec<V> = t.standard_generators().iter().map(|g| t.tt_flat(g)).collect();
    let mut all = Vec::new();
    for g in &gens {
        for c in 0..d2 {
            all.push(t.tt_mul_q(g, &unit_vec(d2, c)));
        }
    }
    let std_ideal = QSpace::span(d2, &all);
    Ok(MultiplicationKernel { standard_spans: std_ideal == space, space })
}

/// (T tensor T)[I].
fn tt_torsion(t: &FiniteAlgebra) -> QSpace {
    let d2 = t.tt_dim();
    let ms: Vec<Mat<Q>> = t
        .standard_generators()
        .iter()
        .map(|g| {
            let gf = t.tt_flat(g);
            matrix_of(d2, |v| t.tt_mul_q(&gf, v))
        })
        .collect();
    QSpace::span(d2, &nullspace(&QQ, &stack(&ms)))
}

/// Noether's different m((T tensor T)[I]).
pub fn noether_different(t: &FiniteAlgebra) -> Result<QSpace> {
    let tor = tt_torsion(t);
    let img: Vec<V> = tor.basis.iter().map(|v| t.m_apply(v)).collect();
    let d = QSpace::span(t.dim_q(), &img);
    if !t.is_ideal(&d) {
        return Err(Error::Contract("image of the I-torsion is not an ideal".into()));
    }
    Ok(d)
}

/// A T-module, free of rank `rank` over R; action[k][b][a] is the m_b
/// coefficient of e_k m_a.
#[derive(Clone, Debug)]
pub struct FiniteModule {
    pub rank: usize,
    pub action: Vec<Vec<Vec<V>>>,
}

impl FiniteModule {
    pub fn new(t: &FiniteAlgebra, rank: usize, action: Vec<Vec<Vec<V>>>) -> Result<FiniteModule> {
        let action = action.iter().map(|a| a.iter().map(|row| row.iter().map(|c| t.base.reduce(c)).collect()).collect()).collect();
        let m = FiniteModule { rank, action };
        m.check(t)?;
        Ok(m)
    }
    /// T acting on itself.
    pub fn regular(t: &FiniteAlgebra) -> FiniteModule {
        let n = t.rank;
        let action = (0..n).map(|k| (0..n).map(|b| (0..n).map(|a| t.mult[k][a][b].clone()).collect()).collect()).collect();
        FiniteModule { rank: n, action }
    }
    /// Hom_R(T, R) with the transpose action, dual basis e_b^*.
    pub fn dual(t: &FiniteAlgebra) -> FiniteModule {
        let n = t.rank;
        let action = (0..n).map(|k| (0..n).map(|b| (0..n).map(|a| t.mult[k][b][a].clone()).collect()).collect()).collect();
        FiniteModule { rank: n, action }
    }
    fn act(&self, r: &BaseRing, k: usize, m: &[V]) -> Vec<V> {
        (0..self.rank)
            .map(|b| (0..self.rank).fold(r.zero(), |acc, a| r.add(&acc, &r.mul(&self.action[k][b][a], &m[a]))))
            .collect()
    }
    /// Action of an R-level element of T.
    fn act_elt(&self, t: &FiniteAlgebra, x: &[V], m: &[V]) -> Vec<V> {
        let r = &t.base;
        let mut out = vec![r.zero(); self.rank];
        for k in 0..t.rank {
            if r.is_zero(&x[k]) {
                continue;
            }
            let y = self.act(r, k, m);
            for b in 0..self.rank {
                out[b] = r.add(&out[b], &r.mul(&x[k], &y[b]));
            }
        }
        out
    }
    fn check(&self, t: &FiniteAlgebra) -> Result<()> {
        let r = &t.base;
        if self.action.len() != t.rank {
            return Err(Error::Invalid("one action matrix per basis element of T".into()));
        }
        for a in 0..self.rank {
            let ma: Vec<V> = (0..self.rank).map(|b| if a == b { r.one() } else { r.zero() }).collect();
            if self.act_elt(t, &t.unit, &ma) != ma {
                return Err(Error::Invalid("unit does not act as the identity".into()));
            }
            for i in 0..t.rank {
                for j in 0..t.rank {
                    let lhs = self.act(r, i, &self.act(r, j, &ma));
                    let rhs = self.act_elt(t, &t.mul_r(&t.basis_r(i), &t.basis_r(j)), &ma);
                    if lhs != rhs {
                        return Err(Error::Invalid("action matrices do not satisfy the relations of T".into()));
                    }
                }
            }
        }
        Ok(())
    }
    // M tensor_R T, R-level index a * n + i
    fn mt_dim(&self, t: &FiniteAlgebra) -> usize {
        self.rank * t.rank * t.base.dim()
    }
    /// (M tensor T)[I].
    fn torsion(&self, t: &FiniteAlgebra) -> QSpace {
        let n = t.rank;
        let r = &t.base;
        let dm = self.mt_dim(t);
        let ms: Vec<Mat<Q>> = (0..n)
            .map(|k| {
                matrix_of(dm, |v| {
                    let x: Vec<V> = v.chunks(r.dim()).map(|c| c.to_vec()).collect();
                    let mut out = vec![r.zero(); self.rank * n];
                    for a in 0..self.rank {
                        for i in 0..n {
                            let c = &x[a * n + i];
                            if r.is_zero(c) {
                                continue;
                            }
                            // (e_k m_a) tensor e_i
                            for b in 0..self.rank {
                                out[b * n + i] = r.add(&out[b * n + i], &r.mul(c, &self.action[k][b][a]));
                            }
                            // - m_a tensor e_k e_i
                            for s in 0..n {
                                out[a * n + s] = r.sub(&out[a * n + s], &r.mul(c, &t.mult[k][i][s]));
                            }
                        }
                    }
                    out.iter().flat_map(|c| c.iter().cloned()).collect()
                })
            })
            .collect();
        QSpace::span(dm, &nullspace(&QQ, &stack(&ms)))
    }
}

/// phi(m, n) = m^T G n with G over R.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub gram: Vec<Vec<V>>,
}

impl Pairing {
    /// phi(x, y) = lambda(x y) on the regular module.
    pub fn from_functional(t: &FiniteAlgebra, lambda: &[V]) -> Pairing {
        let r = &t.base;
        let gram = (0..t.rank)
            .map(|a| {
                (0..t.rank)
                    .map(|b| {
                        let p = t.mul_r(&t.basis_r(a), &t.basis_r(b));
                        (0..t.rank).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(&p[k], &lambda[k])))
                    })
                    .collect()
            })
            .collect();
        Pairing { gram }
    }
    pub fn zero(t: &FiniteAlgebra, rm: usize, rn: usize) -> Pairing {
        Pairing { gram: vec![vec![t.base.zero(); rn]; rm] }
    }
    /// phi(e_k m, n) = phi(m, e_k n) on basis vectors.
    pub fn check_equivariant(&self, t: &FiniteAlgebra, m: &FiniteModule, n: &FiniteModule) -> Result<()> {
        let r = &t.base;
        if self.gram.len() != m.rank || self.gram.iter().any(|row| row.len() != n.rank) {
            return Err(Error::Invalid("pairing matrix has the wrong shape".into()));
        }
        for k in 0..t.rank {
            for a in 0..m.rank {
                for b in 0..n.rank {
                    // sum_c A_k[c][a] G[c][b] vs sum_c G[a][c] B_k[c][b]
                    let lhs = (0..m.rank).fold(r.zero(), |acc, c| r.add(&acc, &r.mul(&m.action[k][c][a], &self.gram[c][b])));
                    let rhs = (0..n.rank).fold(r.zero(), |acc, c| r.add(&acc, &r.mul(&self.gram[a][c], &n.action[k][c][b])));
                    if lhs != rhs {
                        return Err(Error::Invalid("pairing is not T-equivariant".into()));
                    }
                }
            }
        }
        Ok(())
    }
    /// Nondegenerate over R: det G is a unit of R.
    pub fn is_nondegenerate(&self, r: &BaseRing) -> bool {
        let g = Mat::from_rows(self.gram.clone());
        if g.rows != g.cols {
            return false;
        }
        let cp = charpoly(r, &g);
        let det = if g.rows % 2 == 0 { cp[0].clone() } else { r.neg(&cp[0]) };
        // a unit of Q[w]/(g) is coprime to g: multiplication by it is invertible
        let d = r.dim();
        let m = Mat::from_cols(&(0..d).map(|j| r.mul(&det, &unit_vec(d, j))).collect::<Vec<_>>());
        crate::ring::rank(&QQ, &m) == d
    }
}

/// d_phi(T/R) = phi_T((M tensor T)[I], (N tensor T)[I]).
pub fn scalar_product_ideal(t: &FiniteAlgebra, m: &FiniteModule, n: &FiniteModule, phi: &Pairing) -> Result<QSpace> {
    phi.check_equivariant(t, m, n)?;
    let r = &t.base;
    let tm = m.torsion(t);
    let tn = n.torsion(t);
    let split = |v: &V, rank: usize| -> Vec<Vec<V>> {
        let rv: Vec<V> = v.chunks(r.dim()).map(|c| c.to_vec()).collect();
        (0..rank).map(|a| rv[a * t.rank..(a + 1) * t.rank].to_vec()).collect()
    };
    let mut vals = Vec::new();
    for x in &tm.basis {
        let xs = split(x, m.rank);
        for y in &tn.basis {
            let ys = split(y, n.rank);
            let mut acc = vec![r.zero(); t.rank];
            for a in 0..m.rank {
                for b in 0..n.rank {
                    if r.is_zero(&phi.gram[a][b]) {
                        continue;
                    }
                    let p = t.mul_r(&t.mul_r(&t.from_r(&phi.gram[a][b]), &xs[a]), &ys[b]);
                    acc = acc.iter().zip(&p).map(|(u, v)| r.add(u, v)).collect();
                }
            }
            vals.push(t.flat(&acc));
        }
    }
    Ok(t.ideal(&vals))
}

fn random_combo(rng: &mut ChaCha8Rng, basis: &[V]) -> V {
    let mut v = vec![Q::zero(); basis[0].len()];
    for b in basis {
        let c = qi(rng.gen_range(-4..5));
        for (x, y) in v.iter_mut().zip(b) {
            *x += &c * y;
        }
    }
    v
}

/// A generator g of the ideal J with J = gT, or None. Basis vectors are
/// tried first, then seeded random combinations (a generic element of a
/// principal ideal generates it).
pub fn principal_generator(t: &FiniteAlgebra, j: &QSpace) -> Option<V> {
    if j.dim() == 0 {
        return Some(vec![Q::zero(); t.dim_q()]);
    }
    for b in &j.basis {
        if t.ideal(std::slice::from_ref(b)).dim() == j.dim() {
            return Some(b.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..48 {
        let g = random_combo(&mut rng, &j.basis);
        if t.ideal(std::slice::from_ref(&g)).dim() == j.dim() {
            return Some(g);
        }
    }
    None
}

/// Smallest k for which k seeded random elements generate J, with those elements.
pub fn minimal_generators(t: &FiniteAlgebra, j: &QSpace) -> Vec<V> {
    if j.dim() == 0 {
        return vec![];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 1..=j.dim() {
        for _ in 0..32 {
            let gens: Vec<V> = (0..k).map(|_| random_combo(&mut rng, &j.basis)).collect();
            if t.ideal(&gens).dim() == j.dim() {
                return gens;
            }
        }
    }
    j.basis.clone()
}

/// Element t with g t = b, when it exists.
pub fn divide(t: &FiniteAlgebra, b: &[Q], g: &[Q]) -> Option<V> {
    let m = t.mult_matrix(g);
    let x = crate::ring::solve(&QQ, &m, &Mat::from_cols(&[b.to_vec()]))?;
    let c = x.col(0);
    if t.mul_q(g, &c) != b {
        return None;
    }
    Some(c)
}

/// An algebra map T -> Q: w goes to `w`, e_i to `values[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraPoint {
    pub w: Q,
    pub values: Vec<Q>,
}

impl AlgebraPoint {
    pub fn eval(&self, t: &FiniteAlgebra, x: &[Q]) -> Q {
        t.unflat(x).iter().zip(&self.values).fold(Q::zero(), |acc, (c, v)| acc + t.base.eval(c, &self.w) * v)
    }
    pub fn check(&self, t: &FiniteAlgebra) -> Result<()> {
        let bad = |s: &str| Err(Error::Invalid(format!("not an algebra map: {}", s)));
        if self.values.len() != t.rank {
            return bad("wrong number of values");
        }
        if !t.base.is_root(&self.w) {
            return bad("w is not a root of the base modulus");
        }
        if !self.eval(t, &t.one_q()).is_one() {
            return bad("1 does not map to 1");
        }
        for i in 0..t.rank {
            for j in 0..t.rank {
                let p = t.flat(&t.mul_r(&t.basis_r(i), &t.basis_r(j)));
                if self.eval(t, &p) != &self.values[i] * &self.values[j] {
                    return bad("not multiplicative");
                }
            }
        }
        Ok(())
    }
    /// The kernel, a maximal ideal with residue field Q.
    pub fn ideal(&self, t: &FiniteAlgebra) -> QSpace {
        let d = t.dim_q();
        let row: V = (0..d).map(|c| self.eval(t, &unit_vec(d, c))).collect();
        QSpace::span(d, &nullspace(&QQ, &Mat::from_rows(vec![row])))
    }
}

/// Ramified at the point iff the point kills every generator of d_N.
pub fn ramification_test(t: &FiniteAlgebra, pt: &AlgebraPoint) -> Result<bool> {
    pt.check(t)?;
    let dn = noether_different(t)?;
    Ok(dn.basis.iter().all(|g| pt.eval(t, g).is_zero()))
}

/// Ramified at a maximal ideal m iff m contains d_N.
pub fn is_ramified_at(t: &FiniteAlgebra, m: &QSpace) -> Result<bool> {
    Ok(m.contains_space(&noether_different(t)?))
}

/// Jacobian-criterion oracle: T/R is unramified at m iff
/// Omega_{T/R} tensor k(m) = 0, with Omega = I/I^2, i.e. I = I^2 + (m tensor 1) I.
pub fn kahler_unramified(t: &FiniteAlgebra, m: &QSpace) -> Result<bool> {
    let i = kernel_of_multiplication(t)?.space;
    let d2 = t.tt_dim();
    let mut gens = Vec::new();
    for a in &i.basis {
        for b in &i.basis {
            gens.push(t.tt_mul_q(a, b));
        }
        for x in &m.basis {
            let x1 = t.tt_flat(&t.pure(&t.unflat(x), &t.unit));
            gens.push(t.tt_mul_q(&x1, a));
        }
    }
    let s = QSpace::span(d2, &gens);
    Ok(s.contains_space(&i))
}

/// Is T/m a field? Decided through an element whose characteristic
/// polynomial on T/m is irreducible (residue degree at most 3).
pub fn is_maximal(t: &FiniteAlgebra, m: &QSpace) -> Result<bool> {
    if !t.is_ideal(m) {
        return Ok(false);
    }
    let comp = m.complement_basis();
    let d = comp.len();
    if d == 0 {
        return Ok(false);
    }
    if d > 3 {
        return Err(Error::Unsupported("residue fields of degree above 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for attempt in 0..24 {
        let a = if attempt < d { comp[attempt].clone() } else { random_combo(&mut rng, &comp) };
        let cols: Vec<V> = comp.iter().map(|b| m.quotient_coords(&t.mul_q(&a, b))).collect();
        let cp = charpoly(&QQ, &Mat::from_cols(&cols));
        if irreducible_small(&cp) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Irreducibility over Q for degree <= 3: no rational root.
fn irreducible_small(f: &[Q]) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.iter().map(|c| (c * Q::from_integer(den.clone())).to_integer()).collect();
    if ints[0].is_zero() {
        return false;
    }
    let divisors = |x: &BigInt| -> Option<Vec<BigInt>> {
        let x = x.abs().to_u64()?;
        if x > 1 << 40 {
            return None;
        }
        let mut out = Vec::new();
        let mut i = 1u64;
        while i * i <= x {
            if x % i == 0 {
                out.push(BigInt::from(i));
                out.push(BigInt::from(x / i));
            }
            i += 1;
        }
        Some(out)
    };
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(&ints[d])) else { return false };
    for p in &ps {
        for q in &qs {
            for s in [1i64, -1] {
                let r = Q::new(p * s, q.clone());
                if f.iter().rev().fold(Q::zero(), |acc, c| acc * &r + c).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Each listed ideal is maximal, they are distinct, and their intersection
/// is the nilradical, so the list is every maximal ideal of T.
pub fn check_maximal_ideals(t: &FiniteAlgebra, ms: &[QSpace]) -> Result<()> {
    let mut inter = QSpace::whole(t.dim_q());
    for (k, m) in ms.iter().enumerate() {
        if !is_maximal(t, m)? {
            return Err(Error::Invalid(format!("ideal {} is not maximal", k)));
        }
        if ms[..k].contains(m) {
            return Err(Error::Invalid(format!("ideal {} is listed twice", k)));
        }
        inter = inter.intersect(m);
    }
    if inter != t.radical() {
        return Err(Error::Invalid("the listed maximal ideals are not all of them".into()));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct AdjointL {
    pub generator: V,
    /// Row k: t_k with generator * t_k = k-th basis vector of the ideal.
    pub certificate: Vec<V>,
    pub ideal: QSpace,
}

/// Generator of d_phi for rank-one modules; errors with a minimal generating
/// set when the ideal is not principal.
pub fn adjoint_l_generator(t: &FiniteAlgebra, mp: &FiniteModule, mm: &FiniteModule, phi: &Pairing) -> Result<AdjointL> {
    if mp.rank != t.rank || mm.rank != t.rank {
        return Err(Error::Domain("M+ and M- must have rank one over T".into()));
    }
    let ideal = scalar_product_ideal(t, mp, mm, phi)?;
    let Some(g) = principal_generator(t, &ideal) else {
        let gens = minimal_generators(t, &ideal);
        return Err(Error::Domain(format!("ideal of the scalar product is not principal; {} generators needed", gens.len())));
    };
    let certificate = ideal
        .basis
        .iter()
        .map(|b| divide(t, b, &g).ok_or_else(|| Error::Contract("generator does not divide the ideal".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdjointL { generator: g, certificate, ideal })
}

/// The algebra R[H] generated by a cyclic operator H on R^r, realized as
/// R[y]/(charpoly H), and R^r as a module over it.
pub fn hecke_algebra(base: &BaseRing, h: &[Vec<V>]) -> Result<(FiniteAlgebra, FiniteModule)> {
    let r = base;
    let n = h.len();
    let hm = Mat::from_rows(h.iter().map(|row| row.iter().map(|c| r.reduce(c)).collect()).collect());
    let cp = charpoly(r, &hm);
    let t = FiniteAlgebra::monogenic(base.clone(), &cp)?;
    // y^k acts as H^k
    let mut action = Vec::new();
    let mut pw = crate::ring::identity(r, n);
    for _ in 0..n {
        action.push((0..n).map(|b| (0..n).map(|a| pw.at(b, a).clone()).collect()).collect());
        pw = crate::ring::mat_mul(r, &pw, &hm);
    }
    let m = FiniteModule::new(&t, n, action)?;
    Ok((t, m))
}

// -- JSON presentations --

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            Num::Int(x) => Ok(qi(*x)),
            Num::Str(s) => parse_q(s),
        }
    }
    pub fn from_q(x: &Q) -> Num {
        if x.is_integer() {
            if let Some(v) = x.to_integer().to_i64() {
                return Num::Int(v);
            }
        }
        Num::Str(x.to_string())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Invalid(format!("bad rational {:?}", s));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(a, b));
    }
    Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
}

fn to_v(x: &[Num]) -> Result<V> {
    x.iter().map(|n| n.to_q()).collect()
}

/// An R-element: a scalar or a coefficient list in w.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RJson {
    Scalar(Num),
    Poly(Vec<Num>),
}

impl RJson {
    fn to_r(&self, r: &BaseRing) -> Result<V> {
        match self {
            RJson::Scalar(n) => Ok(r.scalar(n.to_q()?)),
            RJson::Poly(c) => Ok(r.reduce(&to_v(c)?)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseJson {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionJson {
    Named(String),
    Matrices(Vec<Vec<Vec<RJson>>>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleJson {
    #[serde(default)]
    pub name: String,
    pub rank: Option<usize>,
    pub action: ActionJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairingJson {
    Matrix(Vec<Vec<RJson>>),
    Functional { functional: Vec<RJson> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub w: Num,
    pub values: Vec<Num>,
}

/// {base: {kind, params}, mult_tensor | monogenic, unit, modules, pairing_matrix, ...}
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    #[serde(default)]
    pub name: String,
    pub base: BaseJson,
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub mult_tensor: Option<Vec<Vec<Vec<RJson>>>>,
    #[serde(default)]
    pub unit: Option<Vec<RJson>>,
    #[serde(default)]
    pub monogenic: Option<Vec<RJson>>,
    #[serde(default)]
    pub modules: Vec<ModuleJson>,
    #[serde(default)]
    pub pairing_matrix: Option<PairingJson>,
    #[serde(default)]
    pub gorenstein: Option<bool>,
    #[serde(default)]
    pub points: Vec<PointJson>,
    /// Maximal ideals beyond the rational points, by generators (R-level T elements).
    #[serde(default)]
    pub maximal_ideals: Vec<Vec<Vec<RJson>>>,
}

/// A parsed corpus entry.
#[derive(Clone, Debug)]
pub struct AlgebraExample {
    pub name: String,
    pub t: FiniteAlgebra,
    pub monogenic: Option<Vec<V>>,
    pub modules: Vec<FiniteModule>,
    pub pairing: Option<Pairing>,
    pub gorenstein: Option<bool>,
    pub points: Vec<AlgebraPoint>,
    pub extra_maximal: Vec<QSpace>,
}

impl AlgebraExample {
    /// Every maximal ideal: rational points first, then the listed ones.
    pub fn maximal_ideals(&self) -> Vec<QSpace> {
        let mut ms: Vec<QSpace> = self.points.iter().map(|p| p.ideal(&self.t)).collect();
        ms.extend(self.extra_maximal.iter().cloned());
        ms
    }
}

pub fn parse_base(b: &BaseJson) -> Result<BaseRing> {
    match b.kind.as_str() {
        "rational" => Ok(BaseRing::rational()),
        "truncated" => {
            let m = b.params.get("m").and_then(|v| v.as_u64()).ok_or_else(|| Error::Invalid("truncated base needs params.m".into()))?;
            if m == 0 {
                return Err(Error::Invalid("params.m must be positive".into()));
            }
            Ok(BaseRing::truncated(m as usize))
        }
        "quotient" => {
            let c: Vec<Num> = serde_json::from_value(b.params.get("modulus").cloned().unwrap_or_default())
                .map_err(|e| Error::Invalid(format!("params.modulus: {}", e)))?;
            BaseRing::new(to_v(&c)?)
        }
        k => Err(Error::Invalid(format!("unknown base kind {:?}", k))),
    }
}

fn t_elt(r: &BaseRing, x: &[RJson]) -> Result<Vec<V>> {
    x.iter().map(|c| c.to_r(r)).collect()
}

pub fn parse_algebra(j: &AlgebraJson) -> Result<AlgebraExample> {
    let r = parse_base(&j.base)?;
    let (t, mono) = match (&j.mult_tensor, &j.monogenic) {
        (Some(mt), None) => {
            let n = mt.len();
            if j.rank.is_some_and(|k| k != n) {
                return Err(Error::Invalid("rank disagrees with mult_tensor".into()));
            }
            let mult = mt.iter().map(|a| a.iter().map(|b| t_elt(&r, b)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
            let unit = t_elt(&r, j.unit.as_ref().ok_or_else(|| Error::Invalid("mult_tensor needs a unit".into()))?)?;
            (FiniteAlgebra::new(r.clone(), n, mult, unit)?, None)
        }
        (None, Some(f)) => {
            let f = t_elt(&r, f)?;
            (FiniteAlgebra::monogenic(r.clone(), &f)?, Some(f))
        }
        _ => return Err(Error::Invalid("give exactly one of mult_tensor and monogenic".into())),
    };
    let mut modules = Vec::new();
    for m in &j.modules {
        modules.push(match &m.action {
            ActionJson::Named(s) if s == "regular" => FiniteModule::regular(&t),
            ActionJson::Named(s) if s == "dual" => FiniteModule::dual(&t),
            ActionJson::Named(s) => return Err(Error::Invalid(format!("unknown module action {:?}", s))),
            ActionJson::Matrices(ms) => {
                let rank = m.rank.unwrap_or_else(|| ms.first().map_or(0, |a| a.len()));
                let action = ms.iter().map(|a| a.iter().map(|row| t_elt(&r, row)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
                FiniteModule::new(&t, rank, action)?
            }
        });
    }
    let pairing = match &j.pairing_matrix {
        None => None,
        Some(PairingJson::Matrix(g)) => Some(Pairing { gram: g.iter().map(|row| t_elt(&r, row)).collect::<Result<Vec<_>>>()? }),
        Some(PairingJson::Functional { functional }) => Some(Pairing::from_functional(&t, &t_elt(&r, functional)?)),
    };
    let points = j
        .points
        .iter()
        .map(|p| Ok(AlgebraPoint { w: p.w.to_q()?, values: to_v(&p.values)? }))
        .collect::<Result<Vec<_>>>()?;
    for p in &points {
        p.check(&t)?;
    }
    let extra_maximal = j
        .maximal_ideals
        .iter()
        .map(|gens| Ok(t.ideal(&gens.iter().map(|g| Ok(t.flat(&t_elt(&r, g)?))).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraExample { name: j.name.clone(), t, monogenic: mono, modules, pairing, gorenstein: j.gorenstein, points, extra_maximal })
}

pub fn load_algebra(text: &str) -> Result<AlgebraExample> {
    let j: AlgebraJson = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("algebra JSON: {}", e)))?;
    parse_algebra(&j)
}

/// T-element as R-level JSON (lists of w-coefficients).
pub fn elt_json(t: &FiniteAlgebra, x: &[Q]) -> Vec<Vec<Num>> {
    t.unflat(x).iter().map(|c| c.iter().map(Num::from_q).collect()).collect()
}

/// Derivative of a polynomial in y with R-coefficients, as an element of R[y]/(f).
pub fn derivative_elt(t: &FiniteAlgebra, f: &[V]) -> V {
    let r = &t.base;
    let n = t.rank;
    // y^k as an element: basis_r(k) for k < n
    let mut out = vec![r.zero(); n];
    for k in 1..f.len() {
        if k - 1 < n {
            out[k - 1] = r.add(&out[k - 1], &r.mul(&r.scalar(qi(k as i64)), &f[k]));
        }
    }
    t.flat(&out)
}
