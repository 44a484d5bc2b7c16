//! Scalar rings and dense matrices over them.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::padic::vp_int;

pub trait Ring {
    type El: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn from_i64(&self, x: i64) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        self.add(a, &self.neg(b))
    }
    fn from_bigint(&self, x: &BigInt) -> Self::El;
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::El) -> Option<Self::El>;
}

/// The rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct QQ;

impl Ring for QQ {
    type El = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }
    fn from_bigint(&self, x: &BigInt) -> BigRational {
        BigRational::from_integer(x.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Field for QQ {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

/// The ring Z/p^k with p^k < 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zpk {
    pub p: u64,
    pub k: u32,
    pub m: u64,
}

impl Zpk {
    pub fn new(p: u64, k: u32) -> Zpk {
        let m = p.checked_pow(k).expect("p^k overflows u64");
        assert!(m < (1u64 << 63), "p^k too large");
        Zpk { p, k, m }
    }
    #[inline]
    pub fn mulm(&self, a: u64, b: u64) -> u64 {
        if self.m < (1 << 32) {
            a * b % self.m
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }
    #[inline]
    pub fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    pub fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    /// Valuation capped at k.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }
    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.k {
            0
        } else {
            self.p.pow(e)
        }
    }
    pub fn inv_unit(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let e = (a as i128).extended_gcd(&(self.m as i128));
        Some(e.x.rem_euclid(self.m as i128) as u64)
    }
    pub fn powm(&self, a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.m;
        let mut b = a % self.m;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulm(r, b);
            }
            b = self.mulm(b, b);
            e >>= 1;
        }
        r
    }
    pub fn from_rational(&self, x: &BigRational) -> Option<u64> {
        let m = BigInt::from(self.m);
        let d = x.denom().mod_floor(&m).to_u64().unwrap();
        let di = self.inv_unit(d)?;
        let n = x.numer().mod_floor(&m).to_u64().unwrap();
        Some(self.mulm(n, di))
    }
    /// Symmetric lift to (-m/2, m/2].
    pub fn centered(&self, a: u64) -> i128 {
        if a > self.m / 2 {
            a as i128 - self.m as i128
        } else {
            a as i128
        }
    }
}

impl Ring for Zpk {
    type El = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.addm(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.m - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulm(*a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.subm(*a, *b)
    }
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }
    fn from_bigint(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.m)).to_u64().unwrap()
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Mat<E> {
        let mut d = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                d.push(f(i, j));
            }
        }
        Mat { rows, cols, d }
    }
    pub fn from_rows(rows: Vec<Vec<E>>) -> Mat<E> {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let d: Vec<E> = rows.into_iter().flatten().collect();
        assert_eq!(d.len(), r * c);
        Mat { rows: r, cols: c, d }
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &E {
        &self.d[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.d[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> Vec<E> {
        self.d[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }
    pub fn transpose(&self) -> Mat<E> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat<E> {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.at(rows[i], cols[j]).clone())
    }
    pub fn from_cols(cols: &[Vec<E>]) -> Mat<E> {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        Mat::from_fn(r, c, |i, j| cols[j][i].clone())
    }
    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
}

pub fn zeros<R: Ring>(r: &R, rows: usize, cols: usize) -> Mat<R::El> {
    Mat { rows, cols, d: vec![r.zero(); rows * cols] }
}

pub fn identity<R: Ring>(r: &R, n: usize) -> Mat<R::El> {
    Mat::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn mat_mul<R: Ring>(r: &R, a: &Mat<R::El>, b: &Mat<R::El>) -> Mat<R::El> {
    assert_eq!(a.cols, b.rows, "shape mismatch");
    let mut out = zeros(r, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.at(i, k);
            if r.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let t = r.mul(x, b.at(k, j));
                let idx = i * b.cols + j;
                out.d[idx] = r.add(&out.d[idx], &t);
            }
        }
    }
    out
}

pub fn mat_add<R: Ring>(r: &R, a: &Mat<R::El>, b: &Mat<R::El>) -> Mat<R::El> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat { rows: a.rows, cols: a.cols, d: a.d.iter().zip(&b.d).map(|(x, y)| r.add(x, y)).collect() }
}

pub fn mat_sub<R: Ring>(r: &R, a: &Mat<R::El>, b: &Mat<R::El>) -> Mat<R::El> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat { rows: a.rows, cols: a.cols, d: a.d.iter().zip(&b.d).map(|(x, y)| r.sub(x, y)).collect() }
}

pub fn mat_scale<R: Ring>(r: &R, s: &R::El, a: &Mat<R::El>) -> Mat<R::El> {
    a.map(|x| r.mul(s, x))
}

pub fn mat_vec<R: Ring>(r: &R, a: &Mat<R::El>, v: &[R::El]) -> Vec<R::El> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            let mut acc = r.zero();
            for j in 0..a.cols {
                acc = r.add(&acc, &r.mul(a.at(i, j), &v[j]));
            }
            acc
        })
        .collect()
}

pub fn is_zero_mat<R: Ring>(r: &R, a: &Mat<R::El>) -> bool {
    a.d.iter().all(|x| r.is_zero(x))
}

pub fn mat_pow<R: Ring>(r: &R, a: &Mat<R::El>, mut e: u64) -> Mat<R::El> {
    let mut res = identity(r, a.rows);
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            res = mat_mul(r, &res, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mat_mul(r, &b, &b);
        }
    }
    res
}

/// Block matrix from a grid of equally shaped blocks.
pub fn block<R: Ring>(r: &R, blocks: &[Vec<Mat<R::El>>]) -> Mat<R::El> {
    let br = blocks.len();
    let bc = blocks[0].len();
    let h = blocks[0][0].rows;
    let w = blocks[0][0].cols;
    let mut out = zeros(r, br * h, bc * w);
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, b) in row.iter().enumerate() {
            for i in 0..h {
                for j in 0..w {
                    out.set(bi * h + i, bj * w + j, b.at(i, j).clone());
                }
            }
        }
    }
    out
}

/// Characteristic polynomial det(X - A), coefficients low to high.
/// Berkowitz's algorithm: division free, valid over any commutative ring.
pub fn charpoly<R: Ring>(r: &R, a: &Mat<R::El>) -> Vec<R::El> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    if n == 0 {
        return vec![r.one()];
    }
    // vector of coefficients, high to low, for leading principal submatrices
    let mut c: Vec<R::El> = vec![r.one(), r.neg(a.at(0, 0))];
    for k in 1..n {
        // A_k = [[M, R],[C, a_kk]] with M the leading k x k block
        let rr: Vec<R::El> = (0..k).map(|i| a.at(i, k).clone()).collect();
        let cc: Vec<R::El> = (0..k).map(|j| a.at(k, j).clone()).collect();
        let akk = a.at(k, k).clone();
        // Toeplitz column: 1, -a_kk, -C R, -C M R, ...
        let mut t = vec![r.one(), r.neg(&akk)];
        let mut v = rr.clone();
        for _ in 0..k {
            let s = dot(r, &cc, &v);
            t.push(r.neg(&s));
            let mut nv = vec![r.zero(); k];
            for i in 0..k {
                let mut acc = r.zero();
                for j in 0..k {
                    acc = r.add(&acc, &r.mul(a.at(i, j), &v[j]));
                }
                nv[i] = acc;
            }
            v = nv;
        }
        // new = T * c where T is (k+2) x (k+1) lower Toeplitz
        let mut nc = vec![r.zero(); k + 2];
        for i in 0..k + 2 {
            let mut acc = r.zero();
            for j in 0..=i.min(k) {
                if i - j < t.len() {
                    acc = r.add(&acc, &r.mul(&t[i - j], &c[j]));
                }
            }
            nc[i] = acc;
        }
        c = nc;
    }
    c.reverse();
    c
}

fn dot<R: Ring>(r: &R, a: &[R::El], b: &[R::El]) -> R::El {
    let mut acc = r.zero();
    for (x, y) in a.iter().zip(b) {
        acc = r.add(&acc, &r.mul(x, y));
    }
    acc
}

/// Evaluate a polynomial (low to high) at a square matrix.
pub fn poly_at_mat<R: Ring>(r: &R, f: &[R::El], a: &Mat<R::El>) -> Mat<R::El> {
    let n = a.rows;
    let mut acc = zeros(r, n, n);
    for c in f.iter().rev() {
        acc = mat_mul(r, &acc, a);
        for i in 0..n {
            let idx = i * n + i;
            acc.d[idx] = r.add(&acc.d[idx], c);
        }
    }
    acc
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(f: &F, a: &mut Mat<F::El>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(pr) = (row..a.rows).find(|&i| !f.is_zero(a.at(i, col))) else { continue };
        if pr != row {
            for j in 0..a.cols {
                a.d.swap(pr * a.cols + j, row * a.cols + j);
            }
        }
        let inv = f.inv(a.at(row, col)).unwrap();
        for j in col..a.cols {
            let v = f.mul(&inv, a.at(row, j));
            a.set(row, j, v);
        }
        for i in 0..a.rows {
            if i == row || f.is_zero(a.at(i, col)) {
                continue;
            }
            let factor = a.at(i, col).clone();
            for j in col..a.cols {
                let v = f.sub(a.at(i, j), &f.mul(&factor, a.at(row, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, a: &Mat<F::El>) -> usize {
    let mut b = a.clone();
    rref(f, &mut b).len()
}

/// Basis of the right kernel {x : A x = 0}, as columns of the result.
pub fn nullspace<F: Field>(f: &F, a: &Mat<F::El>) -> Vec<Vec<F::El>> {
    let mut b = a.clone();
    let piv = rref(f, &mut b);
    let free: Vec<usize> = (0..a.cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); a.cols];
            v[fc] = f.one();
            for (i, &pc) in piv.iter().enumerate() {
                v[pc] = f.neg(b.at(i, fc));
            }
            v
        })
        .collect()
}

/// Solve A X = B; None when inconsistent. Picks the particular solution
/// with free variables zero.
pub fn solve<F: Field>(f: &F, a: &Mat<F::El>, b: &Mat<F::El>) -> Option<Mat<F::El>> {
    let n = a.cols;
    let mut aug = Mat::from_fn(a.rows, n + b.cols, |i, j| {
        if j < n {
            a.at(i, j).clone()
        } else {
            b.at(i, j - n).clone()
        }
    });
    let piv = rref(f, &mut aug);
    if piv.iter().any(|&c| c >= n) {
        return None;
    }
    let mut x = zeros(f, n, b.cols);
    for (i, &pc) in piv.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, aug.at(i, n + j).clone());
        }
    }
    Some(x)
}

pub fn inverse<F: Field>(f: &F, a: &Mat<F::El>) -> Option<Mat<F::El>> {
    if a.rows != a.cols {
        return None;
    }
    let x = solve(f, a, &identity(f, a.rows))?;
    if rank(f, a) < a.rows {
        return None;
    }
    Some(x)
}

pub fn det<F: Field>(f: &F, a: &Mat<F::El>) -> F::El {
    let n = a.rows;
    let mut b = a.clone();
    let mut d = f.one();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&i| !f.is_zero(b.at(i, col))) else { return f.zero() };
        if pr != col {
            for j in 0..n {
                b.d.swap(pr * n + j, col * n + j);
            }
            d = f.neg(&d);
        }
        let piv = b.at(col, col).clone();
        d = f.mul(&d, &piv);
        let inv = f.inv(&piv).unwrap();
        for i in col + 1..n {
            if f.is_zero(b.at(i, col)) {
                continue;
            }
            let factor = f.mul(b.at(i, col), &inv);
            for j in col..n {
                let v = f.sub(b.at(i, j), &f.mul(&factor, b.at(col, j)));
                b.set(i, j, v);
            }
        }
    }
    d
}

/// Column space basis (as a list of columns of A).
pub fn column_basis<F: Field>(f: &F, a: &Mat<F::El>) -> Vec<Vec<F::El>> {
    let mut b = a.clone();
    let piv = rref(f, &mut b);
    piv.iter().map(|&c| a.col(c)).collect()
}

/// Coordinates of the columns of B in the basis given by the columns of A
/// (A must have full column rank and span B).
pub fn coords_in<F: Field>(f: &F, a: &Mat<F::El>, b: &Mat<F::El>) -> Option<Mat<F::El>> {
    let x = solve(f, a, b)?;
    if mat_mul(f, a, &x) != *b {
        return None;
    }
    Some(x)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// p-adic valuation of a nonzero rational.
pub fn rat_val(p: u64, x: &BigRational) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(vp_int(p, x.numer()) - vp_int(p, x.denom()))
    }
}

pub fn rat_abs(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let q = QQ;
        let a = Mat::from_rows(vec![
            vec![rat_i(2), rat_i(1), rat_i(0)],
            vec![rat_i(-1), rat_i(3), rat_i(4)],
            vec![rat_i(5), rat_i(0), rat_i(1)],
        ]);
        let c = charpoly(&q, &a);
        assert_eq!(c.len(), 4);
        assert_eq!(c[3], rat_i(1));
        assert_eq!(c[2], rat_i(-6));
        assert!(is_zero_mat(&q, &poly_at_mat(&q, &c, &a)));
        assert_eq!(c[0], -det(&q, &a));
        let z = Zpk::new(3, 5);
        let az = a.map(|x| z.from_rational(x).unwrap());
        let cz = charpoly(&z, &az);
        let cq: Vec<u64> = c.iter().map(|x| z.from_rational(x).unwrap()).collect();
        assert_eq!(cz, cq);
    }

    #[test]
    fn nullspace_and_solve() {
        let q = QQ;
        let a = Mat::from_rows(vec![vec![rat_i(1), rat_i(2), rat_i(3)], vec![rat_i(2), rat_i(4), rat_i(6)]]);
        let ns = nullspace(&q, &a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&q, &a, v).iter().all(|x| x.is_zero()));
        }
        let m = Mat::from_rows(vec![vec![rat_i(1), rat_i(2)], vec![rat_i(3), rat_i(4)]]);
        let inv = inverse(&q, &m).unwrap();
        assert_eq!(mat_mul(&q, &m, &inv), identity(&q, 2));
    }
}

/// (Z/p^k)[u]/(u^m), elements as coefficient vectors of length m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZpkSeries {
    pub base: Zpk,
    pub m: usize,
}

impl ZpkSeries {
    pub fn new(base: Zpk, m: usize) -> ZpkSeries {
        assert!(m >= 1);
        ZpkSeries { base, m }
    }
    pub fn constant(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.m];
        v[0] = a % self.base.m;
        v
    }
    pub fn scale(&self, s: u64, a: &[u64]) -> Vec<u64> {
        a.iter().map(|x| self.base.mulm(s, *x)).collect()
    }
    /// Evaluate at u = x in Z/p^k (exact as a polynomial of degree < m).
    pub fn eval(&self, a: &[u64], x: u64) -> u64 {
        let z = &self.base;
        a.iter().rev().fold(0, |acc, c| z.addm(z.mulm(acc, x), *c))
    }
    /// Multiplication-by-a matrix on the coefficient vector.
    pub fn mult_matrix(&self, a: &[u64]) -> Vec<Vec<u64>> {
        (0..self.m).map(|i| (0..self.m).map(|j| if i >= j { a[i - j] } else { 0 }).collect()).collect()
    }
}

impl Ring for ZpkSeries {
    type El = Vec<u64>;
    fn zero(&self) -> Vec<u64> {
        vec![0; self.m]
    }
    fn one(&self) -> Vec<u64> {
        self.constant(1)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.addm(*x, *y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.subm(*x, *y)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let mut out = vec![0u64; self.m];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for j in 0..self.m - i {
                out[i + j] = self.base.addm(out[i + j], self.base.mulm(*x, b[j]));
            }
        }
        out
    }
    fn from_i64(&self, x: i64) -> Vec<u64> {
        self.constant(self.base.from_i64(x))
    }
    fn from_bigint(&self, x: &BigInt) -> Vec<u64> {
        self.constant(self.base.from_bigint(x))
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|x| *x == 0)
    }
}
