//! Finitely generated modules over Z/p^n as submodules of (Z/p^n)^d.
//!
//! Submodules are kept in Howell form: an echelon basis whose rows with
//! pivot column >= j span every element vanishing before column j. Maps are
//! matrices acting on column vectors.

use crate::ring::{Mat, Zpk};

/// Fast product mod q with delayed reduction.
pub fn mul_mod(z: &Zpk, a: &Mat<u64>, b: &Mat<u64>) -> Mat<u64> {
    assert_eq!(a.cols, b.rows);
    let q = z.m;
    let (n, k, m) = (a.rows, a.cols, b.cols);
    let mut out = vec![0u64; n * m];
    if q < (1 << 32) {
        let q2 = q * q;
        let batch = (u64::MAX / q2).max(1) as usize;
        let mut acc = vec![0u64; m];
        for i in 0..n {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut cnt = 0;
            for t in 0..k {
                let x = a.d[i * k + t];
                if x == 0 {
                    continue;
                }
                let row = &b.d[t * m..(t + 1) * m];
                for (s, y) in acc.iter_mut().zip(row) {
                    *s += x * y;
                }
                cnt += 1;
                if cnt == batch {
                    acc.iter_mut().for_each(|s| *s %= q);
                    cnt = 0;
                }
            }
            for j in 0..m {
                out[i * m + j] = acc[j] % q;
            }
        }
    } else {
        for i in 0..n {
            for t in 0..k {
                let x = a.d[i * k + t];
                if x == 0 {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] = z.addm(out[i * m + j], z.mulm(x, b.d[t * m + j]));
                }
            }
        }
    }
    Mat { rows: n, cols: m, d: out }
}

pub fn mat_vec_mod(z: &Zpk, a: &Mat<u64>, v: &[u64]) -> Vec<u64> {
    (0..a.rows)
        .map(|i| {
            let mut s = 0u64;
            for j in 0..a.cols {
                s = z.addm(s, z.mulm(a.d[i * a.cols + j], v[j]));
            }
            s
        })
        .collect()
}

pub fn pow_mod(z: &Zpk, a: &Mat<u64>, mut e: u64) -> Mat<u64> {
    let n = a.rows;
    let mut r = Mat::from_fn(n, n, |i, j| if i == j { 1 % z.m } else { 0 });
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(z, &r, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mul_mod(z, &b, &b);
        }
    }
    r
}

/// Submodule of (Z/p^n)^dim in Howell form.
#[derive(Clone, Debug, PartialEq)]
pub struct Submodule {
    pub z: Zpk,
    pub dim: usize,
    pub rows: Vec<Vec<u64>>,
    /// (pivot column, pivot valuation) per row.
    pub pivots: Vec<(usize, u32)>,
}

fn axpy(z: &Zpk, s: &mut [u64], f: u64, r: &[u64], from: usize) {
    if f == 0 {
        return;
    }
    for j in from..s.len() {
        if r[j] != 0 {
            s[j] = z.subm(s[j], z.mulm(f, r[j]));
        }
    }
}

impl Submodule {
    pub fn zero(z: Zpk, dim: usize) -> Submodule {
        Submodule { z, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(z: Zpk, dim: usize) -> Submodule {
        let rows = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
        Submodule::span(z, dim, rows)
    }

    /// Howell form of the span of the given rows.
    pub fn span(z: Zpk, dim: usize, gens: Vec<Vec<u64>>) -> Submodule {
        let mut pool: Vec<Vec<u64>> = gens.into_iter().filter(|r| r.iter().any(|x| *x != 0)).collect();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..dim {
            let mut best: Option<(usize, u32)> = None;
            for (i, r) in pool.iter().enumerate() {
                if r[col] != 0 {
                    let v = z.val(r[col]);
                    if best.map_or(true, |b| v < b.1) {
                        best = Some((i, v));
                        if v == 0 {
                            break;
                        }
                    }
                }
            }
            let Some((bi, e)) = best else { continue };
            let mut r = pool.swap_remove(bi);
            let pe = z.p.pow(e);
            let u = z.inv_unit(r[col] / pe).unwrap();
            for x in r.iter_mut() {
                *x = z.mulm(*x, u);
            }
            for s in pool.iter_mut() {
                if s[col] != 0 {
                    let f = s[col] / pe;
                    axpy(&z, s, f, &r, col);
                }
            }
            pool.retain(|s| s.iter().any(|x| *x != 0));
            for o in rows.iter_mut() {
                if o[col] >= pe {
                    let f = o[col] / pe;
                    axpy(&z, o, f, &r, col);
                }
            }
            if e > 0 {
                let t = z.p.pow(z.k - e);
                let sat: Vec<u64> = r.iter().map(|x| z.mulm(*x, t)).collect();
                if sat.iter().any(|x| *x != 0) {
                    pool.push(sat);
                }
            }
            rows.push(r);
            pivots.push((col, e));
        }
        Submodule { z, dim, rows, pivots }
    }

    /// log_p of the cardinality.
    pub fn length(&self) -> u32 {
        self.pivots.iter().map(|(_, e)| self.z.k - e).sum()
    }

    pub fn is_free_with_unit_pivots(&self) -> bool {
        self.pivots.iter().all(|(_, e)| *e == 0)
    }

    /// Reduce v modulo the submodule; zero iff v lies in it.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let z = &self.z;
        let mut w = v.to_vec();
        for (r, &(col, e)) in self.rows.iter().zip(&self.pivots) {
            let pe = z.p.pow(e);
            if w[col] >= pe {
                let f = w[col] / pe;
                axpy(z, &mut w, f, r, col);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|x| *x == 0)
    }

    pub fn contains_module(&self, o: &Submodule) -> bool {
        o.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, o: &Submodule) -> Submodule {
        let mut g = self.rows.clone();
        g.extend(o.rows.iter().cloned());
        Submodule::span(self.z, self.dim, g)
    }

    /// Image under a (out x dim) matrix.
    pub fn image(&self, a: &Mat<u64>) -> Submodule {
        assert_eq!(a.cols, self.dim);
        let g = self.rows.iter().map(|r| mat_vec_mod(&self.z, a, r)).collect();
        Submodule::span(self.z, a.rows, g)
    }

    /// Elements of this submodule killed by a (out x dim) matrix.
    pub fn kernel(&self, a: &Mat<u64>) -> Submodule {
        assert_eq!(a.cols, self.dim);
        let out = a.rows;
        let g: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = mat_vec_mod(&self.z, a, r);
                v.extend_from_slice(r);
                v
            })
            .collect();
        let h = Submodule::span(self.z, out + self.dim, g);
        let ker: Vec<Vec<u64>> = h
            .rows
            .iter()
            .zip(&h.pivots)
            .filter(|(_, (c, _))| *c >= out)
            .map(|(r, _)| r[out..].to_vec())
            .collect();
        Submodule::span(self.z, self.dim, ker)
    }

    /// Coordinates in the row basis of a free module with unit pivots.
    pub fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        if !self.is_free_with_unit_pivots() {
            return None;
        }
        let z = &self.z;
        let mut w = v.to_vec();
        let mut c = Vec::with_capacity(self.rows.len());
        for (r, &(col, _)) in self.rows.iter().zip(&self.pivots) {
            let f = w[col];
            c.push(f);
            axpy(z, &mut w, f, r, col);
        }
        w.iter().all(|x| *x == 0).then_some(c)
    }

    /// Matrix of an endomorphism (ambient matrix preserving the module) in the row basis.
    pub fn restrict(&self, a: &Mat<u64>) -> Option<Mat<u64>> {
        let k = self.rows.len();
        let mut m = Mat::from_fn(k, k, |_, _| 0u64);
        for (j, r) in self.rows.iter().enumerate() {
            let img = mat_vec_mod(&self.z, a, r);
            let c = self.coords(&img)?;
            for i in 0..k {
                m.set(i, j, c[i]);
            }
        }
        Some(m)
    }

    /// Elementary divisor exponents e_i with the module isomorphic to sum Z/p^{n - e_i}.
    pub fn invariants(&self) -> Vec<u32> {
        let z = &self.z;
        let mut a: Vec<Vec<u64>> = self.rows.clone();
        let mut out = Vec::new();
        loop {
            let mut best: Option<(usize, usize, u32)> = None;
            for (i, r) in a.iter().enumerate() {
                for (j, x) in r.iter().enumerate() {
                    if *x != 0 {
                        let v = z.val(*x);
                        if best.map_or(true, |b| v < b.2) {
                            best = Some((i, j, v));
                        }
                    }
                }
            }
            let Some((bi, bj, e)) = best else { break };
            let r = a.swap_remove(bi);
            let pe = z.p.pow(e);
            let u = z.inv_unit(r[bj] / pe).unwrap();
            let r: Vec<u64> = r.iter().map(|x| z.mulm(*x, u)).collect();
            for s in a.iter_mut() {
                if s[bj] != 0 {
                    let f = s[bj] / pe;
                    axpy(z, s, f, &r, 0);
                }
            }
            // column clearing: the remaining entries of r are multiples of p^e
            for s in a.iter_mut() {
                s[bj] = 0;
            }
            out.push(e);
            a.retain(|s| s.iter().any(|x| *x != 0));
        }
        out.sort();
        out
    }

    /// Unit part of an endomorphism: the image of a^(2^e) once 2^e exceeds the length.
    pub fn unit_part(&self, a: &Mat<u64>) -> Submodule {
        if self.rows.len() < self.dim && self.is_free_with_unit_pivots() {
            if let Some(r) = self.restrict(a) {
                let k = self.rows.len();
                let small = Submodule::full(self.z, k).unit_part(&r);
                return self.from_coords(&small);
            }
        }
        self.image(&self.stable_power(a))
    }

    fn stable_power(&self, a: &Mat<u64>) -> Mat<u64> {
        let mut pw = a.clone();
        let mut e = 1u64;
        while e <= self.length() as u64 {
            pw = mul_mod(&self.z, &pw, &pw);
            e *= 2;
        }
        pw
    }

    /// Elements with the given coordinates in the row basis.
    fn from_coords(&self, c: &Submodule) -> Submodule {
        let g = c
            .rows
            .iter()
            .map(|co| {
                let mut v = vec![0u64; self.dim];
                for (x, r) in co.iter().zip(&self.rows) {
                    if *x != 0 {
                        for (s, y) in v.iter_mut().zip(r) {
                            *s = self.z.addm(*s, self.z.mulm(*x, *y));
                        }
                    }
                }
                v
            })
            .collect();
        Submodule::span(self.z, self.dim, g)
    }

    /// Fitting decomposition for an endomorphism: (unit part, nilpotent part).
    pub fn fitting(&self, a: &Mat<u64>) -> (Submodule, Submodule) {
        let pw = self.stable_power(a);
        (self.image(&pw), self.kernel(&pw))
    }
}

/// Charpoly (low degree first) over Z/p^n.
pub fn charpoly_mod(z: &Zpk, a: &Mat<u64>) -> Vec<u64> {
    crate::ring::charpoly(z, a)
}
