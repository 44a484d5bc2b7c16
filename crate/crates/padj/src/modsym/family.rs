//! Symbols with values in truncated distributions D/Fil^N, over a classical
//! weight or over a weight disk (coefficients in Z/p^N[u]/u^m).
//!
//! Moment j is known mod p^{c_j}. It is stored scaled as x_j = p^{N - c_j} mu_j
//! in Z/p^N, so the whole quotient lives inside (Z/p^N)^D and submodules are
//! handled by `finmod`. Coordinates are moment-major: index (j m + i) g + f for
//! generator f, moment j and u-degree i.

use std::cell::Cell;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hecke_terms, iota_terms, up_terms, CoeffModule, Mat2, OpTerms, Presentation, SymbolSpace};
use crate::dist::{classical_caps, family_caps, ActionData};
use crate::error::{prec_err, Error, Result};
use crate::finmod::{charpoly_mod, Submodule};
use crate::polyrep::WeightPoint;
use crate::ring::{Mat, Ring as _, Zpk, ZpkSeries};
use crate::weightspace::WeightDisk;

pub struct DCoeff {
    pub data: ActionData,
}

impl CoeffModule for DCoeff {
    type R = ZpkSeries;
    fn ring(&self) -> &ZpkSeries {
        &self.data.sr
    }
    fn dim(&self) -> usize {
        self.data.nmom
    }
    fn act(&self, g: &Mat2) -> Mat<Vec<u64>> {
        self.data.matrix(g).expect("word outside Delta^+")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyWeight {
    Classical(WeightPoint),
    Disk(WeightDisk),
}

pub struct DistSymbolSpace {
    pub level: i64,
    pub p: u64,
    pub n: u32,
    pub weight: FamilyWeight,
    pub caps: Vec<u32>,
    pub m_u: usize,
    /// Z/p^N
    pub zn: Zpk,
    pub space: SymbolSpace<DCoeff>,
    /// All symbols, inside (Z/p^N)^D.
    pub symbols: Submodule,
    unstable: Cell<bool>,
}

impl DistSymbolSpace {
    /// Classical weight lambda, moments kept mod p^{N - j}.
    pub fn classical(pres: Rc<Presentation>, p: u64, lam: WeightPoint, n: u32) -> Result<DistSymbolSpace> {
        let caps = classical_caps(n);
        let k = n + caps[0] - caps[caps.len() - 1];
        let data = ActionData::classical(p, lam, caps.len(), k);
        Self::build(pres, p, n, FamilyWeight::Classical(lam), caps, data)
    }

    /// The disk family; the disk ring fixes u^m and the scale.
    pub fn family(pres: Rc<Presentation>, disk: &WeightDisk, n: u32) -> Result<DistSymbolSpace> {
        let caps = family_caps(disk.p, n);
        let k = n + caps[0] - caps[caps.len() - 1];
        let data = ActionData::disk(disk, caps.len(), k)?;
        Self::build(pres, disk.p, n, FamilyWeight::Disk(*disk), caps, data)
    }

    fn build(pres: Rc<Presentation>, p: u64, n: u32, weight: FamilyWeight, caps: Vec<u32>, data: ActionData) -> Result<DistSymbolSpace> {
        let level = pres.level();
        if level % p as i64 != 0 {
            return Err(Error::Domain(format!("level {} is not divisible by p = {}", level, p)));
        }
        let m_u = data.sr.m;
        let zn = Zpk::new(p, n);
        let space = SymbolSpace::new(pres, DCoeff { data });
        let mut s = DistSymbolSpace {
            level,
            p,
            n,
            weight,
            caps,
            m_u,
            zn,
            space,
            symbols: Submodule::zero(zn, 0),
            unstable: Cell::new(false),
        };
        let d = s.ambient_dim();
        let c = s.space.constraint_matrix();
        let cs = s.scaled(&c, c.rows / s.nmom());
        let sc = s.scale_matrix();
        let ker = Submodule::full(zn, d).kernel(&crate::finmod::mul_mod(&zn, &cs, &sc));
        s.symbols = ker.image(&sc);
        s.check_stable()?;
        Ok(s)
    }

    pub fn nmom(&self) -> usize {
        self.caps.len()
    }

    pub fn g(&self) -> usize {
        self.space.g()
    }

    pub fn ambient_dim(&self) -> usize {
        self.g() * self.nmom() * self.m_u
    }

    pub fn index(&self, f: usize, j: usize, i: usize, blocks: usize) -> usize {
        (j * self.m_u + i) * blocks + f
    }

    fn check_stable(&self) -> Result<()> {
        if self.unstable.get() {
            return Err(prec_err("modsym", "moment filtration not preserved by the action".to_string()));
        }
        Ok(())
    }

    /// Multiplication by p^{N - c_j} on each coordinate.
    pub fn scale_matrix(&self) -> Mat<u64> {
        let d = self.ambient_dim();
        let g = self.g();
        let zn = self.zn;
        let mut out = Mat::from_fn(d, d, |_, _| 0u64);
        for j in 0..self.nmom() {
            let s = zn.pow_p(self.n - self.caps[j]);
            for i in 0..self.m_u {
                for f in 0..g {
                    let k = self.index(f, j, i, g);
                    out.set(k, k, s);
                }
            }
        }
        out
    }

    /// Convert a SymbolSpace matrix (rows in `row_blocks` blocks of moments,
    /// columns the symbol vector) into scaled coordinates.
    pub fn scaled(&self, a: &Mat<Vec<u64>>, row_blocks: usize) -> Mat<u64> {
        let mm = self.nmom();
        let mu = self.m_u;
        let g = self.g();
        let zk = self.space.coeff.data.sr.base;
        let zn = self.zn;
        let mut out = Mat::from_fn(row_blocks * mm * mu, self.ambient_dim(), |_, _| 0u64);
        for row in 0..a.rows {
            let (rb, j) = (row / mm, row % mm);
            for col in 0..a.cols {
                let (f, t) = (col / mm, col % mm);
                let ser = a.at(row, col);
                for (deg, &x) in ser.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let v = if self.caps[t] >= self.caps[j] {
                        zn.mulm(x % zn.m, zn.pow_p(self.caps[t] - self.caps[j]))
                    } else {
                        let e = self.caps[j] - self.caps[t];
                        if zk.val(x) < e {
                            self.unstable.set(true);
                            continue;
                        }
                        (x / zk.pow_p(e)) % zn.m
                    };
                    for i2 in 0..mu - deg {
                        let r = self.index(rb, j, i2 + deg, row_blocks);
                        let c = self.index(f, t, i2, g);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    /// Scaled operator matrix on the ambient coordinates.
    pub fn operator(&self, terms: &OpTerms) -> Result<Mat<u64>> {
        let a = self.space.operator(terms);
        let s = self.scaled(&a, self.g());
        self.check_stable()?;
        // stability probed on random combinations of the generators
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let rows = &self.symbols.rows;
        let probes = (0..8).map(|_| {
            let mut v = vec![0u64; self.ambient_dim()];
            for r in rows {
                let c = rng.gen_range(0..self.zn.m);
                for (x, y) in v.iter_mut().zip(r) {
                    *x = self.zn.addm(*x, self.zn.mulm(c, *y));
                }
            }
            v
        });
        if !probes.collect::<Vec<_>>().iter().all(|v| self.symbols.contains(&crate::finmod::mat_vec_mod(&self.zn, &s, v))) {
            return Err(Error::Contract("operator does not preserve the symbols".into()));
        }
        Ok(s)
    }

    /// T_l for l not dividing the level, U_l otherwise.
    pub fn hecke(&self, l: i64) -> Result<Mat<u64>> {
        if self.level % l == 0 {
            self.operator(&up_terms(l))
        } else {
            self.operator(&hecke_terms(l))
        }
    }

    pub fn iota(&self) -> Result<Mat<u64>> {
        self.operator(&iota_terms())
    }

    /// Values on the path {r, s}, in scaled coordinates (one block).
    pub fn path_matrix(&self, r: (i128, i128), s: (i128, i128)) -> Result<Mat<u64>> {
        let a = self.space.path_matrix(r, s);
        let out = self.scaled(&a, 1);
        self.check_stable()?;
        Ok(out)
    }

    /// Unscaled moments mu_j as u-series: mu_{j,i} mod p^{c_j}.
    pub fn moments_of(&self, value: &[u64]) -> Vec<Vec<u64>> {
        (0..self.nmom())
            .map(|j| {
                (0..self.m_u)
                    .map(|i| {
                        let x = value[self.index(0, j, i, 1)];
                        x / self.zn.pow_p(self.n - self.caps[j])
                    })
                    .collect()
            })
            .collect()
    }

    /// The specialization rho: moments 0..=n of every generator value, times
    /// p^{n - j}, so that the image is p^n times the V_lambda symbol module
    /// (known mod p^{N - n}).
    pub fn rho_matrix(&self) -> Result<Mat<u64>> {
        let FamilyWeight::Classical(lam) = self.weight else {
            return Err(Error::WeightMismatch("rho needs a classical weight".into()));
        };
        let n = lam.n() as usize;
        if n >= self.nmom() {
            return Err(prec_err("modsym", format!("N = {} too small for weight n = {}", self.n, n)));
        }
        let g = self.g();
        let mut out = Mat::from_fn(g * (n + 1), self.ambient_dim(), |_, _| 0u64);
        for f in 0..g {
            for j in 0..=n {
                // x_{f,j} = p^j mu_j, p^{n-j} x = p^n mu_j
                out.set(f * (n + 1) + j, self.index(f, j, 0, g), self.zn.pow_p((n - j) as u32));
            }
        }
        Ok(out)
    }

    /// Matrix of an operator on a free submodule, in its Howell basis.
    pub fn restrict(&self, sub: &Submodule, a: &Mat<u64>) -> Result<Mat<u64>> {
        sub.restrict(a).ok_or_else(|| Error::Contract("submodule not free with unit pivots or not stable".into()))
    }

    pub fn charpoly_on(&self, sub: &Submodule, a: &Mat<u64>) -> Result<Vec<u64>> {
        Ok(charpoly_mod(&self.zn, &self.restrict(sub, a)?))
    }
}

/// Ordinary part (unit part of U_p) then the non-Eisenstein part (unit part
/// of T_q - e_q): the cuspidal ordinary submodule.
pub fn ordinary_cuspidal(sp: &DistSymbolSpace, q: i64, eis: i64) -> Result<(Submodule, Mat<u64>)> {
    let u = sp.hecke(sp.p as i64)?;
    let ord = sp.symbols.unit_part(&u);
    let t = sp.hecke(q)?;
    let mut te = t.clone();
    let e = sp.zn.from_i64(eis);
    for i in 0..te.rows {
        let v = sp.zn.subm(*te.at(i, i), e);
        te.set(i, i, v);
    }
    let cusp = ord.unit_part(&te);
    Ok((cusp, u))
}
