//! Modular symbols for Gamma0(N) with values in a left module.
//!
//! A symbol is stored through its values on the free generators of the
//! presentation; `SymbolSpace` realizes the words for a concrete module.

pub mod classical;
pub mod family;
pub mod p1;
pub mod presentation;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::ring::{mat_add, mat_scale, zeros, Mat, Ring};
pub use p1::{Mat2, P1};
pub use presentation::{Expr, Presentation};

/// A left module over an integral monoid containing Gamma0(N).
pub trait CoeffModule {
    type R: Ring;
    fn ring(&self) -> &Self::R;
    fn dim(&self) -> usize;
    /// Matrix of g acting on coordinate columns.
    fn act(&self, g: &Mat2) -> Mat<<Self::R as Ring>::El>;
}

pub struct SymbolSpace<C: CoeffModule> {
    pub pres: Rc<Presentation>,
    pub coeff: C,
    cache: RefCell<HashMap<Mat2, Mat<<C::R as Ring>::El>>>,
}

/// Hecke-type operator data: (Tphi)(D) = sum A phi(beta D).
pub type OpTerms = Vec<(Mat2, Mat2)>;

pub fn hecke_terms(l: i64) -> OpTerms {
    let l = l as i128;
    let mut t: OpTerms = (0..l).map(|a| ([1, a, 0, l], [l, -a, 0, 1])).collect();
    t.push(([l, 0, 0, 1], [1, 0, 0, l]));
    t
}

pub fn up_terms(p: i64) -> OpTerms {
    let p = p as i128;
    (0..p).map(|a| ([1, a, 0, p], [p, -a, 0, 1])).collect()
}

/// Atkin-Lehner W_N = (0 -1; N 0).
pub fn w_terms(n: i64) -> OpTerms {
    let n = n as i128;
    vec![([0, 1, -n, 0], [0, -1, n, 0])]
}

/// Complex conjugation via eta = diag(-1, 1).
pub fn iota_terms() -> OpTerms {
    vec![([-1, 0, 0, 1], [-1, 0, 0, 1])]
}

impl<C: CoeffModule> SymbolSpace<C> {
    pub fn new(pres: Rc<Presentation>, coeff: C) -> SymbolSpace<C> {
        SymbolSpace { pres, coeff, cache: RefCell::new(HashMap::new()) }
    }

    pub fn m(&self) -> usize {
        self.coeff.dim()
    }

    pub fn g(&self) -> usize {
        self.pres.num_free()
    }

    /// Length of a symbol vector.
    pub fn total_dim(&self) -> usize {
        self.m() * self.g()
    }

    pub fn act(&self, g: &Mat2) -> Mat<<C::R as Ring>::El> {
        if let Some(a) = self.cache.borrow().get(g) {
            return a.clone();
        }
        let a = self.coeff.act(g);
        self.cache.borrow_mut().insert(*g, a.clone());
        a
    }

    /// Row blocks of an expression: sum over f of block_f * phi_f.
    pub fn expr_blocks(&self, pre: &Mat2, e: &Expr) -> Vec<Mat<<C::R as Ring>::El>> {
        let r = self.coeff.ring();
        let m = self.m();
        let mut out = vec![zeros(r, m, m); self.g()];
        for (c, w, f) in e {
            let a = self.act(&p1::mul2(pre, w));
            out[*f] = mat_add(r, &out[*f], &mat_scale(r, &r.from_i64(*c), &a));
        }
        out
    }

    fn blocks_to_rows(&self, blocks: &[Mat<<C::R as Ring>::El>]) -> Mat<<C::R as Ring>::El> {
        let r = self.coeff.ring();
        let m = self.m();
        let mut out = zeros(r, m, self.total_dim());
        for (f, b) in blocks.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    out.set(i, f * m + j, b.at(i, j).clone());
                }
            }
        }
        out
    }

    /// Linear constraints cutting out the symbols.
    pub fn constraint_matrix(&self) -> Mat<<C::R as Ring>::El> {
        let r = self.coeff.ring();
        let id = p1::ID;
        let mut rows = Vec::new();
        for e in &self.pres.constraints {
            let b = self.blocks_to_rows(&self.expr_blocks(&id, e));
            for i in 0..b.rows {
                rows.push(b.row(i));
            }
        }
        if rows.is_empty() {
            return zeros(r, 0, self.total_dim());
        }
        Mat::from_rows(rows)
    }

    /// Matrix taking symbol values to the value on the path {r, s}.
    pub fn path_matrix(&self, r: (i128, i128), s: (i128, i128)) -> Mat<<C::R as Ring>::El> {
        let e = self.pres.path_expr(r, s);
        self.blocks_to_rows(&self.expr_blocks(&p1::ID, &e))
    }

    /// The value of A * phi(path) with A applied first to the path words.
    fn applied_path_rows(&self, a: &Mat2, beta_g: &Mat2) -> Mat<<C::R as Ring>::El> {
        let e = self.pres.path_expr((beta_g[1], beta_g[3]), (beta_g[0], beta_g[2]));
        self.blocks_to_rows(&self.expr_blocks(a, &e))
    }

    /// Operator on symbol vectors: (T phi)_f = sum A phi(beta g_f {0, inf}).
    pub fn operator(&self, terms: &OpTerms) -> Mat<<C::R as Ring>::El> {
        let r = self.coeff.ring();
        let m = self.m();
        let n = self.total_dim();
        let mut out = zeros(r, n, n);
        for (f, &x) in self.pres.free_slot.iter().enumerate() {
            let gx = self.pres.p1.lifts[x];
            for (beta, a) in terms {
                let rows = self.applied_path_rows(a, &p1::mul2(beta, &gx));
                for i in 0..m {
                    for j in 0..n {
                        let idx = (f * m + i) * n + j;
                        out.d[idx] = r.add(&out.d[idx], rows.at(i, j));
                    }
                }
            }
        }
        out
    }
}
