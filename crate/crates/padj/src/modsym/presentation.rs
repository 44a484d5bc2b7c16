//! Manin presentation of Hom_Gamma0(N)(Delta_0, V) reduced to free generators.
//!
//! Values phi_x = phi(g_x{0, inf}) satisfy the two- and three-term relations.
//! Unknowns are grouped into sigma-classes; a spanning tree of the triangle
//! graph expresses the tree classes through the rest. Everything is kept as
//! Z[Gamma0(N)] words, so any coefficient module can be plugged in afterwards.

use std::collections::{HashMap, VecDeque};

use super::p1::{adj2, mul2, Mat2, ID, P1, SIGMA, TAU};

/// Sum of c * gamma * phi_f over (c, gamma, f), with f a free-generator index.
pub type Expr = Vec<(i64, Mat2, usize)>;

#[derive(Clone, Debug)]
pub struct Presentation {
    pub p1: P1,
    /// phi_x as a combination of free generators.
    pub slot_expr: Vec<Expr>,
    /// Relations sum = 0 on the free generators.
    pub constraints: Vec<Expr>,
    /// Slot carrying each free generator (phi_f = phi_{free_slot[f]}).
    pub free_slot: Vec<usize>,
}

fn merge(e: Expr) -> Expr {
    let mut acc: HashMap<(Mat2, usize), i64> = HashMap::new();
    let mut order = Vec::new();
    for (c, g, f) in e {
        let k = (g, f);
        if !acc.contains_key(&k) {
            order.push(k);
        }
        *acc.entry(k).or_insert(0) += c;
    }
    order.into_iter().filter_map(|k| {
        let c = acc[&k];
        (c != 0).then_some((c, k.0, k.1))
    }).collect()
}

/// c * g * e
fn scale(c: i64, g: &Mat2, e: &Expr) -> Expr {
    e.iter().map(|(c2, g2, f)| (c * c2, mul2(g, g2), *f)).collect()
}

impl Presentation {
    pub fn new(n: i64) -> Presentation {
        let p1 = P1::new(n);
        let ns = p1.len();
        let sig: Vec<(usize, Mat2)> = (0..ns).map(|x| p1.coset(&mul2(&p1.lifts[x], &SIGMA))).collect();
        let tau: Vec<(usize, Mat2)> = (0..ns).map(|x| p1.coset(&mul2(&p1.lifts[x], &TAU))).collect();
        let tau2m = mul2(&TAU, &TAU);
        let tau2: Vec<(usize, Mat2)> = (0..ns).map(|x| p1.coset(&mul2(&p1.lifts[x], &tau2m))).collect();

        // sigma-classes: phi_x = s * w * phi_{rep}
        let mut class_of = vec![usize::MAX; ns];
        let mut to_rep: Vec<(i64, Mat2)> = vec![(1, ID); ns];
        let mut reps = Vec::new();
        let mut sigma_fixed = Vec::new();
        for x in 0..ns {
            if class_of[x] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(x);
            class_of[x] = c;
            let (y, g) = sig[x];
            if y == x {
                sigma_fixed.push((c, g));
            } else {
                // phi_x + g phi_y = 0
                class_of[y] = c;
                to_rep[y] = (-1, adj2(&g));
            }
        }
        let nc = reps.len();

        // triangles (tau-orbits), relation in class terms
        let mut tri_of = vec![usize::MAX; ns];
        let mut tris: Vec<Vec<(i64, Mat2, usize)>> = Vec::new();
        let mut degenerate = Vec::new();
        for x in 0..ns {
            if tri_of[x] != usize::MAX {
                continue;
            }
            let t = tris.len();
            let slots = [(ID, x), (tau[x].1, tau[x].0), (tau2[x].1, tau2[x].0)];
            let mut rel = Vec::new();
            for (g, y) in slots {
                tri_of[y] = t;
                let (s, w) = to_rep[y];
                rel.push((s, mul2(&g, &w), class_of[y]));
            }
            degenerate.push(tau[x].0 == x);
            tris.push(rel);
        }
        let nt = tris.len();

        // dual graph: class -> its (up to two) triangles
        let mut class_tris: Vec<Vec<usize>> = vec![Vec::new(); nc];
        for (t, rel) in tris.iter().enumerate() {
            if degenerate[t] {
                continue;
            }
            for &(_, _, c) in rel {
                class_tris[c].push(t);
            }
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nt];
        for (c, ts) in class_tris.iter().enumerate() {
            if ts.len() == 2 && ts[0] != ts[1] {
                adj[ts[0]].push((ts[1], c));
                adj[ts[1]].push((ts[0], c));
            }
        }
        let mut parent: Vec<Option<usize>> = vec![None; nt];
        let mut seen = vec![false; nt];
        let mut order = Vec::new();
        let mut roots = Vec::new();
        let mut tree_class = vec![false; nc];
        for r in 0..nt {
            if seen[r] || degenerate[r] {
                continue;
            }
            roots.push(r);
            seen[r] = true;
            let mut q = VecDeque::from([r]);
            while let Some(t) = q.pop_front() {
                order.push(t);
                for &(u, c) in &adj[t] {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some(c);
                        tree_class[c] = true;
                        q.push_back(u);
                    }
                }
            }
        }

        let mut free_slot = Vec::new();
        let mut class_expr: Vec<Option<Expr>> = vec![None; nc];
        for c in 0..nc {
            if !tree_class[c] {
                class_expr[c] = Some(vec![(1, ID, free_slot.len())]);
                free_slot.push(reps[c]);
            }
        }
        for &t in order.iter().rev() {
            let Some(c) = parent[t] else { continue };
            let rel = &tris[t];
            let k = rel.iter().position(|r| r.2 == c).unwrap();
            let (s, w, _) = rel[k];
            let winv = adj2(&w);
            let mut e = Vec::new();
            for (j, &(s2, w2, c2)) in rel.iter().enumerate() {
                if j == k {
                    continue;
                }
                let sub = class_expr[c2].as_ref().expect("child class unresolved");
                e.extend(scale(-s * s2, &mul2(&winv, &w2), sub));
            }
            class_expr[c] = Some(merge(e));
        }
        let class_expr: Vec<Expr> = class_expr.into_iter().map(|e| e.unwrap()).collect();

        let expand = |rel: &[(i64, Mat2, usize)]| -> Expr {
            let mut e = Vec::new();
            for &(s, w, c) in rel {
                e.extend(scale(s, &w, &class_expr[c]));
            }
            merge(e)
        };
        let mut constraints = Vec::new();
        for &r in &roots {
            constraints.push(expand(&tris[r]));
        }
        for (t, rel) in tris.iter().enumerate() {
            if degenerate[t] {
                constraints.push(expand(rel));
            }
        }
        for &(c, g) in &sigma_fixed {
            constraints.push(expand(&[(1, ID, c), (1, g, c)]));
        }
        constraints.retain(|e| !e.is_empty());

        let slot_expr = (0..ns)
            .map(|x| {
                let (s, w) = to_rep[x];
                merge(scale(s, &w, &class_expr[class_of[x]]))
            })
            .collect();
        Presentation { p1, slot_expr, constraints, free_slot }
    }

    pub fn level(&self) -> i64 {
        self.p1.n
    }

    pub fn num_free(&self) -> usize {
        self.free_slot.len()
    }

    /// phi({inf, a/b}) as signed terms gamma * phi_x (Manin's continued fractions).
    pub fn path_from_inf(&self, a: i128, b: i128) -> Vec<(i64, Mat2, usize)> {
        let mut out = Vec::new();
        if b == 0 {
            return out;
        }
        let (mut a, mut b) = (a, b);
        if b < 0 {
            a = -a;
            b = -b;
        }
        // convergents p_k/q_k of a/b
        let (mut pm, mut qm) = (1i128, 0i128);
        let (mut p0, mut q0) = (a.div_euclid(b), 1i128);
        let (mut x, mut y) = (b, a.rem_euclid(b));
        let mut k = 0;
        loop {
            // g_k = (p_k p_{k-1}; q_k q_{k-1}) maps {0, inf} to {p_{k-1}/q_{k-1}, p_k/q_k};
            // its determinant is (-1)^{k-1}, fixed by negating the first column
            let mut g: Mat2 = [p0, pm, q0, qm];
            if k % 2 == 0 {
                g = [-p0, pm, -q0, qm];
            }
            let (xs, gam) = self.p1.coset(&g);
            out.push((1, gam, xs));
            if y == 0 {
                break;
            }
            let t = x.div_euclid(y);
            let r = x.rem_euclid(y);
            x = y;
            y = r;
            let pn = t * p0 + pm;
            let qn = t * q0 + qm;
            pm = p0;
            qm = q0;
            p0 = pn;
            q0 = qn;
            k += 1;
        }
        out
    }

    /// phi({r, s}) for r = a1/b1, s = a2/b2 (b = 0 means inf).
    pub fn path(&self, r: (i128, i128), s: (i128, i128)) -> Vec<(i64, Mat2, usize)> {
        let mut out = self.path_from_inf(s.0, s.1);
        for (c, g, x) in self.path_from_inf(r.0, r.1) {
            out.push((-c, g, x));
        }
        out
    }

    /// Total free-generator expression for a path.
    pub fn path_expr(&self, r: (i128, i128), s: (i128, i128)) -> Expr {
        let mut e = Vec::new();
        for (c, g, x) in self.path(r, s) {
            e.extend(scale(c, &g, &self.slot_expr[x]));
        }
        merge(e)
    }
}
