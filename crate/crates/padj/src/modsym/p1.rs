//! P^1(Z/N), lifts to SL2(Z), and integer 2x2 matrix helpers.

use num_integer::Integer;

/// Integer matrix (a, b, c, d).
pub type Mat2 = [i128; 4];

pub const ID: Mat2 = [1, 0, 0, 1];
pub const SIGMA: Mat2 = [0, -1, 1, 0];
pub const TAU: Mat2 = [0, -1, 1, -1];

pub fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    let f = |a: i128, b: i128| a.checked_mul(b).expect("matrix entry overflow");
    let g = |a: i128, b: i128| a.checked_add(b).expect("matrix entry overflow");
    [
        g(f(x[0], y[0]), f(x[1], y[2])),
        g(f(x[0], y[1]), f(x[1], y[3])),
        g(f(x[2], y[0]), f(x[3], y[2])),
        g(f(x[2], y[1]), f(x[3], y[3])),
    ]
}

pub fn det2(x: &Mat2) -> i128 {
    x[0] * x[3] - x[1] * x[2]
}

/// Adjugate; the inverse for determinant one.
pub fn adj2(x: &Mat2) -> Mat2 {
    [x[3], -x[1], -x[2], x[0]]
}

#[derive(Clone, Debug)]
pub struct P1 {
    pub n: i64,
    pub elts: Vec<(i64, i64)>,
    idx: Vec<i32>,
    pub lifts: Vec<Mat2>,
}

fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

impl P1 {
    pub fn new(n: i64) -> P1 {
        assert!(n >= 1);
        let units: Vec<i64> = (1..=n).filter(|&u| gcd(u, n) == 1).collect();
        let nn = n as usize;
        let mut idx = vec![-1i32; nn * nn];
        let mut elts = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) != 1 {
                    continue;
                }
                if idx[(c * n + d) as usize] >= 0 {
                    continue;
                }
                let mut best = (c, d);
                for &u in &units {
                    let t = ((u * c) % n, (u * d) % n);
                    if t < best {
                        best = t;
                    }
                }
                let k = match elts.iter().position(|e| *e == best) {
                    Some(k) => k,
                    None => {
                        elts.push(best);
                        elts.len() - 1
                    }
                };
                for &u in &units {
                    let t = ((u * c) % n, (u * d) % n);
                    idx[(t.0 * n + t.1) as usize] = k as i32;
                }
            }
        }
        if n == 1 {
            elts = vec![(0, 0)];
            idx = vec![0];
        }
        let lifts = elts.iter().map(|&(c, d)| lift_sl2(c, d, n)).collect();
        P1 { n, elts, idx, lifts }
    }

    pub fn len(&self) -> usize {
        self.elts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elts.is_empty()
    }

    pub fn index(&self, c: i128, d: i128) -> usize {
        let n = self.n as i128;
        let c = c.rem_euclid(n) as usize;
        let d = d.rem_euclid(n) as usize;
        let k = self.idx[c * self.n as usize + d];
        assert!(k >= 0, "({}, {}) is not in P^1(Z/{})", c, d, self.n);
        k as usize
    }

    /// For g in SL2(Z): (x, gamma) with g = gamma * g_x and gamma in Gamma0(N).
    pub fn coset(&self, g: &Mat2) -> (usize, Mat2) {
        let x = self.index(g[2], g[3]);
        let gam = mul2(g, &adj2(&self.lifts[x]));
        debug_assert_eq!(gam[2].rem_euclid(self.n as i128), 0);
        (x, gam)
    }
}

/// An SL2(Z) matrix whose bottom row is congruent to (c, d) mod N.
pub fn lift_sl2(c: i64, d: i64, n: i64) -> Mat2 {
    if n == 1 {
        return ID;
    }
    let c0 = c.rem_euclid(n);
    let d0 = d.rem_euclid(n);
    let c1 = if c0 == 0 { n } else { c0 };
    let mut dd = d0;
    while gcd(c1, dd) != 1 {
        dd += n;
    }
    let e = dd.extended_gcd(&c1);
    // e.x * dd + e.y * c1 = 1, so a = e.x, b = -e.y
    [e.x as i128, -(e.y as i128), c1 as i128, dd as i128]
}

/// Number of cusps of Gamma0(N).
pub fn num_cusps(n: i64) -> usize {
    let mut s = 0;
    for d in 1..=n {
        if n % d == 0 {
            s += euler_phi(gcd(d, n / d));
        }
    }
    s as usize
}

pub fn euler_phi(n: i64) -> i64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as i64
}

/// Index of Gamma0(N) in SL2(Z).
pub fn psl_index(n: i64) -> i64 {
    let mut r = n;
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            r = r / q * (q + 1);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        r = r / m * (m + 1);
    }
    r
}

pub fn is_squarefree(n: i64) -> bool {
    let mut q = 2;
    while q * q <= n {
        if n % (q * q) == 0 {
            return false;
        }
        q += 1;
    }
    true
}

/// Cusp representatives a/c (c | N) with a parabolic generator of each stabilizer.
pub fn cusp_parabolics(n: i64) -> Vec<((i128, i128), Mat2)> {
    let mut out = Vec::new();
    for c in 1..=n {
        if n % c != 0 {
            continue;
        }
        let g = gcd(c, n / c);
        for a0 in 0..g.max(1) {
            if gcd(a0, g) != 1 && g > 1 {
                continue;
            }
            let mut a = a0;
            while gcd(a, c) != 1 {
                a += g.max(1);
            }
            // s = a/c; m in SL2(Z) with m(inf) = s
            let e = a.extended_gcd(&c);
            let m: Mat2 = [a as i128, -(e.y as i128), c as i128, e.x as i128];
            debug_assert_eq!(det2(&m), 1);
            let mut h = 1;
            loop {
                let p = mul2(&mul2(&m, &[1, h, 0, 1]), &adj2(&m));
                if p[2].rem_euclid(n as i128) == 0 {
                    out.push(((a as i128, c as i128), p));
                    break;
                }
                h += 1;
            }
        }
    }
    out
}
