use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use padj::dist::{dirac, recenter, DistWeight, MomentDistribution};
use padj::modsym::classical::ClassicalSpace;
use padj::padic::PAdic;
use padj::pairing::*;
use padj::polyrep::{act_left_dual, binomial, pair_can, theta_map, PolyVector, WeightPoint, GL2};
use padj::ring::{Ring, QQ};
use padj::weightspace::{DiskRing, Kappa, WeightDisk};

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Exact polynomial product, low degree first.
fn pmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ppow(a: &[BigRational], e: usize) -> Vec<BigRational> {
    let mut r = vec![BigRational::one()];
    for _ in 0..e {
        r = pmul(&r, a);
    }
    r
}

/// Coefficients of f(e + y) in y.
fn shift(f: &[BigRational], e: i64) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); f.len()];
    for (j, c) in f.iter().enumerate() {
        for i in 0..=j {
            out[i] += c * q(binomial(j, i).try_into().unwrap()) * num_traits::pow(q(e), j - i);
        }
    }
    out
}

fn agrees(x: &PAdic, r: &BigRational) -> bool {
    x.agrees(&PAdic::from_rational(x.prime(), r, x.prec() + 4))
}

#[test]
fn psi_examples() {
    let ring = DiskRing::new(3, 30, 1);
    let lam = WeightPoint::new(3, 1);
    let kap = Kappa::Classical(lam, 3);
    // r = 0, e = 0: q^ell
    let f = psi_function(kap, 0, 0, 33, &ring, 6).unwrap();
    assert!(agrees(&f.expansions[0].1[0].c[0], &q(33)));
    assert!(f.expansions[0].1[1..].iter().all(|x| ring.is_zero(x)));
    // e = 0: z-order exactly 2r
    for r in 1..3u64 {
        let f = psi_function(kap, r, 0, 33, &ring, 8).unwrap();
        let c = &f.expansions[0].1;
        let first = c.iter().position(|x| !ring.is_zero(x)).unwrap();
        assert_eq!(first, 2 * r as usize);
    }
    // classical: (1 + q e z)^{n - r} q^lambda2 z^r (z - e)^r, expanded around e
    let n = lam.n() as usize;
    for e in [1i64, 2, -1] {
        for r in 0..=n {
            let lin = vec![q(1), q(33 * e)];
            let mut poly = pmul(&ppow(&lin, n - r), &ppow(&[q(0), q(1)], r));
            poly = pmul(&poly, &ppow(&[q(-e), q(1)], r));
            let want = shift(&poly.iter().map(|x| x * q(33)).collect::<Vec<_>>(), e);
            let f = psi_function(kap, r as u64, e, 33, &ring, want.len() + 2).unwrap();
            let got = &f.expansions[0].1;
            for (i, w) in want.iter().enumerate() {
                assert!(agrees(&got[i].c[0], w), "e={} r={} i={}", e, r, i);
            }
            for g in &got[want.len()..] {
                assert!(ring.is_zero(g));
            }
        }
    }
}

/// l(z^r (1 + q e z)^{n - r}) through polyrep.
fn finite_sum(l: &padj::polyrep::DualVector, e: i64, qq: i64) -> Vec<BigRational> {
    let lam = l.weight;
    let n = lam.n() as usize;
    let sign = if n % 2 == 0 { 1 } else { -1 };
    (0..=n)
        .map(|r| {
            let mut poly = pmul(&ppow(&[q(1), q(qq * e)], n - r), &ppow(&[q(0), q(1)], r));
            poly.resize(n + 1, BigRational::zero());
            let v = pair_can(l, &PolyVector::new(lam, poly).unwrap()).unwrap();
            v * num_traits::pow(q(qq), r + lam.lambda2 as usize) * q(binomial(n, r).try_into().unwrap()) * q(sign)
        })
        .collect()
}

#[test]
fn t_series_matches_classical_expansion() {
    check_t_series_matches_classical_expansion();
}

pub fn check_t_series_matches_classical_expansion() {
    let lam = WeightPoint::new(2, 0);
    let mu = dirac(DistWeight::Classical(lam), 3, 30, 5, 8);
    let l = padj::dist::specialize_rho(&mu).unwrap();
    // e = 0: theta(alpha l) with alpha = (0 -1; 33 0)
    let alpha = GL2::from_ints(0, -1, 33, 0).unwrap();
    let th = theta_map(&act_left_dual(&alpha, &l).unwrap()).unwrap();
    let t0 = build_t_series(&mu, 0, 33, 0).unwrap();
    for (r, c) in t0.coeffs.iter().enumerate() {
        let want = if r <= 2 { th.coeffs[r].clone() } else { BigRational::zero() };
        assert!(agrees(&c.c[0], &want), "r={}", r);
    }
    for e in [1i64, 2, 4] {
        let t = build_t_series(&mu, e, 33, 0).unwrap();
        let want = finite_sum(&l, e, 33);
        for (r, c) in t.coeffs.iter().enumerate() {
            let w = if r <= 2 { want[r].clone() } else { BigRational::zero() };
            assert!(agrees(&c.c[0], &w), "e={} r={}", e, r);
        }
    }
    let zero = MomentDistribution::from_ints(DistWeight::Classical(lam), 3, 30, &[0; 8]);
    assert!(build_t_series(&zero, 1, 33, 0).unwrap().coeffs.iter().all(|c| c.c[0].is_zero()));
    assert!(build_t_series(&mu, 0, 33, 1).is_err());
}

#[test]
fn patching_checks_overlaps() {
    let lam = WeightPoint::new(2, 0);
    let mu = dirac(DistWeight::Classical(lam), 3, 30, 7, 8);
    let ring = mu.ring();
    let t0 = build_t_series(&mu, 0, 33, 0).unwrap();
    let t1 = build_t_series(&mu, 1, 33, 0).unwrap();
    let f = patch_t_series(&[t0.clone()], &ring, 0).unwrap();
    assert_eq!(f.expansions[0].1, t0.coeffs);
    // the two centers describe one polynomial
    let f = patch_t_series(&[t0.clone(), t1.clone()], &ring, 0).unwrap();
    assert_eq!(f.expansions.len(), 1);
    let rc = recenter(&ring, &t0.coeffs, 0, 1);
    for (a, b) in rc.iter().zip(&t1.coeffs) {
        assert!(ring.sub(a, b).c[0].is_zero());
    }
    let mut bad = t1.clone();
    bad.coeffs[1] = ring.add(&bad.coeffs[1], &ring.one());
    assert!(patch_t_series(&[t0.clone(), bad], &ring, 0).is_err());
    // missing residue disk
    assert!(patch_t_series(&[t0], &ring, 1).is_err());
}

#[test]
fn disk_t_series_overlap() {
    // kappa on the disk around (0, 0): centers 0 and 3 agree mod (p^N, u^m)
    let disk = WeightDisk::with_scale(3, WeightPoint::new(0, 0), 20, 3, 1).unwrap();
    let r = padj::dist::MomentDistribution::ring_for(&DistWeight::Disk(disk), 3, 20);
    let moms: Vec<_> = (0..16).map(|j| r.from_i64((2 * j * j + 1) % 17)).collect();
    let mu = MomentDistribution::new(DistWeight::Disk(disk), 3, 20, moms);
    let t0 = build_t_series(&mu, 0, 33, 0).unwrap();
    let t3 = build_t_series(&mu, 3, 33, 0).unwrap();
    patch_t_series(&[t0, t3], &r, 0).unwrap();
}

#[test]
fn classical_twisted_pairing_level_33() {
    let cs = ClassicalSpace::new(33, WeightPoint::new(0, 0)).unwrap();
    let cusp = cs.cuspidal_coords().unwrap();
    let plus = cs.sign_part(&cusp, 1).unwrap();
    let minus = cs.sign_part(&cusp, -1).unwrap();
    assert_eq!((plus.cols, minus.cols), (3, 3));
    let t5 = cs.hecke(5).unwrap();
    let u3 = cs.hecke(3).unwrap();
    let mut nonzero = false;
    for i in 0..3 {
        for j in 0..3 {
            let a = plus.col(i);
            let b = minus.col(j);
            let v = classical_twisted_pairing(&cs, &a, &b);
            nonzero |= !v.is_zero();
            // epsilon pairs only with -epsilon
            assert!(classical_twisted_pairing(&cs, &a, &plus.col(j)).is_zero());
            assert!(classical_twisted_pairing(&cs, &minus.col(i), &b).is_zero());
            for t in [&t5, &u3] {
                let ta = padj::ring::mat_vec(&QQ, t, &a);
                let tb = padj::ring::mat_vec(&QQ, t, &b);
                assert_eq!(classical_twisted_pairing(&cs, &ta, &b), classical_twisted_pairing(&cs, &a, &tb));
            }
        }
    }
    assert!(nonzero);
}
