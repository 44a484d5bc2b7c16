use num_bigint::BigInt;
use num_rational::BigRational;

use padj::dist::*;
use padj::polyrep::{act_left_dual, binomial, left_action_matrix, WeightPoint, GL2};
use padj::ring::{mat_mul, Mat, Ring, Zpk};
use padj::weightspace::{DiskElem, WeightDisk};
use padj::Error;

fn gl2(m: &[i128; 4]) -> GL2 {
    GL2::from_ints(m[0] as i64, m[1] as i64, m[2] as i64, m[3] as i64).unwrap()
}

const SAMPLES: [[i128; 4]; 5] = [[1, 1, 0, 1], [2, 1, 3, 2], [1, 0, 3, 1], [5, -2, 9, 7], [3, 4, 6, 11]];

#[test]
fn identity_and_translation() {
    let ad = ActionData::classical(3, WeightPoint::new(2, 0), 8, 6);
    let sr = ad.sr;
    let id = ad.matrix(&[1, 0, 0, 1]).unwrap();
    for j in 0..8 {
        for t in 0..8 {
            assert_eq!(id.at(j, t), &sr.from_i64((j == t) as i64));
        }
    }
    // (1 1; 0 1): mu_j -> mu((z + 1)^j)
    let g = ad.matrix(&[1, 1, 0, 1]).unwrap();
    for j in 0..8 {
        for t in 0..8 {
            assert_eq!(g.at(j, t), &sr.from_bigint(&binomial(j, t)));
        }
    }
    assert!(matches!(ad.matrix(&[1, 0, 1, 1]), Err(Error::Domain(_))));
    assert!(DeltaPlusElement::new(3, [1, 0, 3, 3]).is_err());
}

#[test]
fn classical_rows_match_v_lambda() {
    // for j <= n the moment rows are the (transposed) V_lambda action
    for lam in [WeightPoint::new(0, 0), WeightPoint::new(3, 0), WeightPoint::new(2, -1), WeightPoint::new(4, 1)] {
        let n = lam.n() as usize;
        let ad = ActionData::classical(3, lam, 9, 10);
        let z = Zpk::new(3, 10);
        for g in SAMPLES {
            if lam.lambda2 < 0 && (g[0] * g[3] - g[1] * g[2]) % 3 == 0 {
                continue;
            }
            let a = ad.matrix(&g).unwrap();
            let v = left_action_matrix(lam, &gl2(&g)).unwrap();
            for j in 0..=n {
                for t in 0..9 {
                    let want = if t <= n { z.from_rational(v.at(j, t)).unwrap() } else { 0 };
                    assert_eq!(a.at(j, t)[0], want, "{:?} {:?} ({},{})", lam, g, j, t);
                }
            }
        }
    }
}

#[test]
fn rho_is_equivariant() {
    for lam in [WeightPoint::new(0, 0), WeightPoint::new(1, 0), WeightPoint::new(3, 1), WeightPoint::new(5, 2)] {
        let w = DistWeight::Classical(lam);
        let mom: Vec<i64> = (0..8).map(|j| (7 * j * j + 3 * j + 1) as i64 % 50 - 20).collect();
        let mu = MomentDistribution::from_ints(w, 3, 6, &mom);
        for g in SAMPLES {
            let gam = DeltaPlusElement::new(3, g).unwrap();
            let lhs = specialize_rho(&act_weight_kappa(&mu, &gam).unwrap()).unwrap();
            let rhs = act_left_dual(&gl2(&g), &specialize_rho(&mu).unwrap()).unwrap();
            for (r, (x, y)) in lhs.coeffs.iter().zip(&rhs.coeffs).enumerate() {
                let d = x - y;
                let v = padj::ring::rat_val(3, &d).unwrap_or(i64::MAX);
                assert!(v >= 6 - r as i64, "{:?} {:?} r={}", lam, g, r);
            }
        }
    }
}

fn tol_rows(ad: &ActionData, a: &Mat<Vec<u64>>, b: &Mat<Vec<u64>>, slope: (u32, u32)) {
    let z = ad.sr.base;
    let m = ad.nmom;
    for j in 0..m {
        let tol = ((m - j) as u32 * slope.0 / slope.1).min(z.k);
        for t in 0..m {
            for (x, y) in a.at(j, t).iter().zip(b.at(j, t)) {
                assert!(z.val(z.subm(*x, *y)) >= tol, "row {} col {}", j, t);
            }
        }
    }
}

#[test]
fn left_action_composes() {
    let ad = ActionData::classical(3, WeightPoint::new(3, 1), 12, 8);
    let disk = WeightDisk::with_scale(3, WeightPoint::new(0, 0), 8, 4, 1).unwrap();
    let fd = ActionData::disk(&disk, 12, 8).unwrap();
    for (data, slope) in [(&ad, (1, 1)), (&fd, (1, 2))] {
        for g1 in SAMPLES {
            for g2 in SAMPLES {
                let g12 = padj::modsym::p1::mul2(&g1, &g2);
                let lhs = data.matrix(&g12).unwrap();
                let rhs = mat_mul(&data.sr, &data.matrix(&g1).unwrap(), &data.matrix(&g2).unwrap());
                tol_rows(data, &lhs, &rhs, slope);
            }
        }
    }
}

#[test]
fn disk_specializes_to_classical_weights() {
    // lambda1 = 2 on the disk around (0, 0): u = ((1+3)^2 - 1)/3 = 5
    let disk = WeightDisk::with_scale(3, WeightPoint::new(0, 0), 12, 24, 1).unwrap();
    let fd = ActionData::disk(&disk, 10, 12).unwrap();
    let cl = ActionData::classical(3, WeightPoint::new(2, 0), 10, 12);
    let z = fd.sr.base;
    for g in SAMPLES {
        let a = fd.matrix(&g).unwrap();
        let b = cl.matrix(&g).unwrap();
        for j in 0..10 {
            for t in 0..10 {
                let x = fd.sr.eval(a.at(j, t), 5);
                assert!(z.val(z.subm(x, b.at(j, t)[0])) >= 10, "{:?} ({},{})", g, j, t);
            }
        }
        assert!(fd.is_stable(&a, &family_caps(3, 6)));
        assert!(cl.is_stable(&b, &classical_caps(6)));
    }
}

#[test]
fn truncation_insufficiency_is_reported() {
    let w = DistWeight::Classical(WeightPoint::new(2, 0));
    let mu = MomentDistribution::from_ints(w, 3, 8, &[1, 2, 3, 4, 5]);
    let g = DeltaPlusElement::new(3, [1, 1, 0, 1]).unwrap();
    assert!(matches!(act_weight_kappa(&mu, &g), Err(Error::Precision { .. })));
}

#[test]
fn dirac_evaluation() {
    let w = DistWeight::Classical(WeightPoint::new(0, 0));
    let mu = dirac(w, 5, 10, 3, 8);
    let r = mu.ring();
    // f = 1 + 2 (z - 1) + (z - 1)^3 at z = 3: 1 + 4 + 8 = 13
    let c: Vec<DiskElem> = [1, 2, 0, 1].iter().map(|x| r.from_i64(*x)).collect();
    let f = AnalyticFunction::global(5, 1, c.clone());
    let v = eval_distribution(&mu, &f).unwrap();
    assert_eq!(v.c[0].to_rational(), BigRational::from_integer(BigInt::from(13)));
    // the same polynomial given on the five residue disks
    let exps = (0..5).map(|e| (e, recenter(&r, &c, 1, e))).collect();
    let g = AnalyticFunction { p: 5, s: 1, expansions: exps };
    assert_eq!(eval_distribution(&mu, &g).unwrap().c[0].to_rational(), BigRational::from_integer(BigInt::from(13)));
    // a genuinely local function
    let mut exps: Vec<(i64, Vec<DiskElem>)> = (0..5).map(|e| (e, vec![r.zero()])).collect();
    exps[2].1[0] = r.one();
    let h = AnalyticFunction { p: 5, s: 1, expansions: exps };
    assert!(matches!(eval_distribution(&mu, &h), Err(Error::Unsupported(_))));
}

