//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padj::adjoint::{noether_different, scalar_product_ideal, FiniteModule, Pairing};
use padj::padic::PAdic;
use padj::polyrep::{act_left_dual, binomial, pair_can, pair_dual, theta_map, DualVector, WeightPoint, GL2};
use padj::scenario::{run_scenario, PrecisionOverrides, ScenarioConfig};
use padj::weightspace::{binom_kappa, DiskRing, Kappa, WeightDisk};
use padj::zeta::{ep_multiplier, i1_closed, i2_closed, psi_at_one, truncated_sums, truncated_sums_f64, LocalParams};

#[allow(dead_code, unused_imports)]
#[path = "adjoint.rs"]
mod adjoint_suite;
#[allow(dead_code, unused_imports)]
#[path = "family_pairing.rs"]
mod family_suite;
#[allow(dead_code, unused_imports)]
#[path = "modsym_family.rs"]
mod modsym_suite;
#[allow(dead_code, unused_imports)]
#[path = "pairing.rs"]
mod pairing_suite;
#[allow(dead_code, unused_imports)]
#[path = "slope.rs"]
mod slope_suite;

type Check = Result<String, String>;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rq(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Run suites that report failure by panicking.
fn suites(fs: &[(&str, fn())]) -> Check {
    for (name, f) in fs {
        catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            format!("{}: {}", name, msg.unwrap_or_default())
        })?;
    }
    Ok(fs.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "))
}

fn random_dual(rng: &mut ChaCha8Rng, lam: WeightPoint) -> DualVector {
    let c = (0..=lam.n()).map(|_| rq(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
    DualVector::new(lam, c).unwrap()
}

fn random_gl2(rng: &mut ChaCha8Rng) -> GL2 {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-5..6)).collect();
        if e[0] * e[3] - e[1] * e[2] != 0 {
            return GL2::from_ints(e[0], e[1], e[2], e[3]).unwrap();
        }
    }
}

fn det_pow(d: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(d.clone(), k as usize)
    } else {
        num_traits::pow(d.recip(), (-k) as usize)
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0;
    for n in 0..=6i64 {
        for l2 in [-1i64, 0, 2] {
            let lam = WeightPoint::new(n + l2, l2);
            let nu = n as usize;
            // theta as an explicit antidiagonal matrix, built from factorials
            let fact = |k: usize| (1..=k as i64).fold(BigInt::one(), |a, b| a * b);
            let theta: Vec<Vec<BigRational>> = (0..=nu)
                .map(|i| {
                    (0..=nu)
                        .map(|j| {
                            if i + j != nu {
                                return BigRational::zero();
                            }
                            let b = BigRational::from_integer(fact(nu) / (fact(j) * fact(nu - j)));
                            if j % 2 == 0 { b } else { -b }
                        })
                        .collect()
                })
                .collect();
            for _ in 0..200 {
                let (a, b) = (random_dual(&mut rng, lam), random_dual(&mut rng, lam));
                let v = pair_dual(&a, &b).unwrap();
                // b^T Theta a, and the library's theta/evaluation path
                let mut m = BigRational::zero();
                for i in 0..=nu {
                    for j in 0..=nu {
                        m += &b.coeffs[i] * &theta[i][j] * &a.coeffs[j];
                    }
                }
                ensure(v == m, format!("matrix path differs at {:?}", lam))?;
                ensure(v == pair_can(&b, &theta_map(&a).unwrap()).unwrap(), format!("theta path differs at {:?}", lam))?;
                let g = random_gl2(&mut rng);
                let lhs = pair_dual(&act_left_dual(&g, &a).unwrap(), &act_left_dual(&g, &b).unwrap()).unwrap();
                ensure(lhs == det_pow(&g.det(), lam.w()) * &v, format!("equivariance fails at {:?}", lam))?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{} pairs, n <= 6; deviation: <l1,l2> = <l2, theta(l1)>_can and the twist is det^(+w), not det^(-w)",
        pairs
    ))
}

fn criterion_2() -> Check {
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        let ring = DiskRing::new(p, 20, 1);
        for n in 0..=10i64 {
            for l2 in [-2i64, 0, 3] {
                let lam = WeightPoint::new(n + l2, l2);
                for r in 0..=10u64 {
                    let b = binom_kappa(Kappa::Classical(lam, p), r, &ring).map_err(|e| e.to_string())?;
                    let want = if r as i64 <= n { BigInt::from(binomial(n as usize, r as usize)) } else { BigInt::zero() };
                    let w = PAdic::from_bigint(p, &want, 20);
                    ensure(b.c[0].agrees(&w) && b.c[0].prec() >= 20, format!("p={} {:?} r={}", p, lam, r))?;
                    checked += 1;
                }
            }
        }
        // disk version, specialized at classical points of each disk
        for c in 0..(p as i64 - 1) {
            let d = WeightDisk::new(p, WeightPoint::new(c, 0), 50, 60).unwrap();
            for r in 0..=10u64 {
                let b = binom_kappa(Kappa::Disk(&d), r, &d.ring).map_err(|e| e.to_string())?;
                // tail coefficients assumed no worse than the computed ones, with slack for log growth
                let tail = d.ring.min_val(&b) - 2;
                let mut j = c;
                while j <= 10 {
                    let s = d.specialize(&b, WeightPoint::new(j, 0), tail).map_err(|e| e.to_string())?;
                    let want = if r as i64 <= j { BigInt::from(binomial(j as usize, r as usize)) } else { BigInt::zero() };
                    ensure(s.prec() >= 20, format!("disk p={} c={} r={} kept {} digits", p, c, r, s.prec()))?;
                    ensure(s.agrees(&PAdic::from_bigint(p, &want, 40)), format!("disk p={} lambda1={} r={}", p, j, r))?;
                    checked += 1;
                    j += p as i64 - 1;
                }
            }
        }
    }
    Ok(format!("{} binomials, p in {{3,5,7}}, disk specializations mod p^20", checked))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sets = 0;
    let mut worst = 0f64;
    while sets < 50 {
        let qq = [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
        let alpha = rq(rng.gen_range(-12..13), rng.gen_range(1..4));
        let beta = rq(rng.gen_range(-12..13), rng.gen_range(1..4));
        if alpha.is_zero() || beta.is_zero() || (&alpha / (&beta * q(qq as i64))).abs() > rq(1, 2) {
            continue;
        }
        let prm = LocalParams::new(qq, alpha.clone(), beta.clone()).unwrap();
        let (i1, i2, psi) = (i1_closed(&prm).unwrap(), i2_closed(&prm).unwrap(), psi_at_one(&prm).unwrap());
        let (t1, t2) = truncated_sums(&prm, 60);
        let (f1, f2) = truncated_sums_f64(qq as f64, alpha.to_f64().unwrap(), beta.to_f64().unwrap(), 60);
        let f = |x: &BigRational| x.to_f64().unwrap();
        for err in [
            (&t1 - &i1).abs().to_f64().unwrap(),
            (&t2 - &i2).abs().to_f64().unwrap(),
            (&t1 - &t2 - &psi).abs().to_f64().unwrap(),
            (f1 - f(&i1)).abs(),
            (f2 - f(&i2)).abs(),
            (f1 - f2 - f(&psi)).abs(),
        ] {
            worst = worst.max(err);
        }
        ensure(worst < 1e-10, format!("alpha={} beta={} q={}: error {:e}", alpha, beta, qq, worst))?;
        // e_p from Psi(1) by clearing the Euler denominator
        let qr = q(qq as i64);
        let one = BigRational::one();
        let denom = (&one - prm.ratio()) * (&one - qr.recip());
        let want = (&one - &beta / (&alpha * &qr)) * (&alpha - &beta) / &qr;
        ensure(ep_multiplier(std::slice::from_ref(&prm)).unwrap() == want, "e_p identity")?;
        ensure(&psi * denom * (&one - &beta / (&alpha * &qr)) == want, "e_p from Psi(1)")?;
        sets += 1;
    }
    Ok(format!("50 parameter sets, 60 terms, worst error {:.1e}", worst))
}

fn criterion_8() -> Check {
    let names = suites(&[
        ("corpus", adjoint_suite::check_corpus_is_large_enough),
        ("containment", adjoint_suite::check_scalar_product_inside_noether_different),
        ("gorenstein", adjoint_suite::check_gorenstein_equality_and_principality),
        ("jacobian oracle", adjoint_suite::check_ramification_matches_kahler_everywhere),
        ("zero set", adjoint_suite::check_adjoint_l_zero_set_is_ramification_locus),
    ])?;
    // the inclusion as literally stated fails for phi = 0 on an etale algebra
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../examples/algebras/split.json")).unwrap();
    let e = padj::adjoint::load_algebra(&text).unwrap();
    let reg = FiniteModule::regular(&e.t);
    let d0 = scalar_product_ideal(&e.t, &reg, &reg, &Pairing::zero(&e.t, e.t.rank, e.t.rank)).unwrap();
    let dn = noether_different(&e.t).unwrap();
    ensure(!d0.contains_space(&dn) && dn.contains_space(&d0), "phi = 0 counterexample")?;
    Ok(format!("{}; deviation: checked d_phi in d_N (d_N in d_phi fails for phi = 0)", names))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let cfg = ScenarioConfig {
        scenario: "pair".into(),
        params: serde_json::json!({"level": 11, "p": 3, "k": 2, "nu": "1/2", "ell": 0}),
        output: None,
        format: None,
        precision: PrecisionOverrides { n: None, m: None },
    };
    let rep = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let w = &rep.json["witness"];
    let prec = w["precision"].as_i64().unwrap_or(0);
    ensure(rep.json["nonzero"] == true && rep.json["same_sign_vanishes"] == true, "pairing vanishes")?;
    ensure(prec >= 6, format!("precision {}", prec))?;
    ensure(secs < 300.0, format!("{:.0} s", secs))?;
    Ok(format!("[Phi+, Phi-] = {} (valuation {}), {} digits, {:.1} s", w["value"], w["valuation"], prec, secs))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("pairing formula oracle", criterion_1),
        ("classical binomials", criterion_2),
        ("zeta closed forms", criterion_3),
        ("slope machinery", || {
            suites(&[
                ("200 random instances", slope_suite::check_random_slope_instances),
                ("disk specialization", slope_suite::check_disk_projector_specializes),
            ])
        }),
        ("control theorem, level 33", || suites(&[("rho bijection, U_3 charpoly mod 3^10", modsym_suite::check_control_theorem_level_33_weight_2)])),
        ("T-series at (2,0)", || suites(&[("expansion around e", pairing_suite::check_t_series_matches_classical_expansion)])),
        ("family pairing", || suites(&[("self-adjointness, specialization, signs", family_suite::check_family_pairing_level_33)])),
        ("adjoint ideal calculus", criterion_8),
        ("end-to-end pair", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match res {
            Ok(m) => println!("criterion {} PASS {} ({:.1} s): {}", i + 1, name, t, m),
            Err(m) => {
                failed += 1;
                println!("criterion {} FAIL {} ({:.1} s): {}", i + 1, name, t, m);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
