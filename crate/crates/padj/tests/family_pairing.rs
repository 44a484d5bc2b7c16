use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padj::finmod::{mat_vec_mod, Submodule};
use padj::modsym::classical::VCoeffZp;
use padj::modsym::family::{ordinary_cuspidal, DistSymbolSpace};
use padj::modsym::{Presentation, SymbolSpace};
use padj::pairing::{twisted_pairing_generic, FamilyPairing};
use padj::polyrep::WeightPoint;
use padj::ring::{Ring, Zpk};
use padj::weightspace::WeightDisk;

fn random_element(sub: &Submodule, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let z = sub.z;
    let mut v = vec![0u64; sub.dim];
    for r in &sub.rows {
        let c = rng.gen_range(0..z.m);
        for (x, y) in v.iter_mut().zip(r) {
            *x = z.addm(*x, z.mulm(c, *y));
        }
    }
    v
}

fn add(z: &Zpk, a: &[u64], b: &[u64], s: i64) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| if s > 0 { z.addm(*x, *y) } else { z.subm(*x, *y) }).collect()
}

/// Free values of rho(Phi) at u = u0 for weight n: moments 0..=n, mod p^N.
fn specialize(fs: &DistSymbolSpace, v: &[u64], u0: u64, n: usize) -> Vec<u64> {
    let z = fs.zn;
    let g = fs.g();
    let mut out = vec![0u64; g * (n + 1)];
    for f in 0..g {
        for j in 0..=n {
            let sc = z.pow_p(fs.n - fs.caps[j]);
            let mut acc = 0u64;
            let mut up = 1u64;
            for i in 0..fs.m_u {
                let mu = v[fs.index(f, j, i, g)] / sc;
                acc = z.addm(acc, z.mulm(mu, up));
                up = z.mulm(up, u0);
            }
            out[f * (n + 1) + j] = acc;
        }
    }
    out
}

#[test]
fn family_pairing_level_33() {
    check_family_pairing_level_33();
}

pub fn check_family_pairing_level_33() {
    let n = 10;
    let pres = Rc::new(Presentation::new(33));
    let disk = WeightDisk::with_scale(3, WeightPoint::new(0, 0), n as i64, 4, 1).unwrap();
    let fs = DistSymbolSpace::family(pres.clone(), &disk, n).unwrap();
    let z = fs.zn;
    let (cusp, u3) = ordinary_cuspidal(&fs, 2, 3).unwrap();
    let t2 = fs.hecke(2).unwrap();
    let t5 = fs.hecke(5).unwrap();
    let iota = fs.iota().unwrap();
    let fp = FamilyPairing::new(&fs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut nonzero = false;
    for _ in 0..3 {
        let a = random_element(&cusp, &mut rng);
        let b = random_element(&cusp, &mut rng);
        for t in [&t2, &t5, &u3] {
            let lhs = fp.pair(&mat_vec_mod(&z, t, &a), &b);
            let rhs = fp.pair(&a, &mat_vec_mod(&z, t, &b));
            assert_eq!(lhs, rhs);
        }
        let (ia, ib) = (mat_vec_mod(&z, &iota, &a), mat_vec_mod(&z, &iota, &b));
        let (ap, am) = (add(&z, &a, &ia, 1), add(&z, &a, &ia, -1));
        let (bp, bm) = (add(&z, &b, &ib, 1), add(&z, &b, &ib, -1));
        assert!(fp.pair(&ap, &bp).iter().all(|x| *x == 0));
        assert!(fp.pair(&am, &bm).iter().all(|x| *x == 0));
        nonzero |= fp.pair(&ap, &bm).iter().any(|x| *x != 0);

        // u = 0 is weight (0, 0)
        let cl = SymbolSpace::new(pres.clone(), VCoeffZp { weight: WeightPoint::new(0, 0), ring: z });
        let want = twisted_pairing_generic(&cl, &specialize(&fs, &a, 0, 0), &specialize(&fs, &b, 0, 0));
        assert_eq!(fp.pair(&a, &b)[0], want);

        // lambda1 = 18: u = (4^18 - 1)/3 has valuation 2, so the u^4 tail costs 8 digits
        let lam = WeightPoint::new(18, 0);
        let u0 = z.from_rational(&disk.point_of(lam).unwrap()).unwrap();
        assert_eq!(z.val(u0), 2);
        let cl = SymbolSpace::new(pres.clone(), VCoeffZp { weight: lam, ring: z });
        let want = twisted_pairing_generic(&cl, &specialize(&fs, &a, u0, 18), &specialize(&fs, &b, u0, 18));
        let got = fp.pair_at(&a, &b, u0);
        assert!(z.val(z.sub(&got, &want)) >= 8, "{} vs {}", got, want);
    }
    assert!(nonzero);
}
