use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padj::adjoint::*;
use padj::ring::{rank, Mat, Ring, QQ};
use padj::slope::{rank_local, slope_datum};
use padj::weightspace::PAdicField;
use padj::Error;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn corpus() -> Vec<AlgebraExample> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../examples/algebras");
    let mut paths: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| load_algebra(&std::fs::read_to_string(p).unwrap()).unwrap()).collect()
}

fn example(name: &str) -> AlgebraExample {
    corpus().into_iter().find(|e| e.name == name).unwrap()
}

/// Flat element from R-level integer coefficient lists.
fn elt(t: &FiniteAlgebra, c: &[&[i64]]) -> Vec<Q> {
    let r: Vec<Vec<Q>> = c.iter().map(|x| t.base.reduce(&x.iter().map(|v| q(*v)).collect::<Vec<_>>())).collect();
    t.flat(&r)
}

fn random_functional(t: &FiniteAlgebra, rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    (0..t.rank).map(|_| (0..t.base.dim()).map(|_| q(rng.gen_range(-3..4))).collect()).collect()
}

#[test]
fn corpus_is_large_enough() {
    check_corpus_is_large_enough();
}

pub fn check_corpus_is_large_enough() {
    let c = corpus();
    assert!(c.len() >= 7);
    assert!(c.iter().any(|e| e.gorenstein == Some(false)));
    for e in &c {
        check_maximal_ideals(&e.t, &e.maximal_ideals()).unwrap();
    }
}

#[test]
fn kernel_examples() {
    let trivial = example("trivial");
    let k = kernel_of_multiplication(&trivial.t).unwrap();
    assert_eq!(k.space.dim(), 0);

    let rq = example("ramified_quadratic");
    let k = kernel_of_multiplication(&rq.t).unwrap();
    assert_eq!(k.space.dim(), 6);
    assert!(k.standard_spans);

    // R x R: I is spanned by e1 x e2 and e2 x e1 over R = Q[w]/(w^2)
    let split = example("split");
    let k = kernel_of_multiplication(&split.t).unwrap();
    assert_eq!(k.space.dim(), 4);
    for c in corpus() {
        assert!(kernel_of_multiplication(&c.t).unwrap().standard_spans, "{}", c.name);
    }
}

#[test]
fn noether_different_examples() {
    let rq = example("ramified_quadratic");
    let t = &rq.t;
    let dn = noether_different(t).unwrap();
    assert_eq!(dn, t.ideal(&[elt(t, &[&[0], &[2]])]));
    for name in ["trivial", "split", "real_quadratic"] {
        let e = example(name);
        assert_eq!(noether_different(&e.t).unwrap(), QSpace::whole(e.t.dim_q()), "{}", name);
    }
}

#[test]
fn noether_different_is_derivative_for_monogenic() {
    for e in corpus() {
        if let Some(f) = &e.monogenic {
            let want = e.t.ideal(&[derivative_elt(&e.t, f)]);
            assert_eq!(noether_different(&e.t).unwrap(), want, "{}", e.name);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for base in [BaseRing::truncated(2), BaseRing::new(vec![q(0), q(-1), q(0), q(1)]).unwrap(), BaseRing::rational()] {
        for _ in 0..12 {
            let n = rng.gen_range(1..4);
            let mut f: Vec<Vec<Q>> = (0..n).map(|_| (0..base.dim()).map(|_| q(rng.gen_range(-3..4))).collect()).collect();
            f.push(base.scalar(Q::one()));
            let t = FiniteAlgebra::monogenic(base.clone(), &f).unwrap();
            assert_eq!(noether_different(&t).unwrap(), t.ideal(&[derivative_elt(&t, &f)]));
        }
    }
}

#[test]
fn scalar_product_examples() {
    // trace form on an etale algebra
    let split = example("split");
    let t = &split.t;
    let reg = FiniteModule::regular(t);
    let one = vec![t.base.one(); 2];
    let tr = Pairing::from_functional(t, &one);
    assert_eq!(scalar_product_ideal(t, &reg, &reg, &tr).unwrap(), QSpace::whole(t.dim_q()));
    // zero pairing
    let rq = example("ramified_quadratic");
    let t = &rq.t;
    let reg = FiniteModule::regular(t);
    let zero = Pairing::zero(t, 2, 2);
    assert_eq!(scalar_product_ideal(t, &reg, &reg, &zero).unwrap().dim(), 0);
    // a nondegenerate equivariant form on R[y]/(y^2 - w)
    let phi = rq.pairing.clone().unwrap();
    assert!(phi.is_nondegenerate(&t.base));
    let d = scalar_product_ideal(t, &rq.modules[0], &rq.modules[1], &phi).unwrap();
    assert_eq!(d, t.ideal(&[elt(t, &[&[0], &[2]])]));
    assert_eq!(d, noether_different(t).unwrap());
}

#[test]
fn non_equivariant_pairing_rejected() {
    let rq = example("ramified_quadratic");
    let t = &rq.t;
    let reg = FiniteModule::regular(t);
    let r = &t.base;
    let bad = Pairing { gram: vec![vec![r.one(), r.zero()], vec![r.zero(), r.zero()]] };
    assert!(matches!(scalar_product_ideal(t, &reg, &reg, &bad), Err(Error::Invalid(_))));
}

#[test]
fn bad_presentations_rejected() {
    let r = BaseRing::rational();
    let z = || vec![q(0)];
    let o = || vec![q(1)];
    // e1^2 = e1 + e2 but e2 e1 = 0: not commutative
    let mult = vec![vec![vec![o(), z()], vec![z(), o()]], vec![vec![z(), z()], vec![z(), z()]]];
    assert!(FiniteAlgebra::new(r.clone(), 2, mult, vec![o(), z()]).is_err());
    // module: y acting by a matrix whose square is not w (= 0 here)
    let t = FiniteAlgebra::monogenic(r.clone(), &[z(), z(), o()]).unwrap();
    let act = vec![vec![vec![o(), z()], vec![z(), o()]], vec![vec![o(), z()], vec![z(), o()]]];
    assert!(FiniteModule::new(&t, 2, act).is_err());
    // point that is not an algebra map
    let pt = AlgebraPoint { w: q(0), values: vec![q(1), q(1)] };
    assert!(ramification_test(&t, &pt).is_err());
    let bad_w = AlgebraPoint { w: q(2), values: vec![q(1), q(0)] };
    assert!(bad_w.check(&t).is_err());
}

/// phi(x, xi) = xi(t x) between T and its R-dual; every equivariant pairing has this form.
fn dual_pairing(t: &FiniteAlgebra, s: &[Vec<Q>]) -> Pairing {
    let r = &t.base;
    let gram = (0..t.rank)
        .map(|a| {
            (0..t.rank)
                .map(|b| (0..t.rank).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(&s[k], &t.mult[k][a][b]))))
                .collect()
        })
        .collect();
    Pairing { gram }
}

#[test]
fn scalar_product_inside_noether_different() {
    check_scalar_product_inside_noether_different();
}

pub fn check_scalar_product_inside_noether_different() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut strict = 0;
    for e in corpus() {
        let t = &e.t;
        let dn = noether_different(t).unwrap();
        let reg = FiniteModule::regular(t);
        let dual = FiniteModule::dual(t);
        for _ in 0..6 {
            let lam = random_functional(t, &mut rng);
            let phi = Pairing::from_functional(t, &lam);
            let d = scalar_product_ideal(t, &reg, &reg, &phi).unwrap();
            assert!(dn.contains_space(&d), "{}", e.name);
            if phi.is_nondegenerate(&t.base) {
                assert_eq!(d, dn, "{}", e.name);
            } else if d != dn {
                strict += 1;
            }
            let s = random_functional(t, &mut rng);
            let psi = dual_pairing(t, &s);
            let d = scalar_product_ideal(t, &reg, &dual, &psi).unwrap();
            assert!(dn.contains_space(&d), "{}", e.name);
        }
    }
    // degenerate forms really can shrink the ideal
    assert!(strict > 0);
}

#[test]
fn gorenstein_equality_and_principality() {
    check_gorenstein_equality_and_principality();
}

pub fn check_gorenstein_equality_and_principality() {
    for e in corpus() {
        if e.gorenstein != Some(true) {
            continue;
        }
        let t = &e.t;
        let phi = e.pairing.clone().unwrap();
        assert!(phi.is_nondegenerate(&t.base), "{}", e.name);
        let dn = noether_different(t).unwrap();
        let l = adjoint_l_generator(t, &e.modules[0], &e.modules[1], &phi).unwrap();
        assert_eq!(l.ideal, dn, "{}", e.name);
        assert_eq!(t.ideal(std::slice::from_ref(&l.generator)), dn, "{}", e.name);
        for (b, c) in l.ideal.basis.iter().zip(&l.certificate) {
            assert_eq!(&t.mul_q(&l.generator, c), b);
        }
    }
}

#[test]
fn ramification_matches_kahler_everywhere() {
    check_ramification_matches_kahler_everywhere();
}

pub fn check_ramification_matches_kahler_everywhere() {
    for e in corpus() {
        let t = &e.t;
        for pt in &e.points {
            assert_eq!(ramification_test(t, pt).unwrap(), is_ramified_at(t, &pt.ideal(t)).unwrap());
        }
        for m in e.maximal_ideals() {
            assert_eq!(is_ramified_at(t, &m).unwrap(), !kahler_unramified(t, &m).unwrap(), "{}", e.name);
            // a ramified prime contains every scalar-product ideal
            if let Some(phi) = &e.pairing {
                let d = scalar_product_ideal(t, &e.modules[0], &e.modules[1], phi).unwrap();
                if is_ramified_at(t, &m).unwrap() {
                    assert!(m.contains_space(&d), "{}", e.name);
                }
            }
        }
    }
}

#[test]
fn ramification_test_examples() {
    let rq = example("ramified_quadratic");
    assert!(ramification_test(&rq.t, &AlgebraPoint { w: q(0), values: vec![q(1), q(0)] }).unwrap());
    let tp = example("two_points");
    assert!(!ramification_test(&tp.t, &AlgebraPoint { w: q(1), values: vec![q(1), q(1)] }).unwrap());
    assert!(ramification_test(&tp.t, &AlgebraPoint { w: q(0), values: vec![q(1), q(0)] }).unwrap());
    let tr = example("trivial");
    assert!(!ramification_test(&tr.t, &tr.points[0]).unwrap());
}

#[test]
fn adjoint_l_zero_set_is_ramification_locus() {
    check_adjoint_l_zero_set_is_ramification_locus();
}

pub fn check_adjoint_l_zero_set_is_ramification_locus() {
    for e in corpus() {
        if e.gorenstein != Some(true) {
            continue;
        }
        let t = &e.t;
        let l = adjoint_l_generator(t, &e.modules[0], &e.modules[1], e.pairing.as_ref().unwrap()).unwrap();
        for m in e.maximal_ideals() {
            assert_eq!(m.contains(&l.generator), is_ramified_at(t, &m).unwrap(), "{}", e.name);
        }
        for pt in &e.points {
            assert_eq!(pt.eval(t, &l.generator).is_zero(), ramification_test(t, pt).unwrap());
        }
    }
    // etale: a unit
    let split = example("split");
    let l = adjoint_l_generator(&split.t, &split.modules[0], &split.modules[1], split.pairing.as_ref().unwrap()).unwrap();
    assert_eq!(l.ideal, QSpace::whole(split.t.dim_q()));
    // R[y]/(y^2 - w): 2y up to a unit
    let rq = example("ramified_quadratic");
    let t = &rq.t;
    let l = adjoint_l_generator(t, &rq.modules[0], &rq.modules[1], rq.pairing.as_ref().unwrap()).unwrap();
    let two_y = elt(t, &[&[0], &[2]]);
    assert!(divide(t, &two_y, &l.generator).is_some() && divide(t, &l.generator, &two_y).is_some());
}

#[test]
fn non_principal_is_reported() {
    let e = example("three_branches");
    let t = &e.t;
    let dn = noether_different(t).unwrap();
    assert!(principal_generator(t, &dn).is_none());
    assert_eq!(minimal_generators(t, &dn).len(), 3);
    match adjoint_l_generator(t, &e.modules[0], &e.modules[1], e.pairing.as_ref().unwrap()) {
        Err(Error::Domain(msg)) => assert!(msg.contains("2 generators")),
        other => panic!("{:?}", other.map(|l| l.generator)),
    }
    let ng = example("non_gorenstein");
    let small = FiniteModule { rank: 1, action: vec![vec![vec![vec![q(1)]]]; 3] };
    assert!(matches!(
        adjoint_l_generator(&ng.t, &small, &ng.modules[0], &Pairing::zero(&ng.t, 1, 3)),
        Err(Error::Domain(_))
    ));
}

#[test]
fn base_change_commutes() {
    let cases: Vec<(&str, Vec<Q>)> = vec![
        ("ramified_quadratic", vec![q(0), q(0), q(1)]),
        ("ramified_quadratic", vec![q(0), q(1)]),
        ("two_points", vec![q(-1), q(1)]),
        ("two_points", vec![q(0), q(0), q(1)]),
        ("three_branches", vec![q(0), q(0), q(1)]),
        ("split", vec![q(0), q(1)]),
    ];
    for (name, h) in cases {
        let e = example(name);
        let t = &e.t;
        let base2 = t.base.quotient(h).unwrap();
        let t2 = t.base_change(&base2).unwrap();
        let phi = e.pairing.clone().unwrap();
        let phi2 = Pairing { gram: phi.gram.iter().map(|row| row.iter().map(|c| base2.reduce(c)).collect()).collect() };
        let m2: Vec<FiniteModule> = e
            .modules
            .iter()
            .map(|m| {
                let act = m.action.iter().map(|a| a.iter().map(|row| row.iter().map(|c| base2.reduce(c)).collect()).collect()).collect();
                FiniteModule::new(&t2, m.rank, act).unwrap()
            })
            .collect();
        let d = scalar_product_ideal(t, &e.modules[0], &e.modules[1], &phi).unwrap();
        let d2 = scalar_product_ideal(&t2, &m2[0], &m2[1], &phi2).unwrap();
        let image = t2.ideal(&d.basis.iter().map(|b| t.reduce_to(&t2, b)).collect::<Vec<_>>());
        assert_eq!(d2, image, "{}", name);
    }
}

#[test]
fn rational_base_domain_regime() {
    // R = Q is a domain; every statement applies literally
    for name in ["real_quadratic", "node", "non_gorenstein"] {
        let e = example(name);
        assert_eq!(e.t.base, BaseRing::rational());
        let dn = noether_different(&e.t).unwrap();
        let d = scalar_product_ideal(&e.t, &e.modules[0], &e.modules[1], e.pairing.as_ref().unwrap()).unwrap();
        assert!(dn.contains_space(&d));
    }
}

fn specialize(h: &[Vec<Vec<Q>>], base: &BaseRing, w0: &Q, f: &PAdicField) -> Mat<padj::padic::PAdic> {
    Mat::from_fn(h.len(), h.len(), |i, j| padj::padic::PAdic::from_rational(f.p, &base.eval(&h[i][j], w0), f.prec))
}

/// Every slope piece of the 2x2 matrix H(w0) has distinct roots.
fn slope_pieces_simple(h: &Mat<padj::padic::PAdic>, f: &PAdicField) -> bool {
    let cp = padj::ring::charpoly(f, h);
    let segs = padj::slope::newton_polygon(f, &cp).unwrap();
    if segs.iter().all(|s| s.mult == 1) {
        return true;
    }
    // one piece of rank 2: its roots are distinct iff the discriminant is nonzero
    let disc = cp[1].mul(&cp[1]).sub(&cp[0].scale_int(4));
    !disc.is_zero()
}

#[test]
fn glued_pipeline() {
    // H = [[1, 1], [w, 1]] over R = Q[w]/(w^2 (w - 4)), self-adjoint for the hyperbolic form
    let base = BaseRing::new(vec![q(0), q(0), q(-4), q(1)]).unwrap();
    let r = &base;
    let h = vec![vec![r.one(), r.one()], vec![r.w(), r.one()]];
    let (t, m) = hecke_algebra(&base, &h).unwrap();
    let phi = Pairing { gram: vec![vec![r.zero(), r.one()], vec![r.one(), r.zero()]] };
    assert!(phi.is_nondegenerate(r));
    let l = adjoint_l_generator(&t, &m, &m, &phi).unwrap();
    let points = [
        AlgebraPoint { w: q(0), values: vec![q(1), q(1)] },
        AlgebraPoint { w: q(4), values: vec![q(1), q(3)] },
        AlgebraPoint { w: q(4), values: vec![q(1), q(-1)] },
    ];
    check_maximal_ideals(&t, &points.iter().map(|p| p.ideal(&t)).collect::<Vec<_>>()).unwrap();
    let f = PAdicField { p: 3, prec: 30 };
    let mut seen = (false, false);
    for pt in &points {
        let nonzero = !pt.eval(&t, &l.generator).is_zero();
        assert_eq!(nonzero, !ramification_test(&t, pt).unwrap());
        let hx = specialize(&h, r, &pt.w, &f);
        let etale = slope_pieces_simple(&hx, &f);
        assert_eq!(nonzero, etale, "w = {}", pt.w);
        // slope <= 1/2 part: rank 2 at the double root, rank 1 where 3 and -1 split off
        let p = slope_datum(&f, &hx, &Q::new(1.into(), 2.into())).unwrap().projector;
        assert_eq!(rank_local(&f, &p), if etale { 1 } else { 2 });
        if etale {
            seen.0 = true
        } else {
            seen.1 = true
        }
    }
    assert!(seen.0 && seen.1);
    assert_eq!(rank(&QQ, &Mat::from_rows(l.ideal.basis.clone())), l.ideal.dim());
}
