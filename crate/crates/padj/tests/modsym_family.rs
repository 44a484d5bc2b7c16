use std::rc::Rc;

use padj::finmod::{charpoly_mod, Submodule};
use padj::modsym::classical::VCoeffZp;
use padj::modsym::family::{ordinary_cuspidal, DistSymbolSpace};
use padj::modsym::{hecke_terms, up_terms, Presentation, SymbolSpace};
use padj::polyrep::WeightPoint;
use padj::ring::{Mat, Ring, Zpk};

/// Classical V_lambda symbols mod p^N with the same presentation.
fn classical_module(pres: Rc<Presentation>, lam: WeightPoint, z: Zpk) -> (Submodule, Mat<u64>, Mat<u64>) {
    let sp = SymbolSpace::new(pres, VCoeffZp { weight: lam, ring: z });
    let c = sp.constraint_matrix();
    let h = Submodule::full(z, sp.total_dim()).kernel(&c);
    let u = sp.operator(&up_terms(3));
    let t = sp.operator(&hecke_terms(2));
    (h, u, t)
}

fn minus_scalar(z: &Zpk, a: &Mat<u64>, e: i64) -> Mat<u64> {
    let mut b = a.clone();
    for i in 0..b.rows {
        let v = z.sub(b.at(i, i), &z.from_i64(e));
        b.set(i, i, v);
    }
    b
}

#[test]
fn control_theorem_level_33_weight_2() {
    check_control_theorem_level_33_weight_2();
}

pub fn check_control_theorem_level_33_weight_2() {
    let pres = Rc::new(Presentation::new(33));
    let lam = WeightPoint::new(0, 0);
    let n = 10;
    let ds = DistSymbolSpace::classical(pres.clone(), 3, lam, n).unwrap();
    assert_eq!(ds.ambient_dim(), 90);
    let (dcusp, du) = ordinary_cuspidal(&ds, 2, 3).unwrap();
    let z = ds.zn;
    let (cl, cu, ct) = classical_module(pres, lam, z);
    let (cord, _) = cl.fitting(&cu);
    let (ccusp, _) = cord.fitting(&minus_scalar(&z, &ct, 3));
    let rho = ds.rho_matrix().unwrap();
    let img = dcusp.image(&rho);
    assert_eq!(img, ccusp);
    assert_eq!(dcusp.length(), ccusp.length());
    assert_eq!(ccusp.length(), 4 * n);
    let a = ds.charpoly_on(&dcusp, &du).unwrap();
    let b = charpoly_mod(&z, &ccusp.restrict(&cu).unwrap());
    assert_eq!(a, b);
    // ordinary: the determinant of U3 is a unit
    assert_ne!(a[0] % 3, 0);
}

#[test]
fn family_level_33_ordinary_cusp() {
    use padj::weightspace::WeightDisk;
    let pres = Rc::new(Presentation::new(33));
    let disk = WeightDisk::with_scale(3, WeightPoint::new(0, 0), 10, 4, 1).unwrap();
    let fs = DistSymbolSpace::family(pres, &disk, 10).unwrap();
    let (cusp, u) = ordinary_cuspidal(&fs, 2, 3).unwrap();
    assert_eq!(cusp.length(), 4 * 4 * 10);
    let cp = fs.charpoly_on(&cusp, &u).unwrap();
    assert_ne!(cp[0] % 3, 0);
}
