//! Scenario runners for the command line: config validation, computation,
//! JSON/CSV reports. Reports carry no timestamps, so reruns are byte-identical.

use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::adjoint::{self, AlgebraExample, FiniteAlgebra, QSpace};
use crate::error::{Error, Result};
use crate::finmod::{mat_vec_mod, Submodule};
use crate::modsym::classical::{smallest_good_prime, ClassicalSpace, VCoeffZp};
use crate::modsym::family::{ordinary_cuspidal, DistSymbolSpace};
use crate::modsym::{Presentation, SymbolSpace};
use crate::padic::PAdic;
use crate::pairing::{twisted_pairing_generic, FamilyPairing};
use crate::polyrep::WeightPoint;
use crate::ring::{charpoly, Mat, QQ};
use crate::slope::{newton_polygon, parse_nu, rank_local, slope_datum};
use crate::weightspace::{PAdicField, WeightDisk};
use crate::zeta::{zeta_row, LocalParams};

pub const DEFAULT_N: i64 = 10;
pub const DEFAULT_M: usize = 4;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionOverrides {
    #[serde(rename = "N", default)]
    pub n: Option<i64>,
    #[serde(rename = "M", default)]
    pub m: Option<usize>,
}

/// {scenario, params, output?, format?, precision?: {N, M}}
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub precision: PrecisionOverrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub level: i64,
    pub p: u64,
    pub k: i64,
    pub nu: String,
    #[serde(default)]
    pub ell: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaParams {
    pub alpha: String,
    pub beta: String,
    pub q: u64,
    #[serde(default)]
    pub terms: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentParams {
    pub algebra: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeParams {
    pub p: u64,
    pub nu: String,
    /// Square matrix of rationals, rows first.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsParams {
    pub p: u64,
    #[serde(default)]
    pub center: [i64; 2],
    /// lambda1 values to place on the disk; default: six classical weights from the center.
    #[serde(default)]
    pub lambdas: Option<Vec<i64>>,
}

/// A finished report: JSON value plus the CSV rendering.
pub struct Report {
    pub json: serde_json::Value,
    pub csv: String,
    pub default_format: Format,
}

impl Report {
    pub fn render(&self, f: Option<Format>) -> String {
        match f.unwrap_or(self.default_format) {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("report serializes") + "\n",
            Format::Csv => self.csv.clone(),
        }
    }
}

fn params<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("params: {}", e)))
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("report serializes")
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    let n = cfg.precision.n.unwrap_or(DEFAULT_N);
    let m = cfg.precision.m.unwrap_or(DEFAULT_M);
    if !(1..=60).contains(&n) || m == 0 || m > 16 {
        return Err(Error::Invalid("precision N must be in 1..=60 and M in 1..=16".into()));
    }
    match cfg.scenario.as_str() {
        "pair" => {
            let r = run_pair(&params(&cfg.params)?, n as u32, m)?;
            let csv = format!(
                "level,family_level,p,k,nu,ell,ordinary_rank,witness_value,witness_valuation,precision\n{},{},{},{},{},{},{},{},{},{}\n",
                r.level, r.family_level, r.p, r.k, r.nu, r.ell, r.ordinary_rank, r.witness.value, r.witness.valuation, r.witness.precision
            );
            Ok(Report { json: to_value(&r), csv, default_format: Format::Json })
        }
        "zeta" => {
            let z: ZetaParams = params(&cfg.params)?;
            let prm = LocalParams::new(z.q, parse_rational(&z.alpha)?, parse_rational(&z.beta)?)?;
            let row = zeta_row(&prm, z.terms.unwrap_or(60))?;
            let csv = format!(
                "alpha,beta,q,i1,i2,psi,e_p,truncation_error\n{},{},{},{},{},{},{},{:e}\n",
                row.alpha, row.beta, row.q, row.i1, row.i2, row.psi, row.e_p, row.truncation_error
            );
            Ok(Report { json: to_value(&row), csv, default_format: Format::Csv })
        }
        "different" => {
            let d: DifferentParams = params(&cfg.params)?;
            let text = std::fs::read_to_string(&d.algebra).map_err(|e| Error::Invalid(format!("{}: {}", d.algebra, e)))?;
            let r = run_different(&adjoint::load_algebra(&text)?)?;
            let csv = format!(
                "name,noether_different,principal,scalar_product_ideal,adjoint_l\n{},{},{},{},{}\n",
                r.name,
                r.noether_different.generators.join(" "),
                r.noether_different.principal,
                r.scalar_product_ideal.as_ref().map_or(String::new(), |s| s.generators.join(" ")),
                r.adjoint_l.clone().unwrap_or_default()
            );
            Ok(Report { json: to_value(&r), csv, default_format: Format::Json })
        }
        "slope" => {
            let r = run_slope(&params(&cfg.params)?, n)?;
            let mut csv = String::from("slope,multiplicity\n");
            for s in &r.newton_polygon {
                csv += &format!("{},{}\n", s.slope, s.multiplicity);
            }
            Ok(Report { json: to_value(&r), csv, default_format: Format::Json })
        }
        "weights" => {
            let r = run_weights(&params(&cfg.params)?, n, m)?;
            let mut csv = String::from("lambda1,lambda2,in_disk,u,u_valuation\n");
            for w in &r.points {
                csv += &format!("{},{},{},{},{}\n", w.lambda1, w.lambda2, w.in_disk, w.u.clone().unwrap_or_default(), w.u_valuation.map_or(String::new(), |v| v.to_string()));
            }
            Ok(Report { json: to_value(&r), csv, default_format: Format::Json })
        }
        s => Err(Error::Invalid(format!("unknown scenario {:?}", s))),
    }
}

/// Exit code for a failed scenario.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precision { .. } => 3,
        Error::Contract(_) => 4,
        _ => 2,
    }
}

/// Machine-readable error report.
pub fn error_json(e: &Error) -> String {
    let (kind, module) = match e {
        Error::Domain(_) => ("domain", None),
        Error::Precision { module, .. } => ("precision", Some(*module)),
        Error::WeightMismatch(_) => ("weight_mismatch", None),
        Error::NotInvertible(_) => ("not_invertible", None),
        Error::Unsupported(_) => ("unsupported", None),
        Error::Contract(_) => ("contract", None),
        Error::NotAdapted(_) => ("not_adapted", None),
        Error::Invalid(_) => ("config", None),
    };
    let v = serde_json::json!({"error": {"kind": kind, "module": module, "message": e.to_string(), "exit_code": exit_code(e)}});
    serde_json::to_string(&v).expect("error serializes") + "\n"
}

fn parse_rational(s: &str) -> Result<BigRational> {
    adjoint::parse_q(s)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

// -- pair --

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub plus_index: usize,
    pub minus_index: usize,
    /// Symmetric residue mod p^precision.
    pub value: String,
    pub valuation: u32,
    /// The value is known modulo p^precision.
    pub precision: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub level: i64,
    pub family_level: i64,
    pub p: u64,
    pub k: i64,
    pub nu: String,
    pub ell: i64,
    pub precision_n: u32,
    pub precision_m: usize,
    /// Slopes of U_p on classical cusp symbols at the center, with multiplicity.
    pub classical_slopes: Vec<String>,
    pub ordinary_rank: usize,
    pub plus_rank: usize,
    pub minus_rank: usize,
    /// [Phi+_i, Phi-_j] at the classical point u = 0.
    pub gram_classical: Vec<Vec<String>>,
    /// u-expansion of [Phi+_0, Phi-_0], low order first.
    pub gram_series_00: Vec<String>,
    pub classical_match: bool,
    pub same_sign_vanishes: bool,
    pub nonzero: bool,
    pub witness: Witness,
}

fn sign_part(z: &crate::ring::Zpk, sub: &Submodule, iota: &Mat<u64>, eps: i64) -> Submodule {
    let gens = sub
        .rows
        .iter()
        .map(|r| {
            let ir = mat_vec_mod(z, iota, r);
            r.iter().zip(&ir).map(|(a, b)| if eps > 0 { z.addm(*a, *b) } else { z.subm(*a, *b) }).collect()
        })
        .collect();
    Submodule::span(*z, sub.dim, gens)
}

fn mul_u(fs: &DistSymbolSpace, v: &[u64]) -> Vec<u64> {
    let g = fs.g();
    let mut out = vec![0u64; v.len()];
    for f in 0..g {
        for j in 0..fs.nmom() {
            for i in 0..fs.m_u - 1 {
                out[fs.index(f, j, i + 1, g)] = v[fs.index(f, j, i, g)];
            }
        }
    }
    out
}

/// Rows of `sub` forming a basis over the disk ring: each is kept unless it
/// lies in the span of the u-multiples of those already kept.
fn disk_basis(fs: &DistSymbolSpace, sub: &Submodule) -> Vec<Vec<u64>> {
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    let mut span = Submodule::zero(sub.z, sub.dim);
    for r in &sub.rows {
        if span.contains(r) {
            continue;
        }
        let mut gens = span.rows.clone();
        let mut x = r.clone();
        for _ in 0..fs.m_u {
            gens.push(x.clone());
            x = mul_u(fs, &x);
        }
        span = Submodule::span(sub.z, sub.dim, gens);
        chosen.push(r.clone());
    }
    chosen
}

/// Free values of the weight-`n` specialization at u = u0.
pub fn specialize_family(fs: &DistSymbolSpace, v: &[u64], u0: u64, n: usize) -> Vec<u64> {
    let z = fs.zn;
    let g = fs.g();
    let mut out = vec![0u64; g * (n + 1)];
    for f in 0..g {
        for j in 0..=n {
            let sc = z.pow_p(fs.n - fs.caps[j]);
            let mut acc = 0u64;
            let mut up = 1u64;
            for i in 0..fs.m_u {
                acc = z.addm(acc, z.mulm(v[fs.index(f, j, i, g)] / sc, up));
                up = z.mulm(up, u0);
            }
            out[f * (n + 1) + j] = acc;
        }
    }
    out
}

pub fn run_pair(prm: &PairParams, n: u32, m: usize) -> Result<PairReport> {
    let p = prm.p;
    if !is_prime(p) || p == 2 {
        return Err(Error::Invalid(format!("p = {} must be an odd prime", p)));
    }
    if prm.level < 1 || prm.level % p as i64 == 0 {
        return Err(Error::Invalid("tame level must be positive and prime to p".into()));
    }
    if prm.k != 2 || prm.ell != 0 {
        return Err(Error::Unsupported("the family runner covers the k = 2, ell = 0 disk".into()));
    }
    let nu = parse_nu(&prm.nu)?;
    if nu >= BigRational::from_integer((prm.k - 1).into()) || nu.is_negative() {
        return Err(Error::Domain("nu must satisfy 0 <= nu < k - 1".into()));
    }
    let center = WeightPoint::new(prm.k - 2 + prm.ell, prm.ell);
    let family_level = prm.level * p as i64;
    let pres = Rc::new(Presentation::new(family_level));

    // classical side: slopes of U_p on cusp symbols
    let cs = ClassicalSpace::with_presentation(pres.clone(), center)?;
    let cusp_cl = cs.cuspidal_coords()?;
    let up_cl = cs.restrict_to(&cs.hecke(p as i64)?, &cusp_cl)?;
    let field = PAdicField { p, prec: 4 * n as i64 + 20 };
    let cp = charpoly(&QQ, &up_cl);
    let cpp: Vec<PAdic> = cp.iter().map(|c| PAdic::from_rational(p, c, field.prec)).collect();
    let segs = newton_polygon(&field, &cpp)?;
    let mut classical_slopes = Vec::new();
    let mut ord_cl = 0;
    for s in &segs {
        for _ in 0..s.mult {
            classical_slopes.push(s.slope.to_string());
        }
        if s.slope <= nu {
            if !s.slope.is_zero() {
                return Err(Error::Unsupported("slope <= nu part is larger than the ordinary part".into()));
            }
            ord_cl += s.mult;
        }
    }

    // family side
    let disk = WeightDisk::with_scale(p, center, n as i64, m, 1)?;
    let fs = DistSymbolSpace::family(pres.clone(), &disk, n)?;
    let z = fs.zn;
    let q = smallest_good_prime(family_level);
    let (cusp, _u) = ordinary_cuspidal(&fs, q, 1 + q)?;
    if !cusp.is_free_with_unit_pivots() {
        return Err(Error::Contract("ordinary cuspidal family module is not free".into()));
    }
    let rank = cusp.rows.len() / m;
    if rank != ord_cl {
        return Err(Error::Contract(format!("family rank {} but {} classical ordinary symbols", rank, ord_cl)));
    }
    let iota = fs.iota()?;
    let plus_mod = sign_part(&z, &cusp, &iota, 1);
    let minus_mod = sign_part(&z, &cusp, &iota, -1);
    let plus = disk_basis(&fs, &plus_mod);
    let minus = disk_basis(&fs, &minus_mod);
    if plus.len() * m != plus_mod.rows.len() || minus.len() * m != minus_mod.rows.len() {
        return Err(Error::Contract("sign parts are not free over the disk ring".into()));
    }
    let fp = FamilyPairing::new(&fs)?;

    let mut same_sign_vanishes = true;
    for (a, b) in [(&plus, &plus), (&minus, &minus)] {
        for x in a.iter() {
            for y in b.iter() {
                same_sign_vanishes &= fp.pair(x, y).iter().all(|c| *c == 0);
            }
        }
    }
    let cl = SymbolSpace::new(pres, VCoeffZp { weight: center, ring: z });
    let nn = center.n() as usize;
    let mut classical_match = true;
    let mut gram = Vec::new();
    let mut best: Option<Witness> = None;
    for (i, x) in plus.iter().enumerate() {
        let mut row = Vec::new();
        for (j, y) in minus.iter().enumerate() {
            let v = fp.pair(x, y)[0];
            let want = twisted_pairing_generic(&cl, &specialize_family(&fs, x, 0, nn), &specialize_family(&fs, y, 0, nn));
            classical_match &= v == want;
            row.push(z.centered(v).to_string());
            if v != 0 && best.as_ref().map_or(true, |b| z.val(v) < b.valuation) {
                best = Some(Witness { plus_index: i, minus_index: j, value: z.centered(v).to_string(), valuation: z.val(v), precision: n });
            }
        }
        gram.push(row);
    }
    let series = match (plus.first(), minus.first()) {
        (Some(x), Some(y)) => fp.pair(x, y).iter().map(|c| z.centered(*c).to_string()).collect(),
        _ => vec![],
    };
    if !same_sign_vanishes {
        return Err(Error::Contract("Phi+ pairs nontrivially with Phi+".into()));
    }
    if !classical_match {
        return Err(Error::Contract("family pairing at u = 0 differs from the classical pairing".into()));
    }
    let Some(witness) = best else {
        return Err(crate::error::prec_err("pairing", format!("every [Phi+, Phi-] vanishes mod {}^{}; nondegeneracy undecided", p, n)));
    };
    let nonzero = true;
    Ok(PairReport {
        level: prm.level,
        family_level,
        p,
        k: prm.k,
        nu: prm.nu.clone(),
        ell: prm.ell,
        precision_n: n,
        precision_m: m,
        classical_slopes,
        ordinary_rank: rank,
        plus_rank: plus.len(),
        minus_rank: minus.len(),
        gram_classical: gram,
        gram_series_00: series,
        classical_match,
        same_sign_vanishes,
        nonzero,
        witness,
    })
}

// -- different --

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    pub dim_q: usize,
    pub principal: bool,
    /// Generators in the algebra's basis, e.g. "2*y".
    pub generators: Vec<String>,
    /// The same generators as R-coefficient lists per basis element.
    pub vectors: Vec<Vec<Vec<adjoint::Num>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub w: String,
    pub values: Vec<String>,
    pub ramified: bool,
    pub kahler_unramified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferentReport {
    pub name: String,
    pub rank: usize,
    pub base_modulus: Vec<String>,
    pub kernel_dim_q: usize,
    pub noether_different: IdealReport,
    /// For monogenic T = R[y]/(f): whether f'(y) generates the Noether different.
    pub derivative_check: Option<bool>,
    pub scalar_product_ideal: Option<IdealReport>,
    pub ideals_equal: Option<bool>,
    pub adjoint_l: Option<String>,
    pub adjoint_l_error: Option<String>,
    pub points: Vec<PointReport>,
}

fn basis_name(ex: &AlgebraExample, i: usize) -> String {
    match (&ex.monogenic, i) {
        (_, 0) if ex.monogenic.is_some() => "1".into(),
        (Some(_), 1) => "y".into(),
        (Some(_), i) => format!("y^{}", i),
        (None, i) => format!("e{}", i),
    }
}

fn r_name(c: &[BigRational]) -> String {
    let mut terms = Vec::new();
    for (a, x) in c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        terms.push(match a {
            0 => x.to_string(),
            1 => format!("{}*w", x),
            a => format!("{}*w^{}", x, a),
        });
    }
    match terms.len() {
        0 => "0".into(),
        1 => terms.pop().unwrap(),
        _ => format!("({})", terms.join(" + ")),
    }
}

/// Readable form of a flat element, e.g. "2*y" or "(1 + 1*w)*e0 + e1".
pub fn element_name(ex: &AlgebraExample, x: &[BigRational]) -> String {
    let t = &ex.t;
    let mut terms = Vec::new();
    for (i, c) in t.unflat(x).iter().enumerate() {
        let r = r_name(c);
        if r == "0" {
            continue;
        }
        let b = basis_name(ex, i);
        terms.push(match (r.as_str(), b.as_str()) {
            (_, "1") => r,
            ("1", _) => b,
            _ => format!("{}*{}", r, b),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn ideal_report(ex: &AlgebraExample, j: &QSpace, preferred: Option<&Vec<BigRational>>) -> IdealReport {
    let t: &FiniteAlgebra = &ex.t;
    let principal_gen = match preferred {
        Some(g) if t.ideal(std::slice::from_ref(g)) == *j => Some(g.clone()),
        _ => adjoint::principal_generator(t, j),
    };
    let gens = match &principal_gen {
        Some(g) => vec![g.clone()],
        None => adjoint::minimal_generators(t, j),
    };
    IdealReport {
        dim_q: j.dim(),
        principal: principal_gen.is_some(),
        generators: gens.iter().map(|g| element_name(ex, g)).collect(),
        vectors: gens.iter().map(|g| adjoint::elt_json(t, g)).collect(),
    }
}

pub fn run_different(ex: &AlgebraExample) -> Result<DifferentReport> {
    let t = &ex.t;
    let kernel = adjoint::kernel_of_multiplication(t)?;
    if !kernel.standard_spans {
        return Err(Error::Contract("t x 1 - 1 x t do not generate the kernel of multiplication".into()));
    }
    let dn = adjoint::noether_different(t)?;
    let deriv = ex.monogenic.as_ref().map(|f| adjoint::derivative_elt(t, f));
    let derivative_check = deriv.as_ref().map(|d| t.ideal(std::slice::from_ref(d)) == dn);
    if derivative_check == Some(false) {
        return Err(Error::Contract("Noether different differs from (f'(y))".into()));
    }
    let mut report = DifferentReport {
        name: ex.name.clone(),
        rank: t.rank,
        base_modulus: t.base.modulus.iter().map(|c| c.to_string()).collect(),
        kernel_dim_q: kernel.space.dim(),
        noether_different: ideal_report(ex, &dn, deriv.as_ref()),
        derivative_check,
        scalar_product_ideal: None,
        ideals_equal: None,
        adjoint_l: None,
        adjoint_l_error: None,
        points: vec![],
    };
    if let (Some(phi), [mp, mm, ..]) = (&ex.pairing, ex.modules.as_slice()) {
        let d = adjoint::scalar_product_ideal(t, mp, mm, phi)?;
        if !dn.contains_space(&d) {
            return Err(Error::Contract("scalar-product ideal not inside the Noether different".into()));
        }
        report.ideals_equal = Some(d == dn);
        report.scalar_product_ideal = Some(ideal_report(ex, &d, deriv.as_ref()));
        match adjoint::adjoint_l_generator(t, mp, mm, phi) {
            Ok(l) => {
                let g = match &deriv {
                    Some(f1) if t.ideal(std::slice::from_ref(f1)) == l.ideal => f1.clone(),
                    _ => l.generator,
                };
                report.adjoint_l = Some(element_name(ex, &g));
            }
            Err(Error::Domain(msg)) => report.adjoint_l_error = Some(msg),
            Err(e) => return Err(e),
        }
    }
    for pt in &ex.points {
        let m = pt.ideal(t);
        report.points.push(PointReport {
            w: pt.w.to_string(),
            values: pt.values.iter().map(|v| v.to_string()).collect(),
            ramified: adjoint::ramification_test(t, pt)?,
            kahler_unramified: adjoint::kahler_unramified(t, &m)?,
        });
    }
    Ok(report)
}

// -- slope --

#[derive(Clone, Debug, Serialize)]
pub struct SegmentReport {
    pub slope: String,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    pub p: u64,
    pub nu: String,
    pub precision: i64,
    pub newton_polygon: Vec<SegmentReport>,
    pub charpoly: Vec<String>,
    /// Monic factor with slopes <= nu and its cofactor, low degree first.
    pub q: Vec<String>,
    pub s: Vec<String>,
    pub separation_loss: i64,
    pub projector_rank: usize,
    pub projector: Vec<Vec<String>>,
}

fn padic_str(x: &PAdic) -> String {
    x.to_rational().to_string()
}

pub fn run_slope(prm: &SlopeParams, n: i64) -> Result<SlopeReport> {
    if !is_prime(prm.p) {
        return Err(Error::Invalid(format!("p = {} is not prime", prm.p)));
    }
    let d = prm.matrix.len();
    if d == 0 || prm.matrix.iter().any(|r| r.len() != d) {
        return Err(Error::Invalid("matrix must be square and nonempty".into()));
    }
    let nu = parse_nu(&prm.nu)?;
    let f = PAdicField { p: prm.p, prec: n };
    let mut rows = Vec::new();
    for r in &prm.matrix {
        let mut row = Vec::new();
        for s in r {
            let x = parse_rational(s)?;
            if x.denom() % BigInt::from(prm.p) == BigInt::zero() {
                return Err(Error::Domain("matrix entries must be p-integral".into()));
            }
            row.push(PAdic::from_rational(prm.p, &x, n));
        }
        rows.push(row);
    }
    let u = Mat::from_rows(rows);
    let sd = slope_datum(&f, &u, &nu)?;
    let segs = newton_polygon(&f, &sd.charpoly)?;
    Ok(SlopeReport {
        p: prm.p,
        nu: nu.to_string(),
        precision: n,
        newton_polygon: segs.iter().map(|s| SegmentReport { slope: s.slope.to_string(), multiplicity: s.mult }).collect(),
        charpoly: sd.charpoly.iter().map(padic_str).collect(),
        q: sd.q.iter().map(padic_str).collect(),
        s: sd.s.iter().map(padic_str).collect(),
        separation_loss: sd.loss,
        projector_rank: rank_local(&f, &sd.projector),
        projector: (0..d).map(|i| (0..d).map(|j| padic_str(sd.projector.at(i, j))).collect()).collect(),
    })
}

// -- weights --

#[derive(Clone, Debug, Serialize)]
pub struct WeightPointReport {
    pub lambda1: i64,
    pub lambda2: i64,
    pub in_disk: bool,
    /// Disk coordinate u, as a residue mod p^N.
    pub u: Option<String>,
    pub u_valuation: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightsReport {
    pub p: u64,
    pub center: [i64; 2],
    pub precision_n: i64,
    pub precision_m: usize,
    pub points: Vec<WeightPointReport>,
}

pub fn run_weights(prm: &WeightsParams, n: i64, m: usize) -> Result<WeightsReport> {
    if !is_prime(prm.p) || prm.p == 2 {
        return Err(Error::Invalid(format!("p = {} must be an odd prime", prm.p)));
    }
    let center = WeightPoint::new(prm.center[0], prm.center[1]);
    let disk = WeightDisk::with_scale(prm.p, center, n, m, 1)?;
    let step = prm.p as i64 - 1;
    let lambdas = prm.lambdas.clone().unwrap_or_else(|| (0..6).map(|j| center.lambda1 + j * step).collect());
    let mut points = Vec::new();
    for l1 in lambdas {
        let lam = WeightPoint::new(l1, center.lambda2);
        let inside = disk.contains(lam);
        let (u, v) = if inside {
            let x = disk.point_of(lam)?;
            let pa = PAdic::from_rational(prm.p, &x, n);
            (Some(pa.to_rational().to_string()), Some(pa.val_bound()))
        } else {
            (None, None)
        };
        points.push(WeightPointReport { lambda1: l1, lambda2: center.lambda2, in_disk: inside, u, u_valuation: v });
    }
    Ok(WeightsReport { p: prm.p, center: prm.center, precision_n: n, precision_m: m, points })
}
