//! Named reference computations with their expected values.

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::ambient::{Ambient, DegreeSpec};
use crate::blowup::{multiplicity_sequence, pencil_lift_stable, quadrifolium, tacnode_cusp};
use crate::coeffs::{PrimeField, Rationals};
use crate::conditions::{impose_points, trace, PointCondition, SchemeSpec};
use crate::error::{Error, Result};
use crate::linsys::LinearSys;
use crate::poly::MultiPoly;
use crate::singular::{analyze, reference_surface, SingularityType};

pub const NAMES: [&str; 8] = [
    "quadrifolium",
    "tacnode-cusp",
    "points-gf397",
    "plane-deg20",
    "trace-p6",
    "quintic-30-31",
    "quintic-cusps",
    "sextic-pencil-lift",
];

pub const QUADRIFOLIUM: &str = "x^6+26171/9604*x^4*y^2+26171/9604*x^2*y^4-35775/4802*x^2*y^2+y^6";
pub const PENCIL_POLYNOMIAL: &str = "x^2-3645985316400/227892834937*x+14582741040000/227892834937";

/// Multiplicities of the degree-20 plane example.
pub const PLANE_DEG20_MULTS: [u32; 18] = [2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 5, 5, 5, 7, 7, 8, 9];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub name: String,
    pub passed: bool,
    pub lines: Vec<String>,
    pub data: serde_json::Value,
}

impl ReproReport {
    fn new(name: &str, passed: bool, lines: Vec<String>, data: serde_json::Value) -> Self {
        ReproReport { name: name.to_string(), passed, lines, data }
    }

    pub fn render(&self) -> String {
        let mut s: String = self.lines.iter().map(|l| format!("{l}\n")).collect();
        s.push_str(&format!("{} {}\n", if self.passed { "PASS" } else { "FAIL" }, self.name));
        s
    }
}

/// Runs the named computation; `seed` drives every random draw.
pub fn repro(name: &str, seed: u64) -> Result<ReproReport> {
    match name {
        "quadrifolium" => repro_quadrifolium(),
        "tacnode-cusp" => repro_tacnode_cusp(seed),
        "points-gf397" => points_gf397(seed).map(|n| count_report(name, n, 1)),
        "plane-deg20" => plane_deg20(seed).map(|n| count_report(name, n, 1)),
        "trace-p6" => trace_p6(seed).map(|n| count_report(name, n, 24)),
        "quintic-30-31" => surfaces(name, &[("nodal30", 30, 0), ("nodal31", 31, 0)]),
        "quintic-cusps" => surfaces(name, &[("cuspidal15", 0, 15), ("cuspidal18", 3, 15)]),
        "sextic-pencil-lift" => repro_pencil(),
        _ => Err(Error::InvalidArgument(format!("unknown repro '{name}'; expected one of {}", NAMES.join(", ")))),
    }
}

fn count_report(name: &str, n: usize, expected: usize) -> ReproReport {
    ReproReport::new(
        name,
        n == expected,
        vec![format!("nsections={n}"), format!("expected={expected}")],
        json!({ "nsections": n, "expected": expected }),
    )
}

fn repro_quadrifolium() -> Result<ReproReport> {
    let a = Ambient::affine(&Rationals, 2);
    let s = a.format_poly(&quadrifolium()?);
    Ok(ReproReport::new("quadrifolium", s == QUADRIFOLIUM, vec![s.clone()], json!({ "polynomial": s })))
}

fn repro_tacnode_cusp(seed: u64) -> Result<ReproReport> {
    let (l, specs) = tacnode_cusp()?;
    let n = l.nsections();
    let mut lines = vec![format!("nsections={n}")];
    let mut ok = n == 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = l.random_member(&mut rng, Some((-10, 10)))?;
    lines.push(format!("member: {}", l.format_poly(&f)));
    let mut seqs = Vec::new();
    for s in &specs {
        let seq = multiplicity_sequence(&f, &s.point, &s.tangents)?;
        lines.push(format!("{} sequence {:?} (required {:?})", l.ambient().format_point(&s.point), seq, s.mults));
        ok &= seq.iter().zip(&s.mults).all(|(a, b)| a >= b);
        seqs.push(seq);
    }
    Ok(ReproReport::new("tacnode-cusp", ok, lines, json!({ "nsections": n, "sequences": seqs })))
}

/// Degree-25 surfaces in P^3 over GF(397) through 3275 random points.
pub fn points_gf397(seed: u64) -> Result<usize> {
    let f = PrimeField::new(397)?;
    let a = Ambient::projective(&f, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conds = (0..3275)
        .map(|_| Ok(PointCondition::new(a.random_point(&mut rng, None)?, 1)))
        .collect::<Result<Vec<_>>>()?;
    let l = LinearSys::complete(&a, DegreeSpec::single(25))?;
    Ok(impose_points(&l, &conds)?.nsections())
}

/// Plane curves of degree 20 over QQ with the multiplicities
/// [`PLANE_DEG20_MULTS`] at points with coordinates in `1..=40`.
pub fn plane_deg20(seed: u64) -> Result<usize> {
    let q = Rationals;
    let a = Ambient::affine(&q, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conds = PLANE_DEG20_MULTS
        .iter()
        .map(|&m| Ok(PointCondition::new(a.random_point(&mut rng, Some((1, 40)))?, m)))
        .collect::<Result<Vec<_>>>()?;
    let l = LinearSys::complete(&a, DegreeSpec::single(20))?;
    Ok(impose_points(&l, &conds)?.nsections())
}

/// Quadrics of P^6 traced on the intersection of 4 random quadrics with
/// coefficients in `1..=10`.
pub fn trace_p6(seed: u64) -> Result<usize> {
    let q = Rationals;
    let a = Ambient::projective(&q, 6);
    let l2 = LinearSys::complete(&a, DegreeSpec::single(2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = (0..4).map(|_| l2.random_member(&mut rng, Some((1, 10)))).collect::<Result<Vec<_>>>()?;
    Ok(trace(&l2, &SchemeSpec::new(gens, true))?.nsections())
}

/// `(name, expected A1, expected A2)` for each reference surface.
fn surfaces(name: &str, cases: &[(&str, usize, usize)]) -> Result<ReproReport> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut data = Vec::new();
    for &(surface, a1, a2) in cases {
        let (p, text) = reference_surface(surface).expect("known surface");
        let field = PrimeField::new(p)?;
        let a = Ambient::projective(&field, 3);
        let f: MultiPoly<PrimeField> = a.parse_poly(text)?;
        let r = analyze(&a, &f)?;
        let (n1, n2, other) = (
            r.count_of(SingularityType::A1),
            r.count_of(SingularityType::A2),
            r.count_of(SingularityType::Other),
        );
        ok &= n1 == a1 && n2 == a2 && other == 0;
        lines.push(format!("{surface} over GF({p}): singular points={} A1={n1} A2={n2} other={other}", r.count()));
        data.push(json!({ "surface": surface, "q": p, "total": r.count(), "A1": n1, "A2": n2, "other": other }));
    }
    Ok(ReproReport::new(name, ok, lines, json!(data)))
}

fn repro_pencil() -> Result<ReproReport> {
    let (scans, lift) = pencil_lift_stable(59, 60)?;
    let mut lines = Vec::new();
    let first = &scans[0];
    lines.push(format!("p=59 values: {}", first.values.join(", ")));
    let used: Vec<u64> = scans.iter().filter(|s| s.coefficients.is_some()).map(|s| s.p).collect();
    lines.push(format!("primes used: {}", used.len()));
    lines.push(format!("modulus product: {}", lift.modulus_product()));
    let poly = lift.lifted.iter().cloned().collect::<Option<Vec<_>>>().map(|c| pencil_polynomial(&c[0], &c[1]));
    let ok = first.values.len() == 2 && poly.as_deref() == Some(PENCIL_POLYNOMIAL);
    lines.push(format!("P(x) = {}", poly.as_deref().unwrap_or("(not reconstructed)")));
    Ok(ReproReport::new(
        "sextic-pencil-lift",
        ok,
        lines,
        json!({ "values_p59": first.values, "primes": used, "polynomial": poly }),
    ))
}

fn pencil_polynomial(b: &BigRational, c: &BigRational) -> String {
    let q = Rationals;
    let a = Ambient::affine(&q, 1).with_names(vec!["x".into()]).expect("one name");
    let p = a.parse_poly("x^2").expect("monomial");
    let x = MultiPoly::var(&q, 1, 0);
    let f = p.add(&x.scale(b)).add(&MultiPoly::constant(&q, 1, c.clone()));
    a.format_poly(&f)
}
