//! Singular points of projective hypersurfaces over finite fields, their
//! A1/A2 classification, and random searches in invariant quintic families.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, AmbientPoint};
use crate::coeffs::Field;
use crate::conditions::{impose_points, PointCondition};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linsys::LinearSys;
use crate::poly::{Monomial, MultiPoly};

/// Type of an isolated surface singularity, as far as the 2-jet and 3-jet tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SingularityType {
    A1,
    A2,
    Other,
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingularityType::A1 => "A1",
            SingularityType::A2 => "A2",
            SingularityType::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPointReport<F: Field> {
    pub point: AmbientPoint<F>,
    pub hessian_rank: usize,
    pub classification: SingularityType,
    /// The coordinate set to 1 for the local equation.
    pub chart: usize,
}

/// Dense univariate polynomial, constant term first, no trailing zeros.
type Uni<E> = Vec<E>;

fn trim<F: Field>(f: &F, p: &mut Uni<F::Elem>) {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
}

fn uni_rem<F: Field>(f: &F, a: &Uni<F::Elem>, b: &Uni<F::Elem>) -> Uni<F::Elem> {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).expect("trimmed");
    while r.len() > db {
        let k = r.len() - 1;
        let q = f.mul(&r[k], &inv);
        if !f.is_zero(&q) {
            for (i, c) in b.iter().enumerate() {
                let idx = k - db + i;
                r[idx] = f.sub(&r[idx], &f.mul(&q, c));
            }
        }
        r.pop();
        trim(f, &mut r);
    }
    r
}

fn uni_gcd<F: Field>(f: &F, a: Uni<F::Elem>, b: Uni<F::Elem>) -> Uni<F::Elem> {
    let (mut a, mut b) = (a, b);
    while !b.is_empty() {
        let r = uni_rem(f, &a, &b);
        a = std::mem::replace(&mut b, r);
    }
    a
}

fn horner<F: Field>(f: &F, p: &Uni<F::Elem>, x: &F::Elem) -> F::Elem {
    p.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// `F` and its partial derivatives as term lists.
struct Jacobian<F: Field> {
    polys: Vec<Vec<(F::Elem, Vec<u32>)>>,
    full: Vec<MultiPoly<F>>,
}

impl<F: Field> Jacobian<F> {
    fn new(f: &MultiPoly<F>) -> Self {
        let mut full = vec![f.clone()];
        full.extend((0..f.nvars()).map(|i| f.partial_derivative(i)));
        let polys = full
            .iter()
            .map(|p| p.terms().map(|(m, c)| (c.clone(), m.exponents().to_vec())).collect())
            .collect();
        Jacobian { polys, full }
    }

    fn vanishes(&self, v: &[F::Elem]) -> bool {
        self.full.iter().all(|p| p.field().is_zero(&p.evaluate(v)))
    }
}

fn check_surface_input<F: Field>(ambient: &Ambient<F>, f: &MultiPoly<F>) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if ambient.is_affine() || ambient.dims().len() != 1 {
        return Err(Error::InvalidArgument("singular points are enumerated on a projective space".into()));
    }
    if f.nvars() != ambient.nvars() || !f.is_homogeneous() {
        return Err(Error::DegreeMismatch("expected a homogeneous polynomial on the ambient".into()));
    }
    Ok(())
}

/// All points of `P^n(GF(q))` where `F` and its partials vanish, listed chart
/// by chart (last coordinate 1 first) in enumeration order.
pub fn singular_points<F: Field>(ambient: &Ambient<F>, f: &MultiPoly<F>) -> Result<Vec<AmbientPoint<F>>> {
    check_surface_input(ambient, f)?;
    let field = ambient.field();
    let q = field
        .order()
        .ok_or_else(|| Error::InvalidArgument("point enumeration needs a finite field".into()))?;
    let n = ambient.nvars();
    if (q as f64).powi(n as i32 - 1) > 1e9 {
        return Err(Error::InvalidArgument("field too large for enumeration".into()));
    }
    let jac = Jacobian::new(f);
    let elems: Vec<F::Elem> = (0..q).map(|i| field.element(i).unwrap()).collect();
    let maxdeg = f.degree().unwrap_or(0) as usize;
    let powers: Vec<Vec<F::Elem>> = elems
        .iter()
        .map(|x| {
            let mut v = vec![field.one()];
            for k in 1..=maxdeg {
                v.push(field.mul(&v[k - 1], x));
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    for k in (0..n).rev() {
        let mut base = vec![field.zero(); n];
        base[k] = field.one();
        if k == 0 {
            if jac.vanishes(&base) {
                out.push(ambient.point(base)?);
            }
            continue;
        }
        // terms surviving x_k = 1 and x_j = 0 for j > k
        let chart: Vec<Vec<(F::Elem, Vec<u32>)>> = jac
            .polys
            .iter()
            .map(|p| p.iter().filter(|(_, e)| e[k + 1..].iter().all(|&x| x == 0)).cloned().collect())
            .collect();
        let prefix = k - 1;
        let combos = q.pow(prefix as u32);
        let found: Vec<Vec<Vec<F::Elem>>> = (0..combos)
            .into_par_iter()
            .map(|idx| {
                let mut digits = Vec::with_capacity(prefix);
                let mut r = idx;
                for _ in 0..prefix {
                    digits.push((r % q) as usize);
                    r /= q;
                }
                digits.reverse();
                let unis: Vec<Uni<F::Elem>> = chart
                    .iter()
                    .map(|terms| {
                        let mut u = vec![field.zero(); maxdeg + 1];
                        for (c, e) in terms {
                            let mut t = c.clone();
                            for (d, &ei) in digits.iter().zip(e) {
                                if ei > 0 {
                                    t = field.mul(&t, &powers[*d][ei as usize]);
                                }
                            }
                            let slot = e[k - 1] as usize;
                            u[slot] = field.add(&u[slot], &t);
                        }
                        trim(field, &mut u);
                        u
                    })
                    .collect();
                let mut g: Uni<F::Elem> = Vec::new();
                for u in unis {
                    if u.is_empty() {
                        continue;
                    }
                    g = if g.is_empty() { u } else { uni_gcd(field, g, u) };
                    if g.len() == 1 {
                        return Vec::new();
                    }
                }
                let mut pts = Vec::new();
                for x in &elems {
                    if g.is_empty() || field.is_zero(&horner(field, &g, x)) {
                        let mut v = base.clone();
                        for (slot, d) in v.iter_mut().zip(&digits) {
                            *slot = elems[*d].clone();
                        }
                        v[k - 1] = x.clone();
                        debug_assert!(jac.vanishes(&v));
                        pts.push(v);
                    }
                }
                pts
            })
            .collect();
        for v in found.into_iter().flatten() {
            out.push(ambient.point(v)?);
        }
    }
    Ok(out)
}

/// Classifies a singular point from the local equation in the chart of its
/// last nonzero coordinate.
pub fn classify<F: Field>(ambient: &Ambient<F>, f: &MultiPoly<F>, p: &AmbientPoint<F>) -> Result<SingularPointReport<F>> {
    let k = p
        .coords()
        .iter()
        .rposition(|c| !ambient.field().is_zero(c))
        .ok_or_else(|| Error::PointNotInAmbient("zero vector".into()))?;
    classify_in_chart(ambient, f, p, k)
}

/// Classification using the chart `x_chart = 1`, which must contain `p`.
pub fn classify_in_chart<F: Field>(
    ambient: &Ambient<F>,
    f: &MultiPoly<F>,
    p: &AmbientPoint<F>,
    chart: usize,
) -> Result<SingularPointReport<F>> {
    check_surface_input(ambient, f)?;
    let field = ambient.field();
    let ch = field.characteristic();
    if ch != 0 && ch < 5 {
        return Err(Error::UnsupportedCharacteristic(ch, "jet classification needs characteristic 0 or at least 5".into()));
    }
    let n = ambient.nvars();
    let scale = field.inv(&p.coords()[chart]).ok_or_else(|| Error::PointNotInAmbient(format!("point outside chart {chart}")))?;
    let mut at: Vec<F::Elem> = p.coords().iter().map(|c| field.mul(c, &scale)).collect();
    at[chart] = field.zero();
    // local equation in the n-1 variables other than x_chart, centered at p
    let local = f.dehomogenize(chart).translate(&at);
    let vars: Vec<usize> = (0..n).filter(|&i| i != chart).collect();
    let coeff = |e: &[(usize, u32)]| {
        let mut x = vec![0u32; n];
        for &(i, k) in e {
            x[i] += k;
        }
        local.coeff(&Monomial::new(x))
    };
    if !field.is_zero(&coeff(&[])) || vars.iter().any(|&i| !field.is_zero(&coeff(&[(i, 1)]))) {
        return Err(Error::NotSingular);
    }
    let half = field.inv(&field.from_i64(2)).expect("odd characteristic");
    let hessian: Vec<Vec<F::Elem>> = vars
        .iter()
        .map(|&i| {
            vars.iter()
                .map(|&j| if i == j { coeff(&[(i, 2)]) } else { field.mul(&coeff(&[(i, 1), (j, 1)]), &half) })
                .collect()
        })
        .collect();
    let m = vars.len();
    let rank = linalg::rank(field, &hessian, m);
    let classification = if rank == m {
        SingularityType::A1
    } else if rank + 1 == m {
        let kernel = linalg::nullspace(field, &hessian, m);
        let v = &kernel[0];
        let mut point = vec![field.zero(); n];
        for (slot, &i) in v.iter().zip(&vars) {
            point[i] = slot.clone();
        }
        let cubic = MultiPoly::from_terms(field, n, local.terms().filter(|(mm, _)| mm.degree() == 3).map(|(mm, c)| (mm.clone(), c.clone())));
        if field.is_zero(&cubic.evaluate(&point)) {
            SingularityType::Other
        } else {
            SingularityType::A2
        }
    } else {
        SingularityType::Other
    };
    Ok(SingularPointReport { point: p.clone(), hessian_rank: rank, classification, chart })
}

/// Singular points with their classification and a type histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceReport<F: Field> {
    pub points: Vec<SingularPointReport<F>>,
}

impl<F: Field> SurfaceReport<F> {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn histogram(&self) -> BTreeMap<SingularityType, usize> {
        let mut h = BTreeMap::new();
        for p in &self.points {
            *h.entry(p.classification).or_insert(0) += 1;
        }
        h
    }

    pub fn count_of(&self, t: SingularityType) -> usize {
        self.points.iter().filter(|p| p.classification == t).count()
    }

    /// One line per point followed by the histogram.
    pub fn render(&self, ambient: &Ambient<F>) -> String {
        let mut s = String::new();
        for p in &self.points {
            s.push_str(&format!(
                "point {} rank={} class={}\n",
                ambient.format_point(&p.point),
                p.hessian_rank,
                p.classification
            ));
        }
        let h = self.histogram();
        let parts: Vec<String> = h.iter().map(|(t, c)| format!("{t}={c}")).collect();
        s.push_str(&format!("total={} {}\n", self.count(), parts.join(" ")));
        s
    }
}

pub fn analyze<F: Field>(ambient: &Ambient<F>, f: &MultiPoly<F>) -> Result<SurfaceReport<F>> {
    let points = singular_points(ambient, f)?
        .iter()
        .map(|p| classify(ambient, f, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceReport { points })
}

/// Quintic over GF(101) with 30 nodes.
pub const NODAL_QUINTIC_30: &str = "x1^5+x2^5+76*x1^2*x2^2*x3+54*x1*x2*x3^3+65*x3^5+90*x1^2*x2^2*x4+93*x1*x2*x3^2*x4+29*x3^4*x4+37*x1*x2*x3*x4^2+53*x3^3*x4^2+85*x1*x2*x4^3+20*x3^2*x4^3+10*x3*x4^4+93*x4^5";
/// Quintic over GF(101) with 31 nodes.
pub const NODAL_QUINTIC_31: &str = "x1^5+x2^5+48*x1^2*x2^2*x3+62*x1*x2*x3^3+97*x3^5+5*x1^2*x2^2*x4+90*x1*x2*x3^2*x4+12*x3^4*x4+80*x1*x2*x3*x4^2+99*x3^3*x4^2+61*x1*x2*x4^3+36*x3^2*x4^3+18*x3*x4^4+97*x4^5";
/// Quintic over GF(103) with 15 cusps.
pub const CUSPIDAL_QUINTIC_15: &str = "x1^4*x2+30*x1*x2^4+22*x1^3*x3^2+29*x2^3*x3^2+85*x1^2*x2^2*x4+25*x1*x2*x3^2*x4+56*x3^4*x4+15*x1^3*x4^2+89*x2^3*x4^2+60*x1*x2*x4^3+22*x3^2*x4^3+29*x4^5";
/// Quintic over GF(103) with 15 cusps and 3 nodes.
pub const CUSPIDAL_QUINTIC_18: &str = "x1^4*x2+42*x1*x2^4+73*x1^3*x3^2+60*x1^2*x2^2*x4+9*x1*x2*x3^2*x4+93*x3^4*x4+15*x1^3*x4^2+77*x2^3*x4^2+98*x1*x2*x4^3+39*x3^2*x4^3+16*x4^5";

/// Quintic families on P^3 spanned by invariant monomials, with prescribed
/// double points, some of them depending on parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Invariants of (x1:x2:x3:x4) ↦ (x1:r²x2:rx3:rx4), r⁵ = 1; double points
    /// at (1:1:1:1), (3:3:2:1), (a:a:b:1), (c:c:d:1).
    Z5,
    /// Invariants of x3 ↦ -x3 and (x1:x2) ↦ (r²x1:rx2), r³ = 1; double points
    /// at (1:1:0:1), (a:b:c:1), (d:e:f:1).
    Z6,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "z5" | "Z5" => Ok(Family::Z5),
            "z6" | "Z6" => Ok(Family::Z6),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?} (expected z5 or z6)"))),
        }
    }

    pub fn monomials(self) -> &'static [&'static str] {
        match self {
            Family::Z5 => &[
                "x1^5", "x2^5", "x1^2*x2^2*x3", "x1*x2*x3^3", "x3^5", "x1^2*x2^2*x4", "x1*x2*x3^2*x4",
                "x3^4*x4", "x1*x2*x3*x4^2", "x3^3*x4^2", "x1*x2*x4^3", "x3^2*x4^3", "x3*x4^4", "x4^5",
            ],
            Family::Z6 => &[
                "x4^5", "x3^2*x4^3", "x1*x2*x4^3", "x2^3*x4^2", "x1^3*x4^2", "x3^4*x4", "x1*x2*x3^2*x4",
                "x1^2*x2^2*x4", "x2^3*x3^2", "x1^3*x3^2", "x1*x2^4", "x1^4*x2",
            ],
        }
    }

    pub fn fixed_points(self) -> &'static [[i64; 4]] {
        match self {
            Family::Z5 => &[[1, 1, 1, 1], [3, 3, 2, 1]],
            Family::Z6 => &[[1, 1, 0, 1]],
        }
    }

    pub fn nparams(self) -> usize {
        match self {
            Family::Z5 => 4,
            Family::Z6 => 6,
        }
    }

    /// The parametrized double points for parameter values `t`.
    pub fn moving_points<E: Clone>(self, one: E, t: &[E]) -> [[E; 4]; 2] {
        match self {
            Family::Z5 => [
                [t[0].clone(), t[0].clone(), t[1].clone(), one.clone()],
                [t[2].clone(), t[2].clone(), t[3].clone(), one],
            ],
            Family::Z6 => [
                [t[0].clone(), t[1].clone(), t[2].clone(), one.clone()],
                [t[3].clone(), t[4].clone(), t[5].clone(), one],
            ],
        }
    }
}

/// The family's system with the fixed double points imposed.
pub fn family_system<F: Field>(family: Family, field: &F) -> Result<LinearSys<F>> {
    let a = Ambient::projective(field, 3);
    let sections = family.monomials().iter().map(|m| a.parse_poly(m)).collect::<Result<Vec<_>>>()?;
    let l = LinearSys::from_sections(&a, sections, true, false)?;
    let conds = family
        .fixed_points()
        .iter()
        .map(|p| Ok(PointCondition::new(a.point_from_i64(p)?, 2)))
        .collect::<Result<Vec<_>>>()?;
    impose_points(&l, &conds)
}

/// The member of the family for parameters `t`, or `None` when the imposed
/// system does not have exactly one section.
pub fn specialize<F: Field>(base: &LinearSys<F>, family: Family, t: &[F::Elem]) -> Result<Option<MultiPoly<F>>> {
    if t.len() != family.nparams() {
        return Err(Error::InvalidArgument(format!("family needs {} parameters", family.nparams())));
    }
    let a = base.ambient();
    let pts = family.moving_points(a.field().one(), t);
    let conds = pts
        .into_iter()
        .map(|p| Ok(PointCondition::new(a.point(p.to_vec())?, 2)))
        .collect::<Result<Vec<_>>>()?;
    let j = impose_points(base, &conds)?;
    if j.nsections() != 1 {
        return Ok(None);
    }
    let f = j.basis().remove(0);
    Ok(Some(f.scale(&a.field().inv(f.leading_coeff().unwrap()).unwrap())))
}

/// Which specializations a scan keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanTarget {
    /// Exactly 30 singular points, all A1.
    Nodes30,
    /// Exactly 31 singular points, all A1.
    Nodes31,
    /// 15 A2 points and otherwise only A1 points.
    Cusps15,
}

impl ScanTarget {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nodes30" => Ok(ScanTarget::Nodes30),
            "nodes31" => Ok(ScanTarget::Nodes31),
            "cusps15" => Ok(ScanTarget::Cusps15),
            _ => Err(Error::InvalidArgument(format!("unknown target {s:?} (expected nodes30, nodes31 or cusps15)"))),
        }
    }

    pub fn matches<F: Field>(self, r: &SurfaceReport<F>) -> bool {
        let (a1, a2, other) = (
            r.count_of(SingularityType::A1),
            r.count_of(SingularityType::A2),
            r.count_of(SingularityType::Other),
        );
        match self {
            ScanTarget::Nodes30 => a1 == 30 && a2 == 0 && other == 0,
            ScanTarget::Nodes31 => a1 == 31 && a2 == 0 && other == 0,
            ScanTarget::Cusps15 => a2 == 15 && other == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanHit<F: Field> {
    pub trial: usize,
    pub params: Vec<F::Elem>,
    pub poly: MultiPoly<F>,
    pub report: SurfaceReport<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome<F: Field> {
    pub hits: Vec<ScanHit<F>>,
    /// Trials actually run (the scan stops early once `max_hits` is reached).
    pub trials: usize,
    /// Trials whose system did not have exactly one section.
    pub skipped: usize,
    /// Number of trials per singular-point count.
    pub counts: BTreeMap<usize, usize>,
}

/// Draws random parameters over the field, builds each specialization and
/// keeps those whose singular points satisfy `target`. Trial `i` uses its own
/// RNG stream derived from `seed`, so results do not depend on scheduling.
pub fn invariant_family_scan<F: Field>(
    family: Family,
    field: &F,
    trials: usize,
    target: ScanTarget,
    seed: u64,
    max_hits: Option<usize>,
) -> Result<ScanOutcome<F>> {
    let base = family_system(family, field)?;
    let a = base.ambient().clone();
    let mut out = ScanOutcome { hits: Vec::new(), trials: 0, skipped: 0, counts: BTreeMap::new() };
    let chunk = rayon::current_num_threads().max(1) * 4;
    let mut start = 0;
    while start < trials {
        let end = (start + chunk).min(trials);
        let results = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let t = (0..family.nparams()).map(|_| field.sample(&mut rng, None)).collect::<Result<Vec<_>>>()?;
                let Some(f) = specialize(&base, family, &t)? else {
                    return Ok((i, t, None));
                };
                let report = analyze(&a, &f)?;
                Ok((i, t, Some((f, report))))
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, t, r) in results {
            out.trials += 1;
            match r {
                None => out.skipped += 1,
                Some((poly, report)) => {
                    *out.counts.entry(report.count()).or_insert(0) += 1;
                    if target.matches(&report) {
                        out.hits.push(ScanHit { trial: i, params: t, poly, report });
                        if max_hits.is_some_and(|m| out.hits.len() >= m) {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        start = end;
    }
    Ok(out)
}

/// Named reference surfaces: `(field order, polynomial)`.
pub fn reference_surface(name: &str) -> Option<(u64, &'static str)> {
    match name {
        "nodal30" => Some((101, NODAL_QUINTIC_30)),
        "nodal31" => Some((101, NODAL_QUINTIC_31)),
        "cuspidal15" => Some((103, CUSPIDAL_QUINTIC_15)),
        "cuspidal18" => Some((103, CUSPIDAL_QUINTIC_18)),
        _ => None,
    }
}
