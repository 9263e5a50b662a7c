//! Point multiplicities, subscheme containment, traces and image systems,
//! all reduced to kernels of condition matrices.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{projective_points, Ambient, AmbientKind, AmbientPoint, DegreeSpec};
use crate::coeffs::Field;
use crate::error::{Error, Result};
use crate::groebner::GroebnerBasis;
use crate::linalg::{self, Rows};
use crate::linsys::LinearSys;
use crate::poly::{binomial_table, power_table, Monomial, MultiPoly};

/// Multiplicity at least `multiplicity` at `point`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCondition<F: Field> {
    pub point: AmbientPoint<F>,
    pub multiplicity: u32,
}

impl<F: Field> PointCondition<F> {
    pub fn new(point: AmbientPoint<F>, multiplicity: u32) -> Self {
        PointCondition { point, multiplicity }
    }
}

/// A subscheme given by generators of its ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec<F: Field> {
    pub generators: Vec<MultiPoly<F>>,
    /// Asserted by the caller; saturation is never computed.
    pub saturated: bool,
}

impl<F: Field> SchemeSpec<F> {
    pub fn new(generators: Vec<MultiPoly<F>>, saturated: bool) -> Self {
        SchemeSpec { generators, saturated }
    }

    pub fn from_json(ambient: &Ambient<F>, json: &SchemeJson) -> Result<Self> {
        let generators = json.generators.iter().map(|s| ambient.parse_poly(s)).collect::<Result<Vec<_>>>()?;
        Ok(SchemeSpec { generators, saturated: json.saturated })
    }
}

/// JSON form: `{"generators":["y-x^2"], "saturated":true}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeJson {
    pub generators: Vec<String>,
    #[serde(default)]
    pub saturated: bool,
}

/// Rows of the conditions "coefficient of `x^α` in `m(x + p)` vanishes" for
/// each `α` of degree `< mult` in the chart of `p`, evaluated on `monomials`.
pub(crate) fn monomial_conditions<F: Field>(
    ambient: &Ambient<F>,
    point: &AmbientPoint<F>,
    mult: u32,
    monomials: &[Monomial],
) -> Rows<F> {
    let field = ambient.field();
    let n = ambient.nvars();
    let chart = ambient.affine_chart(point);
    let alphas = chart.low_monomials(n, mult);
    let maxdeg = monomials.iter().map(Monomial::degree).max().unwrap_or(0);
    let powers = power_table(field, point.coords(), vec![maxdeg; n]);
    let binom = binomial_table(field, maxdeg);
    alphas
        .iter()
        .map(|alpha| {
            monomials
                .iter()
                .map(|m| {
                    let mut t = field.one();
                    for (i, (&e, &a)) in m.exponents().iter().zip(alpha.exponents()).enumerate() {
                        if a > e {
                            return field.zero();
                        }
                        if e > a {
                            t = field.mul(&t, &powers[i][(e - a) as usize]);
                            if a > 0 {
                                t = field.mul(&t, &binom[e as usize][a as usize]);
                            }
                        }
                    }
                    t
                })
                .collect()
        })
        .collect()
}

/// Applies monomial-level condition rows to the basis of `l`.
fn on_basis<F: Field>(l: &LinearSys<F>, rows: Rows<F>) -> Rows<F> {
    let field = l.field();
    if l.is_complete() {
        return rows;
    }
    let basis = l.matrix();
    rows.iter()
        .map(|r| {
            basis
                .iter()
                .map(|b| {
                    b.iter().zip(r).fold(field.zero(), |acc, (x, y)| {
                        if field.is_zero(x) {
                            acc
                        } else {
                            field.add(&acc, &field.mul(x, y))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Members of `l` with multiplicity at least `m` at each point.
pub fn impose_points<F: Field>(l: &LinearSys<F>, conds: &[PointCondition<F>]) -> Result<LinearSys<F>> {
    let ambient = l.ambient();
    let mut merged: Vec<PointCondition<F>> = Vec::new();
    for c in conds {
        if c.point.coords().len() != ambient.nvars() {
            return Err(Error::PointNotInAmbient(format!("point with {} coordinates", c.point.coords().len())));
        }
        if c.multiplicity == 0 {
            continue;
        }
        match merged.iter_mut().find(|d| d.point == c.point) {
            Some(d) => d.multiplicity = d.multiplicity.max(c.multiplicity),
            None => merged.push(c.clone()),
        }
    }
    let monomials = l.monomials();
    let blocks: Vec<Rows<F>> = merged
        .par_iter()
        .map(|c| on_basis(l, monomial_conditions(ambient, &c.point, c.multiplicity, monomials)))
        .collect();
    Ok(l.subject_to(blocks.into_iter().flatten().collect()))
}

/// Members of `l` lying in the ideal of `x`: projective/product ambients use
/// the graded piece spanned by products of generators with monomials, affine
/// ambients use normal forms modulo a Gröbner basis.
pub fn impose_containment<F: Field>(l: &LinearSys<F>, x: &SchemeSpec<F>) -> Result<LinearSys<F>> {
    if l.ambient().is_affine() {
        impose_containment_affine(l, x)
    } else {
        impose_containment_projective(l, x)
    }
}

/// Containment in a projective (or multiprojective) subscheme with saturated ideal.
pub fn impose_containment_projective<F: Field>(l: &LinearSys<F>, x: &SchemeSpec<F>) -> Result<LinearSys<F>> {
    let ambient = l.ambient();
    if ambient.is_affine() {
        return Err(Error::InvalidArgument("projective containment on an affine ambient".into()));
    }
    if !x.saturated {
        return Err(Error::NotSaturated);
    }
    let field = ambient.field();
    let d = l.degree();
    let mut products = Vec::new();
    for q in &x.generators {
        if q.is_zero() {
            continue;
        }
        let e = ambient.degree_of(q)?;
        if e.0.iter().zip(&d.0).any(|(a, b)| a > b) {
            continue;
        }
        let rest = DegreeSpec(d.0.iter().zip(&e.0).map(|(a, b)| a - b).collect());
        for m in ambient.monomial_basis(&rest)? {
            products.push(q.mul_term(&m, &field.one()));
        }
    }
    if products.is_empty() {
        return LinearSys::empty(ambient, d.clone());
    }
    let v = LinearSys::from_sections(ambient, products, true, false)?;
    if l.is_complete() {
        return Ok(v);
    }
    // residues of L's basis modulo the reduced basis of V; members of V are
    // exactly the combinations with vanishing residue
    let mons = v.monomials().to_vec();
    let (vm, piv) = linalg::rref(field, &v.matrix(), mons.len());
    let idx: HashMap<&Monomial, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut outside: HashMap<Monomial, usize> = HashMap::new();
    let basis = l.basis();
    let mut residues: Vec<Vec<(usize, F::Elem)>> = Vec::with_capacity(basis.len());
    for b in &basis {
        let mut w = vec![field.zero(); mons.len()];
        let mut extra = Vec::new();
        for (m, c) in b.terms() {
            match idx.get(m) {
                Some(&i) => w[i] = c.clone(),
                None => {
                    let next = outside.len();
                    let k = *outside.entry(m.clone()).or_insert(next);
                    extra.push((mons.len() + k, c.clone()));
                }
            }
        }
        let coeffs: Vec<F::Elem> = piv.iter().map(|&p| w[p].clone()).collect();
        let proj = linalg::combine(field, &coeffs, &vm, mons.len());
        let mut r: Vec<(usize, F::Elem)> = w
            .iter()
            .zip(&proj)
            .enumerate()
            .map(|(i, (a, b))| (i, field.sub(a, b)))
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        r.extend(extra);
        residues.push(r);
    }
    let width = mons.len() + outside.len();
    let mut cond: Rows<F> = vec![vec![field.zero(); basis.len()]; width];
    for (k, r) in residues.iter().enumerate() {
        for (i, c) in r {
            cond[*i][k] = c.clone();
        }
    }
    cond.retain(|row| row.iter().any(|c| !field.is_zero(c)));
    Ok(l.subject_to(cond))
}

/// Containment in an affine subscheme via normal forms (linear in the section).
pub fn impose_containment_affine<F: Field>(l: &LinearSys<F>, x: &SchemeSpec<F>) -> Result<LinearSys<F>> {
    let ambient = l.ambient();
    if !ambient.is_affine() {
        return Err(Error::InvalidArgument("affine containment on a projective ambient".into()));
    }
    let g = GroebnerBasis::new(ambient.field(), ambient.nvars(), &x.generators)?;
    let nfs: Vec<MultiPoly<F>> = l.basis().iter().map(|b| g.normal_form(b)).collect();
    Ok(l.subject_to(coefficient_rows(ambient.field(), &nfs)))
}

/// Transposed coefficient matrix: one row per monomial occurring in `polys`.
fn coefficient_rows<F: Field>(field: &F, polys: &[MultiPoly<F>]) -> Rows<F> {
    let mut rows: HashMap<Monomial, Vec<F::Elem>> = HashMap::new();
    for (k, p) in polys.iter().enumerate() {
        for (m, c) in p.terms() {
            rows.entry(m.clone()).or_insert_with(|| vec![field.zero(); polys.len()])[k] = c.clone();
        }
    }
    let mut keys: Vec<Monomial> = rows.keys().cloned().collect();
    keys.sort_unstable();
    keys.into_iter().map(|m| rows.remove(&m).unwrap()).collect()
}

/// Sections of `l` cutting a nontrivial divisor on `x`: the complement of the
/// subsystem of members containing `x`.
pub fn trace<F: Field>(l: &LinearSys<F>, x: &SchemeSpec<F>) -> Result<LinearSys<F>> {
    l.complement(&impose_containment(l, x)?)
}

/// Degree-`d` forms on the projective space of the components of `f` whose
/// pullback along `f` vanishes on `x`.
pub fn image_system<F: Field>(
    source: &Ambient<F>,
    f: &[MultiPoly<F>],
    x: &SchemeSpec<F>,
    d: u32,
) -> Result<LinearSys<F>> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("a map needs at least one component".into()));
    }
    if !source.is_affine() {
        let d0 = source.degree_of(&f[0])?;
        for c in &f[1..] {
            if source.degree_of(c)? != d0 {
                return Err(Error::DegreeMismatch("map components of different degrees".into()));
            }
        }
    }
    let field = source.field();
    let target = Ambient::projective(field, f.len() - 1);
    let l = LinearSys::complete(&target, DegreeSpec::single(d))?;
    let g = GroebnerBasis::new(field, source.nvars(), &x.generators)?;
    let nfs: Vec<MultiPoly<F>> = l
        .monomials()
        .par_iter()
        .map(|m| {
            let mut p = MultiPoly::one(field, source.nvars());
            for (fi, &e) in f.iter().zip(m.exponents()) {
                if e > 0 {
                    p = p.mul(&fi.pow(e));
                }
            }
            g.normal_form(&p)
        })
        .collect();
    Ok(l.subject_to(coefficient_rows(field, &nfs)))
}

/// Points of `x` over a finite field, found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPoints<F: Field> {
    pub points: Vec<AmbientPoint<F>>,
    /// True when fewer points exist than were requested.
    pub exhausted: bool,
}

/// Up to `count` distinct points of `x`.
pub fn sample_points<F: Field>(ambient: &Ambient<F>, x: &SchemeSpec<F>, count: usize) -> Result<SampledPoints<F>> {
    let field = ambient.field();
    let q = field
        .order()
        .ok_or_else(|| Error::InvalidArgument("point sampling needs a finite field".into()))?;
    let candidates = (q as f64).powi(ambient.nvars() as i32);
    if ambient.nvars() > 5 || candidates > 5e7 {
        return Err(Error::InvalidArgument("ambient too large for enumeration".into()));
    }
    let vanishes = |v: &[F::Elem]| x.generators.iter().all(|g| field.is_zero(&g.evaluate(v)));
    let mut points = Vec::new();
    let mut visit = |v: Vec<F::Elem>| -> Result<bool> {
        if vanishes(&v) {
            points.push(ambient.point(v)?);
        }
        Ok(points.len() >= count)
    };
    match ambient.kind() {
        AmbientKind::Affine => {
            let n = ambient.nvars();
            for idx in 0..q.pow(n as u32) {
                let mut k = idx;
                let v = (0..n)
                    .map(|_| {
                        let e = field.element(k % q).unwrap();
                        k /= q;
                        e
                    })
                    .collect();
                if visit(v)? {
                    break;
                }
            }
        }
        _ => {
            let blocks: Vec<Vec<Vec<F::Elem>>> = ambient.dims().iter().map(|&n| projective_points(field, n)).collect();
            let mut idx = vec![0usize; blocks.len()];
            'outer: loop {
                let v: Vec<F::Elem> = idx.iter().zip(&blocks).flat_map(|(&i, b)| b[i].clone()).collect();
                if visit(v)? {
                    break;
                }
                for (k, b) in idx.iter_mut().zip(&blocks) {
                    *k += 1;
                    if *k < b.len() {
                        continue 'outer;
                    }
                    *k = 0;
                }
                break;
            }
        }
    }
    let exhausted = points.len() < count;
    Ok(SampledPoints { points, exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> num_rational::BigRational {
        Rationals.from_i64(n)
    }

    #[test]
    fn one_point_drops_rank_by_one() {
        let a = Ambient::projective(&Rationals, 2);
        let l = LinearSys::complete(&a, DegreeSpec::single(3)).unwrap();
        let p = a.point_from_i64(&[2, -1, 3]).unwrap();
        let j = impose_points(&l, &[PointCondition::new(p.clone(), 1)]).unwrap();
        assert_eq!(j.nsections(), 9);
        for s in j.basis() {
            assert!(s.evaluate(p.coords()) == q(0));
        }
        let j2 = impose_points(&l, &[PointCondition::new(p.clone(), 2)]).unwrap();
        assert_eq!(j2.nsections(), 7);
        assert_eq!(impose_points(&l, &[PointCondition::new(p, 0)]).unwrap().nsections(), 10);
    }

    #[test]
    fn conditions_on_a_noncomplete_system() {
        let a = Ambient::affine(&Rationals, 2);
        let l = LinearSys::from_sections(
            &a,
            ["x^2", "y^2", "x*y-1", "x+y"].iter().map(|s| a.parse_poly(s).unwrap()).collect(),
            true,
            false,
        )
        .unwrap();
        let j = impose_points(&l, &[PointCondition::new(a.point_from_i64(&[1, 1]).unwrap(), 1)]).unwrap();
        assert_eq!(j.nsections(), 3);
        assert!(l.contains_system(&j).unwrap());
        for s in j.basis() {
            assert_eq!(s.evaluate(&[q(1), q(1)]), q(0));
        }
    }

    #[test]
    fn projective_containment() {
        let a = Ambient::projective(&Rationals, 2);
        let l = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap();
        let x = SchemeSpec::new(vec![a.parse_poly("x").unwrap()], true);
        let j = impose_containment_projective(&l, &x).unwrap();
        assert_eq!(j.nsections(), 3);
        for s in ["x^2", "x*y", "x*z"] {
            assert!(j.contains(&a.parse_poly(s).unwrap()).unwrap());
        }
        let high = SchemeSpec::new(vec![a.parse_poly("x^3").unwrap()], true);
        assert_eq!(impose_containment_projective(&l, &high).unwrap().nsections(), 0);
        let unsat = SchemeSpec::new(vec![a.parse_poly("x").unwrap()], false);
        assert_eq!(impose_containment_projective(&l, &unsat).unwrap_err(), Error::NotSaturated);
        // a non-complete system: the members of span{x^2+y^2, x*y, z^2} inside (x)
        let part = LinearSys::from_sections(
            &a,
            ["x^2+y^2", "x*y", "z^2", "x*z+y*z"].iter().map(|s| a.parse_poly(s).unwrap()).collect(),
            true,
            false,
        )
        .unwrap();
        let j = impose_containment_projective(&part, &x).unwrap();
        assert_eq!(j.nsections(), 1);
        assert!(j.contains(&a.parse_poly("x*y").unwrap()).unwrap());
    }

    #[test]
    fn affine_containment() {
        let a = Ambient::affine(&Rationals, 2);
        let l = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap();
        let parabola = SchemeSpec::new(vec![a.parse_poly("y-x^2").unwrap()], true);
        let j = impose_containment_affine(&l, &parabola).unwrap();
        assert_eq!(j.nsections(), 1);
        assert!(j.contains(&a.parse_poly("y-x^2").unwrap()).unwrap());
        let unit = SchemeSpec::new(vec![a.parse_poly("1").unwrap()], true);
        assert!(impose_containment_affine(&l, &unit).unwrap().span_eq(&l).unwrap());
        let zero = SchemeSpec::new(vec![], true);
        assert_eq!(impose_containment_affine(&l, &zero).unwrap().nsections(), 0);
    }

    #[test]
    fn traces() {
        let a = Ambient::projective(&Rationals, 2);
        let l = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap();
        let line = SchemeSpec::new(vec![a.parse_poly("x").unwrap()], true);
        assert_eq!(trace(&l, &line).unwrap().nsections(), 3);
        let whole = SchemeSpec::new(vec![], true);
        assert!(trace(&l, &whole).unwrap().span_eq(&l).unwrap());
        let nothing = SchemeSpec::new(vec![a.parse_poly("1").unwrap()], true);
        // the unit ideal is homogeneous of degree 0
        assert_eq!(trace(&l, &nothing).unwrap().nsections(), 0);
    }

    #[test]
    fn image_systems() {
        let a = Ambient::projective(&Rationals, 2);
        let id: Vec<_> = ["x", "y", "z"].iter().map(|s| a.parse_poly(s).unwrap()).collect();
        let line = SchemeSpec::new(vec![a.parse_poly("x").unwrap()], true);
        let j = image_system(&a, &id, &line, 1).unwrap();
        assert_eq!(j.nsections(), 1);
        assert_eq!(j.format_poly(&j.basis()[0]), "x");
        // the conic (s^2 : s*t : t^2) lies on y^2 - x*z
        let p1 = Ambient::projective(&Rationals, 1);
        let (s, t) = (&p1.names()[0], &p1.names()[1]);
        let f: Vec<_> = [format!("{s}^2"), format!("{s}*{t}"), format!("{t}^2")].iter().map(|m| p1.parse_poly(m).unwrap()).collect();
        let whole = SchemeSpec::new(vec![], true);
        assert_eq!(image_system(&p1, &f, &whole, 1).unwrap().nsections(), 0);
        let conics = image_system(&p1, &f, &whole, 2).unwrap();
        assert_eq!(conics.nsections(), 1);
        assert!(conics.contains(&conics.ambient().parse_poly("y^2-x*z").unwrap()).unwrap());
    }

    #[test]
    fn sampling() {
        let f3 = PrimeField::new(3).unwrap();
        let a = Ambient::projective(&f3, 2);
        let x = SchemeSpec::new(vec![a.parse_poly("x").unwrap()], true);
        let s = sample_points(&a, &x, 100).unwrap();
        assert_eq!(s.points.len(), 4);
        assert!(s.exhausted);
        let unit = SchemeSpec::new(vec![a.parse_poly("1").unwrap()], true);
        assert!(sample_points(&a, &unit, 5).unwrap().points.is_empty());
        let f7 = PrimeField::new(7).unwrap();
        let a2 = Ambient::affine(&f7, 2);
        let par = SchemeSpec::new(vec![a2.parse_poly("y-x^2").unwrap()], true);
        let s = sample_points(&a2, &par, 100).unwrap();
        assert_eq!(s.points.len(), 7);
        for p in &s.points {
            let c = p.coords();
            assert_eq!(c[1], f7.mul(&c[0], &c[0]));
        }
        assert_eq!(sample_points(&a2, &par, 3).unwrap().points.len(), 3);
    }

    #[test]
    fn product_ambient_conditions() {
        let f = PrimeField::new(101).unwrap();
        let a = Ambient::product(&f, &[1, 1]).unwrap();
        let l = LinearSys::complete(&a, DegreeSpec(vec![2, 1])).unwrap();
        assert_eq!(l.nsections(), 6);
        let p = a.point_from_i64(&[3, 1, 5, 1]).unwrap();
        let j = impose_points(&l, &[PointCondition::new(p.clone(), 1)]).unwrap();
        assert_eq!(j.nsections(), 5);
        for s in j.basis() {
            assert_eq!(s.evaluate(p.coords()), 0);
        }
        let j2 = impose_points(&l, &[PointCondition::new(p, 2)]).unwrap();
        assert_eq!(j2.nsections(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn generic_points_impose_independent_conditions(
            seed in any::<u64>(), d in 2u32..7, mults in proptest::collection::vec(1u32..3, 1..4),
        ) {
            let f = PrimeField::new(10_007).unwrap();
            let a = Ambient::affine(&f, 2);
            let l = LinearSys::complete(&a, DegreeSpec::single(d)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let conds: Vec<_> = mults.iter().map(|&m| PointCondition::new(a.random_point(&mut rng, None).unwrap(), m)).collect();
            let expected: usize = mults.iter().map(|&m| (m * (m + 1) / 2) as usize).sum();
            // distinct points impose independent conditions once d >= sum(m) - 1
            prop_assume!(d + 1 >= mults.iter().sum::<u32>());
            let j = impose_points(&l, &conds).unwrap();
            prop_assert_eq!(j.nsections(), l.nsections() - expected);
            prop_assert!(l.contains_system(&j).unwrap());
            for s in j.basis() {
                for c in &conds {
                    let local = s.translate(c.point.coords());
                    prop_assert!(local.low_degree_coefficients(c.multiplicity).iter().all(|x| *x == 0));
                }
            }
        }

        #[test]
        fn projective_containment_agrees_with_normal_forms(seed in any::<u64>()) {
            let f = PrimeField::new(101).unwrap();
            let a = Ambient::projective(&f, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let conic = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap().random_member(&mut rng, None).unwrap();
            let x = SchemeSpec::new(vec![conic.clone()], true);
            let l = LinearSys::complete(&a, DegreeSpec::single(3)).unwrap();
            let part = LinearSys::from_sections(&a, (0..6).map(|_| l.random_member(&mut rng, None).unwrap()).chain([conic.mul(&a.parse_poly("x+2*y").unwrap())]).collect(), true, false).unwrap();
            let j = impose_containment_projective(&part, &x).unwrap();
            let g = GroebnerBasis::new(&f, 3, &[conic]).unwrap();
            prop_assert!(j.nsections() >= 1);
            for s in j.basis() {
                prop_assert!(g.contains(&s));
            }
        }
    }
}
