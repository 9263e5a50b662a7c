//! Non-ordinary plane-curve singularities imposed through chains of blowups.
//!
//! Every chain is followed on the transforms of a basis of `L`, while the
//! admissible combinations are tracked in `L`'s own coordinates. Blowing
//! down is therefore never needed: the answer is read off as combinations of
//! the original sections.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, AmbientPoint, DegreeSpec};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeffs::{is_prime, ExtField, Field, LiftResult, Rationals};
use crate::error::{Error, Result};
use crate::linalg::{self, Rows};
use crate::linsys::LinearSys;
use crate::poly::{monomials_below, Monomial, MultiPoly};

/// A point `[a : b]` of an exceptional line, stored as `[1, 0]` or `[c, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection<F: Field> {
    a: F::Elem,
    b: F::Elem,
    horizontal: bool,
}

impl<F: Field> TangentDirection<F> {
    pub fn new(field: &F, a: F::Elem, b: F::Elem) -> Result<Self> {
        if field.is_zero(&b) {
            if field.is_zero(&a) {
                return Err(Error::InvalidArgument("tangent direction [0, 0]".into()));
            }
            return Ok(TangentDirection { a: field.one(), b, horizontal: true });
        }
        let c = field.div(&a, &b).expect("nonzero");
        Ok(TangentDirection { a: c, b: field.one(), horizontal: false })
    }

    pub fn from_i64(field: &F, a: i64, b: i64) -> Result<Self> {
        Self::new(field, field.from_i64(a), field.from_i64(b))
    }

    /// The coordinate `c` of `[c, 1]`, or `None` for `[1, 0]`.
    pub fn slope(&self) -> Option<&F::Elem> {
        (!self.horizontal).then_some(&self.a)
    }

    pub fn is_horizontal(&self) -> bool {
        self.horizontal
    }

    /// The normalized pair.
    pub fn pair(&self) -> (&F::Elem, &F::Elem) {
        (&self.a, &self.b)
    }
}

/// Multiplicities `m_0, …, m_k` along the chain of infinitely near points
/// at `point` selected by `k` tangent directions.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupChainSpec<F: Field> {
    pub point: AmbientPoint<F>,
    pub mults: Vec<u32>,
    pub tangents: Vec<TangentDirection<F>>,
}

impl<F: Field> BlowupChainSpec<F> {
    pub fn new(point: AmbientPoint<F>, mults: Vec<u32>, tangents: Vec<TangentDirection<F>>) -> Result<Self> {
        if mults.is_empty() || tangents.len() + 1 != mults.len() {
            return Err(Error::InvalidArgument(format!(
                "{} multiplicities need {} tangent directions, got {}",
                mults.len(),
                mults.len().saturating_sub(1),
                tangents.len()
            )));
        }
        if mults.contains(&0) {
            return Err(Error::InvalidArgument("multiplicities must be positive".into()));
        }
        Ok(BlowupChainSpec { point, mults, tangents })
    }

    pub fn from_json(ambient: &Ambient<F>, json: &ChainJson) -> Result<Self> {
        let field = ambient.field();
        let point = ambient.parse_point(&json.point)?;
        let tangents = json
            .tangents
            .iter()
            .map(|t| match t.as_slice() {
                [a, b] => TangentDirection::new(field, field.parse(a)?, field.parse(b)?),
                _ => Err(Error::InvalidArgument(format!("tangent direction needs two entries, got {}", t.len()))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(point, json.mults.clone(), tangents)
    }
}

/// JSON form: `{"point":["0","0"], "mults":[2,1,1], "tangents":[["1","1"],["1","0"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    pub point: Vec<String>,
    pub mults: Vec<u32>,
    #[serde(default)]
    pub tangents: Vec<Vec<String>>,
}

/// Transforms of a basis of an admissible subspace of `L`, in the current chart.
#[derive(Debug, Clone)]
pub struct ChartState<F: Field> {
    field: F,
    /// `sections[i]` is the transform of `Σ_j comb[i][j] · basis_j`.
    sections: Vec<MultiPoly<F>>,
    comb: Rows<F>,
    width: usize,
    step: usize,
}

impl<F: Field> ChartState<F> {
    /// Starts at `point`, moved to the origin.
    pub fn new(l: &LinearSys<F>, point: &AmbientPoint<F>) -> Self {
        let field = l.field().clone();
        let basis = l.basis();
        let width = basis.len();
        let comb = (0..width)
            .map(|i| {
                let mut r = vec![field.zero(); width];
                r[i] = field.one();
                r
            })
            .collect();
        let sections = basis.iter().map(|s| s.translate(point.coords())).collect();
        ChartState { field, sections, comb, width, step: 0 }
    }

    pub fn sections(&self) -> &[MultiPoly<F>] {
        &self.sections
    }

    pub fn nsections(&self) -> usize {
        self.sections.len()
    }

    /// Number of blowups performed.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Restricts to combinations vanishing to order `m` at the origin.
    pub fn impose(&mut self, m: u32) {
        let rows = low_conditions(&self.sections, m);
        if rows.iter().all(|r| r.iter().all(|c| self.field.is_zero(c))) {
            return;
        }
        let kernel = linalg::nullspace(&self.field, &rows, self.sections.len());
        self.rebase(&kernel);
    }

    fn rebase(&mut self, kernel: &Rows<F>) {
        let f = &self.field;
        let mut sections = Vec::with_capacity(kernel.len());
        let mut comb = Vec::with_capacity(kernel.len());
        for v in kernel {
            let mut s = MultiPoly::zero(f, 2);
            for (c, p) in v.iter().zip(&self.sections) {
                if !f.is_zero(c) {
                    s = s.add(&p.scale(c));
                }
            }
            sections.push(s);
            comb.push(linalg::combine(f, v, &self.comb, self.width));
        }
        self.sections = sections;
        self.comb = comb;
    }

    /// Chart substitution and division by the exceptional factor to the power
    /// `m`, without the final translation. For `[c, 1]` the infinitely near
    /// point then sits at `(c, 0)`.
    pub fn substitute(&self, t: &TangentDirection<F>, m: u32) -> Vec<MultiPoly<F>> {
        self.sections.iter().map(|s| chart_transform(s, t, m, false)).collect()
    }

    /// Blows up the origin and moves to the point selected by `t`; every
    /// section must have order at least `m` at the origin.
    pub fn blowup(&mut self, t: &TangentDirection<F>, m: u32) {
        self.sections = self.sections.iter().map(|s| chart_transform(s, t, m, true)).collect();
        self.step += 1;
    }

    /// The admissible subspace as spanning vectors over `L`'s basis.
    pub fn combinations(&self) -> &Rows<F> {
        &self.comb
    }

    /// Linear conditions on `L`'s basis coordinates cutting out the admissible subspace.
    pub fn constraint(&self) -> Rows<F> {
        linalg::nullspace(&self.field, &self.comb, self.width)
    }
}

fn low_conditions<F: Field>(sections: &[MultiPoly<F>], m: u32) -> Rows<F> {
    let cols: Vec<Vec<F::Elem>> = sections.iter().map(|s| s.low_degree_coefficients(m)).collect();
    (0..monomials_below(2, m).len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// One blowup step on a polynomial with order at least `m` at the origin.
fn chart_transform<F: Field>(f: &MultiPoly<F>, t: &TangentDirection<F>, m: u32, translate: bool) -> MultiPoly<F> {
    let field = f.field();
    let x = MultiPoly::var(field, 2, 0);
    let y = MultiPoly::var(field, 2, 1);
    match t.slope() {
        None => {
            let g = f.substitute(&[x.clone(), x.mul(&y)]);
            let g = g.div_monomial(&Monomial::new(vec![m, 0])).expect("multiplicity imposed before blowing up");
            g.swap_vars(0, 1)
        }
        Some(c) => {
            let g = f.substitute(&[x.mul(&y), y]);
            let g = g.div_monomial(&Monomial::new(vec![0, m])).expect("multiplicity imposed before blowing up");
            if translate && !field.is_zero(c) {
                g.translate(&[c.clone(), field.zero()])
            } else {
                g
            }
        }
    }
}

fn check_plane<F: Field>(l: &LinearSys<F>) -> Result<()> {
    let a = l.ambient();
    if !a.is_affine() || a.nvars() != 2 {
        return Err(Error::InvalidArgument("blowup chains need the affine plane".into()));
    }
    Ok(())
}

/// Runs one chain and returns the final chart state.
pub fn run_chain<F: Field>(l: &LinearSys<F>, spec: &BlowupChainSpec<F>) -> Result<ChartState<F>> {
    check_plane(l)?;
    let mut state = ChartState::new(l, &spec.point);
    state.impose(spec.mults[0]);
    for (t, w) in spec.tangents.iter().zip(spec.mults.windows(2)) {
        state.blowup(t, w[0]);
        state.impose(w[1]);
    }
    Ok(state)
}

/// Members of `l` with the prescribed infinitely near multiplicities.
pub fn impose_chain<F: Field>(l: &LinearSys<F>, specs: &[BlowupChainSpec<F>]) -> Result<LinearSys<F>> {
    check_plane(l)?;
    let constraints = specs
        .par_iter()
        .map(|s| run_chain(l, s).map(|st| st.constraint()))
        .collect::<Result<Vec<_>>>()?;
    Ok(l.subject_to(constraints.into_iter().flatten().collect()))
}

/// Multiplicities of the strict transforms of `f` at the points selected by
/// `tangents`, starting at `point`.
pub fn multiplicity_sequence<F: Field>(
    f: &MultiPoly<F>,
    point: &AmbientPoint<F>,
    tangents: &[TangentDirection<F>],
) -> Result<Vec<u32>> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if f.nvars() != 2 || point.coords().len() != 2 {
        return Err(Error::InvalidArgument("multiplicity sequences live on the affine plane".into()));
    }
    let mut g = f.translate(point.coords());
    let mut out = Vec::with_capacity(tangents.len() + 1);
    for t in tangents {
        let m = g.order().expect("strict transforms stay nonzero");
        out.push(m);
        g = chart_transform(&g, t, m, true);
    }
    out.push(g.order().expect("strict transforms stay nonzero"));
    Ok(out)
}

/// The sextic with two tacnodes of different directions at the origin,
/// symmetric under both sign flips of the coordinates.
pub fn quadrifolium() -> Result<MultiPoly<Rationals>> {
    let q = Rationals;
    let a = Ambient::affine(&q, 2);
    let sym: Vec<MultiPoly<Rationals>> = a
        .monomial_basis(&DegreeSpec::single(6))?
        .into_iter()
        .filter(|m| m.exponents().iter().all(|e| e % 2 == 0))
        .map(|m| MultiPoly::term(&q, m, q.one()))
        .collect();
    let j = LinearSys::from_sections(&a, sym, true, false)?;
    let pt = |x: &str, y: &str| a.parse_point(&[x.to_string(), y.to_string()]);
    let t = |x, y| TangentDirection::from_i64(&q, x, y);
    let specs = vec![
        BlowupChainSpec::new(pt("0", "0")?, vec![4, 2], vec![t(1, 0)?])?,
        BlowupChainSpec::new(pt("0", "0")?, vec![4, 2], vec![t(0, 1)?])?,
        BlowupChainSpec::new(pt("1", "1")?, vec![1, 1], vec![t(1, -1)?])?,
        BlowupChainSpec::new(pt("2/10", "7/10")?, vec![1], vec![])?,
        BlowupChainSpec::new(pt("7/10", "2/10")?, vec![1], vec![])?,
    ];
    let l = impose_chain(&j, &specs)?;
    if l.nsections() != 1 {
        return Err(Error::InvalidArgument(format!("expected one section, found {}", l.nsections())));
    }
    let s = l.basis().remove(0);
    let lead = s.coeff(&Monomial::new(vec![6, 0]));
    let inv = q.inv(&lead).ok_or(Error::DivisionByZero)?;
    Ok(s.scale(&inv))
}

/// Quartics with a tacnode at the origin and a cusp at `(2, 3)`.
pub fn tacnode_cusp() -> Result<(LinearSys<Rationals>, Vec<BlowupChainSpec<Rationals>>)> {
    let q = Rationals;
    let a = Ambient::affine(&q, 2);
    let j = LinearSys::complete(&a, DegreeSpec::single(4))?;
    let t = |x, y| TangentDirection::from_i64(&q, x, y);
    let specs = vec![
        BlowupChainSpec::new(a.point_from_i64(&[0, 0])?, vec![2, 2], vec![t(1, 1)?])?,
        BlowupChainSpec::new(a.point_from_i64(&[2, 3])?, vec![2, 1, 1], vec![t(1, 1)?, t(1, 0)?])?,
    ];
    Ok((impose_chain(&j, &specs)?, specs))
}

/// State of the sextic chain at the origin after eight double points and the
/// chart substitution of the eighth blowup; only the last tangent varies.
#[derive(Debug, Clone)]
pub struct PencilProbe<F: Field> {
    field: F,
    transforms: Vec<MultiPoly<F>>,
    low: Vec<Monomial>,
}

impl<F: Field> PencilProbe<F> {
    /// Double points at the origin and along tangents `[1,1], …, [1,7]`.
    pub fn new(field: &F) -> Result<Self> {
        let a = Ambient::affine(field, 2);
        let l = LinearSys::complete(&a, DegreeSpec::single(6))?;
        let mut state = ChartState::new(&l, &a.point_from_i64(&[0, 0])?);
        state.impose(2);
        for k in 1..=7 {
            state.blowup(&TangentDirection::from_i64(field, 1, k)?, 2);
            state.impose(2);
        }
        // [1, a] normalizes to [1/a, 1], a chart with exceptional line y = 0
        let chart = TangentDirection::from_i64(field, 1, 1)?;
        Ok(PencilProbe { field: field.clone(), transforms: state.substitute(&chart, 2), low: monomials_below(2, 2) })
    }

    /// Number of sections when the last tangent direction is `[1, a]`.
    pub fn nsections(&self, a: &F::Elem) -> usize {
        let Some(c) = self.field.inv(a) else {
            return 0;
        };
        let point = [c, self.field.zero()];
        let cols: Vec<Vec<F::Elem>> = self.transforms.iter().map(|g| g.taylor_coefficients(&point, &self.low)).collect();
        let rows: Rows<F> = (0..self.low.len()).map(|i| cols.iter().map(|col| col[i].clone()).collect()).collect();
        self.transforms.len() - linalg::rank(&self.field, &rows, self.transforms.len())
    }
}

/// All nonzero `a` in the finite field for which the chain
/// `[2]*9` with tangents `[1,1], …, [1,7], [1,a]` leaves a pencil.
pub fn sextic_pencil_scan<F: Field>(field: &F) -> Result<Vec<F::Elem>> {
    let q = field
        .order()
        .ok_or_else(|| Error::InvalidArgument("the pencil scan runs over a finite field".into()))?;
    let probe = PencilProbe::new(field)?;
    let hits = (1..q)
        .into_par_iter()
        .filter_map(|i| {
            let a = field.element(i).expect("index below order");
            (!field.is_zero(&a) && probe.nsections(&a) == 2).then_some(a)
        })
        .collect();
    Ok(hits)
}

/// Result of the pencil scan for one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilPrime {
    pub p: u64,
    pub values: Vec<String>,
    /// `(-(a1+a2), a1·a2)` when exactly two values exist and both lie in GF(p).
    pub coefficients: Option<(u64, u64)>,
}

/// Scans GF(p²) and reduces the two parameter values to the coefficients of
/// `(x - a1)(x - a2)` over GF(p).
pub fn pencil_prime(p: u64) -> Result<PencilPrime> {
    let f = ExtField::new(p, 2)?;
    let hits = sextic_pencil_scan(&f)?;
    let values = hits.iter().map(|a| f.format(a)).collect();
    let coefficients = match hits.as_slice() {
        [a1, a2] => {
            let s = f.neg(&f.add(a1, a2));
            let t = f.mul(a1, a2);
            // packed values below p are the prime subfield
            (s < p && t < p).then_some((s, t))
        }
        _ => None,
    };
    Ok(PencilPrime { p, values, coefficients })
}

/// Lifts the pencil polynomial from every usable prime in `primes`.
pub fn pencil_lift(primes: &[u64]) -> Result<(Vec<PencilPrime>, LiftResult)> {
    let scans = primes.iter().map(|&p| pencil_prime(p)).collect::<Result<Vec<_>>>()?;
    let lift = lift_scans(&scans)?;
    Ok((scans, lift))
}

fn lift_scans(scans: &[PencilPrime]) -> Result<LiftResult> {
    let (moduli, residues): (Vec<BigInt>, Vec<Vec<BigInt>>) = scans
        .iter()
        .filter_map(|s| s.coefficients.map(|(a, b)| (BigInt::from(s.p), vec![a.into(), b.into()])))
        .unzip();
    if moduli.is_empty() {
        return Err(Error::NoSolution);
    }
    crate::coeffs::lift(&moduli, &residues)
}

/// Adds primes from `first` upward until the reconstructed coefficients stay
/// unchanged after one more usable prime.
pub fn pencil_lift_stable(first: u64, max_primes: usize) -> Result<(Vec<PencilPrime>, LiftResult)> {
    let mut scans = Vec::new();
    let mut previous: Option<Vec<Option<BigRational>>> = None;
    let mut p = first.max(3);
    while scans.len() < max_primes {
        if is_prime(p) {
            let scan = pencil_prime(p)?;
            let usable = scan.coefficients.is_some();
            scans.push(scan);
            if usable {
                let lift = lift_scans(&scans)?;
                if lift.all_lifted() && previous.as_ref() == Some(&lift.lifted) {
                    return Ok((scans, lift));
                }
                previous = Some(lift.lifted);
            }
        }
        p += 1;
    }
    Err(Error::NoSolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::PrimeField;
    use crate::conditions::{impose_points, PointCondition};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plane<F: Field>(f: &F) -> Ambient<F> {
        Ambient::affine(f, 2)
    }

    #[test]
    fn tangent_normalization() {
        let q = Rationals;
        let t = TangentDirection::from_i64(&q, 3, 6).unwrap();
        assert_eq!(t, TangentDirection::from_i64(&q, -1, -2).unwrap());
        assert_eq!(t.slope(), Some(&q.parse("1/2").unwrap()));
        let h = TangentDirection::from_i64(&q, 5, 0).unwrap();
        assert!(h.is_horizontal());
        assert_eq!(h, TangentDirection::from_i64(&q, -2, 0).unwrap());
        assert!(TangentDirection::from_i64(&q, 0, 0).is_err());
    }

    #[test]
    fn spec_validation() {
        let q = Rationals;
        let a = plane(&q);
        let o = a.point_from_i64(&[0, 0]).unwrap();
        assert!(BlowupChainSpec::new(o.clone(), vec![2, 2], vec![]).is_err());
        assert!(BlowupChainSpec::new(o.clone(), vec![], vec![]).is_err());
        assert!(BlowupChainSpec::new(o, vec![1], vec![]).is_ok());
        let p3 = Ambient::projective(&q, 2);
        let l = LinearSys::complete(&p3, DegreeSpec::single(2)).unwrap();
        let spec = BlowupChainSpec::new(p3.point_from_i64(&[0, 0, 1]).unwrap(), vec![1], vec![]).unwrap();
        assert!(impose_chain(&l, &[spec]).is_err());
    }

    #[test]
    fn hand_computed_multiplicity_sequences() {
        let q = Rationals;
        let a = plane(&q);
        let o = a.point_from_i64(&[0, 0]).unwrap();
        let h = TangentDirection::from_i64(&q, 1, 0).unwrap();
        let cusp = a.parse_poly("y^2-x^3").unwrap();
        assert_eq!(multiplicity_sequence(&cusp, &o, &[h.clone(), h.clone()]).unwrap(), vec![2, 1, 1]);
        let tac = a.parse_poly("y^2-x^4").unwrap();
        assert_eq!(multiplicity_sequence(&tac, &o, &[h.clone()]).unwrap(), vec![2, 2]);
        let smooth = a.parse_poly("x+y^2-3").unwrap();
        assert_eq!(multiplicity_sequence(&smooth, &a.point_from_i64(&[3, 0]).unwrap(), &[]).unwrap(), vec![1]);
        // the tacnode branches are tangent to y = 0, not to x = y
        let d = TangentDirection::from_i64(&q, 1, 1).unwrap();
        assert_eq!(multiplicity_sequence(&tac, &o, &[d]).unwrap(), vec![2, 0]);
        assert!(multiplicity_sequence(&MultiPoly::zero(&q, 2), &o, &[]).is_err());
    }

    #[test]
    fn tacnode_member() {
        let q = Rationals;
        let a = plane(&q);
        let l = LinearSys::complete(&a, DegreeSpec::single(4)).unwrap();
        let spec = BlowupChainSpec::new(
            a.point_from_i64(&[0, 0]).unwrap(),
            vec![2, 2],
            vec![TangentDirection::from_i64(&q, 1, 0).unwrap()],
        )
        .unwrap();
        let j = impose_chain(&l, &[spec]).unwrap();
        assert!(j.contains(&a.parse_poly("y^2-x^4").unwrap()).unwrap());
        assert!(!j.contains(&a.parse_poly("y^2-x^3").unwrap()).unwrap());
        // 3 conditions for the double point, 3 more at the infinitely near point
        assert_eq!(j.nsections(), 15 - 6);
    }

    #[test]
    fn tacnode_and_cusp_quartics() {
        let (l, specs) = tacnode_cusp().unwrap();
        assert_eq!(l.nsections(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let f = l.random_member(&mut rng, Some((-20, 20))).unwrap();
            assert_eq!(multiplicity_sequence(&f, &specs[0].point, &specs[0].tangents).unwrap(), vec![2, 2]);
            assert_eq!(multiplicity_sequence(&f, &specs[1].point, &specs[1].tangents).unwrap(), vec![2, 1, 1]);
        }
    }

    #[test]
    fn quadrifolium_matches() {
        let f = quadrifolium().unwrap();
        assert_eq!(
            plane(&Rationals).format_poly(&f),
            "x^6+26171/9604*x^4*y^2+26171/9604*x^2*y^4-35775/4802*x^2*y^2+y^6"
        );
    }

    #[test]
    fn probe_agrees_with_full_chain() {
        let f = ExtField::new(7, 2).unwrap();
        let probe = PencilProbe::new(&f).unwrap();
        let a = plane(&f);
        let l = LinearSys::complete(&a, DegreeSpec::single(6)).unwrap();
        for i in [1u64, 2, 9, 23, 48] {
            let v = f.element(i).unwrap();
            let mut tangents: Vec<_> = (1..=7).map(|k| TangentDirection::from_i64(&f, 1, k).unwrap()).collect();
            tangents.push(TangentDirection::new(&f, f.one(), v).unwrap());
            let spec = BlowupChainSpec::new(a.point_from_i64(&[0, 0]).unwrap(), vec![2; 9], tangents).unwrap();
            assert_eq!(impose_chain(&l, &[spec]).unwrap().nsections(), probe.nsections(&v), "a = {}", f.format(&v));
        }
    }

    /// Whether the transforms of `f`, divided by the imposed multiplicities,
    /// reach the required orders.
    fn satisfies_chain<F: Field>(f: &MultiPoly<F>, spec: &BlowupChainSpec<F>) -> bool {
        if f.is_zero() {
            return true;
        }
        let mut g = f.translate(spec.point.coords());
        for (i, &m) in spec.mults.iter().enumerate() {
            if g.order().map_or(false, |o| o < m) {
                return false;
            }
            if let Some(t) = spec.tangents.get(i) {
                g = chart_transform(&g, t, m, true);
                if g.is_zero() {
                    return true;
                }
            }
        }
        true
    }

    #[test]
    fn brute_force_counts_over_small_fields() {
        let f = PrimeField::new(3).unwrap();
        let a = plane(&f);
        let l = LinearSys::complete(&a, DegreeSpec::single(3)).unwrap();
        let mons = a.monomial_basis(&DegreeSpec::single(3)).unwrap();
        let o = a.point_from_i64(&[0, 0]).unwrap();
        let p = a.point_from_i64(&[1, 2]).unwrap();
        let t = |x, y| TangentDirection::from_i64(&f, x, y).unwrap();
        let cases = vec![
            vec![BlowupChainSpec::new(o.clone(), vec![2, 1, 1], vec![t(1, 0), t(1, 0)]).unwrap()],
            vec![BlowupChainSpec::new(o.clone(), vec![2, 2], vec![t(1, 1)]).unwrap()],
            vec![
                BlowupChainSpec::new(o.clone(), vec![1, 1, 1], vec![t(2, 1), t(1, 1)]).unwrap(),
                BlowupChainSpec::new(p.clone(), vec![2], vec![]).unwrap(),
            ],
            vec![BlowupChainSpec::new(p, vec![2, 1], vec![t(0, 1)]).unwrap()],
        ];
        for specs in cases {
            let j = impose_chain(&l, &specs).unwrap();
            let mut count = 0u64;
            for idx in 0..3u64.pow(mons.len() as u32) {
                let mut k = idx;
                let poly = MultiPoly::from_terms(
                    &f,
                    2,
                    mons.iter().map(|m| {
                        let c = k % 3;
                        k /= 3;
                        (m.clone(), c)
                    }),
                );
                if specs.iter().all(|s| satisfies_chain(&poly, s)) {
                    count += 1;
                    assert!(j.contains(&poly).unwrap());
                }
            }
            assert_eq!(count, 3u64.pow(j.nsections() as u32));
        }
    }

    fn random_spec<R: rand::Rng>(f: &PrimeField, rng: &mut R, len: usize) -> BlowupChainSpec<PrimeField> {
        let a = plane(f);
        let point = a.random_point(rng, None).unwrap();
        let mut mults = vec![rng.gen_range(1..4u32)];
        for _ in 1..len {
            let last = *mults.last().unwrap();
            mults.push(rng.gen_range(1..=last));
        }
        // [1, 0] after the first blowup points along the previous exceptional
        // curve, where smooth branches cannot pass; keep such points out
        let tangents = (1..len)
            .map(|i| {
                if i == 1 && rng.gen_bool(0.2) {
                    TangentDirection::from_i64(f, 1, 0).unwrap()
                } else {
                    TangentDirection::new(f, f.sample(rng, None).unwrap(), f.one()).unwrap()
                }
            })
            .collect();
        BlowupChainSpec::new(point, mults, tangents).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn length_one_chains_are_point_conditions(seed in any::<u64>(), n in 1usize..4, d in 2u32..6) {
            let f = PrimeField::new(101).unwrap();
            let a = plane(&f);
            let l = LinearSys::complete(&a, DegreeSpec::single(d)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let specs: Vec<_> = (0..n).map(|_| random_spec(&f, &mut rng, 1)).collect();
            let conds: Vec<_> = specs.iter().map(|s| PointCondition::new(s.point.clone(), s.mults[0])).collect();
            let j = impose_chain(&l, &specs).unwrap();
            prop_assert!(j.span_eq(&impose_points(&l, &conds).unwrap()).unwrap());
        }

        #[test]
        fn members_reach_the_prescribed_multiplicities(seed in any::<u64>(), len in 1usize..4) {
            let f = PrimeField::new(10_007).unwrap();
            let a = plane(&f);
            let l = LinearSys::complete(&a, DegreeSpec::single(7)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let specs = vec![random_spec(&f, &mut rng, len), random_spec(&f, &mut rng, 2)];
            let j = impose_chain(&l, &specs).unwrap();
            prop_assume!(j.nsections() > 0);
            let g = j.random_member(&mut rng, None).unwrap();
            for s in &specs {
                let seq = multiplicity_sequence(&g, &s.point, &s.tangents).unwrap();
                prop_assert!(seq.iter().zip(&s.mults).all(|(a, b)| a >= b), "{:?} < {:?}", seq, s.mults);
            }
        }

        #[test]
        fn spec_order_is_irrelevant(seed in any::<u64>()) {
            let f = PrimeField::new(101).unwrap();
            let a = plane(&f);
            let l = LinearSys::complete(&a, DegreeSpec::single(6)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let specs: Vec<_> = (0..3).map(|k| random_spec(&f, &mut rng, k + 1)).collect();
            let rev: Vec<_> = specs.iter().rev().cloned().collect();
            prop_assert!(impose_chain(&l, &specs).unwrap().span_eq(&impose_chain(&l, &rev).unwrap()).unwrap());
        }
    }
}
