//! Linear systems of hypersurfaces.
//!
//! A [`LinearSys`] is created cheaply from whatever description is at hand
//! (a degree, a list of sections, a coefficient matrix, or a set of linear
//! conditions on another system) and materializes monomial lists, echelon
//! forms and solvers only when a query needs them.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{Ambient, AmbientKind, AmbientSpec, DegreeSpec};
use crate::coeffs::Field;
use crate::error::{Error, Result};
use crate::linalg::{self, Rows};
use crate::poly::{gcd_all, Monomial, MultiPoly};

/// Independent spanning rows over a list of monomial columns, each row
/// carrying a unit entry in a column where all other rows vanish.
#[derive(Debug, Clone)]
pub(crate) struct Frame<F: Field> {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// `None` stands for the identity (every monomial is a row).
    pub rows: Option<Rows<F>>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Frame<F> {
    fn identity(monomials: Vec<Monomial>) -> Self {
        let pivots = (0..monomials.len()).collect();
        Self::with_index(monomials, None, pivots)
    }

    fn with_index(monomials: Vec<Monomial>, rows: Option<Rows<F>>, pivots: Vec<usize>) -> Self {
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Frame { monomials, index, rows, pivots }
    }

    /// Row-reduces `rows` over `monomials` (sorted ascending first).
    fn echelon(field: &F, monomials: &[Monomial], rows: &[Vec<F::Elem>]) -> Self {
        let mut order: Vec<usize> = (0..monomials.len()).collect();
        order.sort_by(|&a, &b| monomials[a].cmp(&monomials[b]));
        let mons: Vec<Monomial> = order.iter().map(|&i| monomials[i].clone()).collect();
        let mut m: Rows<F> = rows.iter().map(|r| order.iter().map(|&i| r[i].clone()).collect()).collect();
        let pivots = field.row_reduce(&mut m, mons.len());
        Self::with_index(mons, Some(m), pivots)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.monomials.len()
    }

    pub fn row(&self, field: &F, i: usize) -> Vec<F::Elem> {
        match &self.rows {
            Some(r) => r[i].clone(),
            None => {
                let mut v = vec![field.zero(); self.ncols()];
                v[i] = field.one();
                v
            }
        }
    }

    pub fn row_poly(&self, field: &F, i: usize) -> MultiPoly<F> {
        match &self.rows {
            Some(r) => self.poly(field, &r[i]),
            None => MultiPoly::term(field, self.monomials[i].clone(), field.one()),
        }
    }

    pub fn poly(&self, field: &F, v: &[F::Elem]) -> MultiPoly<F> {
        let n = self.monomials.first().map_or(0, Monomial::nvars);
        MultiPoly::from_terms(
            field,
            n,
            self.monomials
                .iter()
                .zip(v)
                .filter(|(_, c)| !field.is_zero(c))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Coefficient vector of `p` over the columns, `None` if `p` uses other monomials.
    pub fn vector(&self, p: &MultiPoly<F>) -> Option<Vec<F::Elem>> {
        let field = p.field();
        let mut v = vec![field.zero(); self.ncols()];
        for (m, c) in p.terms() {
            v[*self.index.get(m)?] = c.clone();
        }
        Some(v)
    }

    /// Coordinates of `v` in the row basis, `None` when `v` is outside the span.
    pub fn coords(&self, field: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let Some(rows) = &self.rows else {
            return Some(v.to_vec());
        };
        let c: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        (linalg::combine(field, &c, rows, self.ncols()) == v).then_some(c)
    }

    pub fn combine(&self, field: &F, coeffs: &[F::Elem]) -> Vec<F::Elem> {
        match &self.rows {
            Some(r) => linalg::combine(field, coeffs, r, self.ncols()),
            None => coeffs.to_vec(),
        }
    }

    /// Subspace spanned by `Σ k_i row_i` for the rows `k` of a kernel basis
    /// whose vectors have unit entries at `kpivots`.
    fn sub(&self, field: &F, k: Rows<F>, kpivots: Vec<usize>) -> Self {
        let pivots = kpivots.iter().map(|&j| self.pivots[j]).collect();
        let rows = match &self.rows {
            None => k,
            Some(_) => k.iter().map(|c| self.combine(field, c)).collect(),
        };
        Self::with_index(self.monomials.clone(), Some(rows), pivots)
    }
}

#[derive(Debug, Clone)]
enum Source<F: Field> {
    Complete,
    Sections(Vec<MultiPoly<F>>),
    Matrix { rows: Rows<F>, monomials: Vec<Monomial> },
    Framed(Frame<F>),
    /// Members of `parent` whose coordinates lie in the kernel of `conditions`.
    Kernel { conditions: Rows<F>, parent: Frame<F> },
}

/// Solver state for expressing polynomials in the section basis.
#[derive(Debug)]
enum Solver<F: Field> {
    /// Sections are the frame rows themselves.
    Frame,
    /// Reduced form of `[S | I]`: rows `r` with `r = t·S`.
    Augmented { frame: Frame<F>, transforms: Rows<F> },
}

/// A linear system of hypersurfaces of fixed (multi)degree on an ambient.
pub struct LinearSys<F: Field> {
    ambient: Ambient<F>,
    degree: DegreeSpec,
    source: Source<F>,
    echelonized: bool,
    independent: OnceLock<bool>,
    frame: OnceLock<Frame<F>>,
    sections: OnceLock<Vec<MultiPoly<F>>>,
    nsections: OnceLock<usize>,
    solver: OnceLock<Solver<F>>,
}

impl<F: Field> Clone for LinearSys<F> {
    fn clone(&self) -> Self {
        let l = Self::new(self.ambient.clone(), self.degree.clone(), self.source.clone(), self.echelonized);
        if let Some(f) = self.frame.get() {
            let _ = l.frame.set(f.clone());
        }
        if let Some(&n) = self.nsections.get() {
            let _ = l.nsections.set(n);
        }
        if let Some(&i) = self.independent.get() {
            let _ = l.independent.set(i);
        }
        l
    }
}

impl<F: Field> LinearSys<F> {
    fn new(ambient: Ambient<F>, degree: DegreeSpec, source: Source<F>, echelonized: bool) -> Self {
        LinearSys {
            ambient,
            degree,
            source,
            echelonized,
            independent: OnceLock::new(),
            frame: OnceLock::new(),
            sections: OnceLock::new(),
            nsections: OnceLock::new(),
            solver: OnceLock::new(),
        }
    }

    fn framed(ambient: &Ambient<F>, degree: &DegreeSpec, frame: Frame<F>, echelonized: bool) -> Self {
        let l = Self::new(ambient.clone(), degree.clone(), Source::Framed(frame), echelonized);
        let _ = l.independent.set(true);
        l
    }

    /// The complete system of the given degree; nothing is materialized.
    pub fn complete(ambient: &Ambient<F>, degree: DegreeSpec) -> Result<Self> {
        ambient.check_degree(&degree)?;
        let l = Self::new(ambient.clone(), degree, Source::Complete, false);
        let _ = l.independent.set(true);
        Ok(l)
    }

    /// The system with no sections.
    pub fn empty(ambient: &Ambient<F>, degree: DegreeSpec) -> Result<Self> {
        ambient.check_degree(&degree)?;
        let mons = ambient.monomial_basis(&degree)?;
        let frame = Frame::echelon(ambient.field(), &mons, &[]);
        Ok(Self::framed(ambient, &degree, frame, true))
    }

    /// System spanned by `sections`.
    ///
    /// With `check_basis` the sections are tested for independence and
    /// replaced by an echelon basis when dependent; `change_basis` always
    /// echelonizes. Without either the sections are kept verbatim and all
    /// linear algebra is deferred.
    pub fn from_sections(
        ambient: &Ambient<F>,
        sections: Vec<MultiPoly<F>>,
        check_basis: bool,
        change_basis: bool,
    ) -> Result<Self> {
        let degree = Self::common_degree(ambient, &sections)?;
        let l = Self::new(ambient.clone(), degree, Source::Sections(sections), false);
        if change_basis || (check_basis && !l.is_independent()) {
            let frame = l.frame().clone();
            return Ok(Self::framed(ambient, &l.degree, frame, true));
        }
        Ok(l)
    }

    fn common_degree(ambient: &Ambient<F>, sections: &[MultiPoly<F>]) -> Result<DegreeSpec> {
        if sections.is_empty() {
            return Err(Error::EmptySystem);
        }
        let mut degree: Option<DegreeSpec> = None;
        for s in sections {
            if s.nvars() != ambient.nvars() {
                return Err(Error::ShapeMismatch("section in a different number of variables".into()));
            }
            let d = ambient.degree_of(s)?;
            degree = Some(match degree {
                None => d,
                Some(prev) if ambient.is_affine() => DegreeSpec::single(prev.0[0].max(d.0[0])),
                Some(prev) if prev == d => prev,
                Some(prev) => return Err(Error::DegreeMismatch(format!("sections of degrees {prev} and {d}"))),
            });
        }
        Ok(degree.unwrap())
    }

    /// System whose sections are `matrix · monomials`.
    pub fn from_matrix(ambient: &Ambient<F>, matrix: Rows<F>, monomials: Vec<Monomial>) -> Result<Self> {
        if matrix.iter().any(|r| r.len() != monomials.len()) {
            return Err(Error::ShapeMismatch(format!("matrix rows must have {} entries", monomials.len())));
        }
        if monomials.iter().any(|m| m.nvars() != ambient.nvars()) {
            return Err(Error::ShapeMismatch("monomial in a different number of variables".into()));
        }
        let field = ambient.field();
        if matrix.iter().any(|r| r.iter().all(|c| field.is_zero(c))) {
            return Err(Error::ZeroSection);
        }
        let mono_polys: Vec<MultiPoly<F>> =
            monomials.iter().map(|m| MultiPoly::term(field, m.clone(), field.one())).collect();
        let degree = Self::common_degree(ambient, &mono_polys)?;
        Ok(Self::new(ambient.clone(), degree, Source::Matrix { rows: matrix, monomials }, false))
    }

    /// Members of `self` whose coordinates `a` (w.r.t. [`Self::basis`]) satisfy
    /// `conditions · a = 0`.
    pub fn subject_to(&self, conditions: Rows<F>) -> Self {
        let parent = self.frame().clone();
        let l = Self::new(self.ambient.clone(), self.degree.clone(), Source::Kernel { conditions, parent }, false);
        let _ = l.independent.set(true);
        l
    }

    /// Subsystem spanned by the combinations `Σ c_i b_i` of the basis [`Self::basis`].
    pub fn combinations(&self, coeffs: &[Vec<F::Elem>]) -> Self {
        let field = self.field();
        let frame = self.frame();
        let rows: Rows<F> = coeffs.iter().map(|c| frame.combine(field, c)).collect();
        let f = Frame::echelon(field, &frame.monomials, &rows);
        Self::framed(&self.ambient, &self.degree, f, true)
    }

    pub fn ambient(&self) -> &Ambient<F> {
        &self.ambient
    }

    pub fn field(&self) -> &F {
        self.ambient.field()
    }

    pub fn degree(&self) -> &DegreeSpec {
        &self.degree
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.source, Source::Complete)
    }

    pub fn is_echelonized(&self) -> bool {
        self.echelonized
    }

    /// Whether the stored sections are linearly independent.
    pub fn is_independent(&self) -> bool {
        *self.independent.get_or_init(|| self.nsections() == self.raw_count())
    }

    fn raw_count(&self) -> usize {
        match &self.source {
            Source::Sections(s) => s.len(),
            Source::Matrix { rows, .. } => rows.len(),
            _ => self.nsections(),
        }
    }

    /// Dimension of the span (the rank of the system).
    pub fn nsections(&self) -> usize {
        *self.nsections.get_or_init(|| {
            if let Some(f) = self.frame.get() {
                return f.rank();
            }
            let field = self.field();
            match &self.source {
                Source::Complete => self.ambient.basis_size(&self.degree).unwrap(),
                Source::Framed(f) => f.rank(),
                Source::Kernel { conditions, parent } => parent.rank() - field.rank(conditions, parent.rank()),
                Source::Matrix { rows, monomials } => field.rank(rows, monomials.len()),
                Source::Sections(s) => {
                    let (mons, rows) = section_matrix(field, s);
                    field.rank(&rows, mons.len())
                }
            }
        })
    }

    /// Projective dimension, `nsections - 1`.
    pub fn dimension(&self) -> i64 {
        self.nsections() as i64 - 1
    }

    pub(crate) fn frame(&self) -> &Frame<F> {
        self.frame.get_or_init(|| {
            let field = self.field();
            match &self.source {
                Source::Complete => {
                    let mut mons = self.ambient.monomial_basis(&self.degree).unwrap();
                    mons.reverse();
                    Frame::identity(mons)
                }
                Source::Framed(f) => f.clone(),
                Source::Sections(s) => {
                    let (mons, rows) = section_matrix(field, s);
                    Frame::echelon(field, &mons, &rows)
                }
                Source::Matrix { rows, monomials } => Frame::echelon(field, monomials, rows),
                Source::Kernel { conditions, parent } => {
                    let n = parent.rank();
                    let (r, piv) = linalg::rref(field, conditions, n);
                    let k = linalg::kernel_from_rref(field, &r, &piv, n);
                    let mut is_pivot = vec![false; n];
                    piv.iter().for_each(|&c| is_pivot[c] = true);
                    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
                    parent.sub(field, k, free)
                }
            }
        })
    }

    /// Monomial columns of the internal basis, ascending grevlex.
    pub fn monomials(&self) -> &[Monomial] {
        &self.frame().monomials
    }

    /// Coefficient rows of an independent basis over [`Self::monomials`].
    pub fn matrix(&self) -> Rows<F> {
        let f = self.frame();
        (0..f.rank()).map(|i| f.row(self.field(), i)).collect()
    }

    /// An independent basis of the span; coordinates passed to
    /// [`Self::subject_to`] and [`Self::combinations`] refer to it.
    pub fn basis(&self) -> Vec<MultiPoly<F>> {
        let f = self.frame();
        (0..f.rank()).map(|i| f.row_poly(self.field(), i)).collect()
    }

    /// The sections: the stored list, the rows of the stored matrix, or the
    /// monomial basis of a complete system.
    pub fn sections(&self) -> &[MultiPoly<F>] {
        self.sections.get_or_init(|| {
            let field = self.field();
            match &self.source {
                Source::Complete => self
                    .ambient
                    .monomial_basis(&self.degree)
                    .unwrap()
                    .into_iter()
                    .map(|m| MultiPoly::term(field, m, field.one()))
                    .collect(),
                Source::Sections(s) => s.clone(),
                Source::Matrix { rows, monomials } => rows
                    .iter()
                    .map(|r| {
                        MultiPoly::from_terms(field, self.ambient.nvars(), monomials.iter().cloned().zip(r.iter().cloned()))
                    })
                    .collect(),
                Source::Framed(_) | Source::Kernel { .. } => self.basis(),
            }
        })
    }

    /// Generators of the base ideal: an independent basis of sections.
    pub fn base_ideal_generators(&self) -> Vec<MultiPoly<F>> {
        match self.source {
            Source::Complete => self.sections().to_vec(),
            _ => self.basis(),
        }
    }

    fn solver(&self) -> &Solver<F> {
        self.solver.get_or_init(|| {
            let field = self.field();
            match &self.source {
                Source::Framed(_) | Source::Kernel { .. } => Solver::Frame,
                _ => {
                    let secs = self.sections();
                    let (mons, rows) = section_matrix(field, secs);
                    let k = secs.len();
                    let n = mons.len();
                    let mut aug: Rows<F> = rows
                        .into_iter()
                        .enumerate()
                        .map(|(i, mut r)| {
                            r.extend((0..k).map(|j| if i == j { field.one() } else { field.zero() }));
                            r
                        })
                        .collect();
                    let piv = field.row_reduce(&mut aug, n + k);
                    let mut rows = Vec::new();
                    let mut transforms = Vec::new();
                    let mut pivots = Vec::new();
                    for (row, &p) in aug.into_iter().zip(&piv) {
                        if p >= n {
                            break;
                        }
                        let (a, t) = row.split_at(n);
                        rows.push(a.to_vec());
                        transforms.push(t.to_vec());
                        pivots.push(p);
                    }
                    let frame = Frame::with_index(mons, Some(rows), pivots);
                    Solver::Augmented { frame, transforms }
                }
            }
        })
    }

    /// Builds the coefficient-map solver now (it is otherwise built on first use).
    pub fn coefficient_map(&self) {
        self.solver();
    }

    fn check_compatible(&self, f: &MultiPoly<F>) -> Result<()> {
        if f.nvars() != self.ambient.nvars() {
            return Err(Error::ShapeMismatch("polynomial in a different number of variables".into()));
        }
        if !self.ambient.has_degree(f, &self.degree) {
            return Err(Error::DegreeMismatch(format!(
                "{} does not have degree {}",
                self.ambient.format_poly(f),
                self.degree
            )));
        }
        Ok(())
    }

    /// Coordinates `a` with `f = Σ a_j s_j` over [`Self::sections`].
    pub fn coefficients(&self, f: &MultiPoly<F>) -> Result<Vec<F::Elem>> {
        self.check_compatible(f)?;
        let field = self.field();
        if self.is_complete() {
            return Ok(self.sections().iter().map(|s| f.coeff(s.leading_monomial().unwrap())).collect());
        }
        match self.solver() {
            Solver::Frame => {
                let frame = self.frame();
                let v = frame.vector(f).ok_or(Error::NoSolution)?;
                frame.coords(field, &v).ok_or(Error::NoSolution)
            }
            Solver::Augmented { frame, transforms } => {
                let v = frame.vector(f).ok_or(Error::NoSolution)?;
                let c = frame.coords(field, &v).ok_or(Error::NoSolution)?;
                let k = self.sections().len();
                Ok(linalg::combine(field, &c, transforms, k))
            }
        }
    }

    /// `Σ v_j s_j` over [`Self::sections`].
    pub fn polynomial(&self, v: &[F::Elem]) -> Result<MultiPoly<F>> {
        let secs = self.sections();
        if v.len() != secs.len() {
            return Err(Error::ShapeMismatch(format!("{} coefficients for {} sections", v.len(), secs.len())));
        }
        let field = self.field();
        let mut acc = MultiPoly::zero(field, self.ambient.nvars());
        for (c, s) in v.iter().zip(secs) {
            if !field.is_zero(c) {
                acc = acc.add(&s.scale(c));
            }
        }
        Ok(acc)
    }

    /// Whether `f` is a member of the span.
    pub fn contains(&self, f: &MultiPoly<F>) -> Result<bool> {
        match self.coefficients(f) {
            Ok(_) => Ok(true),
            Err(Error::NoSolution) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Coordinates of `f` with respect to [`Self::basis`], if in the span.
    pub fn basis_coordinates(&self, f: &MultiPoly<F>) -> Option<Vec<F::Elem>> {
        let frame = self.frame();
        let v = frame.vector(f)?;
        frame.coords(self.field(), &v)
    }

    fn same_kind(&self, other: &Self) -> Result<()> {
        if self.ambient.nvars() != other.ambient.nvars() || self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!("systems of degree {} and {}", self.degree, other.degree)));
        }
        Ok(())
    }

    /// Whether every member of `other` is a member of `self`.
    pub fn contains_system(&self, other: &Self) -> Result<bool> {
        self.same_kind(other)?;
        Ok(other.basis().iter().all(|g| self.basis_coordinates(g).is_some()))
    }

    /// Whether the two systems have the same span.
    pub fn span_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.nsections() == other.nsections() && self.contains_system(other)?)
    }

    /// A subsystem `C` with `span(C) ⊕ span(J) = span(self)`.
    pub fn complement(&self, j: &Self) -> Result<Self> {
        self.same_kind(j)?;
        let field = self.field();
        let frame = self.frame();
        let coords = j
            .basis()
            .iter()
            .map(|g| self.basis_coordinates(g).ok_or(Error::NotSubsystem))
            .collect::<Result<Rows<F>>>()?;
        let r = frame.rank();
        let (_, piv) = linalg::rref(field, &coords, r);
        let keep: Vec<usize> = (0..r).filter(|i| !piv.contains(i)).collect();
        let rows: Rows<F> = keep.iter().map(|&i| frame.row(field, i)).collect();
        let pivots = keep.iter().map(|&i| frame.pivots[i]).collect();
        let f = Frame::with_index(frame.monomials.clone(), Some(rows), pivots);
        Ok(Self::framed(&self.ambient, &self.degree, f, false))
    }

    /// Intersection of the spans of two systems of the same degree.
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_kind(other)?;
        if self.is_complete() {
            return Ok(other.clone());
        }
        if other.is_complete() {
            return Ok(self.clone());
        }
        let field = self.field();
        let mut mons: Vec<Monomial> = self.monomials().iter().chain(other.monomials()).cloned().collect();
        mons.sort_unstable();
        mons.dedup();
        let proj = |l: &Self| -> Rows<F> {
            let idx: HashMap<&Monomial, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
            l.matrix()
                .iter()
                .map(|row| {
                    let mut v = vec![field.zero(); mons.len()];
                    for (m, c) in l.monomials().iter().zip(row) {
                        v[idx[m]] = c.clone();
                    }
                    v
                })
                .collect()
        };
        let alpha = linalg::intersect_row_spaces(field, &proj(self), &proj(other), mons.len());
        Ok(self.combinations(&alpha))
    }

    /// Divides out the gcd `g` of all sections, returning `(L/g, g)` with `g` monic.
    pub fn reduction(&self) -> Result<(Self, MultiPoly<F>)> {
        let basis = if self.is_independent() { self.sections().to_vec() } else { self.basis() };
        let g = gcd_all(&basis).ok_or(Error::EmptySystem)?;
        if g.is_constant() {
            return Ok((self.clone(), g));
        }
        let reduced = basis.iter().map(|s| s.div_exact(&g)).collect::<Result<Vec<_>>>()?;
        let degree = match self.ambient.kind() {
            AmbientKind::Affine => {
                let dg = g.degree().unwrap();
                DegreeSpec::single(self.degree.0[0] - dg)
            }
            _ => {
                let gd = self.ambient.degree_of(&g)?;
                DegreeSpec(self.degree.0.iter().zip(&gd.0).map(|(a, b)| a - b).collect())
            }
        };
        let mut l = Self::from_sections(&self.ambient, reduced, false, false)?;
        l.degree = degree;
        let _ = l.independent.set(true);
        Ok((l, g))
    }

    /// Random member `Σ c_j s_j` with each `c_j` drawn by [`Field::sample`].
    /// An all-zero draw is redrawn up to 16 times.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R, range: Option<(i64, i64)>) -> Result<MultiPoly<F>> {
        let frame = self.frame();
        if frame.rank() == 0 {
            return Err(Error::EmptySystem);
        }
        let field = self.field();
        for _ in 0..16 {
            let c = (0..frame.rank()).map(|_| field.sample(rng, range)).collect::<Result<Vec<_>>>()?;
            if c.iter().all(|x| field.is_zero(x)) {
                continue;
            }
            return Ok(frame.poly(field, &frame.combine(field, &c)));
        }
        Err(Error::ZeroSection)
    }

    pub fn format_poly(&self, p: &MultiPoly<F>) -> String {
        self.ambient.format_poly(p)
    }

    pub fn to_json(&self) -> SystemJson {
        let sections = if self.is_complete() {
            None
        } else {
            Some(self.sections().iter().map(|s| self.format_poly(s)).collect())
        };
        SystemJson {
            ambient: self.ambient.spec(),
            degree: Some(self.degree.clone()),
            sections,
            matrix: None,
            monomials: None,
        }
    }

    pub fn from_json(field: &F, json: &SystemJson) -> Result<Self> {
        let ambient = Ambient::from_spec(field, &json.ambient)?;
        let system = match (&json.sections, &json.matrix, &json.monomials) {
            (Some(s), None, None) => {
                let polys = s.iter().map(|t| ambient.parse_poly(t)).collect::<Result<Vec<_>>>()?;
                Self::from_sections(&ambient, polys, true, false)?
            }
            (None, Some(m), Some(mons)) => {
                let rows = m
                    .iter()
                    .map(|r| r.iter().map(|c| field.parse(c)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Rows<F>>>()?;
                let mons = mons
                    .iter()
                    .map(|t| {
                        let p = ambient.parse_poly(t)?;
                        let single = p.terms().next().filter(|(_, c)| p.nterms() == 1 && field.is_one(c));
                        let m = single.map(|(m, _)| m.clone());
                        m.ok_or_else(|| Error::InvalidArgument(format!("'{t}' is not a monomial")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_matrix(&ambient, rows, mons)?
            }
            (None, None, None) => {
                let d = json
                    .degree
                    .clone()
                    .ok_or_else(|| Error::InvalidArgument("system needs a degree, sections or a matrix".into()))?;
                Self::complete(&ambient, d)?
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "give exactly one of \"sections\" or \"matrix\" with \"monomials\"".into(),
                ))
            }
        };
        if let Some(d) = &json.degree {
            if *d != system.degree && !(ambient.is_affine() && d.0[0] >= system.degree.0[0]) {
                return Err(Error::DegreeMismatch(format!("declared degree {d}, sections have degree {}", system.degree)));
            }
            if ambient.is_affine() && *d != system.degree {
                let mut s = system;
                s.degree = d.clone();
                return Ok(s);
            }
        }
        Ok(system)
    }
}

/// Sections as rows over the union of their monomials (ascending grevlex).
fn section_matrix<F: Field>(field: &F, sections: &[MultiPoly<F>]) -> (Vec<Monomial>, Rows<F>) {
    let mut mons: Vec<Monomial> = sections.iter().flat_map(|s| s.terms().map(|(m, _)| m.clone())).collect();
    mons.sort_unstable();
    mons.dedup();
    let idx: HashMap<&Monomial, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = sections
        .iter()
        .map(|s| {
            let mut v = vec![field.zero(); mons.len()];
            for (m, c) in s.terms() {
                v[idx[m]] = c.clone();
            }
            v
        })
        .collect();
    (mons, rows)
}

impl<F: Field> fmt::Debug for LinearSys<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSys")
            .field("ambient", &self.ambient.spec())
            .field("degree", &self.degree)
            .field("complete", &self.is_complete())
            .finish_non_exhaustive()
    }
}

impl<F: Field> fmt::Display for LinearSys<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.ambient;
        let space = match a.kind() {
            AmbientKind::Affine => format!("A^{}", a.dims()[0]),
            AmbientKind::Projective => format!("P^{}", a.dims()[0]),
            AmbientKind::Product => a.dims().iter().map(|n| format!("P^{n}")).collect::<Vec<_>>().join(" x "),
        };
        write!(
            f,
            "linear system on {space} over {} of degree {}, nsections={}",
            a.field().spec(),
            self.degree,
            self.nsections()
        )
    }
}

/// JSON form of a system: ambient plus a degree, sections, or a matrix with monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub ambient: AmbientSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p2() -> Ambient<Rationals> {
        Ambient::projective(&Rationals, 2)
    }

    fn polys(a: &Ambient<Rationals>, s: &[&str]) -> Vec<MultiPoly<Rationals>> {
        s.iter().map(|t| a.parse_poly(t).unwrap()).collect()
    }

    fn printed(l: &LinearSys<Rationals>) -> Vec<String> {
        l.sections().iter().map(|s| l.format_poly(s)).collect()
    }

    fn four_quadrics() -> LinearSys<Rationals> {
        let a = p2();
        let q = |n: i64| Rationals.from_i64(n);
        let mons: Vec<Monomial> = polys(&a, &["x^2", "x*y", "y^2", "x*z", "y*z", "z^2"])
            .iter()
            .map(|p| p.leading_monomial().unwrap().clone())
            .collect();
        let m = vec![
            vec![q(1), q(0), q(0), q(0), q(0), q(1)],
            vec![q(0), q(0), q(1), q(-1), q(0), q(0)],
            vec![q(0), q(1), q(1), q(0), q(0), q(0)],
            vec![q(0), q(0), q(0), q(1), q(0), q(0)],
        ];
        LinearSys::from_matrix(&a, m, mons).unwrap()
    }

    #[test]
    fn matrix_constructor_and_change_of_basis() {
        let l = four_quadrics();
        assert_eq!(printed(&l), ["x^2+z^2", "y^2-x*z", "x*y+y^2", "x*z"]);
        let j = LinearSys::from_sections(l.ambient(), l.sections().to_vec(), true, true).unwrap();
        assert!(j.is_echelonized());
        assert_eq!(printed(&j), ["x^2+z^2", "x*z", "y^2", "x*y"]);
        assert!(j.span_eq(&l).unwrap());
    }

    #[test]
    fn section_flags() {
        let a = p2();
        let l = LinearSys::from_sections(&a, polys(&a, &["x*y", "y^2-z^2"]), true, false).unwrap();
        assert_eq!(printed(&l), ["x*y", "y^2-z^2"]);
        assert!(!l.is_echelonized());
        let dep = LinearSys::from_sections(&a, polys(&a, &["x", "2*x", "y"]), true, false).unwrap();
        assert!(dep.is_echelonized());
        assert_eq!(dep.nsections(), 2);
        assert_eq!(dep.sections().len(), 2);
        let verbatim = LinearSys::from_sections(&a, polys(&a, &["x", "2*x", "y"]), false, false).unwrap();
        assert_eq!(verbatim.sections().len(), 3);
        assert_eq!(verbatim.nsections(), 2);
        assert!(!verbatim.is_independent());
        assert!(matches!(
            LinearSys::from_sections(&a, polys(&a, &["x", "y^2"]), true, false),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(LinearSys::from_sections(&a, polys(&a, &["x", "0"]), true, false).is_err());
    }

    #[test]
    fn matrix_errors() {
        let a = p2();
        let mons = vec![Monomial::new(vec![1, 0, 0]), Monomial::new(vec![0, 1, 0])];
        let q = |n: i64| Rationals.from_i64(n);
        assert!(matches!(
            LinearSys::from_matrix(&a, vec![vec![q(1)]], mons.clone()),
            Err(Error::ShapeMismatch(_))
        ));
        assert_eq!(
            LinearSys::from_matrix(&a, vec![vec![q(0), q(0)]], mons.clone()).unwrap_err(),
            Error::ZeroSection
        );
        let id = LinearSys::from_matrix(&a, vec![vec![q(1), q(0)], vec![q(0), q(1)]], mons).unwrap();
        assert_eq!(printed(&id), ["x", "y"]);
    }

    #[test]
    fn complete_systems_are_lazy() {
        let f = PrimeField::new(101).unwrap();
        let p3 = Ambient::projective(&f, 3);
        let l = LinearSys::complete(&p3, DegreeSpec::single(50)).unwrap();
        assert!(l.frame.get().is_none() && l.sections.get().is_none());
        assert_eq!(l.nsections(), 23426);
        assert!(l.frame.get().is_none());
        let p6 = Ambient::projective(&Rationals, 6);
        assert_eq!(LinearSys::complete(&p6, DegreeSpec::single(2)).unwrap().nsections(), 28);
        let a2 = Ambient::affine(&Rationals, 2);
        let c = LinearSys::complete(&a2, DegreeSpec::single(0)).unwrap();
        assert_eq!(c.nsections(), 1);
        let e = LinearSys::empty(&a2, DegreeSpec::single(3)).unwrap();
        assert_eq!((e.nsections(), e.dimension()), (0, -1));
    }

    #[test]
    fn coefficient_map_roundtrip_on_dependent_sections() {
        let a = p2();
        let secs = polys(&a, &["x^2+y^2", "x*y", "x^2+y^2+2*x*y", "z^2"]);
        let l = LinearSys::from_sections(&a, secs.clone(), false, false).unwrap();
        let f = secs[0].add(&secs[3].scale(&Rationals.from_i64(5)));
        let v = l.coefficients(&f).unwrap();
        assert_eq!(l.polynomial(&v).unwrap(), f);
        assert!(!l.contains(&a.parse_poly("x*z").unwrap()).unwrap());
        assert!(matches!(l.coefficients(&a.parse_poly("x").unwrap()), Err(Error::DegreeMismatch(_))));
        let c = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap();
        let v = c.coefficients(&f).unwrap();
        assert_eq!(c.polynomial(&v).unwrap(), f);
    }

    #[test]
    fn complement_and_rank_arithmetic() {
        let a = p2();
        let l = LinearSys::complete(&a, DegreeSpec::single(2)).unwrap();
        let j = LinearSys::from_sections(&a, polys(&a, &["x^2+y*z", "x*y"]), true, false).unwrap();
        let c = l.complement(&j).unwrap();
        assert_eq!(c.nsections(), 4);
        assert_eq!(l.complement(&l).unwrap().nsections(), 0);
        let e = LinearSys::empty(&a, DegreeSpec::single(2)).unwrap();
        assert!(l.complement(&e).unwrap().span_eq(&l).unwrap());
        // the complement together with J spans L
        let both: Vec<_> = c.basis().into_iter().chain(j.basis()).collect();
        let s = LinearSys::from_sections(&a, both, true, false).unwrap();
        assert!(s.span_eq(&l).unwrap());
        let outside = LinearSys::from_sections(&a, polys(&a, &["x^2"]), true, false).unwrap();
        assert_eq!(j.complement(&outside).unwrap_err(), Error::NotSubsystem);
    }

    #[test]
    fn reduction_divides_common_factor() {
        let a = p2();
        let l = LinearSys::from_sections(&a, polys(&a, &["x*y", "x*z"]), true, false).unwrap();
        let (r, g) = l.reduction().unwrap();
        assert_eq!(a.format_poly(&g), "x");
        assert_eq!(printed(&r), ["y", "z"]);
        assert_eq!(r.degree(), &DegreeSpec::single(1));
        let (r2, g2) = r.reduction().unwrap();
        assert!(g2.is_constant());
        assert!(r2.span_eq(&r).unwrap());
        let q = LinearSys::from_sections(&a, polys(&a, &["2*x*y-2*x^2", "6*x*z-6*x^2"]), true, false).unwrap();
        assert_eq!(a.format_poly(&q.reduction().unwrap().1), "x");
    }

    #[test]
    fn base_ideal_of_complete_system() {
        let a = p2();
        let l = LinearSys::complete(&a, DegreeSpec::single(1)).unwrap();
        let g: Vec<String> = l.base_ideal_generators().iter().map(|p| a.format_poly(p)).collect();
        assert_eq!(g, ["x", "y", "z"]);
    }

    #[test]
    fn random_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = four_quadrics();
        for _ in 0..10 {
            let f = l.random_member(&mut rng, Some((-10, 10))).unwrap();
            assert!(l.contains(&f).unwrap());
        }
        assert_eq!(l.random_member(&mut rng, Some((0, 0))).unwrap_err(), Error::ZeroSection);
        let e = LinearSys::empty(l.ambient(), DegreeSpec::single(2)).unwrap();
        assert_eq!(e.random_member(&mut rng, Some((1, 2))).unwrap_err(), Error::EmptySystem);
    }

    #[test]
    fn intersection_of_spans() {
        let a = p2();
        let l1 = LinearSys::from_sections(&a, polys(&a, &["x^2", "x*y", "y^2"]), true, false).unwrap();
        let l2 = LinearSys::from_sections(&a, polys(&a, &["x^2+y^2", "x*y+z^2", "y*z"]), true, false).unwrap();
        let i = l1.intersection(&l2).unwrap();
        assert_eq!(i.nsections(), 1);
        assert!(i.contains(&a.parse_poly("x^2+y^2").unwrap()).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let l = four_quadrics();
        let j = l.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = LinearSys::from_json(&Rationals, &serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.span_eq(&l).unwrap());
        let m: SystemJson = serde_json::from_str(
            r#"{"ambient":{"kind":"projective","dim":2,"field":{"kind":"rational"}},
                "matrix":[["1","0"],["1/2","3"]],"monomials":["x*y","z^2"]}"#,
        )
        .unwrap();
        let s = LinearSys::from_json(&Rationals, &m).unwrap();
        assert_eq!(printed(&s), ["x*y", "1/2*x*y+3*z^2"]);
        let bad = r#"{"ambient":{"kind":"affine","dim":2,"field":{"kind":"rational"}},"degree":[2],"extra":1}"#;
        assert!(serde_json::from_str::<SystemJson>(bad).is_err());
    }

    fn random_system(seed: u64, nsec: usize) -> LinearSys<PrimeField> {
        let f = PrimeField::new(31).unwrap();
        let a = Ambient::projective(&f, 2);
        let c = LinearSys::complete(&a, DegreeSpec::single(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut secs: Vec<_> = (0..nsec).map(|_| c.random_member(&mut rng, None).unwrap()).collect();
        // force a dependency now and then
        if nsec > 2 && seed % 3 == 0 {
            secs[0] = secs[1].add(&secs[2]);
        }
        LinearSys::from_sections(&a, secs, false, false).unwrap()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]

        #[test]
        fn coefficient_map_roundtrip(seed in proptest::prelude::any::<u64>(), nsec in 1usize..8) {
            let l = random_system(seed, nsec);
            let f = l.field().clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let v: Vec<u64> = (0..l.sections().len()).map(|_| f.sample(&mut rng, None).unwrap()).collect();
            let p = l.polynomial(&v).unwrap();
            proptest::prop_assert!(l.contains(&p).unwrap());
            let w = l.coefficients(&p).unwrap();
            proptest::prop_assert_eq!(l.polynomial(&w).unwrap(), p);
        }

        #[test]
        fn complement_ranks_add_up(seed in proptest::prelude::any::<u64>(), nsec in 1usize..8, k in 0usize..8) {
            let l = random_system(seed, nsec);
            let k = k.min(l.nsections());
            let b = l.basis();
            let j = if k == 0 {
                LinearSys::empty(l.ambient(), l.degree().clone()).unwrap()
            } else {
                LinearSys::from_sections(l.ambient(), b[..k].to_vec(), true, false).unwrap()
            };
            let c = l.complement(&j).unwrap();
            proptest::prop_assert_eq!(c.nsections() + j.nsections(), l.nsections());
        }
    }
}
