//! Affine spaces, projective spaces and products of projective spaces.

use std::fmt;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeffs::{Field, FieldSpec};
use crate::error::{Error, Result};
use crate::poly::{monomials_below, monomials_of_degree, Monomial, MultiPoly, PrintOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    Affine,
    Projective,
    Product,
}

/// JSON form: `{"kind":"projective","dim":3,"field":{"kind":"gf","p":397}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub kind: AmbientKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ambient<F: Field> {
    kind: AmbientKind,
    dims: Vec<usize>,
    names: Vec<String>,
    field: F,
}

const BLOCK_LETTERS: [&str; 6] = ["x", "y", "z", "w", "s", "t"];

fn default_ambient_names(kind: AmbientKind, dims: &[usize]) -> Vec<String> {
    let letters = |n: usize| -> Vec<String> { ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect() };
    match kind {
        AmbientKind::Affine if (2..=3).contains(&dims[0]) => letters(dims[0]),
        AmbientKind::Projective if dims[0] == 2 => letters(3),
        AmbientKind::Affine => (1..=dims[0]).map(|i| format!("x{i}")).collect(),
        AmbientKind::Projective => (1..=dims[0] + 1).map(|i| format!("x{i}")).collect(),
        AmbientKind::Product => dims
            .iter()
            .enumerate()
            .flat_map(|(b, &n)| {
                let base = BLOCK_LETTERS.get(b).map_or_else(|| format!("b{b}_"), |s| s.to_string());
                (0..=n).map(move |i| format!("{base}{i}"))
            })
            .collect(),
    }
}

impl<F: Field> Ambient<F> {
    pub fn affine(field: &F, n: usize) -> Self {
        Self::build(field, AmbientKind::Affine, vec![n])
    }

    pub fn projective(field: &F, n: usize) -> Self {
        Self::build(field, AmbientKind::Projective, vec![n])
    }

    pub fn product(field: &F, dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("product blocks need positive dimensions".into()));
        }
        Ok(Self::build(field, AmbientKind::Product, dims.to_vec()))
    }

    fn build(field: &F, kind: AmbientKind, dims: Vec<usize>) -> Self {
        let names = default_ambient_names(kind, &dims);
        Ambient { kind, dims, names, field: field.clone() }
    }

    /// Replaces the variable names; they must be distinct identifiers that
    /// do not collide with field-element syntax (such as `u`).
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.nvars() {
            return Err(Error::InvalidArgument(format!("expected {} variable names", self.nvars())));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok || names[..i].contains(n) || self.field.parse(n).is_ok() {
                return Err(Error::InvalidArgument(format!("invalid variable name '{n}'")));
            }
        }
        self.names = names;
        Ok(self)
    }

    pub fn from_spec(field: &F, spec: &AmbientSpec) -> Result<Self> {
        let compatible = match (field.spec(), &spec.field) {
            (FieldSpec::Gf { p, k, .. }, FieldSpec::Gf { p: p2, k: k2, modulus: None }) => p == *p2 && k == *k2,
            (a, b) => a == *b,
        };
        if !compatible {
            return Err(Error::FieldMismatch(field.spec().to_string(), spec.field.to_string()));
        }
        let single = || {
            spec.dim
                .ok_or_else(|| Error::InvalidArgument("ambient needs \"dim\"".into()))
        };
        let a = match spec.kind {
            AmbientKind::Affine => Self::affine(field, single()?),
            AmbientKind::Projective => Self::projective(field, single()?),
            AmbientKind::Product => {
                let dims = spec
                    .dims
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("product ambient needs \"dims\"".into()))?;
                Self::product(field, dims)?
            }
        };
        match &spec.names {
            Some(n) => a.with_names(n.clone()),
            None => Ok(a),
        }
    }

    pub fn spec(&self) -> AmbientSpec {
        let product = self.kind == AmbientKind::Product;
        AmbientSpec {
            kind: self.kind,
            dim: (!product).then_some(self.dims[0]),
            dims: product.then(|| self.dims.clone()),
            field: self.field.spec(),
            names: (self.names != default_ambient_names(self.kind, &self.dims)).then(|| self.names.clone()),
        }
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn is_affine(&self) -> bool {
        self.kind == AmbientKind::Affine
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        match self.kind {
            AmbientKind::Affine => self.dims[0],
            _ => self.dims.iter().map(|n| n + 1).sum(),
        }
    }

    /// Variable index ranges of the blocks (a single block unless a product).
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self.kind {
            AmbientKind::Affine => vec![0..self.dims[0]],
            _ => {
                let mut start = 0;
                self.dims
                    .iter()
                    .map(|n| {
                        let r = start..start + n + 1;
                        start += n + 1;
                        r
                    })
                    .collect()
            }
        }
    }

    pub fn print_order(&self) -> PrintOrder {
        if self.is_affine() {
            PrintOrder::Lex
        } else {
            PrintOrder::Grevlex
        }
    }

    pub fn format_poly(&self, p: &MultiPoly<F>) -> String {
        p.format_with(&self.names, self.print_order())
    }

    pub fn parse_poly(&self, s: &str) -> Result<MultiPoly<F>> {
        crate::poly::parse_poly(&self.field, &self.names, s)
    }

    pub fn check_degree(&self, d: &DegreeSpec) -> Result<()> {
        let want = if self.kind == AmbientKind::Product { self.dims.len() } else { 1 };
        if d.0.len() != want {
            return Err(Error::DegreeMismatch(format!("{} degree entries for {} blocks", d.0.len(), want)));
        }
        Ok(())
    }

    /// All monomials of the given (multi)degree in descending grevlex order;
    /// affine ambients take every degree up to `d`.
    pub fn monomial_basis(&self, d: &DegreeSpec) -> Result<Vec<Monomial>> {
        self.check_degree(d)?;
        let mut out = match self.kind {
            AmbientKind::Affine => monomials_below(self.dims[0], d.0[0] + 1),
            AmbientKind::Projective => monomials_of_degree(self.dims[0] + 1, d.0[0]),
            AmbientKind::Product => {
                let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
                for (&n, &db) in self.dims.iter().zip(&d.0) {
                    let block = monomials_of_degree(n + 1, db);
                    acc = acc
                        .iter()
                        .flat_map(|pre| {
                            block.iter().map(move |m| {
                                let mut e = pre.clone();
                                e.extend_from_slice(m.exponents());
                                e
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(Monomial::new).collect()
            }
        };
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(out)
    }

    /// Number of monomials of degree `d`, without materializing them.
    pub fn basis_size(&self, d: &DegreeSpec) -> Result<usize> {
        self.check_degree(d)?;
        let binom = |n: usize, k: usize| -> usize {
            let mut r: u128 = 1;
            for i in 0..k {
                r = r * (n - i) as u128 / (i + 1) as u128;
            }
            r as usize
        };
        Ok(match self.kind {
            AmbientKind::Affine | AmbientKind::Projective => binom(self.dims[0] + d.0[0] as usize, self.dims[0]),
            AmbientKind::Product => self
                .dims
                .iter()
                .zip(&d.0)
                .map(|(&n, &db)| binom(n + db as usize, n))
                .product(),
        })
    }

    /// Whether `p` is a form of degree `d` (degree at most `d` when affine).
    pub fn has_degree(&self, p: &MultiPoly<F>, d: &DegreeSpec) -> bool {
        let blocks = self.blocks();
        p.terms().all(|(m, _)| match self.kind {
            AmbientKind::Affine => m.degree() <= d.0[0],
            _ => blocks
                .iter()
                .zip(&d.0)
                .all(|(r, &db)| m.exponents()[r.clone()].iter().sum::<u32>() == db),
        })
    }

    /// The (multi)degree of a nonzero form, or the total degree when affine.
    pub fn degree_of(&self, p: &MultiPoly<F>) -> Result<DegreeSpec> {
        let (m, _) = p.leading_term().ok_or(Error::ZeroSection)?;
        let d = match self.kind {
            AmbientKind::Affine => DegreeSpec::single(p.degree().unwrap()),
            _ => DegreeSpec(
                self.blocks()
                    .iter()
                    .map(|r| m.exponents()[r.clone()].iter().sum())
                    .collect(),
            ),
        };
        if !self.has_degree(p, &d) {
            return Err(Error::DegreeMismatch(format!("{} is not homogeneous", self.format_poly(p))));
        }
        Ok(d)
    }

    /// Validates and canonicalizes a coordinate vector.
    pub fn point(&self, coords: Vec<F::Elem>) -> Result<AmbientPoint<F>> {
        if coords.len() != self.nvars() {
            return Err(Error::PointNotInAmbient(format!(
                "{} coordinates for {} variables",
                coords.len(),
                self.nvars()
            )));
        }
        let mut coords = coords;
        if !self.is_affine() {
            for r in self.blocks() {
                let block = &mut coords[r];
                let last = block
                    .iter()
                    .rposition(|c| !self.field.is_zero(c))
                    .ok_or_else(|| Error::PointNotInAmbient("zero vector in a projective block".into()))?;
                let inv = self.field.inv(&block[last]).unwrap();
                for c in block.iter_mut() {
                    *c = self.field.mul(c, &inv);
                }
            }
        }
        Ok(AmbientPoint { coords })
    }

    pub fn parse_point(&self, coords: &[String]) -> Result<AmbientPoint<F>> {
        let v = coords.iter().map(|s| self.field.parse(s)).collect::<Result<Vec<_>>>()?;
        self.point(v)
    }

    pub fn point_from_i64(&self, coords: &[i64]) -> Result<AmbientPoint<F>> {
        self.point(coords.iter().map(|&c| self.field.from_i64(c)).collect())
    }

    /// Chart data for imposing conditions at `p`: in each projective block
    /// the last nonzero coordinate (equal to 1) is the chart variable.
    pub fn affine_chart(&self, p: &AmbientPoint<F>) -> Chart<F> {
        let mut chart_vars = Vec::new();
        if !self.is_affine() {
            for r in self.blocks() {
                let j = r.clone().rev().find(|&i| !self.field.is_zero(&p.coords[i])).unwrap();
                chart_vars.push(j);
            }
        }
        let free_vars: Vec<usize> = (0..self.nvars()).filter(|i| !chart_vars.contains(i)).collect();
        let affine = free_vars.iter().map(|&i| p.coords[i].clone()).collect();
        Chart { chart_vars, free_vars, affine }
    }

    /// Uniformly random point; `range` is required over the rationals.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, range: Option<(i64, i64)>) -> Result<AmbientPoint<F>> {
        for _ in 0..10_000 {
            let coords = (0..self.nvars())
                .map(|_| self.field.sample(rng, range))
                .collect::<Result<Vec<_>>>()?;
            if let Ok(p) = self.point(coords) {
                return Ok(p);
            }
        }
        Err(Error::InvalidArgument("could not draw a nonzero point".into()))
    }

    pub fn format_point(&self, p: &AmbientPoint<F>) -> String {
        let f = |c: &F::Elem| self.field.format(c);
        if self.is_affine() {
            format!("({})", p.coords.iter().map(f).collect::<Vec<_>>().join(","))
        } else {
            self.blocks()
                .into_iter()
                .map(|r| format!("[{}]", p.coords[r].iter().map(f).collect::<Vec<_>>().join(":")))
                .collect::<Vec<_>>()
                .join("x")
        }
    }
}

/// All canonical points of P^n over a finite field (last nonzero coordinate 1),
/// grouped by the position of that coordinate, highest first.
pub fn projective_points<F: Field>(field: &F, n: usize) -> Vec<Vec<F::Elem>> {
    let q = field.order().expect("finite field");
    let mut out = Vec::new();
    for last in (0..=n).rev() {
        let total = q.pow(last as u32);
        for idx in 0..total {
            let mut v = vec![field.zero(); n + 1];
            let mut k = idx;
            for c in v.iter_mut().take(last) {
                *c = field.element(k % q).unwrap();
                k /= q;
            }
            v[last] = field.one();
            out.push(v);
        }
    }
    out
}

/// A (multi)degree: one entry per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSpec(pub Vec<u32>);

impl DegreeSpec {
    pub fn single(d: u32) -> Self {
        DegreeSpec(vec![d])
    }

    pub fn from_i64s(ds: &[i64]) -> Result<Self> {
        ds.iter()
            .map(|&d| u32::try_from(d).map_err(|_| Error::DegreeMismatch(format!("invalid degree {d}"))))
            .collect::<Result<Vec<_>>>()
            .map(DegreeSpec)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

/// Coordinates of a point, canonical in each projective block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmbientPoint<F: Field> {
    coords: Vec<F::Elem>,
}

impl<F: Field> AmbientPoint<F> {
    pub fn coords(&self) -> &[F::Elem] {
        &self.coords
    }
}

/// Where a point sits after dehomogenizing: chart variables are set to 1 and
/// the point becomes `affine` in the remaining `free_vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart<F: Field> {
    pub chart_vars: Vec<usize>,
    pub free_vars: Vec<usize>,
    pub affine: Vec<F::Elem>,
}

impl<F: Field> Chart<F> {
    /// Monomials in the free variables of degree `< m`, embedded in the full
    /// variable set (zero exponent at chart variables).
    pub fn low_monomials(&self, nvars: usize, m: u32) -> Vec<Monomial> {
        monomials_below(self.free_vars.len(), m)
            .into_iter()
            .map(|k| {
                let mut e = vec![0; nvars];
                for (&v, &x) in self.free_vars.iter().zip(k.exponents()) {
                    e[v] = x;
                }
                Monomial::new(e)
            })
            .collect()
    }

    /// Moves the point to the origin of the chart.
    pub fn localize(&self, p: &MultiPoly<F>, point: &AmbientPoint<F>) -> MultiPoly<F> {
        let mut q = p.clone();
        for &v in &self.chart_vars {
            q = q.dehomogenize(v);
        }
        let mut shift = point.coords.clone();
        for &v in &self.chart_vars {
            shift[v] = p.field().zero();
        }
        q.translate(&shift)
    }
}
