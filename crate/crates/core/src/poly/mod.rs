//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], so iteration runs in
//! ascending grevlex order and the leading term is the last entry.

mod gcd;
mod monomial;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::coeffs::Field;
use crate::error::{Error, Result};

pub use gcd::{gcd, gcd_all};
pub use monomial::{monomials_below, monomials_of_degree, Monomial};
pub use parse::{default_names, parse_poly, PrintOrder};

/// A polynomial in `nvars` variables with coefficients in `F`. No stored
/// coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<F: Field> {
    field: F,
    nvars: usize,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: &F, nvars: usize) -> Self {
        MultiPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: &F, nvars: usize, c: F::Elem) -> Self {
        Self::term(field, Monomial::one(nvars), c)
    }

    pub fn one(field: &F, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    pub fn var(field: &F, nvars: usize, i: usize) -> Self {
        Self::term(field, Monomial::var(nvars, i), field.one())
    }

    pub fn term(field: &F, m: Monomial, c: F::Elem) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !field.is_zero(&c) {
            terms.insert(m, c);
        }
        MultiPoly { field: field.clone(), nvars, terms }
    }

    /// Sums the given terms, merging repeated monomials.
    pub fn from_terms(field: &F, nvars: usize, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            p.add_term(m, &c);
        }
        p
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F::Elem)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &F::Elem)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&F::Elem> {
        self.terms.values().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Smallest total degree of a term: the multiplicity at the origin.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponents()[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    fn add_term(&mut self, m: Monomial, c: &F::Elem) {
        if self.field.is_zero(c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &self.field.neg(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|f, c| f.neg(c))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, self.nvars);
        }
        self.map_coeffs(|f, x| f.mul(x, c))
    }

    fn map_coeffs(&self, g: impl Fn(&F, &F::Elem) -> F::Elem) -> Self {
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), g(&self.field, c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &self.field.mul(c1, c2));
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, self.nvars);
        }
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), self.field.mul(x, c))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division by a monomial.
    pub fn div_monomial(&self, m: &Monomial) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.div(m).ok_or(Error::InexactDivision)?, c.clone());
        }
        Ok(MultiPoly { field: self.field.clone(), nvars: self.nvars, terms })
    }

    /// Exact division by an arbitrary nonzero polynomial.
    pub fn div_exact(&self, g: &Self) -> Result<Self> {
        let (lm, lc) = g.leading_term().ok_or(Error::DivisionByZero)?;
        let inv = self.field.inv(lc).expect("nonzero leading coefficient");
        let mut q = Self::zero(&self.field, self.nvars);
        let mut r = self.clone();
        while let Some((m, c)) = r.leading_term() {
            let t = m.div(lm).ok_or(Error::InexactDivision)?;
            let c = self.field.mul(c, &inv);
            r = r.sub(&g.mul_term(&t, &c));
            q.add_term(t, &c);
        }
        Ok(q)
    }

    /// Scales so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(c) if !self.field.is_one(c) => self.scale(&self.field.inv(c).unwrap()),
            _ => self.clone(),
        }
    }

    pub fn evaluate(&self, point: &[F::Elem]) -> F::Elem {
        assert_eq!(point.len(), self.nvars);
        let f = &self.field;
        let powers = power_table(f, point, self.max_exponents());
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &powers[i][e as usize]);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut mx = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (a, &e) in mx.iter_mut().zip(m.exponents()) {
                *a = (*a).max(e);
            }
        }
        mx
    }

    /// Replaces variable `i` by `images[i]` and expands.
    pub fn substitute(&self, images: &[Self]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(self.nvars, |g| g.nvars);
        let mx = self.max_exponents();
        let powers: Vec<Vec<Self>> = images
            .iter()
            .zip(&mx)
            .map(|(g, &e)| {
                let mut v = vec![Self::one(&self.field, target)];
                for k in 1..=e as usize {
                    let next = v[k - 1].mul(g);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(&self.field, target);
        for (m, c) in &self.terms {
            let mut t = Self::constant(&self.field, target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            for (k, x) in t.terms {
                out.add_term(k, &x);
            }
        }
        out
    }

    /// `f(x + p)`.
    pub fn translate(&self, point: &[F::Elem]) -> Self {
        let images: Vec<Self> = point
            .iter()
            .enumerate()
            .map(|(i, c)| Self::var(&self.field, self.nvars, i).add(&Self::constant(&self.field, self.nvars, c.clone())))
            .collect();
        self.substitute(&images)
    }

    /// Coefficients of all monomials of degree `< m`, in ascending grevlex order.
    pub fn low_degree_coefficients(&self, m: u32) -> Vec<F::Elem> {
        monomials_below(self.nvars, m).iter().map(|k| self.coeff(k)).collect()
    }

    /// Coefficients of `monomials` in `f(x + point)`, computed without expanding
    /// the translate: the coefficient of `x^α` is `Σ c · Π C(e_i, α_i) p_i^(e_i-α_i)`.
    pub fn taylor_coefficients(&self, point: &[F::Elem], monomials: &[Monomial]) -> Vec<F::Elem> {
        let f = &self.field;
        let mx = self.max_exponents();
        let powers = power_table(f, point, mx.clone());
        let binom = binomial_table(f, mx.iter().copied().max().unwrap_or(0));
        monomials
            .iter()
            .map(|alpha| {
                let mut acc = f.zero();
                'terms: for (m, c) in &self.terms {
                    let mut t = c.clone();
                    for (i, (&e, &a)) in m.exponents().iter().zip(alpha.exponents()).enumerate() {
                        if a > e {
                            continue 'terms;
                        }
                        if e > a {
                            t = f.mul(&t, &f.mul(&binom[e as usize][a as usize], &powers[i][(e - a) as usize]));
                        }
                    }
                    acc = f.add(&acc, &t);
                }
                acc
            })
            .collect()
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[var] -= 1;
            out.add_term(Monomial::new(ex), &self.field.mul(c, &self.field.from_i64(e as i64)));
        }
        out
    }

    /// Sets variable `var` to 1; the variable count is unchanged.
    pub fn dehomogenize(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let mut ex = m.exponents().to_vec();
            ex[var] = 0;
            out.add_term(Monomial::new(ex), c);
        }
        out
    }

    /// Multiplies each term by the power of `var` that brings it to the top degree.
    pub fn homogenize(&self, var: usize) -> Self {
        let d = self.degree().unwrap_or(0);
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let mut ex = m.exponents().to_vec();
            ex[var] += d - m.degree();
            out.add_term(Monomial::new(ex), c);
        }
        out
    }

    /// Swaps two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut ex = m.exponents().to_vec();
                    ex.swap(i, j);
                    (Monomial::new(ex), c.clone())
                })
                .collect(),
        }
    }

    /// Random combination of `support` with coefficients drawn by [`Field::sample`].
    pub fn random<R: Rng + ?Sized>(
        field: &F,
        nvars: usize,
        support: &[Monomial],
        range: Option<(i64, i64)>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut p = Self::zero(field, nvars);
        for m in support {
            let c = field.sample(rng, range)?;
            p.add_term(m.clone(), &c);
        }
        Ok(p)
    }

    /// Formats with explicit variable names and term order.
    pub fn format_with(&self, names: &[String], order: PrintOrder) -> String {
        parse::format_poly(self, names, order)
    }
}

/// `powers[i][k] = point[i]^k` for `k ≤ max[i]`.
pub(crate) fn power_table<F: Field>(f: &F, point: &[F::Elem], max: Vec<u32>) -> Vec<Vec<F::Elem>> {
    point
        .iter()
        .zip(max)
        .map(|(p, e)| {
            let mut v = Vec::with_capacity(e as usize + 1);
            v.push(f.one());
            for k in 1..=e as usize {
                v.push(f.mul(&v[k - 1], p));
            }
            v
        })
        .collect()
}

/// Pascal triangle with entries mapped into the field.
pub(crate) fn binomial_table<F: Field>(f: &F, n: u32) -> Vec<Vec<F::Elem>> {
    let mut rows: Vec<Vec<F::Elem>> = Vec::with_capacity(n as usize + 1);
    for i in 0..=n as usize {
        let mut row = vec![f.one(); i + 1];
        for k in 1..i {
            row[k] = f.add(&rows[i - 1][k - 1], &rows[i - 1][k]);
        }
        rows.push(row);
    }
    rows
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.nvars), PrintOrder::Grevlex))
    }
}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}
