//! Buchberger's algorithm for the grevlex order.

use crate::coeffs::Field;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};

/// A reduced Gröbner basis (monic, sorted by leading monomial).
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis<F: Field> {
    field: F,
    nvars: usize,
    basis: Vec<MultiPoly<F>>,
}

impl<F: Field> GroebnerBasis<F> {
    /// Computes the reduced basis of the ideal generated by `gens`. Zero
    /// generators are ignored; an empty list gives the zero ideal.
    pub fn new(field: &F, nvars: usize, gens: &[MultiPoly<F>]) -> Result<Self> {
        if gens.iter().any(|g| g.nvars() != nvars) {
            return Err(Error::ShapeMismatch("generators in different rings".into()));
        }
        let mut basis: Vec<MultiPoly<F>> = Vec::new();
        let mut pairs: Vec<(usize, usize, Monomial)> = Vec::new();
        let push = |g: MultiPoly<F>, basis: &mut Vec<MultiPoly<F>>, pairs: &mut Vec<(usize, usize, Monomial)>| {
            let j = basis.len();
            let lm = g.leading_monomial().unwrap().clone();
            for (i, b) in basis.iter().enumerate() {
                let bl = b.leading_monomial().unwrap();
                // coprime leading monomials: the S-polynomial reduces to zero
                if !bl.is_coprime(&lm) {
                    pairs.push((i, j, bl.lcm(&lm)));
                }
            }
            basis.push(g);
        };
        for g in gens {
            let r = reduce(g, &basis);
            if !r.is_zero() {
                push(r.monic(), &mut basis, &mut pairs);
            }
        }
        while !pairs.is_empty() {
            // normal strategy: smallest lcm first
            let k = (0..pairs.len())
                .min_by(|&a, &b| pairs[a].2.cmp(&pairs[b].2).then((pairs[a].0, pairs[a].1).cmp(&(pairs[b].0, pairs[b].1))))
                .unwrap();
            let (i, j, lcm) = pairs.swap_remove(k);
            let s = s_poly(&basis[i], &basis[j], &lcm);
            let r = reduce(&s, &basis);
            if !r.is_zero() {
                push(r.monic(), &mut basis, &mut pairs);
            }
        }
        Ok(GroebnerBasis { field: field.clone(), nvars, basis: interreduce(basis) })
    }

    pub fn basis(&self) -> &[MultiPoly<F>] {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Whether the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.basis.iter().any(|g| g.is_constant())
    }

    /// Remainder of full multivariate division by the basis.
    pub fn normal_form(&self, f: &MultiPoly<F>) -> MultiPoly<F> {
        reduce(f, &self.basis)
    }

    pub fn contains(&self, f: &MultiPoly<F>) -> bool {
        self.normal_form(f).is_zero()
    }
}

fn s_poly<F: Field>(f: &MultiPoly<F>, g: &MultiPoly<F>, lcm: &Monomial) -> MultiPoly<F> {
    let field = f.field();
    let one = field.one();
    let a = f.mul_term(&lcm.div(f.leading_monomial().unwrap()).unwrap(), &one);
    let b = g.mul_term(&lcm.div(g.leading_monomial().unwrap()).unwrap(), &one);
    a.sub(&b)
}

/// Full reduction of `f` modulo monic `basis`.
fn reduce<F: Field>(f: &MultiPoly<F>, basis: &[MultiPoly<F>]) -> MultiPoly<F> {
    let field = f.field();
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, F::Elem)> = Vec::new();
    while let Some((m, c)) = p.leading_term() {
        let (m, c) = (m.clone(), c.clone());
        match basis
            .iter()
            .find_map(|g| m.div(g.leading_monomial().unwrap()).map(|t| (g, t)))
        {
            Some((g, t)) => {
                let lc = g.leading_coeff().unwrap();
                let k = field.div(&c, lc).unwrap();
                p = p.sub(&g.mul_term(&t, &k));
            }
            None => {
                p = p.sub(&MultiPoly::term(field, m.clone(), c.clone()));
                rem.push((m, c));
            }
        }
    }
    MultiPoly::from_terms(field, f.nvars(), rem)
}

fn interreduce<F: Field>(mut basis: Vec<MultiPoly<F>>) -> Vec<MultiPoly<F>> {
    basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    let mut minimal: Vec<MultiPoly<F>> = Vec::new();
    for g in basis {
        let lm = g.leading_monomial().unwrap();
        if !minimal.iter().any(|h| h.leading_monomial().unwrap().divides(lm)) {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MultiPoly<F>> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &minimal[i];
        let (lm, lc) = g.leading_term().unwrap();
        let tail = g.sub(&MultiPoly::term(g.field(), lm.clone(), lc.clone()));
        let r = MultiPoly::term(g.field(), lm.clone(), lc.clone()).add(&reduce(&tail, &others));
        out.push(r.monic());
    }
    out
}
