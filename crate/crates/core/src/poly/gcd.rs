//! Multivariate gcd by recursive primitive polynomial remainder sequences.

use super::{Monomial, MultiPoly};
use crate::coeffs::Field;

/// Monic gcd of two polynomials (zero only when both are zero).
pub fn gcd<F: Field>(a: &MultiPoly<F>, b: &MultiPoly<F>) -> MultiPoly<F> {
    gcd_inner(a, b).monic()
}

/// Monic gcd of a list of polynomials.
pub fn gcd_all<F: Field>(polys: &[MultiPoly<F>]) -> Option<MultiPoly<F>> {
    let mut it = polys.iter();
    let mut acc = it.next()?.clone();
    for p in it {
        if acc.is_constant() && !acc.is_zero() {
            break;
        }
        acc = gcd_inner(&acc, p);
    }
    Some(acc.monic())
}

fn gcd_inner<F: Field>(a: &MultiPoly<F>, b: &MultiPoly<F>) -> MultiPoly<F> {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let one = MultiPoly::one(a.field(), a.nvars());
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let v = (0..a.nvars())
        .max_by_key(|&i| a.degree_in(i).max(b.degree_in(i)))
        .expect("nonconstant polynomials have variables");
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd_inner(&ca, &cb);
    let mut f = a.div_exact(&ca).expect("content divides");
    let mut g = b.div_exact(&cb).expect("content divides");
    if deg(&f, v) < deg(&g, v) {
        std::mem::swap(&mut f, &mut g);
    }
    if deg(&g, v) == 0 {
        return c;
    }
    while !g.is_zero() {
        let r = prem(&f, &g, v);
        f = g;
        g = if r.is_zero() { r } else { primitive_part(&r, v) };
        if !g.is_zero() && deg(&g, v) == 0 {
            return c;
        }
    }
    c.mul(&primitive_part(&f, v))
}

fn deg<F: Field>(p: &MultiPoly<F>, v: usize) -> u32 {
    p.degree_in(v).unwrap_or(0)
}

/// Coefficient of `v^k`, as a polynomial free of `v`.
fn coeff_in<F: Field>(p: &MultiPoly<F>, v: usize, k: u32) -> MultiPoly<F> {
    MultiPoly::from_terms(
        p.field(),
        p.nvars(),
        p.terms().filter(|(m, _)| m.exponents()[v] == k).map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            e[v] = 0;
            (Monomial::new(e), c.clone())
        }),
    )
}

fn content<F: Field>(p: &MultiPoly<F>, v: usize) -> MultiPoly<F> {
    let mut ks: Vec<u32> = p.terms().map(|(m, _)| m.exponents()[v]).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut acc = MultiPoly::zero(p.field(), p.nvars());
    for k in ks {
        acc = gcd_inner(&acc, &coeff_in(p, v, k));
        if acc.is_constant() {
            return MultiPoly::one(p.field(), p.nvars());
        }
    }
    acc
}

fn primitive_part<F: Field>(p: &MultiPoly<F>, v: usize) -> MultiPoly<F> {
    p.div_exact(&content(p, v)).expect("content divides")
}

/// Sparse pseudo-remainder of `f` by `g` with respect to `v`.
fn prem<F: Field>(f: &MultiPoly<F>, g: &MultiPoly<F>, v: usize) -> MultiPoly<F> {
    let dg = deg(g, v);
    let lg = coeff_in(g, v, dg);
    let mut r = f.clone();
    while !r.is_zero() && deg(&r, v) >= dg {
        let dr = deg(&r, v);
        let lr = coeff_in(&r, v, dr);
        let mut shift = vec![0; f.nvars()];
        shift[v] = dr - dg;
        let one = f.field().one();
        r = r.mul(&lg).sub(&lr.mul(g).mul_term(&Monomial::new(shift), &one));
    }
    r
}
