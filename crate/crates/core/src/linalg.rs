//! Dense exact linear algebra: reduced row-echelon forms, kernels and
//! subspace intersections.
//!
//! Matrices are plain `Vec<Vec<Elem>>` in row-major order. Every routine goes
//! through [`Field::row_reduce`], which prime fields override with a
//! delayed-reduction kernel and the rationals with a multi-modular one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coeffs::{crt_step, is_prime, primitive_integer_row, rational_reconstruct, Field};

/// Row-major matrix over `F`.
pub type Rows<F> = Vec<Vec<<F as Field>::Elem>>;

/// Plain Gauss-Jordan elimination, valid over any field.
pub fn gauss_jordan<F: Field>(field: &F, rows: &mut Vec<Vec<F::Elem>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, i);
        let inv = field.inv(&rows[r][c]).expect("nonzero pivot");
        for x in rows[r][c..].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !field.is_zero(&pivot_row[j]) {
                    row[j] = field.sub(&row[j], &field.mul(&f, &pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Storage word for the delayed-reduction elimination kernel.
trait Lane: Copy + Send + Sync + 'static {
    fn from_u64(x: u64) -> Self;
    fn get(self) -> u64;
    fn mul_add(self, g: Self, s: Self) -> Self;
}

impl Lane for u32 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x as u32
    }
    #[inline(always)]
    fn get(self) -> u64 {
        self as u64
    }
    #[inline(always)]
    fn mul_add(self, g: Self, s: Self) -> Self {
        self.wrapping_add(g.wrapping_mul(s))
    }
}

impl Lane for u64 {
    #[inline(always)]
    fn from_u64(x: u64) -> Self {
        x
    }
    #[inline(always)]
    fn get(self) -> u64 {
        self
    }
    #[inline(always)]
    fn mul_add(self, g: Self, s: Self) -> Self {
        self.wrapping_add(g.wrapping_mul(s))
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i64) as u64
}

const PAR_THRESHOLD: usize = 1 << 16;

/// Reduced row-echelon form over GF(p), `p < 2^32`, entries in `[0, p)`.
///
/// Rows below the pivot accumulate unreduced products `g·s` and are only
/// reduced when the word could overflow; small primes use 32-bit storage.
pub fn rref_mod_p(rows: &mut Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<usize> {
    let pm1 = p - 1;
    let sq = pm1 * pm1;
    if sq > 0 && (u32::MAX as u64 - pm1) / sq >= 64 {
        let budget = ((u32::MAX as u64 - pm1) / sq) as usize;
        let mut narrow: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as u32).collect())
            .collect();
        let piv = eliminate::<u32>(&mut narrow, ncols, p, budget);
        *rows = narrow
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as u64).collect())
            .collect();
        piv
    } else {
        let budget = if sq == 0 { usize::MAX } else { ((u64::MAX - pm1) / sq) as usize };
        eliminate::<u64>(rows, ncols, p, budget)
    }
}

fn eliminate<L: Lane>(rows: &mut Vec<Vec<L>>, ncols: usize, p: u64, budget: usize) -> Vec<usize> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut pending = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(i) = (r..nrows).find(|&i| rows[i][c].get() % p != 0) else {
            continue;
        };
        rows.swap(r, i);
        let (top, bottom) = rows.split_at_mut(r + 1);
        let piv = &mut top[r];
        let inv = inv_mod(piv[c].get() % p, p);
        for x in piv[c..].iter_mut() {
            *x = L::from_u64(x.get() % p * inv % p);
        }
        let piv = &*piv;
        let update = |row: &mut Vec<L>| {
            let f = row[c].get() % p;
            if f != 0 {
                let g = L::from_u64(p - f);
                for (d, s) in row[c + 1..].iter_mut().zip(&piv[c + 1..]) {
                    *d = d.mul_add(g, *s);
                }
            }
            row[c] = L::from_u64(0);
        };
        if bottom.len() * (ncols - c) >= PAR_THRESHOLD {
            bottom.par_iter_mut().for_each(update);
        } else {
            bottom.iter_mut().for_each(update);
        }
        pending += 1;
        if pending >= budget {
            for row in bottom.iter_mut() {
                for x in row[c + 1..].iter_mut() {
                    *x = L::from_u64(x.get() % p);
                }
            }
            pending = 0;
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            *x = L::from_u64(x.get() % p);
        }
    }
    // back substitution; only non-pivot columns right of each pivot change
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    for k in (0..r).rev() {
        let pk = pivots[k];
        let free: Vec<usize> = (pk + 1..ncols)
            .filter(|&j| !is_pivot[j] && rows[k][j].get() != 0)
            .collect();
        let (top, rest) = rows.split_at_mut(k);
        let src = &rest[0];
        for row in top.iter_mut() {
            let f = row[pk].get();
            if f == 0 {
                continue;
            }
            let g = p - f;
            for &j in &free {
                row[j] = L::from_u64((row[j].get() + g * src[j].get()) % p);
            }
            row[pk] = L::from_u64(0);
        }
    }
    pivots
}

/// Primes just below 2^30, in decreasing order.
fn modular_primes() -> impl Iterator<Item = u64> {
    ((1u64 << 29)..(1u64 << 30)).rev().filter(|&n| n % 2 == 1 && is_prime(n))
}

/// Pivot sets compare by rank first, then lexicographically: the rational
/// pivots are the largest rank and earliest columns any prime can show.
fn better_pivots(candidate: &[usize], best: &[usize]) -> std::cmp::Ordering {
    candidate
        .len()
        .cmp(&best.len())
        .then_with(|| best.cmp(candidate))
}

/// Reduced row-echelon form over QQ by multi-modular elimination.
///
/// Rows are scaled to primitive integer vectors, reduced modulo word-size
/// primes, and the echelon entries are recovered by Chinese remaindering and
/// rational reconstruction. The candidate is accepted only after the exact
/// check that every input row is the combination of the candidate rows
/// dictated by the pivot entries, which together with the rank bound makes
/// the result the true reduced form.
pub fn rref_rational(rows: &mut Vec<Vec<BigRational>>, ncols: usize) -> Vec<usize> {
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive_integer_row(r))
        .collect();
    if ints.is_empty() {
        rows.clear();
        return Vec::new();
    }
    let mut primes = modular_primes();
    let mut best: Option<Vec<usize>> = None;
    let mut free: Vec<usize> = Vec::new();
    let mut acc: Vec<Vec<BigInt>> = Vec::new();
    let mut modulus = BigInt::one();
    let mut batch = 1usize;
    loop {
        for _ in 0..batch {
            let p = primes.next().expect("ran out of modular primes");
            let bp = BigInt::from(p);
            let mut m: Vec<Vec<u64>> = ints
                .iter()
                .map(|r| r.iter().map(|x| x.mod_floor(&bp).to_u64().unwrap()).collect())
                .collect();
            let piv = rref_mod_p(&mut m, ncols, p);
            let order = best
                .as_ref()
                .map_or(std::cmp::Ordering::Greater, |b| better_pivots(&piv, b));
            match order {
                std::cmp::Ordering::Greater => {
                    let mut is_pivot = vec![false; ncols];
                    piv.iter().for_each(|&c| is_pivot[c] = true);
                    free = (0..ncols).filter(|&j| !is_pivot[j]).collect();
                    acc = m
                        .iter()
                        .map(|row| free.iter().map(|&j| BigInt::from(row[j])).collect())
                        .collect();
                    modulus = bp;
                    best = Some(piv);
                }
                std::cmp::Ordering::Equal => {
                    for (arow, mrow) in acc.iter_mut().zip(&m) {
                        for (x, &j) in arow.iter_mut().zip(&free) {
                            *x = crt_step(x, &modulus, &BigInt::from(mrow[j]), &bp);
                        }
                    }
                    modulus *= &bp;
                }
                std::cmp::Ordering::Less => {}
            }
        }
        let pivots = best.clone().expect("at least one prime processed");
        if let Some(candidate) = reconstruct_all(&acc, &modulus) {
            if verify_rref(&ints, &pivots, &free, &candidate) {
                *rows = assemble(&pivots, &free, candidate, ncols);
                return pivots;
            }
        }
        batch = batch.max(1) * 2;
    }
}

fn reconstruct_all(acc: &[Vec<BigInt>], m: &BigInt) -> Option<Vec<Vec<BigRational>>> {
    acc.iter()
        .map(|row| row.iter().map(|x| rational_reconstruct(x, m)).collect::<Option<Vec<_>>>())
        .collect()
}

/// Checks `a[j] = Σ_k a[pivot_k]·R[k][j]` for every input row `a` and free column `j`.
fn verify_rref(ints: &[Vec<BigInt>], pivots: &[usize], free: &[usize], cand: &[Vec<BigRational>]) -> bool {
    for (fi, &j) in free.iter().enumerate() {
        let den = cand
            .iter()
            .fold(BigInt::one(), |acc, row| acc.lcm(row[fi].denom()));
        let nums: Vec<BigInt> = cand
            .iter()
            .map(|row| row[fi].numer() * (&den / row[fi].denom()))
            .collect();
        for a in ints {
            let mut lhs = BigInt::zero();
            for (k, &pk) in pivots.iter().enumerate() {
                if !a[pk].is_zero() && !nums[k].is_zero() {
                    lhs += &a[pk] * &nums[k];
                }
            }
            if lhs != &a[j] * &den {
                return false;
            }
        }
    }
    true
}

fn assemble(pivots: &[usize], free: &[usize], cand: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    cand.into_iter()
        .enumerate()
        .map(|(k, vals)| {
            let mut row = vec![BigRational::zero(); ncols];
            row[pivots[k]] = BigRational::one();
            for (x, &j) in vals.into_iter().zip(free) {
                row[j] = x;
            }
            row
        })
        .collect()
}

/// Rank of a matrix.
pub fn rank<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    field.rank(rows, ncols)
}

/// Rank over QQ. The rank modulo a prime never exceeds the rational rank, so
/// a full modular rank settles it; otherwise the exact reduction decides.
pub fn rank_rational(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive_integer_row(r))
        .collect();
    let full = ints.len().min(ncols);
    if full == 0 {
        return 0;
    }
    for p in modular_primes().take(2) {
        let bp = BigInt::from(p);
        let mut m: Vec<Vec<u64>> = ints
            .iter()
            .map(|r| r.iter().map(|x| x.mod_floor(&bp).to_u64().unwrap()).collect())
            .collect();
        if rref_mod_p(&mut m, ncols, p).len() == full {
            return full;
        }
    }
    let mut m = rows.to_vec();
    rref_rational(&mut m, ncols).len()
}

/// Reduced row-echelon form (zero rows dropped) and pivot columns.
pub fn rref<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> (Rows<F>, Vec<usize>) {
    let mut m = rows.to_vec();
    let piv = field.row_reduce(&mut m, ncols);
    (m, piv)
}

/// Basis of the right kernel {v : M v = 0}, one vector per non-pivot column,
/// with a 1 in that column.
pub fn nullspace<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Rows<F> {
    let (r, piv) = rref(field, rows, ncols);
    kernel_from_rref(field, &r, &piv, ncols)
}

pub(crate) fn kernel_from_rref<F: Field>(field: &F, r: &[Vec<F::Elem>], piv: &[usize], ncols: usize) -> Rows<F> {
    let mut is_pivot = vec![false; ncols];
    piv.iter().for_each(|&c| is_pivot[c] = true);
    (0..ncols)
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut v = vec![field.zero(); ncols];
            v[j] = field.one();
            for (k, &pk) in piv.iter().enumerate() {
                v[pk] = field.neg(&r[k][j]);
            }
            v
        })
        .collect()
}

/// Transpose of a row-major matrix with `ncols` columns.
pub fn transpose<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Rows<F> {
    let mut t = vec![vec![field.zero(); rows.len()]; ncols];
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            t[j][i] = x.clone();
        }
    }
    t
}

/// Coefficient vectors `α` (w.r.t. the rows of `a`) spanning the combinations
/// `Σ α_i a_i` that also lie in the row space of `b`.
///
/// When the rows of `a` and of `b` are each independent, the returned
/// combinations form a basis of the intersection.
pub fn intersect_row_spaces<F: Field>(field: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>], ncols: usize) -> Rows<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let stacked: Vec<Vec<F::Elem>> = a.iter().chain(b).cloned().collect();
    let t = transpose(field, &stacked, ncols);
    nullspace(field, &t, stacked.len())
        .into_iter()
        .map(|mut v| {
            v.truncate(a.len());
            v
        })
        .filter(|v| v.iter().any(|x| !field.is_zero(x)))
        .collect()
}

/// `Σ_i coeffs[i] · rows[i]`.
pub fn combine<F: Field>(field: &F, coeffs: &[F::Elem], rows: &[Vec<F::Elem>], ncols: usize) -> Vec<F::Elem> {
    let mut out = vec![field.zero(); ncols];
    for (c, row) in coeffs.iter().zip(rows) {
        if field.is_zero(c) {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            if !field.is_zero(x) {
                *o = field.add(o, &field.mul(c, x));
            }
        }
    }
    out
}
