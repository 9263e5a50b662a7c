//! Chinese remaindering and rational reconstruction for multi-prime lifting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Returns the unique `r` in `[0, ∏ moduli)` congruent to each residue.
pub fn crt_combine(residues: &[BigInt], moduli: &[BigInt]) -> Result<BigInt> {
    if residues.len() != moduli.len() || moduli.is_empty() {
        return Err(Error::InvalidArgument(
            "residues and moduli must be nonempty lists of equal length".into(),
        ));
    }
    if let Some(i) = moduli.iter().position(|m| !m.is_positive()) {
        return Err(Error::InvalidArgument(format!("modulus at position {i} is not positive")));
    }
    for i in 0..moduli.len() {
        for j in i + 1..moduli.len() {
            if !moduli[i].gcd(&moduli[j]).is_one() {
                return Err(Error::NotCoprime(i, j));
            }
        }
    }
    let mut acc = residues[0].mod_floor(&moduli[0]);
    let mut m = moduli[0].clone();
    for (r, q) in residues.iter().zip(moduli).skip(1) {
        acc = crt_step(&acc, &m, r, q);
        m *= q;
    }
    Ok(acc)
}

/// Combines `x mod m` with `r mod q` (coprime) into a residue mod `m·q`.
pub(crate) fn crt_step(x: &BigInt, m: &BigInt, r: &BigInt, q: &BigInt) -> BigInt {
    let inv = mod_inverse(&m.mod_floor(q), q).expect("coprime moduli");
    let t = ((r - x) * inv).mod_floor(q);
    x + m * t
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Recovers `n/d` from `r mod m` with |n|, d ≤ floor(sqrt(m/2)), gcd(n, d) = 1,
/// d > 0 and n ≡ d·r (mod m). Returns `None` when no such fraction exists.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    if !m.is_positive() {
        return None;
    }
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(BigRational::new(n, d))
}

/// Outcome of lifting residue vectors from several primes.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub moduli: Vec<BigInt>,
    /// `residues[i]` is the residue vector modulo `moduli[i]`.
    pub residues: Vec<Vec<BigInt>>,
    /// Reconstructed coordinates; `None` where reconstruction failed.
    pub lifted: Vec<Option<BigRational>>,
}

impl LiftResult {
    pub fn success(&self) -> Vec<bool> {
        self.lifted.iter().map(Option::is_some).collect()
    }

    pub fn all_lifted(&self) -> bool {
        self.lifted.iter().all(Option::is_some)
    }

    pub fn modulus_product(&self) -> BigInt {
        self.moduli.iter().product()
    }
}

/// CRT-combines residue vectors coordinatewise and rationally reconstructs each coordinate.
pub fn lift(moduli: &[BigInt], residues: &[Vec<BigInt>]) -> Result<LiftResult> {
    if moduli.len() != residues.len() || moduli.is_empty() {
        return Err(Error::InvalidArgument("one residue vector per modulus is required".into()));
    }
    let width = residues[0].len();
    if residues.iter().any(|v| v.len() != width) {
        return Err(Error::ShapeMismatch("residue vectors differ in length".into()));
    }
    let m: BigInt = moduli.iter().product();
    let mut lifted = Vec::with_capacity(width);
    for c in 0..width {
        let column: Vec<BigInt> = residues.iter().map(|v| v[c].clone()).collect();
        let r = crt_combine(&column, moduli)?;
        lifted.push(rational_reconstruct(&r, &m));
    }
    Ok(LiftResult {
        moduli: moduli.to_vec(),
        residues: residues.to_vec(),
        lifted,
    })
}
