use std::sync::Arc;

use num_bigint::BigInt;

use super::{Field, FieldSpec, PrimeField};
use crate::error::{parse_err, Error, Result};

const MAX_DEGREE: usize = 32;

/// The finite field GF(p^k) = GF(p)[u]/(f(u)) for a monic irreducible `f`.
///
/// An element c_0 + c_1 u + ... + c_{k-1} u^{k-1} is packed into a single
/// integer as c_0 + c_1 p + ... + c_{k-1} p^{k-1}, so elements are `Copy` and
/// the packed value doubles as the enumeration index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    base: PrimeField,
    k: usize,
    q: u64,
    /// Monic modulus, constant term first, length k + 1.
    modulus: Arc<[u64]>,
}

impl ExtField {
    /// GF(p^k) with the first monic irreducible modulus in the enumeration
    /// order of its packed coefficient vector.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let k = k as usize;
        check_size(p, k)?;
        let q = p.pow(k as u32);
        for idx in 0..q {
            let mut m = unpack(idx, p, k);
            m.push(1);
            if is_irreducible(&m, p) {
                return Ok(ExtField {
                    base,
                    k,
                    q,
                    modulus: m.into(),
                });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// GF(p^k) with an explicit monic modulus given constant term first.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        let k = modulus.len() - 1;
        check_size(p, k)?;
        if modulus[k] % p != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if !is_irreducible(&m, p) {
            return Err(Error::InvalidField(format!("modulus {m:?} is reducible over GF({p})")));
        }
        Ok(ExtField {
            base,
            k,
            q: p.pow(k as u32),
            modulus: m.into(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.k as u32
    }

    pub fn prime(&self) -> u64 {
        self.base.modulus()
    }

    /// The monic modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The generator `u`.
    pub fn generator(&self) -> u64 {
        if self.k == 1 {
            // u is the root of u + m0
            self.base.neg(&self.modulus[0])
        } else {
            self.base.modulus()
        }
    }

    /// Coefficient vector of a packed element, constant term first.
    pub fn digits(&self, a: u64) -> Vec<u64> {
        unpack(a, self.prime(), self.k)
    }

    /// Packs a coefficient vector (entries reduced mod p, length ≤ k).
    pub fn from_digits(&self, d: &[u64]) -> u64 {
        let p = self.prime();
        d.iter().rev().fold(0u64, |acc, &c| acc * p + c % p)
    }

    /// Whether `a` lies in the prime subfield GF(p).
    pub fn in_prime_field(&self, a: u64) -> bool {
        a < self.prime()
    }

    fn digits_into(&self, mut a: u64, out: &mut [u64; MAX_DEGREE]) {
        let p = self.prime();
        for slot in out.iter_mut().take(self.k) {
            *slot = a % p;
            a /= p;
        }
    }

    fn pack(&self, d: &[u64]) -> u64 {
        let p = self.prime();
        d[..self.k].iter().rev().fold(0u64, |acc, &c| acc * p + c)
    }
}

fn check_size(p: u64, k: usize) -> Result<()> {
    if k == 0 || k > MAX_DEGREE {
        return Err(Error::InvalidField(format!("extension degree {k} out of range")));
    }
    let bits = (p as f64).log2() * k as f64;
    if bits > 62.0 {
        return Err(Error::InvalidField(format!("GF({p}^{k}) is too large")));
    }
    Ok(())
}

fn unpack(mut a: u64, p: u64, k: usize) -> Vec<u64> {
    let mut d = Vec::with_capacity(k);
    for _ in 0..k {
        d.push(a % p);
        a /= p;
    }
    d
}

impl Field for ExtField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.prime()
    }
    fn order(&self) -> Option<u64> {
        Some(self.q)
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Gf {
            p: self.prime(),
            k: self.k as u32,
            modulus: Some(self.modulus.to_vec()),
        }
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.base.reduce_i64(v)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        self.base.from_bigint(v)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            return self.base.add(a, b);
        }
        let (mut x, mut y) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.digits_into(*a, &mut x);
        self.digits_into(*b, &mut y);
        for i in 0..self.k {
            x[i] = self.base.add(&x[i], &y[i]);
        }
        self.pack(&x)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            return self.base.sub(a, b);
        }
        let (mut x, mut y) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.digits_into(*a, &mut x);
        self.digits_into(*b, &mut y);
        for i in 0..self.k {
            x[i] = self.base.sub(&x[i], &y[i]);
        }
        self.pack(&x)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        if self.k == 1 {
            return self.base.mul(a, b);
        }
        let p = self.prime();
        let k = self.k;
        let (mut x, mut y) = ([0u64; MAX_DEGREE], [0u64; MAX_DEGREE]);
        self.digits_into(*a, &mut x);
        self.digits_into(*b, &mut y);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
            }
        }
        // reduce by the monic modulus from the top
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let sub = c * self.modulus[i] % p;
                prod[d - k + i] = (prod[d - k + i] + p - sub) % p;
            }
        }
        self.pack(&prod)
    }
    fn neg(&self, a: &u64) -> u64 {
        self.sub(&0, a)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn element(&self, index: u64) -> Option<u64> {
        (index < self.q).then_some(index)
    }
    fn format(&self, a: &u64) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        let d = self.digits(*a);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let s = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "u".to_string(),
                (1, c) => format!("{c}*u"),
                (i, 1) => format!("u^{i}"),
                (i, c) => format!("{c}*u^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
    fn parse(&self, s: &str) -> Result<u64> {
        // sums of terms c, u, c*u, u^i, c*u^i (c possibly a fraction) with signs
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('\u{2212}', "-");
        if t.is_empty() {
            return Err(parse_err(s, "empty element"));
        }
        let mut acc = 0u64;
        let mut rest = t.as_str();
        while !rest.is_empty() {
            let neg = rest.starts_with('-');
            if rest.starts_with('-') || rest.starts_with('+') {
                rest = &rest[1..];
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(parse_err(s, "dangling sign"));
            }
            let mut value = 1u64;
            for factor in term.split('*') {
                let f = if let Some(e) = factor.strip_prefix("u") {
                    let e = if e.is_empty() {
                        1
                    } else {
                        e.strip_prefix('^')
                            .and_then(|x| x.parse::<u64>().ok())
                            .ok_or_else(|| parse_err(s, "bad power of u"))?
                    };
                    self.pow(&self.generator(), e)
                } else {
                    self.base.parse(factor).map_err(|_| parse_err(s, "bad coefficient"))?
                };
                value = self.mul(&value, &f);
            }
            if neg {
                value = self.neg(&value);
            }
            acc = self.add(&acc, &value);
        }
        Ok(acc)
    }
    fn is_atomic(&self, a: &u64) -> bool {
        self.digits(*a).iter().filter(|&&c| c != 0).count() <= 1
    }
}

// --- dense univariate polynomials over GF(p), constant term first ---

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = PrimeField::new(p).unwrap().inv(&m[dm]).unwrap();
    while r.len() > dm {
        let c = r[r.len() - 1] * inv_lead % p;
        let shift = r.len() - 1 - dm;
        for i in 0..=dm {
            r[shift + i] = (r[shift + i] + p - c * m[i] % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: a degree-k polynomial is irreducible iff it has no
/// common factor with u^(p^i) - u for 1 ≤ i ≤ k/2.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let mut frob = vec![0, 1]; // u
    for _ in 1..=k / 2 {
        // frob <- frob^p mod m
        let mut acc = vec![1u64];
        let mut base = frob.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        frob = acc;
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(m, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}
