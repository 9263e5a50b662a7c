//! Exact coefficient fields: the rationals, prime fields and their extensions.
//!
//! Every algorithm in the crate is generic over [`Field`]. A field value is a
//! lightweight context (for GF(p) just the modulus) and elements are plain
//! data; all arithmetic goes through the context. The dynamic
//! [`FieldElement`] type bundles an element with its field and checks that
//! operands agree, which is what file I/O and the command line use.

mod extension;
mod lift;
mod prime;
mod rational;

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use extension::ExtField;
pub use lift::{crt_combine, lift, rational_reconstruct, LiftResult};
pub use prime::{is_prime, PrimeField};
pub use rational::Rationals;

pub(crate) use lift::crt_step;
pub(crate) use rational::primitive_integer_row;

/// An exact field of coefficients.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync + 'static;

    fn characteristic(&self) -> u64;
    /// Number of elements, `None` for the rationals.
    fn order(&self) -> Option<u64>;
    /// Serializable description of this field.
    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Image of `num/den`; fails when the denominator vanishes in the field.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem> {
        let d = self.from_bigint(den);
        let inv = self.inv(&d).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(&self.from_bigint(num), &inv))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|i| self.mul(a, &i))
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// The `index`-th element of a finite field (a fixed enumeration of
    /// `0..order`). `None` for infinite fields or out-of-range indices.
    fn element(&self, index: u64) -> Option<Self::Elem>;

    /// Draws an element. With a range, an integer is drawn uniformly from it
    /// and mapped into the field; without one the field must be finite and
    /// the draw is uniform over all elements.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, range: Option<(i64, i64)>) -> Result<Self::Elem> {
        match range {
            Some((lo, hi)) => {
                if lo > hi {
                    return Err(Error::InvalidArgument(format!("empty range [{lo}..{hi}]")));
                }
                Ok(self.from_i64(rng.gen_range(lo..=hi)))
            }
            None => match self.order() {
                Some(q) => Ok(self.element(rng.gen_range(0..q)).expect("index below order")),
                None => Err(Error::InvalidArgument(
                    "random elements of an infinite field need an integer range".into(),
                )),
            },
        }
    }

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    /// Whether the printed form of `a` is a single signed token that can be
    /// juxtaposed with a monomial without parentheses.
    fn is_atomic(&self, _a: &Self::Elem) -> bool {
        true
    }

    /// Brings `rows` (each of length `ncols`) to reduced row-echelon form,
    /// dropping zero rows, and returns the pivot columns.
    fn row_reduce(&self, rows: &mut Vec<Vec<Self::Elem>>, ncols: usize) -> Vec<usize> {
        crate::linalg::gauss_jordan(self, rows, ncols)
    }

    /// Rank of `rows` (each of length `ncols`).
    fn rank(&self, rows: &[Vec<Self::Elem>], ncols: usize) -> usize {
        let mut m = rows.to_vec();
        self.row_reduce(&mut m, ncols).len()
    }
}

/// JSON description of a coefficient field, e.g. `{"kind":"gf","p":397}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    #[serde(alias = "rationals", alias = "q")]
    Rational,
    Gf {
        p: u64,
        #[serde(default = "one_u32", skip_serializing_if = "is_one_u32")]
        k: u32,
        /// Monic modulus coefficients, constant term first (extensions only).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<Vec<u64>>,
    },
}

fn one_u32() -> u32 {
    1
}
fn is_one_u32(k: &u32) -> bool {
    *k == 1
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "QQ"),
            FieldSpec::Gf { p, k: 1, .. } => write!(f, "GF({p})"),
            FieldSpec::Gf { p, k, .. } => write!(f, "GF({p}^{k})"),
        }
    }
}

/// A realized coefficient field of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientField {
    Rationals(Rationals),
    Prime(PrimeField),
    Extension(ExtField),
}

impl CoefficientField {
    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        match spec {
            FieldSpec::Rational => Ok(CoefficientField::Rationals(Rationals)),
            FieldSpec::Gf { p, k: 1, modulus: None } => Ok(CoefficientField::Prime(PrimeField::new(*p)?)),
            FieldSpec::Gf { p, k, modulus: None } => Ok(CoefficientField::Extension(ExtField::new(*p, *k)?)),
            FieldSpec::Gf { p, k, modulus: Some(m) } => {
                if m.len() != *k as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus of degree {} given for extension degree {k}",
                        m.len().saturating_sub(1)
                    )));
                }
                Ok(CoefficientField::Extension(ExtField::with_modulus(*p, m)?))
            }
        }
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            CoefficientField::Rationals(f) => f.spec(),
            CoefficientField::Prime(f) => f.spec(),
            CoefficientField::Extension(f) => f.spec(),
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientField::Rationals(_) => 0,
            CoefficientField::Prime(f) => f.characteristic(),
            CoefficientField::Extension(f) => f.characteristic(),
        }
    }

    pub fn extension_degree(&self) -> u32 {
        match self {
            CoefficientField::Extension(f) => f.degree(),
            _ => 1,
        }
    }

    /// Parses an element of this field ("-3/7", "3*u+5", ...).
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let value = match self {
            CoefficientField::Rationals(f) => Value::Rational(f.parse(s)?),
            CoefficientField::Prime(f) => Value::Residue(f.parse(s)?),
            CoefficientField::Extension(f) => Value::Residue(f.parse(s)?),
        };
        Ok(FieldElement { field: self.clone(), value })
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        let value = match self {
            CoefficientField::Rationals(f) => Value::Rational(f.from_i64(v)),
            CoefficientField::Prime(f) => Value::Residue(f.from_i64(v)),
            CoefficientField::Extension(f) => Value::Residue(f.from_i64(v)),
        };
        FieldElement { field: self.clone(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Rational(BigRational),
    /// GF(p^k) residue packed as a base-p integer.
    Residue(u64),
}

/// A field element that carries its field; binary operations check that
/// both operands live in the same field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldElement {
    field: CoefficientField,
    value: Value,
}

macro_rules! dispatch2 {
    ($self:ident, $other:ident, $f:ident, $a:ident, $b:ident => $body:expr) => {{
        if $self.field != $other.field {
            return Err(Error::FieldMismatch(
                $self.field.spec().to_string(),
                $other.field.spec().to_string(),
            ));
        }
        let value = match (&$self.field, &$self.value, &$other.value) {
            (CoefficientField::Rationals($f), Value::Rational($a), Value::Rational($b)) => {
                Value::Rational($body)
            }
            (CoefficientField::Prime($f), Value::Residue($a), Value::Residue($b)) => Value::Residue($body),
            (CoefficientField::Extension($f), Value::Residue($a), Value::Residue($b)) => {
                Value::Residue($body)
            }
            _ => unreachable!("element value does not match its field"),
        };
        Ok(FieldElement {
            field: $self.field.clone(),
            value,
        })
    }};
}

macro_rules! dispatch1 {
    ($self:ident, $f:ident, $a:ident => $body:expr) => {{
        let value = match (&$self.field, &$self.value) {
            (CoefficientField::Rationals($f), Value::Rational($a)) => Value::Rational($body),
            (CoefficientField::Prime($f), Value::Residue($a)) => Value::Residue($body),
            (CoefficientField::Extension($f), Value::Residue($a)) => Value::Residue($body),
            _ => unreachable!("element value does not match its field"),
        };
        FieldElement {
            field: $self.field.clone(),
            value,
        }
    }};
}

impl FieldElement {
    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        dispatch2!(self, other, f, a, b => f.add(a, b))
    }
    pub fn sub(&self, other: &Self) -> Result<Self> {
        dispatch2!(self, other, f, a, b => f.sub(a, b))
    }
    pub fn mul(&self, other: &Self) -> Result<Self> {
        dispatch2!(self, other, f, a, b => f.mul(a, b))
    }
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        dispatch2!(self, other, f, a, b => f.div(a, b).expect("nonzero divisor"))
    }
    pub fn neg(&self) -> Self {
        dispatch1!(self, f, a => f.neg(a))
    }
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(dispatch1!(self, f, a => f.inv(a).expect("nonzero")))
    }
    pub fn is_zero(&self) -> bool {
        match (&self.field, &self.value) {
            (CoefficientField::Rationals(f), Value::Rational(a)) => f.is_zero(a),
            (_, Value::Residue(a)) => *a == 0,
            _ => unreachable!(),
        }
    }

    /// The rational value, if this is an element of QQ.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(r) => Some(r),
            Value::Residue(_) => None,
        }
    }

    /// Coefficients over GF(p) in the power basis 1, u, u^2, ... (finite fields only).
    pub fn residue_coefficients(&self) -> Option<Vec<u64>> {
        match (&self.field, &self.value) {
            (CoefficientField::Prime(_), Value::Residue(a)) => Some(vec![*a]),
            (CoefficientField::Extension(f), Value::Residue(a)) => Some(f.digits(*a)),
            _ => None,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match (&self.field, &self.value) {
            (CoefficientField::Rationals(k), Value::Rational(a)) => k.format(a),
            (CoefficientField::Prime(k), Value::Residue(a)) => k.format(a),
            (CoefficientField::Extension(k), Value::Residue(a)) => k.format(a),
            _ => unreachable!(),
        };
        f.write_str(&s)
    }
}

/// Parses an optionally signed decimal integer, accepting the Unicode minus sign.
pub(crate) fn parse_bigint(s: &str) -> Option<BigInt> {
    let t = s.trim().replace('\u{2212}', "-");
    let t = t.strip_prefix('+').unwrap_or(&t);
    if t.is_empty() {
        return None;
    }
    t.parse::<BigInt>().ok()
}

/// Parses "n" or "n/d" into an unreduced numerator/denominator pair.
pub(crate) fn parse_ratio(s: &str) -> Option<(BigInt, BigInt)> {
    match s.split_once('/') {
        Some((n, d)) => Some((parse_bigint(n)?, parse_bigint(d)?)),
        None => Some((parse_bigint(s)?, BigInt::from(1))),
    }
}
