use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{parse_ratio, Field, FieldSpec};
use crate::error::{parse_err, Result};

/// The field of rational numbers. Elements are kept in lowest terms with a
/// positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(crate::Error::DivisionByZero);
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn element(&self, _index: u64) -> Option<BigRational> {
        None
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let (n, d) = parse_ratio(s).ok_or_else(|| parse_err(s, "expected an integer or a fraction n/d"))?;
        if d.is_zero() {
            return Err(parse_err(s, "zero denominator"));
        }
        Ok(BigRational::new(n, d))
    }
    fn is_atomic(&self, _a: &BigRational) -> bool {
        true
    }
    fn row_reduce(&self, rows: &mut Vec<Vec<BigRational>>, ncols: usize) -> Vec<usize> {
        crate::linalg::rref_rational(rows, ncols)
    }
    fn rank(&self, rows: &[Vec<BigRational>], ncols: usize) -> usize {
        crate::linalg::rank_rational(rows, ncols)
    }
}

/// Least common multiple of the denominators of `row`.
pub(crate) fn denominator_lcm(row: &[BigRational]) -> BigInt {
    use num_integer::Integer;
    row.iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a rational row to a primitive integer row (positive scaling).
pub(crate) fn primitive_integer_row(row: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = denominator_lcm(row);
    let ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}
