//! Exact scalars, integer number theory and dense rational linear algebra.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`]; the latter is always stored as a reduced
//! fraction with a positive denominator, so structural equality and hashing
//! coincide with numeric equality.

mod factor;
mod hilbert;
mod matrix;
mod residue;
pub mod text;

pub use factor::{factor, is_probable_prime, Factorization};
pub use hilbert::{hilbert_symbol, Place};
pub use matrix::{Matrix, Vector};
pub use residue::{
    is_quadratic_residue, is_square, legendre_symbol, padic_valuation, rational_sqrt, sqrt_mod_prime, squarefree_part,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Arbitrary-precision rational in canonical (reduced, positive denominator) form.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Parses `"p"` or `"p/q"` (optional leading `-`) into a canonical rational.
pub fn parse_rat(text: &str) -> Result<Rat, MathError> {
    let bad = || MathError::BadRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: Int = num.parse().map_err(|_| bad())?;
    let den: Int = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// `p/q` text for a rational, `p` when the denominator is one.
pub fn fmt_rat(q: &Rat) -> String {
    q.to_string()
}

/// Least common multiple of the denominators of `values` (1 for an empty list).
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Int {
    values.into_iter().fold(Int::one(), |acc, q| acc.lcm(q.denom()))
}

/// gcd of the absolute values; zero for an empty or all-zero list.
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Int>) -> Int {
    values.into_iter().fold(Int::zero(), |acc, v| acc.gcd(v))
}

/// Scales a nonzero rational vector to a primitive integer vector with the
/// same direction (entries keep their signs).
pub fn primitive_integer(v: &[Rat]) -> Vec<Int> {
    let l = lcm_denominators(v.iter());
    let ints: Vec<Int> = v.iter().map(|q| (q * &l).to_integer()).collect();
    let g = gcd_all(ints.iter());
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn sign(x: &Int) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn rat_sign(x: &Rat) -> i8 {
    sign(x.numer())
}
