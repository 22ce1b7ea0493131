use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::normalize::normalize_ternary;
use crate::exact::{
    factor, hilbert_symbol, is_quadratic_residue, is_square, legendre_symbol, padic_valuation, Int, MathError, Place,
    Rat,
};

fn mixed_signs(coeffs: &[Int]) -> bool {
    coeffs.iter().any(Signed::is_positive) && coeffs.iter().any(Signed::is_negative)
}

/// Exact decision whether `Σ aᵢ xᵢ² = 0` has a nonzero rational solution.
pub fn is_isotropic(coeffs: &[Int]) -> Result<bool, MathError> {
    if coeffs.is_empty() {
        return Err(MathError::Domain("empty form"));
    }
    if coeffs.iter().any(Zero::is_zero) {
        return Err(MathError::Domain("diagonal coefficients must be nonzero"));
    }
    match coeffs.len() {
        1 => Ok(false),
        2 => Ok(is_square(&-(&coeffs[0] * &coeffs[1])).is_some()),
        3 => ternary(&coeffs[0], &coeffs[1], &coeffs[2]),
        4 => quaternary(coeffs),
        _ => Ok(mixed_signs(coeffs)),
    }
}

/// Legendre: for square-free pairwise coprime `a, b, c` of mixed sign,
/// `a x² + b y² + c z² = 0` is solvable iff `−bc`, `−ca`, `−ab` are squares
/// modulo `|a|`, `|b|`, `|c|` respectively.
pub(crate) fn ternary(a: &Int, b: &Int, c: &Int) -> Result<bool, MathError> {
    let n = normalize_ternary(a, b, c)?;
    let [a, b, c] = &n.coeffs;
    if !mixed_signs(&n.coeffs) {
        return Ok(false);
    }
    Ok(is_quadratic_residue(&-(b * c), &a.abs())?
        && is_quadratic_residue(&-(c * a), &b.abs())?
        && is_quadratic_residue(&-(a * b), &c.abs())?)
}

/// Hasse–Minkowski for four variables: only 2 and primes dividing a
/// coefficient can fail.
fn quaternary(coeffs: &[Int]) -> Result<bool, MathError> {
    if !mixed_signs(coeffs) {
        return Ok(false);
    }
    for p in bad_primes(coeffs)? {
        if !locally_isotropic(coeffs, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// 2 together with every prime dividing some coefficient, increasing.
pub(crate) fn bad_primes(coeffs: &[Int]) -> Result<Vec<Int>, MathError> {
    let mut primes = vec![Int::from(2)];
    for a in coeffs {
        primes.extend(factor(a)?.primes().cloned());
    }
    primes.sort();
    primes.dedup();
    Ok(primes)
}

/// Isotropy of `Σ aᵢxᵢ²` over `ℚ_p`. Binary: `−a₀a₁` is a square. Ternary:
/// `(−a₀a₂, −a₁a₂)_p = 1`. Quaternary: anisotropic iff the discriminant is a
/// square and `∏_{i<j} (aᵢ, aⱼ)_p ≠ (−1, −1)_p`. Five or more: always.
pub(crate) fn locally_isotropic(coeffs: &[Int], p: &Int) -> Result<bool, MathError> {
    let place = Place::Prime(p.clone());
    let q = |n: &Int| Rat::from_integer(n.clone());
    match coeffs {
        [a, b] => Ok(is_padic_square(&-(a * b), p)),
        [a, b, c] => Ok(hilbert_symbol(&q(&-(a * c)), &q(&-(b * c)), &place)? == 1),
        [_, _, _, _] => {
            let disc: Int = coeffs.iter().product();
            if !is_padic_square(&disc, p) {
                return Ok(true);
            }
            let mut hasse = 1i8;
            for i in 0..4 {
                for j in i + 1..4 {
                    hasse *= hilbert_symbol(&q(&coeffs[i]), &q(&coeffs[j]), &place)?;
                }
            }
            let minus_one = q(&Int::from(-1));
            Ok(hasse == hilbert_symbol(&minus_one, &minus_one, &place)?)
        }
        _ => Ok(coeffs.len() >= 5),
    }
}

/// Whether the nonzero integer `n` is a square in `ℚ_p`.
pub(crate) fn is_padic_square(n: &Int, p: &Int) -> bool {
    let v = padic_valuation(n, p);
    if v % 2 == 1 {
        return false;
    }
    let unit = n / num_traits::pow(p.clone(), v as usize);
    if *p == Int::from(2) {
        unit.mod_floor(&Int::from(8)) == Int::from(1)
    } else {
        legendre_symbol(&unit, p) == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn iso(v: &[i64]) -> bool {
        is_isotropic(&v.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_dimensions() {
        assert!(!iso(&[5]));
        assert!(!iso(&[1, 1]));
        assert!(!iso(&[1, -2]));
        assert!(iso(&[1, -4]));
        assert!(iso(&[3, -12]));
    }

    #[test]
    fn ternary_examples() {
        assert!(!iso(&[1, 1, -3]));
        assert!(iso(&[1, 1, -25]));
        assert!(iso(&[1, 1, -2]));
        assert!(!iso(&[1, 1, 1]));
        assert!(iso(&[9, -27, -216513]));
    }

    #[test]
    fn quaternary_examples() {
        assert!(iso(&[1, 1, -1, -1]));
        assert!(!iso(&[1, 1, 1, -7]));
        assert!(!iso(&[1, 1, 1, -15]));
        assert!(iso(&[1, 1, 1, -3]));
        assert!(!iso(&[1, 1, 1, 1]));
        // anisotropic at 3: x² + y² - 3z² - 3w² (−1 is not a square mod 3)
        assert!(!iso(&[1, 1, -3, -3]));
    }

    #[test]
    fn meyer() {
        assert!(iso(&[1, 2, 3, 4, -5]));
        assert!(!iso(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn zero_coefficient_is_a_domain_error() {
        assert!(is_isotropic(&[int(1), int(0), int(-1)]).is_err());
    }
}
