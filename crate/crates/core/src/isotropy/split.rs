//! Zeros of diagonal forms in four or more variables by splitting off two
//! coefficients: pick `t` represented by `⟨a₀, a₁⟩` with `−t` represented by
//! the rest, solve both halves and glue the two zeros.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::decide::{bad_primes, locally_isotropic};
use super::{find_ternary, IsotropyError, INNER_TERNARY_BUDGET};
use crate::exact::{factor, legendre_symbol, primitive_integer, squarefree_part, Int, MathError, Rat};
use crate::par::Execution;

fn non_residue(p: &Int) -> Int {
    let mut n = Int::from(2);
    while legendre_symbol(&n, p) != -1 {
        n += 1;
    }
    n
}

/// Representatives of `ℚ_p^× / (ℚ_p^×)²`.
fn square_classes(p: &Int) -> Vec<Int> {
    if *p == Int::from(2) {
        [1, 3, 5, 7, 2, 6, 10, 14].into_iter().map(Int::from).collect()
    } else {
        let n = non_residue(p);
        vec![Int::one(), n.clone(), p.clone(), n * p]
    }
}

fn sign_of(v: &[Int]) -> Option<i8> {
    if v.iter().all(Signed::is_positive) {
        Some(1)
    } else if v.iter().all(Signed::is_negative) {
        Some(-1)
    } else {
        None
    }
}

fn halves_isotropic_at(head: &[Int], tail: &[Int], t: &Int, p: &Int) -> Result<bool, MathError> {
    let left = [head[0].clone(), head[1].clone(), -t];
    let mut right = tail.to_vec();
    right.push(t.clone());
    Ok(locally_isotropic(&left, p)? && locally_isotropic(&right, p)?)
}

/// A square-free `t` with `⟨head₀, head₁, −t⟩` and `⟨tail, t⟩` both isotropic
/// over ℚ. A prime of 2·∏aᵢ divides `t` only when no unit square class works
/// there; the remaining factor runs over small square-free multipliers until
/// every local condition holds.
fn splitting_value(head: &[Int], tail: &[Int]) -> Result<Int, IsotropyError> {
    let sign: i8 = match (sign_of(head), sign_of(tail)) {
        (Some(h), Some(t)) if h != -t => return Err(IsotropyError::NotIsotropic),
        (Some(h), _) => h,
        (None, Some(t)) => -t,
        (None, None) => 1,
    };
    let mut all = head.to_vec();
    all.extend_from_slice(tail);
    let primes = bad_primes(&all)?;

    let mut forced = Int::from(sign);
    for p in &primes {
        let mut unit_ok = false;
        let mut any_ok = false;
        for c in square_classes(p) {
            if halves_isotropic_at(head, tail, &c, p)? {
                any_ok = true;
                unit_ok |= !(&c % p).is_zero();
            }
        }
        if !any_ok {
            return Err(IsotropyError::NotIsotropic);
        }
        if !unit_ok {
            forced *= p;
        }
    }

    let mut m = Int::one();
    loop {
        if m.gcd(&forced).is_one() {
            let f = factor(&m)?;
            if f.factors.iter().all(|(_, e)| *e == 1) {
                let t = &forced * &m;
                let mut ok = true;
                for p in primes.iter().chain(f.primes()) {
                    if !halves_isotropic_at(head, tail, &t, p)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return Ok(t);
                }
            }
        }
        m += 1;
    }
}

/// Integer zero of `⟨a⟩` for square-free `a` of length at least 3 that is
/// isotropic over ℚ.
fn split_squarefree(a: &[Int]) -> Result<Vec<Int>, IsotropyError> {
    if a.len() == 3 {
        return find_ternary(a, INNER_TERNARY_BUDGET, u64::MAX, Execution::Sequential);
    }
    let (head, tail) = a.split_at(2);
    let t = splitting_value(head, tail)?;
    let left = find_ternary(
        &[head[0].clone(), head[1].clone(), -&t],
        INNER_TERNARY_BUDGET,
        u64::MAX,
        Execution::Sequential,
    )?;
    let zeros = |k: usize| std::iter::repeat_n(Int::zero(), k);
    if left[2].is_zero() {
        return Ok(left[..2].iter().cloned().chain(zeros(tail.len())).collect());
    }
    let mut sub = tail.to_vec();
    sub.push(t);
    let right = split_squarefree(&sub)?;
    let (z, rest) = right.split_last().expect("nonempty");
    if z.is_zero() {
        return Ok(zeros(2).chain(rest.iter().cloned()).collect());
    }
    // a₀x₀² + a₁x₁² = t·z₁² and Σ tail·y² = −t·z₂²
    let mut out = vec![&left[0] * z, &left[1] * z];
    out.extend(rest.iter().map(|y| y * &left[2]));
    Ok(out)
}

/// Integer zero of an isotropic diagonal form in four or more variables.
pub(crate) fn split_zero(coeffs: &[Int]) -> Result<Vec<Int>, IsotropyError> {
    let parts: Vec<(Int, Int)> = coeffs.iter().map(squarefree_part).collect::<Result<_, MathError>>()?;
    // smallest coefficients first keeps the ternary halves small
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&i, &j| parts[i].0.abs().cmp(&parts[j].0.abs()).then(i.cmp(&j)));
    let reduced: Vec<Int> = order.iter().map(|&i| parts[i].0.clone()).collect();
    let sorted = split_squarefree(&reduced)?;
    let mut w = vec![Int::zero(); coeffs.len()];
    for (k, &i) in order.iter().enumerate() {
        w[i] = sorted[k].clone();
    }
    // a = s·r², so a zero w of ⟨s⟩ gives the zero w/r of ⟨a⟩
    let v: Vec<Rat> = w
        .iter()
        .zip(&parts)
        .map(|(wi, (_, r))| Rat::new(wi.clone(), r.clone()))
        .collect();
    Ok(primitive_integer(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn check(coeffs: &[Int]) {
        let w = split_zero(coeffs).unwrap();
        assert!(w.iter().any(|x| !x.is_zero()));
        let value: Int = coeffs.iter().zip(&w).map(|(a, x)| a * x * x).sum();
        assert!(value.is_zero(), "{coeffs:?} -> {w:?}");
    }

    #[test]
    fn small_forms() {
        check(&ints(&[1, 1, -1, -1]));
        check(&ints(&[1, 1, 1, -3]));
        check(&ints(&[3, -5, 7, -11, 13]));
        check(&ints(&[1, 2, 3, 4, -5, 6]));
        check(&ints(&[12, 18, -75, 1]));
    }

    #[test]
    fn large_coprime_structure() {
        // good splitting values need several primes in their residue classes
        let coeffs = vec![int(-1), int(141), int(-2740758), "405937048250778".parse().unwrap()];
        check(&coeffs);
    }
}
