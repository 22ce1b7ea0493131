use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{factor, Int, MathError, Rat};

/// `n = s · r²` with `s` square-free and `sign(s) = sign(n)`, `r > 0`.
pub fn squarefree_part(n: &Int) -> Result<(Int, Int), MathError> {
    let f = factor(n)?;
    let mut s = Int::from(f.sign);
    let mut r = Int::one();
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            s *= p;
        }
        r *= num_traits::pow(p.clone(), (*e / 2) as usize);
    }
    Ok((s, r))
}

/// Exact integer square root when `n` is a perfect square.
pub fn is_square(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Nonnegative rational square root when `q` is a square in ℚ.
pub fn rational_sqrt(q: &Rat) -> Option<Rat> {
    let n = is_square(q.numer())?;
    let d = is_square(q.denom())?;
    Some(Rat::new(n, d))
}

/// Largest `v` with `pᵛ | n`; `n` must be nonzero.
pub fn padic_valuation(n: &Int, p: &Int) -> u32 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// Legendre symbol `(a/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre_symbol(a: &Int, p: &Int) -> i8 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e: Int = (p - 1u32) >> 1;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli–Shanks); `None` for non-residues.
pub fn sqrt_mod_prime(a: &Int, p: &Int) -> Option<Int> {
    let two = Int::from(2);
    if *p == two {
        return Some(a.mod_floor(p));
    }
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(Int::zero());
    }
    if legendre_symbol(&a, p) != 1 {
        return None;
    }
    let p_minus_1: Int = p - 1u32;
    let mut q = p_minus_1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    if s == 1 {
        let e: Int = (p + 1u32) >> 2;
        return Some(a.modpow(&e, p));
    }
    let mut z = two.clone();
    while legendre_symbol(&z, p) != -1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(Int::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

/// Whether `x² ≡ q (mod n)` is solvable, decided per prime power of `n`.
pub fn is_quadratic_residue(q: &Int, n: &Int) -> Result<bool, MathError> {
    if !n.is_positive() {
        return Err(MathError::Domain("modulus must be positive"));
    }
    if n.is_one() {
        return Ok(true);
    }
    let f = factor(n)?;
    Ok(f.factors.iter().all(|(p, e)| residue_mod_prime_power(q, p, *e)))
}

fn residue_mod_prime_power(q: &Int, p: &Int, e: u32) -> bool {
    let pe = num_traits::pow(p.clone(), e as usize);
    let q = q.mod_floor(&pe);
    if q.is_zero() {
        return true;
    }
    let v = padic_valuation(&q, p);
    if v % 2 == 1 {
        return false;
    }
    let u = &q / num_traits::pow(p.clone(), v as usize);
    let rest = e - v;
    if *p == Int::from(2) {
        match rest {
            1 => true,
            2 => u.mod_floor(&Int::from(4)).is_one(),
            _ => u.mod_floor(&Int::from(8)).is_one(),
        }
    } else {
        legendre_symbol(&u, p) == 1
    }
}
