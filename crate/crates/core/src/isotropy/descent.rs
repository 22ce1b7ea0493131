//! Lagrange descent for `X² = P·Y² + R·Z²` with square-free `P`, `R`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{factor, is_square, sqrt_mod_prime, squarefree_part, Int, MathError};

/// Root of `t² ≡ q (mod m)` for square-free `m > 0`, reduced into
/// `(−m/2, m/2]`; `None` when `q` is not a square modulo `m`.
fn sqrt_mod_squarefree(q: &Int, m: &Int) -> Result<Option<Int>, MathError> {
    if m.is_one() {
        return Ok(Some(Int::zero()));
    }
    let mut acc = Int::zero();
    let mut modulus = Int::one();
    for (p, e) in factor(m)?.factors {
        debug_assert_eq!(e, 1);
        let Some(r) = sqrt_mod_prime(q, &p) else {
            return Ok(None);
        };
        // CRT: acc ≡ previous (mod modulus), acc ≡ r (mod p)
        let inv = modulus.extended_gcd(&p).x.mod_floor(&p);
        let k = ((&r - &acc) * inv).mod_floor(&p);
        acc += &modulus * k;
        modulus *= &p;
    }
    let mut t = acc.mod_floor(&modulus);
    if &t * 2 > modulus {
        t -= &modulus;
    }
    Ok(Some(t))
}

/// Shortest nonzero vector of the lattice `{(X, Y) : X ≡ t·Y (mod m)}` under
/// `X² + w·Y²` (Lagrange–Gauss reduction).
fn shortest(t: &Int, m: &Int, w: &Int) -> (Int, Int) {
    let norm = |v: &(Int, Int)| -> Int { &v.0 * &v.0 + w * &v.1 * &v.1 };
    let dot = |u: &(Int, Int), v: &(Int, Int)| -> Int { &u.0 * &v.0 + w * &u.1 * &v.1 };
    let mut a = (m.clone(), Int::zero());
    let mut b = (t.clone(), Int::one());
    if norm(&b) < norm(&a) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let na = norm(&a);
        // nearest integer to ⟨a, b⟩ / ⟨a, a⟩
        let num: Int = dot(&a, &b) * 2 + &na;
        let mu = num.div_floor(&(&na * 2));
        b = (&b.0 - &mu * &a.0, &b.1 - &mu * &a.1);
        if norm(&b) < na {
            std::mem::swap(&mut a, &mut b);
        } else {
            return a;
        }
    }
}

/// Nonzero `(X, Y, Z)` with `X² = P·Y² + R·Z²`, or `None` when the descent
/// meets a non-residue (the equation is then unsolvable).
///
/// With `|P| ≤ |R|` and `t² ≡ P (mod R)`, a short `(X, Y)` with `X ≡ tY`
/// satisfies `X² − PY² = R·k` with `|k| ≤ 2√(|P|/3)`, which replaces `R`.
pub fn solve_legendre(p: &Int, r: &Int) -> Result<Option<[Int; 3]>, MathError> {
    if p.is_zero() || r.is_zero() {
        return Err(MathError::Domain("Legendre coefficients must be nonzero"));
    }
    if let Some(s) = is_square(p) {
        return Ok(Some([s, Int::one(), Int::zero()]));
    }
    if let Some(s) = is_square(r) {
        return Ok(Some([s, Int::zero(), Int::one()]));
    }
    if p.abs() > r.abs() {
        return Ok(solve_legendre(r, p)?.map(|[x, y, z]| [x, z, y]));
    }
    if p.is_negative() && r.is_negative() {
        return Ok(None);
    }
    let Some(t) = sqrt_mod_squarefree(p, &r.abs())? else {
        return Ok(None);
    };
    let (x0, y0) = shortest(&t, &r.abs(), &p.abs());
    let k = (&x0 * &x0 - p * &y0 * &y0) / r;
    // k = 0 would make P a square, handled above
    let (k0, m) = squarefree_part(&k)?;
    let Some([x1, y1, w]) = solve_legendre(p, &k0)? else {
        return Ok(None);
    };
    // (X₀ + Y₀√P)(X₁ + Y₁√P) has norm R·k₀m² · k₀W² = R·(k₀mW)²
    let x = &x0 * &x1 + p * &y0 * &y1;
    let y = &x0 * &y1 + &y0 * &x1;
    let z = &k0 * &m * &w;
    Ok(Some([x, y, z]))
}
