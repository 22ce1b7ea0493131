use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{legendre_symbol, padic_valuation, Int, MathError, Rat};

/// A place of ℚ: the real place or a finite prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Prime(Int),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "∞"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Hilbert symbol `(a, b)_v ∈ {1, -1}`; for finite places `p` must be prime.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: &Place) -> Result<i8, MathError> {
    if a.is_zero() || b.is_zero() {
        return Err(MathError::Domain("Hilbert symbol of zero"));
    }
    // n/d and n·d differ by the square d².
    let a = a.numer() * a.denom();
    let b = b.numer() * b.denom();
    Ok(match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) if *p == Int::from(2) => hilbert_two(&a, &b),
        Place::Prime(p) => hilbert_odd(&a, &b, p),
    })
}

fn split(n: &Int, p: &Int) -> (u32, Int) {
    let v = padic_valuation(n, p);
    (v, n / num_traits::pow(p.clone(), v as usize))
}

fn hilbert_odd(a: &Int, b: &Int, p: &Int) -> i8 {
    let (alpha, u) = split(a, p);
    let (beta, v) = split(b, p);
    let eps_p = ((p - 1u32) >> 1u32).is_odd();
    let mut s: i8 = if eps_p && alpha % 2 == 1 && beta % 2 == 1 {
        -1
    } else {
        1
    };
    if beta % 2 == 1 {
        s *= legendre_symbol(&u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre_symbol(&v, p);
    }
    s
}

fn hilbert_two(a: &Int, b: &Int) -> i8 {
    let two = Int::from(2);
    let (alpha, u) = split(a, &two);
    let (beta, v) = split(b, &two);
    let eps = |x: &Int| x.mod_floor(&Int::from(4)) == Int::from(3);
    let omega = |x: &Int| {
        let r = x.mod_floor(&Int::from(8));
        r == Int::from(3) || r == Int::from(5)
    };
    let mut odd = eps(&u) && eps(&v);
    if alpha % 2 == 1 && omega(&v) {
        odd = !odd;
    }
    if beta % 2 == 1 && omega(&u) {
        odd = !odd;
    }
    if odd {
        -1
    } else {
        1
    }
}
