use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Int, MathError};

const TRIAL_LIMIT: u32 = 1 << 16;
const CACHE_CAPACITY: usize = 4096;

/// Large primes already found by rho. Coefficients are re-factored many times
/// in products and quotients; dividing by known primes first keeps that cheap.
fn prime_cache() -> &'static Mutex<Vec<Int>> {
    static CACHE: OnceLock<Mutex<Vec<Int>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

fn remember(p: &Int) {
    let mut cache = prime_cache().lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() < CACHE_CAPACITY && !cache.contains(p) {
        cache.push(p.clone());
    }
}

/// `n = sign · ∏ pᵉ` with primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i8,
    pub factors: Vec<(Int, u32)>,
}

impl Factorization {
    pub fn product(&self) -> Int {
        let mut acc = Int::from(self.sign);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &Int> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Trial division by primes below 2¹⁶, then Pollard–Brent rho on the cofactor.
pub fn factor(n: &Int) -> Result<Factorization, MathError> {
    if n.is_zero() {
        return Err(MathError::Domain("cannot factor zero"));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut found: Vec<Int> = Vec::new();

    for &p in small_primes() {
        if m.bits() < 64 && (p as u64) * (p as u64) > m.to_u64().expect("fits") {
            break;
        }
        while (&m % p).is_zero() {
            m /= p;
            found.push(Int::from(p));
        }
    }
    if m.bits() > 32 {
        let known = prime_cache().lock().unwrap_or_else(|e| e.into_inner()).clone();
        for p in known {
            while (&m % &p).is_zero() {
                m /= &p;
                found.push(p.clone());
            }
        }
    }
    if !m.is_one() {
        let bound = Int::from(TRIAL_LIMIT) * Int::from(TRIAL_LIMIT);
        if m < bound {
            found.push(m);
        } else {
            split_large(m, &mut found);
        }
    }

    found.sort();
    let mut factors: Vec<(Int, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { sign, factors })
}

fn split_large(n: Int, out: &mut Vec<Int>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        remember(&n);
        out.push(n);
        return;
    }
    if let Some(r) = exact_sqrt(&n) {
        split_large(r.clone(), out);
        split_large(r, out);
        return;
    }
    let mut c = 1u32;
    let d = loop {
        if let Some(d) = pollard_brent(&n, &Int::from(c)) {
            break d;
        }
        c += 1;
    };
    split_large(d.clone(), out);
    split_large(n / d, out);
}

fn exact_sqrt(n: &Int) -> Option<Int> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Brent's cycle-finding variant with batched gcds; `None` when the walk
/// degenerates and a different constant should be tried.
fn pollard_brent(n: &Int, c: &Int) -> Option<Int> {
    let f = |x: &Int| (x * x + c) % n;
    let batch = 128u64;
    let mut y = Int::from(2u32);
    let mut r = 1u64;
    let mut q = Int::one();
    let mut g = Int::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..batch.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Miller–Rabin with the first twelve prime bases; deterministic below 3.3·10²⁴.
pub fn is_probable_prime(n: &Int) -> bool {
    if n < &Int::from(2) {
        return false;
    }
    if let Some(small) = n.to_u64() {
        if small < 4 {
            return true;
        }
    }
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        let b = BigInt::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1: Int = n - 1;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &b in &BASES {
        let mut x = Int::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn small_composite() {
        let f = factor(&int(12)).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(f.factors, vec![(int(2), 2), (int(3), 1)]);
    }

    #[test]
    fn unit() {
        let f = factor(&int(-1)).unwrap();
        assert_eq!(f.sign, -1);
        assert!(f.factors.is_empty());
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(factor(&int(0)), Err(MathError::Domain(_))));
    }

    #[test]
    fn reduced_constant_of_degenerate_example() {
        // 216513 = 3^9 * 11
        let f = factor(&int(216513)).unwrap();
        assert_eq!(f.factors, vec![(int(3), 9), (int(11), 1)]);
        assert_eq!(f.product(), int(216513));
    }

    #[test]
    fn large_semiprime_goes_through_rho() {
        // two primes above the trial-division bound
        let p: Int = "1000000007".parse().unwrap();
        let q: Int = "998244353".parse().unwrap();
        let n = &p * &q * &p;
        let f = factor(&n).unwrap();
        assert_eq!(f.factors, vec![(q.clone(), 1), (p.clone(), 2)]);
        assert_eq!(f.product(), n);
    }

    #[test]
    fn primality() {
        assert!(is_probable_prime(&int(2)));
        assert!(is_probable_prime(&int(1_000_003)));
        assert!(!is_probable_prime(&int(1)));
        assert!(!is_probable_prime(&int(561)));
        let m61: Int = (Int::one() << 61) - 1;
        assert!(is_probable_prime(&m61));
    }
}
