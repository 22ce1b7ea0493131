//! Iterative-deepening box searches for integer zeros of diagonal forms.

use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::exact::Int;
use crate::par::Execution;

/// Outcome of one deepening run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxOutcome {
    Found(Vec<i64>),
    /// The work budget ran out after exhausting every box up to this bound.
    OutOfBudget(u64),
    /// The next box would exceed the configured max-norm limit.
    LimitReached(u64),
    /// Coefficients too large for the machine-word kernel.
    Unsupported,
}

fn key(v: &[i64]) -> (i64, &[i64]) {
    (v.iter().copied().max().unwrap_or(0), v)
}

fn better(a: Option<Vec<i64>>, b: Option<Vec<i64>>) -> Option<Vec<i64>> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if key(&y) < key(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Smallest (max-norm, then lexicographic) nonnegative zero inside `[0, b]^n`
/// with the first coordinate fixed to `x0`.
fn best_in_slice(coeffs: &[i128], b: i64, x0: i64) -> Option<Vec<i64>> {
    let n = coeffs.len();
    let last = coeffs[n - 1];
    let mut x = vec![0i64; n];
    x[0] = x0;
    let mut best: Option<Vec<i64>> = None;
    loop {
        let s: i128 = (0..n - 1).map(|i| coeffs[i] * (x[i] as i128) * (x[i] as i128)).sum();
        if s % last == 0 {
            let q = -s / last;
            if q >= 0 {
                let r = (q as u128).sqrt();
                if r * r == q as u128 && r as i128 <= b as i128 {
                    let mut v = x.clone();
                    v[n - 1] = r as i64;
                    if v.iter().any(|&e| e != 0) {
                        best = better(best, Some(v));
                    }
                }
            }
        }
        // odometer over coordinates 1..n-1
        let mut i = 1;
        loop {
            if i >= n - 1 {
                return best;
            }
            if x[i] < b {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

fn box_points(b: u64, free: usize) -> Option<u64> {
    (b + 1).checked_pow(free as u32)
}

/// Deepening over `B = 1, 2, 4, …` on nonnegative vectors, returning the
/// minimal zero of the first box that contains one. Stops at `stop_at` when
/// given (a bound past which a zero is known to exist).
pub fn deepening_search(coeffs: &[Int], budget: u64, limit: u64, stop_at: Option<u64>, exec: Execution) -> BoxOutcome {
    let n = coeffs.len();
    debug_assert!(n >= 2);
    let Some(small) = coeffs.iter().map(|a| a.to_i128()).collect::<Option<Vec<i128>>>() else {
        return BoxOutcome::Unsupported;
    };
    let max_abs = small.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0);
    let mut b: u64 = 1;
    let mut spent: u64 = 0;
    loop {
        if b > limit {
            return BoxOutcome::LimitReached(b / 2);
        }
        // n · max|a| · B² must stay well inside i128.
        let fits = (b as u128)
            .checked_mul(b as u128)
            .and_then(|sq| sq.checked_mul(max_abs))
            .and_then(|v| v.checked_mul(n as u128))
            .is_some_and(|v| v < 1u128 << 125);
        if !fits {
            return BoxOutcome::Unsupported;
        }
        let work = match box_points(b, n - 1) {
            Some(w) if spent.saturating_add(w) <= budget => w,
            _ => return BoxOutcome::OutOfBudget(b / 2),
        };
        spent += work;
        let found = search_box(&small, b as i64, exec);
        if let Some(v) = found {
            return BoxOutcome::Found(v);
        }
        if stop_at.is_some_and(|s| b >= s) {
            return BoxOutcome::OutOfBudget(b);
        }
        b *= 2;
    }
}

fn search_box(coeffs: &[i128], b: i64, exec: Execution) -> Option<Vec<i64>> {
    let slices: Vec<i64> = (0..=b).collect();
    crate::par::map_ordered(exec, &slices, |&x0| best_in_slice(coeffs, b, x0))
        .into_iter()
        .fold(None, better)
}
