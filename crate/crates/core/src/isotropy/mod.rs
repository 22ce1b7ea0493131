//! Isotropy of diagonal forms over ℚ: the exact decision, witness search,
//! removal of zero entries from a witness, and solving `Σ aᵢxᵢ² = c`.

mod decide;
mod descent;
mod normalize;
mod search;
mod split;

pub use decide::is_isotropic;
pub use descent::solve_legendre;
pub use normalize::{normalize_ternary, NormalizedTernary};
pub use search::{deepening_search, BoxOutcome};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{primitive_integer, rational_sqrt, squarefree_part, Int, MathError, Rat};
use crate::par::Execution;
use crate::pell::solve_pell;

pub const DEFAULT_SEARCH_LIMIT: u64 = 1_000_000;
pub const SEARCH_LIMIT_ENV: &str = "QUADLOOP_SEARCH_LIMIT";
const DEFAULT_BUDGET: u64 = 4_000_000;
const INNER_TERNARY_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsotropyError {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("form is anisotropic; no isotropic vector exists")]
    NotIsotropic,
    #[error("search limit exceeded (max-norm {limit})")]
    LimitExceeded { limit: u64 },
}

/// Bounds for witness search. `limit` caps the max-norm of searched boxes;
/// `budget` caps the points visited by a direct search before switching to a
/// structured method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub limit: u64,
    pub budget: u64,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            limit: DEFAULT_SEARCH_LIMIT,
            budget: DEFAULT_BUDGET,
            exec: Execution::default(),
        }
    }
}

impl SearchConfig {
    /// Default configuration with the limit taken from `QUADLOOP_SEARCH_LIMIT`
    /// when it holds a positive integer.
    pub fn from_env() -> Self {
        let limit = std::env::var(SEARCH_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&l| l > 0)
            .unwrap_or(DEFAULT_SEARCH_LIMIT);
        SearchConfig {
            limit,
            ..Self::default()
        }
    }

    pub fn with_exec(self, exec: Execution) -> Self {
        SearchConfig { exec, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyResult {
    pub isotropic: bool,
    pub witness: Option<Vec<Int>>,
}

pub fn decide(coeffs: &[Int], cfg: &SearchConfig) -> Result<IsotropyResult, IsotropyError> {
    if !is_isotropic(coeffs)? {
        return Ok(IsotropyResult {
            isotropic: false,
            witness: None,
        });
    }
    Ok(IsotropyResult {
        isotropic: true,
        witness: Some(find_isotropic(coeffs, cfg)?),
    })
}

fn canonical(v: &[Int]) -> Vec<Int> {
    let rats: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.abs())).collect();
    primitive_integer(&rats)
}

/// Nonzero primitive integer `v` with nonnegative entries and `Σ aᵢvᵢ² = 0`.
///
/// Small zeros are found by direct deepening and are then minimal in max-norm
/// (ties broken lexicographically). When the point budget runs out first,
/// ternaries fall back to descent and larger forms to splitting off a binary
/// head. Reaching the max-norm limit before the budget is an error.
pub fn find_isotropic(coeffs: &[Int], cfg: &SearchConfig) -> Result<Vec<Int>, IsotropyError> {
    if !is_isotropic(coeffs)? {
        return Err(IsotropyError::NotIsotropic);
    }
    let witness = match coeffs.len() {
        2 => {
            let ratio = Rat::new(-&coeffs[1], coeffs[0].clone());
            let root = rational_sqrt(&ratio).expect("decided isotropic");
            vec![root.numer().clone(), root.denom().clone()]
        }
        3 => find_ternary(coeffs, cfg.budget, cfg.limit, cfg.exec)?,
        _ => find_higher(coeffs, cfg)?,
    };
    debug_assert!(form_value(coeffs, &witness).is_zero());
    Ok(canonical(&witness))
}

fn form_value(coeffs: &[Int], v: &[Int]) -> Int {
    coeffs.iter().zip(v).map(|(a, x)| a * x * x).sum()
}

fn widen(v: Vec<i64>) -> Vec<Int> {
    v.into_iter().map(Int::from).collect()
}

fn find_ternary(coeffs: &[Int], budget: u64, limit: u64, exec: Execution) -> Result<Vec<Int>, IsotropyError> {
    let norm = normalize_ternary(&coeffs[0], &coeffs[1], &coeffs[2])?;
    let stop_at = norm.original_bound();
    match deepening_search(coeffs, budget, limit, stop_at, exec) {
        BoxOutcome::Found(v) => return Ok(widen(v)),
        BoxOutcome::LimitReached(_) => return Err(IsotropyError::LimitExceeded { limit }),
        BoxOutcome::OutOfBudget(_) | BoxOutcome::Unsupported => {}
    }
    // a x² + b y² + c z² = 0  ⇔  (a x)² = (−ab) y² + (−ac) z²
    let [a, b, c] = &norm.coeffs;
    let [x, y, z] = solve_legendre(&-(a * b), &-(a * c))?.ok_or(IsotropyError::NotIsotropic)?;
    Ok(norm.back_map(&[x, a * y, a * z]))
}

fn find_higher(coeffs: &[Int], cfg: &SearchConfig) -> Result<Vec<Int>, IsotropyError> {
    match deepening_search(coeffs, cfg.budget, cfg.limit, None, cfg.exec) {
        BoxOutcome::Found(v) => Ok(widen(v)),
        BoxOutcome::LimitReached(_) => Err(IsotropyError::LimitExceeded { limit: cfg.limit }),
        BoxOutcome::OutOfBudget(_) | BoxOutcome::Unsupported => split::split_zero(coeffs),
    }
}

/// Rewrites an isotropic vector so that no entry is zero: each zero entry `j`
/// is filled from a nonzero neighbour `i` through a rational point `(α, β)` of
/// `x² + (a_j/a_i)·y² = 1`, replacing `(vᵢ, 0)` by `(α·vᵢ, β·vᵢ)`.
pub fn eliminate_zeros(coeffs: &[Int], v: &[Rat]) -> Result<Vec<Rat>, IsotropyError> {
    if coeffs.len() != v.len() {
        return Err(MathError::DimensionMismatch(format!(
            "{} coefficients, vector of length {}",
            coeffs.len(),
            v.len()
        ))
        .into());
    }
    if coeffs.iter().any(Zero::is_zero) {
        return Err(MathError::Domain("diagonal coefficients must be nonzero").into());
    }
    if v.iter().all(Zero::is_zero) {
        return Err(MathError::Domain("zero vector").into());
    }
    let mut w = v.to_vec();
    for j in 0..w.len() {
        if !w[j].is_zero() {
            continue;
        }
        let i = (0..j)
            .rev()
            .find(|&i| !w[i].is_zero())
            .or_else(|| (j + 1..w.len()).find(|&i| !w[i].is_zero()))
            .expect("vector is nonzero");
        let sol = solve_pell(
            &Rat::from_integer(coeffs[i].clone()),
            &Rat::from_integer(coeffs[j].clone()),
        )?;
        w[j] = &sol.beta * &w[i];
        w[i] = &sol.alpha * &w[i];
    }
    Ok(w)
}

/// A coefficient `n/d` rewritten as `s·r²/d²` with `s` the square-free part
/// of `n·d`: then `(n/d)·x² = s·(r·x/d)²`.
struct ScaledCoeff {
    squarefree: Int,
    /// `x = factor · X` where `X` is the variable of the square-free form.
    factor: Rat,
}

fn scale_coeff(q: &Rat) -> Result<ScaledCoeff, MathError> {
    let (s, r) = squarefree_part(&(q.numer() * q.denom()))?;
    Ok(ScaledCoeff {
        squarefree: s,
        factor: Rat::new(q.denom().clone(), r),
    })
}

/// A solution of `Σ aᵢxᵢ² = c` with every entry nonzero, or `None` when no
/// nonzero rational solution exists. All `aᵢ` must be nonzero.
pub fn solve(a: &[Rat], c: &Rat, cfg: &SearchConfig) -> Result<Option<Vec<Rat>>, IsotropyError> {
    if a.is_empty() || a.iter().any(Zero::is_zero) {
        return Err(MathError::Domain("coefficients must be nonzero").into());
    }
    let mut scaled: Vec<ScaledCoeff> = a.iter().map(scale_coeff).collect::<Result<_, _>>()?;
    let homogeneous = c.is_zero();
    if !homogeneous {
        scaled.push(scale_coeff(&-c)?);
    }
    let coeffs: Vec<Int> = scaled.iter().map(|s| s.squarefree.clone()).collect();
    let all_pos = coeffs.iter().all(Signed::is_positive);
    let all_neg = coeffs.iter().all(Signed::is_negative);
    if all_pos || all_neg || !is_isotropic(&coeffs)? {
        return Ok(None);
    }
    let witness: Vec<Rat> = find_isotropic(&coeffs, cfg)?
        .into_iter()
        .map(Rat::from_integer)
        .collect();
    let w = eliminate_zeros(&coeffs, &witness)?;
    let x: Vec<Rat> = w.iter().zip(&scaled).map(|(wi, s)| wi * &s.factor).collect();
    if homogeneous {
        return Ok(Some(x));
    }
    let (last, head) = x.split_last().expect("nonempty");
    Ok(Some(head.iter().map(|xi| xi / last).collect()))
}

/// `Σ aᵢxᵢ²` for rational coefficients and point.
pub fn diagonal_value(a: &[Rat], x: &[Rat]) -> Rat {
    a.iter().zip(x).map(|(ai, xi)| ai * xi * xi).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, rat_int};

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn witnesses() {
        let cfg = SearchConfig::default();
        assert_eq!(find_isotropic(&ints(&[1, 1, -25]), &cfg).unwrap(), ints(&[3, 4, 1]));
        assert_eq!(find_isotropic(&ints(&[1, -1]), &cfg).unwrap(), ints(&[1, 1]));
        assert_eq!(find_isotropic(&ints(&[1, -4]), &cfg).unwrap(), ints(&[2, 1]));
        let w = find_isotropic(&ints(&[1, 1, -1, -1]), &cfg).unwrap();
        assert_eq!(form_value(&ints(&[1, 1, -1, -1]), &w), int(0));
    }

    #[test]
    fn anisotropic_is_a_contract_error() {
        let cfg = SearchConfig::default();
        assert_eq!(
            find_isotropic(&ints(&[1, 1, -3]), &cfg),
            Err(IsotropyError::NotIsotropic)
        );
    }

    #[test]
    fn descent_path_for_large_ternary() {
        let cfg = SearchConfig {
            budget: 10,
            ..SearchConfig::default()
        };
        let f = ints(&[9, -27, -216513]);
        let w = find_isotropic(&f, &cfg).unwrap();
        assert_eq!(form_value(&f, &w), int(0));
        assert!(w.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn tail_path_for_quinary() {
        let cfg = SearchConfig {
            budget: 10,
            ..SearchConfig::default()
        };
        let f = ints(&[7, 11, 13, -17, -19]);
        let w = find_isotropic(&f, &cfg).unwrap();
        assert_eq!(form_value(&f, &w), int(0));
    }

    #[test]
    fn eliminate_zero_entries() {
        let f = ints(&[1, -1, -2]);
        let w = eliminate_zeros(&f, &rats(&[1, 1, 0])).unwrap();
        assert!(w.iter().all(|x| !x.is_zero()));
        assert!(diagonal_value(&rats(&[1, -1, -2]), &w).is_zero());

        let f = ints(&[1, 1, -1, -1]);
        let w = eliminate_zeros(&f, &rats(&[1, 0, 1, 0])).unwrap();
        assert!(w.iter().all(|x| !x.is_zero()));
        assert!(diagonal_value(&rats(&[1, 1, -1, -1]), &w).is_zero());

        let v = rats(&[1, 1, 1]);
        assert_eq!(eliminate_zeros(&ints(&[1, 1, -2]), &v).unwrap(), v);
    }

    #[test]
    fn solve_examples() {
        let cfg = SearchConfig::default();
        let s = solve(&rats(&[1, 1]), &rat_int(25), &cfg).unwrap().unwrap();
        assert_eq!(diagonal_value(&rats(&[1, 1]), &s), rat_int(25));
        assert!(s.iter().all(|x| !x.is_zero()));
        assert_eq!(solve(&rats(&[1, 1]), &rat_int(3), &cfg).unwrap(), None);
        assert_eq!(solve(&rats(&[1, 1]), &rat_int(-1), &cfg).unwrap(), None);
        let s = solve(&rats(&[9, -27]), &rat_int(216513), &cfg).unwrap().unwrap();
        assert_eq!(diagonal_value(&rats(&[9, -27]), &s), rat_int(216513));
        assert!(s.iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn solve_with_rational_coefficients() {
        let cfg = SearchConfig::default();
        let a = vec![rat(1, 2), rat(-3, 4), rat(5, 9)];
        let c = rat(11, 36);
        let s = solve(&a, &c, &cfg).unwrap().unwrap();
        assert_eq!(diagonal_value(&a, &s), c);
        assert!(s.iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn solve_homogeneous() {
        let cfg = SearchConfig::default();
        let s = solve(&rats(&[1, -1]), &rat_int(0), &cfg).unwrap().unwrap();
        assert!(diagonal_value(&rats(&[1, -1]), &s).is_zero());
        assert!(s.iter().all(|x| !x.is_zero()));
        assert_eq!(solve(&rats(&[1, 1]), &rat_int(0), &cfg).unwrap(), None);
        assert_eq!(solve(&rats(&[1]), &rat_int(0), &cfg).unwrap(), None);
    }
}
