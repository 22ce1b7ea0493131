//! Rational points on `x² + (b/a)·y² = 1` and the form-preserving rotation they
//! induce on `a·x² + b·y²`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{rat, MathError, Matrix, Rat};

/// A point `(α, β)` on `x² + (b/a)·y² = 1` with `β ≠ 0` and `α` outside the
/// Niven set `{0, ±1/2, ±1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub alpha: Rat,
    pub beta: Rat,
    pub a: Rat,
    pub b: Rat,
}

/// `[[α, −(b/a)β], [β, α]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationMatrix(pub Matrix);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NivenCertificate {
    #[serde(with = "crate::exact::text::rat")]
    pub half_trace: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NivenError {
    #[error("half-trace {0} is a cosine of a rational multiple of pi")]
    RootOfUnity(Rat),
    #[error("determinant {0} is not 1")]
    NotUnimodular(Rat),
    #[error("matrix is not 2x2")]
    Shape,
}

/// `true` when `q ∈ {0, ±1/2, ±1}`.
pub fn is_niven_value(q: &Rat) -> bool {
    let two = Rat::from_integer(2.into());
    let doubled = q * &two;
    doubled.is_integer() && doubled.numer().magnitude() <= &2u32.into()
}

pub fn solve_pell(a: &Rat, b: &Rat) -> Result<PellSolution, MathError> {
    if a.is_zero() || b.is_zero() {
        return Err(MathError::Domain("Pell coefficients must be nonzero"));
    }
    let ratio = b / a;
    let (alpha, beta) = if ratio == -Rat::one() {
        (rat(5, 3), rat(4, 3))
    } else {
        let generic_alpha = (b - a) / (a + b);
        let generic_beta = (a + a) / (a + b);
        if !is_niven_value(&generic_alpha) {
            (generic_alpha, generic_beta)
        } else if ratio == Rat::one() {
            (rat(3, 5), rat(4, 5))
        } else if ratio == rat(3, 1) {
            (rat(-11, 13), rat(4, 13))
        } else if ratio == rat(1, 3) {
            (rat(1, 7), rat(12, 7))
        } else {
            unreachable!("generic point hits the Niven set only for b/a ∈ {{1, 3, 1/3}}")
        }
    };
    debug_assert_eq!(&alpha * &alpha + &ratio * &beta * &beta, Rat::one());
    Ok(PellSolution {
        alpha,
        beta,
        a: a.clone(),
        b: b.clone(),
    })
}

pub fn rotation_matrix(sol: &PellSolution) -> RotationMatrix {
    let ratio = &sol.b / &sol.a;
    let off = -(&ratio * &sol.beta);
    RotationMatrix(
        Matrix::from_rows(vec![
            vec![sol.alpha.clone(), off],
            vec![sol.beta.clone(), sol.alpha.clone()],
        ])
        .expect("2x2"),
    )
}

/// A unimodular 2×2 rational matrix whose half-trace avoids the Niven set has
/// no root-of-unity eigenvalue, so every nonzero orbit under it is infinite.
pub fn niven_check(r: &Matrix) -> Result<NivenCertificate, NivenError> {
    if r.rows() != 2 || r.cols() != 2 {
        return Err(NivenError::Shape);
    }
    let det = r.determinant().map_err(|_| NivenError::Shape)?;
    if !det.is_one() {
        return Err(NivenError::NotUnimodular(det));
    }
    let half_trace = r.trace() / Rat::from_integer(2.into());
    if is_niven_value(&half_trace) {
        return Err(NivenError::RootOfUnity(half_trace));
    }
    Ok(NivenCertificate { half_trace })
}
