//! Quadratic and linear forms over ℚ, congruence diagonalization and the
//! kernel splitting used for degenerate forms.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{MathError, Matrix, Rat, Vector};

/// A `d`-ary quadratic form `Q(x) = xᵀ A x` with `A` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: Matrix,
}

impl QuadraticForm {
    pub fn new(matrix: Matrix) -> Result<Self, MathError> {
        if !matrix.is_square() || !matrix.is_symmetric() {
            return Err(MathError::Domain("quadratic form matrix must be symmetric"));
        }
        Ok(QuadraticForm { matrix })
    }

    pub fn diagonal(entries: &[Rat]) -> Self {
        QuadraticForm {
            matrix: Matrix::diagonal(entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn value(&self, x: &Vector) -> Rat {
        self.matrix.quadratic_value(x)
    }

    pub fn determinant(&self) -> Rat {
        self.matrix.determinant().expect("square by construction")
    }

    pub fn is_degenerate(&self) -> bool {
        self.determinant().is_zero()
    }

    /// The form `Q(P x)`, i.e. matrix `Pᵀ A P`.
    pub fn transform(&self, p: &Matrix) -> QuadraticForm {
        QuadraticForm {
            matrix: &(&p.transpose() * &self.matrix) * p,
        }
    }
}

/// `L(x) = bᵀ x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vector,
}

impl LinearForm {
    pub fn new(coeffs: Vector) -> Self {
        LinearForm { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        LinearForm {
            coeffs: Vector::zeros(dim),
        }
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn value(&self, x: &Vector) -> Rat {
        self.coeffs.dot(x)
    }
}

/// The invariant `Q(x) + L(x) = c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticEquation {
    pub form: QuadraticForm,
    pub linear: LinearForm,
    pub constant: Rat,
}

impl QuadraticEquation {
    pub fn new(form: QuadraticForm, linear: LinearForm, constant: Rat) -> Result<Self, MathError> {
        if form.dim() != linear.dim() {
            return Err(MathError::DimensionMismatch(format!(
                "quadratic part has {} variables, linear part {}",
                form.dim(),
                linear.dim()
            )));
        }
        Ok(QuadraticEquation { form, linear, constant })
    }

    pub fn homogeneous(form: QuadraticForm, constant: Rat) -> Self {
        let d = form.dim();
        QuadraticEquation {
            form,
            linear: LinearForm::zero(d),
            constant,
        }
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// `Q(x) + L(x) - c`, zero exactly when `x` satisfies the equation.
    pub fn evaluate(&self, x: &Vector) -> Result<Rat, MathError> {
        if x.dim() != self.dim() {
            return Err(MathError::DimensionMismatch(format!(
                "point of dimension {} for equation in {} variables",
                x.dim(),
                self.dim()
            )));
        }
        Ok(self.form.value(x) + self.linear.value(x) - &self.constant)
    }

    pub fn is_satisfied_by(&self, x: &Vector) -> bool {
        matches!(self.evaluate(x), Ok(v) if v.is_zero())
    }
}

/// `σᵀ A σ = diag(entries)` with `σ` invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub diag: Vec<Rat>,
    pub sigma: Matrix,
    pub sigma_inverse: Matrix,
}

impl Diagonalization {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|a| !a.is_zero()).count()
    }
}

/// Symmetric Gaussian elimination: every row operation is mirrored by the
/// same column operation, and the column operations accumulate into `σ`.
pub fn diagonalize(q: &QuadraticForm) -> Diagonalization {
    let n = q.dim();
    let mut a = q.matrix().clone();
    let mut sigma = Matrix::identity(n);

    for i in 0..n {
        if a[(i, i)].is_zero() {
            let Some(j) = (i + 1..n).find(|&j| !a[(i, j)].is_zero()) else {
                continue;
            };
            // Adding x_j into x_i gives pivot a_ii + 2a_ij + a_jj = 2a_ij + a_jj.
            let repaired = &a[(i, j)] * Rat::from_integer(2.into()) + &a[(j, j)];
            if repaired.is_zero() {
                // then a_jj = -2a_ij ≠ 0
                a.swap_rows(i, j);
                a.swap_cols(i, j);
                sigma.swap_cols(i, j);
            } else {
                let one = Rat::one();
                a.add_row_multiple(i, j, &one);
                a.add_col_multiple(i, j, &one);
                sigma.add_col_multiple(i, j, &one);
            }
        }
        let pivot = a[(i, i)].clone();
        for j in i + 1..n {
            if a[(i, j)].is_zero() {
                continue;
            }
            let f = -(&a[(i, j)] / &pivot);
            a.add_row_multiple(j, i, &f);
            a.add_col_multiple(j, i, &f);
            sigma.add_col_multiple(j, i, &f);
        }
    }
    debug_assert!(a.is_diagonal());
    let sigma_inverse = sigma.inverse().expect("product of elementary matrices");
    Diagonalization {
        diag: a.diagonal_entries(),
        sigma,
        sigma_inverse,
    }
}

/// Rank of `A_Q` and a basis of its kernel (primitive integer vectors).
pub fn rank_and_kernel(q: &QuadraticForm) -> (usize, Vec<Vector>) {
    let kernel = q.matrix().kernel_basis();
    (q.dim() - kernel.len(), kernel)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    PositiveSemiDefinite,
    NegativeSemiDefinite,
    Indefinite,
    Zero,
}

impl Definiteness {
    pub fn is_definite(self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::NegativeDefinite)
    }

    pub fn is_semi_definite(self) -> bool {
        matches!(
            self,
            Definiteness::PositiveSemiDefinite | Definiteness::NegativeSemiDefinite
        )
    }
}

impl std::fmt::Display for Definiteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Definiteness::PositiveDefinite => "positive-definite",
            Definiteness::NegativeDefinite => "negative-definite",
            Definiteness::PositiveSemiDefinite => "positive-semi-definite",
            Definiteness::NegativeSemiDefinite => "negative-semi-definite",
            Definiteness::Indefinite => "indefinite",
            Definiteness::Zero => "zero",
        };
        f.write_str(s)
    }
}

/// Sylvester classification from the diagonal of an equivalent diagonal form.
pub fn definiteness(diag: &[Rat]) -> Definiteness {
    let pos = diag.iter().any(Signed::is_positive);
    let neg = diag.iter().any(Signed::is_negative);
    let zero = diag.iter().any(Zero::is_zero);
    match (pos, neg, zero) {
        (true, true, _) => Definiteness::Indefinite,
        (true, false, false) => Definiteness::PositiveDefinite,
        (false, true, false) => Definiteness::NegativeDefinite,
        (true, false, true) => Definiteness::PositiveSemiDefinite,
        (false, true, true) => Definiteness::NegativeSemiDefinite,
        (false, false, _) => Definiteness::Zero,
    }
}

/// Invertible `τ` whose first columns are the given independent vectors, the
/// rest taken greedily from the standard basis.
pub fn complete_to_basis(vectors: &[Vector], dim: usize) -> Matrix {
    let mut columns: Vec<Vector> = vectors.to_vec();
    for j in 0..dim {
        if columns.len() == dim {
            break;
        }
        let mut candidate = columns.clone();
        candidate.push(Vector::unit(dim, j));
        if Matrix::from_columns(&candidate).rank() == candidate.len() {
            columns = candidate;
        }
    }
    assert_eq!(columns.len(), dim, "kernel vectors must be independent");
    Matrix::from_columns(&columns)
}

/// The change of basis `τ` for a degenerate form: kernel vectors first, so that
/// every nonzero entry of `τᵀ A τ` lies in the bottom-right `r × r` block.
pub fn kernel_adapted_basis(q: &QuadraticForm) -> (Matrix, usize) {
    let (rank, kernel) = rank_and_kernel(q);
    (complete_to_basis(&kernel, q.dim()), rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn form(rows: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::new(Matrix::from_int_rows(rows)).unwrap()
    }

    fn check_diag(q: &QuadraticForm) -> Diagonalization {
        let d = diagonalize(q);
        let conj = &(&d.sigma.transpose() * q.matrix()) * &d.sigma;
        assert_eq!(conj, Matrix::diagonal(&d.diag));
        assert_eq!(&d.sigma * &d.sigma_inverse, Matrix::identity(q.dim()));
        d
    }

    #[test]
    fn already_diagonal() {
        let d = check_diag(&form(&[&[1, 0], &[0, 1]]));
        assert_eq!(d.diag, vec![rat_int(1), rat_int(1)]);
        assert_eq!(d.sigma, Matrix::identity(2));
    }

    #[test]
    fn hyperbolic_plane_gets_mixed_signs() {
        let q = QuadraticForm::new(
            Matrix::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]]).unwrap(),
        )
        .unwrap();
        let d = check_diag(&q);
        assert_eq!(definiteness(&d.diag), Definiteness::Indefinite);
        assert_eq!(d.diag, vec![rat_int(1), rat(-1, 4)]);
    }

    #[test]
    fn zero_pivot_repair_by_swap() {
        // a_00 = 0, a_01 = 1, a_11 = -2: adding would give pivot 0.
        let d = check_diag(&form(&[&[0, 1], &[1, -2]]));
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn degenerate_ternary_form() {
        let q = form(&[&[-11, 1, -6], &[1, 1, 0], &[-6, 0, -3]]);
        let d = check_diag(&q);
        assert_eq!(d.rank(), 2);
        assert_eq!(d.diag.iter().filter(|a| a.is_zero()).count(), 1);
        let tau = Matrix::from_int_rows(&[&[-1, 0, 0], &[1, 3, 0], &[2, 0, 3]]);
        let conj = &(&tau.transpose() * q.matrix()) * &tau;
        assert_eq!(conj, Matrix::diagonal(&[rat_int(0), rat_int(9), rat_int(-27)]));
        let (r, kernel) = rank_and_kernel(&q);
        assert_eq!(r, 2);
        assert_eq!(kernel, vec![Vector::from_ints(&[-1, 1, 2])]);
    }

    #[test]
    fn rank_and_kernel_examples() {
        let (r, k) = rank_and_kernel(&form(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_and_kernel(&form(&[&[0, 0, 0], &[0, 9, 0], &[0, 0, -27]]));
        assert_eq!(r, 2);
        assert_eq!(k, vec![Vector::from_ints(&[1, 0, 0])]);
    }

    #[test]
    fn definiteness_examples() {
        assert_eq!(definiteness(&[rat_int(1), rat_int(1)]), Definiteness::PositiveDefinite);
        assert_eq!(definiteness(&[rat_int(1), rat_int(-1)]), Definiteness::Indefinite);
        let mixed = definiteness(&[rat_int(0), rat_int(9), rat_int(-27)]);
        assert_eq!(mixed, Definiteness::Indefinite);
        assert!(!mixed.is_semi_definite());
        assert_eq!(
            definiteness(&[rat_int(0), rat_int(2)]),
            Definiteness::PositiveSemiDefinite
        );
        assert_eq!(definiteness(&[rat_int(-3)]), Definiteness::NegativeDefinite);
    }

    #[test]
    fn completion_with_empty_kernel_is_identity() {
        assert_eq!(complete_to_basis(&[], 2), Matrix::identity(2));
    }

    #[test]
    fn kernel_basis_puts_form_in_bottom_right_block() {
        let q = form(&[&[1, 2, 3], &[2, 4, 6], &[3, 6, 9]]);
        let (tau, r) = kernel_adapted_basis(&q);
        assert_eq!(r, 1);
        let conj = &(&tau.transpose() * q.matrix()) * &tau;
        for i in 0..3 {
            for j in 0..3 {
                if i < 2 || j < 2 {
                    assert!(conj[(i, j)].is_zero());
                }
            }
        }
        assert!(!conj[(2, 2)].is_zero());
    }

    #[test]
    fn evaluate_requires_matching_dimension() {
        let eq = QuadraticEquation::homogeneous(form(&[&[1, 0], &[0, 1]]), rat_int(0));
        assert_eq!(eq.evaluate(&Vector::zeros(2)).unwrap(), rat_int(0));
        assert!(eq.evaluate(&Vector::zeros(3)).is_err());
    }
}
