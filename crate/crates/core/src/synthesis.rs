//! Loop synthesis for `Q(x) = c` (linear loops) and `Q(x) + L(x) = c`
//! (affine loops, or linear loops in one extra variable).

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{rat, MathError, Matrix, Rat, Vector};
use crate::isotropy::{solve, IsotropyError, SearchConfig};
use crate::loops::{
    check_certificate, replay, verify_invariant, AffineLoop, Certificate, LinearLoop, Loop, SynthesizedLoop, TraceStep,
};
use crate::par::{map_ordered, Execution};
use crate::pell::{rotation_matrix, solve_pell};
use crate::qform::{complete_to_basis, diagonalize, rank_and_kernel, QuadraticEquation, QuadraticForm};

/// Iterations re-checked in-process before a synthesized loop is returned.
const SELF_CHECK_ITERATIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoLoopReason {
    /// A single variable only admits finitely many solutions.
    DimensionOne,
    /// The equation has no rational solution usable as a start.
    NoRationalSolution,
}

impl std::fmt::Display for NoLoopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoLoopReason::DimensionOne => f.write_str("dimension 1"),
            NoLoopReason::NoRationalSolution => f.write_str("the equation has no suitable rational solution"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("no loop ({0})")]
    NoLoop(NoLoopReason),
    #[error("search limit exceeded (max-norm {limit})")]
    LimitExceeded { limit: u64 },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<IsotropyError> for SynthesisError {
    fn from(e: IsotropyError) -> Self {
        match e {
            IsotropyError::LimitExceeded { limit } => SynthesisError::LimitExceeded { limit },
            other => SynthesisError::Internal(other.to_string()),
        }
    }
}

impl From<MathError> for SynthesisError {
    fn from(e: MathError) -> Self {
        SynthesisError::Internal(e.to_string())
    }
}

fn internal(msg: impl Into<String>) -> SynthesisError {
    SynthesisError::Internal(msg.into())
}

fn two() -> Rat {
    Rat::from_integer(2.into())
}

/// A linear loop with invariant `Q(x) = c`.
pub fn lin_loop(q: &QuadraticForm, c: &Rat, cfg: &SearchConfig) -> Result<SynthesizedLoop, SynthesisError> {
    let d = q.dim();
    if d < 2 {
        return Err(SynthesisError::NoLoop(NoLoopReason::DimensionOne));
    }
    let diag = diagonalize(q);
    let a = &diag.diag;
    let nz: Vec<usize> = (0..d).filter(|&i| !a[i].is_zero()).collect();
    let zeros: Vec<usize> = (0..d).filter(|&i| a[i].is_zero()).collect();
    let mut trace = vec![TraceStep::Diagonalize {
        diag: Vector::new(a.clone()),
        sigma: diag.sigma.clone(),
    }];

    let scale_zeros = |on_nz: Rat| {
        let mut m = Matrix::identity(d);
        for &i in &zeros {
            m[(i, i)] = two();
        }
        for &i in &nz {
            m[(i, i)] = on_nz.clone();
        }
        m
    };
    let (case, update, init, cert) = if nz.is_empty() {
        if !c.is_zero() {
            return Err(SynthesisError::NoLoop(NoLoopReason::NoRationalSolution));
        }
        let init: Vector = (0..d).map(|_| Rat::one()).collect();
        (
            "zero-form",
            scale_zeros(Rat::one()),
            init,
            Certificate::ScalingBlock { index: 0 },
        )
    } else {
        let coeffs: Vec<Rat> = nz.iter().map(|&i| a[i].clone()).collect();
        let sol = solve(&coeffs, c, cfg)?;
        let mut init = Vector::zeros(d);
        for &i in &zeros {
            init[i] = Rat::one();
        }
        match sol {
            None if !zeros.is_empty() && c.is_zero() => {
                // only the zero solution on the nondegenerate part
                let cert = Certificate::ScalingBlock { index: zeros[0] };
                ("kernel-scaling", scale_zeros(Rat::one()), init, cert)
            }
            None => return Err(SynthesisError::NoLoop(NoLoopReason::NoRationalSolution)),
            Some(sol) => {
                for (k, &i) in nz.iter().enumerate() {
                    init[i] = sol[k].clone();
                }
                if nz.len() == 1 {
                    let cert = Certificate::ScalingBlock { index: zeros[0] };
                    ("rank-one-scaling", scale_zeros(Rat::one()), init, cert)
                } else {
                    let (i1, i2) = (nz[0], nz[1]);
                    let pell = solve_pell(&a[i1], &a[i2])?;
                    let r = rotation_matrix(&pell).0;
                    let mut m = Matrix::identity(d);
                    m[(i1, i1)] = r[(0, 0)].clone();
                    m[(i1, i2)] = r[(0, 1)].clone();
                    m[(i2, i1)] = r[(1, 0)].clone();
                    m[(i2, i2)] = r[(1, 1)].clone();
                    let cert = Certificate::NivenRotationBlock {
                        rows: [i1, i2],
                        alpha: pell.alpha,
                    };
                    ("rotation", m, init, cert)
                }
            }
        }
    };
    let core = Loop::Linear(LinearLoop { update, init });
    check_certificate(&cert, &core).map_err(|e| internal(e.to_string()))?;
    trace.push(TraceStep::Case { id: case.into() });
    trace.push(TraceStep::core(&core));
    trace.push(TraceStep::Conjugate {
        basis: diag.sigma.clone(),
    });
    let body = core.conjugate(&diag.sigma).map_err(|e| internal(e.to_string()))?;
    Ok(SynthesizedLoop {
        body,
        certificate: cert,
        trace,
    })
}

/// `Q(2δ·x + h) = c̃` is equivalent to `Q(x) + L(x) = c` when `δ = det A_Q ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineReduction {
    pub delta: Rat,
    pub h: Vector,
    pub c_tilde: Rat,
}

impl AffineReduction {
    fn note(&self) -> TraceStep {
        TraceStep::Reduction {
            delta: self.delta.clone(),
            h: self.h.clone(),
            c_tilde: self.c_tilde.clone(),
        }
    }
}

pub fn affine_reduce(eq: &QuadraticEquation) -> Result<AffineReduction, SynthesisError> {
    reduce_parts(&eq.form, eq.linear.coeffs(), &eq.constant)
}

fn reduce_parts(q: &QuadraticForm, b: &Vector, c: &Rat) -> Result<AffineReduction, SynthesisError> {
    let delta = q.determinant();
    if delta.is_zero() {
        return Err(internal("affine reduction of a degenerate form"));
    }
    let adj = q.matrix().adjugate()?;
    let h = &adj * b;
    let c_tilde = &delta * &delta * Rat::from_integer(4.into()) * c + q.value(&h);
    Ok(AffineReduction { delta, h, c_tilde })
}

/// `⟨M, (s − h)/(2δ), (M − I)·h/(2δ)⟩` from a loop `⟨M, s⟩` for `Q(x) = c̃`.
pub fn affine_from_linear(red: &AffineReduction, lin: &LinearLoop) -> AffineLoop {
    match Loop::Linear(lin.clone()).affine_shift(&red.delta, &red.h) {
        Loop::Affine(a) => a,
        Loop::Linear(_) => unreachable!("affine shift yields an affine loop"),
    }
}

/// Coordinates `x = τ·(u, y)` with `u` spanning the kernel of `A_Q`: then
/// `Q(τ·(u, y)) = Q̃(y)` and `L(τ·(u, y)) = L̃(y) + λ·u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateSplit {
    pub tau: Matrix,
    pub rank: usize,
    pub kernel_dim: usize,
    pub reduced_form: QuadraticForm,
    pub reduced_linear: Vector,
    pub lambda: Vector,
}

impl DegenerateSplit {
    fn note(&self) -> TraceStep {
        TraceStep::Split {
            tau: self.tau.clone(),
            rank: self.rank,
            lambda: self.lambda.clone(),
        }
    }
}

fn split_with_kernel(eq: &QuadraticEquation, kernel: &[Vector]) -> DegenerateSplit {
    let d = eq.dim();
    let k = kernel.len();
    let r = d - k;
    let tau = complete_to_basis(kernel, d);
    let conj = &(&tau.transpose() * eq.form.matrix()) * &tau;
    let reduced_form = QuadraticForm::new(conj.block(k, k, r, r)).expect("congruent block is symmetric");
    let b = &tau.transpose() * eq.linear.coeffs();
    DegenerateSplit {
        tau,
        rank: r,
        kernel_dim: k,
        reduced_form,
        reduced_linear: b.slice(k, d),
        lambda: b.slice(0, k),
    }
}

/// Splits off the kernel. When some `λᵢ ≠ 0`, the kernel basis is arranged so
/// that every `λᵢ` is nonzero: a kernel vector with nonzero `λ` goes first and
/// is added to each kernel vector with `λᵢ = 0`.
pub fn degenerate_split(eq: &QuadraticEquation) -> DegenerateSplit {
    let (_, mut kernel) = rank_and_kernel(&eq.form);
    let lambda_of = |v: &Vector| eq.linear.value(v);
    if let Some(first) = kernel.iter().position(|v| !lambda_of(v).is_zero()) {
        kernel.swap(0, first);
        for i in 1..kernel.len() {
            if lambda_of(&kernel[i]).is_zero() {
                kernel[i] = &kernel[i] + &kernel[0];
            }
        }
    }
    split_with_kernel(eq, &kernel)
}

/// Candidate values for the non-kernel coordinates in the degenerate case.
fn alpha_candidates(r: usize) -> Vec<Vector> {
    if r == 0 {
        return vec![Vector::zeros(0)];
    }
    let unit = |j: usize, q: Rat| {
        let mut v = Vector::zeros(r);
        v[j] = q;
        v
    };
    let mut out = vec![unit(0, Rat::one()), unit(0, rat(1, 3))];
    if r >= 2 {
        let mut v = unit(0, Rat::one());
        v[1] = Rat::one();
        out.push(v);
    }
    for t in 2..=8i64 {
        for j in 0..r {
            out.push(unit(j, Rat::from_integer(t.into())));
        }
        for j in 1..r {
            out.push(unit(j, Rat::one()));
        }
    }
    out
}

/// An affine loop (or a linear loop in the same variables) with invariant
/// `Q(x) + L(x) = c`; `None`-style failures are reported as errors.
pub fn aff_loop(eq: &QuadraticEquation, cfg: &SearchConfig) -> Result<SynthesizedLoop, SynthesisError> {
    let d = eq.dim();
    if d < 2 {
        return Err(SynthesisError::NoLoop(NoLoopReason::DimensionOne));
    }
    let out = if eq.linear.is_zero() {
        lin_loop(&eq.form, &eq.constant, cfg)?
    } else if !eq.form.is_degenerate() {
        let red = affine_reduce(eq)?;
        let lin = lin_loop(&eq.form, &red.c_tilde, cfg)?;
        let mut trace = vec![red.note()];
        trace.extend(lin.trace);
        trace.push(TraceStep::AffineShift {
            delta: red.delta.clone(),
            h: red.h.clone(),
        });
        let body = lin.body.affine_shift(&red.delta, &red.h);
        SynthesizedLoop {
            body,
            certificate: lin.certificate,
            trace,
        }
    } else {
        degenerate_loop(eq, cfg)?
    };
    self_check(eq, &out)?;
    Ok(out)
}

fn self_check(eq: &QuadraticEquation, out: &SynthesizedLoop) -> Result<(), SynthesisError> {
    out.validate().map_err(|e| internal(e.to_string()))?;
    let report = verify_invariant(&out.body, eq, SELF_CHECK_ITERATIONS)?;
    if let Some(i) = report.first_violation {
        return Err(internal(format!("synthesized loop violates the invariant at step {i}")));
    }
    Ok(())
}

fn degenerate_loop(eq: &QuadraticEquation, cfg: &SearchConfig) -> Result<SynthesizedLoop, SynthesisError> {
    let d = eq.dim();
    let split = degenerate_split(eq);
    let (k, r) = (split.kernel_dim, split.rank);
    let q_red = &split.reduced_form;
    let l_red = &split.reduced_linear;
    let c = &eq.constant;
    let mut trace = vec![split.note()];

    let (core_trace, certificate) = if split.lambda.is_zero() {
        // Q̃(y) + L̃(y) = c with u free: double u, keep y at a solution.
        let red = reduce_parts(q_red, l_red, c)?;
        let padded =
            QuadraticForm::new(Matrix::zeros(k, k).direct_sum(q_red.matrix())).expect("block diagonal is symmetric");
        let point = lin_loop(&padded, &red.c_tilde, cfg)?;
        let s = point.body.init();
        if (0..k).any(|i| !s[i].is_one()) {
            return Err(internal("kernel coordinates of the start must be 1"));
        }
        let shift = Vector::zeros(k).concat(&red.h);
        let inv = Rat::one() / (&red.delta * two());
        let mut m = Matrix::identity(d);
        for i in 0..k {
            m[(i, i)] = two();
        }
        let core = Loop::Linear(LinearLoop {
            update: m,
            init: (s - &shift).scale(&inv),
        });
        let steps = vec![
            red.note(),
            TraceStep::Case {
                id: "free-kernel".into(),
            },
            TraceStep::core(&core),
        ];
        (steps, Certificate::ScalingBlock { index: 0 })
    } else if k > 1 {
        degenerate_case_one(&split, c)
    } else if r > 1 {
        degenerate_case_two(&split, c, cfg)?
    } else {
        degenerate_case_three(&split, c)
    };
    trace.extend(core_trace);
    trace.push(TraceStep::Conjugate {
        basis: split.tau.clone(),
    });
    let body = replay(&trace).map_err(|e| internal(e.to_string()))?;
    Ok(SynthesizedLoop {
        body,
        certificate,
        trace,
    })
}

/// `k > 1`: `(u₁, u₂) ← (2u₁, u₂ − (λ₁/λ₂)u₁)` keeps `λ₁u₁ + λ₂u₂` fixed.
fn degenerate_case_one(split: &DegenerateSplit, c: &Rat) -> (Vec<TraceStep>, Certificate) {
    let (k, r) = (split.kernel_dim, split.rank);
    let d = k + r;
    let lambda = &split.lambda;
    let alpha = alpha_candidates(r).swap_remove(0);
    let target = c - split.reduced_form.value(&alpha) - split.reduced_linear.dot(&alpha);
    let mut beta = Vector::zeros(k);
    if target.is_zero() {
        beta[0] = Rat::one();
        beta[1] = -(&lambda[0] / &lambda[1]);
    } else {
        beta[0] = &target / &lambda[0];
    }
    let mut m = Matrix::identity(d);
    m[(0, 0)] = two();
    m[(1, 0)] = -(&lambda[0] / &lambda[1]);
    let core = Loop::Linear(LinearLoop {
        update: m,
        init: beta.concat(&alpha),
    });
    let steps = vec![
        TraceStep::Case {
            id: "kernel-pair".into(),
        },
        TraceStep::core(&core),
    ];
    (steps, Certificate::ScalingBlock { index: 0 })
}

/// `k = 1, r > 1`: freeze `u = β₁`, solve `Q̃(y) + L̃(y) = c − λ₁β₁` with an
/// affine loop and carry `β₁` as a counter coordinate.
fn degenerate_case_two(
    split: &DegenerateSplit,
    c: &Rat,
    cfg: &SearchConfig,
) -> Result<(Vec<TraceStep>, Certificate), SynthesisError> {
    let q_red = &split.reduced_form;
    let l_red = &split.reduced_linear;
    let lambda1 = &split.lambda[0];
    let delta = q_red.determinant();
    let adj = q_red.matrix().adjugate()?;
    let h = &adj * l_red;
    let (alpha, beta1) = alpha_candidates(split.rank)
        .into_iter()
        .find_map(|alpha| {
            let beta1 = (c - q_red.value(&alpha) - l_red.dot(&alpha)) / lambda1;
            let lifted = &alpha.scale(&(&delta * two())) + &h;
            (!beta1.is_zero() && !lifted.is_zero()).then_some((alpha, beta1))
        })
        .ok_or_else(|| internal("no admissible value for the non-kernel coordinates"))?;
    let reduced_constant = c - lambda1 * &beta1;
    let red = reduce_parts(q_red, l_red, &reduced_constant)?;
    let lin = lin_loop(q_red, &red.c_tilde, cfg).map_err(|e| match e {
        // y = α already solves the reduced equation
        SynthesisError::NoLoop(_) => internal(format!("reduced equation at α = {alpha} has no loop")),
        other => other,
    })?;
    let mut steps = vec![TraceStep::Case { id: "counter".into() }, red.note()];
    steps.extend(lin.trace);
    steps.push(TraceStep::AffineShift {
        delta: red.delta,
        h: red.h,
    });
    steps.push(TraceStep::CounterEmbed { beta: beta1 });
    Ok((steps, lin.certificate))
}

/// `k = 1, r = 1`: `a y² + b y + d u = c` is kept by
/// `u ← 4u + (2b/d)·y − 3c/d`, `y ← 2y` from `y = 1`.
fn degenerate_case_three(split: &DegenerateSplit, c: &Rat) -> (Vec<TraceStep>, Certificate) {
    let a = &split.reduced_form.matrix()[(0, 0)];
    let b = &split.reduced_linear[0];
    let d = &split.lambda[0];
    let update = Matrix::from_rows(vec![
        vec![Rat::from_integer(4.into()), b * two() / d],
        vec![Rat::zero(), two()],
    ])
    .expect("2x2");
    let core = Loop::Affine(AffineLoop {
        update,
        init: Vector::new(vec![(c - a - b) / d, Rat::one()]),
        translation: Vector::new(vec![-(c * Rat::from_integer(3.into())) / d, Rat::zero()]),
    });
    let steps = vec![TraceStep::Case { id: "parabola".into() }, TraceStep::core(&core)];
    (steps, Certificate::ScalingBlock { index: 1 })
}

/// Synthesizes loops for many equations; results keep input order.
pub fn synthesize_batch(
    eqs: &[QuadraticEquation],
    cfg: &SearchConfig,
    exec: Execution,
) -> Vec<Result<SynthesizedLoop, SynthesisError>> {
    map_ordered(exec, eqs, |eq| aff_loop(eq, cfg))
}
