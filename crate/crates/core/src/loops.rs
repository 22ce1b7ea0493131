//! Linear and affine loops `x ← s; while ⋆ do x ← M·x (+ t)`, exact orbit
//! iteration, invariant checking, non-triviality certificates and the
//! replayable synthesis trace.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{lcm_denominators, Int, MathError, Matrix, Rat, Vector};
use crate::pell::niven_check;
use crate::qform::QuadraticEquation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLoop {
    pub update: Matrix,
    pub init: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLoop {
    pub update: Matrix,
    pub init: Vector,
    pub translation: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loop {
    Linear(LinearLoop),
    Affine(AffineLoop),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("update must be a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("update is {update}x{update} but {what} has dimension {got}")]
    Dimension {
        update: usize,
        what: &'static str,
        got: usize,
    },
    #[error(transparent)]
    Math(#[from] MathError),
}

fn check_shape(update: &Matrix, vectors: &[(&'static str, &Vector)]) -> Result<(), LoopError> {
    if !update.is_square() {
        return Err(LoopError::NotSquare(update.rows(), update.cols()));
    }
    for (what, v) in vectors {
        if v.dim() != update.rows() {
            return Err(LoopError::Dimension {
                update: update.rows(),
                what,
                got: v.dim(),
            });
        }
    }
    Ok(())
}

impl LinearLoop {
    pub fn new(update: Matrix, init: Vector) -> Result<Self, LoopError> {
        check_shape(&update, &[("init", &init)])?;
        Ok(LinearLoop { update, init })
    }
}

impl AffineLoop {
    pub fn new(update: Matrix, init: Vector, translation: Vector) -> Result<Self, LoopError> {
        check_shape(&update, &[("init", &init), ("translation", &translation)])?;
        Ok(AffineLoop {
            update,
            init,
            translation,
        })
    }

    /// The `(d+1)`-dimensional linear loop `⟨[[1, 0], [t, M]], (1, s)⟩`; its
    /// last `d` coordinates follow the affine orbit.
    pub fn augment(&self) -> LinearLoop {
        let d = self.update.rows();
        let mut m = Matrix::zeros(d + 1, d + 1);
        m[(0, 0)] = Rat::from_integer(1.into());
        for i in 0..d {
            m[(i + 1, 0)] = self.translation[i].clone();
            for j in 0..d {
                m[(i + 1, j + 1)] = self.update[(i, j)].clone();
            }
        }
        let init = Vector::from_ints(&[1]).concat(&self.init);
        LinearLoop { update: m, init }
    }
}

impl Loop {
    pub fn dim(&self) -> usize {
        self.update().rows()
    }

    pub fn update(&self) -> &Matrix {
        match self {
            Loop::Linear(l) => &l.update,
            Loop::Affine(l) => &l.update,
        }
    }

    pub fn init(&self) -> &Vector {
        match self {
            Loop::Linear(l) => &l.init,
            Loop::Affine(l) => &l.init,
        }
    }

    pub fn translation(&self) -> Option<&Vector> {
        match self {
            Loop::Linear(_) => None,
            Loop::Affine(l) => Some(&l.translation),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Loop::Affine(_))
    }

    pub fn step(&self, x: &Vector) -> Vector {
        let y = self.update() * x;
        match self.translation() {
            Some(t) => &y + t,
            None => y,
        }
    }

    /// `x(n)`.
    pub fn iterate(&self, n: usize) -> Vector {
        let stepper = Stepper::new(self);
        let mut x = State::from_vector(self.init());
        for _ in 0..n {
            x = stepper.step(&x);
        }
        x.to_vector()
    }

    /// `x(0), …, x(len − 1)`.
    pub fn orbit(&self, len: usize) -> Vec<Vector> {
        let stepper = Stepper::new(self);
        let mut out = Vec::with_capacity(len);
        let mut x = State::from_vector(self.init());
        for i in 0..len {
            if i > 0 {
                x = stepper.step(&x);
            }
            out.push(x.to_vector());
        }
        out
    }

    /// Augmented linear form of an affine loop; linear loops are returned as is.
    pub fn augment(&self) -> LinearLoop {
        match self {
            Loop::Linear(l) => l.clone(),
            Loop::Affine(l) => l.augment(),
        }
    }

    /// `⟨P·M·P⁻¹, P·s, P·t⟩`: the same loop seen through `x = P·y`.
    pub fn conjugate(&self, p: &Matrix) -> Result<Loop, LoopError> {
        let p_inv = p.inverse()?;
        let update = &(p * self.update()) * &p_inv;
        let init = p * self.init();
        Ok(match self.translation() {
            None => Loop::Linear(LinearLoop { update, init }),
            Some(t) => Loop::Affine(AffineLoop {
                update,
                init,
                translation: p * t,
            }),
        })
    }

    /// The loop on `x = (X − h)/(2δ)` induced by this loop on `X`:
    /// `⟨M, (s − h)/(2δ), (t + (M − I)h)/(2δ)⟩`.
    pub fn affine_shift(&self, delta: &Rat, h: &Vector) -> Loop {
        let two_delta = delta * Rat::from_integer(2.into());
        let inv = Rat::from_integer(1.into()) / two_delta;
        let m = self.update();
        let mh = &(m * h) - h;
        let t = match self.translation() {
            Some(t) => t + &mh,
            None => mh,
        };
        Loop::Affine(AffineLoop {
            update: m.clone(),
            init: (self.init() - h).scale(&inv),
            translation: t.scale(&inv),
        })
    }

    /// Counter embedding: with `x₀ ≡ β` held fixed, the affine loop
    /// `y ← M·y + t` becomes the linear loop `⟨[[1, 0], [t/β, M]], (β, s)⟩`.
    pub fn counter_embed(&self, beta: &Rat) -> Loop {
        let d = self.dim();
        let zero = Vector::zeros(d);
        let t = self.translation().unwrap_or(&zero);
        let mut m = Matrix::zeros(d + 1, d + 1);
        m[(0, 0)] = Rat::from_integer(1.into());
        for i in 0..d {
            m[(i + 1, 0)] = &t[i] / beta;
            for j in 0..d {
                m[(i + 1, j + 1)] = self.update()[(i, j)].clone();
            }
        }
        let init = Vector::new(vec![beta.clone()]).concat(self.init());
        Loop::Linear(LinearLoop { update: m, init })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// States checked: `x(0)` through `x(iterations)`.
    pub iterations: usize,
    pub first_violation: Option<usize>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// A state `num / den` in lowest terms with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct State {
    num: Vec<Int>,
    den: Int,
}

impl State {
    fn reduced(mut num: Vec<Int>, mut den: Int) -> State {
        let g = num.iter().fold(den.clone(), |acc, v| acc.gcd(v));
        if !g.is_one() {
            num.iter_mut().for_each(|v| *v /= &g);
            den /= &g;
        }
        State { num, den }
    }

    fn from_vector(v: &Vector) -> State {
        let den = lcm_denominators(v.iter());
        let num = v.iter().map(|q| (q * &den).to_integer()).collect();
        State::reduced(num, den)
    }

    fn to_vector(&self) -> Vector {
        self.num.iter().map(|n| Rat::new(n.clone(), self.den.clone())).collect()
    }
}

/// Orbit iteration on integer numerators over a common denominator, one gcd
/// reduction per step.
struct Stepper {
    update: Vec<Vec<Int>>,
    update_den: Int,
    translation: Option<(Vec<Int>, Int)>,
}

fn scaled_rows(m: &Matrix) -> (Vec<Vec<Int>>, Int) {
    let den = lcm_denominators((0..m.rows()).flat_map(|i| m.row(i).iter()));
    let rows = (0..m.rows())
        .map(|i| m.row(i).iter().map(|q| (q * &den).to_integer()).collect())
        .collect();
    (rows, den)
}

impl Stepper {
    fn new(lp: &Loop) -> Stepper {
        let (update, update_den) = scaled_rows(lp.update());
        let translation = lp.translation().map(|t| {
            let s = State::from_vector(t);
            (s.num, s.den)
        });
        Stepper {
            update,
            update_den,
            translation,
        }
    }

    // M·x + t = (N·X·dₜ + T·d_M·D) / (d_M·D·dₜ)
    fn step(&self, x: &State) -> State {
        let mut num: Vec<Int> = self
            .update
            .iter()
            .map(|row| row.iter().zip(&x.num).map(|(a, v)| a * v).sum())
            .collect();
        let mut den = &self.update_den * &x.den;
        if let Some((t, t_den)) = &self.translation {
            for (n, ti) in num.iter_mut().zip(t) {
                *n = &*n * t_den + ti * &den;
            }
            den *= t_den;
        }
        State::reduced(num, den)
    }
}

/// `Q(x) + L(x) − c` scaled to integer coefficients, evaluated on `X / D`
/// as the numerator `XᵀA'X + D·b'·X − c'·D²`.
struct IntegerInvariant {
    form: Vec<Vec<Int>>,
    linear: Vec<Int>,
    constant: Int,
}

impl IntegerInvariant {
    fn new(eq: &QuadraticEquation) -> IntegerInvariant {
        let a = eq.form.matrix();
        let all = (0..a.rows())
            .flat_map(|i| a.row(i).iter())
            .chain(eq.linear.coeffs().iter())
            .chain(std::iter::once(&eq.constant));
        let l = Rat::from_integer(lcm_denominators(all));
        let int = |q: &Rat| (q * &l).to_integer();
        IntegerInvariant {
            form: (0..a.rows()).map(|i| a.row(i).iter().map(int).collect()).collect(),
            linear: eq.linear.coeffs().iter().map(int).collect(),
            constant: int(&eq.constant),
        }
    }

    fn holds(&self, x: &State) -> bool {
        let quad: Int = self
            .form
            .iter()
            .zip(&x.num)
            .map(|(row, xi)| xi * row.iter().zip(&x.num).map(|(a, xj)| a * xj).sum::<Int>())
            .sum();
        let lin: Int = self.linear.iter().zip(&x.num).map(|(b, xi)| b * xi).sum();
        (quad + &x.den * lin - &self.constant * &x.den * &x.den).is_zero()
    }
}

/// Evaluates the invariant exactly on `x(0), …, x(n)`.
pub fn verify_invariant(lp: &Loop, eq: &QuadraticEquation, n: usize) -> Result<VerificationReport, MathError> {
    if eq.dim() != lp.dim() {
        return Err(MathError::DimensionMismatch(format!(
            "loop has dimension {}, equation {}",
            lp.dim(),
            eq.dim()
        )));
    }
    let stepper = Stepper::new(lp);
    let invariant = IntegerInvariant::new(eq);
    let mut x = State::from_vector(lp.init());
    for i in 0..=n {
        if i > 0 {
            x = stepper.step(&x);
        }
        if !invariant.holds(&x) {
            return Ok(VerificationReport {
                iterations: n,
                first_violation: Some(i),
            });
        }
    }
    Ok(VerificationReport {
        iterations: n,
        first_violation: None,
    })
}

/// Index of the first state among `x(0), …, x(len − 1)` that repeats an
/// earlier one.
pub fn first_repeat(lp: &Loop, len: usize) -> Option<usize> {
    let stepper = Stepper::new(lp);
    let mut seen: HashSet<State> = HashSet::with_capacity(len);
    let mut x = State::from_vector(lp.init());
    for i in 0..len {
        if i > 0 {
            x = stepper.step(&x);
        }
        if !seen.insert(x.clone()) {
            return Some(i);
        }
    }
    None
}

/// Evidence that a loop's orbit is infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Rows `rows` of the core update form a rotation block with half-trace
    /// `alpha` outside `{0, ±1/2, ±1}`, acting on a nonzero start.
    NivenRotationBlock {
        rows: [usize; 2],
        #[serde(with = "crate::exact::text::rat")]
        alpha: Rat,
    },
    /// Row `index` of the core update is `2·e_index` with zero translation
    /// and nonzero start, so that coordinate doubles forever.
    ScalingBlock { index: usize },
    /// Only the first `length` states were seen to be pairwise distinct.
    DistinctPrefix { length: usize },
}

impl Certificate {
    pub fn is_constructive(&self) -> bool {
        !matches!(self, Certificate::DistinctPrefix { .. })
    }
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Certificate::NivenRotationBlock { rows, alpha } => write!(
                f,
                "niven-rotation-block on coordinates {},{} with half-trace {alpha}",
                rows[0], rows[1]
            ),
            Certificate::ScalingBlock { index } => {
                write!(f, "scaling-block: coordinate {index} doubles each iteration")
            }
            Certificate::DistinctPrefix { length } => {
                write!(f, "distinct-prefix: first {length} states pairwise distinct")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("trace has no core loop")]
    NoCore,
    #[error("certificate does not hold: {0}")]
    Invalid(String),
}

/// One step of a synthesis run. Notes record intermediate data; transforms
/// rebuild the loop from the core when replayed in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum TraceStep {
    Diagonalize {
        #[serde(with = "crate::exact::text::vector")]
        diag: Vector,
        #[serde(with = "crate::exact::text::matrix")]
        sigma: Matrix,
    },
    Reduction {
        #[serde(with = "crate::exact::text::rat")]
        delta: Rat,
        #[serde(with = "crate::exact::text::vector")]
        h: Vector,
        #[serde(with = "crate::exact::text::rat")]
        c_tilde: Rat,
    },
    Split {
        #[serde(with = "crate::exact::text::matrix")]
        tau: Matrix,
        rank: usize,
        #[serde(with = "crate::exact::text::vector")]
        lambda: Vector,
    },
    Case {
        id: String,
    },
    Core {
        #[serde(with = "crate::exact::text::matrix")]
        update: Matrix,
        #[serde(with = "crate::exact::text::vector")]
        init: Vector,
        #[serde(
            with = "crate::exact::text::opt_vector",
            skip_serializing_if = "Option::is_none",
            default
        )]
        translation: Option<Vector>,
    },
    Conjugate {
        #[serde(with = "crate::exact::text::matrix")]
        basis: Matrix,
    },
    AffineShift {
        #[serde(with = "crate::exact::text::rat")]
        delta: Rat,
        #[serde(with = "crate::exact::text::vector")]
        h: Vector,
    },
    CounterEmbed {
        #[serde(with = "crate::exact::text::rat")]
        beta: Rat,
    },
    Augment,
}

impl TraceStep {
    pub fn core(lp: &Loop) -> TraceStep {
        TraceStep::Core {
            update: lp.update().clone(),
            init: lp.init().clone(),
            translation: lp.translation().cloned(),
        }
    }

    fn core_loop(&self) -> Option<Loop> {
        match self {
            TraceStep::Core {
                update,
                init,
                translation,
            } => Some(match translation {
                None => Loop::Linear(LinearLoop {
                    update: update.clone(),
                    init: init.clone(),
                }),
                Some(t) => Loop::Affine(AffineLoop {
                    update: update.clone(),
                    init: init.clone(),
                    translation: t.clone(),
                }),
            }),
            _ => None,
        }
    }
}

/// The core loop recorded in a trace (the last `Core` step).
pub fn trace_core(trace: &[TraceStep]) -> Option<Loop> {
    trace.iter().rev().find_map(TraceStep::core_loop)
}

/// Rebuilds the loop by applying every transform after the last core step.
pub fn replay(trace: &[TraceStep]) -> Result<Loop, CertificateError> {
    let start = trace
        .iter()
        .rposition(|s| matches!(s, TraceStep::Core { .. }))
        .ok_or(CertificateError::NoCore)?;
    let mut lp = trace[start].core_loop().expect("core step");
    for step in &trace[start + 1..] {
        lp = match step {
            TraceStep::Conjugate { basis } => lp
                .conjugate(basis)
                .map_err(|e| CertificateError::Invalid(e.to_string()))?,
            TraceStep::AffineShift { delta, h } => lp.affine_shift(delta, h),
            TraceStep::CounterEmbed { beta } => lp.counter_embed(beta),
            TraceStep::Augment => Loop::Linear(lp.augment()),
            _ => lp,
        };
    }
    Ok(lp)
}

/// Checks a constructive certificate against the core loop it refers to.
/// Every transform in a trace maps orbits injectively onto orbits (or onto
/// a coordinate projection of them), so infinitude carries over.
pub fn check_certificate(cert: &Certificate, core: &Loop) -> Result<(), CertificateError> {
    let bad = |msg: String| Err(CertificateError::Invalid(msg));
    let m = core.update();
    let s = core.init();
    let d = core.dim();
    match cert {
        Certificate::NivenRotationBlock { rows: [i, j], alpha } => {
            let (i, j) = (*i, *j);
            if i >= d || j >= d || i == j {
                return bad(format!("block rows {i},{j} out of range"));
            }
            // the block must be closed: rows i, j only read columns i, j
            for r in [i, j] {
                if (0..d).any(|c| c != i && c != j && !m[(r, c)].is_zero()) {
                    return bad(format!("row {r} leaves the rotation block"));
                }
            }
            if core.translation().is_some_and(|t| !t[i].is_zero() || !t[j].is_zero()) {
                return bad("rotation block has a translation".into());
            }
            let block = Matrix::from_rows(vec![
                vec![m[(i, i)].clone(), m[(i, j)].clone()],
                vec![m[(j, i)].clone(), m[(j, j)].clone()],
            ])
            .expect("2x2");
            let niven = niven_check(&block).map_err(|e| CertificateError::Invalid(e.to_string()))?;
            if &niven.half_trace != alpha {
                return bad(format!("half-trace {} differs from {alpha}", niven.half_trace));
            }
            if s[i].is_zero() && s[j].is_zero() {
                return bad("rotation block starts at the origin".into());
            }
            Ok(())
        }
        Certificate::ScalingBlock { index } => {
            let i = *index;
            if i >= d {
                return bad(format!("index {i} out of range"));
            }
            let two = Rat::from_integer(2.into());
            if (0..d).any(|c| m[(i, c)] != if c == i { two.clone() } else { Rat::zero() }) {
                return bad(format!("row {i} is not 2·e_{i}"));
            }
            if core.translation().is_some_and(|t| !t[i].is_zero()) {
                return bad(format!("coordinate {i} is translated"));
            }
            if s[i].is_zero() {
                return bad(format!("coordinate {i} starts at zero"));
            }
            Ok(())
        }
        Certificate::DistinctPrefix { length } => match first_repeat(core, *length) {
            None => Ok(()),
            Some(k) => bad(format!("state {k} repeats")),
        },
    }
}

/// Scans a core loop for a constructive certificate: a scaling row first, then
/// a closed 2×2 block passing the Niven check.
pub fn find_certificate(core: &Loop) -> Option<Certificate> {
    let d = core.dim();
    for index in 0..d {
        let cert = Certificate::ScalingBlock { index };
        if check_certificate(&cert, core).is_ok() {
            return Some(cert);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let m = core.update();
            let block = Matrix::from_rows(vec![
                vec![m[(i, i)].clone(), m[(i, j)].clone()],
                vec![m[(j, i)].clone(), m[(j, j)].clone()],
            ])
            .expect("2x2");
            let cert = Certificate::NivenRotationBlock {
                rows: [i, j],
                alpha: block.trace() / Rat::from_integer(2.into()),
            };
            if check_certificate(&cert, core).is_ok() {
                return Some(cert);
            }
        }
    }
    None
}

/// Best-effort evidence for a loop without a trace: pairwise distinctness of
/// the first `len` states. Sound for finite prefixes only.
pub fn certify_foreign(lp: &Loop, len: usize) -> Option<Certificate> {
    first_repeat(lp, len)
        .is_none()
        .then_some(Certificate::DistinctPrefix { length: len })
}

/// A loop produced by synthesis together with its certificate and trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesizedLoop {
    pub body: Loop,
    pub certificate: Certificate,
    pub trace: Vec<TraceStep>,
}

impl SynthesizedLoop {
    /// Replays the trace and re-checks the certificate on its core.
    pub fn validate(&self) -> Result<(), CertificateError> {
        let replayed = replay(&self.trace)?;
        if replayed != self.body {
            return Err(CertificateError::Invalid("trace does not replay to the loop".into()));
        }
        let core = trace_core(&self.trace).ok_or(CertificateError::NoCore)?;
        check_certificate(&self.certificate, &core)
    }

    /// The `(d+1)`-variable linear loop simulating this one, with the
    /// augmentation recorded in the trace.
    pub fn augmented(&self) -> SynthesizedLoop {
        let mut trace = self.trace.clone();
        trace.push(TraceStep::Augment);
        SynthesizedLoop {
            body: Loop::Linear(self.body.augment()),
            certificate: self.certificate.clone(),
            trace,
        }
    }
}
