//! Synthesis of linear and affine loops whose orbits stay on a prescribed
//! quadric `Q(x) + L(x) = c` over ℚ.
//!
//! The pipeline parses an equation ([`parse`]), diagonalizes its quadratic
//! part ([`qform`]), decides rational solvability and finds a point with all
//! coordinates nonzero ([`isotropy`]), and assembles a loop with an infinite
//! orbit from a rotation ([`pell`]) or a scaling block ([`synthesis`]). Loops,
//! their certificates and replayable traces live in [`loops`].

pub mod emit;
pub mod exact;
pub mod isotropy;
pub mod loops;
pub mod par;
pub mod parse;
pub mod pell;
pub mod qform;
pub mod synthesis;

pub use exact::{Int, Matrix, Rat, Vector};
pub use loops::{AffineLoop, Certificate, LinearLoop, SynthesizedLoop};
pub use par::Execution;
pub use qform::{QuadraticEquation, QuadraticForm};
pub use synthesis::{aff_loop, lin_loop, SynthesisError};
