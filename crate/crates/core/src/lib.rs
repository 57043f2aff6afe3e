//! Numerical toolkit for concrete Banach lattices: Orlicz, Lorentz and `ℓ_p`
//! norms, optimal upper/lower sequence-space functionals, relative
//! decomposability constants, K-functionals and a verification suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomp;
pub mod error;
pub mod exec;
pub mod harness;
pub mod interp;
pub mod norms;
pub mod numeric;
pub mod optimal;
pub mod optimizer;
pub mod rearrangement;
pub mod special;

pub use error::{LatticeError, Result};
pub use exec::Exec;
pub use norms::{LatticeSpec, BetaSequence};
pub use numeric::Exponent;
pub use rearrangement::{SeqVector, StepFunction};
pub use special::OrliczFunction;
