// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod linalg;
pub mod mgl;
pub mod reduced;
pub mod roll;
pub mod verification;
