//! Modular theory, Dirichlet forms and KMS-symmetric Lindblad generators on
//! the matrix algebra `M_n` with a faithful state `rho`.
//!
//! The standard form is realized on `n x n` matrices with the trace inner
//! product: `xi0 = rho^{1/2}`, `J X = X*`, and the positive cone is the PSD
//! matrices. Superoperators are stored in the eigenbasis of `rho`, where the
//! modular group acts entrywise.
//!
//! Numerical checks compare residuals as `!(r < tol)` so that NaN counts as
//! a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod dirichlet;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod lindblad;
pub mod modular;
pub mod runner;
pub mod sampling;
pub mod scenario;
pub mod semigroup;
pub mod standard_form;
pub mod superop;

pub use error::{MdfError, Result};
