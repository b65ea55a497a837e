//! Exact integer and rational machinery for power-product matrices.
//!
//! A power-product matrix `V(n,d)` is indexed by the weak compositions of
//! `d` into `n` parts (all ways of putting `d` balls into `n` bins); its
//! `(i,j)` entry is `∏_k (α^i_k)^(α^j_k)` with the convention `0^0 = 1`.
//! This crate builds these matrices exactly, exposes their block
//! lower-triangular structure under a support-based ordering, computes
//! determinants and sparsity both in closed form and directly, converts
//! homogeneous polynomials between the monomial basis and the basis of
//! d-th powers of linear forms, and machine-checks the combinatorial
//! identities underlying all of the above.
//!
//! All public functions are pure: inputs are immutable, results carry no
//! shared state, and concurrent invocation is safe.

pub mod basis;
pub mod compositions;
pub mod determinant;
pub mod identities;
pub mod matrix;
pub mod report;
pub mod structure;

mod error;
mod numio;

pub use error::{Error, Result};
