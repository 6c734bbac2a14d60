//! Weighted time averages for finite quantum systems.
//!
//! The crate evaluates the smooth bump weights `w_{p,q}`, their discrete and
//! continuous weighted averages, the dephased (diagonal) state of a
//! Hermitian system, and the convergence experiments on the three-spin model
//! `H = σ₁ᶻ + √2 σ₂ᶻ + √3 σ₃ᶻ`. All arithmetic is carried out with MPFR floats
//! at a precision chosen through [`PrecisionContext`].

pub mod error;
pub mod exec;
pub mod experiments;
pub mod fit;
pub mod models;
pub mod numerics;
pub mod quantum;
pub mod signals;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use exec::Execution;
pub use numerics::{CMatrix, Complex, Float, PrecisionContext};
