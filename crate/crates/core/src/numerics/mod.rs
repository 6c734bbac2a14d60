//! Arbitrary-precision scalars, matrices, quadrature and range-reduced
//! trigonometry shared by every other module.

pub mod complex;
pub mod context;
pub mod expr;
pub mod format;
pub mod matrix;
pub mod quadrature;
pub mod trig;

pub use complex::Complex;
pub use context::{make_context, PrecisionContext, DEFAULT_BITS, MIN_BITS};
pub use expr::eval_expr;
pub use format::{format40, format_sig, parse_decimal, PRINT_DIGITS};
pub use matrix::CMatrix;
pub use quadrature::{quadrature, quadrature_with, QuadratureOptions, QuadratureResult};
pub use trig::{cis_reduced, cos_reduced, reduce_angle};

pub use rug::Float;
