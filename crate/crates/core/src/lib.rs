//! Exact computation in the Witt superalgebra `W(m|n)`, its extensions, and
//! the Whittaker tensor modules `T(A^a, V)`.

pub mod aw;
#[cfg(feature = "cli")]
pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod glmn;
pub mod linalg;
pub mod operator;
pub mod report;
pub mod scalar;
pub mod superalgebra;
pub mod verifier;
pub mod weyl;
pub mod whittaker;
pub mod witt;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use superalgebra::{Exponent, Monomial, OddSet, Parity, Shape, SuperPoly};

/// Maps in parallel when the `parallel` feature is on, preserving order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send, R: Send>(items: Vec<T>, f: impl Fn(T) -> R + Sync + Send) -> Vec<R> {
    items.into_iter().map(f).collect()
}
