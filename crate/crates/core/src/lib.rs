//! Optimal polynomial approximants to 1/f in weighted Hardy spaces H²_ω.
//!
//! The crate computes approximants from the finite normal equations, solves
//! the extremal problem for the smallest possible zero modulus through the
//! norm of the Jacobi matrix with off-diagonal entries √(ω_k/ω_{k+1}),
//! evaluates the closed forms known for Bergman-type, Dirichlet-type and
//! Hardy spaces, and gathers zero-distribution statistics for high-degree
//! approximants.
//!
//! All numerics are generic over [`Real`]; the aliases at the crate root fix
//! the scalar to `f64`.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod closedform;
pub mod error;
pub mod gram;
pub mod jacobi;
pub mod jentzsch;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub use num_complex::Complex;

pub type Weights = weights::WeightSequence<f64>;
pub type Series = series::CoeffSeries<f64>;
pub type Approximant = gram::Approximant<f64>;
pub type RootSet = roots::RootSet<f64>;
pub type ZeroStats = jentzsch::ZeroStats<f64>;
pub type JacobiTruncation = jacobi::JacobiTruncation<f64>;
pub type Complex64 = Complex<f64>;
