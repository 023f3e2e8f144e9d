//! # qfm-core
//!
//! Quasi-free states on CCR algebras represented by positive block matrices.
//!
//! - [`blocklin`]: Hermitian block linear algebra (spectral calculus, Schur complements,
//!   partitioned inverses, positivity).
//! - [`specfun`]: Hermite and Laguerre functions, exponential vectors, closed-form Weyl
//!   matrix elements.
//! - [`fock`]: truncated Fock-space oracle (occupation bases, ladder, Weyl and field
//!   operators, second quantization, density operators, numeric entropy).
//! - [`quasifree`]: closed-form API for a quasi-free state `ω_A`.
//! - [`markov`]: Markov-triplet criteria for a 3-way partitioned `A`.
//! - [`sweep`] and [`oracle`]: batch evaluation, parallel when the `parallel` feature is on.
//!
//! All entropies are in nats.

#![forbid(unsafe_code)]

pub mod blocklin;
pub mod error;
pub mod fock;
pub mod markov;
pub mod oracle;
pub mod quasifree;
pub mod specfun;
pub mod sweep;

mod par;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
