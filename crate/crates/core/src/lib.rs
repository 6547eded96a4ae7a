//! Desk-scale laboratory for block Toeplitz operators with matrix-valued
//! Laurent symbols.
//!
//! Symbols are finitely supported block Fourier series, so every Hankel
//! operator built from them has finite rank and every self-commutator of a
//! normal symbol vanishes outside a finite block. The crate exploits this to
//! turn finite truncations into certified computations: each
//! [`TruncatedOperator`] carries the window on which its entries agree with
//! the infinite operator.
//!
//! Modules:
//! - [`symbol`]: Laurent matrix symbols and their coefficient transforms.
//! - [`potapov`]: finite Blaschke-Potapov products, model spaces, coprimality.
//! - [`operator`]: truncated Toeplitz/Hankel matrices, operator words,
//!   self-commutators and the Toeplitz/Hankel identity suite.
//! - [`classify`]: hyponormality, normality, k-hyponormality, kernel
//!   invariance, lemma verifiers and injectivity witnesses.
//! - [`catalog`], [`generator`], [`workbench`]: example catalog, random
//!   instance generation and report assembly for the command-line front end.

pub mod catalog;
pub mod classify;
pub mod error;
pub mod generator;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod potapov;
pub mod symbol;
pub mod workbench;

pub use error::{Error, Result};
pub use operator::{TruncatedOperator, Window};
pub use potapov::{BlaschkeFactor, ModelSpaceBasis, PotapovProduct};
pub use symbol::{BoundedTypeFlag, LaurentSymbol, SymbolSplit};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Default tolerance for "this coefficient is zero".
pub const DEFAULT_COEFF_TOL: f64 = 1e-10;
