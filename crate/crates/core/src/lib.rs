//! Constructing every finite frame whose frame operator has a prescribed
//! spectrum and whose vectors have prescribed squared lengths.
//!
//! The pipeline has two halves:
//!
//! - [`eigensteps`] produces a table of interlacing spectra (eigensteps) that
//!   walks the zero spectrum up to the target spectrum, one rank-one update at
//!   a time. [`spectra`] validates such tables.
//! - [`construction`] turns a valid table into frame vectors using closed-form
//!   update vectors and an orthogonal eigenbasis update at every step.
//!
//! [`verification`] holds independent checkers: projection-norm limits
//! computed by root cancellation, frame verification, eigenstep recovery and
//! the closed-form 3×5 unit norm tight frame family.
//!
//! The crate is `no_std` and only needs `alloc`. Indices in the Rust API are
//! zero-based; anything serialised for humans (reports, JSON) uses the
//! one-based `m` convention and the column index `n = 0..=N`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod construction;
pub mod eigensteps;
mod error;
pub mod numerics;
pub mod spectra;
mod tol;
pub mod verification;

pub use error::Error;
pub use tol::Tolerance;

pub type Result<T, E = Error> = core::result::Result<T, E>;
