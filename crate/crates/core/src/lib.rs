//! Exact arithmetic for double Eisenstein series at level N.
//!
//! The crate is organized around a small tower: exact cyclotomic numbers
//! ([`cyclotomic`]), truncated q-series over them ([`qseries`]), Bernoulli
//! and beta constants ([`bernoulli`]), and on top of those the double shuffle
//! verifier ([`shuffle`]), the gamma/lambda linear system ([`gamma`]), the
//! formal double zeta space ([`dz`]), and floating-point cross checks
//! ([`numeric`]). [`report`] and [`cli`] wrap everything for the `eisen`
//! binary.

pub mod arith;
pub mod bernoulli;
pub mod cli;
pub mod cyclotomic;
pub mod dz;
pub mod gamma;
pub mod linalg;
pub mod numeric;
pub mod qseries;
pub mod report;
pub mod shuffle;

mod error;

pub use cyclotomic::CycNum;
pub use error::Error;
pub use qseries::{QSeries, SymbolVec};

pub type Result<T> = std::result::Result<T, Error>;
