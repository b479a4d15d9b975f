//! Exact toric geometry: smooth complete fans, torus-invariant divisors,
//! Thomsen's splitting of Frobenius push-forwards, Bondal's wall criterion,
//! line-bundle cohomology and strong exceptionality of collections.

pub mod bondal;
pub mod cohomology;
pub mod collection;
pub mod divisor;
pub mod error;
pub mod fan;
pub mod formats;
pub mod frobenius;
pub mod lattice;
pub mod variety;

pub use error::{Error, Result};
