//! Exact commutator certificates for compactly supported elements of the
//! semidirect product of PL homeomorphisms of `R^m` acting on compactly
//! supported PL maps `R^m -> R^q`.
//!
//! All arithmetic is over exact rationals. Functions and homeomorphisms are
//! kept symbolically and evaluated pointwise; certificates are checked on
//! deterministic sampling plans.

pub mod decomp;
pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod group;
pub mod plcore;
pub mod swindle;
pub mod torus;

pub use error::{Error, Result};
