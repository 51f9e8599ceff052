//! Exact rationals and monotone piecewise-linear maps of the line.

mod pl;
mod rat;

pub use pl::{PlMap1D, TentProfile};
pub use rat::{cmp_third_pow2_recip, rat, Rat};

/// A point of ℝᵐ with exact coordinates.
pub type Point = Vec<Rat>;

/// Formats a point as `(p/q, p/q, ...)`.
pub fn format_point(p: &[Rat]) -> String {
    let coords: Vec<String> = p.iter().map(Rat::to_string).collect();
    format!("({})", coords.join(", "))
}
