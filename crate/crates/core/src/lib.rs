//! Rigorous numerics for the Fredholm series `f(z) = z + z^2 + z^4 + z^8 + ...`.
//!
//! The crate evaluates `f` and its companions on the upper half-plane
//! (`F(w) = f(e(w))`, `G`, `H`, `S = F + G`, `S_1`) with certified enclosures,
//! checks their functional equations, locates and certifies zeroes, and moves
//! zeroes of `S - v` to points where `f = v` arbitrarily close to `z = 1`.
//!
//! Every numeric value is carried as a [`rigor::Ball`]; certificates are only
//! issued from ball bounds.

pub mod constants;
pub mod error;
pub mod expsums;
pub mod numtheory;
pub mod rigor;
pub mod series;
pub mod zeros;

pub use error::{Error, Result};
pub use rigor::{Ball, RationalAngle};
