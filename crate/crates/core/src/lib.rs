//! Reed-Muller codes on symmetric channels, decoded by majority voting over
//! per-petal bit-MAP decisions on affine-coset petals, plus exact oracles for
//! the quantities that govern that decoder on small instances.

pub mod analysis;
pub mod camellia;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod rm;

pub use error::{Error, Result};
