//! Triorthogonal codes: construction, verification, distances,
//! Reed–Muller classification, level-3 divisibility and a small exact
//! simulator for the distillation protocol.

pub mod error;
pub mod f2core;
pub mod rmpoly;
pub mod triortho;
pub mod distance;
pub mod level3;
pub mod magic;
pub mod classify;

pub use error::{Error, Result};
pub use f2core::{BitMatrix, BitVector};
pub use rmpoly::{AffineMap, RMPolynomial};
