//! Topology of three-dimensional ABC self-affine tiles.
//!
//! The tile `T = M^{-1}(T + D)` is built from the companion matrix of
//! `x^3 + A x^2 + B x + C` and the digit set `{(e,0,0) : 0 <= e < C}`.

pub mod error;
pub mod export;
pub mod geometry;
pub mod itypes;
pub mod lattice;
pub mod neighbors;
pub mod partition;
pub mod surface;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{
    addr_cmp, addr_less, make_digit_system, Address, DigitSystem, LatticeVector, RationalPoint,
    TileParams,
};
