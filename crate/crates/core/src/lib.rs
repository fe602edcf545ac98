//! Divergence-free hybridized discontinuous Galerkin solver for
//! incompressible flow on moving triangular meshes.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod error;
pub mod fem;
pub mod hdg;
pub mod interface;
pub mod linsys;
pub mod mesh;
pub mod time;
pub mod bench;
pub mod ale;

pub use error::{Error, Result};
pub use mesh::Vec2;
