//! Polynomial bases, quadrature, pull-back maps and DOF layout.

pub mod basis;
pub mod field;
pub mod layout;
pub mod quadrature;
pub mod space;

pub use basis::{dim_p, AffineMap, FacetBasis, OrthoBasis};
pub use field::{eval_pressure, eval_velocity, facet_trace, FacetTrace, VectorSample};
pub use layout::DofLayout;
pub use space::{ElementGeometry, Space};
