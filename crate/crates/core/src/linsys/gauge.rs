//! Pressure level fixing.

use crate::fem::{ElementGeometry, Space};
use crate::mesh::Mesh2D;

/// How the constant pressure mode is removed.
///
/// `MeanZero` appends one multiplier enforcing `∫ p_h = 0`; `Pinned` fixes the
/// constant pressure coefficient of element 0 to zero; `None` leaves the
/// system as is (a traction-free boundary then fixes the level).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    MeanZero,
    Pinned,
    None,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::MeanZero => "mean_zero",
            Gauge::Pinned => "pinned",
            Gauge::None => "none",
        }
    }
}

/// `∫_T q_i` for every pressure basis function, flattened per element.
pub fn pressure_moments(space: &Space, mesh: &Mesh2D) -> Vec<f64> {
    let np = space.np;
    let mut out = vec![0.0; mesh.num_elements() * np];
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(space, mesh, e);
        for q in 0..space.vol.len() {
            for i in 0..np {
                out[e * np + i] += geo.jxw[q] * space.vol.p_val[q * np + i];
            }
        }
    }
    out
}

/// `∫_Ω p_h`.
pub fn pressure_integral(space: &Space, mesh: &Mesh2D, p: &[f64]) -> f64 {
    pressure_moments(space, mesh).iter().zip(p).map(|(m, c)| m * c).sum()
}
