//! Nodal velocities from discontinuous fields and the free-surface update.

use crate::error::Result;
use crate::fem::{basis::ref_vertex, eval_velocity, Space};
use crate::mesh::{Mesh2D, Vec2};

/// Average over the elements sharing each node of the element velocity at
/// that vertex, for the nodes marked in `wanted` (zero elsewhere).
pub fn nodal_velocity(space: &Space, mesh: &Mesh2D, u: &[f64], wanted: &[bool]) -> Result<Vec<Vec2>> {
    let mut sum = vec![Vec2::zeros(); mesh.num_nodes()];
    let mut count = vec![0usize; mesh.num_nodes()];
    for (e, t) in mesh.triangles().iter().enumerate() {
        for (a, &node) in t.iter().enumerate() {
            if !wanted[node] {
                continue;
            }
            sum[node] += eval_velocity(space, mesh, u, e, ref_vertex(a))?.value;
            count[node] += 1;
        }
    }
    Ok(sum
        .into_iter()
        .zip(count)
        .map(|(s, c)| if c > 0 { s / c as f64 } else { s })
        .collect())
}

/// `δt ũ` at the marked surface nodes (zero elsewhere), with `ũ` the
/// extrapolated velocity coefficients.
pub fn free_surface_displacement(space: &Space, mesh: &Mesh2D, u_ext: &[f64], surface: &[bool], dt: f64) -> Result<Vec<Vec2>> {
    Ok(nodal_velocity(space, mesh, u_ext, surface)?.into_iter().map(|v| v * dt).collect())
}
