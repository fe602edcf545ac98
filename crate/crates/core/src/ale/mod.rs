//! Discrete ALE maps: prescribed motions, harmonic extension of boundary
//! displacement and nodal mesh velocities.
//!
//! Geometry is piecewise linear: a map is a nodal displacement and meshes
//! stay straight-sided.

pub mod extension;
pub mod free_surface;

pub use extension::{harmonic_extension, stiffening, stiffening_profile, NodeConstraint};
pub use free_surface::{free_surface_displacement, nodal_velocity};

use crate::error::{Error, Result};
use crate::mesh::{Mesh2D, Vec2};
use crate::time::bdf_coefficients;

type PathFn = Box<dyn Fn(Vec2, f64) -> Vec2 + Send + Sync>;

/// Analytic map `x = x0 + d(x0, t)` with its time derivative along node paths.
pub struct PrescribedMap {
    displacement: PathFn,
    velocity: PathFn,
}

impl PrescribedMap {
    pub fn new(
        displacement: impl Fn(Vec2, f64) -> Vec2 + Send + Sync + 'static,
        velocity: impl Fn(Vec2, f64) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        PrescribedMap {
            displacement: Box::new(displacement),
            velocity: Box::new(velocity),
        }
    }

    pub fn positions(&self, reference: &[Vec2], t: f64) -> Vec<Vec2> {
        reference.iter().map(|x0| x0 + (self.displacement)(*x0, t)).collect()
    }

    /// Mesh at time `t` with the topology and labels of `reference`.
    pub fn mesh_at(&self, reference: &Mesh2D, t: f64) -> Result<Mesh2D> {
        reference.with_nodes(self.positions(reference.nodes(), t))
    }

    /// `ω = ∂_t A_t` at the mapped nodes.
    pub fn omega_at(&self, reference: &[Vec2], t: f64) -> Vec<Vec2> {
        reference.iter().map(|x0| (self.velocity)(*x0, t)).collect()
    }
}

/// BDF mesh velocity from node positions `[x^m, x^{m-1}, ...]`; the order
/// is `positions.len() - 1`.
pub fn mesh_velocity(positions: &[&[Vec2]], dt: f64) -> Result<Vec<Vec2>> {
    if positions.len() < 2 {
        return Err(Error::Startup {
            needed: 2,
            available: positions.len(),
        });
    }
    let a = bdf_coefficients(positions.len() - 1)?;
    let n = positions[0].len();
    if positions.iter().any(|p| p.len() != n) {
        return Err(Error::Topology("configurations have different node counts".into()));
    }
    let mut out = vec![Vec2::zeros(); n];
    for (aj, p) in a.iter().zip(positions) {
        for (o, x) in out.iter_mut().zip(p.iter()) {
            *o += x * (aj / dt);
        }
    }
    Ok(out)
}

/// `(1.5 A^m - 2 A^{m-1} + 0.5 A^{m-2}) / δt`.
pub fn mesh_velocity_bdf2(a_m: &[Vec2], a_m1: &[Vec2], a_m2: &[Vec2], dt: f64) -> Result<Vec<Vec2>> {
    mesh_velocity(&[a_m, a_m1, a_m2], dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_and_linear_paths() {
        let x = vec![Vec2::new(0.3, 0.1), Vec2::new(-1.0, 2.0)];
        let w = mesh_velocity_bdf2(&x, &x, &x, 0.1).unwrap();
        assert!(w.iter().all(|v| v.norm() == 0.0));
        let c = Vec2::new(0.7, -0.2);
        let dt = 0.05;
        let at = |t: f64| x.iter().map(|p| p + c * t).collect::<Vec<_>>();
        let w = mesh_velocity_bdf2(&at(0.3), &at(0.25), &at(0.2), dt).unwrap();
        assert!(w.iter().all(|v| (v - c).norm() < 1e-12));
    }

    #[test]
    fn quadratic_path_is_exact_for_bdf2() {
        let x0 = [Vec2::new(0.0, 1.0)];
        let dt = 0.1;
        let at = |t: f64| vec![x0[0] + Vec2::new(t * t, 0.0)];
        let tm = 0.7;
        let w = mesh_velocity_bdf2(&at(tm), &at(tm - dt), &at(tm - 2.0 * dt), dt).unwrap();
        assert!((w[0] - Vec2::new(2.0 * tm, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatched_configurations_are_rejected() {
        let a = [Vec2::zeros(); 2];
        let b = [Vec2::zeros(); 3];
        assert!(matches!(mesh_velocity(&[&a, &b], 0.1), Err(Error::Topology(_))));
        assert!(matches!(mesh_velocity(&[&a], 0.1), Err(Error::Startup { .. })));
    }
}
