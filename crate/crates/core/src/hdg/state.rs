//! Discrete flow state and its diagnostics.

use crate::fem::{DofLayout, ElementGeometry, Space};
use crate::mesh::Mesh2D;

use super::Physics;

/// Coefficients of `(u_h, p_h, û_h, σ̂_h)`. The facet vectors cover every
/// facet, masked ones included (they hold boundary data).
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub uhat: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Mesh configuration the state was computed on.
    pub config_id: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct DivergenceReport {
    /// Largest elementwise L2 norm of `div u_h`.
    pub max_div: f64,
    /// Largest facet L2 norm of the normal jump across interior facets.
    pub max_jump: f64,
    /// Global L2 norm of `u_h`.
    pub u_norm: f64,
}

impl DivergenceReport {
    /// Both residuals below `tol · ‖u_h‖` (with an absolute floor for `u_h = 0`).
    pub fn passes(&self, tol: f64) -> bool {
        let scale = self.u_norm.max(1e-300);
        self.max_div <= tol * scale && self.max_jump <= tol * scale
    }
}

impl FlowState {
    pub fn zeros(layout: &DofLayout, config_id: u64) -> Self {
        FlowState {
            u: vec![0.0; layout.dim_v()],
            p: vec![0.0; layout.dim_q()],
            uhat: vec![0.0; layout.dim_facet()],
            sigma: vec![0.0; layout.dim_facet()],
            config_id,
        }
    }

    /// `‖u_h‖_{L2}` on the given mesh (orthonormal basis: `2|T| |c|²`).
    pub fn velocity_l2(&self, space: &Space, mesh: &Mesh2D) -> f64 {
        let n = 2 * space.nu;
        (0..mesh.num_elements())
            .map(|e| 2.0 * mesh.area(e) * self.u[e * n..(e + 1) * n].iter().map(|c| c * c).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// `½ Σ_T ρ_T ‖u_h‖²_T`.
    pub fn kinetic_energy(&self, space: &Space, mesh: &Mesh2D, physics: &Physics) -> f64 {
        let n = 2 * space.nu;
        0.5 * (0..mesh.num_elements())
            .map(|e| {
                physics.rho(mesh.element_label(e))
                    * 2.0
                    * mesh.area(e)
                    * self.u[e * n..(e + 1) * n].iter().map(|c| c * c).sum::<f64>()
            })
            .sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.p).chain(&self.uhat).chain(&self.sigma).all(|x| x.is_finite())
    }

    pub fn divergence_report(&self, space: &Space, mesh: &Mesh2D) -> DivergenceReport {
        let nu = space.nu;
        let mut max_div: f64 = 0.0;
        for e in 0..mesh.num_elements() {
            let geo = ElementGeometry::new(space, mesh, e);
            let c = &self.u[e * 2 * nu..(e + 1) * 2 * nu];
            let mut s = 0.0;
            for q in 0..space.vol.len() {
                let mut d = 0.0;
                for i in 0..nu {
                    let g = geo.grad[q * nu + i];
                    d += c[i] * g.x + c[nu + i] * g.y;
                }
                s += geo.jxw[q] * d * d;
            }
            max_div = max_div.max(s.sqrt());
        }
        let mut max_jump: f64 = 0.0;
        for (f, facet) in mesh.facets().iter().enumerate() {
            let Some(r) = facet.right else { continue };
            let fr = mesh.facet_frame(f);
            let tl = &space.facet_tab[facet.left_local][0];
            let tr = &space.facet_tab[facet.right_local.unwrap()][1];
            let cl = &self.u[facet.left * 2 * nu..(facet.left + 1) * 2 * nu];
            let cr = &self.u[r * 2 * nu..(r + 1) * 2 * nu];
            let mut s = 0.0;
            for q in 0..space.n_seg() {
                let mut jump = 0.0;
                for i in 0..nu {
                    let (pl, pr) = (tl.u_val[q * nu + i], tr.u_val[q * nu + i]);
                    jump += (cl[i] * pl - cr[i] * pr) * fr.normal.x + (cl[nu + i] * pl - cr[nu + i] * pr) * fr.normal.y;
                }
                s += space.seg_weights[q] * fr.length * jump * jump;
            }
            max_jump = max_jump.max(s.sqrt());
        }
        DivergenceReport {
            max_div,
            max_jump,
            u_norm: self.velocity_l2(space, mesh),
        }
    }

    /// Linear combination `Σ c_j s_j` of velocity coefficient vectors.
    pub fn combine_u(states: &[&FlowState], coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; states[0].u.len()];
        for (s, c) in states.iter().zip(coeffs) {
            for (o, v) in out.iter_mut().zip(&s.u) {
                *o += c * v;
            }
        }
        out
    }
}
