//! Element-local operators of the hybrid scheme.
//!
//! Each element produces one dense [`LocalSystem`] over
//! `[u (2 nu), p (np) | per local facet: û (nf), σ̂ (nf)]`. The stationary
//! part is symmetric:
//!
//! ```text
//! [ ρ c M + 2μ B    -Dᵀ ] [u, û]   [ f ]
//! [ -D               0  ] [p, σ̂] = [ g ]
//! ```
//!
//! Implicit convection adds a non-symmetric block to the `(u, û)` rows.

use nalgebra::{DMatrix, DVector};

use super::Physics;
use crate::error::{Error, Result};
use crate::fem::{DofLayout, ElementGeometry, Space};
use crate::mesh::{FacetLabel, Mesh2D, Subdomain, Vec2};

/// Index map of one element's local system.
#[derive(Clone, Copy, Debug)]
pub struct LocalIndex {
    pub nu: usize,
    pub np: usize,
    pub nf: usize,
}

impl LocalIndex {
    pub fn new(space: &Space) -> Self {
        LocalIndex {
            nu: space.nu,
            np: space.np,
            nf: space.nf,
        }
    }

    pub fn u(&self, a: usize, i: usize) -> usize {
        a * self.nu + i
    }

    pub fn p(&self, i: usize) -> usize {
        2 * self.nu + i
    }

    pub fn uhat(&self, lf: usize, i: usize) -> usize {
        self.n_local() + lf * 2 * self.nf + i
    }

    pub fn sigma(&self, lf: usize, i: usize) -> usize {
        self.n_local() + lf * 2 * self.nf + self.nf + i
    }

    pub fn n_local(&self) -> usize {
        2 * self.nu + self.np
    }

    pub fn n_facet(&self) -> usize {
        6 * self.nf
    }

    pub fn size(&self) -> usize {
        self.n_local() + self.n_facet()
    }
}

#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub element: usize,
    pub mat: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// Per-step data entering the element systems. Every field is optional so
/// the same assembler serves Stokes, implicit and IMEX steps.
#[derive(Default)]
pub struct Loads<'a> {
    /// Leading time-derivative coefficient `a0 / δt` multiplying `ρ M`.
    pub mass_coeff: f64,
    /// `(a_j / δt, u^{m-j})`: contributes `-ρ a_j/δt M u^{m-j}` to the right-hand side.
    pub history: Vec<(f64, &'a [f64])>,
    /// Nodal mesh velocity, interpolated linearly.
    pub omega: Option<&'a [Vec2]>,
    /// Extrapolated velocity for the explicit convection load.
    pub explicit_u: Option<&'a [f64]>,
    /// Frozen transport velocity for the implicit (Picard) convection block.
    pub picard_u: Option<&'a [f64]>,
    /// Force density `ρ f` by position and subdomain.
    pub body: Option<&'a dyn Fn(Vec2, Subdomain) -> Vec2>,
    /// Boundary velocity `g` (normal part used on Dirichlet and free-slip facets,
    /// full trace used as upwind inflow data on Dirichlet facets).
    pub boundary_velocity: Option<&'a dyn Fn(Vec2) -> Vec2>,
    /// Traction on interface facets, tested against the inner-side velocity.
    pub interface_force: Option<&'a dyn Fn(usize, Vec2) -> Vec2>,
}

/// Geometry of one local facet as seen from an element.
struct FacetView {
    f: usize,
    n: Vec2,
    t: Vec2,
    length: f64,
    side: usize,
}

fn facet_views(mesh: &Mesh2D, e: usize) -> [FacetView; 3] {
    std::array::from_fn(|lf| {
        let f = mesh.element_facets(e)[lf];
        let fr = mesh.facet_frame(f);
        let left = mesh.facets()[f].left == e;
        FacetView {
            f,
            n: if left { fr.normal } else { -fr.normal },
            t: fr.tangent,
            length: fr.length,
            side: if left { 0 } else { 1 },
        }
    })
}

/// Linear interpolant of nodal values at reference point `xi`.
fn p1_at(mesh: &Mesh2D, e: usize, nodal: &[Vec2], xi: Vec2) -> Vec2 {
    let t = mesh.triangles()[e];
    nodal[t[0]] * (1.0 - xi.x - xi.y) + nodal[t[1]] * xi.x + nodal[t[2]] * xi.y
}

/// Divergence of the linear interpolant (constant per element).
fn p1_div(mesh: &Mesh2D, e: usize, nodal: &[Vec2], geo: &ElementGeometry) -> f64 {
    let t = mesh.triangles()[e];
    let g1 = geo.map.grad(Vec2::new(1.0, 0.0));
    let g2 = geo.map.grad(Vec2::new(0.0, 1.0));
    let g0 = -g1 - g2;
    nodal[t[0]].dot(&g0) + nodal[t[1]].dot(&g1) + nodal[t[2]].dot(&g2)
}

/// Velocity (value, divergence) of element coefficients at volume point `q`.
fn vel_vol(space: &Space, geo: &ElementGeometry, c: &[f64], q: usize) -> (Vec2, f64) {
    let nu = space.nu;
    let mut v = Vec2::zeros();
    let mut div = 0.0;
    for i in 0..nu {
        let phi = space.vol.u_val[q * nu + i];
        let g = geo.grad[q * nu + i];
        v.x += c[i] * phi;
        v.y += c[nu + i] * phi;
        div += c[i] * g.x + c[nu + i] * g.y;
    }
    (v, div)
}

fn vel_facet(space: &Space, tab_val: &[f64], c: &[f64], q: usize) -> Vec2 {
    let nu = space.nu;
    let mut v = Vec2::zeros();
    for i in 0..nu {
        let phi = tab_val[q * nu + i];
        v.x += c[i] * phi;
        v.y += c[nu + i] * phi;
    }
    v
}

pub struct Assembler<'a> {
    pub space: &'a Space,
    pub mesh: &'a Mesh2D,
    pub layout: &'a DofLayout,
    pub physics: &'a Physics,
}

impl<'a> Assembler<'a> {
    pub fn new(space: &'a Space, mesh: &'a Mesh2D, layout: &'a DofLayout, physics: &'a Physics) -> Self {
        Assembler {
            space,
            mesh,
            layout,
            physics,
        }
    }

    fn element_u<'b>(&self, u: &'b [f64], e: usize) -> &'b [f64] {
        let n = 2 * self.space.nu;
        &u[e * n..(e + 1) * n]
    }

    /// Adds `2μ B_h` restricted to element `e`.
    pub fn add_viscous(&self, e: usize, geo: &ElementGeometry, two_mu: f64, mat: &mut DMatrix<f64>) -> Result<()> {
        let alpha = self.physics.alpha;
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!("penalty constant must be positive, got {alpha}")));
        }
        let sp = self.space;
        let ix = LocalIndex::new(sp);
        let (nu, nf) = (sp.nu, sp.nf);

        for q in 0..sp.vol.len() {
            let w = two_mu * geo.jxw[q];
            for j in 0..nu {
                let gj = geo.grad[q * nu + j];
                for i in 0..nu {
                    let gi = geo.grad[q * nu + i];
                    let gg = gi.dot(&gj);
                    for b in 0..2 {
                        for a in 0..2 {
                            let delta = if a == b { gg } else { 0.0 };
                            mat[(ix.u(b, j), ix.u(a, i))] += 0.5 * w * (delta + gi[b] * gj[a]);
                        }
                    }
                }
            }
        }

        let gamma = alpha * ((sp.k + 1) as f64).powi(2) / geo.diameter;
        let views = facet_views(self.mesh, e);
        let mut dnt = vec![[0.0f64; 2]; nu];
        let mut phit = vec![[0.0f64; 2]; nu];
        for (lf, fv) in views.iter().enumerate() {
            let tab = &sp.facet_tab[lf][fv.side];
            let grads = geo.facet_grads(tab);
            for q in 0..sp.n_seg() {
                let w = two_mu * sp.seg_weights[q] * fv.length;
                for i in 0..nu {
                    let g = grads[q * nu + i];
                    let phi = tab.u_val[q * nu + i];
                    let gn = g.dot(&fv.n);
                    let gt = g.dot(&fv.t);
                    for a in 0..2 {
                        dnt[i][a] = 0.5 * (fv.t[a] * gn + gt * fv.n[a]);
                        phit[i][a] = phi * fv.t[a];
                    }
                }
                let psi = &sp.fb_val[q * nf..(q + 1) * nf];
                for j in 0..nu {
                    for b in 0..2 {
                        let row = ix.u(b, j);
                        for i in 0..nu {
                            for a in 0..2 {
                                let col = ix.u(a, i);
                                mat[(row, col)] += w
                                    * (-dnt[i][a] * phit[j][b] - dnt[j][b] * phit[i][a] + gamma * phit[i][a] * phit[j][b]);
                            }
                        }
                        for (m, &ps) in psi.iter().enumerate() {
                            let col = ix.uhat(lf, m);
                            let val = w * (dnt[j][b] * ps - gamma * phit[j][b] * ps);
                            mat[(row, col)] += val;
                            mat[(col, row)] += val;
                        }
                    }
                }
                for (m, &pm) in psi.iter().enumerate() {
                    for (l, &pl) in psi.iter().enumerate() {
                        mat[(ix.uhat(lf, m), ix.uhat(lf, l))] += w * gamma * pm * pl;
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `-D_h` in both the momentum and the constraint rows.
    pub fn add_divergence(&self, e: usize, geo: &ElementGeometry, mat: &mut DMatrix<f64>) {
        let sp = self.space;
        let ix = LocalIndex::new(sp);
        let (nu, np, nf) = (sp.nu, sp.np, sp.nf);
        for q in 0..sp.vol.len() {
            let w = geo.jxw[q];
            for j in 0..nu {
                let g = geo.grad[q * nu + j];
                for i in 0..np {
                    let chi = sp.vol.p_val[q * np + i];
                    for b in 0..2 {
                        let val = -w * g[b] * chi;
                        mat[(ix.u(b, j), ix.p(i))] += val;
                        mat[(ix.p(i), ix.u(b, j))] += val;
                    }
                }
            }
        }
        for (lf, fv) in facet_views(self.mesh, e).iter().enumerate() {
            let tab = &sp.facet_tab[lf][fv.side];
            for q in 0..sp.n_seg() {
                let w = sp.seg_weights[q] * fv.length;
                for j in 0..nu {
                    let phi = tab.u_val[q * nu + j];
                    for m in 0..nf {
                        let ps = sp.fb_val[q * nf + m];
                        for b in 0..2 {
                            let val = -w * phi * fv.n[b] * ps;
                            mat[(ix.u(b, j), ix.sigma(lf, m))] += val;
                            mat[(ix.sigma(lf, m), ix.u(b, j))] += val;
                        }
                    }
                }
            }
        }
    }

    /// Adds `coeff · M` (the basis is orthonormal, so `M = 2|T| I`).
    pub fn add_mass(&self, geo: &ElementGeometry, coeff: f64, mat: &mut DMatrix<f64>) {
        for r in 0..2 * self.space.nu {
            mat[(r, r)] += coeff * 2.0 * geo.area;
        }
    }

    /// Adds `ρ C_h` linearised around the frozen transport field
    /// `β = u_frozen - ω` (Picard).
    pub fn add_convection_implicit(
        &self,
        e: usize,
        geo: &ElementGeometry,
        rho: f64,
        u_frozen: &[f64],
        omega: Option<&[Vec2]>,
        mat: &mut DMatrix<f64>,
    ) {
        let sp = self.space;
        let ix = LocalIndex::new(sp);
        let (nu, nf) = (sp.nu, sp.nf);
        let c = self.element_u(u_frozen, e);
        let div_om = omega.map_or(0.0, |om| p1_div(self.mesh, e, om, geo));
        for q in 0..sp.vol.len() {
            let (u, divu) = vel_vol(sp, geo, c, q);
            let om = omega.map_or(Vec2::zeros(), |o| p1_at(self.mesh, e, o, sp.vol.points[q]));
            let beta = u - om;
            let divb = divu - div_om;
            let w = rho * geo.jxw[q];
            for j in 0..nu {
                let pj = sp.vol.u_val[q * nu + j];
                let bgj = beta.dot(&geo.grad[q * nu + j]);
                for i in 0..nu {
                    let pi = sp.vol.u_val[q * nu + i];
                    let val = -w * (divb * pi * pj + pi * bgj);
                    for a in 0..2 {
                        mat[(ix.u(a, j), ix.u(a, i))] += val;
                    }
                }
            }
        }
        for (lf, fv) in facet_views(self.mesh, e).iter().enumerate() {
            let tab = &sp.facet_tab[lf][fv.side];
            for q in 0..sp.n_seg() {
                let u = vel_facet(sp, &tab.u_val, c, q);
                let om = omega.map_or(Vec2::zeros(), |o| p1_at(self.mesh, e, o, tab.ref_points[q]));
                let bn = (u - om).dot(&fv.n);
                let w = rho * sp.seg_weights[q] * fv.length * bn;
                let psi = &sp.fb_val[q * nf..(q + 1) * nf];
                if bn >= 0.0 {
                    for i in 0..nu {
                        let pi = tab.u_val[q * nu + i];
                        for a in 0..2 {
                            let col = ix.u(a, i);
                            let ut = pi * fv.t[a];
                            for j in 0..nu {
                                let pj = tab.u_val[q * nu + j];
                                for b in 0..2 {
                                    mat[(ix.u(b, j), col)] += w * ut * pj * fv.t[b];
                                }
                            }
                            for (m, &ps) in psi.iter().enumerate() {
                                mat[(ix.uhat(lf, m), col)] -= w * ut * ps;
                            }
                        }
                    }
                } else {
                    for (l, &pl) in psi.iter().enumerate() {
                        let col = ix.uhat(lf, l);
                        for j in 0..nu {
                            let pj = tab.u_val[q * nu + j];
                            for b in 0..2 {
                                mat[(ix.u(b, j), col)] += w * pl * pj * fv.t[b];
                            }
                        }
                        for (m, &pm) in psi.iter().enumerate() {
                            mat[(ix.uhat(lf, m), col)] -= w * pl * pm;
                        }
                    }
                }
            }
        }
    }

    /// Adds `-ρ C_h^dg(ω, ũ, v)` to the velocity rows of `rhs`.
    pub fn add_convection_explicit(
        &self,
        e: usize,
        geo: &ElementGeometry,
        rho: f64,
        u_ext: &[f64],
        omega: Option<&[Vec2]>,
        boundary_velocity: Option<&dyn Fn(Vec2) -> Vec2>,
        rhs: &mut DVector<f64>,
    ) {
        let sp = self.space;
        let ix = LocalIndex::new(sp);
        let nu = sp.nu;
        let c = self.element_u(u_ext, e);
        let div_om = omega.map_or(0.0, |om| p1_div(self.mesh, e, om, geo));
        for q in 0..sp.vol.len() {
            let (u, divu) = vel_vol(sp, geo, c, q);
            let om = omega.map_or(Vec2::zeros(), |o| p1_at(self.mesh, e, o, sp.vol.points[q]));
            let w_rel = u - om;
            let divw = divu - div_om;
            let w = rho * geo.jxw[q];
            for j in 0..nu {
                let pj = sp.vol.u_val[q * nu + j];
                let wg = w_rel.dot(&geo.grad[q * nu + j]);
                for b in 0..2 {
                    // minus sign of the load times minus sign of the form
                    rhs[ix.u(b, j)] += w * u[b] * (divw * pj + wg);
                }
            }
        }
        let mesh = self.mesh;
        for (lf, fv) in facet_views(mesh, e).iter().enumerate() {
            let tab = &sp.facet_tab[lf][fv.side];
            let facet = &mesh.facets()[fv.f];
            let neighbour = if facet.left == e { facet.right } else { Some(facet.left) };
            for q in 0..sp.n_seg() {
                let u_own = vel_facet(sp, &tab.u_val, c, q);
                let om = omega.map_or(Vec2::zeros(), |o| p1_at(mesh, e, o, tab.ref_points[q]));
                let wn = (u_own - om).dot(&fv.n);
                let upwind = if wn >= 0.0 {
                    u_own
                } else if let Some(nb) = neighbour {
                    let nlf = mesh.local_facet(nb, fv.f).expect("neighbour shares the facet");
                    let ntab = sp.facet_tab_for(mesh, nb, nlf);
                    vel_facet(sp, &ntab.u_val, self.element_u(u_ext, nb), q)
                } else if facet.label == FacetLabel::Dirichlet {
                    let x = geo.map.map(tab.ref_points[q]);
                    boundary_velocity.map_or(Vec2::zeros(), |g| g(x))
                } else {
                    u_own
                };
                let ut = upwind.dot(&fv.t);
                let w = rho * sp.seg_weights[q] * fv.length * wn * ut;
                for j in 0..nu {
                    let pj = tab.u_val[q * nu + j];
                    for b in 0..2 {
                        rhs[ix.u(b, j)] -= w * pj * fv.t[b];
                    }
                }
            }
        }
    }

    /// Builds the full local system of element `e`.
    pub fn element_system(&self, e: usize, loads: &Loads) -> Result<LocalSystem> {
        let sp = self.space;
        let ix = LocalIndex::new(sp);
        let geo = ElementGeometry::new(sp, self.mesh, e);
        if !(geo.area > 0.0) {
            return Err(Error::MeshTangling {
                element: e,
                area: geo.area,
            });
        }
        let sub = self.mesh.element_label(e);
        let rho = self.physics.rho(sub);
        let mu = self.physics.mu(sub);
        let n = ix.size();
        let mut mat = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);

        self.add_viscous(e, &geo, 2.0 * mu, &mut mat)?;
        self.add_divergence(e, &geo, &mut mat);
        if loads.mass_coeff != 0.0 {
            self.add_mass(&geo, rho * loads.mass_coeff, &mut mat);
        }
        for (coef, u_old) in &loads.history {
            let c = self.element_u(u_old, e);
            for r in 0..2 * sp.nu {
                rhs[r] -= rho * coef * 2.0 * geo.area * c[r];
            }
        }
        if let Some(u) = loads.picard_u {
            self.add_convection_implicit(e, &geo, rho, u, loads.omega, &mut mat);
        }
        if let Some(u) = loads.explicit_u {
            self.add_convection_explicit(e, &geo, rho, u, loads.omega, loads.boundary_velocity, &mut rhs);
        }
        if let Some(f) = loads.body {
            let nu = sp.nu;
            for q in 0..sp.vol.len() {
                let fx = f(geo.points[q], sub) * geo.jxw[q];
                for j in 0..nu {
                    let pj = sp.vol.u_val[q * nu + j];
                    rhs[ix.u(0, j)] += fx.x * pj;
                    rhs[ix.u(1, j)] += fx.y * pj;
                }
            }
        }
        let views = facet_views(self.mesh, e);
        for (lf, fv) in views.iter().enumerate() {
            let facet = &self.mesh.facets()[fv.f];
            let tab = &sp.facet_tab[lf][fv.side];
            match facet.label {
                FacetLabel::Dirichlet | FacetLabel::FreeSlip => {
                    if let Some(g) = loads.boundary_velocity {
                        for q in 0..sp.n_seg() {
                            let x = geo.map.map(tab.ref_points[q]);
                            let gn = g(x).dot(&fv.n);
                            let w = sp.seg_weights[q] * fv.length;
                            for m in 0..sp.nf {
                                rhs[ix.sigma(lf, m)] -= w * gn * sp.fb_val[q * sp.nf + m];
                            }
                        }
                    }
                }
                FacetLabel::Interface => {
                    let r = facet.right.expect("interface facets are interior");
                    if self.mesh.element_label(facet.left) == self.mesh.element_label(r) {
                        return Err(Error::Labeling(format!(
                            "interface facet {} has both neighbours in the same subdomain",
                            fv.f
                        )));
                    }
                    if facet.left == e {
                        if let Some(force) = loads.interface_force {
                            for q in 0..sp.n_seg() {
                                let x = geo.map.map(tab.ref_points[q]);
                                let t = force(fv.f, x) * (sp.seg_weights[q] * fv.length);
                                for j in 0..sp.nu {
                                    let pj = tab.u_val[q * sp.nu + j];
                                    rhs[ix.u(0, j)] += t.x * pj;
                                    rhs[ix.u(1, j)] += t.y * pj;
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(LocalSystem { element: e, mat, rhs })
    }

    /// Element systems for the whole mesh.
    pub fn all_systems(&self, loads: &Loads) -> Result<Vec<LocalSystem>> {
        (0..self.mesh.num_elements()).map(|e| self.element_system(e, loads)).collect()
    }

    /// `∫_T q` for every pressure basis function of element `e`.
    pub fn pressure_moments(&self, e: usize) -> Vec<f64> {
        let sp = self.space;
        let geo = ElementGeometry::new(sp, self.mesh, e);
        let mut out = vec![0.0; sp.np];
        for q in 0..sp.vol.len() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += geo.jxw[q] * sp.vol.p_val[q * sp.np + i];
            }
        }
        out
    }

    /// Masked facet values: nodal interpolation of `g · t` on Dirichlet facets
    /// for the tangential velocity, zero elsewhere (including the
    /// normal-normal stress on traction-free facets).
    pub fn dirichlet_values(&self, g: Option<&dyn Fn(Vec2) -> Vec2>) -> Vec<f64> {
        let sp = self.space;
        let mesh = self.mesh;
        let nf = sp.nf;
        let mut out = vec![0.0; mesh.num_facets() * nf];
        let Some(g) = g else { return out };
        for (f, facet) in mesh.facets().iter().enumerate() {
            if facet.label != FacetLabel::Dirichlet {
                continue;
            }
            let a = mesh.nodes()[facet.nodes[0]];
            let b = mesh.nodes()[facet.nodes[1]];
            let t = mesh.facet_frame(f).tangent;
            for (i, &s) in sp.facet_basis.nodes().iter().enumerate() {
                out[f * nf + i] = g(a + (b - a) * s).dot(&t);
            }
        }
        out
    }

    /// `Σ_F ∫_F force · v⁻` for a velocity field `v` given as element
    /// coefficients, with `v⁻` the trace from the inner subdomain.
    pub fn interface_load_pairing(&self, force: &dyn Fn(usize, Vec2) -> Vec2, v: &[f64]) -> Result<f64> {
        let load = self.interface_load(force)?;
        Ok(load.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// Global velocity-space load vector of an interface traction.
    pub fn interface_load(&self, force: &dyn Fn(usize, Vec2) -> Vec2) -> Result<Vec<f64>> {
        let sp = self.space;
        let mesh = self.mesh;
        let nu = sp.nu;
        let mut out = vec![0.0; mesh.num_elements() * 2 * nu];
        for f in mesh.facets_with_label(FacetLabel::Interface) {
            let facet = &mesh.facets()[f];
            let r = facet.right.expect("interface facets are interior");
            if mesh.element_label(facet.left) == mesh.element_label(r) {
                return Err(Error::Labeling(format!(
                    "interface facet {f} has both neighbours in the same subdomain"
                )));
            }
            let e = facet.left;
            let tab = &sp.facet_tab[facet.left_local][0];
            let fr = mesh.facet_frame(f);
            let a = mesh.nodes()[facet.nodes[0]];
            let b = mesh.nodes()[facet.nodes[1]];
            for q in 0..sp.n_seg() {
                let x = a + (b - a) * sp.seg_points[q];
                let t = force(f, x) * (sp.seg_weights[q] * fr.length);
                for j in 0..nu {
                    let pj = tab.u_val[q * nu + j];
                    out[e * 2 * nu + j] += t.x * pj;
                    out[e * 2 * nu + nu + j] += t.y * pj;
                }
            }
        }
        Ok(out)
    }
}
