//! Momentum-row residual of a manufactured two-phase state.
//!
//! One smooth velocity for both phases, with density, viscosity and pressure
//! jumping across the boundary of the inner square `[1/4, 3/4]²`. The
//! velocity has no shear strain in the coordinate directions and no normal
//! component on the square's edges, so the interface is material and the
//! stress jump there is purely normal, as for a surface-tension load. The
//! equation is `ρ (u + (u·∇)u) - div σ = ρ f`: the zeroth-order term stands
//! in for the time derivative.
//!
//! The convective facet flux is upwinded in the tangential component only;
//! the normal-normal multiplier carries the rest, so its exact value is
//! `σnn - ρ (u·n)²` (the correction vanishes on the interface).
//!
//! Inserting the projected exact fields into the discrete momentum rows
//! (volume rows per element, tangential-trace rows per interior facet)
//! leaves a residual that should vanish at the rate of the projections.

use nalgebra::{DVector, Matrix2};

use crate::error::{Error, Result};
use crate::fem::field::{project_facet, project_pressure, project_velocity};
use crate::fem::{DofLayout, Space};
use crate::hdg::forms::LocalIndex;
use crate::hdg::{Assembler, Loads, Physics};
use crate::mesh::{unit_square, FacetLabel, LabelRules, Mesh2D, Subdomain, Vec2};

const A: f64 = 2.0 * std::f64::consts::PI;
const SHIFT: f64 = 0.25;
/// `[outer, inner]`.
pub const MU: [f64; 2] = [1.0, 0.1];
pub const RHO: [f64; 2] = [1.0, 10.0];

pub fn velocity(x: Vec2) -> Vec2 {
    let (a, b) = (A * (x.x - SHIFT), A * (x.y - SHIFT));
    Vec2::new(a.sin() * b.cos(), -a.cos() * b.sin())
}

fn grad_u(x: Vec2) -> Matrix2<f64> {
    let (a, b) = (A * (x.x - SHIFT), A * (x.y - SHIFT));
    let (sx, cx, sy, cy) = (a.sin(), a.cos(), b.sin(), b.cos());
    Matrix2::new(A * cx * cy, -A * sx * sy, A * sx * sy, -A * cx * cy)
}

pub fn pressure(x: Vec2, s: Subdomain) -> f64 {
    let pi = std::f64::consts::PI;
    let base = (pi * x.x).cos() * (pi * x.y).cos();
    match s {
        Subdomain::Outer => base,
        Subdomain::Inner => base + 2.0 + x.x * x.y,
    }
}

fn grad_p(x: Vec2, s: Subdomain) -> Vec2 {
    let pi = std::f64::consts::PI;
    let g = Vec2::new(-pi * (pi * x.x).sin() * (pi * x.y).cos(), -pi * (pi * x.x).cos() * (pi * x.y).sin());
    match s {
        Subdomain::Outer => g,
        Subdomain::Inner => g + Vec2::new(x.y, x.x),
    }
}

pub fn stress(x: Vec2, s: Subdomain) -> Matrix2<f64> {
    let g = grad_u(x);
    (g + g.transpose()) * MU[s.index()] - Matrix2::identity() * pressure(x, s)
}

/// `ρ (u + (u·∇)u) - div σ` in phase `s` (the velocity is divergence-free
/// and `Δu = -2A²u`).
pub fn body(x: Vec2, s: Subdomain) -> Vec2 {
    let u = velocity(x);
    (u + grad_u(x) * u) * RHO[s.index()] + u * (2.0 * A * A * MU[s.index()]) + grad_p(x, s)
}

pub fn inner_square(x: Vec2) -> bool {
    (0.25..=0.75).contains(&x.x) && (0.25..=0.75).contains(&x.y)
}

/// Structured unit square with `n` cells per side (`n` divisible by 4).
pub fn two_phase_square(n: usize) -> Result<Mesh2D> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::Parameter(format!("cells per side must be a positive multiple of 4, got {n}")));
    }
    let rules = LabelRules {
        boundary: Box::new(|_, _| FacetLabel::Dirichlet),
        subdomain: Box::new(|c| if inner_square(c) { Subdomain::Inner } else { Subdomain::Outer }),
    };
    unit_square(n, &rules)
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub h: f64,
    pub elements: usize,
    /// Euclidean norm of the element velocity rows.
    pub volume: f64,
    /// Euclidean norm of the assembled tangential-trace rows on interior facets.
    pub trace: f64,
    /// Same as `volume`, but with the interface traction omitted.
    pub volume_without_traction: f64,
    /// Velocity-row residual norm of each element.
    pub per_element: Vec<f64>,
}

impl ResidualReport {
    pub fn total(&self) -> f64 {
        self.volume.hypot(self.trace)
    }
}

/// Residual on [`two_phase_square`] with `n` cells per side.
pub fn two_phase_residual(k: usize, n: usize) -> Result<ResidualReport> {
    let mesh = two_phase_square(n)?;
    residual_on(&mesh, k, 1.0 / n as f64)
}

pub fn residual_on(mesh: &Mesh2D, k: usize, h: f64) -> Result<ResidualReport> {
    let space = Space::new(k);
    let layout = DofLayout::new(mesh, k);
    let physics = Physics::two_phase(RHO, MU);
    let asm = Assembler::new(&space, mesh, &layout, &physics);

    // on interface facets the outer phase supplies σ̂
    let side_of = |f: usize| -> Subdomain {
        let fc = &mesh.facets()[f];
        if fc.label == FacetLabel::Interface {
            Subdomain::Outer
        } else {
            mesh.element_label(fc.left)
        }
    };
    let u = project_velocity(&space, mesh, velocity);
    let p = {
        let mut p = vec![0.0; mesh.num_elements() * space.np];
        for s in [Subdomain::Outer, Subdomain::Inner] {
            let ps = project_pressure(&space, mesh, |x| pressure(x, s));
            for e in (0..mesh.num_elements()).filter(|&e| mesh.element_label(e) == s) {
                p[e * space.np..(e + 1) * space.np].copy_from_slice(&ps[e * space.np..(e + 1) * space.np]);
            }
        }
        p
    };
    let uhat = project_facet(&space, mesh, |f, x| velocity(x).dot(&mesh.facet_frame(f).tangent));
    let sigma = project_facet(&space, mesh, |f, x| {
        let n = mesh.facet_frame(f).normal;
        let s = side_of(f);
        (stress(x, s) * n).dot(&n) - RHO[s.index()] * velocity(x).dot(&n).powi(2)
    });

    // interface normals point out of the inner phase
    let traction = |f: usize, x: Vec2| -> Vec2 {
        (stress(x, Subdomain::Inner) - stress(x, Subdomain::Outer)) * mesh.facet_frame(f).normal
    };
    let body_fn = |x: Vec2, s: Subdomain| body(x, s);
    let inflow = |x: Vec2| velocity(x);

    let base = || Loads {
        mass_coeff: 1.0,
        explicit_u: Some(&u),
        body: Some(&body_fn),
        boundary_velocity: Some(&inflow),
        ..Default::default()
    };
    let with = Loads {
        interface_force: Some(&traction),
        ..base()
    };
    let without = base();

    let ix = LocalIndex::new(&space);
    let nf = space.nf;
    let mut trace_rows = vec![0.0; mesh.num_facets() * nf];
    let mut vol2 = 0.0;
    let mut vol2_without = 0.0;
    let mut per_element = Vec::with_capacity(mesh.num_elements());
    for e in 0..mesh.num_elements() {
        let mut x = DVector::zeros(ix.size());
        x.rows_mut(0, 2 * space.nu).copy_from_slice(&u[e * 2 * space.nu..(e + 1) * 2 * space.nu]);
        for i in 0..space.np {
            x[ix.p(i)] = p[e * space.np + i];
        }
        let facets = mesh.element_facets(e);
        for (lf, &f) in facets.iter().enumerate() {
            for m in 0..nf {
                x[ix.uhat(lf, m)] = uhat[f * nf + m];
                x[ix.sigma(lf, m)] = sigma[f * nf + m];
            }
        }
        let sys = asm.element_system(e, &with)?;
        let r = &sys.mat * &x - &sys.rhs;
        let re = r.rows(0, 2 * space.nu).norm_squared();
        per_element.push(re.sqrt());
        vol2 += re;
        for (lf, &f) in facets.iter().enumerate() {
            for m in 0..nf {
                trace_rows[f * nf + m] += r[ix.uhat(lf, m)];
            }
        }
        let sys = asm.element_system(e, &without)?;
        vol2_without += (&sys.mat * &x - &sys.rhs).rows(0, 2 * space.nu).norm_squared();
    }
    let trace2: f64 = mesh
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, fc)| fc.right.is_some())
        .map(|(f, _)| trace_rows[f * nf..(f + 1) * nf].iter().map(|v| v * v).sum::<f64>())
        .sum();
    Ok(ResidualReport {
        h,
        elements: mesh.num_elements(),
        volume: vol2.sqrt(),
        trace: trace2.sqrt(),
        volume_without_traction: vol2_without.sqrt(),
        per_element,
    })
}
