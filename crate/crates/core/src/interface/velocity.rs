//! Interface velocity for the explicit interface update: the normal
//! projection of the extrapolated fluid velocity, or the coupled
//! velocity/curvature system that also redistributes nodes tangentially.
//!
//! The coupled system uses linear elements on the chain with vertex-lumped
//! normal pairings `⟨ω·n, φ_i⟩ ≈ ω_i · ν_i`, `ν_i = ½ Σ_F |F| n_F`.

use nalgebra::{DMatrix, DVector};

use super::{find_self_intersection, InterfaceChain, Segment};
use crate::error::{Error, Result};
use crate::fem::quadrature::segment_rule;
use crate::fem::{eval_velocity, AffineMap, Space};
use crate::mesh::{Mesh2D, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityVariant {
    Plain,
    Equidistributing,
}

impl VelocityVariant {
    pub fn name(self) -> &'static str {
        match self {
            VelocityVariant::Plain => "plain",
            VelocityVariant::Equidistributing => "equidistributing",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(VelocityVariant::Plain),
            "equidistributing" | "eq" => Some(VelocityVariant::Equidistributing),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InterfaceVelocity {
    /// Nodal velocity per chain node.
    pub omega: Vec<Vec2>,
    /// Scalar curvature per chain node (coupled variant only).
    pub kappa: Option<Vec<f64>>,
}

/// Inner-side trace of the velocity field at a point of segment `seg`.
pub fn inner_trace(space: &Space, mesh: &Mesh2D, u: &[f64], chain: &InterfaceChain, seg: usize, x: Vec2) -> Result<Vec2> {
    let e = chain.inner[seg];
    let xi = AffineMap::new(mesh.vertices(e)).inverse(x);
    Ok(eval_velocity(space, mesh, u, e, xi)?.value)
}

/// Length-weighted nodal normals of a closed polygon.
pub fn nodal_normals(x: &[Vec2]) -> Vec<Vec2> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let prev = Segment::new(x[(i + n - 1) % n], x[i]);
            let next = Segment::new(x[i], x[(i + 1) % n]);
            (prev.normal * prev.length + next.normal * next.length).normalize()
        })
        .collect()
}

/// `ω_i = (u_i · n_i) n_i` with `u_i` the average of the inner traces of the
/// two segments meeting at node `i`.
pub fn plain_velocity(space: &Space, mesh: &Mesh2D, u_bar: &[f64], chain: &InterfaceChain) -> Result<Vec<Vec2>> {
    let x = chain.positions(mesh.nodes());
    let n = x.len();
    let u_nodes: Vec<Vec2> = (0..n)
        .map(|i| {
            let prev = (i + n - 1) % n;
            Ok((inner_trace(space, mesh, u_bar, chain, prev, x[i])? + inner_trace(space, mesh, u_bar, chain, i, x[i])?) * 0.5)
        })
        .collect::<Result<_>>()?;
    Ok(normal_projection(&x, &u_nodes))
}

/// `(u_i · n_i) n_i` with length-weighted nodal normals.
pub fn normal_projection(x: &[Vec2], u_nodes: &[Vec2]) -> Vec<Vec2> {
    nodal_normals(x).iter().zip(u_nodes).map(|(n, u)| n * u.dot(n)).collect()
}

/// `b_i = ∫_Γ (u · n) φ_i` for the linear hat functions of the chain.
pub fn normal_flux_moments(space: &Space, mesh: &Mesh2D, u_bar: &[f64], chain: &InterfaceChain) -> Result<Vec<f64>> {
    let x = chain.positions(mesh.nodes());
    let n = x.len();
    let rule = segment_rule(space.k + 1);
    let mut b = vec![0.0; n];
    for seg in 0..n {
        let s = Segment::new(x[seg], x[(seg + 1) % n]);
        for (q, &t) in rule.points.iter().enumerate() {
            let p = s.a + (s.b - s.a) * t;
            let un = inner_trace(space, mesh, u_bar, chain, seg, p)?.dot(&s.normal) * rule.weights[q] * s.length;
            b[seg] += un * (1.0 - t);
            b[(seg + 1) % n] += un * t;
        }
    }
    Ok(b)
}

/// Solves the coupled system on a closed polygon for given normal-flux
/// moments `b`:
///
/// ```text
/// ν_i · ω_i                      = b_i
/// κ_i ν_i - δt (A ω)_i           = (A x)_i
/// ```
///
/// with `A` the linear stiffness matrix of the chain.
pub fn equidistributing_system(x: &[Vec2], b: &[f64], dt: f64) -> Result<InterfaceVelocity> {
    let n = x.len();
    if n < 3 || b.len() != n {
        return Err(Error::Parameter("coupled interface system needs a closed chain and one moment per node".into()));
    }
    let mut nu = vec![Vec2::zeros(); n];
    let mut m = DMatrix::<f64>::zeros(3 * n, 3 * n);
    let mut rhs = DVector::<f64>::zeros(3 * n);
    for seg in 0..n {
        let (i, j) = (seg, (seg + 1) % n);
        let s = Segment::new(x[i], x[j]);
        if !(s.length > 0.0) {
            return Err(Error::Geometry(format!("interface segment {seg} has zero length")));
        }
        nu[i] += s.normal * (0.5 * s.length);
        nu[j] += s.normal * (0.5 * s.length);
        let k = 1.0 / s.length;
        for c in 0..2 {
            let (ri, rj) = (c * n + i, c * n + j);
            m[(ri, ri)] -= dt * k;
            m[(rj, rj)] -= dt * k;
            m[(ri, rj)] += dt * k;
            m[(rj, ri)] += dt * k;
            let dx = (x[j][c] - x[i][c]) * k;
            rhs[ri] -= dx;
            rhs[rj] += dx;
        }
    }
    for i in 0..n {
        for c in 0..2 {
            m[(c * n + i, 2 * n + i)] = nu[i][c];
            m[(2 * n + i, c * n + i)] = nu[i][c];
        }
        rhs[2 * n + i] = b[i];
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Geometry("coupled interface system is singular".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::Geometry("coupled interface system is singular".into()));
    }
    Ok(InterfaceVelocity {
        omega: (0..n).map(|i| Vec2::new(sol[i], sol[n + i])).collect(),
        kappa: Some((0..n).map(|i| sol[2 * n + i]).collect()),
    })
}

/// Coupled velocity for the extrapolated fluid velocity `u_bar`.
pub fn equidistributing_velocity(space: &Space, mesh: &Mesh2D, u_bar: &[f64], chain: &InterfaceChain, dt: f64) -> Result<InterfaceVelocity> {
    let b = normal_flux_moments(space, mesh, u_bar, chain)?;
    equidistributing_system(&chain.positions(mesh.nodes()), &b, dt)
}

/// `x + δt ω`, rejecting self-intersecting results.
pub fn extrapolate_interface(x: &[Vec2], omega: &[Vec2], dt: f64) -> Result<Vec<Vec2>> {
    if omega.len() != x.len() {
        return Err(Error::Parameter("one interface velocity per node expected".into()));
    }
    let moved: Vec<Vec2> = x.iter().zip(omega).map(|(p, w)| p + w * dt).collect();
    if let Some((first, second)) = find_self_intersection(&moved) {
        return Err(Error::SelfIntersection { first, second });
    }
    Ok(moved)
}
