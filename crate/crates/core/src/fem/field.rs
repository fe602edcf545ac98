//! Evaluation and projection of discontinuous element fields.

use nalgebra::Matrix2;

use super::basis::AffineMap;
use super::space::{ElementGeometry, Space};
use crate::error::{Error, Result};
use crate::mesh::{Mesh2D, Vec2};

/// Value and physical gradient of a vector field at one point;
/// `grad[(a, b)] = d u_a / d x_b`.
#[derive(Clone, Copy, Debug)]
pub struct VectorSample {
    pub value: Vec2,
    pub grad: Matrix2<f64>,
}

fn checked_map(mesh: &Mesh2D, e: usize) -> Result<AffineMap> {
    let map = AffineMap::new(mesh.vertices(e));
    if map.det.abs() <= f64::EPSILON * mesh.diameter(e).powi(2) {
        return Err(Error::Geometry(format!("element {e} has a singular Jacobian")));
    }
    Ok(map)
}

/// Velocity of element `e` at a reference point.
pub fn eval_velocity(space: &Space, mesh: &Mesh2D, u: &[f64], e: usize, xi: Vec2) -> Result<VectorSample> {
    let map = checked_map(mesh, e)?;
    let nu = space.nu;
    let c = &u[e * 2 * nu..(e + 1) * 2 * nu];
    let v = space.basis_u.eval(xi);
    let g = space.basis_u.eval_grad(xi);
    let mut value = Vec2::zeros();
    let mut grad = Matrix2::zeros();
    for i in 0..nu {
        let gp = map.grad(g[i]);
        for a in 0..2 {
            let ci = c[a * nu + i];
            value[a] += ci * v[i];
            grad[(a, 0)] += ci * gp.x;
            grad[(a, 1)] += ci * gp.y;
        }
    }
    Ok(VectorSample { value, grad })
}

/// Pressure of element `e` at a reference point, with its physical gradient.
pub fn eval_pressure(space: &Space, mesh: &Mesh2D, p: &[f64], e: usize, xi: Vec2) -> Result<(f64, Vec2)> {
    let map = checked_map(mesh, e)?;
    let np = space.np;
    let c = &p[e * np..(e + 1) * np];
    let v = space.basis_p.eval(xi);
    let g = space.basis_p.eval_grad(xi);
    let mut val = 0.0;
    let mut grad = Vec2::zeros();
    for i in 0..np {
        val += c[i] * v[i];
        grad += c[i] * map.grad(g[i]);
    }
    Ok((val, grad))
}

/// Trace of an element velocity on one of its facets at the facet
/// quadrature points, split with respect to the element's outward normal.
#[derive(Clone, Debug)]
pub struct FacetTrace {
    pub points: Vec<Vec2>,
    pub values: Vec<Vec2>,
    pub normal: Vec<f64>,
    pub tangential: Vec<Vec2>,
    pub outward: Vec2,
}

pub fn facet_trace(space: &Space, mesh: &Mesh2D, u: &[f64], e: usize, f: usize) -> Result<FacetTrace> {
    let lf = mesh.local_facet(e, f)?;
    let tab = space.facet_tab_for(mesh, e, lf);
    let map = checked_map(mesh, e)?;
    let n = mesh.outward_normal(e, lf);
    let nu = space.nu;
    let c = &u[e * 2 * nu..(e + 1) * 2 * nu];
    let mut out = FacetTrace {
        points: Vec::new(),
        values: Vec::new(),
        normal: Vec::new(),
        tangential: Vec::new(),
        outward: n,
    };
    for q in 0..space.n_seg() {
        let mut w = Vec2::zeros();
        for i in 0..nu {
            let phi = tab.u_val[q * nu + i];
            w.x += c[i] * phi;
            w.y += c[nu + i] * phi;
        }
        let wn = w.dot(&n);
        out.points.push(map.map(tab.ref_points[q]));
        out.values.push(w);
        out.normal.push(wn);
        out.tangential.push(w - wn * n);
    }
    Ok(out)
}

/// Elementwise L2 projection of a vector function onto the velocity space.
pub fn project_velocity(space: &Space, mesh: &Mesh2D, f: impl Fn(Vec2) -> Vec2) -> Vec<f64> {
    let nu = space.nu;
    let mut out = vec![0.0; mesh.num_elements() * 2 * nu];
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(space, mesh, e);
        let inv_mass = 1.0 / (2.0 * geo.area);
        for (q, x) in geo.points.iter().enumerate() {
            let v = f(*x);
            for i in 0..nu {
                let w = geo.jxw[q] * space.vol.u_val[q * nu + i] * inv_mass;
                out[e * 2 * nu + i] += w * v.x;
                out[e * 2 * nu + nu + i] += w * v.y;
            }
        }
    }
    out
}

/// Elementwise L2 projection of a scalar function onto the pressure space.
pub fn project_pressure(space: &Space, mesh: &Mesh2D, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
    let np = space.np;
    let mut out = vec![0.0; mesh.num_elements() * np];
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(space, mesh, e);
        let inv_mass = 1.0 / (2.0 * geo.area);
        for (q, x) in geo.points.iter().enumerate() {
            let v = f(*x);
            for i in 0..np {
                out[e * np + i] += geo.jxw[q] * space.vol.p_val[q * np + i] * inv_mass * v;
            }
        }
    }
    out
}

/// Facet L2 projection of a scalar function, parameterised along the stored
/// facet direction. Nodal facet basis, so this solves a small mass system.
pub fn project_facet(space: &Space, mesh: &Mesh2D, f: impl Fn(usize, Vec2) -> f64) -> Vec<f64> {
    let nf = space.nf;
    let mut mass = nalgebra::DMatrix::<f64>::zeros(nf, nf);
    for q in 0..space.n_seg() {
        for i in 0..nf {
            for j in 0..nf {
                mass[(i, j)] += space.seg_weights[q] * space.fb_val[q * nf + i] * space.fb_val[q * nf + j];
            }
        }
    }
    let lu = mass.lu();
    let mut out = vec![0.0; mesh.num_facets() * nf];
    for (fi, facet) in mesh.facets().iter().enumerate() {
        let a = mesh.nodes()[facet.nodes[0]];
        let b = mesh.nodes()[facet.nodes[1]];
        let mut rhs = nalgebra::DVector::<f64>::zeros(nf);
        for q in 0..space.n_seg() {
            let v = f(fi, a + (b - a) * space.seg_points[q]);
            for i in 0..nf {
                rhs[i] += space.seg_weights[q] * space.fb_val[q * nf + i] * v;
            }
        }
        let c = lu.solve(&rhs).expect("facet mass matrix is SPD");
        out[fi * nf..(fi + 1) * nf].copy_from_slice(c.as_slice());
    }
    out
}

/// Nodal interpolation on facets: value at the equispaced facet nodes.
pub fn interpolate_facet(space: &Space, mesh: &Mesh2D, f: impl Fn(usize, Vec2) -> f64) -> Vec<f64> {
    let nf = space.nf;
    let mut out = vec![0.0; mesh.num_facets() * nf];
    for (fi, facet) in mesh.facets().iter().enumerate() {
        let a = mesh.nodes()[facet.nodes[0]];
        let b = mesh.nodes()[facet.nodes[1]];
        for (i, &s) in space.facet_basis.nodes().iter().enumerate() {
            out[fi * nf + i] = f(fi, a + (b - a) * s);
        }
    }
    out
}
