//! Weak Laplace-Beltrami curvature: find `κ` in the continuous degree-`d`
//! space on the polygon with `(κ, ψ) = (∇_Γ x, ∇_Γ ψ)` for all `ψ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::quadrature::segment_rule;
use crate::mesh::Vec2;

/// Equispaced Lagrange basis of degree `d` on `[0, 1]`: values and derivatives.
fn lagrange(d: usize, s: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = (0..=d).map(|j| j as f64 / d as f64).collect();
    let mut val = vec![1.0; d + 1];
    let mut der = vec![0.0; d + 1];
    for j in 0..=d {
        for m in 0..=d {
            if m == j {
                continue;
            }
            val[j] *= (s - nodes[m]) / (nodes[j] - nodes[m]);
        }
        for skip in 0..=d {
            if skip == j {
                continue;
            }
            let mut p = 1.0 / (nodes[j] - nodes[skip]);
            for m in 0..=d {
                if m != j && m != skip {
                    p *= (s - nodes[m]) / (nodes[j] - nodes[m]);
                }
            }
            der[j] += p;
        }
    }
    (val, der)
}

/// Curvature vector in the continuous piecewise degree-`d` space of a
/// polygon. Dof `i d + j` sits at parameter `j / d` of segment `i`; the
/// geometry is given in the same space.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub degree: usize,
    pub closed: bool,
    /// Geometry nodes, one per dof.
    pub geometry: Vec<Vec2>,
    pub coeffs: Vec<Vec2>,
}

fn dof_index(d: usize, closed: bool, n_vertices: usize, seg: usize, j: usize) -> usize {
    if j == d && closed && seg + 1 == n_vertices {
        0
    } else {
        seg * d + j
    }
}

impl CurvatureField {
    pub fn n_vertices(&self) -> usize {
        if self.closed {
            self.coeffs.len() / self.degree
        } else {
            (self.coeffs.len() - 1) / self.degree + 1
        }
    }

    /// Values at the polygon vertices.
    pub fn node_values(&self) -> Vec<Vec2> {
        self.coeffs.iter().step_by(self.degree).copied().collect()
    }

    fn combine(&self, v: &[Vec2], seg: usize, s: f64) -> Vec2 {
        let (val, _) = lagrange(self.degree, s);
        let nv = self.n_vertices();
        (0..=self.degree).map(|j| v[dof_index(self.degree, self.closed, nv, seg, j)] * val[j]).sum()
    }

    /// Curvature on segment `seg` at parameter `s ∈ [0, 1]`.
    pub fn eval(&self, seg: usize, s: f64) -> Vec2 {
        self.combine(&self.coeffs, seg, s)
    }

    /// Point of the (possibly curved) geometry at parameter `s` of segment `seg`.
    pub fn position(&self, seg: usize, s: f64) -> Vec2 {
        self.combine(&self.geometry, seg, s)
    }
}

fn n_segments(nv: usize, closed: bool) -> usize {
    if closed {
        nv
    } else {
        nv - 1
    }
}

/// Geometry nodes on the straight segments.
pub fn straight_geometry(x: &[Vec2], d: usize, closed: bool) -> Vec<Vec2> {
    let nv = x.len();
    let mut g = Vec::new();
    for seg in 0..n_segments(nv, closed) {
        let (a, b) = (x[seg], x[(seg + 1) % nv]);
        g.extend((0..d).map(|j| a + (b - a) * (j as f64 / d as f64)));
    }
    if !closed {
        g.push(x[nv - 1]);
    }
    g
}

/// Geometry nodes on the periodic chord-length cubic spline through the
/// vertices of a closed polygon.
pub fn spline_geometry(x: &[Vec2], d: usize) -> Result<Vec<Vec2>> {
    let n = x.len();
    let h: Vec<f64> = (0..n).map(|i| (x[(i + 1) % n] - x[i]).norm()).collect();
    if h.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Geometry("interface has a zero-length segment".into()));
    }
    // second derivatives: h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (δ_i - δ_{i-1})
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut r = DMatrix::<f64>::zeros(n, 2);
    for i in 0..n {
        let im = (i + n - 1) % n;
        let ip = (i + 1) % n;
        a[(i, im)] += h[im];
        a[(i, i)] += 2.0 * (h[im] + h[i]);
        a[(i, ip)] += h[i];
        let rhs = (x[ip] - x[i]) / h[i] - (x[i] - x[im]) / h[im];
        r[(i, 0)] = 6.0 * rhs.x;
        r[(i, 1)] = 6.0 * rhs.y;
    }
    let m = a
        .lu()
        .solve(&r)
        .ok_or_else(|| Error::Geometry("spline system is singular".into()))?;
    let mut g = Vec::with_capacity(n * d);
    for i in 0..n {
        let ip = (i + 1) % n;
        let (mi, mp) = (Vec2::new(m[(i, 0)], m[(i, 1)]), Vec2::new(m[(ip, 0)], m[(ip, 1)]));
        for j in 0..d {
            let b = j as f64 / d as f64;
            let a = 1.0 - b;
            g.push(x[i] * a + x[ip] * b + (mi * (a * a * a - a) + mp * (b * b * b - b)) * (h[i] * h[i] / 6.0));
        }
    }
    Ok(g)
}

struct Assembled {
    mass: DMatrix<f64>,
    rhs: [DVector<f64>; 2],
}

fn assemble(geom: &[Vec2], d: usize, closed: bool) -> Result<Assembled> {
    let n = geom.len();
    let nv = if closed { n / d } else { (n - 1) / d + 1 };
    let rule = segment_rule(3 * d);
    let tab: Vec<(Vec<f64>, Vec<f64>)> = rule.points.iter().map(|&s| lagrange(d, s)).collect();
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = [DVector::zeros(n), DVector::zeros(n)];
    for seg in 0..n_segments(nv, closed) {
        let dof = |j: usize| dof_index(d, closed, nv, seg, j);
        for (q, (val, der)) in tab.iter().enumerate() {
            // X'(s), |X'| and ∫ over the segment = ∫_0^1 (..) |X'| ds
            let xs: Vec2 = (0..=d).map(|j| geom[dof(j)] * der[j]).sum();
            let jac = xs.norm();
            if !(jac > 0.0) {
                return Err(Error::Geometry(format!("interface segment {seg} is degenerate")));
            }
            let w = rule.weights[q];
            for i in 0..=d {
                for j in 0..=d {
                    mass[(dof(i), dof(j))] += w * jac * val[i] * val[j];
                }
                // ∇_Γ x · ∇_Γ ψ |X'| = X' ψ' / |X'|
                let g = w * der[i] / jac;
                rhs[0][dof(i)] += xs.x * g;
                rhs[1][dof(i)] += xs.y * g;
            }
        }
    }
    Ok(Assembled { mass, rhs })
}

fn project(geometry: Vec<Vec2>, degree: usize, closed: bool) -> Result<CurvatureField> {
    let Assembled { mut mass, mut rhs } = assemble(&geometry, degree, closed)?;
    let n = mass.nrows();
    if !closed {
        for end in [0, n - 1] {
            for c in 0..n {
                mass[(end, c)] = 0.0;
                mass[(c, end)] = 0.0;
            }
            mass[(end, end)] = 1.0;
            rhs[0][end] = 0.0;
            rhs[1][end] = 0.0;
        }
    }
    let chol = mass
        .cholesky()
        .ok_or_else(|| Error::Geometry("interface mass matrix is not positive definite".into()))?;
    let kx = chol.solve(&rhs[0]);
    let ky = chol.solve(&rhs[1]);
    Ok(CurvatureField {
        degree,
        closed,
        geometry,
        coeffs: (0..n).map(|i| Vec2::new(kx[i], ky[i])).collect(),
    })
}

fn check_chain(x: &[Vec2], degree: usize, closed: bool) -> Result<()> {
    if degree == 0 || x.len() < if closed { 3 } else { 2 } {
        return Err(Error::Parameter("curvature needs degree >= 1 and a non-degenerate chain".into()));
    }
    Ok(())
}

/// Projects the curvature vector of a polygon on its straight segments.
/// Closed chains use the full space; open chains fix `κ = 0` at both end
/// points.
pub fn curvature_projection(x: &[Vec2], degree: usize, closed: bool) -> Result<CurvatureField> {
    check_chain(x, degree, closed)?;
    project(straight_geometry(x, degree, closed), degree, closed)
}

/// Projection on a degree-`d` curved lift of a closed polygon whose interior
/// geometry nodes lie on the periodic spline through the vertices. For
/// `d >= 2` this avoids the oscillation of the straight-segment projection,
/// whose curvature is concentrated at the vertices.
pub fn curvature_isoparametric(x: &[Vec2], degree: usize) -> Result<CurvatureField> {
    check_chain(x, degree, true)?;
    let geometry = if degree == 1 { straight_geometry(x, 1, true) } else { spline_geometry(x, degree)? };
    project(geometry, degree, true)
}

/// Nodal curvature vectors in the continuous linear space of a closed polygon.
pub fn curvature_p1(x: &[Vec2]) -> Result<Vec<Vec2>> {
    Ok(curvature_projection(x, 1, true)?.coeffs)
}

/// `max_ψ |(κ, ψ) - (∇_Γ x, ∇_Γ ψ)|` over the basis of the space.
pub fn projection_residual(field: &CurvatureField) -> Result<f64> {
    let Assembled { mass, rhs } = assemble(&field.geometry, field.degree, field.closed)?;
    let n = mass.nrows();
    let kx = DVector::from_iterator(n, field.coeffs.iter().map(|v| v.x));
    let ky = DVector::from_iterator(n, field.coeffs.iter().map(|v| v.y));
    let rx = &mass * kx - &rhs[0];
    let ry = &mass * ky - &rhs[1];
    let range = if field.closed { 0..n } else { 1..n - 1 };
    Ok(range.map(|i| rx[i].abs().max(ry[i].abs())).fold(0.0, f64::max))
}
