//! Element and facet bases.
//!
//! The element basis of degree `m` is orthonormal on the reference triangle,
//! obtained by Cholesky orthogonalisation of the monomials. On a physical
//! triangle the mass matrix is therefore `2|T| I`.

use nalgebra::{DMatrix, DVector};

use super::quadrature::triangle_rule;
use crate::mesh::Vec2;

pub fn dim_p(m: usize) -> usize {
    (m + 1) * (m + 2) / 2
}

#[derive(Clone, Debug)]
pub struct OrthoBasis {
    degree: usize,
    exps: Vec<(i32, i32)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: DMatrix<f64>,
}

impl OrthoBasis {
    pub fn new(degree: usize) -> Self {
        let mut exps = Vec::new();
        for total in 0..=degree as i32 {
            for b in 0..=total {
                exps.push((total - b, b));
            }
        }
        let n = exps.len();
        let rule = triangle_rule(2 * degree);
        let mut gram = DMatrix::zeros(n, n);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let m: Vec<f64> = exps.iter().map(|&(a, b)| x.x.powi(a) * x.y.powi(b)).collect();
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] += w * m[i] * m[j];
                }
            }
        }
        let l = gram.cholesky().expect("monomial Gram matrix is SPD").l();
        let coeffs = l.try_inverse().expect("triangular factor is invertible");
        OrthoBasis { degree, exps, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Values at a reference point.
    pub fn eval(&self, xi: Vec2) -> DVector<f64> {
        let m = DVector::from_iterator(self.len(), self.exps.iter().map(|&(a, b)| xi.x.powi(a) * xi.y.powi(b)));
        &self.coeffs * m
    }

    /// Reference gradients at a reference point.
    pub fn eval_grad(&self, xi: Vec2) -> Vec<Vec2> {
        let n = self.len();
        let mut dx = DVector::zeros(n);
        let mut dy = DVector::zeros(n);
        for (j, &(a, b)) in self.exps.iter().enumerate() {
            if a > 0 {
                dx[j] = a as f64 * xi.x.powi(a - 1) * xi.y.powi(b);
            }
            if b > 0 {
                dy[j] = b as f64 * xi.x.powi(a) * xi.y.powi(b - 1);
            }
        }
        let gx = &self.coeffs * dx;
        let gy = &self.coeffs * dy;
        (0..n).map(|i| Vec2::new(gx[i], gy[i])).collect()
    }
}

/// Nodal Lagrange basis of degree `k` on `[0, 1]` at equispaced nodes.
#[derive(Clone, Debug)]
pub struct FacetBasis {
    nodes: Vec<f64>,
}

impl FacetBasis {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1);
        FacetBasis {
            nodes: (0..=k).map(|i| i as f64 / k as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|i| {
                let mut v = 1.0;
                for j in 0..n {
                    if j != i {
                        v *= (s - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Affine map from the reference triangle.
#[derive(Clone, Copy, Debug)]
pub struct AffineMap {
    pub origin: Vec2,
    pub jac: nalgebra::Matrix2<f64>,
    pub inv_t: nalgebra::Matrix2<f64>,
    pub det: f64,
}

impl AffineMap {
    pub fn new(v: [Vec2; 3]) -> Self {
        let jac = nalgebra::Matrix2::from_columns(&[v[1] - v[0], v[2] - v[0]]);
        let det = jac.determinant();
        let inv_t = jac.try_inverse().unwrap_or_else(nalgebra::Matrix2::zeros).transpose();
        AffineMap { origin: v[0], jac, inv_t, det }
    }

    pub fn map(&self, xi: Vec2) -> Vec2 {
        self.origin + self.jac * xi
    }

    pub fn inverse(&self, x: Vec2) -> Vec2 {
        self.inv_t.transpose() * (x - self.origin)
    }

    /// Physical gradient from a reference gradient.
    pub fn grad(&self, g: Vec2) -> Vec2 {
        self.inv_t * g
    }
}

/// Reference coordinates of local vertex `i`.
pub fn ref_vertex(i: usize) -> Vec2 {
    match i {
        0 => Vec2::new(0.0, 0.0),
        1 => Vec2::new(1.0, 0.0),
        _ => Vec2::new(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature::triangle_rule;
    use proptest::prelude::*;

    #[test]
    fn orthonormal_on_reference() {
        for m in 0..5 {
            let b = OrthoBasis::new(m);
            assert_eq!(b.len(), dim_p(m));
            let r = triangle_rule(2 * m);
            let mut g = DMatrix::<f64>::zeros(b.len(), b.len());
            for (x, w) in r.points.iter().zip(&r.weights) {
                let v = b.eval(*x);
                g += *w * &v * v.transpose();
            }
            assert!((g - DMatrix::identity(b.len(), b.len())).amax() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn facet_basis_is_nodal() {
        for k in 1..5 {
            let fb = FacetBasis::new(k);
            for (i, &s) in fb.nodes().iter().enumerate() {
                let v = fb.eval(s);
                for (j, vj) in v.iter().enumerate() {
                    assert!((vj - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_difference(x in 0.05f64..0.6, y in 0.05f64..0.3) {
            let b = OrthoBasis::new(3);
            let h = 1e-6;
            let g = b.eval_grad(Vec2::new(x, y));
            let fx = (b.eval(Vec2::new(x + h, y)) - b.eval(Vec2::new(x - h, y))) / (2.0 * h);
            let fy = (b.eval(Vec2::new(x, y + h)) - b.eval(Vec2::new(x, y - h))) / (2.0 * h);
            for i in 0..b.len() {
                prop_assert!((g[i].x - fx[i]).abs() < 1e-5 * (1.0 + fx[i].abs()));
                prop_assert!((g[i].y - fy[i]).abs() < 1e-5 * (1.0 + fy[i].abs()));
            }
        }

        #[test]
        fn affine_map_roundtrip(ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in 1.5f64..3.0, cy in 1.5f64..3.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let m = AffineMap::new([Vec2::new(ax, ay), Vec2::new(bx, ay + 0.3), Vec2::new(ax + 0.2, cy)]);
            let xi = Vec2::new(s * (1.0 - t), t);
            prop_assert!((m.inverse(m.map(xi)) - xi).norm() < 1e-12);
        }
    }
}
