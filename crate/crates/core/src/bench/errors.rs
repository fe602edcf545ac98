//! Error norms against closed-form fields.

use crate::fem::{ElementGeometry, Space};
use crate::mesh::{Mesh2D, Vec2};

/// Rule degree used for error integrals.
pub fn error_degree(k: usize) -> usize {
    2 * k + 4
}

/// `‖u_h - u‖_{L2}` with quadrature of degree `2k+4`.
pub fn velocity_l2_error(space: &Space, mesh: &Mesh2D, u: &[f64], exact: impl Fn(Vec2) -> Vec2) -> f64 {
    velocity_l2_error_deg(space.k, error_degree(space.k), mesh, u, exact)
}

pub fn velocity_l2_error_deg(k: usize, degree: usize, mesh: &Mesh2D, u: &[f64], exact: impl Fn(Vec2) -> Vec2) -> f64 {
    let sp = Space::with_degree(k, degree);
    let nu = sp.nu;
    let mut s = 0.0;
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&sp, mesh, e);
        let c = &u[e * 2 * nu..(e + 1) * 2 * nu];
        for q in 0..sp.vol.len() {
            let phi = &sp.vol.u_val[q * nu..(q + 1) * nu];
            let mut uh = Vec2::zeros();
            for i in 0..nu {
                uh.x += c[i] * phi[i];
                uh.y += c[nu + i] * phi[i];
            }
            s += geo.jxw[q] * (uh - exact(geo.points[q])).norm_squared();
        }
    }
    s.sqrt()
}

/// `‖p_h - p‖_{L2}` after removing the mean of both fields.
pub fn pressure_l2_error(space: &Space, mesh: &Mesh2D, p: &[f64], exact: impl Fn(Vec2) -> f64) -> f64 {
    let sp = Space::with_degree(space.k, error_degree(space.k));
    let np = sp.np;
    let mut diffs = Vec::new();
    let (mut mean, mut area) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&sp, mesh, e);
        let c = &p[e * np..(e + 1) * np];
        for q in 0..sp.vol.len() {
            let ph: f64 = (0..np).map(|i| c[i] * sp.vol.p_val[q * np + i]).sum();
            let d = ph - exact(geo.points[q]);
            mean += geo.jxw[q] * d;
            area += geo.jxw[q];
            diffs.push((geo.jxw[q], d));
        }
    }
    mean /= area;
    diffs.iter().map(|(w, d)| w * (d - mean).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::field::project_velocity;
    use crate::mesh::{unit_square, FacetLabel, LabelRules};

    fn field(x: Vec2) -> Vec2 {
        Vec2::new((3.0 * x.x).sin() * x.y, x.x * x.x - (2.0 * x.y).cos())
    }

    #[test]
    fn exact_representation_gives_zero() {
        let mesh = unit_square(3, &LabelRules::uniform(FacetLabel::Dirichlet)).unwrap();
        let sp = Space::new(2);
        let u = project_velocity(&sp, &mesh, |x| Vec2::new(x.x * x.y, 1.0 - x.y * x.y));
        assert!(velocity_l2_error(&sp, &mesh, &u, |x| Vec2::new(x.x * x.y, 1.0 - x.y * x.y)) < 1e-13);
    }

    #[test]
    fn zero_field_gives_exact_norm() {
        // ∫∫ (x² + y²)... for u = (x, y): ‖u‖² = 2/3 on the unit square
        let mesh = unit_square(2, &LabelRules::uniform(FacetLabel::Dirichlet)).unwrap();
        let sp = Space::new(2);
        let zero = vec![0.0; mesh.num_elements() * 2 * sp.nu];
        let e = velocity_l2_error(&sp, &mesh, &zero, |x| x);
        assert!((e - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quadrature_saturation() {
        // degree k+2 exact field: the squared error has degree 2k+4
        let quartic = |x: Vec2| Vec2::new(x.x.powi(4) - x.x * x.y.powi(3), x.y.powi(4) + x.x * x.x * x.y);
        let mesh = unit_square(4, &LabelRules::uniform(FacetLabel::Dirichlet)).unwrap();
        let sp = Space::new(2);
        let u = project_velocity(&sp, &mesh, field);
        let a = velocity_l2_error_deg(2, 8, &mesh, &u, quartic);
        let b = velocity_l2_error_deg(2, 16, &mesh, &u, quartic);
        assert!(((a - b) / b).abs() < 1e-10, "{a} {b}");
    }
}
