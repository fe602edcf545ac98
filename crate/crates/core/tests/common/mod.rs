#![allow(dead_code)]

use alehdg::fem::{DofLayout, Space};
use alehdg::hdg::{Assembler, Loads, Physics};
use alehdg::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use alehdg::mesh::{unit_square, FacetLabel, LabelRules, Mesh2D, Subdomain};
use alehdg::{Result, Vec2};

pub fn g(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}
pub fn g1(s: f64) -> f64 {
    2.0 * s - 6.0 * s * s + 4.0 * s * s * s
}
pub fn g2(s: f64) -> f64 {
    2.0 - 12.0 * s + 12.0 * s * s
}
pub fn g3(s: f64) -> f64 {
    -12.0 + 24.0 * s
}

/// Stream-function velocity `curl(g(x) g(y))`.
pub fn u_exact(x: Vec2) -> Vec2 {
    Vec2::new(g(x.x) * g1(x.y), -g1(x.x) * g(x.y))
}

pub fn lap_u(x: Vec2) -> Vec2 {
    Vec2::new(
        g2(x.x) * g1(x.y) + g(x.x) * g3(x.y),
        -g3(x.x) * g(x.y) - g1(x.x) * g2(x.y),
    )
}

pub fn p_exact(x: Vec2) -> f64 {
    (x.x + x.y).sin()
}

pub fn grad_p(x: Vec2) -> Vec2 {
    let c = (x.x + x.y).cos();
    Vec2::new(c, c)
}

pub fn dirichlet_square(n: usize) -> Mesh2D {
    unit_square(n, &LabelRules::uniform(FacetLabel::Dirichlet)).unwrap()
}

/// Steady Stokes solve with the manufactured source.
pub fn stokes(mesh: &Mesh2D, k: usize, mu: f64, gauge: Gauge) -> Result<(Space, alehdg::hdg::FlowState)> {
    let space = Space::new(k);
    let layout = DofLayout::new(mesh, k);
    let physics = Physics::uniform(1.0, mu);
    let asm = Assembler::new(&space, mesh, &layout, &physics);
    let body = move |x: Vec2, _: Subdomain| -mu * lap_u(x) + grad_p(x);
    let loads = Loads {
        body: Some(&body),
        ..Default::default()
    };
    let known = KnownValues::zeros(&layout);
    let sol = solve_condensed(&asm, &loads, &known, gauge, &mut SparseSolver::new())?;
    Ok((space, sol.state))
}

/// `‖u_h - u‖_{L2}` with a high-order rule.
pub fn velocity_error(space: &Space, mesh: &Mesh2D, u: &[f64], exact: impl Fn(Vec2) -> Vec2) -> f64 {
    alehdg::bench::errors::velocity_l2_error(space, mesh, u, exact)
}
