//! Steady Stokes on the unit square with a stream-function solution:
//! velocity errors and observed orders for k = 1..3.

use alehdg::bench::errors::velocity_l2_error;
use alehdg::fem::{DofLayout, Space};
use alehdg::hdg::{Assembler, Loads, Physics};
use alehdg::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use alehdg::mesh::{unit_square, FacetLabel, LabelRules, Subdomain};
use alehdg::Vec2;

fn g(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}
fn g1(s: f64) -> f64 {
    2.0 * s - 6.0 * s * s + 4.0 * s * s * s
}
fn g2(s: f64) -> f64 {
    2.0 - 12.0 * s + 12.0 * s * s
}
fn g3(s: f64) -> f64 {
    -12.0 + 24.0 * s
}

fn main() -> alehdg::Result<()> {
    let mu: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let exact = |x: Vec2| Vec2::new(g(x.x) * g1(x.y), -g1(x.x) * g(x.y));
    let lap = |x: Vec2| Vec2::new(g2(x.x) * g1(x.y) + g(x.x) * g3(x.y), -g3(x.x) * g(x.y) - g1(x.x) * g2(x.y));
    let body = move |x: Vec2, _: Subdomain| -lap(x) * mu + Vec2::repeat((x.x + x.y).cos());
    println!("mu = {mu:e}");
    for k in 1..=3 {
        let mut prev = None;
        for n in [4, 8, 16, 32] {
            let mesh = unit_square(n, &LabelRules::uniform(FacetLabel::Dirichlet))?;
            let space = Space::new(k);
            let layout = DofLayout::new(&mesh, k);
            let physics = Physics::uniform(1.0, mu);
            let asm = Assembler::new(&space, &mesh, &layout, &physics);
            let loads = Loads {
                body: Some(&body),
                ..Default::default()
            };
            let sol = solve_condensed(&asm, &loads, &KnownValues::zeros(&layout), Gauge::MeanZero, &mut SparseSolver::new())?;
            let err = velocity_l2_error(&space, &mesh, &sol.state.u, exact);
            let order = prev.map_or(String::from("-"), |p: f64| format!("{:.2}", (p / err).log2()));
            println!("k={k} 1/h={n:3} err={err:.3e} order={order}");
            prev = Some(err);
        }
    }
    Ok(())
}
