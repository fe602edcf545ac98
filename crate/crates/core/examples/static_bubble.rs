//! Circular bubble at rest under surface tension: the pressure jump should
//! equal τ/R and the velocity should stay near zero.
//!
//! `cargo run --release --example static_bubble -- [tau]`

use alehdg::bench::bubble::surface_tension;
use alehdg::fem::field::eval_pressure;
use alehdg::fem::{DofLayout, Space};
use alehdg::hdg::{Assembler, Loads, Physics};
use alehdg::interface::{curvature_isoparametric, InterfaceChain};
use alehdg::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use alehdg::mesh::{bubble_mesh, BubbleMeshParams};
use alehdg::Vec2;

fn main() -> alehdg::Result<()> {
    let tau: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let mesh = bubble_mesh(&BubbleMeshParams::benchmark(0.05, 0.05))?;
    let chain = InterfaceChain::extract(&mesh)?;
    let x = chain.positions(mesh.nodes());
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::two_phase([1.0, 1.0], [1.0, 1.0]);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    println!("tau / R = {}", 4.0 * tau);
    for degree in [1, 2] {
        let field = curvature_isoparametric(&x, degree)?;
        let force = surface_tension(&chain, &x, &field, tau);
        let loads = Loads {
            interface_force: Some(&force),
            ..Default::default()
        };
        let sol = solve_condensed(&asm, &loads, &KnownValues::zeros(&layout), Gauge::MeanZero, &mut SparseSolver::new())?;
        // area-weighted centroid pressures per phase, [outer, inner]
        let mut acc = [(0.0, 0.0); 2];
        for e in 0..mesh.num_elements() {
            let (p, _) = eval_pressure(&space, &mesh, &sol.state.p, e, Vec2::new(1.0 / 3.0, 1.0 / 3.0))?;
            let a = mesh.area(e);
            let s = &mut acc[mesh.element_label(e).index()];
            s.0 += p * a;
            s.1 += a;
        }
        let jump = acc[1].0 / acc[1].1 - acc[0].0 / acc[0].1;
        let umax = sol.state.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        println!("geometry degree {degree}: pressure jump {jump:.5}, largest velocity coefficient {umax:.2e}");
    }
    Ok(())
}
