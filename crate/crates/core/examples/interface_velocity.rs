//! Interface node velocities for a rigid translation and a shear flow: the
//! plain normal projection against the equidistributing system.
//!
//! `cargo run --release --example interface_velocity`

use alehdg::fem::field::project_velocity;
use alehdg::fem::Space;
use alehdg::interface::{equidistributing_velocity, extrapolate_interface, plain_velocity, spacing_cv, InterfaceChain};
use alehdg::mesh::{bubble_mesh, BubbleMeshParams};
use alehdg::Vec2;

fn main() -> alehdg::Result<()> {
    let mesh = bubble_mesh(&BubbleMeshParams::benchmark(0.1, 0.05))?;
    let chain = InterfaceChain::extract(&mesh)?;
    let x = chain.positions(mesh.nodes());
    let space = Space::new(2);
    let dt = 0.05;
    type Flow = fn(Vec2) -> Vec2;
    let flows: [(&str, Flow); 2] = [
        ("translation", |_| Vec2::new(0.0, 1.0)),
        ("shear", |p| Vec2::new(p.y - 0.5, 0.0)),
    ];
    println!("{} interface nodes, spacing CV {:.2e}", x.len(), spacing_cv(&x));
    for (name, flow) in flows {
        let u = project_velocity(&space, &mesh, flow);
        let plain = plain_velocity(&space, &mesh, &u, &chain)?;
        let eq = equidistributing_velocity(&space, &mesh, &u, &chain, dt)?;
        // ten steps of the same motion show how the node spacing evolves
        let advance = |omega: &[Vec2]| -> String {
            let mut y = x.clone();
            for _ in 0..10 {
                match extrapolate_interface(&y, omega, dt) {
                    Ok(next) => y = next,
                    Err(e) => return format!("{e}"),
                }
            }
            format!("{:.3e}", spacing_cv(&y))
        };
        println!("{name:>12}: spacing CV after 10 steps  plain {}  equidistributing {}", advance(&plain), advance(&eq.omega));
    }
    Ok(())
}
