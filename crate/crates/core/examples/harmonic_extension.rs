//! Extends an interface displacement into the bulk with the stiffened
//! harmonic extension and compares the mesh quality with plain Laplace.
//!
//! `cargo run --release --example harmonic_extension -- [amplitude]`

use alehdg::ale::{harmonic_extension, stiffening, NodeConstraint};
use alehdg::interface::InterfaceChain;
use alehdg::mesh::{bubble_mesh, BubbleMeshParams, FacetLabel, Mesh2D};
use alehdg::Vec2;

fn min_angle(mesh: &Mesh2D, wanted: &[bool]) -> f64 {
    let mut worst = 180.0f64;
    for e in (0..mesh.num_elements()).filter(|&e| wanted[e]) {
        let v = mesh.vertices(e);
        for i in 0..3 {
            worst = worst.min((v[(i + 1) % 3] - v[i]).angle(&(v[(i + 2) % 3] - v[i])).to_degrees());
        }
    }
    worst
}

fn main() -> alehdg::Result<()> {
    let amp: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.15);
    let mesh = bubble_mesh(&BubbleMeshParams::benchmark(0.05, 0.05))?;
    let chain = InterfaceChain::extract(&mesh)?;
    let walls = mesh.nodes_on(&[FacetLabel::Dirichlet, FacetLabel::FreeSlip]);
    let on_gamma = chain.node_mask(mesh.num_nodes());

    // lift the bubble and squash it into an ellipse
    let centre = Vec2::new(0.5, 0.5);
    let constraints: Vec<NodeConstraint> = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if on_gamma[i] {
                let d = p - centre;
                let target = centre + Vec2::new(0.0, amp) + Vec2::new(d.x * (1.0 + amp), d.y / (1.0 + amp));
                let disp = target - p;
                [Some(disp.x), Some(disp.y)]
            } else if walls[i] {
                [Some(0.0), Some(0.0)]
            } else {
                [None, None]
            }
        })
        .collect();

    let touches_gamma: Vec<bool> = mesh.triangles().iter().map(|t| t.iter().any(|&v| on_gamma[v])).collect();
    println!("reference min angle {:.2} deg", mesh.quality().min_angle_deg);
    let uniform = vec![1.0; mesh.num_elements()];
    let stiff = stiffening(&mesh, &chain.nodes, 0.1);
    for (name, alpha) in [("laplace", &uniform), ("stiffened", &stiff)] {
        let disp = harmonic_extension(&mesh, alpha, &constraints)?;
        match mesh.move_nodes(&disp) {
            Ok(moved) => println!(
                "{name:>10}: min angle {:.2} deg overall, {:.2} deg next to the interface",
                moved.quality().min_angle_deg,
                min_angle(&moved, &touches_gamma)
            ),
            Err(e) => println!("{name:>10}: {e}"),
        }
    }
    Ok(())
}
