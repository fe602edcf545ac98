//! Generates the rising-bubble mesh and reports its size and quality.
//!
//! `cargo run --release --example bubble_mesh -- [h_bulk] [h_interface] [out.vtk]`

use std::fs::File;
use std::io::BufWriter;

use alehdg::interface::{spacing_cv, InterfaceChain};
use alehdg::mesh::{bubble_mesh, write_vtk, BubbleMeshParams, FacetLabel, Subdomain};

fn main() -> alehdg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let h_bulk: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let h_gamma: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(h_bulk);
    let mesh = bubble_mesh(&BubbleMeshParams::benchmark(h_bulk, h_gamma))?;
    let q = mesh.quality();
    let chain = InterfaceChain::extract(&mesh)?;
    let x = chain.positions(mesh.nodes());
    println!("nodes {}  elements {}  facets {}", mesh.num_nodes(), mesh.num_elements(), mesh.num_facets());
    println!("interface segments {}  spacing CV {:.2e}", chain.len(), spacing_cv(&x));
    println!(
        "bubble area {:.6} (circle {:.6})",
        mesh.subdomain_area(Subdomain::Inner),
        std::f64::consts::PI * 0.0625
    );
    for label in [FacetLabel::Dirichlet, FacetLabel::FreeSlip, FacetLabel::Interface] {
        println!("{:>12} facets: {}", label.name(), mesh.facets_with_label(label).len());
    }
    println!("min angle {:.2} deg, max aspect ratio {:.2}", q.min_angle_deg, q.max_aspect_ratio);
    if let Some(path) = args.get(2) {
        write_vtk(&mesh, &mut BufWriter::new(File::create(path)?))?;
        println!("wrote {path}");
    }
    Ok(())
}
