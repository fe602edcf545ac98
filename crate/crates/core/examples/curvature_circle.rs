//! Mean-curvature vector of a polygonal circle: the lumped vertex formula
//! against the weak projection on straight segments (P1) and on
//! isoparametric quadratic segments (P2).
//!
//! `cargo run --release --example curvature_circle -- [radius]`

use alehdg::interface::{curvature_isoparametric, curvature_p1, curvature_projection};
use alehdg::Vec2;

fn circle(r: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Vec2::new(th.cos(), th.sin()) * r
        })
        .collect()
}

fn main() -> alehdg::Result<()> {
    let r: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let exact = 1.0 / r;
    println!("exact |kappa| = {exact}");
    println!("{:>5} {:>12} {:>12} {:>12}", "N", "vertex", "P1 weak", "P2 curved");
    for n in [16, 32, 64, 126, 256] {
        let x = circle(r, n);
        // worst relative error of |κ| at the vertices
        let worst = |v: &[Vec2]| v.iter().map(|k| (k.norm() - exact).abs() / exact).fold(0.0, f64::max);
        let lumped = curvature_p1(&x)?;
        let straight = curvature_projection(&x, 1, true)?;
        let curved = curvature_isoparametric(&x, 2)?;
        println!(
            "{n:5} {:12.3e} {:12.3e} {:12.3e}",
            worst(&lumped),
            worst(&straight.node_values()),
            worst(&curved.node_values())
        );
    }
    Ok(())
}
