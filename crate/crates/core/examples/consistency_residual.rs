//! Inserts a manufactured two-phase state into the discrete momentum rows
//! and prints how the residual decays under refinement.
//!
//! `cargo run --release --example consistency_residual`

use alehdg::bench::consistency::{two_phase_residual, ResidualReport};

fn main() -> alehdg::Result<()> {
    for k in 1..=3 {
        let mut prev: Option<ResidualReport> = None;
        for n in [8, 16, 32, 64] {
            let r = two_phase_residual(k, n)?;
            let order = prev.as_ref().map_or(String::from("-"), |p| format!("{:.3}", (p.total() / r.total()).log2()));
            println!(
                "k={k} n={n:2}  volume {:.3e}  trace {:.3e}  order {order:>6}  without traction {:.3e}",
                r.volume, r.trace, r.volume_without_traction
            );
            prev = Some(r);
        }
    }
    Ok(())
}
