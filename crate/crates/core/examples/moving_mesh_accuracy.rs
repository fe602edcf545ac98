//! Manufactured solution on a prescribed moving mesh: velocity and pressure
//! errors at T = π/2 with BDF3 IMEX steps.
//!
//! `cargo run --release --example moving_mesh_accuracy -- [k] [mu]`

use alehdg::bench::accuracy::{run_case, AccuracyCase};
use alehdg::bench::output::ConvergenceRecord;

fn main() -> alehdg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(2);
    let mu: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let mut vel = ConvergenceRecord::new(format!("velocity, k={k}, mu={mu:e}"));
    let mut pre = ConvergenceRecord::new(format!("pressure, k={k}, mu={mu:e}"));
    for n in [4, 8, 16] {
        let r = run_case(&AccuracyCase::new(k, n, mu, 4))?;
        println!("1/h={n:2}  steps {:3}  worst div/|u| {:.1e}", r.records.len(), r.worst_divergence);
        vel.push(n, r.velocity_error);
        pre.push(n, r.pressure_error);
    }
    print!("{}{}", vel.table(), pre.table());
    Ok(())
}
