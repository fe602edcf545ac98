//! Solitary wave running up a vertical wall, with a free-surface ALE mesh.
//!
//! `cargo run --release --example solitary_wave -- [h] [dt] [t_end]`
//!
//! Prints a sample of the time series and the run-up and pressure maxima.

use alehdg::bench::solitary::{run_solitary_with, SolitaryCase, SolitarySample};

fn main() -> alehdg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut case = SolitaryCase::default();
    if let Some(h) = args.first().and_then(|s| s.parse().ok()) {
        case.h = h;
    }
    if let Some(dt) = args.get(1).and_then(|s| s.parse().ok()) {
        case.dt = dt;
    }
    if let Some(t) = args.get(2).and_then(|s| s.parse().ok()) {
        case.t_end = t;
    }
    let r = run_solitary_with(&case, &mut |m, t, _, _| {
        if m % 80 == 0 {
            eprintln!("t = {t:.2}");
        }
        Ok(())
    })?;
    println!("{}", SolitarySample::CSV_HEADER);
    for s in r.series.iter().step_by(40) {
        println!("{}", s.csv_row());
    }
    let up = r.run_up();
    let p = r.max_pressure();
    println!("run-up {:.4} at t = {:.3}", up.value, up.time);
    println!("max pressure {:.3} at t = {:.3}", p.value, p.time);
    Ok(())
}
