//! Rising bubble benchmark with either interface velocity.
//!
//! `cargo run --release --example rising_bubble -- [case] [h] [t_end] [plain|equidistributing]`
//!
//! A run that stops early (mesh tangling) still prints what it reached.

use std::time::Instant;

use alehdg::bench::bubble::{run_bubble_with, BubbleCase, BubbleSample};
use alehdg::interface::VelocityVariant;

fn main() -> alehdg::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let which: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(1);
    let h: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let mut case = if which == 2 { BubbleCase::case2(h) } else { BubbleCase::case1(h) };
    if let Some(t) = args.get(2).and_then(|s| s.parse().ok()) {
        case.t_end = t;
    }
    if let Some(v) = args.get(3).and_then(|s| VelocityVariant::from_name(s)) {
        case.variant = v;
    }
    let start = Instant::now();
    let r = run_bubble_with(&case, &mut |m, t, _, _, _, _| {
        if m % 40 == 0 {
            eprintln!("step {m} t = {t:.3} ({:.0} s)", start.elapsed().as_secs_f64());
        }
        Ok(())
    })?;
    println!("{}", BubbleSample::CSV_HEADER);
    for s in r.series.iter().step_by(20) {
        println!("{}", s.csv_row());
    }
    if let Some(f) = &r.failure {
        println!("stopped at t = {:.4}: {}", f.time, f.error);
    }
    let c = r.min_circularity();
    let v = r.max_rise_velocity();
    println!("min circularity {:.4} at t = {:.3}", c.value, c.time);
    println!("max rise velocity {:.4} at t = {:.3}", v.value, v.time);
    println!("final centre height {:.4}, max spacing CV {:.3}", r.final_center().y, r.max_spacing_cv());
    Ok(())
}
