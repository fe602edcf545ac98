//! Builds a run from `key = value` text the way the `alehdg` binary does,
//! then runs a short bubble simulation from it.
//!
//! `cargo run --release --example config_run -- [file.cfg]`

use alehdg::bench::bubble::run_bubble;
use alehdg::bench::config::RunConfig;

const DEFAULT: &str = "\
# coarse Case 1 bubble, a few steps
case = bubble
bubble_case = 1
h = 0.1
t_end = 0.25
";

fn main() -> alehdg::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::from_file(path.as_ref())?,
        None => RunConfig::parse_str(DEFAULT)?,
    };
    let case = cfg.bubble_case()?;
    println!("{case:#?}");
    let r = run_bubble(&case)?;
    let last = r.series.last().expect("at least the initial sample");
    println!("t = {:.3}: centre {:.5}, rise velocity {:.5}", last.time, last.center.y, last.rise_velocity.y);
    Ok(())
}
