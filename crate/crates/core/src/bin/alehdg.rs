use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alehdg::bench::accuracy::run_case;
use alehdg::bench::bubble::{run_bubble_with, BubbleSample};
use alehdg::bench::config::{CaseKind, RunConfig};
use alehdg::bench::output::{create, error_record, snapshot_path, write_csv, write_state_vtk, ConvergenceRecord};
use alehdg::bench::solitary::{run_solitary_with, SolitarySample};
use alehdg::fem::Space;
use alehdg::interface::write_polyline;
use alehdg::time::StepRecord;
use alehdg::{Error, Result};

#[derive(Parser)]
#[command(name = "alehdg", version, about = "ALE-HDG flow benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study on the moving unit square.
    Accuracy(Opts),
    /// Solitary wave running up a wall.
    Solitary(Opts),
    /// Rising bubble.
    Bubble(Opts),
}

/// Values are parsed by the config reader; flags override the config file.
#[derive(Args, Debug)]
struct Opts {
    /// key = value file, `#` starts a comment
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    k: Option<String>,
    /// BDF order
    #[arg(long, short = 's')]
    order: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    h_interface: Option<String>,
    #[arg(long, short = 'T')]
    t_end: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    rho_inner: Option<String>,
    #[arg(long)]
    mu_inner: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    gravity: Option<String>,
    /// plain | equidistributing
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    curvature_degree: Option<String>,
    /// 1 or 2
    #[arg(long)]
    bubble_case: Option<String>,
    /// Comma-separated 1/h levels
    #[arg(long)]
    resolutions: Option<String>,
    /// Comma-separated viscosities
    #[arg(long)]
    viscosities: Option<String>,
    #[arg(long)]
    steps_per_cell: Option<String>,
    #[arg(long)]
    implicit: Option<String>,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    x1: Option<String>,
    #[arg(long)]
    crest: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    wave_height: Option<String>,
    #[arg(long)]
    initial_velocity: Option<String>,
    #[arg(long, short = 'o')]
    output: Option<String>,
    /// VTK snapshot every N steps, 0 for none
    #[arg(long)]
    cadence: Option<String>,
}

impl Opts {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("k", &self.k),
            ("order", &self.order),
            ("dt", &self.dt),
            ("h", &self.h),
            ("h_interface", &self.h_interface),
            ("t_end", &self.t_end),
            ("rho", &self.rho),
            ("mu", &self.mu),
            ("rho_inner", &self.rho_inner),
            ("mu_inner", &self.mu_inner),
            ("tau", &self.tau),
            ("gravity", &self.gravity),
            ("variant", &self.variant),
            ("curvature_degree", &self.curvature_degree),
            ("bubble_case", &self.bubble_case),
            ("resolutions", &self.resolutions),
            ("viscosities", &self.viscosities),
            ("steps_per_cell", &self.steps_per_cell),
            ("implicit", &self.implicit),
            ("x0", &self.x0),
            ("x1", &self.x1),
            ("crest", &self.crest),
            ("depth", &self.depth),
            ("wave_height", &self.wave_height),
            ("initial_velocity", &self.initial_velocity),
            ("output", &self.output),
            ("cadence", &self.cadence),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got '{kv}'")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn records_csv(dir: &Path, records: &[StepRecord]) -> Result<()> {
    let mut out = create(&dir.join("steps.csv"))?;
    writeln!(out, "{}", StepRecord::CSV_HEADER)?;
    for r in records {
        r.write_csv(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn accuracy(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let cases = cfg.accuracy_cases()?;
    let mut tables: Vec<(f64, ConvergenceRecord, ConvergenceRecord)> = Vec::new();
    let mut rows = Vec::new();
    for c in &cases {
        let r = run_case(c)?;
        eprintln!("k={} mu={:e} 1/h={} steps={}: |u-u_h| = {:.3e}", c.k, c.mu, c.n, c.steps, r.velocity_error);
        rows.push(format!(
            "{},{:e},{},{},{:.10e},{:.10e},{:.3e}",
            c.k, c.mu, c.n, c.steps, r.velocity_error, r.pressure_error, r.worst_divergence
        ));
        if tables.last().is_none_or(|t| t.0 != c.mu) {
            tables.push((
                c.mu,
                ConvergenceRecord::new(format!("velocity, k={}, mu={:e}", c.k, c.mu)),
                ConvergenceRecord::new(format!("pressure, k={}, mu={:e}", c.k, c.mu)),
            ));
        }
        let t = tables.last_mut().unwrap();
        t.1.push(c.n, r.velocity_error);
        t.2.push(c.n, r.pressure_error);
    }
    write_csv(&dir.join("errors.csv"), "k,mu,inv_h,steps,velocity_l2,pressure_l2,max_rel_div", rows)?;
    let text: String = tables.iter().map(|(_, u, p)| format!("{}\n{}\n", u.table(), p.table())).collect();
    std::fs::write(dir.join("convergence.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn solitary(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let case = cfg.solitary_case()?;
    let cadence = cfg.cadence.unwrap_or(0);
    let space = Space::new(case.k);
    let result = run_solitary_with(&case, &mut |m, _, mesh, state| {
        if cadence > 0 && m % cadence == 0 {
            write_state_vtk(&space, mesh, state, &mut create(&snapshot_path(dir, "solitary", m))?)?;
        }
        Ok(())
    })?;
    write_csv(&dir.join("series.csv"), SolitarySample::CSV_HEADER, result.series.iter().map(SolitarySample::csv_row))?;
    records_csv(dir, &result.records)?;
    let (r, p) = (result.run_up(), result.max_pressure());
    println!("run-up height {:.4} at t = {:.4}", r.value, r.time);
    println!("max pressure  {:.4} at t = {:.4}", p.value, p.time);
    Ok(())
}

fn bubble(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let case = cfg.bubble_case()?;
    let cadence = cfg.cadence.unwrap_or(0);
    let space = Space::new(case.k);
    let result = run_bubble_with(&case, &mut |m, _, mesh, state, x, field| {
        if cadence > 0 && m % cadence == 0 {
            write_state_vtk(&space, mesh, state, &mut create(&snapshot_path(dir, "bubble", m))?)?;
            let kappa = field.node_values();
            write_polyline(x, &kappa, &mut create(&dir.join(format!("interface_{m:06}.dat")))?)?;
        }
        Ok(())
    })?;
    write_csv(&dir.join("series.csv"), BubbleSample::CSV_HEADER, result.series.iter().map(BubbleSample::csv_row))?;
    records_csv(dir, &result.records)?;
    if let Some(field) = &result.final_curvature {
        write_polyline(&result.final_interface, &field.node_values(), &mut create(&dir.join("interface_final.dat"))?)?;
    }
    let (c, v) = (result.min_circularity(), result.max_rise_velocity());
    println!("min circularity    {:.5} at t = {:.4}", c.value, c.time);
    println!("max rise velocity  {:.5} at t = {:.4}", v.value, v.time);
    println!("final center y     {:.5}", result.final_center().y);
    println!("max spacing CV     {:.4}", result.max_spacing_cv());
    match result.failure {
        Some(f) => {
            eprintln!("stopped at t = {:.4} (step {})", f.time, f.step);
            Err(f.error)
        }
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match &cli.command {
        Command::Accuracy(o) => (CaseKind::Accuracy, o),
        Command::Solitary(o) => (CaseKind::Solitary, o),
        Command::Bubble(o) => (CaseKind::Bubble, o),
    };
    let run = || -> Result<()> {
        let cfg = opts.config()?;
        if let Some(c) = cfg.case {
            if c != kind {
                return Err(Error::Parameter(format!("config is for '{}', command is '{}'", c.name(), kind.name())));
            }
        }
        let dir = cfg.output_dir(kind);
        std::fs::create_dir_all(&dir)?;
        match kind {
            CaseKind::Accuracy => accuracy(&cfg, &dir),
            CaseKind::Solitary => solitary(&cfg, &dir),
            CaseKind::Bubble => bubble(&cfg, &dir),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("{}", error_record(&e, kind.name()));
            ExitCode::from(2)
        }
    }
}
