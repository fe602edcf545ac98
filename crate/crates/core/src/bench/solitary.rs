//! Solitary wave running into the right wall of a tank with a free surface.
//!
//! Initial data is the Laitone first-order wave: elevation
//! `η = d + H sech²(K (x - x_c))`, `K = sqrt(3H / 4d³)`, and velocity
//! `u = sqrt(g d) (H/d) sech²`, `v = sqrt(3 g d) (H/d)^{3/2} (y/d) sech² tanh`,
//! made discretely divergence-free by a penalised projection.

use std::collections::VecDeque;

use crate::ale::{free_surface_displacement, harmonic_extension, mesh_velocity, NodeConstraint};
use crate::error::{Error, Result};
use crate::fem::basis::ref_vertex;
use crate::fem::field::{eval_pressure, project_velocity};
use crate::fem::{DofLayout, Space};
use crate::hdg::{Assembler, FlowState, Loads, Physics};
use crate::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use crate::mesh::{tank, FacetLabel, Mesh2D, Subdomain, Vec2};
use crate::time::{Mode, SchemeConfig, StepData, StepRecord, Stepper};

use super::bubble::{steps_for, Extremum};

#[derive(Clone, Debug)]
pub struct SolitaryCase {
    pub k: usize,
    pub order: usize,
    pub depth: f64,
    pub height: f64,
    pub gravity: f64,
    pub rho: f64,
    pub mu: f64,
    /// Tank extent in `x`; the run-up is measured at `x1`.
    pub x0: f64,
    pub x1: f64,
    /// Initial crest position.
    pub crest: f64,
    /// Target cell size.
    pub h: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Start from the Laitone velocity (`false`: from rest).
    pub initial_velocity: bool,
}

impl Default for SolitaryCase {
    fn default() -> Self {
        SolitaryCase {
            k: 2,
            order: 2,
            depth: 10.0,
            height: 2.0,
            gravity: 9.8,
            rho: 1.0,
            mu: 1.0,
            x0: -80.0,
            x1: 80.0,
            crest: 0.0,
            h: 2.0,
            dt: 0.025,
            t_end: 12.0,
            initial_velocity: true,
        }
    }
}

impl SolitaryCase {
    fn k_wave(&self) -> f64 {
        (3.0 * self.height / (4.0 * self.depth.powi(3))).sqrt()
    }

    pub fn elevation(&self, x: f64) -> f64 {
        let s = 1.0 / (self.k_wave() * (x - self.crest)).cosh();
        self.depth + self.height * s * s
    }

    pub fn initial_velocity_at(&self, p: Vec2) -> Vec2 {
        let (g, d, a) = (self.gravity, self.depth, self.height / self.depth);
        let arg = self.k_wave() * (p.x - self.crest);
        let s2 = 1.0 / arg.cosh().powi(2);
        Vec2::new((g * d).sqrt() * a * s2, (3.0 * g * d).sqrt() * a.powf(1.5) * (p.y / d) * s2 * arg.tanh())
    }

    pub fn mesh(&self) -> Result<Mesh2D> {
        if !(self.h > 0.0 && self.x1 > self.x0 && self.depth > 0.0) {
            return Err(Error::Parameter("bad tank geometry".into()));
        }
        let nx = ((self.x1 - self.x0) / self.h).round().max(1.0) as usize;
        let ny = (self.depth / self.h).round().max(1.0) as usize;
        tank(self.x0, self.x1, nx, ny, |x| self.elevation(x), FacetLabel::TractionFree, FacetLabel::FreeSlip)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolitarySample {
    pub time: f64,
    /// Highest free-surface node and its `x`.
    pub max_height: f64,
    pub crest_x: f64,
    /// Surface height at the right wall.
    pub wall_height: f64,
    /// Largest pressure at element vertices.
    pub max_pressure: f64,
    pub energy: f64,
    pub volume: f64,
}

impl SolitarySample {
    pub const CSV_HEADER: &'static str = "time,max_height,crest_x,wall_height,max_pressure,energy,volume";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            self.time, self.max_height, self.crest_x, self.wall_height, self.max_pressure, self.energy, self.volume
        )
    }
}

#[derive(Debug)]
pub struct SolitaryResult {
    pub series: Vec<SolitarySample>,
    pub records: Vec<StepRecord>,
    pub mesh: Mesh2D,
}

impl SolitaryResult {
    /// Largest surface height and the time it occurs.
    pub fn run_up(&self) -> Extremum {
        self.series
            .iter()
            .max_by(|a, b| a.max_height.total_cmp(&b.max_height))
            .map(|s| Extremum { value: s.max_height, time: s.time })
            .unwrap_or(Extremum { value: f64::NAN, time: f64::NAN })
    }

    /// Largest pressure over the run, excluding the initial level.
    pub fn max_pressure(&self) -> Extremum {
        self.series
            .iter()
            .skip(1)
            .max_by(|a, b| a.max_pressure.total_cmp(&b.max_pressure))
            .map(|s| Extremum { value: s.max_pressure, time: s.time })
            .unwrap_or(Extremum { value: f64::NAN, time: f64::NAN })
    }
}

/// Discretely divergence-free field closest to `u` in the mass norm: one
/// condensed solve with a dominant mass term.
pub fn project_divergence_free(space: &Space, mesh: &Mesh2D, u: &[f64], gauge: Gauge) -> Result<Vec<f64>> {
    let beta = 1e4;
    let layout = DofLayout::new(mesh, space.k);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(space, mesh, &layout, &physics);
    let loads = Loads {
        mass_coeff: beta,
        history: vec![(-beta, u)],
        ..Default::default()
    };
    let known = KnownValues::zeros(&layout);
    Ok(solve_condensed(&asm, &loads, &known, gauge, &mut SparseSolver::new())?.state.u)
}

fn max_vertex_pressure(space: &Space, mesh: &Mesh2D, state: &FlowState) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for e in 0..mesh.num_elements() {
        for a in 0..3 {
            best = best.max(eval_pressure(space, mesh, &state.p, e, ref_vertex(a))?.0);
        }
    }
    Ok(best)
}

/// (highest surface node, surface height at the right wall)
fn surface_heights(mesh: &Mesh2D, surface: &[bool], x1: f64) -> (Vec2, f64) {
    let mut max_h = Vec2::new(f64::NAN, f64::NEG_INFINITY);
    let mut wall: (f64, f64) = (f64::INFINITY, 0.0);
    for (p, _) in mesh.nodes().iter().zip(surface).filter(|(_, &s)| s) {
        if p.y > max_h.y {
            max_h = *p;
        }
        let dist = (p.x - x1).abs();
        if dist < wall.0 {
            wall = (dist, p.y);
        }
    }
    (max_h, wall.1)
}

pub fn run_solitary(case: &SolitaryCase) -> Result<SolitaryResult> {
    run_solitary_with(case, &mut |_, _, _, _| Ok(()))
}

/// Per-step hook: step, time, mesh, state.
pub type SolitaryHook<'a> = dyn FnMut(usize, f64, &Mesh2D, &FlowState) -> Result<()> + 'a;

pub fn run_solitary_with(case: &SolitaryCase, hook: &mut SolitaryHook) -> Result<SolitaryResult> {
    let steps = steps_for(case.t_end, case.dt)?;
    let mut config = SchemeConfig::new(case.order, Mode::Imex, Physics::uniform(case.rho, case.mu));
    config.gauge = Gauge::None;
    let mut stepper = Stepper::new(config, case.k, case.dt, 0.0)?;
    let mut mesh = case.mesh()?;
    let surface = mesh.nodes_on(&[FacetLabel::TractionFree]);
    let scale = case.h.min(case.depth);
    let side = |p: Vec2| (p.x - case.x0).abs() < 1e-9 * scale || (p.x - case.x1).abs() < 1e-9 * scale;

    let u0 = if case.initial_velocity {
        let raw = project_velocity(&stepper.space, &mesh, |p| case.initial_velocity_at(p));
        project_divergence_free(&stepper.space, &mesh, &raw, Gauge::None)?
    } else {
        vec![0.0; mesh.num_elements() * 2 * stepper.space.nu]
    };
    stepper.seed(u0);

    let (h0, w0) = surface_heights(&mesh, &surface, case.x1);
    let mut series = vec![SolitarySample {
        time: 0.0,
        max_height: h0.y,
        crest_x: h0.x,
        wall_height: w0,
        max_pressure: f64::NAN,
        energy: 0.0,
        volume: mesh.total_area(),
    }];
    let mut records = Vec::with_capacity(steps);
    let mut positions: VecDeque<Vec<Vec2>> = VecDeque::from([mesh.nodes().to_vec()]);
    let rho = case.rho;
    let g = case.gravity;
    let body = move |_: Vec2, _: Subdomain| Vec2::new(0.0, -rho * g);

    for m in 1..=steps {
        let t = m as f64 * case.dt;
        let s_ext = stepper.next_order().min(2);
        let u_ext = stepper.history.extrapolate(s_ext)?;
        let surf_disp = free_surface_displacement(&stepper.space, &mesh, &u_ext, &surface, case.dt)?;
        // surface nodes follow the fluid, side walls and bottom slide
        let constraints: Vec<NodeConstraint> = mesh
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let x = if side(p) {
                    Some(0.0)
                } else if surface[i] {
                    Some(surf_disp[i].x)
                } else {
                    None
                };
                let y = if surface[i] {
                    Some(surf_disp[i].y)
                } else if p.y.abs() < 1e-9 * scale {
                    Some(0.0)
                } else {
                    None
                };
                [x, y]
            })
            .collect();
        let alpha = vec![1.0; mesh.num_elements()];
        let disp = harmonic_extension(&mesh, &alpha, &constraints)?;
        let new_mesh = mesh.move_nodes(&disp)?;
        let mut levels: Vec<&[Vec2]> = vec![new_mesh.nodes()];
        levels.extend(positions.iter().take(case.order.min(2)).map(|p| p.as_slice()));
        let omega = mesh_velocity(&levels, case.dt)?;
        let rec = stepper.advance(
            &new_mesh,
            &StepData {
                omega: Some(&omega),
                body: Some(&body),
                ..Default::default()
            },
        )?;
        mesh = new_mesh;
        positions.push_front(mesh.nodes().to_vec());
        positions.truncate(3);
        let state = stepper.state.as_ref().unwrap();
        let (max_height, wall_height) = surface_heights(&mesh, &surface, case.x1);
        series.push(SolitarySample {
            time: t,
            max_height: max_height.y,
            crest_x: max_height.x,
            wall_height,
            max_pressure: max_vertex_pressure(&stepper.space, &mesh, state)?,
            energy: rec.energy,
            volume: mesh.total_area(),
        });
        hook(m, t, &mesh, state)?;
        records.push(rec);
    }
    Ok(SolitaryResult { series, records, mesh })
}
