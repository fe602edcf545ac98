//! One time step of the moving-mesh scheme: IMEX (explicit convection, one
//! linear solve) or fully implicit with Picard iteration.

use std::io::Write;

use super::bdf::History;
use crate::error::{Error, Result};
use crate::fem::{DofLayout, Space};
use crate::hdg::{Assembler, DivergenceReport, FlowState, Loads, Physics};
use crate::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use crate::mesh::{Mesh2D, Subdomain, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Imex,
    FullyImplicit,
}

#[derive(Clone, Debug)]
pub struct SchemeConfig {
    /// BDF / SBDF order `s`.
    pub order: usize,
    pub mode: Mode,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub physics: Physics,
    pub gauge: Gauge,
    /// `false` drops the convective terms (time-dependent Stokes).
    pub convection: bool,
    /// Divergence residual tolerance relative to `‖u_h‖`.
    pub div_tol: f64,
}

impl SchemeConfig {
    pub fn new(order: usize, mode: Mode, physics: Physics) -> Self {
        SchemeConfig {
            order,
            mode,
            picard_tol: 1e-10,
            picard_max: 50,
            physics,
            gauge: Gauge::MeanZero,
            convection: true,
            div_tol: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.order) {
            return Err(Error::Parameter(format!("scheme order must be 1, 2 or 3, got {}", self.order)));
        }
        if !(self.picard_tol > 0.0) || self.picard_max == 0 {
            return Err(Error::Parameter("Picard tolerance and iteration cap must be positive".into()));
        }
        self.physics.validate()
    }
}

/// Data of the step being computed, all on the configuration at `t_m`.
#[derive(Default)]
pub struct StepData<'a> {
    pub omega: Option<&'a [Vec2]>,
    pub body: Option<&'a dyn Fn(Vec2, Subdomain) -> Vec2>,
    pub boundary_velocity: Option<&'a dyn Fn(Vec2) -> Vec2>,
    pub interface_force: Option<&'a dyn Fn(usize, Vec2) -> Vec2>,
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub max_div: f64,
    pub max_jump: f64,
    /// `‖u_h‖` in L2.
    pub u_norm: f64,
    pub picard_iterations: usize,
    pub min_angle_deg: f64,
    /// Order actually used (lower than configured during startup).
    pub order: usize,
    pub divergence_ok: bool,
}

impl StepRecord {
    pub const CSV_HEADER: &'static str = "step,time,energy,max_div,max_jump,u_norm,picard_iterations,min_angle_deg,order";

    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(
            out,
            "{},{:.10e},{:.10e},{:.4e},{:.4e},{:.10e},{},{:.4},{}",
            self.step, self.time, self.energy, self.max_div, self.max_jump, self.u_norm, self.picard_iterations, self.min_angle_deg, self.order
        )?;
        Ok(())
    }
}

/// Owns the velocity history and advances it one level per call. The mesh
/// for each step is supplied by the caller (already moved to `t_m`).
pub struct Stepper {
    pub config: SchemeConfig,
    pub space: Space,
    pub history: History,
    pub time: f64,
    pub state: Option<FlowState>,
    solver: SparseSolver,
    step: usize,
}

impl Stepper {
    pub fn new(config: SchemeConfig, k: usize, dt: f64, t0: f64) -> Result<Self> {
        config.validate()?;
        let history = History::new(dt, config.order)?;
        Ok(Stepper {
            config,
            space: Space::new(k),
            history,
            time: t0,
            state: None,
            solver: SparseSolver::new(),
            step: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.history.dt
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Pushes a known level (initial data or exact startup values) without
    /// solving; the time advances by `δt` except for the first push.
    pub fn seed(&mut self, u: Vec<f64>) {
        if !self.history.is_empty() {
            self.time += self.history.dt;
        }
        self.history.push(u);
    }

    /// Order for the next step: the configured one once enough levels exist.
    pub fn next_order(&self) -> usize {
        self.config.order.min(self.history.len())
    }

    /// Advances one step in the configured mode.
    pub fn advance(&mut self, mesh: &Mesh2D, data: &StepData) -> Result<StepRecord> {
        match self.config.mode {
            Mode::Imex => self.step_imex(mesh, data),
            Mode::FullyImplicit => self.step_fully_implicit(mesh, data),
        }
    }

    fn known(&self, asm: &Assembler, data: &StepData) -> KnownValues {
        KnownValues {
            uhat: asm.dirichlet_values(data.boundary_velocity),
            sigma: vec![0.0; asm.layout.dim_facet()],
        }
    }

    /// IMEX-SBDF step: one linear solve with extrapolated convection.
    pub fn step_imex(&mut self, mesh: &Mesh2D, data: &StepData) -> Result<StepRecord> {
        let s = self.next_order();
        if s == 0 {
            return Err(Error::Startup { needed: 1, available: 0 });
        }
        let layout = DofLayout::new(mesh, self.space.k);
        let asm = Assembler::new(&self.space, mesh, &layout, &self.config.physics);
        let ext = if self.config.convection { Some(self.history.extrapolate(s)?) } else { None };
        let loads = Loads {
            mass_coeff: self.history.leading(s)?,
            history: self.history.history_terms(s)?,
            omega: data.omega,
            explicit_u: ext.as_deref(),
            picard_u: None,
            body: data.body,
            boundary_velocity: data.boundary_velocity,
            interface_force: data.interface_force,
        };
        let known = self.known(&asm, data);
        let sol = solve_condensed(&asm, &loads, &known, self.config.gauge, &mut self.solver)?;
        self.finish(mesh, sol.state, 1, s)
    }

    /// Fully implicit BDF step; the convective transport velocity is frozen
    /// at the previous iterate until the skeleton update is below tolerance.
    pub fn step_fully_implicit(&mut self, mesh: &Mesh2D, data: &StepData) -> Result<StepRecord> {
        let s = self.next_order();
        if s == 0 {
            return Err(Error::Startup { needed: 1, available: 0 });
        }
        let layout = DofLayout::new(mesh, self.space.k);
        let asm = Assembler::new(&self.space, mesh, &layout, &self.config.physics);
        let known = self.known(&asm, data);
        let mut transport = self.history.newest().unwrap().to_vec();
        let mut prev_skel: Vec<f64> = match &self.state {
            Some(st) if st.uhat.len() == layout.dim_facet() => st.uhat.iter().chain(&st.sigma).copied().collect(),
            _ => vec![0.0; 2 * layout.dim_facet()],
        };
        let mut residual = f64::INFINITY;
        for it in 1..=self.config.picard_max {
            let loads = Loads {
                mass_coeff: self.history.leading(s)?,
                history: self.history.history_terms(s)?,
                omega: data.omega,
                explicit_u: None,
                picard_u: if self.config.convection { Some(&transport) } else { None },
                body: data.body,
                boundary_velocity: data.boundary_velocity,
                interface_force: data.interface_force,
            };
            let sol = solve_condensed(&asm, &loads, &known, self.config.gauge, &mut self.solver)?;
            let skel: Vec<f64> = sol.state.uhat.iter().chain(&sol.state.sigma).copied().collect();
            let diff = skel.iter().zip(&prev_skel).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let norm = skel.iter().map(|a| a * a).sum::<f64>().sqrt();
            residual = if norm == 0.0 { diff } else { diff / norm };
            if residual <= self.config.picard_tol || !self.config.convection {
                return self.finish(mesh, sol.state, it, s);
            }
            transport.clone_from(&sol.state.u);
            prev_skel = skel;
        }
        Err(Error::NonConvergence {
            iterations: self.config.picard_max,
            residual,
        })
    }

    fn finish(&mut self, mesh: &Mesh2D, state: FlowState, iterations: usize, order: usize) -> Result<StepRecord> {
        let step = self.step + 1;
        if !state.is_finite() {
            return Err(Error::Instability {
                step,
                reason: "non-finite values in the solution".into(),
            });
        }
        let new_norm = state.velocity_l2(&self.space, mesh);
        let old_coeffs = self.history.newest().unwrap();
        let old_norm = old_coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let new_coeffs = state.u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if old_norm > 1e-12 && new_coeffs > 10.0 * old_norm {
            return Err(Error::Instability {
                step,
                reason: format!("velocity coefficients grew from {old_norm:e} to {new_coeffs:e} in one step"),
            });
        }
        let div: DivergenceReport = state.divergence_report(&self.space, mesh);
        let record = StepRecord {
            step,
            time: self.time + self.history.dt,
            energy: state.kinetic_energy(&self.space, mesh, &self.config.physics),
            max_div: div.max_div,
            max_jump: div.max_jump,
            u_norm: div.u_norm,
            picard_iterations: iterations,
            min_angle_deg: mesh.quality().min_angle_deg,
            order,
            divergence_ok: div.passes(self.config.div_tol) || new_norm < 1e-300,
        };
        self.step = step;
        self.time = record.time;
        self.history.push(state.u.clone());
        self.state = Some(state);
        Ok(record)
    }
}
