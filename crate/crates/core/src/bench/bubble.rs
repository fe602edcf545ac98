//! Rising bubble in a `[0,1] × [0,2]` box: explicit interface update,
//! stiffened harmonic mesh motion, curvature on the new interface and one
//! IMEX step per time level.

use std::collections::VecDeque;

use crate::ale::{harmonic_extension, mesh_velocity, stiffening, NodeConstraint};
use crate::error::{Error, Result};
use crate::hdg::{FlowState, Physics};
use crate::interface::{
    benchmark_quantities, curvature_isoparametric, equidistributing_velocity, extrapolate_interface, plain_velocity, spacing_cv, CurvatureField,
    InterfaceChain, VelocityVariant,
};
use crate::linsys::Gauge;
use crate::mesh::{bubble_mesh, BubbleMeshParams, FacetLabel, Mesh2D, Subdomain, Vec2};
use crate::time::{Mode, SchemeConfig, StepData, StepRecord, Stepper};

#[derive(Clone, Debug)]
pub struct BubbleCase {
    pub k: usize,
    pub order: usize,
    pub h: f64,
    pub h_interface: f64,
    pub dt: f64,
    pub t_end: f64,
    /// `[outer, inner]`.
    pub rho: [f64; 2],
    pub mu: [f64; 2],
    pub tau: f64,
    pub gravity: f64,
    pub variant: VelocityVariant,
    /// Degree of the curvature space (on the curved lift of the chain).
    pub curvature_degree: usize,
    /// Extend the total interface displacement on the initial mesh
    /// (`false`: extend each increment on the current mesh).
    pub extend_from_reference: bool,
}

impl BubbleCase {
    /// First benchmark case at mesh size `h = h_Γ`, `δt = h_Γ / 8`.
    pub fn case1(h: f64) -> Self {
        BubbleCase {
            k: 2,
            order: 2,
            h,
            h_interface: h,
            dt: h / 8.0,
            t_end: 3.0,
            rho: [1000.0, 100.0],
            mu: [10.0, 1.0],
            tau: 24.5,
            gravity: 0.98,
            variant: VelocityVariant::Equidistributing,
            curvature_degree: 2,
            extend_from_reference: false,
        }
    }

    /// Second benchmark case, `δt = h_Γ / 4`.
    pub fn case2(h: f64) -> Self {
        BubbleCase {
            rho: [1000.0, 1.0],
            mu: [10.0, 0.1],
            tau: 1.96,
            dt: h / 4.0,
            t_end: 2.0,
            ..Self::case1(h)
        }
    }

    pub fn steps(&self) -> Result<usize> {
        steps_for(self.t_end, self.dt)
    }

    pub fn mesh_params(&self) -> BubbleMeshParams {
        BubbleMeshParams::benchmark(self.h, self.h_interface)
    }
}

/// `T / δt` when it is an integer up to rounding.
pub fn steps_for(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::Parameter("time step and final time must be positive".into()));
    }
    let m = (t_end / dt).round();
    if (m * dt - t_end).abs() > 1e-9 * t_end {
        return Err(Error::Parameter(format!("final time {t_end} is not a multiple of the time step {dt}")));
    }
    Ok(m as usize)
}

#[derive(Clone, Copy, Debug)]
pub struct BubbleSample {
    pub time: f64,
    pub center: Vec2,
    pub rise_velocity: Vec2,
    pub circularity: f64,
    pub area: f64,
    pub spacing_cv: f64,
    pub energy: f64,
    pub max_div: f64,
    pub min_angle_deg: f64,
}

impl BubbleSample {
    pub const CSV_HEADER: &'static str = "time,x_c,y_c,v_x,v_y,circularity,area,spacing_cv,energy,max_div,min_angle_deg";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.6e},{:.10e},{:.3e},{:.4}",
            self.time,
            self.center.x,
            self.center.y,
            self.rise_velocity.x,
            self.rise_velocity.y,
            self.circularity,
            self.area,
            self.spacing_cv,
            self.energy,
            self.max_div,
            self.min_angle_deg
        )
    }
}

/// Extreme values with the time they occur.
#[derive(Clone, Copy, Debug)]
pub struct Extremum {
    pub value: f64,
    pub time: f64,
}

#[derive(Debug)]
pub struct BubbleFailure {
    pub time: f64,
    pub step: usize,
    pub error: Error,
}

#[derive(Debug)]
pub struct BubbleResult {
    pub series: Vec<BubbleSample>,
    pub records: Vec<StepRecord>,
    /// Set when the run stopped before `t_end`.
    pub failure: Option<BubbleFailure>,
    pub final_interface: Vec<Vec2>,
    pub final_curvature: Option<CurvatureField>,
    pub mesh: Mesh2D,
}

impl BubbleResult {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn min_circularity(&self) -> Extremum {
        extremum(&self.series, |s| -s.circularity, |s| s.circularity)
    }

    pub fn max_rise_velocity(&self) -> Extremum {
        extremum(&self.series, |s| s.rise_velocity.y, |s| s.rise_velocity.y)
    }

    pub fn final_center(&self) -> Vec2 {
        self.series.last().map(|s| s.center).unwrap_or_default()
    }

    pub fn max_spacing_cv(&self) -> f64 {
        self.series.iter().map(|s| s.spacing_cv).fold(0.0, f64::max)
    }
}

fn extremum(series: &[BubbleSample], key: impl Fn(&BubbleSample) -> f64, value: impl Fn(&BubbleSample) -> f64) -> Extremum {
    let best = series
        .iter()
        .max_by(|a, b| key(a).total_cmp(&key(b)))
        .map(|s| Extremum { value: value(s), time: s.time });
    best.unwrap_or(Extremum { value: f64::NAN, time: f64::NAN })
}

/// Per-step hook for output: time, mesh and solved state.
pub type FrameHook<'a> = dyn FnMut(usize, f64, &Mesh2D, &FlowState, &[Vec2], &CurvatureField) -> Result<()> + 'a;

/// Capillary traction `-τ κ(x)` on the inner trace; `κ` points out of the
/// bubble, `x` is projected onto the straight segment of facet `f`.
pub fn surface_tension<'a>(chain: &'a InterfaceChain, x_gamma: &'a [Vec2], field: &'a CurvatureField, tau: f64) -> impl Fn(usize, Vec2) -> Vec2 + 'a {
    move |f, x| match chain.segment_of_facet(f) {
        Some(seg) => {
            let a = x_gamma[seg];
            let b = x_gamma[(seg + 1) % x_gamma.len()];
            let d = b - a;
            let s = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
            field.eval(seg, s) * (-tau)
        }
        None => Vec2::zeros(),
    }
}

fn sample(stepper: &Stepper, mesh: &Mesh2D, chain: &InterfaceChain, time: f64, rec: Option<&StepRecord>) -> Result<BubbleSample> {
    let u = stepper.history.newest().ok_or(Error::Startup { needed: 1, available: 0 })?;
    let q = benchmark_quantities(&stepper.space, mesh, u, chain)?;
    Ok(BubbleSample {
        time,
        center: q.center,
        rise_velocity: q.rise_velocity,
        circularity: q.circularity,
        area: q.area,
        spacing_cv: spacing_cv(&chain.positions(mesh.nodes())),
        energy: rec.map_or(0.0, |r| r.energy),
        max_div: rec.map_or(0.0, |r| r.max_div),
        min_angle_deg: rec.map_or_else(|| mesh.quality().min_angle_deg, |r| r.min_angle_deg),
    })
}

/// Box nodes slide along their wall; corners are fixed.
fn sliding_walls(mesh: &Mesh2D, width: f64, height: f64) -> Vec<NodeConstraint> {
    let on_boundary = mesh.nodes_on(&[FacetLabel::Dirichlet, FacetLabel::FreeSlip, FacetLabel::TractionFree]);
    let tol = 1e-9 * width.max(height);
    mesh.nodes()
        .iter()
        .zip(on_boundary)
        .map(|(p, b)| {
            if !b {
                return [None, None];
            }
            let side = p.x.abs() < tol || (p.x - width).abs() < tol;
            let lid = p.y.abs() < tol || (p.y - height).abs() < tol;
            [side.then_some(0.0), lid.then_some(0.0)]
        })
        .collect()
}

pub fn run_bubble(case: &BubbleCase) -> Result<BubbleResult> {
    run_bubble_with(case, &mut |_, _, _, _, _, _| Ok(()))
}

/// Runs the case; recoverable breakdowns (self-intersection, tangling,
/// instability) end the run and are returned in [`BubbleResult::failure`].
pub fn run_bubble_with(case: &BubbleCase, hook: &mut FrameHook) -> Result<BubbleResult> {
    let steps = case.steps()?;
    if case.curvature_degree == 0 {
        return Err(Error::Parameter("curvature degree must be at least 1".into()));
    }
    let physics = Physics::two_phase(case.rho, case.mu);
    let mut config = SchemeConfig::new(case.order, Mode::Imex, physics);
    config.gauge = Gauge::MeanZero;
    let mut stepper = Stepper::new(config, case.k, case.dt, 0.0)?;
    let mut mesh = bubble_mesh(&case.mesh_params())?;
    let chain = InterfaceChain::extract(&mesh)?;
    let reference = mesh.clone();
    let alpha_ref = stiffening(&reference, &chain.nodes, 2.0 * case.h_interface);
    let wall_constraints = sliding_walls(&mesh, case.mesh_params().width, case.mesh_params().height);
    stepper.seed(vec![0.0; mesh.num_elements() * 2 * stepper.space.nu]);

    let mut positions: VecDeque<Vec<Vec2>> = VecDeque::from([mesh.nodes().to_vec()]);
    let mut series = vec![sample(&stepper, &mesh, &chain, 0.0, None)?];
    let mut records = Vec::with_capacity(steps);
    let mut field = curvature_isoparametric(&chain.positions(mesh.nodes()), case.curvature_degree)?;
    let dt = case.dt;
    let g = case.gravity;
    let rho = case.rho;
    let body = move |_: Vec2, s: Subdomain| Vec2::new(0.0, -rho[s.index()] * g);

    let mut failure = None;
    for m in 1..=steps {
        let t = m as f64 * dt;
        let outcome = (|| -> Result<(Mesh2D, StepRecord, CurvatureField)> {
            let u_bar = if stepper.history.len() >= 2 {
                stepper.history.extrapolate(2)?
            } else {
                stepper.history.newest().unwrap().to_vec()
            };
            let x_old = chain.positions(mesh.nodes());
            let omega_gamma = match case.variant {
                VelocityVariant::Plain => plain_velocity(&stepper.space, &mesh, &u_bar, &chain)?,
                VelocityVariant::Equidistributing => equidistributing_velocity(&stepper.space, &mesh, &u_bar, &chain, dt)?.omega,
            };
            let x_new = extrapolate_interface(&x_old, &omega_gamma, dt)?;

            let mut constraints = wall_constraints.clone();
            let base = if case.extend_from_reference { &reference } else { &mesh };
            for (i, &v) in chain.nodes.iter().enumerate() {
                let d = x_new[i] - base.nodes()[v];
                constraints[v] = [Some(d.x), Some(d.y)];
            }
            let new_mesh = if case.extend_from_reference {
                reference.move_nodes(&harmonic_extension(&reference, &alpha_ref, &constraints)?)?
            } else {
                let alpha = stiffening(&mesh, &chain.nodes, 2.0 * case.h_interface);
                mesh.move_nodes(&harmonic_extension(&mesh, &alpha, &constraints)?)?
            };

            let mut levels: Vec<&[Vec2]> = vec![new_mesh.nodes()];
            levels.extend(positions.iter().take(case.order.min(2)).map(|p| p.as_slice()));
            let omega = mesh_velocity(&levels, dt)?;

            let field = curvature_isoparametric(&x_new, case.curvature_degree)?;
            let rec = {
                let force = surface_tension(&chain, &x_new, &field, case.tau);
                stepper.advance(
                    &new_mesh,
                    &StepData {
                        omega: Some(&omega),
                        body: Some(&body),
                        interface_force: Some(&force),
                        ..Default::default()
                    },
                )?
            };
            Ok((new_mesh, rec, field))
        })();
        match outcome {
            Ok((new_mesh, rec, new_field)) => {
                mesh = new_mesh;
                field = new_field;
                positions.push_front(mesh.nodes().to_vec());
                positions.truncate(3);
                series.push(sample(&stepper, &mesh, &chain, t, Some(&rec))?);
                hook(m, t, &mesh, stepper.state.as_ref().unwrap(), &chain.positions(mesh.nodes()), &field)?;
                records.push(rec);
            }
            Err(e @ (Error::SelfIntersection { .. } | Error::MeshTangling { .. } | Error::Instability { .. })) => {
                failure = Some(BubbleFailure { time: t, step: m, error: e });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BubbleResult {
        series,
        records,
        failure,
        final_interface: chain.positions(mesh.nodes()),
        final_curvature: Some(field),
        mesh,
    })
}
