//! Manufactured-solution accuracy test on a prescribed moving mesh.
//!
//! Exact fields on `[0,1]²`, `t ∈ [0, π/2]`:
//! `u = 4 (g(x) g'(y), -g'(x) g(y)) sin t`, `g(s) = s²(1-s)²`,
//! `p = sin(x + y)`. The mesh follows `x = x0 + u(x0, 2t)`.

use std::f64::consts::FRAC_PI_2;

use super::errors::{pressure_l2_error, velocity_l2_error};
use crate::ale::PrescribedMap;
use crate::error::{Error, Result};
use crate::fem::field::project_velocity;
use crate::hdg::Physics;
use crate::linsys::Gauge;
use crate::mesh::{unit_square, FacetLabel, LabelRules, Mesh2D, Subdomain, Vec2};
use crate::time::{Mode, SchemeConfig, StepData, StepRecord, Stepper};

fn g(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}
fn g1(s: f64) -> f64 {
    2.0 * s - 6.0 * s * s + 4.0 * s * s * s
}
fn g2(s: f64) -> f64 {
    2.0 - 12.0 * s + 12.0 * s * s
}
fn g3(s: f64) -> f64 {
    -12.0 + 24.0 * s
}

/// Spatial profile `U` with `u = U sin t`.
pub fn profile(x: Vec2) -> Vec2 {
    Vec2::new(4.0 * g(x.x) * g1(x.y), -4.0 * g1(x.x) * g(x.y))
}

pub fn exact_velocity(x: Vec2, t: f64) -> Vec2 {
    profile(x) * t.sin()
}

pub fn exact_pressure(x: Vec2) -> f64 {
    (x.x + x.y).sin()
}

/// `ρ (∂_t u + (u·∇)u) - μ Δu + ∇p` at `(x, t)`, `ρ = 1`.
pub fn source(x: Vec2, t: f64, mu: f64) -> Vec2 {
    let (s, c) = t.sin_cos();
    let u = profile(x);
    // rows: ∇U_1, ∇U_2
    let du1 = Vec2::new(4.0 * g1(x.x) * g1(x.y), 4.0 * g(x.x) * g2(x.y));
    let du2 = Vec2::new(-4.0 * g2(x.x) * g(x.y), -4.0 * g1(x.x) * g1(x.y));
    let lap = Vec2::new(
        4.0 * (g2(x.x) * g1(x.y) + g(x.x) * g3(x.y)),
        -4.0 * (g3(x.x) * g(x.y) + g1(x.x) * g2(x.y)),
    );
    let conv = Vec2::new(u.dot(&du1), u.dot(&du2)) * (s * s);
    let gp = (x.x + x.y).cos();
    u * c + conv - lap * (mu * s) + Vec2::new(gp, gp)
}

/// `A_t(x0) = x0 + U(x0) sin 2t` with `∂_t A_t = 2 U(x0) cos 2t`.
pub fn accuracy_map() -> PrescribedMap {
    PrescribedMap::new(|x0, t| profile(x0) * (2.0 * t).sin(), |x0, t| profile(x0) * (2.0 * (2.0 * t).cos()))
}

pub const FINAL_TIME: f64 = FRAC_PI_2;

#[derive(Clone, Debug)]
pub struct AccuracyCase {
    pub k: usize,
    /// `1/h`: cells per side of the structured mesh.
    pub n: usize,
    pub mu: f64,
    pub order: usize,
    pub steps: usize,
    /// `false` freezes the mesh (the map is not applied).
    pub moving: bool,
    pub mode: Mode,
}

impl AccuracyCase {
    /// Default step count `steps_per_cell · n`.
    pub fn new(k: usize, n: usize, mu: f64, steps_per_cell: usize) -> Self {
        AccuracyCase {
            k,
            n,
            mu,
            order: 3,
            steps: steps_per_cell * n,
            moving: true,
            mode: Mode::Imex,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AccuracyResult {
    pub velocity_error: f64,
    pub pressure_error: f64,
    /// Largest `max_div / ‖u_h‖` over all steps.
    pub worst_divergence: f64,
    pub worst_jump: f64,
    pub records: Vec<StepRecord>,
    /// Velocity coefficients at the final time.
    pub final_u: Vec<f64>,
}

pub fn reference_mesh(n: usize) -> Result<Mesh2D> {
    unit_square(n, &LabelRules::uniform(FacetLabel::Dirichlet))
}

/// Runs one resolution to `T = π/2`. The first `order` levels are the L2
/// projections of the exact velocity on the mapped meshes.
pub fn run_case(case: &AccuracyCase) -> Result<AccuracyResult> {
    if case.steps < case.order || !(1..=4).contains(&case.k) {
        return Err(Error::Parameter(format!("bad accuracy case {case:?}")));
    }
    let dt = FINAL_TIME / case.steps as f64;
    let reference = reference_mesh(case.n)?;
    let map = accuracy_map();
    let mesh_at = |t: f64| if case.moving { map.mesh_at(&reference, t) } else { Ok(reference.clone()) };
    let mut config = SchemeConfig::new(case.order, case.mode, Physics::uniform(1.0, case.mu));
    config.gauge = Gauge::MeanZero;
    let mut stepper = Stepper::new(config, case.k, dt, 0.0)?;
    for j in 0..case.order {
        let t = j as f64 * dt;
        let mesh = mesh_at(t)?;
        stepper.seed(project_velocity(&stepper.space, &mesh, |x| exact_velocity(x, t)));
    }
    let mut worst_divergence: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    let mut records = Vec::with_capacity(case.steps);
    let mut mesh = reference.clone();
    for m in case.order..=case.steps {
        let t = m as f64 * dt;
        mesh = mesh_at(t)?;
        let omega = if case.moving { map.omega_at(reference.nodes(), t) } else { vec![Vec2::zeros(); reference.num_nodes()] };
        let mu = case.mu;
        let body = move |x: Vec2, _: Subdomain| source(x, t, mu);
        let rec = stepper.advance(
            &mesh,
            &StepData {
                omega: Some(&omega),
                body: Some(&body),
                ..Default::default()
            },
        )?;
        let norm = stepper.state.as_ref().unwrap().velocity_l2(&stepper.space, &mesh).max(1e-300);
        worst_divergence = worst_divergence.max(rec.max_div / norm);
        worst_jump = worst_jump.max(rec.max_jump / norm);
        records.push(rec);
    }
    let state = stepper.state.as_ref().unwrap();
    let t_end = case.steps as f64 * dt;
    Ok(AccuracyResult {
        velocity_error: velocity_l2_error(&stepper.space, &mesh, &state.u, |x| exact_velocity(x, t_end)),
        pressure_error: pressure_l2_error(&stepper.space, &mesh, &state.p, exact_pressure),
        worst_divergence,
        worst_jump,
        records,
        final_u: state.u.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_source(x: Vec2, t: f64, mu: f64) -> Vec2 {
        let e = 1e-4;
        let u = |x: Vec2, t: f64| exact_velocity(x, t);
        let ex = Vec2::new(e, 0.0);
        let ey = Vec2::new(0.0, e);
        let dt = (u(x, t + e) - u(x, t - e)) / (2.0 * e);
        let dx = (u(x + ex, t) - u(x - ex, t)) / (2.0 * e);
        let dy = (u(x + ey, t) - u(x - ey, t)) / (2.0 * e);
        let lap = (u(x + ex, t) + u(x - ex, t) + u(x + ey, t) + u(x - ey, t) - u(x, t) * 4.0) / (e * e);
        let v = u(x, t);
        let gp = Vec2::new(
            (exact_pressure(x + ex) - exact_pressure(x - ex)) / (2.0 * e),
            (exact_pressure(x + ey) - exact_pressure(x - ey)) / (2.0 * e),
        );
        dt + dx * v.x + dy * v.y - lap * mu + gp
    }

    #[test]
    fn source_matches_finite_differences() {
        for &(x, y, t) in &[(0.3, 0.7, 0.4), (0.81, 0.12, 1.3), (0.5, 0.5, 0.05)] {
            let p = Vec2::new(x, y);
            for mu in [1.0, 1e-6] {
                let d = (source(p, t, mu) - fd_source(p, t, mu)).norm();
                assert!(d < 1e-5, "{d:e} at {p:?}");
            }
        }
    }

    #[test]
    fn profile_is_solenoidal_and_vanishes_on_the_boundary() {
        let e = 1e-5;
        for &(x, y) in &[(0.2, 0.9), (0.6, 0.35)] {
            let p = Vec2::new(x, y);
            let div = (profile(p + Vec2::new(e, 0.0)).x - profile(p - Vec2::new(e, 0.0)).x
                + profile(p + Vec2::new(0.0, e)).y
                - profile(p - Vec2::new(0.0, e)).y)
                / (2.0 * e);
            assert!(div.abs() < 1e-9);
        }
        for s in [0.0, 0.3, 1.0] {
            for b in [Vec2::new(s, 0.0), Vec2::new(s, 1.0), Vec2::new(0.0, s), Vec2::new(1.0, s)] {
                assert_eq!(profile(b).norm(), 0.0);
            }
        }
    }

    #[test]
    fn map_returns_to_the_reference_at_the_final_time() {
        let x0 = [Vec2::new(0.3, 0.6)];
        let x = accuracy_map().positions(&x0, FINAL_TIME);
        assert!((x[0] - x0[0]).norm() < 1e-16);
    }
}
