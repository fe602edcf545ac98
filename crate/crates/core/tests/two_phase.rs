//! Two-phase coupling: capillary pressure jump, consistency of the momentum
//! rows with an interface traction, and short bubble runs.

use alehdg::bench::bubble::{run_bubble, steps_for, surface_tension, BubbleCase};
use alehdg::bench::consistency::{residual_on, two_phase_residual, two_phase_square};
use alehdg::fem::field::eval_pressure;
use alehdg::fem::{DofLayout, Space};
use alehdg::hdg::{Assembler, Loads, Physics};
use alehdg::interface::{curvature_isoparametric, InterfaceChain, VelocityVariant};
use alehdg::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use alehdg::mesh::{bubble_mesh, BubbleMeshParams, Subdomain};
use alehdg::{Error, Vec2};

/// Area-weighted mean centroid pressure of each phase.
fn phase_pressures(space: &Space, mesh: &alehdg::mesh::Mesh2D, p: &[f64]) -> (f64, f64) {
    let mut acc = [(0.0, 0.0); 2];
    for e in 0..mesh.num_elements() {
        let (v, _) = eval_pressure(space, mesh, p, e, Vec2::new(1.0 / 3.0, 1.0 / 3.0)).unwrap();
        let a = mesh.area(e);
        let s = &mut acc[mesh.element_label(e).index()];
        s.0 += v * a;
        s.1 += a;
    }
    (acc[1].0 / acc[1].1, acc[0].0 / acc[0].1)
}

#[test]
fn static_bubble_has_laplace_pressure_jump() {
    // Young-Laplace: p_in - p_out = τ / R with R = 1/4
    let mesh = bubble_mesh(&BubbleMeshParams::benchmark(0.05, 0.05)).unwrap();
    let chain = InterfaceChain::extract(&mesh).unwrap();
    let x = chain.positions(mesh.nodes());
    let tau = 1.5;
    for degree in [1, 2] {
        let field = curvature_isoparametric(&x, degree).unwrap();
        let force = surface_tension(&chain, &x, &field, tau);
        let space = Space::new(2);
        let layout = DofLayout::new(&mesh, 2);
        let physics = Physics::two_phase([1.0, 1.0], [1.0, 1.0]);
        let asm = Assembler::new(&space, &mesh, &layout, &physics);
        let loads = Loads {
            interface_force: Some(&force),
            ..Default::default()
        };
        let sol = solve_condensed(&asm, &loads, &KnownValues::zeros(&layout), Gauge::MeanZero, &mut SparseSolver::new()).unwrap();
        let (p_in, p_out) = phase_pressures(&space, &mesh, &sol.state.p);
        let jump = p_in - p_out;
        assert!((jump - 4.0 * tau).abs() < 0.01 * 4.0 * tau, "degree {degree}: jump {jump}");
        let umax = sol.state.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(umax < 1e-3 * tau, "degree {degree}: spurious velocity {umax:e}");
    }
}

fn orders(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn momentum_residual_converges_at_rate_k() {
    for k in 1..=3 {
        let reports: Vec<_> = [16, 32, 64].iter().map(|&n| two_phase_residual(k, n).unwrap()).collect();
        let vol = orders(&reports.iter().map(|r| r.volume).collect::<Vec<_>>());
        let trace = orders(&reports.iter().map(|r| r.trace).collect::<Vec<_>>());
        for o in vol.iter().chain(&trace) {
            assert!(*o > k as f64 - 0.1, "k={k}: volume orders {vol:?}, trace orders {trace:?}");
        }
        assert!(vol[1] >= k as f64 - 0.01, "k={k}: volume orders {vol:?}");
    }
}

#[test]
fn residual_without_interface_traction_does_not_converge() {
    let reports: Vec<_> = [16, 32].iter().map(|&n| two_phase_residual(2, n).unwrap()).collect();
    let o = (reports[0].volume_without_traction / reports[1].volume_without_traction).log2();
    assert!(o < 1.0, "order {o}");
    assert!(reports[1].volume_without_traction > 10.0 * reports[1].volume);
}

#[test]
fn residual_rejects_misaligned_square() {
    assert!(matches!(two_phase_square(10), Err(Error::Parameter(_))));
    let mesh = two_phase_square(8).unwrap();
    let inner = (0..mesh.num_elements()).filter(|&e| mesh.element_label(e) == Subdomain::Inner).count();
    assert_eq!(inner, mesh.num_elements() / 4);
    assert!(residual_on(&mesh, 2, 0.125).unwrap().per_element.len() == mesh.num_elements());
}

#[test]
fn steps_must_divide_final_time() {
    assert_eq!(steps_for(3.0, 0.05 / 8.0).unwrap(), 480);
    assert!(steps_for(1.0, 0.3).is_err());
    assert!(steps_for(1.0, 0.0).is_err());
    let c = BubbleCase::case2(0.05);
    assert_eq!((c.rho, c.mu, c.tau, c.steps().unwrap()), ([1000.0, 1.0], [10.0, 0.1], 1.96, 160));
}

#[test]
fn bubble_without_contrast_stays_at_rest() {
    let mut case = BubbleCase::case1(0.1);
    case.tau = 0.0;
    case.rho = [1000.0; 2];
    case.mu = [10.0; 2];
    case.t_end = 0.125;
    let r = run_bubble(&case).unwrap();
    assert!(r.completed());
    for s in &r.series {
        assert!((s.center - Vec2::new(0.5, 0.5)).norm() < 1e-8, "t={} center {:?}", s.time, s.center);
        assert!(s.rise_velocity.norm() < 1e-8);
    }
}

#[test]
fn light_bubble_starts_rising() {
    for variant in [VelocityVariant::Equidistributing, VelocityVariant::Plain] {
        let mut case = BubbleCase::case1(0.1);
        case.variant = variant;
        case.t_end = 0.25;
        let r = run_bubble(&case).unwrap();
        assert!(r.completed());
        let first = r.series.first().unwrap();
        let last = r.series.last().unwrap();
        assert!(last.rise_velocity.y > 0.0 && last.center.y > first.center.y);
        // velocities increase while the bubble accelerates from rest
        assert!(r.series.windows(2).all(|w| w[1].rise_velocity.y >= w[0].rise_velocity.y - 1e-12));
        // moving nodes along averaged vertex normals is not area preserving
        let bound = if variant == VelocityVariant::Plain { 2e-2 } else { 1e-3 };
        let drift = (last.area - first.area) / first.area;
        assert!(drift.abs() < bound, "{variant:?}: area drift {drift:e}");
        assert!(r.records.iter().all(|rec| rec.divergence_ok));
        assert!(r.max_spacing_cv() < 0.05);
    }
}
