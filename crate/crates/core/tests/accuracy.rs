//! Moving-mesh manufactured solution: temporal orders, scheme agreement and
//! the coarse-mesh error level.

use alehdg::bench::accuracy::{reference_mesh, run_case, AccuracyCase};
use alehdg::bench::errors::velocity_l2_error;
use alehdg::fem::{field::project_velocity, Space};
use alehdg::time::Mode;

fn diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn initial_state_is_exact() {
    let mesh = reference_mesh(4).unwrap();
    let space = Space::new(2);
    let u0 = project_velocity(&space, &mesh, |x| alehdg::bench::accuracy::exact_velocity(x, 0.0));
    assert!(u0.iter().all(|c| *c == 0.0));
    assert_eq!(velocity_l2_error(&space, &mesh, &u0, |x| alehdg::bench::accuracy::exact_velocity(x, 0.0)), 0.0);
}

#[test]
fn temporal_error_converges_at_the_scheme_order() {
    // temporal error = distance to a fine-step solution on the same mesh
    for (s, steps) in [(1usize, [8usize, 16, 32]), (2, [8, 16, 32]), (3, [32, 64, 128])] {
        let run = |n_steps: usize| {
            let mut c = AccuracyCase::new(2, 4, 1.0, 1);
            c.steps = n_steps;
            c.order = s;
            run_case(&c).unwrap().final_u
        };
        let reference = run(1024);
        let errs: Vec<f64> = steps.iter().map(|&m| diff(&run(m), &reference)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= s as f64 - 0.2, "s={s}: errors {errs:?}");
        }
    }
}

#[test]
fn implicit_and_imex_bdf2_agree() {
    let mut errs = Vec::new();
    for mode in [Mode::FullyImplicit, Mode::Imex] {
        let mut c = AccuracyCase::new(2, 8, 1.0, 4);
        c.order = 2;
        c.mode = mode;
        let r = run_case(&c).unwrap();
        if mode == Mode::FullyImplicit {
            assert!(r.records.iter().all(|rec| rec.picard_iterations >= 2));
        }
        errs.push(r.velocity_error);
    }
    assert!((errs[0] / errs[1] - 1.0).abs() < 0.1, "{errs:?}");
}

#[test]
fn coarse_mesh_error_and_divergence() {
    // reference levels 2.27e-4 (μ = 1) and 1.45e-4 (μ = 1e-6)
    for (mu, level) in [(1.0, 2.27e-4), (1e-6, 1.45e-4)] {
        let r = run_case(&AccuracyCase::new(2, 8, mu, 4)).unwrap();
        assert!(r.velocity_error < 3.0 * level && r.velocity_error > level / 3.0, "{mu}: {:e}", r.velocity_error);
        assert!(r.worst_divergence <= 1e-9 && r.worst_jump <= 1e-9);
        assert!(r.records.iter().all(|rec| rec.divergence_ok));
    }
}
