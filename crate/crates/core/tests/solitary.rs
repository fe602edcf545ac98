//! Short solitary-wave runs: initial data, propagation direction and
//! volume conservation of the free-surface motion.

use alehdg::bench::solitary::{run_solitary, SolitaryCase};
use alehdg::mesh::FacetLabel;
use alehdg::Error;

fn short(t_end: f64) -> SolitaryCase {
    SolitaryCase {
        t_end,
        ..Default::default()
    }
}

#[test]
fn initial_surface_is_the_laitone_hump() {
    let c = SolitaryCase::default();
    assert_eq!(c.elevation(c.crest), c.depth + c.height);
    let mesh = c.mesh().unwrap();
    let surface = mesh.nodes_on(&[FacetLabel::TractionFree]);
    for (p, _) in mesh.nodes().iter().zip(&surface).filter(|(_, &s)| s) {
        assert!((p.y - c.elevation(p.x)).abs() < 1e-12);
    }
    // horizontal velocity under the crest is sqrt(g d) H / d, vertical vanishes there
    let v = c.initial_velocity_at(alehdg::Vec2::new(c.crest, 5.0));
    assert!((v.x - (c.gravity * c.depth).sqrt() * c.height / c.depth).abs() < 1e-12 && v.y.abs() < 1e-12);
}

#[test]
fn crest_travels_toward_the_wall() {
    let r = run_solitary(&short(1.0)).unwrap();
    let first = &r.series[0];
    assert_eq!(first.max_height, 12.0);
    assert_eq!(first.crest_x, 0.0);
    let last = r.series.last().unwrap();
    // long-wave speed sqrt(g (d + H)) ≈ 10.8
    assert!(last.crest_x > 6.0 && last.crest_x < 16.0, "crest at {}", last.crest_x);
    for w in r.series.windows(2) {
        assert!(w[1].crest_x >= w[0].crest_x);
    }
    let drift = (last.volume - first.volume) / first.volume;
    assert!(drift.abs() < 1e-4, "volume drift {drift:e}");
    assert!(r.records.iter().all(|rec| rec.divergence_ok));
    // bottom pressure is at least hydrostatic under still water
    assert!(r.series[1..].iter().all(|s| s.max_pressure > 0.9 * 9.8 * 10.0));
}

#[test]
fn hump_released_from_rest_spreads() {
    let case = SolitaryCase {
        initial_velocity: false,
        ..short(2.0)
    };
    let r = run_solitary(&case).unwrap();
    assert!(r.series.last().unwrap().max_height < 12.0 - 0.1);
    assert!(r.series.iter().all(|s| s.max_height.is_finite()));
}

#[test]
fn bad_tank_is_rejected() {
    let case = SolitaryCase {
        x1: -100.0,
        ..Default::default()
    };
    assert!(matches!(case.mesh(), Err(Error::Parameter(_))));
    let case = SolitaryCase {
        dt: 0.07,
        ..short(1.0)
    };
    assert!(matches!(run_solitary(&case), Err(Error::Parameter(_))));
}
