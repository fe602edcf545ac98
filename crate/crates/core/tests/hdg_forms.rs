//! Element operators checked against independent dense and quadrature oracles.

mod common;

use alehdg::fem::field::{interpolate_facet, project_velocity};
use alehdg::fem::{eval_velocity, DofLayout, ElementGeometry, Space};
use alehdg::hdg::{Assembler, LocalIndex, Physics};
use alehdg::linsys::{solve_condensed, Gauge, KnownValues, SparseSolver};
use alehdg::mesh::{
    build_mesh, bubble_mesh, rectangle, BubbleMeshParams, FacetLabel, LabelRules, Mesh2D, Subdomain,
};
use alehdg::Vec2;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

fn single(v: [Vec2; 3], label: FacetLabel) -> Mesh2D {
    build_mesh(v.to_vec(), vec![[0, 1, 2]], &LabelRules::uniform(label)).unwrap()
}

fn reference_triangle() -> Mesh2D {
    single(
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        FacetLabel::Dirichlet,
    )
}

/// Local vector `[u, p, (û, σ̂) per facet]` of element `e`.
fn local_vector(mesh: &Mesh2D, space: &Space, e: usize, u: &[f64], uhat: &[f64], sigma: &[f64]) -> DVector<f64> {
    let ix = LocalIndex::new(space);
    let mut x = DVector::zeros(ix.size());
    for r in 0..2 * space.nu {
        x[r] = u[e * 2 * space.nu + r];
    }
    for (lf, &f) in mesh.element_facets(e).iter().enumerate() {
        for i in 0..space.nf {
            x[ix.uhat(lf, i)] = uhat[f * space.nf + i];
            x[ix.sigma(lf, i)] = sigma[f * space.nf + i];
        }
    }
    x
}

/// Indices of the `(u, û)` unknowns.
fn velocity_indices(ix: &LocalIndex) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..2 * ix.nu).collect();
    for lf in 0..3 {
        idx.extend((0..ix.nf).map(|i| ix.uhat(lf, i)));
    }
    idx
}

fn viscous_matrix(space: &Space, mesh: &Mesh2D, physics: &Physics) -> DMatrix<f64> {
    let layout = DofLayout::new(mesh, space.k);
    let asm = Assembler::new(space, mesh, &layout, physics);
    let ix = LocalIndex::new(space);
    let geo = ElementGeometry::new(space, mesh, 0);
    let mut m = DMatrix::zeros(ix.size(), ix.size());
    asm.add_viscous(0, &geo, 1.0, &mut m).unwrap();
    m
}

#[test]
fn viscous_block_is_symmetric_with_rigid_kernel() {
    let space = Space::new(2);
    let mesh = reference_triangle();
    let m = viscous_matrix(&space, &mesh, &Physics::uniform(1.0, 1.0));
    let idx = velocity_indices(&LocalIndex::new(&space));
    let a = m.select_rows(&idx).select_columns(&idx);
    assert!((&a - a.transpose()).amax() < 1e-12 * a.amax());
    let eig = a.symmetric_eigen();
    let max = eig.eigenvalues.amax();
    let zero = eig.eigenvalues.iter().filter(|l| l.abs() < 1e-10 * max).count();
    let negative = eig.eigenvalues.iter().filter(|l| **l < -1e-10 * max).count();
    assert_eq!(zero, 3, "eigenvalues {:?}", eig.eigenvalues);
    assert_eq!(negative, 0);
}

#[test]
fn viscous_kernel_contains_rigid_motions() {
    let mesh = single(
        [Vec2::new(0.1, -0.2), Vec2::new(1.3, 0.4), Vec2::new(-0.2, 0.9)],
        FacetLabel::Dirichlet,
    );
    for k in 1..=3 {
        let space = Space::new(k);
        let m = viscous_matrix(&space, &mesh, &Physics::uniform(1.0, 1.0));
        let fields: [fn(Vec2) -> Vec2; 3] = [|x| Vec2::new(-x.y, x.x), |_| Vec2::new(1.0, 0.0), |_| Vec2::new(0.3, -2.0)];
        for field in fields {
            let u = project_velocity(&space, &mesh, field);
            let uhat = interpolate_facet(&space, &mesh, |f, x| field(x).dot(&mesh.facet_frame(f).tangent));
            let sigma = vec![0.0; uhat.len()];
            let x = local_vector(&mesh, &space, 0, &u, &uhat, &sigma);
            let r = &m * &x;
            assert!(r.amax() < 1e-11 * m.amax(), "k={k}: residual {}", r.amax());
        }
    }
}

#[test]
fn nonpositive_penalty_is_rejected() {
    let space = Space::new(2);
    let mesh = reference_triangle();
    let layout = DofLayout::new(&mesh, 2);
    let mut physics = Physics::uniform(1.0, 1.0);
    physics.alpha = 0.0;
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let geo = ElementGeometry::new(&space, &mesh, 0);
    let ix = LocalIndex::new(&space);
    let mut m = DMatrix::zeros(ix.size(), ix.size());
    let err = asm.add_viscous(0, &geo, 1.0, &mut m).unwrap_err();
    assert_eq!(err.kind(), "parameter");
}

fn divergence_block(space: &Space, mesh: &Mesh2D) -> DMatrix<f64> {
    let layout = DofLayout::new(mesh, space.k);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(space, mesh, &layout, &physics);
    let ix = LocalIndex::new(space);
    let geo = ElementGeometry::new(space, mesh, 0);
    let mut m = DMatrix::zeros(ix.size(), ix.size());
    asm.add_divergence(0, &geo, &mut m);
    m
}

#[test]
fn divergence_block_rank_and_kernels() {
    let space = Space::new(2);
    let mesh = single(
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.2), Vec2::new(0.3, 0.8)],
        FacetLabel::Dirichlet,
    );
    let m = divergence_block(&space, &mesh);
    let ix = LocalIndex::new(&space);
    let mut rows: Vec<usize> = (0..ix.np).map(|i| ix.p(i)).collect();
    for lf in 0..3 {
        rows.extend((0..ix.nf).map(|i| ix.sigma(lf, i)));
    }
    let cols: Vec<usize> = (0..2 * ix.nu).collect();
    let d = m.select_rows(&rows).select_columns(&cols);
    assert_eq!((d.nrows(), d.ncols()), (12, 12));
    // the adjoint block sits in the momentum rows
    let dt = m.select_rows(&cols).select_columns(&rows);
    assert!((&dt - d.transpose()).amax() == 0.0);

    let sv = d.clone().svd(false, false).singular_values;
    let smax = sv.amax();
    let rank = sv.iter().filter(|s| **s > 1e-10 * smax).count();
    // one velocity kernel direction: curl of the cubic bubble
    assert_eq!(rank, 11, "singular values {sv:?}");

    let v = mesh.vertices(0);
    let map = alehdg::fem::AffineMap::new(v);
    let bubble_curl = |x: Vec2| {
        let xi = map.inverse(x);
        let l = [1.0 - xi.x - xi.y, xi.x, xi.y];
        let gl = [map.grad(Vec2::new(-1.0, -1.0)), map.grad(Vec2::new(1.0, 0.0)), map.grad(Vec2::new(0.0, 1.0))];
        let g = gl[0] * l[1] * l[2] + gl[1] * l[0] * l[2] + gl[2] * l[0] * l[1];
        Vec2::new(g.y, -g.x)
    };
    let u = project_velocity(&space, &mesh, bubble_curl);
    let du = &d * DVector::from_column_slice(&u);
    assert!(du.amax() < 1e-12 * smax * DVector::from_column_slice(&u).amax());

    // (q, τ̂) = (1, -1) annihilates every velocity
    let mut y = DVector::zeros(rows.len());
    let p_const = project_pressure_const(&space, &mesh);
    for i in 0..ix.np {
        y[i] = p_const[i];
    }
    for j in ix.np..rows.len() {
        y[j] = -1.0;
    }
    let yt_d = d.transpose() * y;
    assert!(yt_d.amax() < 1e-12 * smax);
}

fn project_pressure_const(space: &Space, mesh: &Mesh2D) -> Vec<f64> {
    alehdg::fem::field::project_pressure(space, mesh, |_| 1.0)
}

#[test]
fn divergence_pairing_vanishes_for_constant_velocity() {
    let mesh = rectangle(0.0, 2.0, 0.0, 1.0, 5, 3, &LabelRules::uniform(FacetLabel::Dirichlet)).unwrap();
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let u = project_velocity(&space, &mesh, |_| Vec2::new(1.0, 0.0));
    let sigma = vec![1.0; layout.dim_facet()];
    let uhat = vec![0.0; layout.dim_facet()];
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let ix = LocalIndex::new(&space);
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&space, &mesh, e);
        let mut m = DMatrix::zeros(ix.size(), ix.size());
        asm.add_divergence(e, &geo, &mut m);
        let x = local_vector(&mesh, &space, e, &u, &uhat, &vec![0.0; layout.dim_facet()]);
        let mut y = local_vector(&mesh, &space, e, &vec![0.0; layout.dim_v()], &uhat, &sigma);
        for i in 0..ix.np {
            y[ix.p(i)] = rng.gen_range(-1.0..1.0);
        }
        total += y.dot(&(&m * x));
    }
    assert!(total.abs() < 1e-13, "{total}");

    // zero velocity gives a zero action
    let zero = DVector::zeros(ix.size());
    let geo = ElementGeometry::new(&space, &mesh, 0);
    let mut m = DMatrix::zeros(ix.size(), ix.size());
    asm.add_divergence(0, &geo, &mut m);
    assert_eq!((&m * zero).amax(), 0.0);
}

fn split_square(n: usize) -> Mesh2D {
    let rules = LabelRules {
        boundary: Box::new(|_, _| FacetLabel::Dirichlet),
        subdomain: Box::new(|c: Vec2| if c.x < 0.5 { Subdomain::Inner } else { Subdomain::Outer }),
    };
    rectangle(0.0, 1.0, 0.0, 1.0, n, n, &rules).unwrap()
}

#[test]
fn mass_matches_area_and_densities() {
    let mesh = split_square(4);
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let u = project_velocity(&space, &mesh, |_| Vec2::new(1.0, 0.0));
    for (rho, expected) in [
        ([1.0, 1.0], mesh.total_area()),
        (
            [1000.0, 100.0],
            1000.0 * mesh.subdomain_area(Subdomain::Outer) + 100.0 * mesh.subdomain_area(Subdomain::Inner),
        ),
    ] {
        let physics = Physics::two_phase(rho, [1.0, 1.0]);
        let asm = Assembler::new(&space, &mesh, &layout, &physics);
        let ix = LocalIndex::new(&space);
        let mut total = 0.0;
        for e in 0..mesh.num_elements() {
            let geo = ElementGeometry::new(&space, &mesh, e);
            let mut m = DMatrix::zeros(ix.size(), ix.size());
            asm.add_mass(&geo, physics.rho(mesh.element_label(e)), &mut m);
            let zf = vec![0.0; layout.dim_facet()];
            let x = local_vector(&mesh, &space, e, &u, &zf, &zf);
            total += x.dot(&(&m * &x));
        }
        assert!((total - expected).abs() < 1e-10 * expected, "{total} vs {expected}");
    }
    assert!(Physics::two_phase([1.0, -1.0], [1.0, 1.0]).validate().is_err());
}

#[test]
fn mass_block_matches_gram_matrix() {
    let mesh = single(
        [Vec2::new(0.0, 0.0), Vec2::new(0.7, 0.1), Vec2::new(0.2, 0.5)],
        FacetLabel::Dirichlet,
    );
    let space = Space::new(3);
    let geo = ElementGeometry::new(&space, &mesh, 0);
    let nu = space.nu;
    let mut gram = DMatrix::<f64>::zeros(nu, nu);
    for q in 0..space.vol.len() {
        for i in 0..nu {
            for j in 0..nu {
                gram[(i, j)] += geo.jxw[q] * space.vol.u_val[q * nu + i] * space.vol.u_val[q * nu + j];
            }
        }
    }
    let scaled = DMatrix::<f64>::identity(nu, nu) * (2.0 * mesh.area(0));
    assert!((gram - &scaled).amax() < 1e-12 * scaled.amax());
}

fn linear_omega(mesh: &Mesh2D) -> Vec<Vec2> {
    mesh.nodes().iter().map(|x| Vec2::new(0.3 * x.x + 0.1 * x.y, -0.2 * x.x + 0.5 * x.y)).collect()
}

#[test]
fn implicit_convection_vanishes_when_fluid_moves_with_mesh() {
    let mesh = rectangle(0.0, 1.0, 0.0, 1.0, 3, 3, &LabelRules::uniform(FacetLabel::FreeSlip)).unwrap();
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let omega = linear_omega(&mesh);
    let u = project_velocity(&space, &mesh, |x| Vec2::new(0.3 * x.x + 0.1 * x.y, -0.2 * x.x + 0.5 * x.y));
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let uhat: Vec<f64> = (0..layout.dim_facet()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let zero = vec![0.0; layout.dim_facet()];
    let ix = LocalIndex::new(&space);
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&space, &mesh, e);
        let mut m = DMatrix::zeros(ix.size(), ix.size());
        asm.add_convection_implicit(e, &geo, 1.0, &u, Some(&omega), &mut m);
        let x = local_vector(&mesh, &space, e, &u, &uhat, &zero);
        assert!((&m * x).amax() < 1e-12);
    }
}

#[test]
fn upwind_switch_follows_flux_sign() {
    let mesh = single(
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.1), Vec2::new(0.4, 0.9)],
        FacetLabel::FreeSlip,
    );
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let ix = LocalIndex::new(&space);
    let c = Vec2::new(1.0, 0.25);
    let u = project_velocity(&space, &mesh, |_| c);
    let geo = ElementGeometry::new(&space, &mesh, 0);
    let mut m = DMatrix::zeros(ix.size(), ix.size());
    asm.add_convection_implicit(0, &geo, 1.0, &u, None, &mut m);
    for lf in 0..3 {
        let n = mesh.outward_normal(0, lf);
        let cols: Vec<usize> = (0..ix.nf).map(|i| ix.uhat(lf, i)).collect();
        let uhat_cols = m.select_columns(&cols).amax();
        if c.dot(&n) >= 0.0 {
            // outflow: upwind value is the element trace, û never enters as a trial
            assert_eq!(uhat_cols, 0.0, "facet {lf}");
        } else {
            assert!(uhat_cols > 1e-3, "facet {lf}");
            // and the element trace does not enter the facet rows
            let rows: Vec<usize> = (0..ix.nf).map(|i| ix.uhat(lf, i)).collect();
            let u_cols: Vec<usize> = (0..2 * ix.nu).collect();
            assert_eq!(m.select_rows(&rows).select_columns(&u_cols).amax(), 0.0);
        }
    }
}

/// Stokes state on a Dirichlet square: divergence-free, normally continuous,
/// with vanishing normal trace on the boundary.
fn solenoidal_state(n: usize, k: usize) -> (Mesh2D, Space, Vec<f64>) {
    let mesh = common::dirichlet_square(n);
    let (space, state) = common::stokes(&mesh, k, 1.0, Gauge::MeanZero).unwrap();
    (mesh, space, state.u)
}

#[test]
fn convection_energy_identity_and_dissipation() {
    let (mesh, space, u) = solenoidal_state(4, 2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let boundary = mesh.nodes_on(&[FacetLabel::Dirichlet]);
    let omega: Vec<Vec2> = boundary
        .iter()
        .map(|&b| if b { Vec2::zeros() } else { Vec2::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)) })
        .collect();
    let uhat: Vec<f64> = (0..layout.dim_facet()).map(|_| rng.gen_range(-0.05..0.05)).collect();
    let zero = vec![0.0; layout.dim_facet()];
    let ix = LocalIndex::new(&space);
    let nu = space.nu;

    let (mut form, mut vol_term) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&space, &mesh, e);
        let mut m = DMatrix::zeros(ix.size(), ix.size());
        asm.add_convection_implicit(e, &geo, 1.0, &u, Some(&omega), &mut m);
        let x = local_vector(&mesh, &space, e, &u, &uhat, &zero);
        form += x.dot(&(&m * &x));
        // ½ ∫ |u|² div ω with ω linear per element
        let t = mesh.triangles()[e];
        let g1 = geo.map.grad(Vec2::new(1.0, 0.0));
        let g2 = geo.map.grad(Vec2::new(0.0, 1.0));
        let div_om = omega[t[0]].dot(&(-g1 - g2)) + omega[t[1]].dot(&g1) + omega[t[2]].dot(&g2);
        for q in 0..space.vol.len() {
            let s = eval_velocity(&space, &mesh, &u, e, space.vol.points[q]).unwrap();
            vol_term += 0.5 * geo.jxw[q] * s.value.norm_squared() * div_om;
        }
    }

    // DISP = Σ_T ∮ ½ |(u-ω)·n| (u·t - û)²
    let mut disp = 0.0;
    for e in 0..mesh.num_elements() {
        let t = mesh.triangles()[e];
        for (lf, &f) in mesh.element_facets(e).iter().enumerate() {
            let n = mesh.outward_normal(e, lf);
            let fr = mesh.facet_frame(f);
            let [a, b] = mesh.facets()[f].nodes;
            let (xa, xb) = (mesh.nodes()[a], mesh.nodes()[b]);
            // same points as the assembler: the upwind switch is pointwise
            for (s, w) in space.seg_points.iter().zip(&space.seg_weights) {
                let x = xa + (xb - xa) * *s;
                let map = alehdg::fem::AffineMap::new(mesh.vertices(e));
                let xi = map.inverse(x);
                let uv = eval_velocity(&space, &mesh, &u, e, xi).unwrap().value;
                let l = [1.0 - xi.x - xi.y, xi.x, xi.y];
                let om = omega[t[0]] * l[0] + omega[t[1]] * l[1] + omega[t[2]] * l[2];
                let psi = space.facet_basis.eval(*s);
                let uh: f64 = (0..space.nf).map(|i| uhat[f * space.nf + i] * psi[i]).sum();
                disp += 0.5 * w * fr.length * (uv - om).dot(&n).abs() * (uv.dot(&fr.tangent) - uh).powi(2);
            }
        }
    }
    let _ = nu;
    assert!(disp > 0.0);
    let lhs = form - vol_term;
    assert!((lhs - disp).abs() < 1e-11 * disp.max(1.0), "{lhs} vs {disp}");
}

#[test]
fn explicit_convection_trivial_cases() {
    let mesh = common::dirichlet_square(3);
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let omega = linear_omega(&mesh);
    let u_om = project_velocity(&space, &mesh, |x| Vec2::new(0.3 * x.x + 0.1 * x.y, -0.2 * x.x + 0.5 * x.y));
    let zero_u = vec![0.0; layout.dim_v()];
    let ix = LocalIndex::new(&space);
    for e in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(&space, &mesh, e);
        for (u, om) in [(&u_om, Some(omega.as_slice())), (&zero_u, None)] {
            let mut rhs = DVector::zeros(ix.size());
            asm.add_convection_explicit(e, &geo, 1.0, u, om, None, &mut rhs);
            assert!(rhs.amax() < 1e-13);
        }
    }
}

#[test]
fn explicit_convection_matches_quadrature_oracle() {
    let mesh = single(
        [Vec2::new(0.1, 0.0), Vec2::new(1.0, 0.3), Vec2::new(0.2, 0.8)],
        FacetLabel::FreeSlip,
    );
    let k = 2;
    let space = Space::new(k);
    let layout = DofLayout::new(&mesh, k);
    let physics = Physics::uniform(1.3, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let field = |x: Vec2| Vec2::new((x.x + 2.0 * x.y).sin(), (x.x * x.y).cos());
    let u = project_velocity(&space, &mesh, field);
    let omega: Vec<Vec2> = mesh.nodes().iter().map(|x| Vec2::new(0.2 * x.y, -0.1 * x.x)).collect();
    let geo = ElementGeometry::new(&space, &mesh, 0);
    let ix = LocalIndex::new(&space);
    let mut rhs = DVector::zeros(ix.size());
    asm.add_convection_explicit(0, &geo, 1.3, &u, Some(&omega), None, &mut rhs);

    // oracle: brute-force quadrature at doubled degree, basis evaluated directly
    let rich = Space::with_degree(k, 6 * k);
    let map = alehdg::fem::AffineMap::new(mesh.vertices(0));
    let om_at = |x: Vec2| Vec2::new(0.2 * x.y, -0.1 * x.x);
    let div_om = 0.0;
    let nu = space.nu;
    let mut oracle = DVector::<f64>::zeros(2 * nu);
    for (xi, w) in rich.vol.points.iter().zip(&rich.vol.weights) {
        let s = eval_velocity(&space, &mesh, &u, 0, *xi).unwrap();
        let x = map.map(*xi);
        let wrel = s.value - om_at(x);
        let divw = s.grad[(0, 0)] + s.grad[(1, 1)] - div_om;
        let phi = space.basis_u.eval(*xi);
        let gphi = space.basis_u.eval_grad(*xi);
        for j in 0..nu {
            let gj = map.grad(gphi[j]);
            for b in 0..2 {
                oracle[b * nu + j] += 1.3 * w * map.det * s.value[b] * (divw * phi[j] + wrel.dot(&gj));
            }
        }
    }
    let seg = alehdg::fem::quadrature::gauss_legendre(3 * k);
    for lf in 0..3 {
        let f = mesh.element_facets(0)[lf];
        let [a, b] = mesh.facets()[f].nodes;
        let (xa, xb) = (mesh.nodes()[a], mesh.nodes()[b]);
        let n = mesh.outward_normal(0, lf);
        let t = mesh.facet_frame(f).tangent;
        let len = (xb - xa).norm();
        for (s, w) in seg.points.iter().zip(&seg.weights) {
            let x = xa + (xb - xa) * *s;
            let xi = map.inverse(x);
            let uv = eval_velocity(&space, &mesh, &u, 0, xi).unwrap().value;
            let wn = (uv - om_at(x)).dot(&n);
            let phi = space.basis_u.eval(xi);
            for j in 0..nu {
                for bb in 0..2 {
                    oracle[bb * nu + j] -= 1.3 * w * len * wn * uv.dot(&t) * phi[j] * t[bb];
                }
            }
        }
    }
    let got = rhs.rows(0, 2 * nu).into_owned();
    assert!((&got - &oracle).amax() < 1e-10, "{}", (&got - &oracle).amax());
}

fn small_bubble_mesh() -> Mesh2D {
    bubble_mesh(&BubbleMeshParams::benchmark(1.0 / 10.0, 1.0 / 20.0)).unwrap()
}

#[test]
fn surface_tension_loads() {
    let mesh = small_bubble_mesh();
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::two_phase([1000.0, 100.0], [10.0, 1.0]);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let tau = 24.5;
    let iface = mesh.facets_with_label(FacetLabel::Interface);
    let perimeter: f64 = iface.iter().map(|&f| mesh.facet_frame(f).length).sum();

    let zero = asm.interface_load(&|_, _| Vec2::zeros()).unwrap();
    assert!(zero.iter().all(|v| *v == 0.0));

    let c = Vec2::new(0.4, -1.5);
    let e_dir = Vec2::new(2.0, 0.5);
    let v = project_velocity(&space, &mesh, |_| e_dir);
    let pairing = asm.interface_load_pairing(&|_, _| c * tau, &v).unwrap();
    assert!((pairing - tau * c.dot(&e_dir) * perimeter).abs() < 1e-10 * pairing.abs());

    // support: inner elements touching the interface only
    let load = asm.interface_load(&|_, _| c).unwrap();
    let nu = space.nu;
    let mut touching = vec![false; mesh.num_elements()];
    for &f in &iface {
        touching[mesh.facets()[f].left] = true;
    }
    for e in 0..mesh.num_elements() {
        let nz = load[e * 2 * nu..(e + 1) * 2 * nu].iter().any(|x| *x != 0.0);
        assert_eq!(nz, touching[e] && mesh.element_label(e) == Subdomain::Inner, "element {e}");
    }

    // κ = 4n on the circle, v = (x - c)/r
    let center = Vec2::new(0.5, 0.5);
    let r = 0.25;
    let v = project_velocity(&space, &mesh, |x| (x - center) / r);
    let pairing = asm
        .interface_load_pairing(&|f, _| mesh.facet_frame(f).normal * (4.0 * tau), &v)
        .unwrap();
    let polygon = 4.0 * tau * 2.0 * mesh.subdomain_area(Subdomain::Inner) / r;
    assert!((pairing - polygon).abs() < 1e-10 * polygon);
    let circle = tau * 4.0 * 2.0 * std::f64::consts::PI * r;
    assert!((pairing - circle).abs() < 0.01 * circle, "{pairing} vs {circle}");
}

#[test]
fn interface_normals_point_out_of_inner_region() {
    let mesh = small_bubble_mesh();
    for f in mesh.facets_with_label(FacetLabel::Interface) {
        let facet = &mesh.facets()[f];
        assert_eq!(mesh.element_label(facet.left), Subdomain::Inner);
        let n = mesh.facet_frame(f).normal;
        assert!((mesh.facet_midpoint(f) - Vec2::new(0.5, 0.5)).dot(&n) > 0.0);
    }
}

#[test]
fn stokes_limit_is_divergence_free() {
    for k in 1..=3 {
        let (mesh, space, u) = solenoidal_state(4, k);
        let state = alehdg::hdg::FlowState {
            u,
            p: vec![],
            uhat: vec![],
            sigma: vec![],
            config_id: 0,
        };
        let rep = state.divergence_report(&space, &mesh);
        assert!(rep.passes(1e-9), "k={k}: {rep:?}");
    }
}

#[test]
fn mixed_boundaries_solve_without_gauge() {
    let rules = LabelRules {
        boundary: Box::new(|m: Vec2, _| if m.y > 0.999 { FacetLabel::TractionFree } else { FacetLabel::FreeSlip }),
        subdomain: Box::new(|_| Subdomain::Outer),
    };
    let mesh = rectangle(0.0, 2.0, 0.0, 1.0, 6, 3, &rules).unwrap();
    let space = Space::new(2);
    let layout = DofLayout::new(&mesh, 2);
    let physics = Physics::uniform(1.0, 1.0);
    let asm = Assembler::new(&space, &mesh, &layout, &physics);
    let gravity = |_: Vec2, _: Subdomain| Vec2::new(0.0, -9.8);
    let loads = alehdg::hdg::Loads {
        body: Some(&gravity),
        ..Default::default()
    };
    let sol = solve_condensed(&asm, &loads, &KnownValues::zeros(&layout), Gauge::None, &mut SparseSolver::new()).unwrap();
    // hydrostatic: no motion, pressure 9.8 (1 - y)
    assert!(sol.state.velocity_l2(&space, &mesh) < 1e-10);
    let err = alehdg::bench::errors::pressure_l2_error(&space, &mesh, &sol.state.p, |x| 9.8 * (1.0 - x.y));
    assert!(err < 1e-10);
    let (p, _) = alehdg::fem::eval_pressure(&space, &mesh, &sol.state.p, 0, Vec2::new(1.0 / 3.0, 1.0 / 3.0)).unwrap();
    let x = mesh.centroid(0);
    assert!((p - 9.8 * (1.0 - x.y)).abs() < 1e-9);
}
