//! Stiffened harmonic extension `(α ∇A, ∇φ) = 0` with continuous linear
//! elements, one scalar solve per displacement component.

use crate::error::{Error, Result};
use crate::linsys::{CsrMatrix, SparseSolver};
use crate::mesh::{Mesh2D, Vec2};

/// Essential data of one node: a prescribed value per component, or `None`
/// where the component is free.
pub type NodeConstraint = [Option<f64>; 2];

/// `1 + 9 exp(-d / ell)`: 10 on the interface, decaying to 1.
pub fn stiffening_profile(d: f64, ell: f64) -> f64 {
    1.0 + 9.0 * (-d.max(0.0) / ell).exp()
}

/// Element-wise stiffening from the centroid distance to the nearest of
/// `anchor` nodes (typically the interface), with decay length `ell`.
pub fn stiffening(mesh: &Mesh2D, anchor: &[usize], ell: f64) -> Vec<f64> {
    if anchor.is_empty() {
        return vec![1.0; mesh.num_elements()];
    }
    let pts: Vec<Vec2> = anchor.iter().map(|&i| mesh.nodes()[i]).collect();
    (0..mesh.num_elements())
        .map(|e| {
            let c = mesh.centroid(e);
            let d = pts.iter().map(|p| (p - c).norm()).fold(f64::INFINITY, f64::min);
            stiffening_profile(d, ell)
        })
        .collect()
}

fn p1_gradients(v: [Vec2; 3]) -> ([Vec2; 3], f64) {
    let area2 = (v[1] - v[0]).perp(&(v[2] - v[0]));
    let g = std::array::from_fn(|i| {
        let e = v[(i + 2) % 3] - v[(i + 1) % 3];
        Vec2::new(-e.y, e.x) / area2
    });
    (g, 0.5 * area2)
}

/// Solves the extension for both components. `constraints[i]` holds the
/// essential data of node `i`; every component needs at least one
/// constrained node.
pub fn harmonic_extension(mesh: &Mesh2D, alpha: &[f64], constraints: &[NodeConstraint]) -> Result<Vec<Vec2>> {
    let n = mesh.num_nodes();
    if constraints.len() != n || alpha.len() != mesh.num_elements() {
        return Err(Error::Parameter("extension data does not match the mesh".into()));
    }
    let mut out = vec![Vec2::zeros(); n];
    let mut solver = SparseSolver::new();
    for comp in 0..2 {
        let mut index = vec![usize::MAX; n];
        let mut n_free = 0;
        for (i, c) in constraints.iter().enumerate() {
            match c[comp] {
                Some(v) => out[i][comp] = v,
                None => {
                    index[i] = n_free;
                    n_free += 1;
                }
            }
        }
        if n_free == 0 {
            continue;
        }
        if n_free == n {
            return Err(Error::Parameter(format!("component {comp} has no essential data")));
        }
        let mut trip = Vec::with_capacity(9 * mesh.num_elements());
        let mut rhs = vec![0.0; n_free];
        for (e, t) in mesh.triangles().iter().enumerate() {
            let (g, area) = p1_gradients(mesh.vertices(e));
            if !(area > 0.0) {
                return Err(Error::MeshTangling { element: e, area });
            }
            for a in 0..3 {
                let ia = index[t[a]];
                if ia == usize::MAX {
                    continue;
                }
                for b in 0..3 {
                    let k = alpha[e] * area * g[a].dot(&g[b]);
                    let ib = index[t[b]];
                    if ib == usize::MAX {
                        rhs[ia] -= k * out[t[b]][comp];
                    } else {
                        trip.push((ia, ib, k));
                    }
                }
            }
        }
        let mat = CsrMatrix::from_triplets(n_free, n_free, &trip)?;
        let x = solver.solve(&mat, &rhs)?;
        for i in 0..n {
            if index[i] != usize::MAX {
                out[i][comp] = x[index[i]];
            }
        }
    }
    Ok(out)
}
