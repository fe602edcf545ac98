//! Uncondensed dense solve, used as a reference for small problems.

use nalgebra::{DMatrix, DVector};

use super::condense::{element_slots, gauged_local, KnownValues, Slot};
use super::gauge::Gauge;
use crate::error::{Error, Result};
use crate::fem::DofLayout;
use crate::hdg::{FlowState, LocalIndex, LocalSystem};
use crate::mesh::Mesh2D;

/// Assembles every element and skeleton unknown into one dense matrix and
/// solves it with a full-pivot LU.
pub fn solve_full(
    systems: &[LocalSystem],
    mesh: &Mesh2D,
    layout: &DofLayout,
    known: &KnownValues,
    gauge: Gauge,
    moments: &[f64],
) -> Result<FlowState> {
    let ix = LocalIndex {
        nu: layout.nu,
        np: layout.np,
        nf: layout.nf,
    };
    let nl = ix.n_local();
    let ne = systems.len();
    let n_skel = layout.n_skeleton() + usize::from(gauge == Gauge::MeanZero);
    let n = ne * nl + n_skel;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);

    for sys in systems {
        let e = sys.element;
        let (mat, r) = gauged_local(sys, &ix, gauge, moments);
        let slots = element_slots(mesh, layout, known, gauge, e);
        // map local row/column -> global index or known value
        let map = |k: usize| -> Slot {
            if k < nl {
                Slot::Free(e * nl + k)
            } else {
                match slots[k - nl] {
                    Slot::Free(g) => Slot::Free(ne * nl + g),
                    s => s,
                }
            }
        };
        let size = mat.nrows();
        for i in 0..size {
            let Slot::Free(gi) = map(i) else { continue };
            b[gi] += r[i];
            for j in 0..size {
                match map(j) {
                    Slot::Free(gj) => a[(gi, gj)] += mat[(i, j)],
                    Slot::Known(v) => b[gi] -= mat[(i, j)] * v,
                }
            }
        }
    }
    let x = a
        .full_piv_lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("dense full system is singular".into()))?;

    let (nu, np, nf) = (ix.nu, ix.np, layout.nf);
    let mut u = vec![0.0; ne * 2 * nu];
    let mut p = vec![0.0; ne * np];
    for e in 0..ne {
        for r in 0..2 * nu {
            u[e * 2 * nu + r] = x[e * nl + r];
        }
        for r in 0..np {
            p[e * np + r] = x[e * nl + 2 * nu + r];
        }
    }
    let mut uhat = known.uhat.clone();
    let mut sigma = known.sigma.clone();
    for f in 0..layout.n_facets {
        if let Some(g) = layout.uhat_global(f) {
            for i in 0..nf {
                uhat[f * nf + i] = x[ne * nl + g + i];
            }
        }
        if let Some(g) = layout.sigma_global(f) {
            for i in 0..nf {
                sigma[f * nf + i] = x[ne * nl + g + i];
            }
        }
    }
    Ok(FlowState {
        u,
        p,
        uhat,
        sigma,
        config_id: mesh.config_id(),
    })
}
