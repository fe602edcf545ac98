//! Static condensation onto the skeleton, global solve and back-substitution.

use nalgebra::{DMatrix, DVector};

use super::gauge::Gauge;
use super::sparse::{relative_residual, CsrMatrix, SparseSolver};
use crate::error::{Error, Result};
use crate::fem::DofLayout;
use crate::hdg::{FlowState, LocalIndex, LocalSystem};
use crate::mesh::Mesh2D;

/// Where a facet unknown of an element lives.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Slot {
    Free(usize),
    Known(f64),
}

/// Values of masked facet unknowns (full facet vectors).
#[derive(Clone, Debug)]
pub struct KnownValues {
    pub uhat: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl KnownValues {
    pub fn zeros(layout: &DofLayout) -> Self {
        KnownValues {
            uhat: vec![0.0; layout.dim_facet()],
            sigma: vec![0.0; layout.dim_facet()],
        }
    }
}

/// Facet slots of element `e` in local order, plus the gauge multiplier.
pub(crate) fn element_slots(
    mesh: &Mesh2D,
    layout: &DofLayout,
    known: &KnownValues,
    gauge: Gauge,
    e: usize,
) -> Vec<Slot> {
    let nf = layout.nf;
    let mut slots = Vec::with_capacity(6 * nf + 1);
    for &f in mesh.element_facets(e).iter() {
        for i in 0..nf {
            slots.push(match layout.uhat_global(f) {
                Some(s) => Slot::Free(s + i),
                None => Slot::Known(known.uhat[f * nf + i]),
            });
        }
        for i in 0..nf {
            slots.push(match layout.sigma_global(f) {
                Some(s) => Slot::Free(s + i),
                None => Slot::Known(known.sigma[f * nf + i]),
            });
        }
    }
    if gauge == Gauge::MeanZero {
        slots.push(Slot::Free(layout.n_skeleton()));
    }
    slots
}

/// Local matrix extended by the gauge coupling, with the pinned pressure
/// replaced by an identity row.
pub(crate) fn gauged_local(
    sys: &LocalSystem,
    ix: &LocalIndex,
    gauge: Gauge,
    moments: &[f64],
) -> (DMatrix<f64>, DVector<f64>) {
    let e = sys.element;
    let n = ix.size();
    let (mut mat, mut rhs) = if gauge == Gauge::MeanZero {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&sys.mat);
        for i in 0..ix.np {
            let v = moments[e * ix.np + i];
            m[(ix.p(i), n)] = v;
            m[(n, ix.p(i))] = v;
        }
        let mut r = DVector::zeros(n + 1);
        r.rows_mut(0, n).copy_from(&sys.rhs);
        (m, r)
    } else {
        (sys.mat.clone(), sys.rhs.clone())
    };
    if gauge == Gauge::Pinned && e == 0 {
        let r = ix.p(0);
        mat.row_mut(r).fill(0.0);
        mat.column_mut(r).fill(0.0);
        mat[(r, r)] = 1.0;
        rhs[r] = 0.0;
    }
    (mat, rhs)
}

/// The mean-zero multiplier is not put into the sparse matrix (its row is
/// dense after condensation and ruins the fill-in). Instead the bordered
/// system is solved by hand: the multiplier follows from compatibility with
/// the kernel `(p, σ̂) = (1, -1)`, the remaining singular system is solved
/// with one pinned pressure, and the result is shifted along the kernel.
struct MeanZeroData {
    multiplier: f64,
    /// Coefficients of the constant pressure 1, per element.
    unit_p: Vec<f64>,
    moments: Vec<f64>,
    area: f64,
}

struct ElementFactor {
    free: Vec<usize>,
    /// `K_LL⁻¹ r_L` (after moving known facet values to the right).
    x_r: DVector<f64>,
    /// `K_LL⁻¹ K_LG` restricted to free facet unknowns.
    x_g: DMatrix<f64>,
}

pub struct CondensedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub n_skeleton: usize,
    pub gauge: Gauge,
    mean_zero: Option<MeanZeroData>,
    elements: Vec<ElementFactor>,
    known: KnownValues,
    ix: LocalIndex,
    config_id: u64,
    layout: DofLayout,
    /// Set when no gauge is applied but nothing else fixes the pressure level.
    pub warning: Option<String>,
}

/// Result of a solve: the state and, for the mean-zero gauge, the multiplier.
pub struct Solution {
    pub state: FlowState,
    pub multiplier: Option<f64>,
    pub residual: f64,
    pub warning: Option<String>,
}

pub fn condense(
    systems: &[LocalSystem],
    mesh: &Mesh2D,
    layout: &DofLayout,
    known: &KnownValues,
    gauge: Gauge,
    moments: &[f64],
) -> Result<CondensedSystem> {
    let ix = LocalIndex {
        nu: layout.nu,
        np: layout.np,
        nf: layout.nf,
    };
    let nl = ix.n_local();
    let n_glob = layout.n_skeleton();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n_glob];
    let mut elements = Vec::with_capacity(systems.len());

    let mean_zero = (gauge == Gauge::MeanZero).then(|| mean_zero_data(systems, mesh, layout, known, &ix, moments));
    let local_gauge = if gauge == Gauge::MeanZero { Gauge::Pinned } else { gauge };

    for sys in systems {
        let e = sys.element;
        let shifted;
        let sys = match &mean_zero {
            Some(mz) => {
                let mut s = sys.clone();
                for i in 0..ix.np {
                    s.rhs[ix.p(i)] -= mz.multiplier * moments[e * ix.np + i];
                }
                shifted = s;
                &shifted
            }
            None => sys,
        };
        let (mat, r) = gauged_local(sys, &ix, local_gauge, moments);
        let slots = element_slots(mesh, layout, known, local_gauge, e);
        let ng = slots.len();
        let free: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter_map(|(k, s)| match s {
                Slot::Free(g) => Some((k, *g)),
                Slot::Known(_) => None,
            })
            .collect();
        let mut xk = DVector::zeros(ng);
        for (k, s) in slots.iter().enumerate() {
            if let Slot::Known(v) = s {
                xk[k] = *v;
            }
        }

        let k_ll = mat.view((0, 0), (nl, nl)).into_owned();
        let k_lg = mat.view((0, nl), (nl, ng));
        let k_gl = mat.view((nl, 0), (ng, nl));
        let k_gg = mat.view((nl, nl), (ng, ng));
        let r_l = r.rows(0, nl) - k_lg * &xk;
        let r_g = r.rows(nl, ng) - k_gg * &xk;

        let lu = k_ll.clone().lu();
        let u = lu.u();
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
        for i in 0..nl {
            pmin = pmin.min(u[(i, i)].abs());
            pmax = pmax.max(u[(i, i)].abs());
        }
        if !(pmin > 1e-14 * pmax) {
            return Err(Error::SingularLocalBlock { element: e, pivot: pmin });
        }

        let nfree = free.len();
        let mut rhs_block = DMatrix::zeros(nl, nfree + 1);
        for (c, &(k, _)) in free.iter().enumerate() {
            rhs_block.set_column(c, &k_lg.column(k));
        }
        rhs_block.set_column(nfree, &r_l);
        let sol = lu
            .solve(&rhs_block)
            .ok_or(Error::SingularLocalBlock { element: e, pivot: pmin })?;
        let x_g = sol.columns(0, nfree).into_owned();
        let x_r = sol.column(nfree).into_owned();

        for &(ka, ga) in free.iter() {
            let corr_r: f64 = k_gl.row(ka).dot(&x_r.transpose());
            rhs[ga] += r_g[ka] - corr_r;
            for (b, &(kb, gb)) in free.iter().enumerate() {
                let corr: f64 = k_gl.row(ka).dot(&x_g.column(b).transpose());
                triplets.push((ga, gb, k_gg[(ka, kb)] - corr));
            }
        }
        elements.push(ElementFactor {
            free: free.iter().map(|x| x.1).collect(),
            x_r,
            x_g,
        });
    }

    let matrix = CsrMatrix::from_triplets(n_glob, n_glob, &triplets)?;
    let warning = (gauge == Gauge::None && layout.dim_mhat_free() == layout.dim_facet() && layout.n_skeleton() > 0)
        .then(|| "no pressure gauge and no traction-free facet: the system is singular up to a constant pressure".to_string());
    Ok(CondensedSystem {
        matrix,
        rhs,
        n_skeleton: layout.n_skeleton(),
        gauge,
        mean_zero,
        elements,
        known: known.clone(),
        ix,
        config_id: mesh.config_id(),
        layout: layout.clone(),
        warning,
    })
}

impl CondensedSystem {
    /// Solves the skeleton system and reconstructs all element unknowns.
    pub fn solve(&self, solver: &mut SparseSolver) -> Result<Solution> {
        let x = solver.solve(&self.matrix, &self.rhs)?;
        let residual = relative_residual(&self.matrix, &x, &self.rhs);
        if residual > 1e-9 && self.rhs.iter().any(|v| *v != 0.0) {
            return Err(Error::Numeric(format!("skeleton solve residual {residual:e} exceeds 1e-9")));
        }
        Ok(Solution {
            state: self.reconstruct(&x),
            multiplier: self.mean_zero.as_ref().map(|m| m.multiplier),
            residual,
            warning: self.warning.clone(),
        })
    }

    /// Back-substitution from a skeleton vector.
    pub fn reconstruct(&self, x: &[f64]) -> FlowState {
        let ix = self.ix;
        let (nu, np, nf) = (ix.nu, ix.np, self.layout.nf);
        let ne = self.elements.len();
        let mut u = vec![0.0; ne * 2 * nu];
        let mut p = vec![0.0; ne * np];
        for (e, ef) in self.elements.iter().enumerate() {
            let xg = DVector::from_iterator(ef.free.len(), ef.free.iter().map(|&g| x[g]));
            let xl = &ef.x_r - &ef.x_g * xg;
            u[e * 2 * nu..(e + 1) * 2 * nu].copy_from_slice(xl.rows(0, 2 * nu).as_slice());
            p[e * np..(e + 1) * np].copy_from_slice(xl.rows(2 * nu, np).as_slice());
        }
        let mut uhat = self.known.uhat.clone();
        let mut sigma = self.known.sigma.clone();
        for f in 0..self.layout.n_facets {
            if let Some(g) = self.layout.uhat_global(f) {
                uhat[f * nf..(f + 1) * nf].copy_from_slice(&x[g..g + nf]);
            }
            if let Some(g) = self.layout.sigma_global(f) {
                sigma[f * nf..(f + 1) * nf].copy_from_slice(&x[g..g + nf]);
            }
        }
        if let Some(mz) = &self.mean_zero {
            let integral: f64 = p.iter().zip(&mz.moments).map(|(a, b)| a * b).sum();
            let c = -integral / mz.area;
            for (pi, zi) in p.iter_mut().zip(&mz.unit_p) {
                *pi += c * zi;
            }
            for f in 0..self.layout.n_facets {
                if self.layout.sigma_global(f).is_some() {
                    for v in &mut sigma[f * nf..(f + 1) * nf] {
                        *v -= c;
                    }
                }
            }
        }
        FlowState {
            u,
            p,
            uhat,
            sigma,
            config_id: self.config_id,
        }
    }
}

/// Multiplier of the bordered system from the compatibility condition
/// `zᵀ(f - B λ) = 0`, with `z` the constant-pressure kernel.
fn mean_zero_data(
    systems: &[LocalSystem],
    mesh: &Mesh2D,
    layout: &DofLayout,
    known: &KnownValues,
    ix: &LocalIndex,
    moments: &[f64],
) -> MeanZeroData {
    let nl = ix.n_local();
    let np = ix.np;
    let mut unit_p = vec![0.0; systems.len() * np];
    let (mut zf, mut zb) = (0.0, 0.0);
    for sys in systems {
        let e = sys.element;
        let slots = element_slots(mesh, layout, known, Gauge::None, e);
        let mut xk = DVector::zeros(sys.mat.ncols());
        for (k, s) in slots.iter().enumerate() {
            if let Slot::Known(v) = s {
                xk[nl + k] = *v;
            }
        }
        let r = &sys.rhs - &sys.mat * &xk;
        // orthonormal basis: M = 2|T| I
        let scale = 2.0 * mesh.area(e);
        for i in 0..np {
            let z = moments[e * np + i] / scale;
            unit_p[e * np + i] = z;
            zf += z * r[ix.p(i)];
            zb += z * moments[e * np + i];
        }
        for (k, s) in slots.iter().enumerate() {
            if matches!(s, Slot::Free(_)) && (k / ix.nf) % 2 == 1 {
                zf -= r[nl + k];
            }
        }
    }
    MeanZeroData {
        multiplier: zf / zb,
        unit_p,
        moments: moments.to_vec(),
        area: zb,
    }
}
