//! Degree-of-freedom layout for the element and facet spaces.
//!
//! Element vectors are stored per element: velocity as
//! `u[e * 2nu + c * nu + i]`, pressure as `p[e * np + i]`. Facet vectors as
//! `x[f * nf + i]` (tangential velocity coefficient, or normal-normal stress).
//! Skeleton numbering skips masked facets.

use crate::mesh::{FacetLabel, Mesh2D};

#[derive(Clone, Debug)]
pub struct DofLayout {
    pub k: usize,
    pub nu: usize,
    pub np: usize,
    pub nf: usize,
    pub n_elements: usize,
    pub n_facets: usize,
    uhat_start: Vec<Option<usize>>,
    sigma_start: Vec<Option<usize>>,
    n_skeleton: usize,
}

impl DofLayout {
    /// Tangential facet velocity is masked on Dirichlet facets, the
    /// normal-normal stress on traction-free facets.
    pub fn new(mesh: &Mesh2D, k: usize) -> Self {
        Self::with_masks(
            mesh,
            k,
            |f| mesh.facets()[f].label == FacetLabel::Dirichlet,
            |f| mesh.facets()[f].label == FacetLabel::TractionFree,
        )
    }

    /// Layout with caller-chosen masks.
    pub fn with_masks(mesh: &Mesh2D, k: usize, uhat_fixed: impl Fn(usize) -> bool, sigma_fixed: impl Fn(usize) -> bool) -> Self {
        let nf = k + 1;
        let mut uhat_start = Vec::with_capacity(mesh.num_facets());
        let mut sigma_start = Vec::with_capacity(mesh.num_facets());
        let mut next = 0;
        for f in 0..mesh.num_facets() {
            if uhat_fixed(f) {
                uhat_start.push(None);
            } else {
                uhat_start.push(Some(next));
                next += nf;
            }
            if sigma_fixed(f) {
                sigma_start.push(None);
            } else {
                sigma_start.push(Some(next));
                next += nf;
            }
        }
        DofLayout {
            k,
            nu: (k + 1) * (k + 2) / 2,
            np: k * (k + 1) / 2,
            nf,
            n_elements: mesh.num_elements(),
            n_facets: mesh.num_facets(),
            uhat_start,
            sigma_start,
            n_skeleton: next,
        }
    }

    pub fn dim_v(&self) -> usize {
        2 * self.nu * self.n_elements
    }

    pub fn dim_q(&self) -> usize {
        self.np * self.n_elements
    }

    pub fn dim_facet(&self) -> usize {
        self.nf * self.n_facets
    }

    pub fn dim_vhat_free(&self) -> usize {
        self.uhat_start.iter().filter(|s| s.is_some()).count() * self.nf
    }

    pub fn dim_mhat_free(&self) -> usize {
        self.sigma_start.iter().filter(|s| s.is_some()).count() * self.nf
    }

    /// Number of unmasked skeleton unknowns (without any gauge multiplier).
    pub fn n_skeleton(&self) -> usize {
        self.n_skeleton
    }

    pub fn uhat_masked(&self, f: usize) -> bool {
        self.uhat_start[f].is_none()
    }

    pub fn sigma_masked(&self, f: usize) -> bool {
        self.sigma_start[f].is_none()
    }

    /// First skeleton index of the tangential-velocity block of facet `f`.
    pub fn uhat_global(&self, f: usize) -> Option<usize> {
        self.uhat_start[f]
    }

    pub fn sigma_global(&self, f: usize) -> Option<usize> {
        self.sigma_start[f]
    }

    /// Number of element-local unknowns (velocity plus pressure).
    pub fn n_local(&self) -> usize {
        2 * self.nu + self.np
    }

    /// Number of facet unknowns attached to one element.
    pub fn n_element_facet(&self) -> usize {
        6 * self.nf
    }
}
