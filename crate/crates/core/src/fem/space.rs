//! Reference tabulations shared by all assembly routines.
//!
//! Everything here depends only on the degree, never on the mesh geometry,
//! so a single [`Space`] serves every configuration of a moving mesh.

use super::basis::{dim_p, ref_vertex, AffineMap, FacetBasis, OrthoBasis};
use super::quadrature::{segment_rule, triangle_rule};
use crate::mesh::{Mesh2D, Vec2, LOCAL_FACET_VERTICES};

#[derive(Clone, Debug)]
pub struct VolumeTab {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// `u_val[q * nu + i]`
    pub u_val: Vec<f64>,
    pub u_grad: Vec<Vec2>,
    pub p_val: Vec<f64>,
}

impl VolumeTab {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Element basis traced on one local facet, for one orientation. Point `q`
/// sits at facet parameter `s_q` measured along the stored facet direction,
/// so both neighbours see the same physical point at the same `q`.
#[derive(Clone, Debug)]
pub struct FacetTab {
    pub ref_points: Vec<Vec2>,
    pub u_val: Vec<f64>,
    pub u_grad: Vec<Vec2>,
    pub p_val: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Space {
    pub k: usize,
    pub nu: usize,
    pub np: usize,
    pub nf: usize,
    pub basis_u: OrthoBasis,
    pub basis_p: OrthoBasis,
    pub facet_basis: FacetBasis,
    pub vol: VolumeTab,
    pub seg_points: Vec<f64>,
    pub seg_weights: Vec<f64>,
    /// `fb_val[q * nf + i]`: facet basis at segment point `q`.
    pub fb_val: Vec<f64>,
    /// `facet_tab[lf][0]` when the element is left of the facet, `[lf][1]` when right.
    pub facet_tab: [[FacetTab; 2]; 3],
}

impl Space {
    /// Tabulations exact for the bilinear (degree `2k+2`) and trilinear
    /// (degree `3k`) integrands.
    pub fn new(k: usize) -> Self {
        Self::with_degree(k, (2 * k + 2).max(3 * k))
    }

    pub fn with_degree(k: usize, quad_degree: usize) -> Self {
        assert!((1..=4).contains(&k), "supported polynomial degrees are 1..=4");
        let basis_u = OrthoBasis::new(k);
        let basis_p = OrthoBasis::new(k - 1);
        let facet_basis = FacetBasis::new(k);
        let (nu, np, nf) = (dim_p(k), dim_p(k - 1), k + 1);

        let tri = triangle_rule(quad_degree);
        let vol = tabulate(&basis_u, &basis_p, &tri.points, tri.weights.clone());

        let seg = segment_rule(quad_degree);
        let mut fb_val = Vec::with_capacity(seg.points.len() * nf);
        for &s in &seg.points {
            fb_val.extend(facet_basis.eval(s));
        }
        let facet_tab = std::array::from_fn(|lf| {
            std::array::from_fn(|side| {
                let [va, vb] = LOCAL_FACET_VERTICES[lf];
                let (a, b) = if side == 0 {
                    (ref_vertex(va), ref_vertex(vb))
                } else {
                    (ref_vertex(vb), ref_vertex(va))
                };
                let pts: Vec<Vec2> = seg.points.iter().map(|&s| a + (b - a) * s).collect();
                let t = tabulate(&basis_u, &basis_p, &pts, seg.weights.clone());
                FacetTab {
                    ref_points: pts,
                    u_val: t.u_val,
                    u_grad: t.u_grad,
                    p_val: t.p_val,
                }
            })
        });
        Space {
            k,
            nu,
            np,
            nf,
            basis_u,
            basis_p,
            facet_basis,
            vol,
            seg_points: seg.points,
            seg_weights: seg.weights,
            fb_val,
            facet_tab,
        }
    }

    pub fn n_seg(&self) -> usize {
        self.seg_points.len()
    }

    /// Tabulation of the element basis on local facet `lf` of element `e`,
    /// ordered along the stored facet direction.
    pub fn facet_tab_for(&self, mesh: &Mesh2D, e: usize, lf: usize) -> &FacetTab {
        let f = mesh.element_facets(e)[lf];
        let side = if mesh.facets()[f].left == e { 0 } else { 1 };
        &self.facet_tab[lf][side]
    }
}

fn tabulate(bu: &OrthoBasis, bp: &OrthoBasis, pts: &[Vec2], weights: Vec<f64>) -> VolumeTab {
    let mut u_val = Vec::new();
    let mut u_grad = Vec::new();
    let mut p_val = Vec::new();
    for &x in pts {
        u_val.extend(bu.eval(x).iter());
        u_grad.extend(bu.eval_grad(x));
        p_val.extend(bp.eval(x).iter());
    }
    VolumeTab {
        points: pts.to_vec(),
        weights,
        u_val,
        u_grad,
        p_val,
    }
}

/// Geometry of one element: affine map and physical basis gradients at the
/// volume quadrature points.
pub struct ElementGeometry {
    pub map: AffineMap,
    pub area: f64,
    pub diameter: f64,
    /// `grad[q * nu + i]`
    pub grad: Vec<Vec2>,
    /// Physical quadrature points.
    pub points: Vec<Vec2>,
    /// Weights times `2|T|`.
    pub jxw: Vec<f64>,
}

impl ElementGeometry {
    pub fn new(space: &Space, mesh: &Mesh2D, e: usize) -> Self {
        let map = AffineMap::new(mesh.vertices(e));
        let area = 0.5 * map.det;
        let grad = space.vol.u_grad.iter().map(|g| map.grad(*g)).collect();
        let points = space.vol.points.iter().map(|x| map.map(*x)).collect();
        let jxw = space.vol.weights.iter().map(|w| w * map.det).collect();
        ElementGeometry {
            map,
            area,
            diameter: mesh.diameter(e),
            grad,
            points,
            jxw,
        }
    }

    /// Physical gradients of the element basis at facet tabulation points.
    pub fn facet_grads(&self, tab: &FacetTab) -> Vec<Vec2> {
        tab.u_grad.iter().map(|g| self.map.grad(*g)).collect()
    }
}
