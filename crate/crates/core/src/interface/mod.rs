//! The discrete interface as a closed polygon of mesh nodes, its curvature,
//! its velocity and the bubble benchmark quantities.

pub mod curvature;
pub mod velocity;

pub use curvature::{curvature_isoparametric, curvature_p1, curvature_projection, projection_residual, CurvatureField};
pub use velocity::{
    equidistributing_system, equidistributing_velocity, extrapolate_interface, nodal_normals, normal_flux_moments, normal_projection,
    plain_velocity,
    InterfaceVelocity, VelocityVariant,
};

use std::io::Write;

use crate::error::{Error, Result};
use crate::fem::{ElementGeometry, Space};
use crate::mesh::{FacetLabel, Mesh2D, Subdomain, Vec2};

/// Closed chain of interface nodes ordered so that the right-hand normal of
/// each segment points from the inner subdomain to the outer one.
#[derive(Clone, Debug)]
pub struct InterfaceChain {
    /// Node indices; segment `i` joins `nodes[i]` and `nodes[(i + 1) % n]`.
    pub nodes: Vec<usize>,
    /// Mesh facet of segment `i`.
    pub facets: Vec<usize>,
    /// Inner-subdomain element owning segment `i`.
    pub inner: Vec<usize>,
    facet_segment: Vec<Option<usize>>,
}

/// Straight-segment frame.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
    pub length: f64,
    pub tangent: Vec2,
    /// Points from the inner into the outer subdomain.
    pub normal: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        let d = b - a;
        let length = d.norm();
        let tangent = d / length;
        Segment {
            a,
            b,
            length,
            tangent,
            normal: Vec2::new(tangent.y, -tangent.x),
        }
    }
}

impl InterfaceChain {
    /// Collects the interface facets of `mesh` into one closed chain.
    pub fn extract(mesh: &Mesh2D) -> Result<Self> {
        let facets = mesh.facets_with_label(FacetLabel::Interface);
        if facets.len() < 3 {
            return Err(Error::Topology(format!("interface has {} facets, need a closed chain", facets.len())));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_nodes()];
        for &f in &facets {
            for &v in &mesh.facets()[f].nodes {
                adj[v].push(f);
            }
        }
        if let Some(v) = adj.iter().position(|a| !a.is_empty() && a.len() != 2) {
            return Err(Error::Topology(format!("interface node {v} has {} interface facets", adj[v].len())));
        }
        let start = mesh.facets()[facets[0]].nodes[0];
        let mut nodes = vec![start];
        let mut chain_facets = Vec::with_capacity(facets.len());
        let (mut cur, mut via) = (start, facets[0]);
        loop {
            chain_facets.push(via);
            let fv = mesh.facets()[via].nodes;
            let next = if fv[0] == cur { fv[1] } else { fv[0] };
            if next == start {
                break;
            }
            nodes.push(next);
            via = if adj[next][0] == via { adj[next][1] } else { adj[next][0] };
            cur = next;
            if nodes.len() > facets.len() {
                return Err(Error::Topology("interface chain does not close".into()));
            }
        }
        if chain_facets.len() != facets.len() {
            return Err(Error::Topology(format!(
                "interface splits into several loops ({} of {} facets reached)",
                chain_facets.len(),
                facets.len()
            )));
        }
        let inner_of = |f: usize| -> Result<usize> {
            let fc = &mesh.facets()[f];
            let r = fc.right.ok_or_else(|| Error::Labeling(format!("interface facet {f} on the boundary")))?;
            match (mesh.element_label(fc.left), mesh.element_label(r)) {
                (Subdomain::Inner, Subdomain::Outer) => Ok(fc.left),
                (Subdomain::Outer, Subdomain::Inner) => Ok(r),
                _ => Err(Error::Labeling(format!("interface facet {f} does not separate the subdomains"))),
            }
        };
        let inner: Vec<usize> = chain_facets.iter().map(|&f| inner_of(f)).collect::<Result<_>>()?;
        let mut chain = InterfaceChain {
            nodes,
            facets: chain_facets,
            inner,
            facet_segment: Vec::new(),
        };
        // orient: the inner element lies left of segment 0
        let s = chain.segment(mesh.nodes(), 0);
        if (mesh.centroid(chain.inner[0]) - s.a).dot(&s.normal) > 0.0 {
            chain.nodes[1..].reverse();
            chain.facets.reverse();
            chain.inner.reverse();
        }
        chain.facet_segment = vec![None; mesh.num_facets()];
        for (i, &f) in chain.facets.iter().enumerate() {
            chain.facet_segment[f] = Some(i);
        }
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Chain position of segment `i`'s end nodes.
    pub fn ends(&self, i: usize) -> (usize, usize) {
        (i, (i + 1) % self.nodes.len())
    }

    pub fn positions(&self, mesh_nodes: &[Vec2]) -> Vec<Vec2> {
        self.nodes.iter().map(|&v| mesh_nodes[v]).collect()
    }

    pub fn segment(&self, mesh_nodes: &[Vec2], i: usize) -> Segment {
        let (a, b) = self.ends(i);
        Segment::new(mesh_nodes[self.nodes[a]], mesh_nodes[self.nodes[b]])
    }

    /// Segment index of a mesh facet, if it lies on the interface.
    pub fn segment_of_facet(&self, f: usize) -> Option<usize> {
        self.facet_segment.get(f).copied().flatten()
    }

    pub fn node_mask(&self, num_nodes: usize) -> Vec<bool> {
        let mut m = vec![false; num_nodes];
        for &v in &self.nodes {
            m[v] = true;
        }
        m
    }
}

/// Segment lengths of a closed polygon.
pub fn segment_lengths(x: &[Vec2]) -> Vec<f64> {
    (0..x.len()).map(|i| (x[(i + 1) % x.len()] - x[i]).norm()).collect()
}

/// Coefficient of variation (standard deviation over mean) of segment lengths.
pub fn spacing_cv(x: &[Vec2]) -> f64 {
    let l = segment_lengths(x);
    let n = l.len() as f64;
    let mean = l.iter().sum::<f64>() / n;
    let var = l.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

pub fn perimeter(x: &[Vec2]) -> f64 {
    segment_lengths(x).iter().sum()
}

/// Signed polygon area (positive for counter-clockwise order).
pub fn polygon_area(x: &[Vec2]) -> f64 {
    let n = x.len();
    0.5 * (0..n).map(|i| x[i].perp(&x[(i + 1) % n])).sum::<f64>()
}

/// First pair of non-adjacent segments that intersect.
pub fn find_self_intersection(x: &[Vec2]) -> Option<(usize, usize)> {
    let n = x.len();
    let orient = |a: Vec2, b: Vec2, c: Vec2| (b - a).perp(&(c - a));
    for i in 0..n {
        let (a, b) = (x[i], x[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (x[j], x[(j + 1) % n]);
            let d1 = orient(a, b, c);
            let d2 = orient(a, b, d);
            let d3 = orient(c, d, a);
            let d4 = orient(c, d, b);
            if d1 * d2 <= 0.0 && d3 * d4 <= 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Rising-bubble diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct BenchmarkQuantities {
    pub center: Vec2,
    pub rise_velocity: Vec2,
    pub circularity: f64,
    pub area: f64,
    pub perimeter: f64,
}

/// Centre of mass and mean velocity of the inner subdomain and the
/// circularity `2 sqrt(π |Ω2|) / |Γ|`.
pub fn benchmark_quantities(space: &Space, mesh: &Mesh2D, u: &[f64], chain: &InterfaceChain) -> Result<BenchmarkQuantities> {
    let nu = space.nu;
    let mut area = 0.0;
    let mut moment = Vec2::zeros();
    let mut mom_u = Vec2::zeros();
    for e in 0..mesh.num_elements() {
        if mesh.element_label(e) != Subdomain::Inner {
            continue;
        }
        let a = mesh.area(e);
        area += a;
        moment += mesh.centroid(e) * a;
        let geo = ElementGeometry::new(space, mesh, e);
        let c = &u[e * 2 * nu..(e + 1) * 2 * nu];
        for q in 0..space.vol.len() {
            for i in 0..nu {
                let w = geo.jxw[q] * space.vol.u_val[q * nu + i];
                mom_u.x += w * c[i];
                mom_u.y += w * c[nu + i];
            }
        }
    }
    if area <= 0.0 {
        return Err(Error::Domain("inner subdomain is empty".into()));
    }
    let per = perimeter(&chain.positions(mesh.nodes()));
    Ok(BenchmarkQuantities {
        center: moment / area,
        rise_velocity: mom_u / area,
        circularity: 2.0 * (std::f64::consts::PI * area).sqrt() / per,
        area,
        perimeter: per,
    })
}

/// Polyline export: `arclength,x,y,kappa` with the closing node repeated.
pub fn write_polyline(x: &[Vec2], kappa: &[Vec2], out: &mut impl Write) -> Result<()> {
    writeln!(out, "arclength,x,y,kappa")?;
    let mut s = 0.0;
    for i in 0..=x.len() {
        let j = i % x.len();
        if i > 0 {
            s += (x[j] - x[i - 1]).norm();
        }
        writeln!(out, "{:.10e},{:.10e},{:.10e},{:.10e}", s, x[j].x, x[j].y, kappa[j].norm())?;
    }
    Ok(())
}
