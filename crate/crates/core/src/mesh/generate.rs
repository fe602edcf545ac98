//! Mesh generators: structured rectangles, a free-surface tank and an
//! unstructured box with a circular inclusion.

use std::collections::HashMap;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{build_mesh, signed_area, FacetLabel, LabelRules, Mesh2D, Subdomain, Vec2};
use crate::error::{Error, Result};

/// Structured `nx` by `ny` grid on a rectangle, every cell cut along the
/// lower-left to upper-right diagonal.
pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize, rules: &LabelRules) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 || !(x1 > x0) || !(y1 > y0) {
        return Err(Error::Parameter(format!("bad rectangle [{x0},{x1}]x[{y0},{y1}] with {nx}x{ny} cells")));
    }
    let (nodes, tris) = grid(nx, ny, |i, j| {
        Vec2::new(
            x0 + (x1 - x0) * i as f64 / nx as f64,
            y0 + (y1 - y0) * j as f64 / ny as f64,
        )
    });
    build_mesh(nodes, tris, rules)
}

pub fn unit_square(n: usize, rules: &LabelRules) -> Result<Mesh2D> {
    rectangle(0.0, 1.0, 0.0, 1.0, n, n, rules)
}

/// Structured tank `[x0, x1] x [0, eta(x)]`. The top row of facets gets
/// `top`, every other boundary facet gets `walls`.
pub fn tank(
    x0: f64,
    x1: f64,
    nx: usize,
    ny: usize,
    eta: impl Fn(f64) -> f64,
    top: FacetLabel,
    walls: FacetLabel,
) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 || !(x1 > x0) {
        return Err(Error::Parameter("bad tank dimensions".into()));
    }
    let (nodes, tris) = grid(nx, ny, |i, j| {
        let x = x0 + (x1 - x0) * i as f64 / nx as f64;
        Vec2::new(x, eta(x) * j as f64 / ny as f64)
    });
    let row = nx + 1;
    Mesh2D::from_parts(nodes, tris, vec![Subdomain::Outer; nx * ny * 2], |pair, _, _| {
        if pair[0] / row == ny && pair[1] / row == ny {
            top
        } else {
            walls
        }
    })
}

fn grid(nx: usize, ny: usize, at: impl Fn(usize, usize) -> Vec2) -> (Vec<Vec2>, Vec<[usize; 3]>) {
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(at(i, j));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (nodes, tris)
}

/// Box with a circular bubble.
#[derive(Clone, Debug)]
pub struct BubbleMeshParams {
    pub width: f64,
    pub height: f64,
    pub center: Vec2,
    pub radius: f64,
    /// Target edge length away from the interface.
    pub h_bulk: f64,
    /// Edge length along the interface.
    pub h_interface: f64,
    /// Walls at `y = 0` and `y = height` get this label, the vertical ones `side`.
    pub floor_ceiling: FacetLabel,
    pub side: FacetLabel,
}

impl BubbleMeshParams {
    pub fn benchmark(h_bulk: f64, h_interface: f64) -> Self {
        BubbleMeshParams {
            width: 1.0,
            height: 2.0,
            center: Vec2::new(0.5, 0.5),
            radius: 0.25,
            h_bulk,
            h_interface,
            floor_ceiling: FacetLabel::Dirichlet,
            side: FacetLabel::FreeSlip,
        }
    }

    fn size_at(&self, p: Vec2) -> f64 {
        let d = ((p - self.center).norm() - self.radius).abs();
        let ramp = 4.0 * self.h_bulk.max(self.h_interface);
        let s = (d / ramp).min(1.0);
        self.h_interface + (self.h_bulk - self.h_interface) * s
    }
}

/// Unstructured triangulation of the box with the circle as a constrained
/// polygon. Interior points are placed by greedy distance rejection ordered by
/// distance to the interface, triangulated with a constrained Delaunay
/// triangulation and smoothed.
pub fn bubble_mesh(p: &BubbleMeshParams) -> Result<Mesh2D> {
    let (w, hgt, r) = (p.width, p.height, p.radius);
    if !(p.h_bulk > 0.0 && p.h_interface > 0.0 && r > 0.0) {
        return Err(Error::Parameter("mesh sizes and radius must be positive".into()));
    }
    let c = p.center;
    if c.x - r <= 0.0 || c.x + r >= w || c.y - r <= 0.0 || c.y + r >= hgt {
        return Err(Error::Geometry("bubble does not fit inside the box".into()));
    }

    let n_circle = ((2.0 * std::f64::consts::PI * r / p.h_interface).round() as usize).max(12);
    let mut circle = Vec::with_capacity(n_circle);
    for i in 0..n_circle {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n_circle as f64;
        circle.push(c + r * Vec2::new(t.cos(), t.sin()));
    }

    let mut boundary = Vec::new();
    let corners = [Vec2::new(0.0, 0.0), Vec2::new(w, 0.0), Vec2::new(w, hgt), Vec2::new(0.0, hgt)];
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let n = (((b - a).norm() / p.h_bulk).round() as usize).max(1);
        for i in 0..n {
            boundary.push(a + (b - a) * (i as f64 / n as f64));
        }
    }

    // Greedy rejection from a fine hexagonal candidate lattice.
    let hmin = p.h_bulk.min(p.h_interface);
    let spacing = 0.25 * hmin;
    let mut fixed: Vec<Vec2> = circle.iter().chain(boundary.iter()).copied().collect();
    let mut candidates = Vec::new();
    let dy = spacing * 3f64.sqrt() / 2.0;
    let mut j = 0usize;
    loop {
        let y = dy * j as f64;
        if y >= hgt {
            break;
        }
        let shift = if j % 2 == 1 { 0.5 * spacing } else { 0.0 };
        let mut x = shift;
        while x < w {
            candidates.push(Vec2::new(x, y));
            x += spacing;
        }
        j += 1;
    }
    let dist_iface = |q: Vec2| ((q - c).norm() - r).abs();
    candidates.sort_by(|a, b| dist_iface(*a).partial_cmp(&dist_iface(*b)).unwrap());

    const SPACING_FACTOR: f64 = 0.9;
    let mut hash = SpatialHash::new(hmin);
    for &q in &fixed {
        hash.insert(q);
    }
    for q in candidates {
        let s = SPACING_FACTOR * p.size_at(q);
        let wall = q.x.min(w - q.x).min(q.y).min(hgt - q.y);
        if wall < 0.7 * s || dist_iface(q) < 0.7 * s {
            continue;
        }
        if hash.any_within(q, s) {
            continue;
        }
        hash.insert(q);
        fixed.push(q);
    }
    let n_fixed = circle.len() + boundary.len();
    let mut points = fixed;

    let mut tris = Vec::new();
    for round in 0..4 {
        tris = delaunay(&points, n_circle)?;
        if round == 3 {
            break;
        }
        smooth(&mut points, &tris, n_fixed, 5);
    }

    let rules = LabelRules {
        boundary: Box::new(|mid: Vec2, _n: Vec2| {
            let eps = 1e-9 * hgt;
            if mid.y < eps || mid.y > hgt - eps {
                p.floor_ceiling
            } else {
                p.side
            }
        }),
        subdomain: Box::new(|x: Vec2| {
            if point_in_polygon(x, &circle) {
                Subdomain::Inner
            } else {
                Subdomain::Outer
            }
        }),
    };
    build_mesh(points, tris, &rules)
}

fn delaunay(points: &[Vec2], n_circle: usize) -> Result<Vec<[usize; 3]>> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(points.len());
    for q in points {
        let h = cdt
            .insert(Point2::new(q.x, q.y))
            .map_err(|e| Error::Geometry(format!("triangulation insert failed: {e:?}")))?;
        handles.push(h);
    }
    if cdt.num_vertices() != points.len() {
        return Err(Error::Geometry("duplicate points in mesh generator".into()));
    }
    for i in 0..n_circle {
        cdt.add_constraint(handles[i], handles[(i + 1) % n_circle]);
    }
    let index: HashMap<usize, usize> = handles.iter().enumerate().map(|(i, h)| (h.index(), i)).collect();
    let mut tris = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let v = face.vertices();
        let mut t = [index[&v[0].fix().index()], index[&v[1].fix().index()], index[&v[2].fix().index()]];
        if signed_area(points[t[0]], points[t[1]], points[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
        tris.push(t);
    }
    Ok(tris)
}

/// Laplacian smoothing of the free nodes; a move that would invert an
/// adjacent triangle is rejected.
fn smooth(points: &mut [Vec2], tris: &[[usize; 3]], n_fixed: usize, iters: usize) {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (e, t) in tris.iter().enumerate() {
        for i in 0..3 {
            incident[t[i]].push(e);
            for j in 0..3 {
                if i != j && !nbrs[t[i]].contains(&t[j]) {
                    nbrs[t[i]].push(t[j]);
                }
            }
        }
    }
    for _ in 0..iters {
        for v in n_fixed..points.len() {
            if nbrs[v].is_empty() {
                continue;
            }
            let target = nbrs[v].iter().fold(Vec2::zeros(), |a, &u| a + points[u]) / nbrs[v].len() as f64;
            let old = points[v];
            points[v] = target;
            let ok = incident[v]
                .iter()
                .all(|&e| signed_area(points[tris[e][0]], points[tris[e][1]], points[tris[e][2]]) > 0.0);
            if !ok {
                points[v] = old;
            }
        }
    }
}

pub(crate) fn point_in_polygon(x: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > x.y) != (b.y > x.y) && x.x < (b.x - a.x) * (x.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Vec2>>,
}

impl SpatialHash {
    fn new(cell: f64) -> Self {
        SpatialHash { cell, buckets: HashMap::new() }
    }

    fn key(&self, q: Vec2) -> (i64, i64) {
        ((q.x / self.cell).floor() as i64, (q.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, q: Vec2) {
        let k = self.key(q);
        self.buckets.entry(k).or_default().push(q);
    }

    fn any_within(&self, q: Vec2, radius: f64) -> bool {
        let (ki, kj) = self.key(q);
        let span = (radius / self.cell).ceil() as i64;
        for di in -span..=span {
            for dj in -span..=span {
                if let Some(b) = self.buckets.get(&(ki + di, kj + dj)) {
                    if b.iter().any(|p| (p - q).norm() < radius) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tank_labels_top_row() {
        let m = tank(0.0, 4.0, 4, 2, |x| 1.0 + 0.1 * x, FacetLabel::TractionFree, FacetLabel::FreeSlip).unwrap();
        assert_eq!(m.facets_with_label(FacetLabel::TractionFree).len(), 4);
        assert_eq!(m.facets_with_label(FacetLabel::FreeSlip).len(), 4 + 2 + 2);
        let area: f64 = m.total_area();
        // trapezoid 0..4 under 1 + 0.1 x
        assert!((area - 4.8).abs() < 1e-12);
    }

    #[test]
    fn bubble_mesh_is_valid() {
        let p = BubbleMeshParams::benchmark(0.1, 0.1);
        let m = bubble_mesh(&p).unwrap();
        let q = m.quality();
        assert!(q.min_angle_deg > 20.0, "min angle {}", q.min_angle_deg);
        let iface = m.facets_with_label(FacetLabel::Interface);
        let n_circle = (2.0 * std::f64::consts::PI * 0.25 / 0.1_f64).round() as usize;
        assert_eq!(iface.len(), n_circle);
        // inscribed polygon area
        let n = n_circle as f64;
        let poly = 0.5 * n * 0.25f64.powi(2) * (2.0 * std::f64::consts::PI / n).sin();
        assert!((m.subdomain_area(Subdomain::Inner) - poly).abs() < 1e-12);
        assert!((m.total_area() - 2.0).abs() < 1e-12);
    }
}
