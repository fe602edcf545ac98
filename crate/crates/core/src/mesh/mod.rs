//! Conforming triangulations with facet topology and subdomain labels.
//!
//! A [`Mesh2D`] stores node coordinates, counter-clockwise triangles and a
//! facet list built once at construction. Facet orientation (which element
//! is "left") is frozen at construction; normals and tangents are always
//! recomputed from the current coordinates, so moving the nodes never flips
//! the sign convention of jump terms.

mod generate;
mod io;

pub use generate::{bubble_mesh, rectangle, tank, unit_square, BubbleMeshParams};
pub use io::{read_mesh, write_mesh, write_vtk};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Vec2 = nalgebra::Vector2<f64>;

/// Boundary or interior role of a facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FacetLabel {
    Interior,
    Interface,
    Dirichlet,
    FreeSlip,
    TractionFree,
}

impl FacetLabel {
    pub fn name(self) -> &'static str {
        match self {
            FacetLabel::Interior => "interior",
            FacetLabel::Interface => "interface",
            FacetLabel::Dirichlet => "dirichlet",
            FacetLabel::FreeSlip => "freeslip",
            FacetLabel::TractionFree => "traction_free",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "interior" => FacetLabel::Interior,
            "interface" => FacetLabel::Interface,
            "dirichlet" => FacetLabel::Dirichlet,
            "freeslip" => FacetLabel::FreeSlip,
            "traction_free" => FacetLabel::TractionFree,
            _ => return None,
        })
    }

    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            FacetLabel::Dirichlet | FacetLabel::FreeSlip | FacetLabel::TractionFree
        )
    }
}

/// Subdomain tag: `Outer` is the surrounding fluid, `Inner` the bubble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subdomain {
    Outer,
    Inner,
}

impl Subdomain {
    pub fn index(self) -> usize {
        match self {
            Subdomain::Outer => 0,
            Subdomain::Inner => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Oriented node pair; the left element sees it counter-clockwise.
    pub nodes: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    /// Local facet index (opposite local vertex) inside `left`.
    pub left_local: usize,
    pub right_local: Option<usize>,
    pub label: FacetLabel,
}

/// Unit normal (left to right), unit tangent and length of a facet.
#[derive(Clone, Copy, Debug)]
pub struct FacetFrame {
    pub normal: Vec2,
    pub tangent: Vec2,
    pub length: f64,
}

/// Result of [`Mesh2D::quality`].
#[derive(Clone, Copy, Debug)]
pub struct QualityReport {
    pub min_angle_deg: f64,
    pub min_area: f64,
    pub max_aspect_ratio: f64,
}

/// Geometric predicates used by [`build_mesh`].
pub struct LabelRules<'a> {
    /// Label for a boundary facet given its midpoint and outward normal.
    pub boundary: Box<dyn Fn(Vec2, Vec2) -> FacetLabel + 'a>,
    /// Subdomain of an element given its centroid.
    pub subdomain: Box<dyn Fn(Vec2) -> Subdomain + 'a>,
}

impl<'a> LabelRules<'a> {
    /// Every boundary facet gets `label`, every element is `Outer`.
    pub fn uniform(label: FacetLabel) -> Self {
        LabelRules {
            boundary: Box::new(move |_, _| label),
            subdomain: Box::new(|_| Subdomain::Outer),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh2D {
    nodes: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    facets: Vec<Facet>,
    element_facets: Vec<[usize; 3]>,
    element_labels: Vec<Subdomain>,
    config_id: u64,
}

/// Local facet `i` is opposite local vertex `i`, traversed counter-clockwise.
pub const LOCAL_FACET_VERTICES: [[usize; 2]; 3] = [[1, 2], [2, 0], [0, 1]];

pub fn build_mesh(nodes: Vec<Vec2>, triangles: Vec<[usize; 3]>, rules: &LabelRules) -> Result<Mesh2D> {
    let labels: Vec<Subdomain> = triangles
        .iter()
        .map(|t| {
            let c = t.iter().fold(Vec2::zeros(), |acc, &i| acc + nodes.get(i).copied().unwrap_or_default()) / 3.0;
            (rules.subdomain)(c)
        })
        .collect();
    Mesh2D::from_parts(nodes, triangles, labels, |_, mid, n| (rules.boundary)(mid, n))
}

impl Mesh2D {
    /// Builds the facet topology from explicit element labels. `boundary`
    /// receives the oriented node pair, midpoint and outward normal of each
    /// boundary facet.
    pub fn from_parts(
        nodes: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        element_labels: Vec<Subdomain>,
        boundary: impl Fn([usize; 2], Vec2, Vec2) -> FacetLabel,
    ) -> Result<Mesh2D> {
        if element_labels.len() != triangles.len() {
            return Err(Error::Labeling(format!(
                "{} element labels for {} triangles",
                element_labels.len(),
                triangles.len()
            )));
        }
        for (e, t) in triangles.iter().enumerate() {
            for &v in t {
                if v >= nodes.len() {
                    return Err(Error::Topology(format!("triangle {e} references missing node {v}")));
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Topology(format!("triangle {e} has repeated vertices")));
            }
            let area = signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            if area <= 0.0 {
                return Err(Error::Geometry(format!("triangle {e} is inverted (signed area {area:e})")));
            }
        }

        let mut facets: Vec<Facet> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut element_facets = vec![[0usize; 3]; triangles.len()];
        for (e, t) in triangles.iter().enumerate() {
            for (lf, pair) in LOCAL_FACET_VERTICES.iter().enumerate() {
                let a = t[pair[0]];
                let b = t[pair[1]];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, facets.len());
                        element_facets[e][lf] = facets.len();
                        facets.push(Facet {
                            nodes: [a, b],
                            left: e,
                            right: None,
                            left_local: lf,
                            right_local: None,
                            label: FacetLabel::Interior,
                        });
                    }
                    Some(&f) => {
                        let facet = &mut facets[f];
                        if facet.right.is_some() {
                            return Err(Error::Topology(format!(
                                "edge ({a},{b}) shared by more than two triangles"
                            )));
                        }
                        if facet.nodes != [b, a] {
                            return Err(Error::Topology(format!(
                                "edge ({a},{b}) traversed in the same direction by triangles {} and {e}",
                                facet.left
                            )));
                        }
                        facet.right = Some(e);
                        facet.right_local = Some(lf);
                        element_facets[e][lf] = f;
                    }
                }
            }
        }

        for facet in facets.iter_mut() {
            match facet.right {
                None => {
                    let a = nodes[facet.nodes[0]];
                    let b = nodes[facet.nodes[1]];
                    let t = (b - a).normalize();
                    let n = Vec2::new(t.y, -t.x);
                    let label = boundary(facet.nodes, 0.5 * (a + b), n);
                    if !label.is_boundary() {
                        return Err(Error::Labeling(format!(
                            "boundary facet ({}, {}) labeled {}",
                            facet.nodes[0],
                            facet.nodes[1],
                            label.name()
                        )));
                    }
                    facet.label = label;
                }
                Some(r) => {
                    let l = facet.left;
                    if element_labels[l] != element_labels[r] {
                        facet.label = FacetLabel::Interface;
                        // The left element of an interface facet is the inner one,
                        // so the stored normal points from the bubble outwards.
                        if element_labels[l] == Subdomain::Outer {
                            facet.nodes = [facet.nodes[1], facet.nodes[0]];
                            facet.left = r;
                            facet.right = Some(l);
                            let ll = facet.left_local;
                            facet.left_local = facet.right_local.unwrap();
                            facet.right_local = Some(ll);
                        }
                    } else {
                        facet.label = FacetLabel::Interior;
                    }
                }
            }
        }

        Ok(Mesh2D {
            nodes,
            triangles,
            facets,
            element_facets,
            element_labels,
            config_id: 0,
        })
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn element_facets(&self, e: usize) -> [usize; 3] {
        self.element_facets[e]
    }

    pub fn element_label(&self, e: usize) -> Subdomain {
        self.element_labels[e]
    }

    pub fn element_labels(&self) -> &[Subdomain] {
        &self.element_labels
    }

    #[cfg(test)]
    pub(crate) fn set_facet_label(&mut self, f: usize, label: FacetLabel) {
        self.facets[f].label = label;
    }

    /// Identifier of the node configuration; bumped by every motion.
    pub fn config_id(&self) -> u64 {
        self.config_id
    }

    pub fn vertices(&self, e: usize) -> [Vec2; 3] {
        let t = self.triangles[e];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn area(&self, e: usize) -> f64 {
        let [a, b, c] = self.vertices(e);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, e: usize) -> Vec2 {
        let [a, b, c] = self.vertices(e);
        (a + b + c) / 3.0
    }

    /// Longest edge of the element.
    pub fn diameter(&self, e: usize) -> f64 {
        let [a, b, c] = self.vertices(e);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    pub fn facet_frame(&self, f: usize) -> FacetFrame {
        let facet = &self.facets[f];
        let a = self.nodes[facet.nodes[0]];
        let b = self.nodes[facet.nodes[1]];
        let d = b - a;
        let length = d.norm();
        let tangent = d / length;
        FacetFrame {
            normal: Vec2::new(tangent.y, -tangent.x),
            tangent,
            length,
        }
    }

    pub fn facet_midpoint(&self, f: usize) -> Vec2 {
        let facet = &self.facets[f];
        0.5 * (self.nodes[facet.nodes[0]] + self.nodes[facet.nodes[1]])
    }

    /// +1 if `e` is the left element of facet `f` (outward normal equals the
    /// stored normal), -1 if it is the right one.
    pub fn facet_sign(&self, e: usize, f: usize) -> Result<f64> {
        let facet = &self.facets[f];
        if facet.left == e {
            Ok(1.0)
        } else if facet.right == Some(e) {
            Ok(-1.0)
        } else {
            Err(Error::Topology(format!("facet {f} is not a facet of element {e}")))
        }
    }

    /// Local index of facet `f` inside element `e`.
    pub fn local_facet(&self, e: usize, f: usize) -> Result<usize> {
        self.element_facets[e]
            .iter()
            .position(|&g| g == f)
            .ok_or_else(|| Error::Topology(format!("facet {f} is not a facet of element {e}")))
    }

    /// Outward unit normal of element `e` on its local facet `lf`.
    pub fn outward_normal(&self, e: usize, lf: usize) -> Vec2 {
        let f = self.element_facets[e][lf];
        let frame = self.facet_frame(f);
        if self.facets[f].left == e {
            frame.normal
        } else {
            -frame.normal
        }
    }

    /// Indices of facets carrying `label`.
    pub fn facets_with_label(&self, label: FacetLabel) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.facets[f].label == label).collect()
    }

    /// Nodes lying on at least one facet with one of the given labels.
    pub fn nodes_on(&self, labels: &[FacetLabel]) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        for facet in &self.facets {
            if labels.contains(&facet.label) {
                mark[facet.nodes[0]] = true;
                mark[facet.nodes[1]] = true;
            }
        }
        mark
    }

    /// Returns a mesh with the same topology and nodes displaced by `displacement`.
    pub fn move_nodes(&self, displacement: &[Vec2]) -> Result<Mesh2D> {
        if displacement.len() != self.nodes.len() {
            return Err(Error::Parameter(format!(
                "displacement has {} entries for {} nodes",
                displacement.len(),
                self.nodes.len()
            )));
        }
        let nodes = self.nodes.iter().zip(displacement).map(|(x, d)| x + d).collect();
        self.with_nodes(nodes)
    }

    /// Returns a mesh with the same topology at the given node positions.
    pub fn with_nodes(&self, nodes: Vec<Vec2>) -> Result<Mesh2D> {
        if nodes.len() != self.nodes.len() {
            return Err(Error::Parameter("node count changed".into()));
        }
        let mut worst: Option<(usize, f64)> = None;
        for (e, t) in self.triangles.iter().enumerate() {
            let area = signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            if area <= 0.0 && worst.is_none_or(|(_, a)| area < a) {
                worst = Some((e, area));
            }
        }
        if let Some((element, area)) = worst {
            return Err(Error::MeshTangling { element, area });
        }
        Ok(Mesh2D {
            nodes,
            triangles: self.triangles.clone(),
            facets: self.facets.clone(),
            element_facets: self.element_facets.clone(),
            element_labels: self.element_labels.clone(),
            config_id: self.config_id + 1,
        })
    }

    pub fn quality(&self) -> QualityReport {
        let mut min_angle = f64::INFINITY;
        let mut min_area = f64::INFINITY;
        let mut max_aspect: f64 = 0.0;
        for e in 0..self.num_elements() {
            let v = self.vertices(e);
            let area = signed_area(v[0], v[1], v[2]);
            min_area = min_area.min(area);
            let mut longest: f64 = 0.0;
            for i in 0..3 {
                let p = v[(i + 1) % 3] - v[i];
                let q = v[(i + 2) % 3] - v[i];
                longest = longest.max(p.norm());
                let cross = (p.x * q.y - p.y * q.x).abs();
                min_angle = min_angle.min(cross.atan2(p.dot(&q)).to_degrees());
            }
            max_aspect = max_aspect.max(3f64.sqrt() * longest * longest / (4.0 * area));
        }
        QualityReport {
            min_angle_deg: min_angle,
            min_area,
            max_aspect_ratio: max_aspect,
        }
    }

    /// Total measure of the elements of one subdomain.
    pub fn subdomain_area(&self, which: Subdomain) -> f64 {
        (0..self.num_elements())
            .filter(|&e| self.element_labels[e] == which)
            .map(|e| self.area(e))
            .sum()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.area(e)).sum()
    }
}

pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}
