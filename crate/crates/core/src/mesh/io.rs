//! Plain-text mesh files and legacy VTK output.
//!
//! Text format, whitespace separated, `#` starts a comment:
//!
//! ```text
//! nodes N
//! x y            (N lines)
//! triangles M
//! a b c s        (M lines, 0-based node ids, s = 0 outer / 1 inner)
//! boundary K
//! a b label      (K lines, label one of dirichlet|freeslip|traction_free)
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{FacetLabel, Mesh2D, Subdomain, Vec2};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh2D, out: &mut impl Write) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "nodes {}", mesh.num_nodes()).unwrap();
    for x in mesh.nodes() {
        writeln!(s, "{:.17e} {:.17e}", x.x, x.y).unwrap();
    }
    writeln!(s, "triangles {}", mesh.num_elements()).unwrap();
    for (e, t) in mesh.triangles().iter().enumerate() {
        writeln!(s, "{} {} {} {}", t[0], t[1], t[2], mesh.element_label(e).index()).unwrap();
    }
    let bnd: Vec<_> = mesh.facets().iter().filter(|f| f.label.is_boundary()).collect();
    writeln!(s, "boundary {}", bnd.len()).unwrap();
    for f in bnd {
        writeln!(s, "{} {} {}", f.nodes[0], f.nodes[1], f.label.name()).unwrap();
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_mesh(input: impl BufRead) -> Result<Mesh2D> {
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (ln, line) in input.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            tokens.push((ln + 1, tok.to_string()));
        }
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| -> Result<(usize, String)> {
        it.next().ok_or_else(|| Error::Parse(format!("unexpected end of file, expected {what}")))
    };
    fn num<T: std::str::FromStr>((ln, tok): (usize, String), what: &str) -> Result<T> {
        tok.parse().map_err(|_| Error::Parse(format!("line {ln}: cannot parse {what} from '{tok}'")))
    }
    let keyword = |next: &mut dyn FnMut(&str) -> Result<(usize, String)>, kw: &str| -> Result<usize> {
        let (ln, tok) = next(kw)?;
        if tok != kw {
            return Err(Error::Parse(format!("line {ln}: expected '{kw}', found '{tok}'")));
        }
        num(next("count")?, "count")
    };

    let n = keyword(&mut next, "nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = num(next("x")?, "coordinate")?;
        let y: f64 = num(next("y")?, "coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse("non-finite coordinate".into()));
        }
        nodes.push(Vec2::new(x, y));
    }
    let m = keyword(&mut next, "triangles")?;
    let mut tris = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let a: usize = num(next("node")?, "node id")?;
        let b: usize = num(next("node")?, "node id")?;
        let c: usize = num(next("node")?, "node id")?;
        let s: usize = num(next("subdomain")?, "subdomain")?;
        tris.push([a, b, c]);
        labels.push(match s {
            0 => Subdomain::Outer,
            1 => Subdomain::Inner,
            _ => return Err(Error::Parse(format!("subdomain tag {s} is not 0 or 1"))),
        });
    }
    let k = keyword(&mut next, "boundary")?;
    let mut bl: HashMap<(usize, usize), FacetLabel> = HashMap::new();
    for _ in 0..k {
        let a: usize = num(next("node")?, "node id")?;
        let b: usize = num(next("node")?, "node id")?;
        let (ln, name) = next("label")?;
        let label = FacetLabel::from_name(&name)
            .filter(|l| l.is_boundary())
            .ok_or_else(|| Error::Parse(format!("line {ln}: unknown boundary label '{name}'")))?;
        bl.insert((a.min(b), a.max(b)), label);
    }
    let missing = std::cell::Cell::new(None);
    let mesh = Mesh2D::from_parts(nodes, tris, labels, |pair, _, _| {
        match bl.get(&(pair[0].min(pair[1]), pair[0].max(pair[1]))) {
            Some(&l) => l,
            None => {
                missing.set(Some(pair));
                FacetLabel::Dirichlet
            }
        }
    })?;
    if let Some(p) = missing.get() {
        return Err(Error::Labeling(format!("boundary facet ({}, {}) has no label", p[0], p[1])));
    }
    Ok(mesh)
}

/// Legacy ASCII VTK with the subdomain tag as cell data.
pub fn write_vtk(mesh: &Mesh2D, out: &mut impl Write) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", mesh.num_nodes()).unwrap();
    for x in mesh.nodes() {
        writeln!(s, "{} {} 0", x.x, x.y).unwrap();
    }
    writeln!(s, "CELLS {} {}", mesh.num_elements(), 4 * mesh.num_elements()).unwrap();
    for t in mesh.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "CELL_TYPES {}", mesh.num_elements()).unwrap();
    for _ in 0..mesh.num_elements() {
        writeln!(s, "5").unwrap();
    }
    writeln!(s, "CELL_DATA {}\nSCALARS subdomain int 1\nLOOKUP_TABLE default", mesh.num_elements()).unwrap();
    for e in 0..mesh.num_elements() {
        writeln!(s, "{}", mesh.element_label(e).index()).unwrap();
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}
