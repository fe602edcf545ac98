//! File outputs: CSV series, legacy VTK snapshots, convergence tables and
//! the machine-readable error record.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fem::field::{eval_pressure, eval_velocity};
use crate::fem::Space;
use crate::hdg::FlowState;
use crate::mesh::{Mesh2D, Vec2};

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Header line then one line per row.
pub fn write_csv<I: IntoIterator<Item = String>>(path: &Path, header: &str, rows: I) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    Ok(())
}

/// Mesh with subdomain tag, centroid velocity and centroid pressure as cell data.
pub fn write_state_vtk(space: &Space, mesh: &Mesh2D, state: &FlowState, out: &mut impl Write) -> Result<()> {
    let c = Vec2::new(1.0 / 3.0, 1.0 / 3.0);
    let mut s = String::new();
    let ne = mesh.num_elements();
    writeln!(s, "# vtk DataFile Version 3.0\nflow\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", mesh.num_nodes()).unwrap();
    for x in mesh.nodes() {
        writeln!(s, "{:.12e} {:.12e} 0", x.x, x.y).unwrap();
    }
    writeln!(s, "CELLS {} {}", ne, 4 * ne).unwrap();
    for t in mesh.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "CELL_TYPES {ne}").unwrap();
    for _ in 0..ne {
        writeln!(s, "5").unwrap();
    }
    writeln!(s, "CELL_DATA {ne}\nSCALARS subdomain int 1\nLOOKUP_TABLE default").unwrap();
    for e in 0..ne {
        writeln!(s, "{}", mesh.element_label(e).index()).unwrap();
    }
    writeln!(s, "SCALARS pressure double 1\nLOOKUP_TABLE default").unwrap();
    for e in 0..ne {
        writeln!(s, "{:.10e}", eval_pressure(space, mesh, &state.p, e, c)?.0).unwrap();
    }
    writeln!(s, "VECTORS velocity double").unwrap();
    for e in 0..ne {
        let u = eval_velocity(space, mesh, &state.u, e, c)?.value;
        writeln!(s, "{:.10e} {:.10e} 0", u.x, u.y).unwrap();
    }
    if s.contains("NaN") || s.contains("inf") {
        return Err(Error::Numeric("refusing to write non-finite values".into()));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// `dir/<stem>_<step>.vtk`.
pub fn snapshot_path(dir: &Path, stem: &str, step: usize) -> PathBuf {
    dir.join(format!("{stem}_{step:06}.vtk"))
}

/// Errors per refinement level with observed orders `log2(e_{2h} / e_h)`.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub label: String,
    pub levels: Vec<usize>,
    pub errors: Vec<f64>,
}

impl ConvergenceRecord {
    pub fn new(label: impl Into<String>) -> Self {
        ConvergenceRecord {
            label: label.into(),
            levels: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn push(&mut self, inv_h: usize, error: f64) {
        self.levels.push(inv_h);
        self.errors.push(error);
    }

    /// Order between consecutive levels; `None` for the first level.
    pub fn orders(&self) -> Vec<Option<f64>> {
        (0..self.errors.len())
            .map(|i| {
                if i == 0 {
                    None
                } else {
                    let ratio = self.levels[i] as f64 / self.levels[i - 1] as f64;
                    Some((self.errors[i - 1] / self.errors[i]).ln() / ratio.ln())
                }
            })
            .collect()
    }

    pub fn min_order(&self) -> Option<f64> {
        self.orders().into_iter().flatten().reduce(f64::min)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{}\n{:>6}  {:>12}  {:>6}\n", self.label, "1/h", "L2 error", "order");
        for ((n, e), o) in self.levels.iter().zip(&self.errors).zip(self.orders()) {
            let o = o.map_or_else(|| "-".to_string(), |o| format!("{o:.2}"));
            let _ = writeln!(s, "{n:>6}  {e:>12.3e}  {o:>6}");
        }
        s
    }
}

/// One-line JSON record describing a failed run.
pub fn error_record(err: &Error, case: &str) -> String {
    serde_json::json!({
        "status": "error",
        "case": case,
        "kind": err.kind(),
        "message": err.to_string(),
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_from_halving() {
        let mut r = ConvergenceRecord::new("k=2");
        r.push(8, 8e-3);
        r.push(16, 1e-3);
        r.push(32, 1.25e-4);
        let o = r.orders();
        assert!(o[0].is_none());
        assert!((o[1].unwrap() - 3.0).abs() < 1e-12 && (o[2].unwrap() - 3.0).abs() < 1e-12);
        assert!(r.table().contains("3.00"));
    }

    #[test]
    fn error_record_is_json() {
        let rec = error_record(&Error::SelfIntersection { first: 3, second: 9 }, "bubble");
        let v: serde_json::Value = serde_json::from_str(&rec).unwrap();
        assert_eq!(v["kind"], "self_intersection");
        assert_eq!(v["case"], "bubble");
    }
}
