//! Compressed-row sparse matrices and the direct sparse solver.
//!
//! Factorisation is delegated to `faer`'s sparse LU. The symbolic analysis
//! is cached and reused while the sparsity pattern stays the same, which is
//! the case across the time steps of a moving-mesh run.

use std::io::Write;

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets, summing duplicates. Columns
    /// within each row come out sorted and unique.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::Numeric(format!("triplet ({r}, {c}) outside {nrows}x{ncols}")));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[fill[r]] = (c, v);
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_by_key(|e| e.0);
            let mut last = usize::MAX;
            for &(c, v) in row.iter() {
                if c == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = c;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(c, r)).abs());
            }
        }
        worst
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push(Triplet::new(r, self.col_idx[k], self.values[k]));
            }
        }
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::Numeric(format!("sparse matrix construction failed: {e:?}")))
    }

    /// Matrix Market coordinate format.
    pub fn write_matrix_market(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{} {} {:.17e}", r + 1, self.col_idx[k] + 1, self.values[k])?;
            }
        }
        Ok(())
    }
}

/// Direct sparse solver with a cached symbolic factorisation.
#[derive(Default)]
pub struct SparseSolver {
    cached: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl SparseSolver {
    pub fn new() -> Self {
        SparseSolver { cached: None }
    }

    pub fn solve(&mut self, a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
        if a.nrows != a.ncols || b.len() != a.nrows {
            return Err(Error::Numeric("dimension mismatch in sparse solve".into()));
        }
        let n = a.nrows;
        if n == 0 {
            return Ok(Vec::new());
        }
        let fa = a.to_faer()?;
        let col_ptr = fa.symbolic().col_ptr().to_vec();
        let row_idx = fa.symbolic().row_idx().to_vec();
        let reuse = matches!(&self.cached, Some((cp, ri, _)) if *cp == col_ptr && *ri == row_idx);
        if !reuse {
            let sym = SymbolicLu::try_new(fa.symbolic())
                .map_err(|e| Error::Numeric(format!("symbolic factorisation failed: {e:?}")))?;
            self.cached = Some((col_ptr, row_idx, sym));
        }
        let sym = self.cached.as_ref().unwrap().2.clone();
        let lu = Lu::try_new_with_symbolic(sym, fa.as_ref())
            .map_err(|e| Error::Numeric(format!("sparse LU breakdown: {e:?}")))?;
        let rhs = Col::<f64>::from_fn(n, |i| b[i]);
        use faer::prelude::Solve;
        let x = lu.solve(&rhs);
        let out: Vec<f64> = (0..n).map(|i| x[i]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("sparse solve produced non-finite values (singular matrix?)".into()));
        }
        Ok(out)
    }
}

/// Relative residual `‖Ax - b‖ / max(‖b‖, tiny)`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    r / nb.max(1e-300)
}
