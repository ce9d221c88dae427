//! Sparse Cholesky solves on principal submatrices of a symmetric matrix.
//!
//! The symbolic factorization is computed once per pattern. Individual dofs
//! can then be pinned to prescribed values without changing the pattern,
//! which is what the active-set iteration needs.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, Mat, Par, Side};

use crate::error::{Error, Result};
use crate::fem::CsrMatrix;

const NONE: usize = usize::MAX;

pub struct ReducedSolver<'a> {
    matrix: &'a CsrMatrix,
    /// Full index of each reduced unknown, ascending.
    kept: Vec<usize>,
    reduced_of: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    /// Source position in the CSR value array for every lower-triangle entry.
    source: Vec<usize>,
    diag_pos: Vec<usize>,
    symbolic: SymbolicCholesky<usize>,
}

impl<'a> ReducedSolver<'a> {
    /// Prepares solves on the rows/columns with `keep[i] == true`.
    /// `matrix` must be structurally and numerically symmetric.
    pub fn new(matrix: &'a CsrMatrix, keep: &[bool]) -> Result<Self> {
        let n = matrix.dim();
        assert_eq!(keep.len(), n);
        let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
        let mut reduced_of = vec![NONE; n];
        for (r, &i) in kept.iter().enumerate() {
            reduced_of[i] = r;
        }

        // Column j of the lower triangle equals the upper part of row j.
        let mut col_ptr = Vec::with_capacity(kept.len() + 1);
        let mut row_idx = Vec::new();
        let mut source = Vec::new();
        let mut diag_pos = Vec::with_capacity(kept.len());
        col_ptr.push(0);
        for (rj, &j) in kept.iter().enumerate() {
            let (lo, hi) = (matrix.row_ptr()[j], matrix.row_ptr()[j + 1]);
            let mut has_diag = false;
            for k in lo..hi {
                let ri = reduced_of[matrix.col_idx()[k]];
                if ri == NONE || ri < rj {
                    continue;
                }
                if ri == rj {
                    has_diag = true;
                    diag_pos.push(row_idx.len());
                }
                row_idx.push(ri);
                source.push(k);
            }
            if !has_diag {
                return Err(Error::Singular(format!("row {j} has no diagonal entry")));
            }
            col_ptr.push(row_idx.len());
        }

        let m = kept.len();
        let pattern = SymbolicSparseColMatRef::new_checked(m, m, &col_ptr, None, &row_idx);
        let symbolic = factorize_symbolic_cholesky(
            pattern,
            Side::Lower,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| Error::Singular(format!("symbolic factorization failed: {e:?}")))?;

        Ok(ReducedSolver {
            matrix,
            kept,
            reduced_of,
            col_ptr,
            row_idx,
            source,
            diag_pos,
            symbolic,
        })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    fn reduced(&self, i: usize) -> Option<usize> {
        let r = self.reduced_of[i];
        (r != NONE).then_some(r)
    }

    /// Solves the kept rows of `K x = rhs` with the dofs in `pinned` fixed to
    /// the given values. Pinned dofs may lie inside or outside the kept set;
    /// their values are lifted to the right-hand side. Dofs neither kept nor
    /// pinned are zero in the returned full-length vector.
    pub fn solve(&self, rhs: &[f64], pinned: &[(usize, f64)]) -> Result<Vec<f64>> {
        let n = self.matrix.dim();
        let m = self.kept.len();
        assert_eq!(rhs.len(), n);

        let mut is_pinned = vec![false; m];
        for &(i, _) in pinned {
            if let Some(r) = self.reduced(i) {
                is_pinned[r] = true;
            }
        }

        let all = self.matrix.values();
        let mut values = vec![0.0; self.row_idx.len()];
        for rj in 0..m {
            for k in self.col_ptr[rj]..self.col_ptr[rj + 1] {
                let ri = self.row_idx[k];
                if ri == rj || !(is_pinned[ri] || is_pinned[rj]) {
                    values[k] = all[self.source[k]];
                }
            }
        }

        let mut b = Mat::<f64>::zeros(m, 1);
        for (r, &i) in self.kept.iter().enumerate() {
            b[(r, 0)] = rhs[i];
        }
        for &(i, v) in pinned {
            // Symmetry: column i of K is row i.
            let (cols, vals) = self.matrix.row(i);
            for (&j, &kji) in cols.iter().zip(vals) {
                if let Some(rj) = self.reduced(j) {
                    if !is_pinned[rj] {
                        b[(rj, 0)] -= kji * v;
                    }
                }
            }
        }
        for &(i, v) in pinned {
            if let Some(r) = self.reduced(i) {
                b[(r, 0)] = values[self.diag_pos[r]] * v;
            }
        }

        let par = Par::Seq;
        let mut l_values = vec![0.0; self.symbolic.len_val()];
        let a = SparseColMatRef::new(
            SymbolicSparseColMatRef::new_checked(m, m, &self.col_ptr, None, &self.row_idx),
            &values,
        );
        let llt = self
            .symbolic
            .factorize_numeric_llt(
                &mut l_values,
                a,
                Side::Lower,
                Default::default(),
                par,
                MemStack::new(&mut MemBuffer::new(
                    self.symbolic
                        .factorize_numeric_llt_scratch::<f64>(par, Default::default()),
                )),
                Default::default(),
            )
            .map_err(|e| Error::Singular(format!("matrix is not positive definite: {e:?}")))?;
        llt.solve_in_place_with_conj(
            Conj::No,
            b.as_mut(),
            par,
            MemStack::new(&mut MemBuffer::new(
                self.symbolic.solve_in_place_scratch::<f64>(1, par),
            )),
        );

        let mut x = vec![0.0; n];
        for (r, &i) in self.kept.iter().enumerate() {
            x[i] = b[(r, 0)];
        }
        for &(i, v) in pinned {
            x[i] = v;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![i];
                if i > 0 {
                    r.push(i - 1);
                }
                if i + 1 < n {
                    r.push(i + 1);
                }
                r
            })
            .collect();
        let mut m = CsrMatrix::from_pattern(rows);
        for i in 0..n {
            m.add(i, i, 2.0);
            if i > 0 {
                m.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                m.add(i, i + 1, -1.0);
            }
        }
        m
    }

    #[test]
    fn full_solve() {
        let k = laplacian(5);
        let solver = ReducedSolver::new(&k, &[true; 5]).unwrap();
        let x_true = [1.0, -2.0, 0.5, 3.0, 0.25];
        let b = k.matvec(&x_true);
        let x = solver.solve(&b, &[]).unwrap();
        for i in 0..5 {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pinned_and_dropped_dofs() {
        // Drop dof 0, pin dof 2 to 1.0: the result must solve the remaining rows.
        let k = laplacian(5);
        let keep = [false, true, true, true, true];
        let solver = ReducedSolver::new(&k, &keep).unwrap();
        let rhs = [0.0, 1.0, 0.0, 0.0, 1.0];
        let x = solver.solve(&rhs, &[(2, 1.0)]).unwrap();
        assert_eq!(x[2], 1.0);
        assert_eq!(x[0], 0.0);
        let r = k.matvec(&x);
        for i in [1, 3, 4] {
            assert!((r[i] - rhs[i]).abs() < 1e-12, "row {i}");
        }
        // Pinning the dropped dof lifts its value into the neighbouring row.
        let x = solver.solve(&rhs, &[(0, 2.0), (2, 1.0)]).unwrap();
        assert_eq!(x[0], 2.0);
        let r = k.matvec(&x);
        for i in [1, 3, 4] {
            assert!((r[i] - rhs[i]).abs() < 1e-12, "row {i}");
        }
    }

    #[test]
    fn indefinite_reported() {
        let mut k = laplacian(3);
        k.add(1, 1, -10.0);
        let solver = ReducedSolver::new(&k, &[true; 3]).unwrap();
        assert!(matches!(
            solver.solve(&[1.0, 1.0, 1.0], &[]),
            Err(Error::Singular(_))
        ));
    }
}
