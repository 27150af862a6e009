//! Dense matrices of scalars with exact Gaussian elimination.
//!
//! This is the elimination backend for the module calculus. The field
//! oracles deliberately do not use it.

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vec<Scalar>>, nrows: usize) -> Self {
        let ncols = cols.len();
        let mut m = Matrix::zero(nrows, ncols);
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length mismatch");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&n| Scalar::from_int(n)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(r, c) + &(a * b);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row i -= f * row j, skipping zero entries of row j.
    fn row_sub_mul(&mut self, i: usize, j: usize, f: &Scalar, from_col: usize) {
        if f.is_zero() {
            return;
        }
        for c in from_col..self.cols {
            let v = self.at(j, c);
            if v.is_zero() {
                continue;
            }
            let w = self.at(i, c) - &(f * v);
            self.set(i, c, w);
        }
    }

    fn scale_row(&mut self, i: usize, f: &Scalar) {
        for c in 0..self.cols {
            if !self.at(i, c).is_zero() {
                let v = self.at(i, c) * f;
                self.set(i, c, v);
            }
        }
    }

    /// Full reduced row echelon form in place; returns the pivot columns.
    /// Identical row operations are applied to `companion` when given.
    /// Pivot choice (first nonzero row in the leftmost unfinished column) is
    /// deterministic.
    pub fn rref_with_companion(&mut self, mut companion: Option<&mut Matrix>) -> Vec<usize> {
        if let Some(cm) = companion.as_deref() {
            assert_eq!(cm.rows(), self.rows, "companion row count mismatch");
        }
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..self.cols {
            let Some(pr) = (rank..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(rank, pr);
            if let Some(cm) = companion.as_deref_mut() {
                cm.swap_rows(rank, pr);
            }
            let inv = &Scalar::one() / self.at(rank, col);
            if !inv.is_one() {
                self.scale_row(rank, &inv);
                if let Some(cm) = companion.as_deref_mut() {
                    cm.scale_row(rank, &inv);
                }
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = self.at(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                self.row_sub_mul(r, rank, &f, col);
                if let Some(cm) = companion.as_deref_mut() {
                    cm.row_sub_mul(r, rank, &f, 0);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_with_companion(None)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A basis of { x : self * x = 0 }, from the standard free-variable
    /// parametrization of the reduced echelon form. Basis vectors are ordered
    /// by ascending free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = -m.at(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = rhs column-by-column. Returns one solution per
    /// consistent column (free variables set to zero), `None` for
    /// inconsistent columns.
    pub fn solve_columns(&self, rhs: &Matrix) -> Vec<Option<Vec<Scalar>>> {
        assert_eq!(self.rows, rhs.rows, "rhs row count mismatch");
        let mut m = self.clone();
        let mut cm = rhs.clone();
        let pivots = m.rref_with_companion(Some(&mut cm));
        let rank = pivots.len();
        (0..rhs.cols)
            .map(|j| {
                if (rank..self.rows).any(|r| !cm.at(r, j).is_zero()) {
                    return None;
                }
                let mut x = vec![Scalar::zero(); self.cols];
                for (row, &col) in pivots.iter().enumerate() {
                    x[col] = cm.at(row, j).clone();
                }
                Some(x)
            })
            .collect()
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.at(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Reduce `v` against canonical echelon rows (as produced by `rref`): for
/// each row with pivot column j, subtract `v[j] * row`. The result has zeros
/// in every pivot column.
pub fn reduce_against_rref(v: &mut [Scalar], rows: &[Vec<Scalar>], pivots: &[usize]) {
    for (row, &pc) in rows.iter().zip(pivots) {
        let f = v[pc].clone();
        if f.is_zero() {
            continue;
        }
        for (x, r) in v.iter_mut().zip(row) {
            if !r.is_zero() {
                *x = &*x - &(&f * r);
            }
        }
    }
}

/// RREF-canonical basis of the row space of the given vectors.
/// Returns (rows, pivot columns); rows are nonzero with leading ones.
pub fn canonical_row_basis(vectors: &[Vec<Scalar>]) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    if vectors.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let mut m = Matrix::from_rows(vectors.to_vec());
    let pivots = m.rref();
    let rows = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rref_and_rank() {
        let mut m = Matrix::int_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let pivots = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.at(0, 0), &s(1));
        assert_eq!(m.at(0, 1), &s(0));
        assert_eq!(m.at(1, 1), &s(1));
    }

    #[test]
    fn nullspace_solves() {
        let m = Matrix::int_rows(&[&[1, 1, 1], &[0, 1, 2]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            let col = Matrix::from_cols(vec![v.clone()], 3);
            assert!(m.mul(&col).is_zero());
        }
    }

    #[test]
    fn nullspace_of_empty_map() {
        let m = Matrix::zero(0, 3);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = Matrix::int_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let rhs = Matrix::int_rows(&[&[1, 0], &[2, 0], &[3, 1]]);
        let sols = m.solve_columns(&rhs);
        assert_eq!(sols[0], Some(vec![s(1), s(2)]));
        assert_eq!(sols[1], None);
    }

    #[test]
    fn multiply() {
        let a = Matrix::int_rows(&[&[1, 2], &[3, 4]]);
        let b = Matrix::int_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), Matrix::int_rows(&[&[2, 1], &[4, 3]]));
    }

    #[test]
    fn canonical_basis_normalizes() {
        let (rows, pivots) = canonical_row_basis(&[vec![s(5)]]);
        assert_eq!(rows, vec![vec![s(1)]]);
        assert_eq!(pivots, vec![0]);
    }
}
