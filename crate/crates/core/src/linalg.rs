//! Sparse symmetric matrices and the direct solves used by the Newton
//! solver. Factorizations are delegated to `faer` (sequential build, so
//! results do not depend on thread count).

use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearSolveError {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("sparse factorization failed: {0}")]
    Backend(String),
}

/// Symmetric matrix in compressed row storage with both triangles stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetric {
    /// Assembles from `(row, col, value)` entries of the lower triangle
    /// (`row >= col`); duplicates are summed and mirrored to the upper
    /// triangle.
    pub fn from_lower_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in triplets {
            assert!(i < n && j < n && i >= j, "entry ({i}, {j}) outside the lower triangle");
            *acc.entry((i, j)).or_insert(0.0) += v;
            if i != j {
                *acc.entry((j, i)).or_insert(0.0) += v;
            }
        }
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(acc.len());
        let mut vals = Vec::with_capacity(acc.len());
        for (&(i, j), &v) in &acc {
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.n).fold(0.0, |m, i| m.max(self.get(i, i).abs()))
    }

    /// Principal submatrix on `keep` (ascending), renumbered densely.
    pub fn principal_submatrix(&self, keep: &[usize]) -> SparseSymmetric {
        let mut map = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let trips = keep.iter().flat_map(|&i| {
            let map = &map;
            self.row(i)
                .filter(move |&(j, _)| j <= i && map[j] != usize::MAX)
                .map(move |(j, v)| (map[i], map[j], v))
        });
        SparseSymmetric::from_lower_triplets(keep.len(), trips.collect::<Vec<_>>())
    }

    fn shifted_triplets(&self, shift: f64, lower_only: bool) -> Vec<Triplet<usize, usize, f64>> {
        let mut out = Vec::with_capacity(self.nnz() + self.n);
        for i in 0..self.n {
            let mut has_diag = false;
            for (j, v) in self.row(i) {
                if lower_only && j > i {
                    continue;
                }
                let v = if i == j {
                    has_diag = true;
                    v + shift
                } else {
                    v
                };
                out.push(Triplet::new(i, j, v));
            }
            if !has_diag {
                out.push(Triplet::new(i, i, shift));
            }
        }
        out
    }

    fn residual(&self, shift: f64, x: &[f64], b: &[f64]) -> Vec<f64> {
        let ax = self.mul_vec(x);
        (0..self.n).map(|i| b[i] - ax[i] - shift * x[i]).collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// Sparse `LLᵀ`; fails on matrices that are not positive definite.
    Cholesky,
    /// Sparse `LU` with partial pivoting, for indefinite systems.
    Lu,
}

/// Solves `(A + shift·I) x = b`, with one step of iterative refinement when
/// the relative backward error exceeds 1e-12.
pub fn solve_shifted(
    a: &SparseSymmetric,
    shift: f64,
    b: &[f64],
    method: Factorization,
) -> Result<Vec<f64>, LinearSolveError> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lower_only = method == Factorization::Cholesky;
    let trips = a.shifted_triplets(shift, lower_only);
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| LinearSolveError::Backend(format!("{e:?}")))?;

    let solve: Box<dyn Fn(&[f64]) -> Vec<f64>> = match method {
        Factorization::Cholesky => {
            let llt = mat.sp_cholesky(Side::Lower).map_err(|e| match e {
                faer::sparse::linalg::LltError::Numeric(_) => LinearSolveError::NotPositiveDefinite,
                other => LinearSolveError::Backend(format!("{other:?}")),
            })?;
            Box::new(move |rhs: &[f64]| {
                let x = llt.solve(Col::from_fn(n, |i| rhs[i]));
                (0..n).map(|i| x[i]).collect()
            })
        }
        Factorization::Lu => {
            let lu = mat.sp_lu().map_err(|e| match e {
                faer::sparse::linalg::LuError::SymbolicSingular { .. } => LinearSolveError::Singular,
                other => LinearSolveError::Backend(format!("{other:?}")),
            })?;
            Box::new(move |rhs: &[f64]| {
                let x = lu.solve(Col::from_fn(n, |i| rhs[i]));
                (0..n).map(|i| x[i]).collect()
            })
        }
    };

    let mut x = solve(b);
    if !x.iter().all(|v| v.is_finite()) {
        return Err(LinearSolveError::Singular);
    }
    let norm_inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a_norm = (0..n)
        .map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>() + shift.abs())
        .fold(0.0, f64::max);
    let backward_error = |x: &[f64]| {
        let r = a.residual(shift, x, b);
        norm_inf(&r) / (a_norm * norm_inf(x) + norm_inf(b)).max(f64::MIN_POSITIVE)
    };
    if backward_error(&x) > 1e-12 {
        let r = a.residual(shift, &x, b);
        let dx = solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(LinearSolveError::Singular);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSymmetric {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
        }
        SparseSymmetric::from_lower_triplets(n, t)
    }

    #[test]
    fn assembly_sums_and_mirrors() {
        let a = SparseSymmetric::from_lower_triplets(3, vec![(1, 0, 1.0), (1, 0, 2.0), (2, 2, 5.0)]);
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
        assert_eq!(a.get(2, 2), 5.0);
        assert_eq!(a.get(0, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, 5.0]);
        let sub = a.principal_submatrix(&[1, 2]);
        assert_eq!(sub.to_dense(), vec![vec![0.0, 0.0], vec![0.0, 5.0]]);
    }

    #[test]
    fn cholesky_and_lu_agree() {
        let a = laplacian_1d(20);
        let b: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let x1 = solve_shifted(&a, 0.0, &b, Factorization::Cholesky).unwrap();
        let x2 = solve_shifted(&a, 0.0, &b, Factorization::Lu).unwrap();
        let r = a.residual(0.0, &x1, &b);
        assert!(r.iter().all(|v| v.abs() < 1e-12));
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_matrix_fails_cholesky() {
        let a = SparseSymmetric::from_lower_triplets(2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        assert_eq!(
            solve_shifted(&a, 0.0, &[1.0, 1.0], Factorization::Cholesky),
            Err(LinearSolveError::NotPositiveDefinite)
        );
        let x = solve_shifted(&a, 0.0, &[1.0, 1.0], Factorization::Lu).unwrap();
        assert_eq!(x, vec![1.0, -1.0]);
        let x = solve_shifted(&a, 2.0, &[3.0, 1.0], Factorization::Cholesky).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }
}
