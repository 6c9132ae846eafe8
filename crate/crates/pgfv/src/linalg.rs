//! Minimal sparse and dense linear algebra: CSR matrices, a Jacobi-preconditioned
//! conjugate-gradient solver for SPD systems, a dense LU with partial pivoting for
//! general square systems, and a Householder-QR minimum-norm solver for small
//! underdetermined systems.
//!
//! Everything uses a fixed summation order so results are bit-reproducible for
//! identical inputs.

use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from (row, col, value) triplets. Duplicate entries
    /// are summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> SparseMatrix {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());

        let mut i = 0;
        while i < sorted.len() {
            let (r, c, _) = sorted[i];
            assert!(r < n_rows && c < n_cols, "triplet ({r},{c}) out of bounds");
            let mut v = 0.0;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                v += sorted[i].2;
                i += 1;
            }
            if v != 0.0 {
                row_offsets[r + 1] += 1;
                col_indices.push(c);
                values.push(v);
            }
        }
        for r in 0..n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        SparseMatrix { n_rows, n_cols, row_offsets, col_indices, values }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        SparseMatrix::from_triplets(n, n, &triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `r` as (column, value) pairs, in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        self.col_indices[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                triplets.push((c, r, v));
            }
        }
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, &triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                d.set(r, c, v);
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute asymmetry |A[i,j] - A[j,i]| over the sparsity pattern.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0f64;
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - t.get(r, c)).abs());
            }
        }
        worst
    }
}

/// y = A·x with per-row left-to-right summation.
pub fn spmv(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.n_cols, x.len(), "spmv: dimension mismatch ({} cols vs {} entries)", a.n_cols, x.len());
    let mut y = vec![0.0; a.n_rows];
    for r in 0..a.n_rows {
        let mut acc = 0.0;
        for (c, v) in a.row(r) {
            acc += v * x[c];
        }
        y[r] = acc;
    }
    y
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Solves A·x = b for symmetric positive definite A by Jacobi-preconditioned
/// conjugate gradients. Returns x with ‖Ax − b‖ ≤ tol·‖b‖.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = a.n_rows;
    if a.n_cols != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: {}x{} matrix with rhs of length {}",
            a.n_rows,
            a.n_cols,
            b.len()
        )));
    }
    let asym = a.asymmetry();
    if asym > 1e-12 * (1.0 + a.max_abs()) {
        return Err(Error::NotSpd(format!("asymmetry {asym:.3e}")));
    }

    let mut inv_diag = vec![0.0; n];
    for i in 0..n {
        let d = a.get(i, i);
        if d <= 0.0 {
            return Err(Error::NotSpd(format!("diagonal entry {d:.3e} at row {i}")));
        }
        inv_diag[i] = 1.0 / d;
    }

    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    let max_iter = 10 * n;
    for _ in 0..max_iter {
        let ap = spmv(a, &p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NotSpd(format!("curvature p'Ap = {pap:.3e}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: norm2(&r) / b_norm })
}

/// Solves A·x = b for general square A by dense LU with partial pivoting,
/// followed by one step of iterative refinement against the sparse matrix.
pub fn solve_general(a: &SparseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = a.n_rows;
    if a.n_cols != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_general: {}x{} matrix with rhs of length {}",
            a.n_rows,
            a.n_cols,
            b.len()
        )));
    }
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        // A singular matrix must still be reported.
        let _ = LuFactors::factor(a.to_dense())?;
        return Ok(vec![0.0; n]);
    }

    let lu = LuFactors::factor(a.to_dense())?;
    let mut x = lu.solve(b);

    // One refinement pass keeps the residual near machine precision even for
    // poorly scaled saddle systems.
    for _ in 0..2 {
        let ax = spmv(a, &x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        if norm2(&r) <= tol * b_norm {
            return Ok(x);
        }
        let dx = lu.solve(&r);
        for i in 0..n {
            x[i] += dx[i];
        }
    }
    let res = {
        let ax = spmv(a, &x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        norm2(&r) / b_norm
    };
    if res <= tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence { iterations: 2, residual: res })
    }
}

/// Dense LU factorization with partial pivoting.
struct LuFactors {
    n: usize,
    data: Vec<f64>, // row-major, L below the diagonal, U on and above
    pivots: Vec<usize>,
}

impl LuFactors {
    fn factor(m: DenseMatrix) -> Result<LuFactors> {
        let n = m.n_rows();
        assert_eq!(n, m.n_cols(), "LU requires a square matrix");
        let mut a = m.into_values();
        let mut pivots = vec![0usize; n];
        let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
        let pivot_floor = scale * f64::EPSILON * n as f64;

        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= pivot_floor {
                return Err(Error::Singular { step: k, pivot: best });
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
            }
            let inv_pivot = 1.0 / a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k] * inv_pivot;
                a[i * n + k] = factor;
                if factor != 0.0 {
                    let (head, tail) = a.split_at_mut(i * n);
                    let row_k = &head[k * n + k + 1..k * n + n];
                    let row_i = &mut tail[k + 1..n];
                    for (ri, rk) in row_i.iter_mut().zip(row_k) {
                        *ri -= factor * rk;
                    }
                }
            }
        }
        Ok(LuFactors { n, data: a, pivots })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        // Row swaps during factorization move already-stored multipliers too,
        // so the full permutation must be applied before the forward solve.
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for k in 0..n {
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..n {
                    x[i] -= self.data[i * n + k] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..n {
                acc -= self.data[k * n + j] * x[j];
            }
            x[k] = acc / self.data[k * n + k];
        }
        x
    }
}

/// Row-major dense matrix for small local systems.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> DenseMatrix {
        DenseMatrix { n_rows, n_cols, values: vec![0.0; n_rows * n_cols] }
    }

    pub fn from_rows(rows: &[&[f64]]) -> DenseMatrix {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            values.extend_from_slice(r);
        }
        DenseMatrix { n_rows, n_cols, values }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.n_cols + c] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n_cols, x.len(), "matvec: dimension mismatch");
        (0..self.n_rows)
            .map(|r| dot(&self.values[r * self.n_cols..(r + 1) * self.n_cols], x))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.values)
    }

    fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Minimum-norm solution of an underdetermined full-row-rank system together
/// with an orthonormal basis of the null space of A.
pub struct MinNormSolution {
    pub x: Vec<f64>,
    pub rank: usize,
    pub null_basis: Vec<Vec<f64>>,
}

/// Returns the minimum-Euclidean-norm x with A·x = b for an m×n matrix with
/// m < n, via a Householder QR factorization of Aᵀ. The numerical rank is
/// checked against 1e-10·‖A‖_F; rank deficiency is an error.
pub fn least_squares_min_norm(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(min_norm_with_nullspace(a, b)?.x)
}

/// Full version of [`least_squares_min_norm`] exposing the null space.
pub fn min_norm_with_nullspace(a: &DenseMatrix, b: &[f64]) -> Result<MinNormSolution> {
    let m = a.n_rows();
    let n = a.n_cols();
    assert!(m <= n, "expected an underdetermined system (m <= n)");
    assert_eq!(b.len(), m, "rhs length mismatch");

    // Householder QR of Aᵀ (n×m): Aᵀ = Q·R with Q n×n orthogonal.
    let mut qr = DenseMatrix::zeros(n, m);
    for r in 0..m {
        for c in 0..n {
            qr.set(c, r, a.get(r, c));
        }
    }
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        q.set(i, i, 1.0);
    }

    for k in 0..m {
        // Householder vector for column k below row k.
        let col: Vec<f64> = (k..n).map(|i| qr.get(i, k)).collect();
        let alpha = norm2(&col);
        if alpha == 0.0 {
            continue;
        }
        let mut v = col;
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == 0.0 {
            continue;
        }
        // Apply (I - 2vvᵀ/vᵀv) to the remaining columns of QR.
        for c in k..m {
            let mut s = 0.0;
            for i in k..n {
                s += v[i - k] * qr.get(i, c);
            }
            let f = 2.0 * s / vnorm2;
            for i in k..n {
                qr.set(i, c, qr.get(i, c) - f * v[i - k]);
            }
        }
        // Accumulate Q (apply reflector on the right of the identity product).
        for r in 0..n {
            let mut s = 0.0;
            for i in k..n {
                s += q.get(r, i) * v[i - k];
            }
            let f = 2.0 * s / vnorm2;
            for i in k..n {
                q.set(r, i, q.get(r, i) - f * v[i - k]);
            }
        }
    }

    let tol = 1e-10 * a.frobenius_norm().max(f64::MIN_POSITIVE);
    let rank = (0..m).filter(|&k| qr.get(k, k).abs() > tol).count();
    if rank < m {
        return Err(Error::RankDeficient { rank, expected: m });
    }

    // A = Rᵀ Qᵀ, so A x = b becomes Rᵀ y = b with x = Q[:, 0..m] y.
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut acc = b[i];
        for j in 0..i {
            acc -= qr.get(j, i) * y[j];
        }
        y[i] = acc / qr.get(i, i);
    }
    let x: Vec<f64> = (0..n).map(|r| (0..m).map(|c| q.get(r, c) * y[c]).sum()).collect();

    let null_basis: Vec<Vec<f64>> =
        (m..n).map(|c| (0..n).map(|r| q.get(r, c)).collect()).collect();

    Ok(MinNormSolution { x, rank, null_basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spmv_identity() {
        let a = SparseMatrix::identity(3);
        assert_eq!(spmv(&a, &[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_zero_matrix() {
        let a = SparseMatrix::from_triplets(2, 2, &[]);
        assert_eq!(spmv(&a, &[5.0, -3.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn spmv_hand_example() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)]);
        assert_eq!(spmv(&a, &[1.0, 1.0]), vec![2.0, 4.0]);
    }

    #[test]
    fn triplets_sum_and_drop_zeros() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, -1.0), (0, 1, 2.0)]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), 2.0);
    }

    #[test]
    fn solve_spd_identity() {
        let a = SparseMatrix::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let x = solve_spd(&a, &b, 1e-12).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_spd_diagonal() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 4.0)]);
        let x = solve_spd(&a, &[2.0, 4.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_spd_2x2() {
        let a =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let x = solve_spd(&a, &[1.0, 2.0], 1e-14).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn solve_spd_rejects_asymmetric() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]);
        assert!(matches!(solve_spd(&a, &[1.0, 1.0], 1e-10), Err(Error::NotSpd(_))));
    }

    #[test]
    fn solve_spd_rejects_indefinite() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(solve_spd(&a, &[1.0, 1.0], 1e-10).is_err());
    }

    #[test]
    fn solve_general_identity() {
        let a = SparseMatrix::identity(3);
        let x = solve_general(&a, &[3.0, 1.0, 4.0], 1e-12).unwrap();
        assert_eq!(x, vec![3.0, 1.0, 4.0]);
    }

    #[test]
    fn solve_general_permutation() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        let x = solve_general(&a, &[7.0, 9.0], 1e-12).unwrap();
        assert!((x[0] - 9.0).abs() < 1e-12);
        assert!((x[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn solve_general_hand_example() {
        let a =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)]);
        let x = solve_general(&a, &[5.0, 11.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn solve_general_singular() {
        let a =
            SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 4.0)]);
        assert!(matches!(solve_general(&a, &[1.0, 2.0], 1e-10), Err(Error::Singular { .. })));
    }

    #[test]
    fn min_norm_canonical_rows() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let x = least_squares_min_norm(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
        assert!((x[1] - 4.0).abs() < 1e-12);
        assert!(x[2].abs() < 1e-12);
    }

    #[test]
    fn min_norm_on_a_line() {
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0]]);
        let x = least_squares_min_norm(&a, &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_zero_rhs() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[0.0, 1.0, -1.0]]);
        let x = least_squares_min_norm(&a, &[0.0, 0.0]).unwrap();
        assert!(norm2(&x) < 1e-14);
    }

    #[test]
    fn min_norm_rank_deficient() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0]]);
        match min_norm_with_nullspace(&a, &[1.0, 2.0]) {
            Err(Error::RankDeficient { rank, expected }) => {
                assert_eq!(rank, 1);
                assert_eq!(expected, 2);
            }
            other => panic!("expected rank-deficiency error, got {:?}", other.map(|s| s.x)),
        }
    }

    #[test]
    fn min_norm_nullspace_dimension() {
        let a = DenseMatrix::from_rows(&[
            &[1.0, 0.5, 0.0, -1.0, 2.0],
            &[0.0, 1.0, 1.0, 0.0, 0.5],
            &[0.5, 0.0, -1.0, 1.0, 0.0],
        ]);
        let sol = min_norm_with_nullspace(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(sol.rank, 3);
        assert_eq!(sol.null_basis.len(), 2);
        for z in &sol.null_basis {
            let az = a.matvec(z);
            assert!(norm2(&az) < 1e-12);
            assert!(dot(z, &sol.x).abs() < 1e-12 * norm2(z) * norm2(&sol.x).max(1.0));
        }
    }

    proptest! {
        // Random SPD systems built as G'G + I must be solved to tolerance.
        #[test]
        fn prop_spd_residual(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let g: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut trips = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let mut v = if i == j { 1.0 } else { 0.0 };
                    for k in 0..n {
                        v += g[k * n + i] * g[k * n + j];
                    }
                    trips.push((i, j, v));
                }
            }
            let a = SparseMatrix::from_triplets(n, n, &trips);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tol = 1e-10;
            let x = solve_spd(&a, &b, tol).unwrap();
            let ax = spmv(&a, &x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
            prop_assert!(norm2(&r) <= tol * norm2(&b) * (1.0 + 1e-6));

            let xg = solve_general(&a, &b, tol).unwrap();
            let axg = spmv(&a, &xg);
            let rg: Vec<f64> = b.iter().zip(&axg).map(|(bi, axi)| bi - axi).collect();
            prop_assert!(norm2(&rg) <= tol * norm2(&b));
        }

        // Min-norm solutions satisfy the constraints and have no null-space component.
        #[test]
        fn prop_min_norm_invariants(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let (m, n) = (3, 5);
            let mut a = DenseMatrix::zeros(m, n);
            for r in 0..m {
                for c in 0..n {
                    a.set(r, c, rng.gen_range(-1.0..1.0));
                }
            }
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sol = match min_norm_with_nullspace(&a, &b) {
                Ok(s) => s,
                Err(Error::RankDeficient { .. }) => return Ok(()), // unlucky draw
                Err(e) => panic!("{e}"),
            };
            let ax = a.matvec(&sol.x);
            let res: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
            let scale = a.frobenius_norm() * norm2(&sol.x) + norm2(&b);
            prop_assert!(norm2(&res) <= 1e-10 * scale);
            for z in &sol.null_basis {
                prop_assert!(dot(z, &sol.x).abs() <= 1e-10 * norm2(z) * norm2(&sol.x).max(1.0));
            }
        }
    }
}
