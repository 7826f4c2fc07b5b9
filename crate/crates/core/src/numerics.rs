//! Small dense real-matrix kernels.
//!
//! Everything here works on tiny matrices (tens of rows at most), so the
//! storage is a plain row-major `Vec<f64>` and operations return fresh values.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use rand::RngCore;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, Tolerance};

/// The generator behind every seeded random choice in this crate.
///
/// xoshiro256++ seeded through SplitMix64 (`seed_from_u64`), which makes
/// sampled tables and random unitary choices reproducible across platforms.
pub type FrameRng = rand_xoshiro::Xoshiro256PlusPlus;

pub fn seeded_rng(seed: u64) -> FrameRng {
    FrameRng::seed_from_u64(seed)
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "row-major data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix",
                index,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows given as slices. Panics on ragged input;
    /// meant for literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix literal");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose `j`th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    context: "matrix column",
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite {
                        context: "matrix column",
                        index: j * rows + i,
                    });
                }
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Largest absolute entrywise difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖AᵀA − I‖_max`, zero for an orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = matmul_unchecked(&self.transpose(), self);
        g.max_abs_diff(&Matrix::identity(self.cols))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            context: "matrix product",
            expected: a.cols,
            found: b.rows,
        });
    }
    Ok(matmul_unchecked(a, b))
}

pub(crate) fn matmul_unchecked(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..b.cols {
                c[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    c
}

/// Permutation `π` on `{0, …, size−1}` stored as its image table.
///
/// The associated matrix `Π` satisfies `Π e_m = e_{π(m)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMatrix {
    image: Vec<usize>,
}

impl PermutationMatrix {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let size = image.len();
        let mut seen = vec![false; size];
        for &p in &image {
            if p >= size {
                return Err(Error::IndexOutOfRange { index: p, size });
            }
            if seen[p] {
                return Err(Error::DimensionMismatch {
                    context: "permutation image (repeated entry)",
                    expected: size,
                    found: size - 1,
                });
            }
            seen[p] = true;
        }
        Ok(PermutationMatrix { image })
    }

    pub fn identity(size: usize) -> Self {
        PermutationMatrix {
            image: (0..size).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `π(m)`.
    pub fn apply(&self, m: usize) -> usize {
        self.image[m]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (m, &p) in self.image.iter().enumerate() {
            inv[p] = m;
        }
        PermutationMatrix { image: inv }
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.image.len();
        let mut p = Matrix::zeros(n, n);
        for (m, &pm) in self.image.iter().enumerate() {
            p[(pm, m)] = 1.0;
        }
        p
    }
}

/// Eigen-decomposition of a symmetric matrix; values sorted nonincreasing,
/// `vectors` column `k` belongs to `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub const JACOBI_MAX_SWEEPS: usize = 50;
const JACOBI_OFF_DIAGONAL_THRESHOLD: f64 = 1e-14;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// `tol` only gates the symmetry precondition (hybrid per entry). Iteration
/// stops once the off-diagonal Frobenius mass drops below
/// `1e-14·‖s‖_F`, or fails after [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn sym_eigen(s: &Matrix, tol: Tolerance) -> Result<SymEigen> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            context: "sym_eigen (square matrix)",
            expected: s.rows,
            found: s.cols,
        });
    }
    let n = s.rows;
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (s[(i, j)], s[(j, i)]);
            if !tol.eq(a, b) {
                asymmetry = asymmetry.max((a - b).abs());
            }
        }
    }
    if asymmetry > 0.0 {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL_THRESHOLD * a.frobenius_norm();

    let off = |a: &Matrix| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        libm::sqrt(acc)
    };

    let mut converged = off(&a) <= threshold;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::hypot(1.0, tau))
                } else {
                    -1.0 / (-tau + libm::hypot(1.0, tau))
                };
                let c = 1.0 / libm::hypot(1.0, t);
                let sn = t * c;
                // A <- Jᵀ A J, with J the (p, q) plane rotation.
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        sweep += 1;
        converged = off(&a) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: sweep });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, k)] = v[(r, i)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Random orthogonal matrix: Gram-Schmidt orthonormalisation of a matrix of
/// independent standard Gaussians, with the triangular factor's diagonal kept
/// positive (the Haar-distributed convention).
pub fn random_orthogonal<R: RngCore + ?Sized>(size: usize, rng: &mut R) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..size)
        .map(|_| {
            (0..size)
                .map(|_| StandardNormal.sample(&mut *rng))
                .collect()
        })
        .collect();
    for j in 0..size {
        // Two passes of modified Gram-Schmidt keep QᵀQ at rounding level.
        for _ in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qi = &done[i];
                let col = &mut rest[0];
                let r: f64 = qi.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                for (c, q) in col.iter_mut().zip(qi) {
                    *c -= r * q;
                }
            }
        }
        let norm = libm::sqrt(cols[j].iter().map(|x| x * x).sum());
        for c in cols[j].iter_mut() {
            *c /= norm;
        }
    }
    let mut q = Matrix::zeros(size, size);
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            q[(i, j)] = x;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_times_matrix() {
        let a = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 10.0]]);
        assert_eq!(matmul(&Matrix::identity(3), &a).unwrap(), a);
    }

    #[test]
    fn rotation_squared_is_minus_identity() {
        let r = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let r2 = matmul(&r, &r).unwrap();
        assert_eq!(r2, Matrix::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]));
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(
            matmul(&a, &a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permutation_transpose_places_entries_on_index_set() {
        // I = {2, 3} in M = 3 (one-based): π(2)=1, π(3)=2, π(1)=3.
        let p = PermutationMatrix::new(vec![2, 0, 1]).unwrap();
        let s6 = libm::sqrt(6.0);
        let v = Matrix::from_columns(3, &[vec![1.0 / s6, libm::sqrt(5.0) / s6, 0.0]]).unwrap();
        let out = matmul(&p.to_matrix().transpose(), &v).unwrap();
        let expect = [0.0, 1.0 / s6, libm::sqrt(5.0) / s6];
        for (i, e) in expect.iter().enumerate() {
            assert!((out[(i, 0)] - e).abs() < 1e-15);
        }
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(PermutationMatrix::new(vec![0, 0, 1]).is_err());
        assert!(PermutationMatrix::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn eigen_of_diagonal() {
        let d = Matrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let e = sym_eigen(&d, Tolerance::DEFAULT).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        let expect = Matrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(e.vectors, expect);
    }

    #[test]
    fn eigen_of_rank_one() {
        let v = [0.3, -1.2, 0.5, 2.0];
        let mu: f64 = v.iter().map(|x| x * x).sum();
        let mut s = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                s[(i, j)] = v[i] * v[j];
            }
        }
        let e = sym_eigen(&s, Tolerance::DEFAULT).unwrap();
        assert!((e.values[0] - mu).abs() < 1e-12);
        for &x in &e.values[1..] {
            assert!(x.abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        let s = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            sym_eigen(&s, Tolerance::DEFAULT),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn random_orthogonal_size_one_is_sign() {
        for seed in 0..8 {
            let q = random_orthogonal(1, &mut seeded_rng(seed));
            assert_eq!(q[(0, 0)].abs(), 1.0);
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal_and_deterministic() {
        let q = random_orthogonal(3, &mut seeded_rng(7));
        assert!(q.orthogonality_defect() < 1e-12);
        let qqt = matmul(&q, &q.transpose()).unwrap();
        assert!(qqt.max_abs_diff(&Matrix::identity(3)) < 1e-12);
        assert_eq!(q, random_orthogonal(3, &mut seeded_rng(7)));
        assert_ne!(q, random_orthogonal(3, &mut seeded_rng(8)));
    }
}
