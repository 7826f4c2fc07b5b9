//! Turning an eigenstep table into frame vectors.
//!
//! Starting from an orthonormal basis `U_1` and `f_1 = √μ_1 u_{1;1}`, each
//! step `n → n+1` cancels the values shared by columns `n` and `n+1`, builds
//! closed-form vectors `v_n`, `w_n` on the surviving indices, and from them
//! the new frame vector `f_{n+1} = U_n V_n Π_Iᵀ [v_n; 0]` and the next
//! eigenbasis `U_{n+1} = U_n V_n Π_Iᵀ diag(W_n, I) Π_J`.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::numerics::{
    matmul_unchecked, random_orthogonal, seeded_rng, Matrix, PermutationMatrix,
};
use crate::spectra::{interlaces, validate_eigensteps, EigenstepTable, Lengths, Spectrum};
use crate::{Error, Result, Tolerance};

/// Orthonormality tolerance for [`EigenBasis`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// `M × N` synthesis matrix, stored as its `N` columns (the frame vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    dim: usize,
    columns: Vec<Vec<f64>>,
}

impl FrameMatrix {
    pub fn new(dim: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "frame (at least one vector)",
                expected: 1,
                found: 0,
            });
        }
        for (n, c) in columns.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "frame vector",
                    expected: dim,
                    found: c.len(),
                });
            }
            if let Some(i) = c.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    context: "frame",
                    index: n * dim + i,
                });
            }
        }
        Ok(FrameMatrix { dim, columns })
    }

    pub fn from_matrix(f: &Matrix) -> Result<Self> {
        Self::new(f.rows(), f.columns())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.columns[n]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_columns(self.dim, &self.columns).expect("frame columns are well formed")
    }

    /// First `n` vectors as a frame of their own.
    pub fn prefix(&self, n: usize) -> FrameMatrix {
        FrameMatrix {
            dim: self.dim,
            columns: self.columns[..n].to_vec(),
        }
    }

    /// `F F*`.
    pub fn frame_operator(&self) -> Matrix {
        let m = self.dim;
        let mut s = Matrix::zeros(m, m);
        for f in &self.columns {
            for i in 0..m {
                for j in 0..m {
                    s[(i, j)] += f[i] * f[j];
                }
            }
        }
        s
    }

    pub fn squared_norms(&self) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &FrameMatrix) -> f64 {
        self.to_matrix().max_abs_diff(&other.to_matrix())
    }
}

/// `M × M` orthogonal matrix whose columns are eigenvectors of a partial frame
/// operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis(Matrix);

impl EigenBasis {
    /// Wraps `u` after checking `UᵀU = I` within [`ORTHONORMAL_TOL`].
    pub fn new(u: Matrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                context: "eigenbasis (square)",
                expected: u.rows(),
                found: u.cols(),
            });
        }
        let defect = u.orthogonality_defect();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(EigenBasis(u))
    }

    pub fn identity(dim: usize) -> Self {
        EigenBasis(Matrix::identity(dim))
    }

    pub fn random<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Self {
        EigenBasis(random_orthogonal(dim, rng))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        self.0.column(m)
    }

    /// `‖P f‖²` for `P` the projection onto the span of the given columns.
    pub fn projected_norm_sq(&self, f: &[f64], columns: &[usize]) -> f64 {
        columns
            .iter()
            .map(|&m| {
                let c: f64 = (0..self.dim()).map(|i| self.0[(i, m)] * f[i]).sum();
                c * c
            })
            .sum()
    }

    /// `‖P_λ f‖²` where the eigenspace of `λ` is spanned by the columns whose
    /// entry in `spectrum` equals `lambda` within `tol`.
    pub fn eigenspace_norm_sq(&self, f: &[f64], spectrum: &[f64], lambda: f64, tol: Tolerance) -> f64 {
        let cols: Vec<usize> = (0..spectrum.len())
            .filter(|&m| tol.eq(spectrum[m], lambda))
            .collect();
        self.projected_norm_sq(f, &cols)
    }
}

/// How the free orthogonal matrices `U_1` and `V_n` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitaryChoice {
    #[default]
    Identity,
    /// Independent Haar-like orthogonal blocks drawn from the step RNG.
    Random,
}

/// Everything computed for one step `n → n+1`.
///
/// Index sets and permutations are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct StepContext {
    pub n: usize,
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub pi_i: PermutationMatrix,
    pub pi_j: PermutationMatrix,
    /// Surviving old eigenvalues, strictly decreasing.
    pub beta: Vec<f64>,
    /// Surviving new eigenvalues, strictly decreasing.
    pub gamma: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub w_matrix: Matrix,
    /// Sizes of the runs of equal values in column `n`.
    pub blocks: Vec<usize>,
}

impl StepContext {
    pub fn new(n: usize, prev: &[f64], next: &[f64], tol: Tolerance) -> Result<Self> {
        let (i_set, j_set) = index_sets(prev, next, tol)?;
        let m = prev.len();
        let pi_i = permutation_for(&i_set, m)?;
        let pi_j = permutation_for(&j_set, m)?;
        let beta: Vec<f64> = i_set.iter().map(|&k| prev[k]).collect();
        let gamma: Vec<f64> = j_set.iter().map(|&k| next[k]).collect();
        let (v, w) = step_vectors(&beta, &gamma, tol)?;
        let w_matrix = w_matrix(&beta, &gamma, &v, &w);
        Ok(StepContext {
            n,
            i_set,
            j_set,
            pi_i,
            pi_j,
            beta,
            gamma,
            v,
            w,
            w_matrix,
            blocks: multiplicity_blocks(prev, tol),
        })
    }

    /// `R_n = |I_n| = |J_n|`.
    pub fn rank(&self) -> usize {
        self.i_set.len()
    }
}

/// Cancels the values common to `prev` and `next`, scanning from the last
/// index to the first; each `prev[m]` removes the largest remaining index of
/// `next` holding the same value. Returns the surviving indices `(I, J)` in
/// increasing order.
pub fn index_sets(prev: &[f64], next: &[f64], tol: Tolerance) -> Result<(Vec<usize>, Vec<usize>)> {
    if !interlaces(prev, next, tol)? {
        return Err(Error::NotInterlacing);
    }
    let m_dim = prev.len();
    let mut in_i = vec![true; m_dim];
    let mut in_j = vec![true; m_dim];
    for m in (0..m_dim).rev() {
        let hit = (0..m_dim)
            .rev()
            .find(|&k| in_j[k] && tol.eq(next[k], prev[m]));
        if let Some(k) = hit {
            in_i[m] = false;
            in_j[k] = false;
        }
    }
    let collect = |mask: &[bool]| (0..m_dim).filter(|&k| mask[k]).collect::<Vec<_>>();
    Ok((collect(&in_i), collect(&in_j)))
}

/// The permutation that is increasing on `indexset` and on its complement and
/// sends `indexset` onto `{0, …, R−1}`.
pub fn permutation_for(indexset: &[usize], size: usize) -> Result<PermutationMatrix> {
    let mut member = vec![false; size];
    for (k, &i) in indexset.iter().enumerate() {
        if i >= size {
            return Err(Error::IndexOutOfRange { index: i, size });
        }
        if k > 0 && indexset[k - 1] >= i {
            return Err(Error::UnsortedIndexSet);
        }
        member[i] = true;
    }
    let mut image = vec![0; size];
    let mut next_in = 0;
    let mut next_out = indexset.len();
    for m in 0..size {
        if member[m] {
            image[m] = next_in;
            next_in += 1;
        } else {
            image[m] = next_out;
            next_out += 1;
        }
    }
    PermutationMatrix::new(image)
}

/// Closed-form update vectors on the reduced spectra:
///
/// ```text
/// v(r)²  = −∏_s (β_r − γ_s) / ∏_{s≠r} (β_r − β_s)
/// w(r')² =  ∏_s (γ_r' − β_s) / ∏_{s≠r'} (γ_r' − γ_s)
/// ```
///
/// Radicands in `[−tol, 0)` are clamped to zero.
pub fn step_vectors(beta: &[f64], gamma: &[f64], tol: Tolerance) -> Result<(Vec<f64>, Vec<f64>)> {
    if beta.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            context: "step vectors",
            expected: beta.len(),
            found: gamma.len(),
        });
    }
    let r = beta.len();
    for i in 0..r {
        for j in 0..r {
            if (j != i && (tol.eq(beta[i], beta[j]) || tol.eq(gamma[i], gamma[j])))
                || tol.eq(beta[i], gamma[j])
            {
                return Err(Error::DuplicateValue { index: i });
            }
        }
    }

    let root = |index: usize, radicand: f64| -> Result<f64> {
        if radicand >= 0.0 {
            Ok(libm::sqrt(radicand))
        } else if radicand >= -tol.value() {
            Ok(0.0)
        } else {
            Err(Error::NegativeRadicand {
                index,
                value: radicand,
            })
        }
    };

    let mut v = Vec::with_capacity(r);
    let mut w = Vec::with_capacity(r);
    for k in 0..r {
        let mut num = 1.0;
        let mut den = 1.0;
        for s in 0..r {
            num *= beta[k] - gamma[s];
            if s != k {
                den *= beta[k] - beta[s];
            }
        }
        v.push(root(k, -num / den)?);

        let mut num = 1.0;
        let mut den = 1.0;
        for s in 0..r {
            num *= gamma[k] - beta[s];
            if s != k {
                den *= gamma[k] - gamma[s];
            }
        }
        w.push(root(k, num / den)?);
    }
    Ok((v, w))
}

/// `W(r, r') = v(r) w(r') / (γ_r' − β_r)`.
pub fn w_matrix(beta: &[f64], gamma: &[f64], v: &[f64], w: &[f64]) -> Matrix {
    let r = beta.len();
    let mut out = Matrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            out[(i, j)] = v[i] * w[j] / (gamma[j] - beta[i]);
        }
    }
    out
}

/// Lengths of the runs of equal values (within `tol`) in a sorted spectrum.
pub fn multiplicity_blocks(values: &[f64], tol: Tolerance) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for m in 1..=values.len() {
        if m == values.len() || !tol.eq(values[m], values[start]) {
            blocks.push(m - start);
            start = m;
        }
    }
    blocks
}

/// Block-diagonal orthogonal matrix with the given block sizes.
pub fn block_diagonal_unitary<R: RngCore + ?Sized>(
    blocks: &[usize],
    choice: UnitaryChoice,
    rng: &mut R,
) -> Matrix {
    let size: usize = blocks.iter().sum();
    match choice {
        UnitaryChoice::Identity => Matrix::identity(size),
        UnitaryChoice::Random => {
            let mut v = Matrix::zeros(size, size);
            let mut offset = 0;
            for &b in blocks {
                let q = random_orthogonal(b, rng);
                for i in 0..b {
                    for j in 0..b {
                        v[(offset + i, offset + j)] = q[(i, j)];
                    }
                }
                offset += b;
            }
            v
        }
    }
}

/// Result of one step: the new frame vector, the next eigenbasis and the
/// intermediate quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub f: Vec<f64>,
    pub basis: EigenBasis,
    pub v_block: Matrix,
    pub context: StepContext,
}

/// One step `n → n+1` from eigenbasis `u` of a partial frame operator with
/// spectrum `prev` to a frame vector that moves the spectrum to `next`.
pub fn advance<R: RngCore + ?Sized>(
    n: usize,
    u: &EigenBasis,
    prev: &[f64],
    next: &[f64],
    choice: UnitaryChoice,
    rng: &mut R,
    tol: Tolerance,
) -> Result<Step> {
    let m_dim = u.dim();
    if prev.len() != m_dim || next.len() != m_dim {
        return Err(Error::DimensionMismatch {
            context: "step spectra vs basis",
            expected: m_dim,
            found: prev.len().max(next.len()),
        });
    }
    let ctx = StepContext::new(n, prev, next, tol)?;
    let r = ctx.rank();
    if r == 0 {
        let increment = next.iter().sum::<f64>() - prev.iter().sum::<f64>();
        if !tol.is_zero(increment) {
            return Err(Error::ZeroRankStep { increment });
        }
    }

    let v_block = block_diagonal_unitary(&ctx.blocks, choice, rng);
    let uv = matmul_unchecked(u.matrix(), &v_block);
    let pi_i_t = ctx.pi_i.to_matrix().transpose();
    let rotated = matmul_unchecked(&uv, &pi_i_t);

    let mut padded = vec![0.0; m_dim];
    padded[..r].copy_from_slice(&ctx.v);
    let f = rotated.mul_vec(&padded)?;

    let mut embedded = Matrix::identity(m_dim);
    for i in 0..r {
        for j in 0..r {
            embedded[(i, j)] = ctx.w_matrix[(i, j)];
        }
    }
    let next_u = matmul_unchecked(
        &matmul_unchecked(&rotated, &embedded),
        &ctx.pi_j.to_matrix(),
    );
    Ok(Step {
        f,
        basis: EigenBasis(next_u),
        v_block,
        context: ctx,
    })
}

/// A constructed frame together with every intermediate eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub frame: FrameMatrix,
    /// `U_1, …, U_N`; `bases[n-1]` diagonalises `F_n F_n*`.
    pub bases: Vec<EigenBasis>,
    /// Steps `1 → 2, …, N−1 → N`.
    pub steps: Vec<StepContext>,
    /// The block-diagonal `V_1, …, V_{N−1}` actually used.
    pub v_blocks: Vec<Matrix>,
}

impl Construction {
    pub fn final_basis(&self) -> &EigenBasis {
        self.bases.last().expect("at least one basis")
    }
}

/// Spectrum and lengths implied by a table: the last column and the trace
/// increments.
pub fn table_targets(table: &EigenstepTable, tol: Tolerance) -> Result<(Spectrum, Lengths)> {
    let invalid = |_| Error::InvalidTable { violations: 1 };
    let lambda = Spectrum::new(table.final_column().to_vec(), tol).map_err(invalid)?;
    let mu = Lengths::new(table.trace_increments(), tol).map_err(invalid)?;
    Ok((lambda, mu))
}

/// Builds a frame from a valid eigenstep table.
///
/// `U_1` is the identity or a random orthogonal matrix; the `V_n` follow
/// `v_choice`. Random draws come from one generator seeded with `seed`,
/// `U_1` first.
pub fn construct_frame(
    table: &EigenstepTable,
    u1: UnitaryChoice,
    v_choice: UnitaryChoice,
    seed: u64,
    tol: Tolerance,
) -> Result<Construction> {
    let mut rng = seeded_rng(seed);
    let basis = match u1 {
        UnitaryChoice::Identity => EigenBasis::identity(table.dim()),
        UnitaryChoice::Random => EigenBasis::random(table.dim(), &mut rng),
    };
    construct_frame_from_basis(table, basis, v_choice, &mut rng, tol)
}

/// [`construct_frame`] with an explicit starting basis `U_1`.
pub fn construct_frame_from_basis<R: RngCore + ?Sized>(
    table: &EigenstepTable,
    u1: EigenBasis,
    v_choice: UnitaryChoice,
    rng: &mut R,
    tol: Tolerance,
) -> Result<Construction> {
    if u1.dim() != table.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial basis vs table rows",
            expected: table.dim(),
            found: u1.dim(),
        });
    }
    let (lambda, mu) = table_targets(table, tol)?;
    let report = validate_eigensteps(table, &lambda, &mu, tol)?;
    if !report.is_valid() {
        return Err(Error::InvalidTable {
            violations: report.violations.len(),
        });
    }

    let n_len = table.frame_len();
    let mu1 = mu.as_slice()[0];
    let mut columns = Vec::with_capacity(n_len);
    columns.push(u1.column(0).into_iter().map(|x| libm::sqrt(mu1) * x).collect());
    let mut bases = vec![u1];
    let mut steps = Vec::with_capacity(n_len.saturating_sub(1));
    let mut v_blocks = Vec::with_capacity(n_len.saturating_sub(1));
    for n in 1..n_len {
        let step = advance(
            n,
            bases.last().expect("nonempty"),
            table.column(n),
            table.column(n + 1),
            v_choice,
            rng,
            tol,
        )?;
        columns.push(step.f);
        bases.push(step.basis);
        steps.push(step.context);
        v_blocks.push(step.v_block);
    }
    Ok(Construction {
        frame: FrameMatrix::new(table.dim(), columns)?,
        bases,
        steps,
        v_blocks,
    })
}
