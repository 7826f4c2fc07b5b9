//! Spectra, lengths, eigenstep tables and the predicates relating them:
//! majorization, interlacing and the four eigenstep conditions.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, Tolerance};

/// Nonincreasing, nonnegative real sequence.
///
/// Construction accepts decreases and negatives within tolerance; negatives
/// in `[-tol, 0)` are clamped to exactly `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>, tol: Tolerance) -> Result<Self> {
        Ok(Spectrum(check_nonnegative(values, tol, true)?))
    }

    /// Constant spectrum, e.g. the tight-frame target `N/M` repeated `M` times.
    pub fn constant(value: f64, len: usize) -> Self {
        Spectrum(vec![value.max(0.0); len])
    }

    pub fn zeros(len: usize) -> Self {
        Spectrum(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl AsRef<[f64]> for Spectrum {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Nonnegative squared lengths `μ_1, …, μ_N` of the frame vectors, in frame
/// order.
///
/// The order is not required to be nonincreasing: the eigenstep conditions
/// and the construction only use partial sums in frame order, and the
/// majorization test sorts internally.
#[derive(Debug, Clone, PartialEq)]
pub struct Lengths(Vec<f64>);

impl Lengths {
    pub fn new(values: Vec<f64>, tol: Tolerance) -> Result<Self> {
        Ok(Lengths(check_nonnegative(values, tol, false)?))
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Lengths(vec![value.max(0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `μ_1 + … + μ_n` for `n = 0, …, N`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for &x in &self.0 {
            acc += x;
            out.push(acc);
        }
        out
    }
}

impl AsRef<[f64]> for Lengths {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_nonnegative(mut values: Vec<f64>, tol: Tolerance, monotone: bool) -> Result<Vec<f64>> {
    for (index, x) in values.iter_mut().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: "sequence",
                index,
            });
        }
        if *x < 0.0 {
            if tol.is_zero(*x) {
                *x = 0.0;
            } else {
                return Err(Error::Negative { index, value: *x });
            }
        }
    }
    if monotone {
        for m in 1..values.len() {
            if !tol.le(values[m], values[m - 1]) {
                return Err(Error::NotNonincreasing { index: m });
            }
        }
    }
    Ok(values)
}

/// `(N+1) × M` table of spectra; `column(n)` holds `λ_{n;1} ≥ … ≥ λ_{n;M}`.
///
/// Entries are stored raw so that malformed tables can be reported by
/// [`validate_eigensteps`] instead of being rejected on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenstepTable {
    columns: Vec<Vec<f64>>,
}

impl EigenstepTable {
    /// `columns[n]` is the spectrum after `n` frame vectors, `n = 0..=N`.
    pub fn new(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::DimensionMismatch {
                context: "eigenstep table (at least two columns)",
                expected: 2,
                found: columns.len(),
            });
        }
        let m = columns[0].len();
        if m == 0 {
            return Err(Error::DimensionMismatch {
                context: "eigenstep table rows",
                expected: 1,
                found: 0,
            });
        }
        for (n, c) in columns.iter().enumerate() {
            if c.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "eigenstep table column",
                    expected: m,
                    found: c.len(),
                });
            }
            if let Some(i) = c.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    context: "eigenstep table",
                    index: n * m + i,
                });
            }
        }
        Ok(EigenstepTable { columns })
    }

    /// Dimension of the space (`M`).
    pub fn dim(&self) -> usize {
        self.columns[0].len()
    }

    /// Number of frame vectors (`N`).
    pub fn frame_len(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.columns[n]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Zero-based `m`.
    pub fn entry(&self, n: usize, m: usize) -> f64 {
        self.columns[n][m]
    }

    pub fn final_column(&self) -> &[f64] {
        &self.columns[self.columns.len() - 1]
    }

    /// Length increments `trace(column n) − trace(column n−1)`, `n = 1..=N`.
    pub fn trace_increments(&self) -> Vec<f64> {
        self.columns
            .windows(2)
            .map(|w| w[1].iter().sum::<f64>() - w[0].iter().sum::<f64>())
            .collect()
    }

    /// Largest entrywise difference to another table of the same shape.
    pub fn max_abs_diff(&self, other: &EigenstepTable) -> f64 {
        if self.dim() != other.dim() || self.frame_len() != other.frame_len() {
            return f64::INFINITY;
        }
        self.columns
            .iter()
            .flatten()
            .zip(other.columns.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Initial,
    Final,
    Interlacing,
    Trace,
    Monotonicity,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Initial => "initial",
            ViolationKind::Final => "final",
            ViolationKind::Interlacing => "interlacing",
            ViolationKind::Trace => "trace",
            ViolationKind::Monotonicity => "monotonicity",
        }
    }
}

/// One failed condition. `n` is the column index (`0..=N`); `m` is one-based,
/// `None` for column-level conditions (trace).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub n: usize,
    pub m: Option<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_kind(&self, kind: ViolationKind) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.kind == kind)
    }
}

fn sorted_desc(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `lhs ⪰ rhs`: every partial sum of the nonincreasing rearrangement of `lhs`
/// dominates that of `rhs`, and the totals agree.
pub fn majorizes(lhs: &[f64], rhs: &[f64], tol: Tolerance) -> Result<bool> {
    if lhs.len() != rhs.len() {
        return Err(Error::DimensionMismatch {
            context: "majorization",
            expected: lhs.len(),
            found: rhs.len(),
        });
    }
    let (a, b) = (sorted_desc(lhs), sorted_desc(rhs));
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        if !tol.le(sb, sa) {
            return Ok(false);
        }
    }
    Ok(tol.eq(sa, sb))
}

/// Existence test for a frame with spectrum `lambda` and lengths `mu`.
///
/// For `M ≤ N` the spectrum is zero-padded to length `N`; for `M > N` the
/// trailing `M − N` eigenvalues must vanish and the length-`N` prefix is
/// compared.
pub fn frame_exists(lambda: &Spectrum, mu: &Lengths, tol: Tolerance) -> bool {
    let (m, n) = (lambda.len(), mu.len());
    let lhs: Vec<f64> = if m <= n {
        let mut v = lambda.as_slice().to_vec();
        v.resize(n, 0.0);
        v
    } else {
        if !lambda.as_slice()[n..].iter().all(|&x| tol.is_zero(x)) {
            return false;
        }
        lambda.as_slice()[..n].to_vec()
    };
    majorizes(&lhs, mu.as_slice(), tol).unwrap_or(false)
}

/// `beta ⊑ gamma`: `β_M ≤ γ_M ≤ β_{M−1} ≤ … ≤ β_1 ≤ γ_1`.
///
/// For nonnegative sequences this is the same as `γ_{m+1} ≤ β_m ≤ γ_m` with
/// `γ_{M+1} = 0`.
pub fn interlaces(beta: &[f64], gamma: &[f64], tol: Tolerance) -> Result<bool> {
    if beta.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            context: "interlacing",
            expected: beta.len(),
            found: gamma.len(),
        });
    }
    Ok(interlacing_gaps(beta, gamma, tol).next().is_none())
}

/// Failed interlacing inequalities as `(zero-based m of the offending entry
/// of gamma, magnitude)`.
fn interlacing_gaps<'a>(
    beta: &'a [f64],
    gamma: &'a [f64],
    tol: Tolerance,
) -> impl Iterator<Item = (usize, f64)> + 'a {
    (0..beta.len()).flat_map(move |m| {
        let upper = (!tol.le(beta[m], gamma[m])).then(|| (m, beta[m] - gamma[m]));
        let lower = (m + 1 < beta.len() && !tol.le(gamma[m + 1], beta[m]))
            .then(|| (m + 1, gamma[m + 1] - beta[m]));
        upper.into_iter().chain(lower)
    })
}

/// Checks the four eigenstep conditions and reports every violation.
///
/// Only a shape mismatch between `table`, `lambda` and `mu` is an error.
pub fn validate_eigensteps(
    table: &EigenstepTable,
    lambda: &Spectrum,
    mu: &Lengths,
    tol: Tolerance,
) -> Result<ValidationReport> {
    let (m_dim, n_len) = (table.dim(), table.frame_len());
    if lambda.len() != m_dim {
        return Err(Error::DimensionMismatch {
            context: "spectrum length vs table rows",
            expected: m_dim,
            found: lambda.len(),
        });
    }
    if mu.len() != n_len {
        return Err(Error::DimensionMismatch {
            context: "lengths vs table columns",
            expected: n_len,
            found: mu.len(),
        });
    }

    let mut violations = Vec::new();
    let mut push = |kind, n, m: Option<usize>, magnitude: f64| {
        violations.push(Violation {
            kind,
            n,
            m: m.map(|m| m + 1),
            magnitude,
        })
    };

    for (m, &x) in table.column(0).iter().enumerate() {
        if !tol.is_zero(x) {
            push(ViolationKind::Initial, 0, Some(m), x.abs());
        }
    }
    for (m, (&x, &l)) in table.final_column().iter().zip(lambda.as_slice()).enumerate() {
        if !tol.eq(x, l) {
            push(ViolationKind::Final, n_len, Some(m), (x - l).abs());
        }
    }
    for (n, col) in table.columns().iter().enumerate() {
        for m in 1..m_dim {
            if !tol.le(col[m], col[m - 1]) {
                push(ViolationKind::Monotonicity, n, Some(m), col[m] - col[m - 1]);
            }
        }
        let last = col[m_dim - 1];
        if !tol.le(0.0, last) {
            push(ViolationKind::Monotonicity, n, Some(m_dim - 1), -last);
        }
    }
    for n in 1..=n_len {
        for (m, gap) in interlacing_gaps(table.column(n - 1), table.column(n), tol) {
            push(ViolationKind::Interlacing, n, Some(m), gap);
        }
    }
    let sums = mu.partial_sums();
    for n in 1..=n_len {
        let trace: f64 = table.column(n).iter().sum();
        if !tol.eq(trace, sums[n]) {
            push(ViolationKind::Trace, n, None, (trace - sums[n]).abs());
        }
    }
    Ok(ValidationReport { violations })
}

/// Per-entry brackets `lo ≤ λ_{n;m} ≤ hi` valid for every eigenstep table of
/// `(lambda, mu)`.
///
/// Obtained by propagating the interlacing chains (towards the zero column and
/// towards the target column) together with the per-column trace conditions
/// until nothing tightens. The bracket is sound but need not be tight.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryBounds {
    pub lo: Vec<Vec<f64>>,
    pub hi: Vec<Vec<f64>>,
    tol: Tolerance,
}

impl EntryBounds {
    /// Zero-based `m`.
    pub fn bracket(&self, n: usize, m: usize) -> (f64, f64) {
        (self.lo[n][m], self.hi[n][m])
    }

    pub fn is_forced(&self, n: usize, m: usize) -> bool {
        self.tol.eq(self.lo[n][m], self.hi[n][m])
    }

    /// Forced value of an entry, when there is one.
    pub fn forced_value(&self, n: usize, m: usize) -> Option<f64> {
        self.is_forced(n, m).then(|| 0.5 * (self.lo[n][m] + self.hi[n][m]))
    }

    /// Whether some bracket is empty, i.e. no table exists.
    pub fn is_empty(&self) -> bool {
        self.lo
            .iter()
            .flatten()
            .zip(self.hi.iter().flatten())
            .any(|(&l, &h)| !self.tol.le(l, h))
    }

    pub fn contains(&self, table: &EigenstepTable) -> bool {
        table.columns().iter().enumerate().all(|(n, col)| {
            col.iter()
                .enumerate()
                .all(|(m, &x)| self.tol.le(self.lo[n][m], x) && self.tol.le(x, self.hi[n][m]))
        })
    }
}

pub fn entry_bounds(lambda: &Spectrum, mu: &Lengths, tol: Tolerance) -> EntryBounds {
    let mut fixed = vec![false; mu.len() + 1];
    fixed[0] = true;
    fixed[mu.len()] = true;
    let mut columns = vec![vec![0.0; lambda.len()]; mu.len() + 1];
    columns[mu.len()] = lambda.as_slice().to_vec();
    let (lo, hi, _) = propagate_bounds(&columns, &fixed, &mu.partial_sums(), tol);
    EntryBounds { lo, hi, tol }
}

const PROPAGATION_SWEEPS: usize = 256;

/// Interval propagation over the eigenstep constraints.
///
/// Columns flagged in `fixed` are taken from `columns`; all others start as
/// `[0, ∞)`. Returns `(lo, hi, consistent)`; `consistent` is false as soon as
/// some bracket (including that of a fixed entry) became empty.
pub(crate) fn propagate_bounds(
    columns: &[Vec<f64>],
    fixed: &[bool],
    sums: &[f64],
    tol: Tolerance,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, bool) {
    let cols = columns.len();
    let m_dim = columns[0].len();
    let mut lo = vec![vec![0.0; m_dim]; cols];
    let mut hi = vec![vec![f64::INFINITY; m_dim]; cols];
    for n in 0..cols {
        if fixed[n] {
            lo[n].clone_from(&columns[n]);
            hi[n].clone_from(&columns[n]);
        }
    }

    let mut consistent = true;
    for _ in 0..PROPAGATION_SWEEPS {
        let mut changed = false;
        for n in 0..cols {
            for m in 0..m_dim {
                let mut new_lo = lo[n][m].max(0.0);
                let mut new_hi = hi[n][m];
                if n > 0 {
                    // column n−1 ⊑ column n
                    new_lo = new_lo.max(lo[n - 1][m]);
                    if m > 0 {
                        new_hi = new_hi.min(hi[n - 1][m - 1]);
                    }
                }
                if n + 1 < cols {
                    // column n ⊑ column n+1
                    new_hi = new_hi.min(hi[n + 1][m]);
                    if m + 1 < m_dim {
                        new_lo = new_lo.max(lo[n + 1][m + 1]);
                    }
                }
                if m + 1 < m_dim {
                    new_lo = new_lo.max(lo[n][m + 1]);
                }
                if m > 0 {
                    new_hi = new_hi.min(hi[n][m - 1]);
                }
                if n > 0 {
                    let others_hi: f64 = (0..m_dim).filter(|&j| j != m).map(|j| hi[n][j]).sum();
                    let others_lo: f64 = (0..m_dim).filter(|&j| j != m).map(|j| lo[n][j]).sum();
                    new_lo = new_lo.max(sums[n] - others_hi);
                    new_hi = new_hi.min(sums[n] - others_lo);
                }

                if !tol.le(new_lo, hi[n][m]) || !tol.le(lo[n][m], new_hi) || !tol.le(new_lo, new_hi)
                {
                    consistent = false;
                }
                if fixed[n] {
                    continue;
                }
                if new_lo > new_hi {
                    let mid = 0.5 * (new_lo + new_hi);
                    new_lo = mid;
                    new_hi = mid;
                }
                if new_lo > lo[n][m] + 1e-15 * lo[n][m].abs().max(1.0) {
                    changed = true;
                }
                if new_hi < hi[n][m] - 1e-15 * new_hi.abs().max(1.0) {
                    changed = true;
                }
                lo[n][m] = new_lo;
                hi[n][m] = new_hi;
            }
        }
        if !consistent || !changed {
            break;
        }
    }
    (lo, hi, consistent)
}
