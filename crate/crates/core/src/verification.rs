//! Independent checks on eigensteps and frames.
//!
//! The residue helpers evaluate `lim_{x→a} (x − a)·q(x)/p(x)` for monic
//! polynomials given by their roots by cancelling the roots equal to `a`
//! rather than evaluating the rational function near its pole.

use alloc::vec;
use alloc::vec::Vec;

use crate::construction::FrameMatrix;
use crate::eigensteps::{untf53_region_contains, Region53Point};
use crate::numerics::sym_eigen;
use crate::spectra::{interlaces, EigenstepTable, Lengths, Spectrum};
use crate::{Error, Result, Tolerance};

/// Value of `lim_{x→a} (x − a)·q(x)/p(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residue {
    Finite(f64),
    /// The pole at `a` has order two or more after cancellation.
    Unbounded,
}

/// `p` has roots `poles`, `q` has roots `zeros`; roots within `tol` of `at`
/// count as equal to it.
pub fn residue(poles: &[f64], zeros: &[f64], at: f64, tol: Tolerance) -> Residue {
    let pole_mult = poles.iter().filter(|&&p| tol.eq(p, at)).count();
    let zero_mult = zeros.iter().filter(|&&z| tol.eq(z, at)).count();
    // (x − a)·q/p vanishes to order 1 + zero_mult − pole_mult at a.
    match (1 + zero_mult).cmp(&pole_mult) {
        core::cmp::Ordering::Greater => Residue::Finite(0.0),
        core::cmp::Ordering::Less => Residue::Unbounded,
        core::cmp::Ordering::Equal => {
            let num: f64 = zeros
                .iter()
                .filter(|&&z| !tol.eq(z, at))
                .map(|&z| at - z)
                .product();
            let den: f64 = poles
                .iter()
                .filter(|&&p| !tol.eq(p, at))
                .map(|&p| at - p)
                .product();
            Residue::Finite(num / den)
        }
    }
}

/// `‖P_{n;λ} f_{n+1}‖²` forced by the spectra alone:
/// `−lim_{x→λ} (x − λ)·p_{n+1}(x)/p_n(x)`, where `p_n`, `p_{n+1}` have roots
/// `prev`, `next`.
pub fn projection_norm_oracle(prev: &[f64], next: &[f64], lam: f64, tol: Tolerance) -> Result<f64> {
    if !prev.iter().any(|&p| tol.eq(p, lam)) {
        return Err(Error::NotAnEigenvalue { value: lam });
    }
    if !interlaces(prev, next, tol)? {
        return Err(Error::NotInterlacing);
    }
    match residue(prev, next, lam, tol) {
        Residue::Finite(r) => Ok((-r).max(0.0)),
        // Interlacing caps multiplicity drops at one.
        Residue::Unbounded => Err(Error::NotInterlacing),
    }
}

/// Distinct values of a sorted spectrum (first representative of each run).
pub fn distinct_values(values: &[f64], tol: Tolerance) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in values {
        if !out.iter().any(|&y| tol.eq(x, y)) {
            out.push(x);
        }
    }
    out
}

/// Both sides of the interlacing/limit equivalence, compared: returns whether
/// `beta ⊑ gamma` holds exactly when every residue at a root of `beta` is
/// finite and nonpositive. Inputs are sorted nonincreasing first.
pub fn limit_lemma_check(beta: &[f64], gamma: &[f64], tol: Tolerance) -> Result<bool> {
    let sort = |s: &[f64]| {
        let mut v = s.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (b, g) = (sort(beta), sort(gamma));
    let interlacing = interlaces(&b, &g, tol)?;
    let limits_nonpositive = b.iter().all(|&a| match residue(&b, &g, a, tol) {
        Residue::Finite(r) => tol.le(r, 0.0),
        Residue::Unbounded => false,
    });
    Ok(interlacing == limits_nonpositive)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub spectrum_ok: bool,
    pub lengths_ok: bool,
    pub max_spectrum_error: f64,
    pub max_length_error: f64,
    pub tight: bool,
    /// Smallest and largest eigenvalue of `F F*`.
    pub frame_bounds: (f64, f64),
    /// `M·Tr[(F F*)²] / (Σ‖f_n‖²)²`, at least one, equal to one exactly for
    /// tight frames.
    pub welch_ratio: f64,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.spectrum_ok && self.lengths_ok
    }
}

/// Frame potential `Tr[(F F*)²]`.
pub fn frame_potential(frame: &FrameMatrix) -> f64 {
    let s = frame.frame_operator();
    s.as_slice().iter().map(|x| x * x).sum()
}

pub fn verify_frame(
    frame: &FrameMatrix,
    lambda: &Spectrum,
    mu: &Lengths,
    tol: Tolerance,
) -> Result<VerificationReport> {
    if lambda.len() != frame.dim() {
        return Err(Error::DimensionMismatch {
            context: "spectrum length vs frame dimension",
            expected: frame.dim(),
            found: lambda.len(),
        });
    }
    if mu.len() != frame.len() {
        return Err(Error::DimensionMismatch {
            context: "lengths vs frame size",
            expected: frame.len(),
            found: mu.len(),
        });
    }
    let s = frame.frame_operator();
    let eig = sym_eigen(&s, tol)?;

    let mut spectrum_ok = true;
    let mut max_spectrum_error: f64 = 0.0;
    for (&got, &want) in eig.values.iter().zip(lambda.as_slice()) {
        max_spectrum_error = max_spectrum_error.max((got - want).abs());
        spectrum_ok &= tol.eq(got, want);
    }
    let mut lengths_ok = true;
    let mut max_length_error: f64 = 0.0;
    let norms = frame.squared_norms();
    for (&got, &want) in norms.iter().zip(mu.as_slice()) {
        max_length_error = max_length_error.max((got - want).abs());
        lengths_ok &= tol.eq(got, want);
    }

    let lower = *eig.values.last().expect("nonempty spectrum");
    let upper = eig.values[0];
    let tight = (upper - lower).abs() <= tol.value() * upper.abs().max(1.0);
    let energy = s.trace();
    let welch_ratio = if energy > 0.0 {
        frame.dim() as f64 * frame_potential(frame) / (energy * energy)
    } else {
        1.0
    };
    Ok(VerificationReport {
        spectrum_ok,
        lengths_ok,
        max_spectrum_error,
        max_length_error,
        tight,
        frame_bounds: (lower, upper),
        welch_ratio,
    })
}

/// Spectra of the partial frame operators `F_n F_n*`, `n = 0..=N`.
///
/// Eigenvalues that come out negative within the default tolerance are
/// clamped to zero.
pub fn eigensteps_of_frame(frame: &FrameMatrix) -> Result<EigenstepTable> {
    let m = frame.dim();
    let tol = Tolerance::DEFAULT;
    let mut columns = vec![vec![0.0; m]];
    let mut s = crate::numerics::Matrix::zeros(m, m);
    for f in frame.columns() {
        for i in 0..m {
            for j in 0..m {
                s[(i, j)] += f[i] * f[j];
            }
        }
        let values = sym_eigen(&s, tol)?
            .values
            .into_iter()
            .map(|x| if x < 0.0 && tol.is_zero(x) { 0.0 } else { x })
            .collect();
        columns.push(values);
    }
    EigenstepTable::new(columns)
}

/// The closed-form 3×5 UNTF obtained from the two-parameter eigensteps with
/// all unitary choices equal to the identity, for `(x, y)` strictly inside the
/// parameter region.
pub fn untf53_closed_form(p: Region53Point, tol: Tolerance) -> Result<FrameMatrix> {
    if !untf53_region_contains(p, tol) {
        return Err(Error::OutsideRegion);
    }
    let Region53Point { x, y } = p;
    let a = 3.0 * y - 1.0;
    let b = 2.0 + 3.0 * x - 3.0 * y;
    let c = 2.0 - x - y;
    let d = 5.0 - 3.0 * y;
    let e = 4.0 - 3.0 * x - 3.0 * y;
    let g = y - x;
    let h = 4.0 - 3.0 * x;
    let k = 2.0 - 3.0 * x;
    let one_y = 1.0 - y;
    let two_y = 2.0 - y;
    if [a, b, e, g, x, k, one_y].iter().any(|&f| tol.le(f, 0.0)) {
        return Err(Error::BoundaryPoint);
    }
    let sq = libm::sqrt;
    let s3 = sq(3.0);

    let f1 = vec![1.0, 0.0, 0.0];
    let f2 = vec![1.0 - y, sq(y * two_y), 0.0];
    let f3 = vec![
        sq(a * b * c) / (6.0 * sq(one_y)) - sq(d * e * g) / (6.0 * sq(one_y)),
        sq(y * a * b * c) / (6.0 * sq(one_y * two_y)) + sq(d * two_y * e * g) / (6.0 * sq(y * one_y)),
        sq(5.0 * x * h) / (3.0 * sq(y * two_y)),
    ];

    // Shared terms of the fourth and fifth vectors.
    let t1 = sq(h * a * c * e) / (12.0 * sq(k * one_y));
    let t2 = sq(h * d * g * b) / (12.0 * sq(k * one_y));
    let t3 = sq(x * a * g * b) / (4.0 * s3 * sq(k * one_y));
    let t4 = sq(x * d * c * e) / (4.0 * s3 * sq(k * one_y));
    let u1 = sq(h * y * a * c * e) / (12.0 * sq(k * one_y * two_y));
    let u2 = sq(h * two_y * d * g * b) / (12.0 * sq(k * y * one_y));
    let u3 = sq(x * y * a * g * b) / (4.0 * s3 * sq(k * one_y * two_y));
    let u4 = sq(x * two_y * d * c * e) / (4.0 * s3 * sq(k * y * one_y));
    let z1 = sq(5.0 * x * b * e) / (6.0 * sq(k * y * two_y));
    let z2 = sq(5.0 * h * g * c) / (2.0 * s3 * sq(k * y * two_y));

    let f4 = vec![-t1 - t2 - t3 + t4, -u1 + u2 - u3 - u4, z1 + z2];
    let f5 = vec![t1 + t2 - t3 + t4, u1 - u2 - u3 - u4, -z1 + z2];
    FrameMatrix::new(3, vec![f1, f2, f3, f4, f5])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_frame, UnitaryChoice};
    use crate::eigensteps::{untf53_lambda, untf53_mu, untf53_table};

    const T: Tolerance = Tolerance::DEFAULT;

    fn reference_f5() -> FrameMatrix {
        let s5 = libm::sqrt(5.0);
        let s6 = libm::sqrt(6.0);
        FrameMatrix::new(
            3,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![2.0 / 3.0, s5 / 3.0, 0.0],
                vec![-1.0 / s6, s5 / s6, 0.0],
                vec![-1.0 / 6.0, s5 / 6.0, s5 / s6],
                vec![1.0 / 6.0, -s5 / 6.0, s5 / s6],
            ],
        )
        .unwrap()
    }

    #[test]
    fn oracle_values_from_the_reference_untf() {
        let prev = [1.0, 0.0, 0.0];
        let next = [5.0 / 3.0, 1.0 / 3.0, 0.0];
        assert!((projection_norm_oracle(&prev, &next, 1.0, T).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!((projection_norm_oracle(&prev, &next, 0.0, T).unwrap() - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_vanishes_for_identical_spectra() {
        let s = [2.0, 1.0, 1.0, 0.0];
        for lam in [2.0, 1.0, 0.0] {
            assert_eq!(projection_norm_oracle(&s, &s, lam, T).unwrap(), 0.0);
        }
    }

    #[test]
    fn oracle_rejects_non_eigenvalue() {
        assert!(matches!(
            projection_norm_oracle(&[1.0, 0.0], &[1.5, 0.0], 0.5, T),
            Err(Error::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn lemma_check_examples() {
        assert!(limit_lemma_check(&[1.0, 0.0, 0.0], &[5.0 / 3.0, 1.0 / 3.0, 0.0], T).unwrap());
        assert!(limit_lemma_check(&[2.0, 1.0], &[1.5, 1.2], T).unwrap());
        assert!(limit_lemma_check(&[3.0, 1.0, 1.0], &[3.0, 1.0, 1.0], T).unwrap());
        // the residue at β₁ = 2 is +0.4, so the limit side fails too
        match residue(&[2.0, 1.0], &[1.5, 1.2], 2.0, T) {
            Residue::Finite(r) => assert!((r - 0.4).abs() < 1e-12),
            Residue::Unbounded => panic!(),
        }
    }

    #[test]
    fn double_pole_is_unbounded() {
        assert_eq!(residue(&[1.0, 1.0], &[2.0, 0.0], 1.0, T), Residue::Unbounded);
    }

    #[test]
    fn reference_frame_verifies_as_untf() {
        let r = verify_frame(&reference_f5(), &untf53_lambda(), &untf53_mu(), T).unwrap();
        assert!(r.spectrum_ok && r.lengths_ok && r.tight);
        assert!((r.welch_ratio - 1.0).abs() < 1e-12);
        assert!((r.frame_bounds.0 - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_frame_verifies() {
        let f = FrameMatrix::new(
            3,
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let r = verify_frame(&f, &Spectrum::constant(1.0, 3), &Lengths::constant(1.0, 3), T)
            .unwrap();
        assert!(r.all_ok() && r.tight);
        assert_eq!(r.frame_bounds, (1.0, 1.0));
    }

    #[test]
    fn wrong_lengths_are_reported() {
        let mu = Lengths::new(vec![1.0, 1.0, 1.0, 1.0, 0.9], T).unwrap();
        let r = verify_frame(&reference_f5(), &untf53_lambda(), &mu, T).unwrap();
        assert!(r.spectrum_ok);
        assert!(!r.lengths_ok);
        assert!((r.max_length_error - 0.1).abs() < 1e-12);
    }

    #[test]
    fn recovered_eigensteps_of_reference_frame() {
        let t = eigensteps_of_frame(&reference_f5()).unwrap();
        let expect = untf53_table(Region53Point::new(0.0, 1.0 / 3.0));
        assert!(t.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn single_vector_eigensteps() {
        let f = FrameMatrix::new(3, vec![vec![0.3, -0.4, 1.2]]).unwrap();
        let t = eigensteps_of_frame(&f).unwrap();
        assert!((t.entry(1, 0) - (0.09 + 0.16 + 1.44)).abs() < 1e-14);
        assert!(t.entry(1, 1).abs() < 1e-14 && t.entry(1, 2).abs() < 1e-14);
    }

    #[test]
    fn closed_form_agrees_with_construction_inside() {
        let p = Region53Point::new(0.2, 0.5);
        let closed = untf53_closed_form(p, T).unwrap();
        let built = construct_frame(
            &untf53_table(p),
            UnitaryChoice::Identity,
            UnitaryChoice::Identity,
            0,
            T,
        )
        .unwrap()
        .frame;
        assert!(closed.max_abs_diff(&built) < 1e-10, "{:?}\n{:?}", closed, built);
    }

    #[test]
    fn closed_form_first_two_vectors() {
        let p = Region53Point::new(0.25, 0.6);
        let f = untf53_closed_form(p, T).unwrap();
        assert_eq!(f.column(0), &[1.0, 0.0, 0.0]);
        assert_eq!(f.column(1), &[1.0 - 0.6, libm::sqrt(0.6 * 1.4), 0.0]);
    }

    #[test]
    fn closed_form_rejects_boundary_and_outside() {
        assert_eq!(
            untf53_closed_form(Region53Point::new(0.0, 0.5), T),
            Err(Error::BoundaryPoint)
        );
        assert_eq!(
            untf53_closed_form(Region53Point::new(1.0 / 3.0, 1.0 / 3.0), T),
            Err(Error::BoundaryPoint)
        );
        assert_eq!(
            untf53_closed_form(Region53Point::new(0.5, 0.4), T),
            Err(Error::OutsideRegion)
        );
    }
}
