//! Producing eigenstep tables.
//!
//! [`sample_eigensteps`] is a randomized heuristic for arbitrary targets. The
//! `untf53_*` functions describe the exact two-parameter family of tables for
//! unit norm tight frames of five vectors in three dimensions.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::numerics::seeded_rng;
use crate::spectra::{
    frame_exists, propagate_bounds, validate_eigensteps, EigenstepTable, Lengths, Spectrum,
};
use crate::{Error, Result, Tolerance};

/// Free parameters of the 3×5 UNTF eigensteps: `x = λ_{3;3}`, `y = λ_{2;2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region53Point {
    pub x: f64,
    pub y: f64,
}

impl Region53Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Region53Point { x, y }
    }
}

const FIVE_THIRDS: f64 = 5.0 / 3.0;

/// Target spectrum `(5/3, 5/3, 5/3)` of a 3×5 UNTF.
pub fn untf53_lambda() -> Spectrum {
    Spectrum::constant(FIVE_THIRDS, 3)
}

/// Unit lengths for the five frame vectors.
pub fn untf53_mu() -> Lengths {
    Lengths::constant(1.0, 5)
}

pub fn untf53_table(p: Region53Point) -> EigenstepTable {
    let Region53Point { x, y } = p;
    EigenstepTable::new(vec![
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![2.0 - y, y, 0.0],
        vec![FIVE_THIRDS, 4.0 / 3.0 - x, x],
        vec![FIVE_THIRDS, FIVE_THIRDS, 2.0 / 3.0],
        vec![FIVE_THIRDS, FIVE_THIRDS, FIVE_THIRDS],
    ])
    .expect("3x5 table literal is well formed")
}

/// The eleven interlacing inequalities on `(x, y)`, boundary included.
pub fn untf53_region_contains(p: Region53Point, tol: Tolerance) -> bool {
    let Region53Point { x, y } = p;
    let le = |a: f64, b: f64| tol.le(a, b);
    // column 3 ⊑ column 4
    le(x, 2.0 / 3.0)
        && le(2.0 / 3.0, 4.0 / 3.0 - x)
        && le(4.0 / 3.0 - x, FIVE_THIRDS)
        // column 2 ⊑ column 3
        && le(0.0, x)
        && le(x, y)
        && le(y, 4.0 / 3.0 - x)
        && le(4.0 / 3.0 - x, 2.0 - y)
        && le(2.0 - y, FIVE_THIRDS)
        // column 1 ⊑ column 2
        && le(0.0, y)
        && le(y, 1.0)
        && le(1.0, 2.0 - y)
}

/// Corners of the feasible pentagon, counterclockwise from `(0, 1/3)`.
pub fn untf53_region_vertices() -> [Region53Point; 5] {
    [
        Region53Point::new(0.0, 1.0 / 3.0),
        Region53Point::new(1.0 / 3.0, 1.0 / 3.0),
        Region53Point::new(2.0 / 3.0, 2.0 / 3.0),
        Region53Point::new(1.0 / 3.0, 1.0),
        Region53Point::new(0.0, 2.0 / 3.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub max_attempts: usize,
    pub tol: Tolerance,
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig {
            seed,
            ..Self::default()
        }
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            max_attempts: 10_000,
            tol: Tolerance::DEFAULT,
        }
    }
}

/// Consecutive rejections of one column before the sampler also redraws the
/// column to its left.
const COLUMN_RETRIES: usize = 8;

/// Draws a random valid eigenstep table for `(lambda, mu)`.
///
/// Columns are filled left to right. Each entry is drawn uniformly from the
/// intersection of its propagated bracket (interlacing with the already fixed
/// columns, the chains towards the target, the trace) and the range that
/// still lets the rest of the column meet the trace. A finished column is
/// kept only if propagation with it fixed leaves every later bracket
/// nonempty; otherwise it is redrawn, and after repeated failures the sampler
/// steps back one column. This is uniform per entry, not uniform over the set
/// of all tables.
///
/// Fails with [`Error::InfeasibleTarget`] before any sampling when no frame
/// exists, and with [`Error::SamplerExhausted`] after `max_attempts`
/// rejected columns.
pub fn sample_eigensteps(
    lambda: &Spectrum,
    mu: &Lengths,
    cfg: &SamplerConfig,
) -> Result<EigenstepTable> {
    if mu.is_empty() || lambda.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "sampler targets (nonempty)",
            expected: 1,
            found: 0,
        });
    }
    let tol = cfg.tol;
    if !frame_exists(lambda, mu, tol) {
        return Err(Error::InfeasibleTarget);
    }

    let (m_dim, n_len) = (lambda.len(), mu.len());
    let sums = mu.partial_sums();
    let mut columns = vec![vec![0.0; m_dim]; n_len + 1];
    columns[n_len] = lambda.as_slice().to_vec();
    let mut fixed = vec![false; n_len + 1];
    fixed[0] = true;
    fixed[n_len] = true;

    let mut rng = seeded_rng(cfg.seed);
    let mut rejections = 0usize;
    let mut failures = vec![0usize; n_len + 1];
    let mut n = 1;
    while n < n_len {
        let (lo, hi, ok) = propagate_bounds(&columns, &fixed, &sums, tol);
        let drawn = if ok {
            Some(draw_column(&lo[n], &hi[n], sums[n], &mut rng))
        } else {
            None
        };
        if let Some(col) = drawn {
            columns[n] = col;
            fixed[n] = true;
            let (_, _, ok) = propagate_bounds(&columns, &fixed, &sums, tol);
            if ok {
                n += 1;
                continue;
            }
            fixed[n] = false;
        }

        rejections += 1;
        if rejections >= cfg.max_attempts {
            return Err(Error::SamplerExhausted {
                attempts: rejections,
            });
        }
        failures[n] += 1;
        if failures[n] >= COLUMN_RETRIES && n > 1 {
            failures[n] = 0;
            n -= 1;
            fixed[n] = false;
        }
    }

    let table = EigenstepTable::new(columns)?;
    let report = validate_eigensteps(&table, lambda, mu, tol)?;
    if !report.is_valid() {
        return Err(Error::SamplerExhausted {
            attempts: rejections,
        });
    }
    Ok(table)
}

fn draw_column<R: Rng + ?Sized>(lo: &[f64], hi: &[f64], budget: f64, rng: &mut R) -> Vec<f64> {
    let m_dim = lo.len();
    let mut col = vec![0.0; m_dim];
    let mut remaining = budget;
    for m in 0..m_dim {
        if m + 1 == m_dim {
            col[m] = remaining.clamp(lo[m], hi[m].max(lo[m]));
            break;
        }
        let rest_lo: f64 = lo[m + 1..].iter().sum();
        let rest_hi: f64 = hi[m + 1..].iter().sum();
        let a = lo[m].max(remaining - rest_hi);
        let b = hi[m].min(remaining - rest_lo);
        let x = if b > a {
            a + (b - a) * rng.random::<f64>()
        } else {
            a.min(hi[m]).max(lo[m])
        };
        col[m] = x;
        remaining -= x;
    }
    col
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::interlaces;

    const T: Tolerance = Tolerance::DEFAULT;

    #[test]
    fn reference_point_table() {
        let t = untf53_table(Region53Point::new(0.0, 1.0 / 3.0));
        assert_eq!(t.column(2), &[5.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert_eq!(t.column(3), &[5.0 / 3.0, 4.0 / 3.0, 0.0]);
        let report = validate_eigensteps(&t, &untf53_lambda(), &untf53_mu(), T).unwrap();
        assert!(report.is_valid());
    }

    #[test]
    fn substituted_column_three() {
        let t = untf53_table(Region53Point::new(1.0 / 3.0, 1.0 / 3.0));
        let c = t.column(3);
        assert!((c[0] - 5.0 / 3.0).abs() < 1e-15);
        assert!((c[1] - 1.0).abs() < 1e-15);
        assert!((c[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn origin_is_not_a_valid_table() {
        let t = untf53_table(Region53Point::new(0.0, 0.0));
        let report = validate_eigensteps(&t, &untf53_lambda(), &untf53_mu(), T).unwrap();
        assert!(!report.is_valid());
        assert!(!interlaces(t.column(2), t.column(3), T).unwrap());
    }

    #[test]
    fn region_membership_examples() {
        assert!(untf53_region_contains(Region53Point::new(0.0, 1.0 / 3.0), T));
        assert!(untf53_region_contains(Region53Point::new(0.2, 0.5), T));
        assert!(!untf53_region_contains(Region53Point::new(0.5, 0.4), T));
    }

    #[test]
    fn vertices_in_order_and_inside() {
        let v = untf53_region_vertices();
        assert_eq!(v[0], Region53Point::new(0.0, 1.0 / 3.0));
        assert_eq!(v[2], Region53Point::new(2.0 / 3.0, 2.0 / 3.0));
        assert!(v.iter().all(|&p| untf53_region_contains(p, T)));
    }

    #[test]
    fn orthonormal_basis_table_is_forced() {
        let l = Spectrum::constant(1.0, 3);
        let m = Lengths::constant(1.0, 3);
        for seed in 0..5 {
            let t = sample_eigensteps(&l, &m, &SamplerConfig::with_seed(seed)).unwrap();
            for n in 0..=3 {
                for k in 0..3 {
                    let expect = if k < n { 1.0 } else { 0.0 };
                    assert!((t.entry(n, k) - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampled_untf_tables_land_in_region() {
        for seed in 0..50 {
            let t = sample_eigensteps(&untf53_lambda(), &untf53_mu(), &SamplerConfig::with_seed(seed))
                .unwrap();
            let p = Region53Point::new(t.entry(3, 2), t.entry(2, 1));
            assert!(untf53_region_contains(p, T), "seed {seed}: {p:?}");
        }
    }

    #[test]
    fn infeasible_targets_are_rejected() {
        let l = Spectrum::new(vec![1.0, 1.0], T).unwrap();
        let m = Lengths::new(vec![1.5, 0.5], T).unwrap();
        assert_eq!(
            sample_eigensteps(&l, &m, &SamplerConfig::default()),
            Err(Error::InfeasibleTarget)
        );
    }

    #[test]
    fn sampler_is_deterministic() {
        let l = Spectrum::new(vec![2.5, 1.5, 1.0], T).unwrap();
        let m = Lengths::new(vec![1.2, 1.0, 1.0, 0.9, 0.9], T).unwrap();
        let cfg = SamplerConfig::with_seed(42);
        assert_eq!(
            sample_eigensteps(&l, &m, &cfg).unwrap(),
            sample_eigensteps(&l, &m, &cfg).unwrap()
        );
    }

    #[test]
    fn single_vector_table() {
        let l = Spectrum::new(vec![0.7, 0.0], T).unwrap();
        let m = Lengths::new(vec![0.7], T).unwrap();
        let t = sample_eigensteps(&l, &m, &SamplerConfig::default()).unwrap();
        assert_eq!(t.frame_len(), 1);
        assert_eq!(t.column(1), &[0.7, 0.0]);
    }
}
