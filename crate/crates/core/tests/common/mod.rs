#![allow(dead_code)]

use eigenframe_core::construction::FrameMatrix;
use eigenframe_core::numerics::{seeded_rng, sym_eigen, FrameRng};
use eigenframe_core::spectra::{Lengths, Spectrum};
use eigenframe_core::Tolerance;
use rand::Rng;
use rand_distr::StandardNormal;

/// A feasible `(λ, μ)` pair read off a random Gaussian frame whose columns
/// are rescaled to random squared lengths in `[0.5, 1.5]`.
pub struct Case {
    pub seed: u64,
    pub lambda: Spectrum,
    pub mu: Lengths,
}

pub fn gaussian_frame(m: usize, n: usize, rng: &mut FrameRng) -> FrameMatrix {
    let cols = (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let len_sq: f64 = rng.random_range(0.5..1.5);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x * len_sq.sqrt() / norm).collect()
        })
        .collect();
    FrameMatrix::new(m, cols).unwrap()
}

pub fn random_case(seed: u64) -> Case {
    let mut rng = seeded_rng(seed);
    let m = rng.random_range(2..=5);
    let n = rng.random_range(m..=8);
    let f = gaussian_frame(m, n, &mut rng);
    let values = sym_eigen(&f.frame_operator(), Tolerance::DEFAULT).unwrap().values;
    let lambda = Spectrum::new(values, Tolerance::DEFAULT).unwrap();
    let mu = Lengths::new(f.squared_norms(), Tolerance::DEFAULT).unwrap();
    Case { seed, lambda, mu }
}

/// Strictly interlacing `γ_1 > β_1 > γ_2 > … > γ_R > β_R ≥ 0`.
pub fn strict_pair(r: usize, rng: &mut FrameRng) -> (Vec<f64>, Vec<f64>) {
    let mut pts: Vec<f64> = Vec::with_capacity(2 * r);
    let mut x: f64 = rng.random_range(0.0..0.5);
    for _ in 0..2 * r {
        pts.push(x);
        x += rng.random_range(0.05..1.0);
    }
    pts.reverse();
    let gamma = pts.iter().step_by(2).copied().collect();
    let beta = pts.iter().skip(1).step_by(2).copied().collect();
    (beta, gamma)
}
