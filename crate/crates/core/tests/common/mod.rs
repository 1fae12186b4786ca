#![allow(dead_code)]

use bosim::{Complex64, ComplexMatrix, ModeOccupation, OutputDistribution, UnitaryMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(k: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let m = DMatrix::from_fn(k, k, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    ComplexMatrix::new(m).unwrap()
}

/// Builds the repeated-row/column submatrix directly from the definition.
pub fn reference_submatrix(
    u: &UnitaryMatrix,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> ComplexMatrix {
    let mut rows = Vec::new();
    for (i, &s) in output.counts().iter().enumerate() {
        for _ in 0..s {
            rows.push(i);
        }
    }
    let mut cols = Vec::new();
    for (j, &t) in input.counts().iter().enumerate() {
        for _ in 0..t {
            cols.push(j);
        }
    }
    let data: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| u.get(r, c)).collect())
        .collect();
    ComplexMatrix::from_rows(&data).unwrap()
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Three-sigma binomial half-width for `trials` draws at probability `p`.
pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Random probability vector over `k` distinct configurations in `modes` modes.
pub fn random_distribution(k: usize, modes: usize, rng: &mut impl Rng) -> OutputDistribution {
    let weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let configs = bosim::enumerate_configurations(3, modes, 1_000_000).unwrap();
    OutputDistribution::from_probabilities(
        modes,
        configs
            .into_iter()
            .zip(weights)
            .map(|(c, w)| (c, w / total)),
    )
    .unwrap()
}
