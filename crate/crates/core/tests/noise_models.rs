mod common;

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use bosim::noise::classical_transit_distribution;
use bosim::{
    apply_loss, distinguishable_distribution, element_unitary, expand_input_ensemble, haar_random,
    ideal_component_probability, output_distribution, partial_distinguishability_distribution,
    total_variation_distance, ExperimentShape, Limits, ModeOccupation, NoiseModel, OpticalElement,
};
use common::{test_rng, three_sigma};
use rand::Rng;

fn limits() -> Limits {
    Limits::default()
}

#[test]
fn ensemble_weights_sum_to_one_on_grid() {
    let grid = [0.0, 0.5, 1.0];
    for n in 1..=6 {
        let shape = ExperimentShape::new(n, n).unwrap();
        for &p in &grid {
            for &p0 in &grid {
                for &eta in &grid {
                    let noise = NoiseModel::number(p, p0, 1.0 - p0).with_eta(eta);
                    let branches = expand_input_ensemble(&shape, &noise, &limits()).unwrap();
                    let total: f64 = branches.iter().map(|b| b.weight).sum();
                    assert!((total - 1.0).abs() <= 1e-9, "n={n} p={p} p0={p0}");
                    let ideal_weight = branches
                        .iter()
                        .find(|b| b.is_ideal())
                        .map_or(0.0, |b| b.weight);
                    assert_eq!(ideal_weight, ideal_component_probability(&noise, n));
                }
            }
        }
    }
}

#[test]
fn distinguishability_ensemble_labels() {
    let shape = ExperimentShape::new(3, 4).unwrap();
    let branches =
        expand_input_ensemble(&shape, &NoiseModel::distinguishability(0.6), &limits()).unwrap();
    assert_eq!(branches.len(), 8);
    for b in &branches {
        assert_eq!(b.occupation, ModeOccupation::ideal_input(3, 4));
        let orth = b
            .sources
            .iter()
            .filter(|s| **s == bosim::SourceOutcome::Orthogonal)
            .count();
        assert_eq!(b.distinguishable_photons.len(), orth);
        let expected = 0.6f64.powi(3 - orth as i32) * 0.4f64.powi(orth as i32);
        assert!((b.weight - expected).abs() < 1e-15);
    }
    let number =
        expand_input_ensemble(&shape, &NoiseModel::number(0.6, 0.5, 0.5), &limits()).unwrap();
    assert!(number.iter().all(|b| b.distinguishable_photons.is_empty()));
}

#[test]
fn distinguishable_routes_agree() {
    for n in 1..=3 {
        for m in n..=6 {
            let u = haar_random(m, (10 * n + m) as u64).unwrap();
            let input = ModeOccupation::ideal_input(n, m);
            let a = distinguishable_distribution(&u, &input, &limits()).unwrap();
            let b = classical_transit_distribution(&u, &input, &limits()).unwrap();
            for (k, p) in a.iter() {
                assert!((p - b.probability(k)).abs() <= 1e-10);
            }
            assert!(total_variation_distance(&a, &b) <= 1e-10);
        }
    }
}

#[test]
fn distinguishable_matches_monte_carlo_walks() {
    let (n, m) = (3usize, 5usize);
    let u = haar_random(m, 314).unwrap();
    let dist =
        distinguishable_distribution(&u, &ModeOccupation::ideal_input(n, m), &limits()).unwrap();

    // independent oracle: each photon picks its exit mode from column j of |U|^2
    let trials = 100_000u64;
    let mut rng = test_rng(2718);
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..trials {
        let mut occ = vec![0u32; m];
        for j in 0..n {
            let r: f64 = rng.random();
            let mut acc = 0.0;
            let mut exit = m - 1;
            for i in 0..m {
                acc += u.get(i, j).norm_sqr();
                if r < acc {
                    exit = i;
                    break;
                }
            }
            occ[exit] += 1;
        }
        *counts.entry(occ).or_default() += 1;
    }
    for (k, p) in dist.iter() {
        let f = counts.get(k.counts()).copied().unwrap_or(0) as f64 / trials as f64;
        assert!(
            (f - p).abs() <= three_sigma(p, trials).max(1e-12),
            "{k}: empirical {f}, exact {p}"
        );
    }
}

#[test]
fn partial_distinguishability_endpoints() {
    for n in 1..=3 {
        for m in n..=6 {
            let shape = ExperimentShape::new(n, m).unwrap();
            let u = haar_random(m, 500 + (10 * n + m) as u64).unwrap();
            let ideal = output_distribution(&u, &shape.ideal_input(), &limits()).unwrap();
            let classical =
                distinguishable_distribution(&u, &shape.ideal_input(), &limits()).unwrap();
            let at_one =
                partial_distinguishability_distribution(&u, &shape, 1.0, &limits()).unwrap();
            let at_zero =
                partial_distinguishability_distribution(&u, &shape, 0.0, &limits()).unwrap();
            assert!(total_variation_distance(&at_one, &ideal) <= 1e-10);
            assert!(total_variation_distance(&at_zero, &classical) <= 1e-10);
            let gap = total_variation_distance(&ideal, &classical);
            assert!((total_variation_distance(&ideal, &at_zero) - gap).abs() <= 1e-10);
        }
    }
}

#[test]
fn partial_distinguishability_by_subset_brute_force() {
    // two photons on a balanced splitter: only the fully common subset (weight p^2)
    // shows the dip, every other subset gives 1/2 coincidences
    let u = element_unitary(&OpticalElement::beamsplitter(0, 1, FRAC_PI_4, 0.0), 2).unwrap();
    let shape = ExperimentShape::new(2, 2).unwrap();
    for &p in &[0.0, 0.25, 0.5, 0.9, 1.0] {
        let d = partial_distinguishability_distribution(&u, &shape, p, &limits()).unwrap();
        let expected = p * p * 0.0 + (1.0 - p * p) * 0.5;
        assert!((d.probability(&[1, 1].into()) - expected).abs() <= 1e-15);
    }
}

#[test]
fn loss_preserves_norm_and_scales_mean() {
    let u = haar_random(5, 99).unwrap();
    let shape = ExperimentShape::new(3, 5).unwrap();
    let noisy =
        bosim::NoisyEnsemble::build(&u, &shape, &NoiseModel::number(0.7, 0.3, 0.7), &limits())
            .unwrap()
            .mixture()
            .unwrap();
    for &eta in &[0.0, 0.1, 0.5, 0.93, 1.0] {
        let lossy = apply_loss(&noisy, eta).unwrap();
        assert!((lossy.total_probability() - 1.0).abs() <= 1e-9);
        assert!((lossy.mean_photon_number() - eta * noisy.mean_photon_number()).abs() <= 1e-9);
    }
}

#[test]
fn loss_on_ideal_output_keeps_each_photon_with_eta() {
    // with n photons and survival eta, P(total = k) is Binomial(n, eta)
    let u = haar_random(6, 5).unwrap();
    let d = output_distribution(&u, &ModeOccupation::ideal_input(3, 6), &limits()).unwrap();
    let lossy = apply_loss(&d, 0.6).unwrap();
    let binom = [0.064, 0.288, 0.432, 0.216];
    for (k, expected) in binom.iter().enumerate() {
        assert!((lossy.mass_with_total(k as u32) - expected).abs() <= 1e-12);
    }
}
