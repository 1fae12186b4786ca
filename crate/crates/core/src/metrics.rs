//! Distances between output distributions. Missing configurations count as
//! probability zero.

use std::cmp::Ordering;

use crate::distribution::OutputDistribution;

/// Half the L1 distance over the union of both supports, clamped to `[0, 1]`.
///
/// Walks both supports in configuration order, so swapping the arguments
/// gives a bit-identical result.
pub fn total_variation_distance(a: &OutputDistribution, b: &OutputDistribution) -> f64 {
    let mut xs = a.iter().peekable();
    let mut ys = b.iter().peekable();
    let mut sum = 0.0;
    loop {
        let term = match (xs.peek(), ys.peek()) {
            (None, None) => break,
            (Some(_), None) => xs.next().unwrap().1,
            (None, Some(_)) => ys.next().unwrap().1,
            (Some((kx, _)), Some((ky, _))) => match kx.cmp(ky) {
                Ordering::Less => xs.next().unwrap().1,
                Ordering::Greater => ys.next().unwrap().1,
                Ordering::Equal => (xs.next().unwrap().1 - ys.next().unwrap().1).abs(),
            },
        };
        sum += term.abs();
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

/// Bhattacharyya coefficient `sum sqrt(P_a P_b)`, clamped to `[0, 1]`.
pub fn bhattacharyya_fidelity(a: &OutputDistribution, b: &OutputDistribution) -> f64 {
    a.iter()
        .map(|(k, p)| (p * b.probability(k)).sqrt())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeOccupation;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn dist(entries: &[(&[u32], f64)]) -> OutputDistribution {
        OutputDistribution::from_probabilities(
            2,
            entries
                .iter()
                .map(|(k, p)| (ModeOccupation::new(k.to_vec()), *p)),
        )
        .unwrap()
    }

    #[test]
    fn tvd_examples() {
        let a = dist(&[(&[1, 0], 0.75), (&[0, 1], 0.25)]);
        let b = dist(&[(&[1, 0], 0.5), (&[0, 1], 0.5)]);
        assert_eq!(total_variation_distance(&a, &a), 0.0);
        assert_eq!(total_variation_distance(&a, &b), 0.25);
        assert_eq!(total_variation_distance(&b, &a), 0.25);

        let x = dist(&[(&[1, 0], 1.0)]);
        let y = dist(&[(&[0, 1], 1.0)]);
        assert_eq!(total_variation_distance(&x, &y), 1.0);
    }

    #[test]
    fn fidelity_examples() {
        let x = dist(&[(&[1, 0], 1.0)]);
        let y = dist(&[(&[0, 1], 1.0)]);
        let uniform = dist(&[(&[1, 0], 0.5), (&[0, 1], 0.5)]);
        assert_eq!(bhattacharyya_fidelity(&x, &x), 1.0);
        assert_eq!(bhattacharyya_fidelity(&x, &y), 0.0);
        assert!((bhattacharyya_fidelity(&uniform, &x) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn explicit_zero_entries_do_not_matter() {
        let a = dist(&[(&[1, 0], 1.0), (&[0, 1], 0.0)]);
        let b = dist(&[(&[1, 0], 1.0)]);
        assert_eq!(total_variation_distance(&a, &b), 0.0);
        assert_eq!(total_variation_distance(&b, &a), 0.0);
    }
}
