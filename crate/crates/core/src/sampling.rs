//! Seeded sampling and post-selection.
//!
//! Noisy runs first draw an input branch from the ensemble weights, then an
//! outcome from that branch's (lossy) output distribution. The branch is kept
//! on the [`SampleRecord`] for diagnostics only: [`postselect`] looks at the
//! detected photon total and nothing else.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::distribution::OutputDistribution;
use crate::error::{Error, Result};
use crate::fock::{ExperimentShape, ModeOccupation};
use crate::interferometer::UnitaryMatrix;
use crate::limits::Limits;
use crate::noise::{
    apply_loss, branch_distribution, expand_input_ensemble, InputBranch, NoiseModel,
};
use crate::rng::RandomSeed;

/// Inverse-CDF lookup table over a distribution's iteration order.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    cdf: Vec<f64>,
}

impl CumulativeTable {
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cdf = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cdf }
    }

    /// Index `i` with `cdf[i-1] <= u * total < cdf[i]`, for `u` in `[0, 1)`.
    pub fn index(&self, u: f64) -> usize {
        let total = *self.cdf.last().expect("empty table");
        let target = u * total;
        let i = self.cdf.partition_point(|&c| c <= target);
        if i < self.cdf.len() {
            i
        } else {
            // rounding pushed the target past the end: last entry with mass
            let last = self.cdf.len() - 1;
            (0..=last)
                .rev()
                .find(|&j| j == 0 || self.cdf[j] > self.cdf[j - 1])
                .unwrap_or(last)
        }
    }
}

/// `count` independent outcomes drawn from `dist` by inverse-CDF sampling.
pub fn sample_exact(
    dist: &OutputDistribution,
    seed: RandomSeed,
    count: usize,
) -> Result<Vec<ModeOccupation>> {
    if dist.is_empty() {
        return Err(Error::param(
            "distribution",
            "cannot sample an empty distribution",
        ));
    }
    let keys: Vec<&ModeOccupation> = dist.configurations().collect();
    let table = CumulativeTable::new(dist.iter().map(|(_, p)| p));
    let mut rng = seed.rng();
    Ok((0..count)
        .map(|_| keys[table.index(rng.random::<f64>())].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub trial: u64,
    pub outcome: ModeOccupation,
    pub branch: Arc<InputBranch>,
}

impl SampleRecord {
    pub fn total(&self) -> u32 {
        self.outcome.total_photons()
    }
}

/// The input ensemble of a noise model together with every branch's output
/// distribution (loss included).
#[derive(Debug, Clone)]
pub struct NoisyEnsemble {
    shape: ExperimentShape,
    branches: Vec<Arc<InputBranch>>,
    distributions: Vec<OutputDistribution>,
}

impl NoisyEnsemble {
    pub fn build(
        u: &UnitaryMatrix,
        shape: &ExperimentShape,
        noise: &NoiseModel,
        limits: &Limits,
    ) -> Result<Self> {
        if u.modes() != shape.m {
            return Err(Error::ModeMismatch {
                expected: shape.m,
                actual: u.modes(),
            });
        }
        let branches = expand_input_ensemble(shape, noise, limits)?;
        // the pair-heavy branch carries the most photons; reject early if too big
        let max_photons = branches
            .iter()
            .map(|b| b.occupation.total_photons())
            .max()
            .unwrap_or(0);
        ExperimentShape {
            n: max_photons as usize,
            m: shape.m,
        }
        .check_guard(limits.max_configurations)?;

        let distributions = branches
            .par_iter()
            .map(|b| apply_loss(&branch_distribution(u, b, limits)?, noise.eta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shape: *shape,
            branches: branches.into_iter().map(Arc::new).collect(),
            distributions,
        })
    }

    pub fn shape(&self) -> ExperimentShape {
        self.shape
    }

    pub fn branches(&self) -> &[Arc<InputBranch>] {
        &self.branches
    }

    pub fn distributions(&self) -> &[OutputDistribution] {
        &self.distributions
    }

    /// The full noisy output distribution, summed in branch order.
    pub fn mixture(&self) -> Result<OutputDistribution> {
        OutputDistribution::mixture(
            self.shape.m,
            self.branches
                .iter()
                .zip(&self.distributions)
                .map(|(b, d)| (b.weight, d)),
        )
    }

    /// Distribution conditioned on detecting exactly `n` photons, and the
    /// probability of that event.
    pub fn postselected(&self) -> Result<(OutputDistribution, f64)> {
        self.mixture()?.condition_on_total(self.shape.n as u32)
    }

    /// `count` trials split into `partitions` contiguous blocks, block `k`
    /// drawing from partition `k` of `seed`'s stream.
    pub fn sample(&self, seed: RandomSeed, count: u64, partitions: usize) -> Vec<SampleRecord> {
        let branch_table = CumulativeTable::new(self.branches.iter().map(|b| b.weight));
        let outcome_tables: Vec<(Vec<&ModeOccupation>, CumulativeTable)> = self
            .distributions
            .iter()
            .map(|d| {
                (
                    d.configurations().collect(),
                    CumulativeTable::new(d.iter().map(|(_, p)| p)),
                )
            })
            .collect();

        let parts = (partitions.max(1) as u64).min(count.max(1));
        let blocks: Vec<(u64, u64, u64)> = (0..parts)
            .map(|k| (k, count * k / parts, count * (k + 1) / parts))
            .collect();
        let run = |&(k, lo, hi): &(u64, u64, u64)| {
            let mut rng = seed.partition_rng(k);
            (lo..hi)
                .map(|trial| {
                    let b = branch_table.index(rng.random::<f64>());
                    let (keys, table) = &outcome_tables[b];
                    let outcome = keys[table.index(rng.random::<f64>())].clone();
                    SampleRecord {
                        trial,
                        outcome,
                        branch: Arc::clone(&self.branches[b]),
                    }
                })
                .collect::<Vec<_>>()
        };
        if parts == 1 {
            run(&blocks[0])
        } else {
            blocks.par_iter().map(run).flatten().collect()
        }
    }
}

/// Monte-Carlo runs of the noisy device: branch, then outcome, per trial.
pub fn sample_noisy(
    u: &UnitaryMatrix,
    shape: &ExperimentShape,
    noise: &NoiseModel,
    seed: RandomSeed,
    count: u64,
    limits: &Limits,
) -> Result<Vec<SampleRecord>> {
    Ok(NoisyEnsemble::build(u, shape, noise, limits)?.sample(seed, count, limits.partitions))
}

/// Fraction of records whose branch was the all-ideal input.
pub fn ideal_branch_fraction(samples: &[SampleRecord]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| s.branch.is_ideal()).count() as f64 / samples.len() as f64
}

#[derive(Debug, Clone)]
pub struct PostSelection {
    pub kept: Vec<SampleRecord>,
    /// `kept / total`; 0 when there were no samples.
    pub success_rate: f64,
}

/// Keeps the records that detected exactly `n` photons.
pub fn postselect(samples: &[SampleRecord], n: u32) -> PostSelection {
    let kept: Vec<SampleRecord> = samples.iter().filter(|s| s.total() == n).cloned().collect();
    let success_rate = if samples.is_empty() {
        0.0
    } else {
        kept.len() as f64 / samples.len() as f64
    };
    PostSelection { kept, success_rate }
}

/// Exact distribution of post-selected outcomes and the post-selection
/// success probability.
pub fn postselected_distribution(
    u: &UnitaryMatrix,
    shape: &ExperimentShape,
    noise: &NoiseModel,
    limits: &Limits,
) -> Result<(OutputDistribution, f64)> {
    NoisyEnsemble::build(u, shape, noise, limits)?.postselected()
}
