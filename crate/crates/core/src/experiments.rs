//! Experiment drivers: how the ideal share of the output and the
//! post-selection success probability fall off with photon number.
//!
//! Random streams are allocated per row so that rows are independent of each
//! other and of the order in which they are computed: for photon number `n`
//! and unitary sample `s`, the interferometer is drawn from stream
//! `(n << 32) | 2s` and the Monte-Carlo trials from stream `(n << 32) | 2s + 1`.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::output_distribution;
use crate::error::{Error, Result};
use crate::fock::ExperimentShape;
use crate::interferometer::haar_random;
use crate::limits::Limits;
use crate::metrics::total_variation_distance;
use crate::noise::{expand_input_ensemble, ideal_component_probability, NoiseModel};
use crate::rng::RandomSeed;
use crate::sampling::{ideal_branch_fraction, postselect, CumulativeTable, NoisyEnsemble};

/// How the mode count grows with the photon number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCountRule {
    /// `m = n^2`.
    #[default]
    Square,
    /// `m = k n`.
    Multiple(usize),
    /// The same `m` for every `n`.
    Fixed(usize),
}

impl ModeCountRule {
    pub fn modes(&self, n: usize) -> usize {
        match *self {
            Self::Square => n * n,
            Self::Multiple(k) => k * n,
            Self::Fixed(m) => m,
        }
    }
}

impl fmt::Display for ModeCountRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Square => write!(f, "m = n^2"),
            Self::Multiple(k) => write!(f, "m = {k}n"),
            Self::Fixed(m) => write!(f, "m = {m}"),
        }
    }
}

fn stream(n: usize, sample: usize, trials: bool) -> u64 {
    ((n as u64) << 32) | (2 * sample as u64 + u64::from(trials))
}

fn default_trials() -> u64 {
    100_000
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub noise: NoiseModel,
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub mode_rule: ModeCountRule,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Haar unitaries drawn per `n`; TVD columns are averaged over them.
    #[serde(default = "one")]
    pub unitary_samples: usize,
}

impl ScalingConfig {
    /// `p = 0.9` with an even vacuum/pair split, `n = 1..=4`, `m = n^2`.
    pub fn default_run(seed: u64) -> Self {
        Self {
            noise: NoiseModel::number(0.9, 0.5, 0.5),
            n_values: vec![1, 2, 3, 4],
            mode_rule: ModeCountRule::Square,
            trials: default_trials(),
            seed,
            unitary_samples: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::param(
                "n_values",
                "at least one photon number is required",
            ));
        }
        if self.unitary_samples == 0 {
            return Err(Error::param("unitary_samples", "must be at least 1"));
        }
        for &n in &self.n_values {
            ExperimentShape::new(n, self.mode_rule.modes(n))?;
            self.noise.validate(n)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    /// `p^n`, the weight of the all-ideal input branch.
    pub ideal_probability: f64,
    /// Fraction of Monte-Carlo trials that ran on the all-ideal branch.
    pub empirical_ideal_fraction: f64,
    pub tvd_ideal_noisy: Option<f64>,
    pub tvd_ideal_postselected: Option<f64>,
    pub postselection_success: Option<f64>,
    /// False when exact simulation exceeded the size guards; the exact
    /// columns are then empty.
    pub exact: bool,
}

/// One row per entry of `n_values`, in that order.
pub fn run_scaling_experiment(config: &ScalingConfig, limits: &Limits) -> Result<Vec<ScalingRow>> {
    config.validate()?;
    config
        .n_values
        .par_iter()
        .map(|&n| scaling_row(config, n, limits))
        .collect()
}

fn scaling_row(config: &ScalingConfig, n: usize, limits: &Limits) -> Result<ScalingRow> {
    let m = config.mode_rule.modes(n);
    let shape = ExperimentShape::new(n, m)?;
    let ideal_probability = ideal_component_probability(&config.noise, n);

    let mut tvd_noisy = 0.0;
    let mut tvd_post = 0.0;
    let mut success = 0.0;
    let mut ideal_hits = 0.0;
    let mut exact = true;

    for s in 0..config.unitary_samples {
        let u = haar_random(
            m,
            RandomSeed::new(config.seed).with_stream(stream(n, s, false)),
        )?;
        let trial_seed = RandomSeed::new(config.seed).with_stream(stream(n, s, true));
        let ensemble = match NoisyEnsemble::build(&u, &shape, &config.noise, limits) {
            Ok(e) => e,
            Err(e) if e.is_guard() => {
                exact = false;
                ideal_hits += branch_only_ideal_fraction(
                    &shape,
                    &config.noise,
                    trial_seed,
                    config.trials,
                    limits,
                )?;
                continue;
            }
            Err(e) => return Err(e),
        };

        let ideal = output_distribution(&u, &shape.ideal_input(), limits)?;
        let noisy = ensemble.mixture()?;
        tvd_noisy += total_variation_distance(&ideal, &noisy);
        match ensemble.postselected() {
            Ok((post, mass)) => {
                tvd_post += total_variation_distance(&ideal, &post);
                success += mass;
            }
            Err(Error::EmptyPostSelection) => tvd_post += 1.0,
            Err(e) => return Err(e),
        }

        let samples = ensemble.sample(trial_seed, config.trials, limits.partitions);
        ideal_hits += ideal_branch_fraction(&samples);
    }

    let k = config.unitary_samples as f64;
    Ok(ScalingRow {
        n,
        m,
        p: config.noise.p,
        ideal_probability,
        empirical_ideal_fraction: ideal_hits / k,
        tvd_ideal_noisy: exact.then_some(tvd_noisy / k),
        tvd_ideal_postselected: exact.then_some(tvd_post / k),
        postselection_success: exact.then_some(success / k),
        exact,
    })
}

/// Monte-Carlo over input branches alone, for rows too large to simulate exactly.
fn branch_only_ideal_fraction(
    shape: &ExperimentShape,
    noise: &NoiseModel,
    seed: RandomSeed,
    trials: u64,
    limits: &Limits,
) -> Result<f64> {
    let branches = expand_input_ensemble(shape, noise, limits)?;
    let table = CumulativeTable::new(branches.iter().map(|b| b.weight));
    let mut rng = seed.rng();
    let hits = (0..trials)
        .filter(|_| branches[table.index(rng.random::<f64>())].is_ideal())
        .count();
    Ok(if trials == 0 {
        0.0
    } else {
        hits as f64 / trials as f64
    })
}

fn default_filter_rule() -> ModeCountRule {
    ModeCountRule::Multiple(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub eta: f64,
    pub n_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// The post-selection rate does not depend on the interferometer, so a
    /// small mode count keeps the runs cheap.
    #[serde(default = "default_filter_rule")]
    pub mode_rule: ModeCountRule,
}

impl FilterConfig {
    pub fn new(eta: f64, n_values: Vec<usize>, trials: u64, seed: u64) -> Self {
        Self {
            eta,
            n_values,
            trials,
            seed,
            mode_rule: default_filter_rule(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::param(
                "n_values",
                "at least one photon number is required",
            ));
        }
        let noise = NoiseModel::pure_loss(self.eta);
        for &n in &self.n_values {
            ExperimentShape::new(n, self.mode_rule.modes(n))?;
            noise.validate(n)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRow {
    pub n: usize,
    pub m: usize,
    /// `eta^n`.
    pub analytic_success: f64,
    pub empirical_success: f64,
    /// Binomial standard error of the empirical rate around the analytic value.
    pub standard_error: f64,
}

/// Pure-loss devices: perfect sources, every photon survives with probability
/// `eta`, and runs are kept only if all `n` photons are detected.
pub fn run_filter_experiment(config: &FilterConfig, limits: &Limits) -> Result<Vec<FilterRow>> {
    config.validate()?;
    let noise = NoiseModel::pure_loss(config.eta);
    config
        .n_values
        .par_iter()
        .map(|&n| {
            let m = config.mode_rule.modes(n);
            let shape = ExperimentShape::new(n, m)?;
            let u = haar_random(
                m,
                RandomSeed::new(config.seed).with_stream(stream(n, 0, false)),
            )?;
            let ensemble = NoisyEnsemble::build(&u, &shape, &noise, limits)?;
            let seed = RandomSeed::new(config.seed).with_stream(stream(n, 0, true));
            let samples = ensemble.sample(seed, config.trials, limits.partitions);
            let empirical_success = postselect(&samples, n as u32).success_rate;
            let analytic_success = (0..n).fold(1.0, |w, _| w * config.eta);
            let standard_error = if config.trials == 0 {
                0.0
            } else {
                (analytic_success * (1.0 - analytic_success) / config.trials as f64).sqrt()
            };
            Ok(FilterRow {
                n,
                m,
                analytic_success,
                empirical_success,
                standard_error,
            })
        })
        .collect()
}
