//! Independent per-mode source errors.
//!
//! Each of the `n` input modes independently emits the intended single photon
//! with probability `p`, and otherwise an error state. Two error types are
//! modelled:
//!
//! - photon-number errors: vacuum with probability `p0`, a photon pair with
//!   probability `p2` (`p0 + p2 = 1`);
//! - distinguishability: a single photon in a spectral mode orthogonal to the
//!   common one. Such photons interfere with nothing and cross the
//!   interferometer as classical particles; detectors do not see the spectrum.
//!
//! Expanding the product over modes gives a classical mixture of Fock inputs,
//! the [`InputBranch`]es. Loss acts afterwards as independent per-photon
//! survival with probability `eta`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{output_distribution, OutputDistribution, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::fock::{binomial, enumerate_configurations, ExperimentShape, ModeOccupation};
use crate::interferometer::UnitaryMatrix;
use crate::limits::Limits;
use crate::permanent::{permanent_ryser, submatrix_with_repetition};

/// Tolerance on `p0 + p2 = 1`.
pub const SPLIT_TOLERANCE: f64 = 1e-12;

/// Agreement required between the two routes of [`distinguishable_distribution`].
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// The error branch is a vacuum/pair mixture.
    #[default]
    Number,
    /// The error branch is a photon in an orthogonal spectral mode.
    Distinguishability,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability that a source emits the intended photon.
    pub p: f64,
    #[serde(default = "one")]
    pub p0: f64,
    #[serde(default)]
    pub p2: f64,
    #[serde(default)]
    pub mode: NoiseMode,
    /// Per-photon survival probability (filtering, transmission and detection lumped).
    #[serde(default = "one")]
    pub eta: f64,
    /// Optional per-source override of `p`, one entry per input mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_mode_p: Option<Vec<f64>>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            p: 1.0,
            p0: 1.0,
            p2: 0.0,
            mode: NoiseMode::Number,
            eta: 1.0,
            per_mode_p: None,
        }
    }

    /// Photon-number errors with the given vacuum/pair split.
    pub fn number(p: f64, p0: f64, p2: f64) -> Self {
        Self {
            p,
            p0,
            p2,
            ..Self::ideal()
        }
    }

    pub fn distinguishability(p: f64) -> Self {
        Self {
            p,
            mode: NoiseMode::Distinguishability,
            ..Self::ideal()
        }
    }

    /// Perfect sources, per-photon survival `eta`.
    pub fn pure_loss(eta: f64) -> Self {
        Self {
            eta,
            ..Self::ideal()
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    /// `p` for input mode `i`.
    pub fn p_for(&self, i: usize) -> f64 {
        self.per_mode_p
            .as_ref()
            .and_then(|v| v.get(i).copied())
            .unwrap_or(self.p)
    }

    /// Checks parameter ranges; `n` is the number of input sources.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("p0", self.p0)?;
        check_probability("p2", self.p2)?;
        check_probability("eta", self.eta)?;
        if (self.p0 + self.p2 - 1.0).abs() > SPLIT_TOLERANCE {
            return Err(Error::param(
                "p0",
                format!("p0 + p2 = {} must equal 1", self.p0 + self.p2),
            ));
        }
        if let Some(v) = &self.per_mode_p {
            if v.len() != n {
                return Err(Error::param(
                    "per_mode_p",
                    format!("expected {n} entries, got {}", v.len()),
                ));
            }
            for &p in v {
                check_probability("per_mode_p", p)?;
            }
        }
        Ok(())
    }
}

fn check_probability(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(name, format!("{x} is not in [0, 1]")));
    }
    Ok(())
}

/// What a single source emitted in one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceOutcome {
    Ideal,
    Vacuum,
    Pair,
    Orthogonal,
}

/// One classical branch of the mixed input state.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBranch {
    /// Per-source outcome, one entry per input mode.
    pub sources: Vec<SourceOutcome>,
    /// Photons actually entering each mode, regardless of spectral mode.
    pub occupation: ModeOccupation,
    pub weight: f64,
    /// `(mode index, photon index)` for photons in an orthogonal spectral mode.
    pub distinguishable_photons: Vec<(usize, usize)>,
}

impl InputBranch {
    pub fn is_ideal(&self) -> bool {
        self.sources.iter().all(|&s| s == SourceOutcome::Ideal)
    }

    pub fn pair_count(&self) -> usize {
        self.sources
            .iter()
            .filter(|&&s| s == SourceOutcome::Pair)
            .count()
    }

    /// Photons in the common spectral mode; these interfere with each other.
    pub fn common_mode_input(&self) -> ModeOccupation {
        let mut counts = self.occupation.clone().into_counts();
        for &(mode, _) in &self.distinguishable_photons {
            counts[mode] -= 1;
        }
        ModeOccupation::new(counts)
    }

    /// Compact label such as `1,2,0` with orthogonal photons written `d`.
    pub fn label(&self) -> String {
        self.sources
            .iter()
            .map(|s| match s {
                SourceOutcome::Ideal => "1",
                SourceOutcome::Vacuum => "0",
                SourceOutcome::Pair => "2",
                SourceOutcome::Orthogonal => "d",
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Every branch of the product over the `n` sources with non-zero weight.
///
/// Branches are ordered with source 0 most significant, and within a source
/// the intended photon first, then vacuum, then pair (or orthogonal photon).
/// Weights are products of per-source factors taken in source order, so the
/// all-ideal weight is bit-identical to [`ideal_component_probability`].
pub fn expand_input_ensemble(
    shape: &ExperimentShape,
    noise: &NoiseModel,
    limits: &Limits,
) -> Result<Vec<InputBranch>> {
    noise.validate(shape.n)?;
    let options: Vec<Vec<(SourceOutcome, f64)>> = (0..shape.n)
        .map(|i| {
            let p = noise.p_for(i);
            let all = match noise.mode {
                NoiseMode::Number => vec![
                    (SourceOutcome::Ideal, p),
                    (SourceOutcome::Vacuum, (1.0 - p) * noise.p0),
                    (SourceOutcome::Pair, (1.0 - p) * noise.p2),
                ],
                NoiseMode::Distinguishability => vec![
                    (SourceOutcome::Ideal, p),
                    (SourceOutcome::Orthogonal, 1.0 - p),
                ],
            };
            all.into_iter().filter(|&(_, w)| w > 0.0).collect()
        })
        .collect();

    let count = options
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if count > limits.max_branches as u128 {
        return Err(Error::SizeLimit {
            what: "input ensemble",
            count,
            limit: limits.max_branches as u128,
        });
    }

    let mut partial: Vec<(Vec<SourceOutcome>, f64)> = vec![(Vec::new(), 1.0)];
    for opts in &options {
        partial = partial
            .into_iter()
            .flat_map(|(sources, w)| {
                opts.iter().map(move |&(o, ow)| {
                    let mut s = sources.clone();
                    s.push(o);
                    (s, w * ow)
                })
            })
            .collect();
    }

    Ok(partial
        .into_iter()
        .map(|(sources, weight)| {
            let mut counts = vec![0u32; shape.m];
            let mut distinguishable = Vec::new();
            for (mode, s) in sources.iter().enumerate() {
                counts[mode] = match s {
                    SourceOutcome::Ideal => 1,
                    SourceOutcome::Vacuum => 0,
                    SourceOutcome::Pair => 2,
                    SourceOutcome::Orthogonal => {
                        distinguishable.push((mode, mode));
                        1
                    }
                };
            }
            InputBranch {
                sources,
                occupation: ModeOccupation::new(counts),
                weight,
                distinguishable_photons: distinguishable,
            }
        })
        .collect())
}

/// Probability that every source emitted the intended photon: `prod_i p_i`.
pub fn ideal_component_probability(noise: &NoiseModel, n: usize) -> f64 {
    (0..n).fold(1.0, |w, i| w * noise.p_for(i))
}

/// Output distribution of one input branch before loss.
pub fn branch_distribution(
    u: &UnitaryMatrix,
    branch: &InputBranch,
    limits: &Limits,
) -> Result<OutputDistribution> {
    let common = branch.common_mode_input();
    let mut dist = if common.total_photons() == 0 {
        OutputDistribution::point_mass(ModeOccupation::vacuum(u.modes()))
    } else {
        output_distribution(u, &common, limits)?
    };
    if branch.distinguishable_photons.is_empty() {
        return Ok(dist);
    }
    let transition = u.transition_probabilities();
    for &(mode, _) in &branch.distinguishable_photons {
        dist = dist.convolve(&single_photon_transit(&transition, mode)?)?;
    }
    Ok(dist)
}

fn single_photon_transit(
    transition: &nalgebra::DMatrix<f64>,
    input_mode: usize,
) -> Result<OutputDistribution> {
    let m = transition.nrows();
    OutputDistribution::from_probabilities(
        m,
        (0..m).map(|i| (ModeOccupation::single(i, m), transition[(i, input_mode)])),
    )
}

/// Distribution of fully distinguishable photons, computed by independent
/// single-photon transits: each photon entering mode `j` exits mode `i` with
/// probability `|U[i, j]|^2`.
pub fn classical_transit_distribution(
    u: &UnitaryMatrix,
    input: &ModeOccupation,
    limits: &Limits,
) -> Result<OutputDistribution> {
    if input.mode_count() != u.modes() {
        return Err(Error::ModeMismatch {
            expected: u.modes(),
            actual: input.mode_count(),
        });
    }
    crate::fock::ExperimentShape {
        n: input.total_photons() as usize,
        m: u.modes(),
    }
    .check_guard(limits.max_configurations)?;
    let transition = u.transition_probabilities();
    let mut dist = OutputDistribution::point_mass(ModeOccupation::vacuum(u.modes()));
    for mode in input.photon_modes() {
        dist = dist.convolve(&single_photon_transit(&transition, mode)?)?;
    }
    Ok(dist.without_amplitudes())
}

/// Distribution of fully distinguishable photons, `P(S) = Per(|U|^2[S, T]) / prod_i s_i!`.
///
/// The permanent route is cross-checked against
/// [`classical_transit_distribution`]; a disagreement above
/// [`CROSS_CHECK_TOLERANCE`] is reported as an error.
pub fn distinguishable_distribution(
    u: &UnitaryMatrix,
    input: &ModeOccupation,
    limits: &Limits,
) -> Result<OutputDistribution> {
    let outputs =
        enumerate_configurations(input.total_photons(), u.modes(), limits.max_configurations)?;
    let transition = u
        .transition_probabilities()
        .map(|x| num_complex::Complex64::new(x, 0.0));
    let mut entries = Vec::with_capacity(outputs.len());
    for out in outputs {
        let sub = submatrix_with_repetition(&transition, input, &out)?;
        let denom = crate::fock::occupancy_factorial_product(&out)? as f64;
        let p = permanent_ryser(&sub)?.re / denom;
        // Ryser cancellation can leave tiny negative values
        entries.push((out, p.max(0.0)));
    }
    let dist = OutputDistribution::from_probabilities(u.modes(), entries)?;

    let transit = classical_transit_distribution(u, input, limits)?;
    let deviation = dist
        .iter()
        .map(|(k, p)| (p - transit.probability(k)).abs())
        .fold(0.0, f64::max);
    if deviation > CROSS_CHECK_TOLERANCE {
        return Err(Error::CrossCheck {
            what: "distinguishable distribution",
            deviation,
        });
    }
    dist.check_normalized(NORMALIZATION_TOLERANCE)?;
    Ok(dist)
}

/// Mixture over which photons share the common spectral mode.
///
/// Each photon independently is in the common mode with probability `p`. For
/// every subset of common-mode photons, their quantum distribution is
/// convolved with classical transits of the remaining photons, and the
/// branches are added with weight `p^|G| (1-p)^(n-|G|)`.
pub fn partial_distinguishability_distribution(
    u: &UnitaryMatrix,
    shape: &ExperimentShape,
    p: f64,
    limits: &Limits,
) -> Result<OutputDistribution> {
    if u.modes() != shape.m {
        return Err(Error::ModeMismatch {
            expected: shape.m,
            actual: u.modes(),
        });
    }
    let noise = NoiseModel::distinguishability(p);
    let branches = expand_input_ensemble(shape, &noise, limits)?;
    let dists = branches
        .iter()
        .map(|b| branch_distribution(u, b, limits))
        .collect::<Result<Vec<_>>>()?;
    let dist = OutputDistribution::mixture(
        shape.m,
        branches.iter().zip(&dists).map(|(b, d)| (b.weight, d)),
    )?;
    dist.check_normalized(NORMALIZATION_TOLERANCE)?;
    Ok(dist)
}

/// Independent survival of every photon with probability `eta`.
pub fn apply_loss(dist: &OutputDistribution, eta: f64) -> Result<OutputDistribution> {
    check_probability("eta", eta)?;
    if eta == 1.0 {
        return Ok(dist.clone());
    }
    let mut out: BTreeMap<ModeOccupation, f64> = BTreeMap::new();
    for (occ, p) in dist.iter() {
        // survivors per mode: (count, probability)
        let per_mode: Vec<Vec<(u32, f64)>> = occ
            .counts()
            .iter()
            .map(|&s| {
                (0..=s)
                    .map(|k| {
                        let w = binomial(u64::from(s), u64::from(k)) as f64
                            * eta.powi(k as i32)
                            * (1.0 - eta).powi((s - k) as i32);
                        (k, w)
                    })
                    .filter(|&(_, w)| w > 0.0)
                    .collect()
            })
            .collect();
        thin_into(
            &per_mode,
            0,
            &mut Vec::with_capacity(per_mode.len()),
            p,
            &mut out,
        );
    }
    OutputDistribution::from_probabilities(dist.mode_count(), out)
}

fn thin_into(
    per_mode: &[Vec<(u32, f64)>],
    mode: usize,
    prefix: &mut Vec<u32>,
    weight: f64,
    out: &mut BTreeMap<ModeOccupation, f64>,
) {
    if mode == per_mode.len() {
        *out.entry(ModeOccupation::new(prefix.clone()))
            .or_insert(0.0) += weight;
        return;
    }
    for &(k, w) in &per_mode[mode] {
        prefix.push(k);
        thin_into(per_mode, mode + 1, prefix, weight * w, out);
        prefix.pop();
    }
}
