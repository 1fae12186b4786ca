//! Output distributions of Fock-state inputs.
//!
//! The amplitude for input `t` to reach output `s` through `U` is
//!
//! ```text
//! Per(U[s, t]) / sqrt(prod_i s_i! * prod_j t_j!)
//! ```
//!
//! where `U[s, t]` repeats row `i` of `U` `s_i` times and column `j` `t_j`
//! times. Summing `|amplitude|^2` over every output configuration must give 1;
//! [`output_distribution`] asserts this instead of renormalizing.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{enumerate_configurations, occupancy_factorial_product, ModeOccupation};
use crate::interferometer::UnitaryMatrix;
use crate::limits::Limits;
use crate::permanent::{build_scattering_submatrix, permanent_ryser};

/// Allowed deviation of a distribution's total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probabilities over configurations of a fixed number of modes.
///
/// Iteration follows [`ModeOccupation`]'s ordering: larger photon totals
/// first, then enumeration order. Amplitudes are kept only for distributions
/// produced by a pure input state.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    modes: usize,
    probabilities: BTreeMap<ModeOccupation, f64>,
    amplitudes: Option<BTreeMap<ModeOccupation, Complex64>>,
}

impl OutputDistribution {
    /// Builds a distribution from `(configuration, probability)` pairs; repeated
    /// configurations have their probabilities added.
    pub fn from_probabilities(
        modes: usize,
        entries: impl IntoIterator<Item = (ModeOccupation, f64)>,
    ) -> Result<Self> {
        let mut probabilities = BTreeMap::new();
        for (occ, p) in entries {
            if occ.mode_count() != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    actual: occ.mode_count(),
                });
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::param(
                    "probability",
                    format!("{p} for configuration ({occ}) is not a non-negative number"),
                ));
            }
            *probabilities.entry(occ).or_insert(0.0) += p;
        }
        Ok(Self {
            modes,
            probabilities,
            amplitudes: None,
        })
    }

    /// Distribution of a pure state given its amplitudes.
    pub fn from_amplitudes(
        modes: usize,
        entries: impl IntoIterator<Item = (ModeOccupation, Complex64)>,
    ) -> Result<Self> {
        let amplitudes: BTreeMap<ModeOccupation, Complex64> = entries.into_iter().collect();
        let mut dist = Self::from_probabilities(
            modes,
            amplitudes.iter().map(|(k, a)| (k.clone(), a.norm_sqr())),
        )?;
        dist.amplitudes = Some(amplitudes);
        Ok(dist)
    }

    pub fn point_mass(occ: ModeOccupation) -> Self {
        let modes = occ.mode_count();
        let amplitudes = BTreeMap::from([(occ.clone(), Complex64::new(1.0, 0.0))]);
        Self {
            modes,
            probabilities: BTreeMap::from([(occ, 1.0)]),
            amplitudes: Some(amplitudes),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Probability of `occ`; configurations not present have probability 0.
    pub fn probability(&self, occ: &ModeOccupation) -> f64 {
        self.probabilities.get(occ).copied().unwrap_or(0.0)
    }

    pub fn amplitude(&self, occ: &ModeOccupation) -> Option<Complex64> {
        self.amplitudes
            .as_ref()
            .map(|a| a.get(occ).copied().unwrap_or_default())
    }

    pub fn has_amplitudes(&self) -> bool {
        self.amplitudes.is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeOccupation, f64)> {
        self.probabilities.iter().map(|(k, &p)| (k, p))
    }

    pub fn configurations(&self) -> impl Iterator<Item = &ModeOccupation> {
        self.probabilities.keys()
    }

    /// Sum of all probabilities, accumulated in iteration order.
    pub fn total_probability(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// The photon total shared by every configuration, if there is one.
    pub fn photon_total(&self) -> Option<u32> {
        let mut totals = self.probabilities.keys().map(|k| k.total_photons());
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Expected number of detected photons.
    pub fn mean_photon_number(&self) -> f64 {
        self.iter()
            .map(|(k, p)| p * f64::from(k.total_photons()))
            .sum()
    }

    /// Total probability of configurations carrying exactly `n` photons.
    pub fn mass_with_total(&self, n: u32) -> f64 {
        self.iter()
            .filter(|(k, _)| k.total_photons() == n)
            .map(|(_, p)| p)
            .sum()
    }

    /// Conditional distribution given that exactly `n` photons are detected,
    /// together with the probability of that event.
    ///
    /// If no configuration is discarded the distribution is returned as is,
    /// with probability 1.
    pub fn condition_on_total(&self, n: u32) -> Result<(OutputDistribution, f64)> {
        let mass = self.mass_with_total(n);
        if mass <= 0.0 {
            return Err(Error::EmptyPostSelection);
        }
        if self.configurations().all(|k| k.total_photons() == n) {
            return Ok((self.clone(), 1.0));
        }
        let kept = self
            .iter()
            .filter(|(k, _)| k.total_photons() == n)
            .map(|(k, p)| (k.clone(), p / mass));
        let success = mass / self.total_probability();
        Ok((Self::from_probabilities(self.modes, kept)?, success))
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let total = self.total_probability();
        if (total - 1.0).abs() > tolerance {
            return Err(Error::Normalization { total, tolerance });
        }
        Ok(())
    }

    /// Distribution of the mode-wise sum of independent outcomes of `self` and `other`.
    pub fn convolve(&self, other: &OutputDistribution) -> Result<OutputDistribution> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                actual: other.modes,
            });
        }
        let mut out: BTreeMap<ModeOccupation, f64> = BTreeMap::new();
        for (a, pa) in self.iter() {
            for (b, pb) in other.iter() {
                *out.entry(a.add(b)?).or_insert(0.0) += pa * pb;
            }
        }
        Ok(Self {
            modes: self.modes,
            probabilities: out,
            amplitudes: None,
        })
    }

    /// Weighted mixture `sum_b w_b D_b`, accumulated in the order given.
    pub fn mixture<'a>(
        modes: usize,
        components: impl IntoIterator<Item = (f64, &'a OutputDistribution)>,
    ) -> Result<OutputDistribution> {
        let mut out: BTreeMap<ModeOccupation, f64> = BTreeMap::new();
        for (w, d) in components {
            if d.modes != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    actual: d.modes,
                });
            }
            for (k, p) in d.iter() {
                *out.entry(k.clone()).or_insert(0.0) += w * p;
            }
        }
        Ok(Self {
            modes,
            probabilities: out,
            amplitudes: None,
        })
    }

    pub(crate) fn without_amplitudes(mut self) -> Self {
        self.amplitudes = None;
        self
    }
}

/// Transition amplitude from `input` to `output` through `u`.
pub fn amplitude(
    u: &UnitaryMatrix,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<Complex64> {
    let norm = (occupancy_factorial_product(input)? as f64).sqrt()
        * (occupancy_factorial_product(output)? as f64).sqrt();
    let sub = build_scattering_submatrix(u, input, output)?;
    Ok(permanent_ryser(&sub)? / norm)
}

/// Exact output distribution of the Fock state `input` through `u`, over every
/// configuration with the same photon total.
pub fn output_distribution(
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
    let outputs =
        enumerate_configurations(input.total_photons(), u.modes(), limits.max_configurations)?;
    let input_norm = (occupancy_factorial_product(input)? as f64).sqrt();
    let amplitudes = outputs
        .into_par_iter()
        .map(|out| {
            let sub = build_scattering_submatrix(u, input, &out)?;
            let norm = input_norm * (occupancy_factorial_product(&out)? as f64).sqrt();
            Ok((out, permanent_ryser(&sub)? / norm))
        })
        .collect::<Result<Vec<_>>>()?;
    let dist = OutputDistribution::from_amplitudes(u.modes(), amplitudes)?;
    dist.check_normalized(NORMALIZATION_TOLERANCE)?;
    Ok(dist)
}
