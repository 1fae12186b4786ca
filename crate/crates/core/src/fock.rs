//! Photon-number configurations.
//!
//! A configuration assigns a photon count to each of `m` modes. The set of
//! configurations carrying `n` photons is the set of weak compositions of `n`
//! into `m` parts, of size `C(n + m - 1, m - 1)`. Enumeration uses descending
//! lexicographic order, `(2,0), (1,1), (0,2)`, and [`configuration_rank`] is the
//! position of a configuration in that order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest per-mode count for which `count!` is computed exactly.
pub const MAX_EXACT_FACTORIAL: u32 = 20;

/// Photon counts per mode.
///
/// Ordering is by total photon number (largest first), then descending
/// lexicographic on the counts. Within one photon total this is exactly the
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeOccupation(Vec<u32>);

impl ModeOccupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(m: usize) -> Self {
        Self(vec![0; m])
    }

    /// One photon in each of the first `n` modes, vacuum in the rest.
    pub fn ideal_input(n: usize, m: usize) -> Self {
        let mut counts = vec![0; m];
        counts[..n.min(m)].fill(1);
        Self(counts)
    }

    /// A single photon in `mode`.
    pub fn single(mode: usize, m: usize) -> Self {
        let mut counts = vec![0; m];
        counts[mode] = 1;
        Self(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn total_photons(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Mode index of every photon, with repetition: `(2,0,1)` gives `[0, 0, 2]`.
    pub fn photon_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &c)| std::iter::repeat_n(mode, c as usize))
            .collect()
    }

    /// Mode-wise sum of two configurations over the same modes.
    pub fn add(&self, other: &ModeOccupation) -> Result<ModeOccupation> {
        if self.0.len() != other.0.len() {
            return Err(Error::ModeMismatch {
                expected: self.0.len(),
                actual: other.0.len(),
            });
        }
        Ok(ModeOccupation(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for ModeOccupation {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl<const M: usize> From<[u32; M]> for ModeOccupation {
    fn from(counts: [u32; M]) -> Self {
        Self(counts.to_vec())
    }
}

impl Ord for ModeOccupation {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .total_photons()
            .cmp(&self.total_photons())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for ModeOccupation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-separated counts, e.g. `1,0,2,1`.
impl fmt::Display for ModeOccupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ModeOccupation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|part| {
                part.trim().parse::<u32>().map_err(|e| {
                    Error::param("configuration", format!("cannot parse `{part}`: {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(ModeOccupation)
    }
}

/// `n` photons in `m` modes, with the ideal input occupying the first `n` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExperimentShape {
    pub n: usize,
    pub m: usize,
}

impl ExperimentShape {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "at least one photon is required"));
        }
        if n > m {
            return Err(Error::param(
                "m",
                format!("mode count {m} is smaller than photon count {n}"),
            ));
        }
        Ok(Self { n, m })
    }

    pub fn ideal_input(&self) -> ModeOccupation {
        ModeOccupation::ideal_input(self.n, self.m)
    }

    /// Checks that the `n`-photon configuration space fits under `limit`.
    pub fn check_guard(&self, limit: u64) -> Result<()> {
        check_configuration_guard(self.n as u32, self.m, limit)
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        match acc.checked_mul(n as u128 - k as u128 + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Number of weak compositions of `n` into `m` parts.
pub fn configuration_count(n: u32, m: usize) -> u128 {
    if m == 0 {
        return u128::from(n == 0);
    }
    binomial(n as u64 + m as u64 - 1, m as u64 - 1)
}

fn check_configuration_guard(n: u32, m: usize, limit: u64) -> Result<()> {
    let count = configuration_count(n, m);
    if count > limit as u128 {
        return Err(Error::SizeLimit {
            what: "configuration space",
            count,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// All configurations of `n` photons in `m` modes, in descending lexicographic
/// order, guarded by `limit`.
pub fn enumerate_configurations(n: u32, m: usize, limit: u64) -> Result<Vec<ModeOccupation>> {
    if m == 0 {
        return Err(Error::param("m", "at least one mode is required"));
    }
    check_configuration_guard(n, m, limit)?;

    let mut out = Vec::with_capacity(configuration_count(n, m) as usize);
    let mut counts = vec![0u32; m];
    counts[0] = n;
    loop {
        out.push(ModeOccupation(counts.clone()));
        // Rightmost non-last position holding photons moves one photon right,
        // and everything to its right collapses into the next slot.
        let Some(i) = (0..m - 1).rev().find(|&i| counts[i] > 0) else {
            break;
        };
        let tail: u32 = counts[i + 1..].iter().sum();
        counts[i] -= 1;
        counts[i + 1..].fill(0);
        counts[i + 1] = tail + 1;
    }
    Ok(out)
}

/// Position of `occ` in `enumerate_configurations(total, m)`.
pub fn configuration_rank(occ: &ModeOccupation) -> u128 {
    let m = occ.mode_count();
    let mut remaining = occ.total_photons();
    let mut rank = 0u128;
    for (i, &c) in occ.counts().iter().enumerate().take(m.saturating_sub(1)) {
        if remaining > c {
            // configurations with a larger count here: weak compositions of at
            // most `remaining - c - 1` photons into the `m - i - 1` modes after i
            let parts = (m - i - 1) as u64;
            rank += binomial((remaining - c - 1) as u64 + parts, parts);
        }
        remaining -= c;
    }
    rank
}

/// Inverse of [`configuration_rank`].
pub fn configuration_unrank(n: u32, m: usize, mut rank: u128) -> Result<ModeOccupation> {
    let total = configuration_count(n, m);
    if m == 0 || rank >= total {
        return Err(Error::param(
            "rank",
            format!("rank {rank} outside 0..{total} for n={n}, m={m}"),
        ));
    }
    let mut counts = vec![0u32; m];
    let mut remaining = n;
    for (i, slot) in counts.iter_mut().enumerate().take(m - 1) {
        let parts = m - i - 1;
        // candidate counts from `remaining` downwards
        let mut c = remaining;
        loop {
            let block = configuration_count(remaining - c, parts);
            if rank < block {
                break;
            }
            rank -= block;
            c -= 1;
        }
        *slot = c;
        remaining -= c;
    }
    counts[m - 1] = remaining;
    Ok(ModeOccupation(counts))
}

/// `∏ count!` over all modes, exact.
pub fn occupancy_factorial_product(occ: &ModeOccupation) -> Result<u128> {
    occ.counts().iter().try_fold(1u128, |acc, &c| {
        if c > MAX_EXACT_FACTORIAL {
            return Err(Error::FactorialOverflow {
                count: c,
                limit: MAX_EXACT_FACTORIAL,
            });
        }
        let f: u128 = (1..=c as u128).product();
        acc.checked_mul(f).ok_or(Error::FactorialOverflow {
            count: c,
            limit: MAX_EXACT_FACTORIAL,
        })
    })
}
