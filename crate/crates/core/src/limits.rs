use serde::{Deserialize, Serialize};

/// Default cap on the number of configurations enumerated for one photon total.
pub const DEFAULT_MAX_CONFIGURATIONS: u64 = 2_000_000;

/// Default cap on the number of classical input branches expanded from a noise model.
pub const DEFAULT_MAX_BRANCHES: u64 = 100_000;

/// Size guards and the deterministic work partition used by the heavy operations.
///
/// `partitions` splits Ryser's subset sum and the Monte-Carlo trial range.
/// Results are reproducible for a fixed partition count; it is never derived
/// from the detected hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub max_configurations: u64,
    pub max_branches: u64,
    pub partitions: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_configurations: DEFAULT_MAX_CONFIGURATIONS,
            max_branches: DEFAULT_MAX_BRANCHES,
            partitions: 1,
        }
    }
}

impl Limits {
    pub fn with_partitions(mut self, partitions: usize) -> Self {
        self.partitions = partitions.max(1);
        self
    }
}
