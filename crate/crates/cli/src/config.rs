//! Run configuration files.
//!
//! ```json
//! {
//!   "n": 2, "m": 4,
//!   "haar_seed": 7,
//!   "noise": { "p": 0.9, "p0": 0.5, "p2": 0.5 },
//!   "trials": 10000, "seed": 1
//! }
//! ```
//!
//! The circuit is given either as `circuit` (a list of elements) or as
//! `haar_seed`. `scaling` and `filter` hold the experiment parameters for
//! the subcommands of the same name.

use std::path::Path;

use bosim::experiments::{FilterConfig, ScalingConfig};
use bosim::{
    compose, haar_random, ExperimentShape, Limits, ModeOccupation, NoiseModel, OpticalElement,
    RandomSeed, UnitaryMatrix,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub m: Option<usize>,
    /// Explicit input occupation; defaults to one photon in each of the first `n` modes.
    pub input: Option<Vec<u32>>,
    pub circuit: Option<Vec<OpticalElement>>,
    pub haar_seed: Option<u64>,
    #[serde(default)]
    pub noise: NoiseModel,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub scaling: Option<ScalingConfig>,
    pub filter: Option<FilterConfig>,
    #[serde(default)]
    pub limits: Limits,
}

const DEFAULT_TRIALS: u64 = 10_000;

/// A circuit problem after validation: shape, input and interferometer.
pub struct Problem {
    pub shape: ExperimentShape,
    pub input: ModeOccupation,
    pub unitary: UnitaryMatrix,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config JSON: {e}")))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    fn shape(&self) -> Result<ExperimentShape, CliError> {
        let n = self.n.ok_or_else(|| missing("n"))?;
        let m = self.m.ok_or_else(|| missing("m"))?;
        Ok(ExperimentShape::new(n, m)?)
    }

    /// Checks the circuit fields and every size guard, then builds the unitary.
    pub fn problem(&self) -> Result<Problem, CliError> {
        let shape = self.shape()?;
        let input = match &self.input {
            None => shape.ideal_input(),
            Some(counts) => {
                let occ = ModeOccupation::new(counts.clone());
                if occ.mode_count() != shape.m {
                    return Err(field(
                        "input",
                        format!("has {} modes, expected m = {}", occ.mode_count(), shape.m),
                    ));
                }
                if occ.total_photons() as usize != shape.n {
                    return Err(field(
                        "input",
                        format!(
                            "holds {} photons, expected n = {}",
                            occ.total_photons(),
                            shape.n
                        ),
                    ));
                }
                occ
            }
        };
        shape.check_guard(self.limits.max_configurations)?;
        let unitary = match (&self.circuit, self.haar_seed) {
            (Some(_), Some(_)) => {
                return Err(field(
                    "circuit",
                    "give either circuit or haar_seed, not both",
                ))
            }
            (None, None) => {
                return Err(field("circuit", "one of circuit or haar_seed is required"))
            }
            (Some(elements), None) => {
                for (k, e) in elements.iter().enumerate() {
                    e.validate(shape.m)
                        .map_err(|err| field(&format!("circuit[{k}]"), err.to_string()))?;
                }
                compose(elements, shape.m)?
            }
            (None, Some(seed)) => haar_random(shape.m, RandomSeed::new(seed))?,
        };
        Ok(Problem {
            shape,
            input,
            unitary,
        })
    }

    /// Sampling runs the noisy device, whose sources feed the first `n` modes.
    pub fn sampling_problem(&self) -> Result<Problem, CliError> {
        let problem = self.problem()?;
        if problem.input != problem.shape.ideal_input() {
            return Err(field(
                "input",
                "sampling always uses the first n modes as inputs",
            ));
        }
        self.noise.validate(problem.shape.n)?;
        if self.trials() == 0 {
            return Err(field("trials", "must be at least 1"));
        }
        Ok(problem)
    }

    pub fn scaling(&self, seed: Option<u64>) -> Result<ScalingConfig, CliError> {
        let mut config = self
            .scaling
            .clone()
            .unwrap_or_else(|| ScalingConfig::default_run(self.seed()));
        if let Some(seed) = seed {
            config.seed = seed;
        }
        config.validate()?;
        if config.trials == 0 {
            return Err(field("scaling.trials", "must be at least 1"));
        }
        Ok(config)
    }

    pub fn filter(&self, seed: Option<u64>) -> Result<FilterConfig, CliError> {
        let mut config = self.filter.clone().ok_or_else(|| missing("filter"))?;
        if let Some(seed) = seed {
            config.seed = seed;
        }
        config.validate()?;
        if config.trials == 0 {
            return Err(field("filter.trials", "must be at least 1"));
        }
        Ok(config)
    }
}

fn missing(name: &str) -> CliError {
    CliError::Config(format!("missing field `{name}`"))
}

fn field(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid `{name}`: {reason}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_one_circuit_source() {
        let both = RunConfig::parse(r#"{"n":1,"m":2,"circuit":[],"haar_seed":1}"#).unwrap();
        assert!(matches!(both.problem(), Err(CliError::Config(_))));
        let neither = RunConfig::parse(r#"{"n":1,"m":2}"#).unwrap();
        assert!(matches!(neither.problem(), Err(CliError::Config(_))));
        let haar = RunConfig::parse(r#"{"n":1,"m":2,"haar_seed":1}"#).unwrap();
        assert_eq!(haar.problem().unwrap().unitary.modes(), 2);
    }

    #[test]
    fn rejects_bad_fields_before_running() {
        let bad_index = RunConfig::parse(
            r#"{"n":1,"m":2,"circuit":[{"kind":"bs","i":0,"j":5,"theta":0.1,"phi":0}]}"#,
        )
        .unwrap();
        let err = bad_index.problem().err().unwrap();
        assert!(err.to_string().contains("circuit[0]"), "{err}");

        let bad_input = RunConfig::parse(r#"{"n":2,"m":2,"input":[2,1],"haar_seed":0}"#).unwrap();
        assert!(bad_input
            .problem()
            .err()
            .unwrap()
            .to_string()
            .contains("input"));

        let too_big = RunConfig::parse(r#"{"n":12,"m":30,"haar_seed":0}"#).unwrap();
        assert!(matches!(too_big.problem(), Err(CliError::Guard(_))));

        assert!(matches!(
            RunConfig::parse(r#"{"n":2,"mm":3}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn seed_flag_overrides_scaling_seed() {
        let config = RunConfig::parse(r#"{"seed":3}"#).unwrap();
        assert_eq!(config.scaling(None).unwrap().seed, 3);
        assert_eq!(config.scaling(Some(9)).unwrap().seed, 9);
        assert!(matches!(config.filter(None), Err(CliError::Config(_))));
    }
}
