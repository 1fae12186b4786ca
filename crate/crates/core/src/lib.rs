//! Exact simulation of ideal and noisy boson-sampling.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: photon-number configurations, their enumeration and ranking.
//! - [`permanent`]: exact matrix permanents (Ryser with Gray-code ordering,
//!   plus a brute-force reference).
//! - [`interferometer`]: unitaries built from beamsplitters and phase-shifters,
//!   and Haar-random unitaries.
//! - [`distribution`]: amplitudes and exact output distributions for Fock inputs.
//! - [`noise`]: independent per-mode source errors, distinguishability and loss.
//! - [`sampling`]: seeded sampling, noisy Monte-Carlo and post-selection.
//! - [`metrics`] and [`experiments`]: distances between distributions and the
//!   scaling/filtering experiment drivers.
//! - [`report`]: CSV/JSON encodings shared by the command-line tool.

pub mod distribution;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod interferometer;
pub mod limits;
pub mod metrics;
pub mod noise;
pub mod permanent;
pub mod report;
pub mod rng;
pub mod sampling;

pub use num_complex::Complex64;

pub use distribution::{amplitude, output_distribution, OutputDistribution};
pub use error::{Error, Result};
pub use fock::{
    configuration_rank, enumerate_configurations, occupancy_factorial_product, ExperimentShape,
    ModeOccupation,
};
pub use interferometer::{
    compose, element_unitary, haar_random, validate_unitarity, OpticalElement, UnitarityCheck,
    UnitaryMatrix,
};
pub use limits::Limits;
pub use metrics::{bhattacharyya_fidelity, total_variation_distance};
pub use noise::{
    apply_loss, distinguishable_distribution, expand_input_ensemble, ideal_component_probability,
    partial_distinguishability_distribution, InputBranch, NoiseMode, NoiseModel, SourceOutcome,
};
pub use permanent::{build_scattering_submatrix, permanent_naive, permanent_ryser, ComplexMatrix};
pub use rng::RandomSeed;
pub use sampling::{
    postselect, postselected_distribution, sample_exact, sample_noisy, NoisyEnsemble,
    PostSelection, SampleRecord,
};
