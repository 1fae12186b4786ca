//! File formats.
//!
//! - Matrices: JSON array of rows, each entry a `[re, im]` pair.
//! - Distributions: CSV `configuration,probability,amplitude_re,amplitude_im`,
//!   rows in enumeration order, amplitude columns empty for mixed states.
//! - Samples: CSV `trial,outcome,total,branch_ideal`.
//! - Scaling and filter tables: CSV with a header, one row per photon number.
//!
//! Configurations are written as `1,0,2,1` (quoted inside CSV). Floats use
//! the shortest representation that parses back to the same value, so equal
//! inputs give byte-identical files.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::distribution::OutputDistribution;
use crate::error::{Error, Result};
use crate::experiments::{FilterRow, ScalingRow};
use crate::interferometer::UnitaryMatrix;
use crate::limits::Limits;
use crate::noise::NoiseModel;
use crate::permanent::ComplexMatrix;
use crate::sampling::SampleRecord;

pub const TOOL_NAME: &str = "bosim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parses a JSON array of rows of `[re, im]` pairs into a square matrix.
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    let rows: Vec<Vec<Complex64>> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn matrix_to_json(m: &DMatrix<Complex64>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_pair(m[(i, j)])).collect())
        .collect();
    serde_json::json!(rows)
}

pub fn unitary_to_json(u: &UnitaryMatrix) -> serde_json::Value {
    matrix_to_json(u.as_matrix())
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn float(x: f64) -> String {
    format!("{x}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory CSV writer cannot fail");
    String::from_utf8(bytes).expect("CSV output is UTF-8")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn distribution_csv(dist: &OutputDistribution) -> String {
    let mut w = writer();
    w.write_record([
        "configuration",
        "probability",
        "amplitude_re",
        "amplitude_im",
    ])
    .expect("in-memory write");
    for (occ, p) in dist.iter() {
        let (re, im) = match dist.amplitude(occ) {
            Some(a) => (float(a.re), float(a.im)),
            None => (String::new(), String::new()),
        };
        w.write_record([occ.to_string(), float(p), re, im])
            .expect("in-memory write");
    }
    finish(w)
}

pub fn samples_csv(records: &[SampleRecord]) -> String {
    let mut w = writer();
    w.write_record(["trial", "outcome", "total", "branch_ideal"])
        .expect("in-memory write");
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.outcome.to_string(),
            r.total().to_string(),
            r.branch.is_ideal().to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut w = writer();
    w.write_record([
        "n",
        "m",
        "p",
        "ideal_probability",
        "empirical_ideal_fraction",
        "tvd_ideal_noisy",
        "tvd_ideal_postselected",
        "postselection_success",
        "exact",
    ])
    .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            float(r.p),
            float(r.ideal_probability),
            float(r.empirical_ideal_fraction),
            opt_float(r.tvd_ideal_noisy),
            opt_float(r.tvd_ideal_postselected),
            opt_float(r.postselection_success),
            r.exact.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn filter_csv(rows: &[FilterRow]) -> String {
    let mut w = writer();
    w.write_record([
        "n",
        "m",
        "analytic_success",
        "empirical_success",
        "standard_error",
    ])
    .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            float(r.analytic_success),
            float(r.empirical_success),
            float(r.standard_error),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Provenance recorded next to every result table.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseModel>,
    pub limits: Limits,
}

impl RunMetadata {
    pub fn new(seed: u64, limits: Limits) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            seed,
            mode_rule: None,
            noise: None,
            limits,
        }
    }
}
