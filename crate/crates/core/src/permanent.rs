//! Exact matrix permanents.
//!
//! [`permanent_ryser`] is the production kernel: Ryser's inclusion-exclusion
//! formula with subsets visited in Gray-code order, so that each step changes a
//! single column and the `k` row sums are updated in `O(k)`. The subset range
//! can be split into a fixed number of contiguous partitions evaluated in
//! parallel; partial sums are combined in partition order, so the result only
//! depends on the partition count.
//!
//! [`permanent_naive`] sums over all `k!` permutations and serves as the
//! reference for tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::ModeOccupation;
use crate::interferometer::UnitaryMatrix;

pub const NAIVE_MAX_DIM: usize = 9;
pub const RYSER_MAX_DIM: usize = 30;

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidMatrix(format!(
                "expected a square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if let Some((idx, z)) = matrix
            .iter()
            .enumerate()
            .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
        {
            let (r, c) = (idx % matrix.nrows(), idx / matrix.nrows());
            return Err(Error::InvalidMatrix(format!(
                "entry ({r}, {c}) = {z} is not finite"
            )));
        }
        Ok(Self(matrix))
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let k = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        Self::new(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(k: usize) -> Self {
        Self(DMatrix::identity(k, k))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.map(|z| z * c))
    }
}

/// Sum over all permutations of the product of selected entries.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    let k = a.dim();
    if k > NAIVE_MAX_DIM {
        return Err(Error::DimensionLimit {
            algorithm: "naive permanent",
            dim: k,
            limit: NAIVE_MAX_DIM,
        });
    }
    let m = a.as_matrix();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let term = |perm: &[usize]| {
        perm.iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (i, &j)| acc * m[(i, j)])
    };
    total += term(&perm);

    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// Ryser's formula with Gray-code subset order, single partition.
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<Complex64> {
    permanent_ryser_partitioned(a, 1)
}

/// Ryser's formula with the subset range split into `partitions` contiguous
/// chunks evaluated in parallel.
pub fn permanent_ryser_partitioned(a: &ComplexMatrix, partitions: usize) -> Result<Complex64> {
    let k = a.dim();
    if k > RYSER_MAX_DIM {
        return Err(Error::DimensionLimit {
            algorithm: "Ryser permanent",
            dim: k,
            limit: RYSER_MAX_DIM,
        });
    }
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let m = a.as_matrix();
    // Non-empty subsets are Gray codes of 1..2^k; the empty subset contributes 0.
    let end: u64 = 1 << k;
    let count = end - 1;
    let parts = (partitions.max(1) as u64).min(count);
    let bounds: Vec<(u64, u64)> = (0..parts)
        .map(|p| (1 + count * p / parts, 1 + count * (p + 1) / parts))
        .collect();

    let partials: Vec<Complex64> = if parts == 1 {
        vec![ryser_chunk(m, bounds[0].0, bounds[0].1)]
    } else {
        bounds
            .par_iter()
            .map(|&(lo, hi)| ryser_chunk(m, lo, hi))
            .collect()
    };

    let mut acc = KahanSum::default();
    for p in partials {
        acc.add(p);
    }
    let total = acc.value();
    Ok(if k.is_multiple_of(2) { total } else { -total })
}

/// Signed Ryser terms for Gray-code indices `lo..hi`.
fn ryser_chunk(m: &DMatrix<Complex64>, lo: u64, hi: u64) -> Complex64 {
    let k = m.nrows();
    let gray = |g: u64| g ^ (g >> 1);

    let mut row_sums = vec![Complex64::new(0.0, 0.0); k];
    let start = gray(lo);
    for j in (0..k).filter(|&j| start >> j & 1 == 1) {
        for (s, x) in row_sums.iter_mut().zip(m.column(j).iter()) {
            *s += *x;
        }
    }

    let mut acc = KahanSum::default();
    let mut subset = start;
    for g in lo..hi {
        if g > lo {
            let j = g.trailing_zeros() as usize;
            subset ^= 1 << j;
            let col = m.column(j);
            if subset >> j & 1 == 1 {
                row_sums
                    .iter_mut()
                    .zip(col.iter())
                    .for_each(|(s, x)| *s += *x);
            } else {
                row_sums
                    .iter_mut()
                    .zip(col.iter())
                    .for_each(|(s, x)| *s -= *x);
            }
        }
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |p, s| p * s);
        if subset.count_ones() % 2 == 0 {
            acc.add(prod);
        } else {
            acc.add(-prod);
        }
    }
    acc.value()
}

/// Compensated summation, applied to real and imaginary parts independently.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    fn add(&mut self, x: Complex64) {
        let (re, cre) = kahan_step(self.sum.re, self.comp.re, x.re);
        let (im, cim) = kahan_step(self.sum.im, self.comp.im, x.im);
        self.sum = Complex64::new(re, im);
        self.comp = Complex64::new(cre, cim);
    }

    fn value(&self) -> Complex64 {
        self.sum
    }
}

fn kahan_step(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let y = x - comp;
    let t = sum + y;
    (t, (t - sum) - y)
}

/// Matrix whose row `r` comes from mode `output.photon_modes()[r]` and column
/// `c` from mode `input.photon_modes()[c]`.
pub fn build_scattering_submatrix(
    u: &UnitaryMatrix,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<ComplexMatrix> {
    submatrix_with_repetition(u.as_matrix(), input, output)
}

pub(crate) fn submatrix_with_repetition(
    u: &DMatrix<Complex64>,
    input: &ModeOccupation,
    output: &ModeOccupation,
) -> Result<ComplexMatrix> {
    let (n_in, n_out) = (input.total_photons(), output.total_photons());
    if n_in != n_out {
        return Err(Error::PhotonMismatch {
            input: n_in,
            output: n_out,
        });
    }
    for occ in [input, output] {
        if occ.mode_count() != u.nrows() {
            return Err(Error::ModeMismatch {
                expected: u.nrows(),
                actual: occ.mode_count(),
            });
        }
    }
    let cols = input.photon_modes();
    let rows = output.photon_modes();
    Ok(ComplexMatrix(DMatrix::from_fn(
        rows.len(),
        cols.len(),
        |r, c| u[(rows[r], cols[c])],
    )))
}
