//! Linear-optical interferometers.
//!
//! A unitary acts on the column vector of mode amplitudes: a photon entering
//! mode `j` leaves in mode `i` with amplitude `U[i, j]`.
//!
//! Beamsplitter between modes `i` and `j` with angle `theta` and phase `phi`:
//!
//! ```text
//! [ U[i,i]  U[i,j] ]   [  cos(theta)             -e^{i phi} sin(theta) ]
//! [ U[j,i]  U[j,j] ] = [  e^{-i phi} sin(theta)   cos(theta)           ]
//! ```
//!
//! A phase-shifter on mode `i` multiplies that mode by `e^{i phi}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSeed;

/// Tolerance on `max |U^dag U - I|` accepted as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(DMatrix<Complex64>);

impl UnitaryMatrix {
    /// Wraps `matrix` after checking unitarity at [`UNITARITY_TOLERANCE`].
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(matrix, UNITARITY_TOLERANCE)
    }

    pub fn with_tolerance(matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "a unitary must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let check = validate_unitarity(&matrix, tol);
        if !check.passed {
            return Err(Error::NotUnitary {
                deviation: check.max_deviation,
                tolerance: tol,
            });
        }
        Ok(Self(matrix))
    }

    pub fn identity(m: usize) -> Self {
        Self(DMatrix::identity(m, m))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// `self` followed by `next`, i.e. `next * self`.
    pub fn then(&self, next: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if next.modes() != self.modes() {
            return Err(Error::ModeMismatch {
                expected: self.modes(),
                actual: next.modes(),
            });
        }
        Ok(Self(&next.0 * &self.0))
    }

    /// Entry-wise `|U[i,j]|^2`: the single-photon transition probabilities.
    pub fn transition_probabilities(&self) -> DMatrix<f64> {
        self.0.map(|z| z.norm_sqr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OpticalElement {
    #[serde(rename = "bs")]
    Beamsplitter {
        i: usize,
        j: usize,
        theta: f64,
        phi: f64,
    },
    #[serde(rename = "ps")]
    PhaseShifter { i: usize, phi: f64 },
}

impl OpticalElement {
    pub fn beamsplitter(i: usize, j: usize, theta: f64, phi: f64) -> Self {
        Self::Beamsplitter { i, j, theta, phi }
    }

    pub fn phase_shifter(i: usize, phi: f64) -> Self {
        Self::PhaseShifter { i, phi }
    }

    /// The element undoing this one.
    pub fn inverse(&self) -> Self {
        match *self {
            Self::Beamsplitter { i, j, theta, phi } => Self::Beamsplitter {
                i,
                j,
                theta: -theta,
                phi,
            },
            Self::PhaseShifter { i, phi } => Self::PhaseShifter { i, phi: -phi },
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match *self {
            Self::Beamsplitter { i, j, theta, phi } => {
                if i == j {
                    return Err(Error::InvalidElement(format!(
                        "beamsplitter couples mode {i} to itself"
                    )));
                }
                if i >= m || j >= m {
                    return Err(Error::InvalidElement(format!(
                        "beamsplitter modes ({i}, {j}) out of range for {m} modes"
                    )));
                }
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::InvalidElement(
                        "non-finite beamsplitter angle".into(),
                    ));
                }
            }
            Self::PhaseShifter { i, phi } => {
                if i >= m {
                    return Err(Error::InvalidElement(format!(
                        "phase-shifter mode {i} out of range for {m} modes"
                    )));
                }
                if !phi.is_finite() {
                    return Err(Error::InvalidElement("non-finite phase".into()));
                }
            }
        }
        Ok(())
    }

    /// Left-multiplies `u` by this element in place (only the affected rows change).
    fn apply_left(&self, u: &mut DMatrix<Complex64>) {
        match *self {
            Self::Beamsplitter { i, j, theta, phi } => {
                let (c, s) = (theta.cos(), theta.sin());
                let a_ij = -Complex64::from_polar(s, phi);
                let a_ji = Complex64::from_polar(s, -phi);
                for col in 0..u.ncols() {
                    let (x, y) = (u[(i, col)], u[(j, col)]);
                    u[(i, col)] = x * c + a_ij * y;
                    u[(j, col)] = a_ji * x + y * c;
                }
            }
            Self::PhaseShifter { i, phi } => {
                let e = Complex64::from_polar(1.0, phi);
                u.row_mut(i).iter_mut().for_each(|z| *z *= e);
            }
        }
    }
}

/// The `m`-mode unitary of a single element.
pub fn element_unitary(element: &OpticalElement, m: usize) -> Result<UnitaryMatrix> {
    compose(std::slice::from_ref(element), m)
}

/// Product of the element unitaries, first element acting first.
pub fn compose(elements: &[OpticalElement], m: usize) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::param("m", "at least one mode is required"));
    }
    let mut u = DMatrix::identity(m, m);
    for e in elements {
        e.validate(m)?;
        e.apply_left(&mut u);
    }
    UnitaryMatrix::new(u)
}

/// Haar-distributed `m x m` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved onto `Q`'s columns.
pub fn haar_random(m: usize, seed: impl Into<RandomSeed>) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::param("m", "at least one mode is required"));
    }
    let mut rng = seed.into().rng();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // column-major fill, so the draw order is fixed
    let z = DMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    UnitaryMatrix::new(q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Largest entry-wise `|U^dag U - I|`, compared against `tol`.
pub fn validate_unitarity(u: &DMatrix<Complex64>, tol: f64) -> UnitarityCheck {
    if !u.is_square() {
        return UnitarityCheck {
            passed: false,
            max_deviation: f64::INFINITY,
        };
    }
    let gram = u.adjoint() * u;
    let max_deviation = gram
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let diag = idx % gram.nrows() == idx / gram.nrows();
            let target = if diag { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    UnitarityCheck {
        passed: max_deviation <= tol,
        max_deviation,
    }
}
