//! Dense state-vector simulation.
//!
//! States are plain `Vec<Complex64>` wrappers kept at unit ℓ₂ norm. The only
//! transforms the algorithms here need are the Walsh-Hadamard transform
//! (the `log m`-coin uniform splitter used by Deutsch-Jozsa), diagonal
//! ±1 phase oracles, and dense unitaries for the quantum walk.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Tolerance for normalization and unitarity checks.
pub const UNIT_TOL: f64 = 1e-10;

/// A finite-dimensional, ℓ₂-normalized complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Amplitude>,
}

impl StateVector {
    /// Normalizes `raw` to unit length.
    pub fn from_amplitudes(raw: Vec<Amplitude>) -> Result<Self> {
        if let Some(i) = raw
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let norm = l2_norm(&raw);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: raw.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(raw: &[f64]) -> Result<Self> {
        Self::from_amplitudes(raw.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `|amplitude_index|²`.
    pub fn basis_probability(&self, index: usize) -> Result<f64> {
        self.amplitudes
            .get(index)
            .map(|a| a.norm_sqr())
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
    }

    /// Flips the sign of every amplitude whose bit is set.
    pub fn apply_phase_oracle(&self, bits: &[bool]) -> Result<Self> {
        self.check_dim(bits.len())?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(bits)
            .map(|(&a, &b)| if b { -a } else { a })
            .collect();
        Ok(Self { amplitudes })
    }

    /// Applies the uniform transform (tensor power of the 2×2 Hadamard)
    /// in `O(m log m)` without materializing the matrix.
    pub fn apply_uniform_transform(&self) -> Result<Self> {
        let mut amplitudes = self.amplitudes.clone();
        walsh_hadamard(&mut amplitudes)?;
        Ok(Self { amplitudes })
    }

    pub fn apply(&self, u: &UnitaryMatrix) -> Result<Self> {
        self.check_dim(u.dim())?;
        let amplitudes = (0..u.dim())
            .map(|r| {
                u.matrix
                    .row(r)
                    .iter()
                    .zip(&self.amplitudes)
                    .map(|(m, a)| m * a)
                    .sum()
            })
            .collect();
        Ok(Self { amplitudes })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Amplitude> {
        self.check_dim(other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `‖self − other‖₂`; literal vector distance, no global-phase quotient.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual,
            });
        }
        Ok(())
    }
}

/// A square complex matrix verified unitary within [`UNIT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNIT_TOL {
            return Err(Error::Numerical(format!(
                "matrix is not unitary (max |UU† − I| = {dev:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Dense `m × m` uniform transform `H^{⊗ log m}`. Maps `e₀` to the
    /// uniform superposition and is its own inverse.
    pub fn uniform_transform(m: usize) -> Result<Self> {
        check_power_of_two(m)?;
        let scale = 1.0 / (m as f64).sqrt();
        let matrix = DMatrix::from_fn(m, m, |r, c| {
            let sign = if (r & c).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            Complex64::new(sign * scale, 0.0)
        });
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rhs.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let prod = m * m.adjoint();
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((prod[(r, c)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub(crate) fn check_power_of_two(m: usize) -> Result<()> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::BadDimension(m));
    }
    Ok(())
}

fn l2_norm(v: &[Amplitude]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// In-place normalized Walsh-Hadamard transform. The input need not be a
/// unit vector; the composition simulator feeds it partial amplitudes.
pub(crate) fn walsh_hadamard(v: &mut [Amplitude]) -> Result<()> {
    let m = v.len();
    check_power_of_two(m)?;
    let mut h = 1;
    while h < m {
        for block in (0..m).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (m as f64).sqrt();
    v.iter_mut().for_each(|a| *a *= scale);
    Ok(())
}
