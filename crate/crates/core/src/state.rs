//! Validated density matrices and entropy functionals.
//!
//! Validation is mandatory at module boundaries: raw matrices never enter
//! channel or scenario APIs without passing through [`DensityMatrix::validate`].
//! Entropies are reported in nats (k_B = 1).

use crate::linalg::{hermitian_eigen, Complex64, ComplexMatrix, VALIDATION_TOL};
use crate::{Error, Result};

/// Eigenvalues in `(-CLAMP_WINDOW, 0]` are clamped to zero before the
/// `λ ln λ` sum; Jacobi round-off produces tiny negatives on rank-deficient
/// states.
const CLAMP_WINDOW: f64 = 1e-10;

/// A quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    validation_tol: f64,
}

impl DensityMatrix {
    /// Validate a raw matrix as a quantum state, reporting every violated
    /// invariant with its magnitude.
    pub fn validate(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let mut violations = Vec::new();

        let herm = m.hermiticity_defect();
        if herm > tol {
            violations.push(format!("hermiticity defect {herm:.3e}"));
        }

        let tr = m.trace();
        let tr_err = (tr - Complex64::new(1.0, 0.0)).norm();
        if tr_err > tol {
            violations.push(format!("trace {:.12} differs from 1 by {tr_err:.3e}", tr.re));
        }

        // Positivity only makes sense on the Hermitian part; skip if already
        // failed hermiticity beyond repair.
        if herm <= tol {
            let eig = hermitian_eigen(&m, tol.max(VALIDATION_TOL))?;
            let min = eig.values.first().copied().unwrap_or(0.0);
            if min < -tol {
                violations.push(format!("negative eigenvalue {min:.3e}"));
            }
        }

        if violations.is_empty() {
            Ok(Self {
                matrix: m,
                validation_tol: tol,
            })
        } else {
            Err(Error::Validation(violations.join("; ")))
        }
    }

    /// Validate with the default tolerance.
    pub fn validate_default(m: ComplexMatrix) -> Result<Self> {
        Self::validate(m, VALIDATION_TOL)
    }

    /// The pure state |ψ⟩⟨ψ| from a state vector; the vector must be
    /// normalized unless `normalize` is set.
    pub fn pure_state(amplitudes: &[Complex64], normalize: bool) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let norm = norm_sq.sqrt();
        if !normalize && (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "state vector norm {norm:.12} differs from 1"
            )));
        }
        let d = amplitudes.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm_sq
        });
        Self::validate_default(m)
    }

    /// The maximum-entropy state I/d.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let m = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        Self::validate_default(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn validation_tol(&self) -> f64 {
        self.validation_tol
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Spectrum of the state, ascending, negatives within the clamp window
    /// set to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = hermitian_eigen(&self.matrix, self.validation_tol.max(VALIDATION_TOL))?;
        Ok(eig
            .values
            .iter()
            .map(|&v| if v > -CLAMP_WINDOW && v <= 0.0 { 0.0 } else { v })
            .collect())
    }

    /// Von Neumann entropy −Σ λ ln λ in nats, with 0·ln 0 = 0.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let s: f64 = self
            .eigenvalues()?
            .iter()
            .map(|&lam| if lam > 0.0 { -lam * lam.ln() } else { 0.0 })
            .sum();
        Ok(s.max(0.0))
    }

    /// Purity tr(ρ²) ∈ [1/d, 1].
    pub fn purity(&self) -> f64 {
        self.matrix
            .matmul(&self.matrix)
            .expect("square")
            .trace()
            .re
    }
}
