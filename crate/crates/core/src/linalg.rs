//! Dense complex matrix kernel: products, adjoints, tensor products,
//! partial traces, and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Everything here is plain `O(n^3)` arithmetic over row-major storage;
//! the matrices in this crate stay small (≲ 16×16).

use crate::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;

/// Default tolerance for input validation (hermiticity, trace, norms).
pub const VALIDATION_TOL: f64 = 1e-10;
/// Default tolerance for equality verdicts.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Dimension factorization of a composite system ⊗ reservoir space.
///
/// The composite basis index is system-major: `k = i_sys * dim_reservoir + i_res`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionSplit {
    pub dim_system: usize,
    pub dim_reservoir: usize,
}

impl DimensionSplit {
    pub fn new(dim_system: usize, dim_reservoir: usize) -> Result<Self> {
        if dim_system == 0 || dim_reservoir == 0 {
            return Err(Error::InvalidArgument(
                "subsystem dimensions must be positive".into(),
            ));
        }
        Ok(Self {
            dim_system,
            dim_reservoir,
        })
    }

    /// Total composite dimension.
    pub fn composite(&self) -> usize {
        self.dim_system * self.dim_reservoir
    }

    /// The same factorization with the roles of the two factors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            dim_system: self.dim_reservoir,
            dim_reservoir: self.dim_system,
        }
    }
}

/// Which tensor factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Reservoir,
}

/// Dense row-major complex matrix, the universal numeric carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Rejects wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        if let Some(z) = entries.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation(format!("non-finite entry {z}")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Matrix with the given real numbers on the diagonal.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    /// The matrix unit |i⟩⟨j| in dimension `dim`.
    pub fn basis_outer(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.set(i, j, Complex64::new(1.0, 0.0));
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Kronecker product, system-major: `(a ⊗ b)[(i*p+k), (j*q+l)] = a[i,j] b[k,l]`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (p, q) = (other.rows, other.cols);
        ComplexMatrix::from_fn(self.rows * p, self.cols * q, |r, c| {
            self.get(r / p, c / q) * other.get(r % p, c % q)
        })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `√Σ|a−b|²`; zero iff the matrices are equal.
    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    /// Largest entry-wise deviation from hermiticity, `max |m - m†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                max = max.max(d);
            }
        }
        max
    }

    /// True iff `‖u†u − I‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.dagger().matmul(self).expect("square product");
        gram.frobenius_distance(&ComplexMatrix::identity(self.rows))
            .expect("same shape")
            <= tol
    }

    /// Trace out one tensor factor of a composite square matrix.
    ///
    /// `trace_out` names the factor being removed; the reduced matrix of the
    /// remaining factor is returned.
    pub fn partial_trace(&self, split: DimensionSplit, trace_out: Subsystem) -> Result<ComplexMatrix> {
        if !self.is_square() || self.rows != split.composite() {
            return Err(Error::Shape(format!(
                "partial trace needs a {0}x{0} matrix, got {1}x{2}",
                split.composite(),
                self.rows,
                self.cols
            )));
        }
        let (ds, dr) = (split.dim_system, split.dim_reservoir);
        match trace_out {
            Subsystem::Reservoir => Ok(ComplexMatrix::from_fn(ds, ds, |i, j| {
                (0..dr).map(|r| self.get(i * dr + r, j * dr + r)).sum()
            })),
            Subsystem::System => Ok(ComplexMatrix::from_fn(dr, dr, |i, j| {
                (0..ds).map(|s| self.get(s * dr + i, s * dr + j)).sum()
            })),
        }
    }

    /// Conjugation `u · self · u†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<ComplexMatrix> {
        u.matmul(self)?.matmul(&u.dagger())
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// a unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian within `tol` (max entry of `|h − h†|`).
pub fn hermitian_eigen(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "eigensolver needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: max |h - h†| = {defect:.3e} exceeds tolerance {tol:.3e}"
        )));
    }

    let n = h.rows();
    // Work on the symmetrized copy so round-off in the input cannot leak
    // imaginary parts onto the diagonal.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (h.get(i, j) + h.get(j, i).conj()) * Complex64::new(0.5, 0.0)
    });
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..100 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += a.get(p, q).norm_sqr();
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= f64::EPSILON * scale {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / r;
                // tan(2θ) = 2r / (app − aqq); pick the smaller rotation.
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    -1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cs = Complex64::new(c, 0.0);
                let sp = phase * s; // e^{iφ} sinθ

                // Column update: A ← A·J, V ← V·J.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * cs + akq * sp.conj());
                    a.set(k, q, akq * cs - akp * sp);

                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * cs + vkq * sp.conj());
                    v.set(k, q, vkq * cs - vkp * sp);
                }
                // Row update: A ← J†·A.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * cs + aqk * sp);
                    a.set(q, k, aqk * cs - apk * sp.conj());
                }
                // Keep the diagonal exactly real.
                let dp = a.get(p, p).re;
                let dq = a.get(q, q).re;
                a.set(p, p, Complex64::new(dp, 0.0));
                a.set(q, q, Complex64::new(dq, 0.0));
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(HermitianEigen { values, vectors })
}
