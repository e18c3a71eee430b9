//! Dense complex matrices sized for few-qubit work.
//!
//! Everything in this crate lives in dimension 2, 4, 8, or 16: density
//! operators, chi/transfer/Choi representations, and full-register circuit
//! unitaries. At those sizes a cyclic Jacobi eigensolver and an
//! eigendecomposition-based pseudo-inverse are accurate, dependency-free,
//! and fast enough that nothing else is worth linking.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use thiserror::Error;

pub type Complex64 = num_complex::Complex<f64>;

/// Maximum allowed deviation from `m == m.adjoint()` before an input is
/// rejected as non-Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

const JACOBI_EPS: f64 = 1e-15;
const MAX_JACOBI_SWEEPS: usize = 64;

#[derive(Debug, Error)]
pub enum QmathError {
    #[error("matrix is not Hermitian (max |m - m†| entry = {0:.3e})")]
    NonHermitianInput(f64),
}

/// Square complex matrix in row-major storage.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row slices. Panics if the rows are not square.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut m = ComplexMatrix::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has wrong length");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Diagonal matrix with real entries.
    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Hermitian matrix built from (possibly slightly asymmetric) data by
    /// averaging `m` with its adjoint. The result satisfies `out == out†`
    /// bitwise: the diagonal is forced real and the lower triangle is the
    /// exact conjugate of the upper one.
    pub fn hermitian_from(m: &ComplexMatrix) -> Self {
        let n = m.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> ComplexMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch in mul_vec");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self.entries[i * n + j] * v[j];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (a, b) = (self.dim, other.dim);
        let mut out = ComplexMatrix::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let factor = self[(i, j)];
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = factor * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus of `self - self†`; zero for Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            dev = dev.max(self[(i, i)].im.abs());
            for j in (i + 1)..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    fn offdiagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    sum += self[(i, j)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back sorted ascending with the eigenvector columns
    /// permuted to match. Inputs further than [`HERMITICITY_TOL`] from their
    /// own adjoint are rejected.
    pub fn hermitian_eigen(&self) -> Result<EigenDecomposition, QmathError> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(QmathError::NonHermitianInput(dev));
        }
        let n = self.dim;
        let mut a = ComplexMatrix::hermitian_from(self);
        let mut v = ComplexMatrix::identity(n);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

        for _ in 0..MAX_JACOBI_SWEEPS {
            if a.offdiagonal_norm() <= JACOBI_EPS * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r == 0.0 {
                        continue;
                    }
                    let phase = apq / r;
                    let theta = 0.5 * (2.0 * r).atan2(a[(p, p)].re - a[(q, q)].re);
                    let (c, s) = (theta.cos(), theta.sin());

                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * phase.conj() * s;
                        a[(k, q)] = akq * c - akp * phase * s;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c + aqk * phase * s;
                        a[(q, k)] = aqk * c - apk * phase.conj() * s;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * phase.conj() * s;
                        v[(k, q)] = vkq * c - vkp * phase * s;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = ComplexMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new_col)] = v[(k, old_col)];
            }
        }
        Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors: vectors,
        })
    }

    /// Singular values sorted ascending, via the eigenvalues of `m† m`.
    pub fn singular_values(&self) -> Vec<f64> {
        let h = ComplexMatrix::hermitian_from(&self.adjoint().matmul(self));
        let eig = h
            .hermitian_eigen()
            .expect("m†m is Hermitian by construction");
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect()
    }

    /// Moore-Penrose pseudo-inverse. Singular values at or below
    /// `cutoff * sigma_max` are treated as exact zeros.
    ///
    /// Right singular vectors come from `m† m`, but each sigma is taken as
    /// ‖m v_i‖ rather than from the squared spectrum: squaring halves the
    /// precision, and a kernel direction whose squared eigenvalue rounds to
    /// ~1e-16 would otherwise slip past the cutoff as a spurious 1e-8.
    pub fn pseudo_inverse(&self, cutoff: f64) -> ComplexMatrix {
        let n = self.dim;
        let h = ComplexMatrix::hermitian_from(&self.adjoint().matmul(self));
        let eig = h
            .hermitian_eigen()
            .expect("m†m is Hermitian by construction");
        let images: Vec<Vec<Complex64>> =
            (0..n).map(|i| self.mul_vec(&eig.eigenvectors.column(i))).collect();
        let sigmas: Vec<f64> = images
            .iter()
            .map(|mv| mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let sigma_max = sigmas.iter().cloned().fold(0.0, f64::max);
        let mut out = ComplexMatrix::zeros(n);
        if sigma_max == 0.0 {
            return out;
        }
        for i in 0..n {
            if sigmas[i] <= cutoff * sigma_max {
                continue;
            }
            // pinv = sum_i v_i (m v_i)† / sigma_i^2  for the kept directions
            let vi = eig.eigenvectors.column(i);
            let inv = 1.0 / (sigmas[i] * sigmas[i]);
            for r in 0..n {
                for c in 0..n {
                    out.entries[r * n + c] += vi[r] * images[i][c].conj() * inv;
                }
            }
        }
        out
    }

    /// Trace norm (sum of singular values). Hermitian inputs take the exact
    /// route through their own eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        if self.is_hermitian(HERMITICITY_TOL) {
            let eig = self
                .hermitian_eigen()
                .expect("hermiticity checked just above");
            return eig.eigenvalues.iter().map(|l| l.abs()).sum();
        }
        self.singular_values().iter().sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self[(i, j)];
                write!(f, "{:>+10.6}{:>+10.6}i ", e.re, e.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of [`ComplexMatrix::hermitian_eigen`]: ascending eigenvalues and a
/// unitary whose column `i` is the eigenvector for `eigenvalues[i]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Pauli operator sigma_k for k in 0..4 (identity, X, Y, Z).
pub fn pauli(k: usize) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => ComplexMatrix::from_rows(&[&[one, z], &[z, one]]),
        1 => ComplexMatrix::from_rows(&[&[z, one], &[one, z]]),
        2 => ComplexMatrix::from_rows(&[&[z, -i], &[i, z]]),
        3 => ComplexMatrix::from_rows(&[&[one, z], &[z, -one]]),
        _ => panic!("Pauli index out of range: {k}"),
    }
}

/// Matrix unit G_k for k in 0..4: |0><0|, |0><1|, |1><0|, |1><1|.
pub fn matrix_unit(k: usize) -> ComplexMatrix {
    assert!(k < 4, "matrix unit index out of range: {k}");
    let mut m = ComplexMatrix::zeros(2);
    m[(k / 2, k % 2)] = Complex64::new(1.0, 0.0);
    m
}
