//! Spectral cross-checks that do not share code with the library's own
//! eigensolver: characteristic polynomials by the Faddeev-LeVerrier
//! recursion, roots by Durand-Kerner iteration, and power-sum matching.

#![allow(dead_code)]

use channel_mixer::qmath::{Complex64, ComplexMatrix};

/// Coefficients of det(xI - M), lowest degree first, leading term 1.
pub fn char_poly_coeffs(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut aux = ComplexMatrix::identity(n);
    for k in 1..=n {
        let prod = m.matmul(&aux);
        let c = -prod.trace() / k as f64;
        coeffs[n - k] = c;
        aux = &prod + &ComplexMatrix::identity(n).scale(c);
    }
    coeffs
}

pub fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// All complex roots at once. Accuracy degrades near repeated roots, as
/// any polynomial method's must; use `power_sums_match` for degenerate
/// spectra and this for well-separated ones.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let prev = roots.clone();
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= prev[i] - prev[j];
                }
            }
            roots[i] = prev[i] - eval_poly(&monic, prev[i]) / denom;
            shift = shift.max((roots[i] - prev[i]).norm());
        }
        if shift < 1e-14 {
            break;
        }
    }
    roots
}

/// Real spectrum of a Hermitian matrix by the polynomial route, sorted
/// ascending.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = poly_roots(&char_poly_coeffs(m)).iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// The multiset of eigenvalues of an n-by-n matrix is pinned down by the
/// traces of its first n powers; comparing those is immune to root
/// multiplicity. Returns the worst absolute mismatch.
pub fn power_sum_mismatch(m: &ComplexMatrix, eigenvalues: &[f64]) -> f64 {
    let mut power = ComplexMatrix::identity(m.dim());
    let mut worst = 0.0f64;
    for k in 1..=m.dim() as i32 {
        power = power.matmul(m);
        let from_matrix = power.trace();
        let from_spectrum: f64 = eigenvalues.iter().map(|l| l.powi(k)).sum();
        worst = worst.max((from_matrix - Complex64::new(from_spectrum, 0.0)).norm());
    }
    worst
}

/// Worst |p(lambda_i)| over the claimed eigenvalues, with p the
/// independently computed characteristic polynomial.
pub fn char_poly_residual(m: &ComplexMatrix, eigenvalues: &[f64]) -> f64 {
    let coeffs = char_poly_coeffs(m);
    eigenvalues
        .iter()
        .map(|&l| eval_poly(&coeffs, Complex64::new(l, 0.0)).norm())
        .fold(0.0f64, f64::max)
}

/// Splitmix-style generator for reproducible test matrices without pulling
/// the library's own sampling into the oracle.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn hermitian(&mut self, dim: usize) -> ComplexMatrix {
        let mut raw = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                raw[(i, j)] = Complex64::new(self.next_f64() - 0.5, self.next_f64() - 0.5);
            }
        }
        ComplexMatrix::hermitian_from(&raw)
    }
}
