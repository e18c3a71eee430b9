//! Divisibility analysis of one-qubit channels.
//!
//! A channel is represented three ways, all linearly interconvertible: its
//! process matrix chi (Pauli basis), its transfer matrix F (matrix-unit
//! basis, acting on row-major flattened density matrices), and its Choi
//! matrix W (trace-1 normalisation). The intermediate map between times s
//! and t is F(t) pinv(F(s)); the channel is Markovian precisely when every
//! such step has a positive semidefinite Choi matrix. Tensor ordering in
//! the Choi construction is fixed by the identity channel: F = I must map
//! to the maximally entangled projector, which W = (1/2) sum F_ab G_b (x) G_a
//! satisfies.

use std::fmt;

use thiserror::Error;

use crate::channels::{ChannelError, ChannelFamily};
use crate::qmath::{matrix_unit, pauli, Complex64, ComplexMatrix, QmathError};

pub type ChiMatrix = ComplexMatrix;
pub type TransferMatrix = ComplexMatrix;
pub type ChoiMatrix = ComplexMatrix;

/// Eigenvalues of nominally positive semidefinite inputs may dip this far
/// below zero before being treated as an error rather than roundoff.
pub const PSD_FLOOR: f64 = -1e-9;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// A Choi eigenvalue below `-eps_class` marks the step as not CP.
    pub eps_class: f64,
    /// A Choi trace norm further than this from 1 marks a TP violation.
    pub eps_tp: f64,
    /// Relative singular-value cutoff for inverting reference transfers.
    pub pinv_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps_class: 1e-6, eps_tp: 1e-6, pinv_cutoff: 1e-10 }
    }
}

#[derive(Debug, Error)]
pub enum DivisibilityError {
    #[error("matrix has eigenvalue {0:.3e} below the positivity floor")]
    NonPositiveInput(f64),
    #[error("matrix trace {0:.3e} is too small to normalise by")]
    VanishingTrace(f64),
    #[error("grid time {t} precedes the reference time {s}")]
    GridBeforeReference { t: f64, s: f64 },
    #[error(transparent)]
    Math(#[from] QmathError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Action of the process matrix on a state: sum_mn chi_mn sigma_m rho sigma_n.
pub fn apply_chi(chi: &ChiMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2);
    for m in 0..4 {
        for n in 0..4 {
            let c = chi[(m, n)];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let term = pauli(m).matmul(rho).matmul(&pauli(n));
            for i in 0..2 {
                for j in 0..2 {
                    out[(i, j)] += c * term[(i, j)];
                }
            }
        }
    }
    out
}

/// Transfer matrix in the matrix-unit basis: F_ab = Tr[G_a^dag Lambda(G_b)].
/// F acts on the row-major flattening of a density matrix.
pub fn transfer_from_chi(chi: &ChiMatrix) -> TransferMatrix {
    let mut f = ComplexMatrix::zeros(4);
    for b in 0..4 {
        let image = apply_chi(chi, &matrix_unit(b));
        for a in 0..4 {
            f[(a, b)] = matrix_unit(a).adjoint().matmul(&image).trace();
        }
    }
    f
}

/// Choi matrix W = (1/2) sum_ab F_ab G_b (x) G_a. Trace-1 for TP maps.
pub fn choi_from_transfer(f: &TransferMatrix) -> ChoiMatrix {
    let mut w = ComplexMatrix::zeros(4);
    for a in 0..4 {
        let (k, l) = (a >> 1, a & 1);
        for b in 0..4 {
            let (i, j) = (b >> 1, b & 1);
            w[(2 * i + k, 2 * j + l)] = f[(a, b)] * 0.5;
        }
    }
    w
}

/// Maximally entangled two-qubit state (|00> + |11>)/sqrt(2).
pub fn bell_state() -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![h, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), h]
}

/// Recovers chi from a transfer matrix by sandwiching the Choi matrix
/// between the orthonormal vectors (I (x) sigma_m)|bell>. Exact inverse of
/// [`transfer_from_chi`] up to roundoff; output is bitwise Hermitian.
pub fn chi_from_transfer(f: &TransferMatrix) -> ChiMatrix {
    let w = choi_from_transfer(f);
    let bell = bell_state();
    let mut basis = Vec::with_capacity(4);
    for m in 0..4 {
        let sigma = pauli(m);
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        for a in 0..2 {
            for c in 0..2 {
                for b in 0..2 {
                    v[2 * a + c] += sigma[(c, b)] * bell[2 * a + b];
                }
            }
        }
        basis.push(v);
    }
    let mut chi = ComplexMatrix::zeros(4);
    for m in 0..4 {
        let wv: Vec<Vec<Complex64>> = basis.iter().map(|v| w.mul_vec(v)).collect();
        for n in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                acc += basis[m][i].conj() * wv[n][i];
            }
            chi[(m, n)] = acc;
        }
    }
    ComplexMatrix::hermitian_from(&chi)
}

/// Intermediate-map transfer F(t) pinv(F(s)). The flag is true when the
/// reference transfer is rank-deficient at the cutoff, in which case the
/// product is a pseudo-inverse artifact rather than a genuine map.
pub fn intermediate_transfer(
    f_t: &TransferMatrix,
    f_s: &TransferMatrix,
    cutoff: f64,
) -> (TransferMatrix, bool) {
    let svals = f_s.singular_values();
    let largest = svals.iter().cloned().fold(0.0f64, f64::max);
    let singular = largest <= 0.0 || svals.iter().any(|&s| s <= cutoff * largest);
    (f_t.matmul(&f_s.pseudo_inverse(cutoff)), singular)
}

/// Largest violation of trace preservation read off the transfer matrix:
/// Tr[Lambda(G_b)] must be 1 for b in {1, 4} and 0 otherwise.
pub fn tp_deviation(f: &TransferMatrix) -> f64 {
    let mut worst = 0.0f64;
    for b in 0..4 {
        let expected = if b == 0 || b == 3 { 1.0 } else { 0.0 };
        let sum = f[(0, b)] + f[(3, b)];
        worst = worst.max((sum - Complex64::new(expected, 0.0)).norm());
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The step map is CP within tolerance.
    CpStep,
    /// The step map fails complete positivity or trace preservation.
    NotCp,
    /// The reference transfer was rank-deficient; no verdict possible.
    Singular,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CpStep => "cp",
            Verdict::NotCp => "not-cp",
            Verdict::Singular => "singular",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CpCheck {
    pub min_eig: f64,
    pub trace_norm: f64,
    pub verdict: Verdict,
}

/// Classifies a Choi matrix: CP requires all eigenvalues above `-eps_class`
/// and TP pins the trace norm to 1 within `eps_tp`.
pub fn cp_verdict(w: &ChoiMatrix, eps_class: f64, eps_tp: f64) -> Result<CpCheck, DivisibilityError> {
    let eig = w.hermitian_eigen()?;
    let min_eig = eig.min_eigenvalue();
    let trace_norm: f64 = eig.eigenvalues.iter().map(|e| e.abs()).sum();
    let verdict = if min_eig < -eps_class || (trace_norm - 1.0).abs() > eps_tp {
        Verdict::NotCp
    } else {
        Verdict::CpStep
    };
    Ok(CpCheck { min_eig, trace_norm, verdict })
}

/// One classified intermediate-map step. Singular steps carry NaN for the
/// spectral fields.
#[derive(Clone, Copy, Debug)]
pub struct DivisibilityReport {
    pub s: f64,
    pub t: f64,
    pub min_eig: f64,
    pub min_eig_std: Option<f64>,
    pub trace_norm: f64,
    pub verdict: Verdict,
    pub singular: bool,
}

impl DivisibilityReport {
    pub const CSV_HEADER: &'static str =
        "experiment,channel,s,t,min_eig,min_eig_std,trace_norm,verdict,singular_flag";

    pub fn csv_row(&self, experiment: &str, channel: &str) -> String {
        let std_field = match self.min_eig_std {
            Some(v) => format!("{v:.12e}"),
            None => String::new(),
        };
        format!(
            "{},{},{:.12e},{:.12e},{:.12e},{},{:.12e},{},{}",
            experiment,
            channel,
            self.s,
            self.t,
            self.min_eig,
            std_field,
            self.trace_norm,
            self.verdict,
            u8::from(self.singular),
        )
    }
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub reports: Vec<DivisibilityReport>,
    /// True when any step on the grid failed the CP test.
    pub non_markovian: bool,
}

/// Classifies the single step from `s` to `t` given both transfer
/// matrices. Singular references yield a report with NaN spectral fields.
pub fn classify_step(
    f_t: &TransferMatrix,
    f_s: &TransferMatrix,
    s: f64,
    t: f64,
    tol: &Tolerances,
) -> Result<DivisibilityReport, DivisibilityError> {
    let (f_im, singular) = intermediate_transfer(f_t, f_s, tol.pinv_cutoff);
    if singular {
        return Ok(DivisibilityReport {
            s,
            t,
            min_eig: f64::NAN,
            min_eig_std: None,
            trace_norm: f64::NAN,
            verdict: Verdict::Singular,
            singular: true,
        });
    }
    let check = cp_verdict(&choi_from_transfer(&f_im), tol.eps_class, tol.eps_tp)?;
    Ok(DivisibilityReport {
        s,
        t,
        min_eig: check.min_eig,
        min_eig_std: None,
        trace_norm: check.trace_norm,
        verdict: check.verdict,
        singular: false,
    })
}

/// Classifies every intermediate map from time `s` to each grid time.
pub fn markovianity_scan(
    family: &ChannelFamily,
    s: f64,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<ScanResult, DivisibilityError> {
    let f_s = transfer_from_chi(&family.chi_ideal(s)?);
    let mut reports = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t < s {
            return Err(DivisibilityError::GridBeforeReference { t, s });
        }
        let f_t = transfer_from_chi(&family.chi_ideal(t)?);
        reports.push(classify_step(&f_t, &f_s, s, t, tol)?);
    }
    let non_markovian = reports.iter().any(|r| r.verdict == Verdict::NotCp);
    Ok(ScanResult { reports, non_markovian })
}

fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, DivisibilityError> {
    let eig = m.hermitian_eigen()?;
    if eig.min_eigenvalue() < PSD_FLOOR {
        return Err(DivisibilityError::NonPositiveInput(eig.min_eigenvalue()));
    }
    let dim = m.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for k in 0..dim {
        let root = eig.eigenvalues[k].max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += v[i] * v[j].conj() * root;
            }
        }
    }
    Ok(out)
}

/// Process fidelity Tr[sqrt(sqrt(chi) chi_id sqrt(chi))]^2, normalised by
/// both traces. 1 means identical processes, 0 means orthogonal support.
pub fn process_fidelity(chi: &ChiMatrix, chi_id: &ChiMatrix) -> Result<f64, DivisibilityError> {
    let id_eig = chi_id.hermitian_eigen()?;
    if id_eig.min_eigenvalue() < PSD_FLOOR {
        return Err(DivisibilityError::NonPositiveInput(id_eig.min_eigenvalue()));
    }
    let root = psd_sqrt(chi)?;
    let inner = root.matmul(chi_id).matmul(&root);
    let inner_eig = ComplexMatrix::hermitian_from(&inner).hermitian_eigen()?;
    if inner_eig.min_eigenvalue() < PSD_FLOOR {
        return Err(DivisibilityError::NonPositiveInput(inner_eig.min_eigenvalue()));
    }
    let root_sum: f64 = inner_eig.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).sum();
    let normaliser = chi.trace().re * chi_id.trace().re;
    if normaliser <= 1e-12 {
        return Err(DivisibilityError::VanishingTrace(normaliser));
    }
    Ok(root_sum * root_sum / normaliser)
}
