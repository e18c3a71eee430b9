//! Process tomography and maximum-likelihood reconstruction of one-qubit
//! channels.
//!
//! A tomography run prepares the four inputs |0>, |1>, |+>, |+_y> and
//! measures each output in the Z, X, and Y bases, yielding sixteen counts.
//! Linear inversion turns these into a process matrix chi_p, which shot
//! noise can push outside the physical set; maximum-likelihood refinement
//! then searches the Cholesky-style parameterisation chi = T^dag T / Tr,
//! which is positive semidefinite with unit trace for every parameter
//! vector, so the optimum is always a valid channel.

use std::sync::OnceLock;

use thiserror::Error;

use crate::channels::tomography_inputs;
use crate::circuits::{
    channel_from_circuit, derive_seed, exact_counts, sample_counts, Circuit, CircuitError,
    MeasBasis,
};
use crate::divisibility::{chi_from_transfer, ChiMatrix, TransferMatrix};
use crate::optim::{nelder_mead, SimplexResult};
use crate::qmath::{pauli, Complex64, ComplexMatrix, QmathError};

/// Expected counts below half a shot are floored before dividing, keeping
/// the objective finite where a projector probability vanishes.
pub const LIKELIHOOD_COUNT_FLOOR: f64 = 0.5;
pub const DEFAULT_MLE_TOL: f64 = 1e-8;
pub const DEFAULT_MLE_MAX_ITERS: usize = 20_000;

#[derive(Debug, Error)]
pub enum ReconstructionError {
    #[error("count {value} at position {index} outside [0, {shots}]")]
    CountOutOfRange { index: usize, value: f64, shots: u64 },
    #[error("shots must be positive")]
    ZeroShots,
    #[error("parameter vector factors a zero matrix")]
    DegenerateParameters,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Math(#[from] QmathError),
}

/// The sixteen (prepared, measured) projector pairs of one tomography run:
/// inputs |0>, |1>, |+>, |+_y| block-wise, each measured against the same
/// four projectors.
pub fn projector_pairs() -> [(ComplexMatrix, ComplexMatrix); 16] {
    let ops = tomography_inputs();
    std::array::from_fn(|nu| (ops[nu / 4].clone(), ops[nu % 4].clone()))
}

/// Raw tomography record: sixteen counts in projector-pair order. The Z
/// pairs of each block sum to `shots` when produced by [`run_tomography`];
/// resampled vectors only guarantee the per-count range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountsVector {
    pub n: [f64; 16],
    pub shots: u64,
}

impl CountsVector {
    pub const CSV_HEADER: &'static str =
        "n1,n2,n3,n4,n5,n6,n7,n8,n9,n10,n11,n12,n13,n14,n15,n16,shots,seed";

    pub fn new(n: [f64; 16], shots: u64) -> Result<Self, ReconstructionError> {
        if shots == 0 {
            return Err(ReconstructionError::ZeroShots);
        }
        for (index, &value) in n.iter().enumerate() {
            if !value.is_finite() || value < 0.0 || value > shots as f64 {
                return Err(ReconstructionError::CountOutOfRange { index, value, shots });
            }
        }
        Ok(CountsVector { n, shots })
    }

    pub fn csv_row(&self, seed: u64) -> String {
        let mut fields: Vec<String> = self.n.iter().map(|v| format!("{v:.12e}")).collect();
        fields.push(self.shots.to_string());
        fields.push(seed.to_string());
        fields.join(",")
    }
}

/// Runs full process tomography on a circuit. Each input block takes three
/// measurement runs (Z, X, Y) of `shots` each; the Z run supplies both the
/// |0> and |1> counts. With `exact` set, counts are the Born expectations
/// and no randomness is consumed.
pub fn run_tomography(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    exact: bool,
) -> Result<CountsVector, ReconstructionError> {
    if shots == 0 {
        return Err(ReconstructionError::ZeroShots);
    }
    let outputs = channel_from_circuit(circuit)?;
    let mut n = [0.0f64; 16];
    for (block, rho) in outputs.iter().enumerate() {
        for (slot, basis) in [MeasBasis::Z, MeasBasis::X, MeasBasis::Y].into_iter().enumerate() {
            let zeros = if exact {
                exact_counts(rho, basis, shots)?.0
            } else {
                let run_seed = derive_seed(seed, &[block as u64, slot as u64]);
                sample_counts(rho, basis, shots, run_seed)?.0 as f64
            };
            match basis {
                MeasBasis::Z => {
                    n[4 * block] = zeros;
                    n[4 * block + 1] = shots as f64 - zeros;
                }
                MeasBasis::X => n[4 * block + 2] = zeros,
                MeasBasis::Y => n[4 * block + 3] = zeros,
            }
        }
    }
    CountsVector::new(n, shots)
}

/// Linear state reconstruction of the four output states: Bloch components
/// are read straight off the counts, r = 2 n / shots - 1 per basis.
pub fn states_from_counts(counts: &CountsVector) -> [ComplexMatrix; 4] {
    std::array::from_fn(|block| {
        let shots = counts.shots as f64;
        let r_z = 2.0 * counts.n[4 * block] / shots - 1.0;
        let r_x = 2.0 * counts.n[4 * block + 2] / shots - 1.0;
        let r_y = 2.0 * counts.n[4 * block + 3] / shots - 1.0;
        ComplexMatrix::from_rows(&[
            &[
                Complex64::new(0.5 * (1.0 + r_z), 0.0),
                Complex64::new(0.5 * r_x, -0.5 * r_y),
            ],
            &[
                Complex64::new(0.5 * r_x, 0.5 * r_y),
                Complex64::new(0.5 * (1.0 - r_z), 0.0),
            ],
        ])
    })
}

/// Builds the transfer matrix from the four measured outputs and converts
/// it to a process matrix. The off-diagonal matrix-unit images follow from
/// linearity: G2 = |+><+| + i|+_y><+_y| - (1+i)/2 (G1 + G4), and G3 is its
/// adjoint. The result is Hermitian but may fail positivity at finite
/// shots.
pub fn chi_linear_inversion(states: &[ComplexMatrix; 4]) -> ChiMatrix {
    let lambda_g1 = &states[0];
    let lambda_g4 = &states[1];
    let half = Complex64::new(0.5, 0.5);
    let mut lambda_g2 = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            lambda_g2[(i, j)] = states[2][(i, j)] + Complex64::new(0.0, 1.0) * states[3][(i, j)]
                - half * (lambda_g1[(i, j)] + lambda_g4[(i, j)]);
        }
    }
    let lambda_g3 = lambda_g2.adjoint();
    let images = [lambda_g1, &lambda_g2, &lambda_g3, lambda_g4];
    let mut f: TransferMatrix = ComplexMatrix::zeros(4);
    for (b, image) in images.iter().enumerate() {
        for k in 0..2 {
            for l in 0..2 {
                f[(2 * k + l, b)] = image[(k, l)];
            }
        }
    }
    chi_from_transfer(&f)
}

fn born_tensor() -> &'static [[[Complex64; 4]; 4]; 16] {
    static TENSOR: OnceLock<[[[Complex64; 4]; 4]; 16]> = OnceLock::new();
    TENSOR.get_or_init(|| {
        let pairs = projector_pairs();
        std::array::from_fn(|nu| {
            let (prepared, measured) = &pairs[nu];
            std::array::from_fn(|m| {
                std::array::from_fn(|n| {
                    measured
                        .matmul(&pauli(m))
                        .matmul(prepared)
                        .matmul(&pauli(n))
                        .trace()
                })
            })
        })
    })
}

/// Born-rule expectations for all sixteen projector pairs,
/// shots * Tr[P_meas sum_mn chi_mn sigma_m P_prep sigma_n].
pub fn expected_counts(chi: &ChiMatrix, shots: u64) -> [f64; 16] {
    let tensor = born_tensor();
    std::array::from_fn(|nu| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..4 {
            for n in 0..4 {
                acc += chi[(m, n)] * tensor[nu][m][n];
            }
        }
        shots as f64 * acc.re
    })
}

/// Real parameters of the triangular factorisation chi = T^dag T / Tr.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TParams {
    pub x: [f64; 16],
}

fn t_matrix(params: &TParams) -> ComplexMatrix {
    let x = &params.x;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    ComplexMatrix::from_rows(&[
        &[c(x[0], 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        &[c(x[4], x[5]), c(x[1], 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        &[c(x[10], x[11]), c(x[6], x[7]), c(x[2], 0.0), c(0.0, 0.0)],
        &[c(x[14], x[15]), c(x[12], x[13]), c(x[8], x[9]), c(x[3], 0.0)],
    ])
}

/// chi = T^dag T / Tr[T^dag T]: positive semidefinite with unit trace for
/// every parameter vector with a nonzero factor.
pub fn chi_from_t(params: &TParams) -> Result<ChiMatrix, ReconstructionError> {
    let t = t_matrix(params);
    let product = t.adjoint().matmul(&t);
    let norm = product.trace().re;
    if !(norm > 1e-12) {
        return Err(ReconstructionError::DegenerateParameters);
    }
    Ok(ComplexMatrix::hermitian_from(&product.scale_real(1.0 / norm)))
}

fn lower_cholesky(m: &ComplexMatrix) -> ComplexMatrix {
    let dim = m.dim();
    let mut l = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = Complex64::new(pivot, 0.0);
        for i in (j + 1)..dim {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / pivot;
        }
    }
    l
}

/// Factors a Hermitian chi into starting parameters. Eigenvalues below
/// zero are clipped and the matrix renormalised first, so a non-physical
/// linear-inversion result still yields a valid starting point; the
/// factorisation runs on the index-reversed matrix so the triangle comes
/// out in the layout [`chi_from_t`] expects.
pub fn t_from_chi(chi: &ChiMatrix) -> Result<TParams, ReconstructionError> {
    let eig = ComplexMatrix::hermitian_from(chi).hermitian_eigen()?;
    let clipped_sum: f64 = eig.eigenvalues.iter().map(|&v| v.max(0.0)).sum();
    let mut physical = ComplexMatrix::zeros(4);
    if clipped_sum > 1e-12 {
        for k in 0..4 {
            let weight = eig.eigenvalues[k].max(0.0) / clipped_sum;
            if weight == 0.0 {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    physical[(i, j)] += v[i] * v[j].conj() * weight;
                }
            }
        }
    } else {
        physical = ComplexMatrix::diag_real(&[0.25; 4]);
    }

    let mut reversed = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            reversed[(i, j)] = physical[(3 - i, 3 - j)];
        }
    }
    let l = lower_cholesky(&reversed);
    let mut upper = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            upper[(i, j)] = l[(3 - i, 3 - j)];
        }
    }
    let t = upper.adjoint();

    let x = [
        t[(0, 0)].re,
        t[(1, 1)].re,
        t[(2, 2)].re,
        t[(3, 3)].re,
        t[(1, 0)].re,
        t[(1, 0)].im,
        t[(2, 1)].re,
        t[(2, 1)].im,
        t[(3, 2)].re,
        t[(3, 2)].im,
        t[(2, 0)].re,
        t[(2, 0)].im,
        t[(3, 1)].re,
        t[(3, 1)].im,
        t[(3, 0)].re,
        t[(3, 0)].im,
    ];
    Ok(TParams { x })
}

/// Gaussian-style objective comparing measured counts with the Born
/// expectations of chi(x): sum (nbar - n)^2 / (2 max(nbar, 0.5)).
pub fn likelihood(params: &TParams, counts: &CountsVector) -> f64 {
    let chi = match chi_from_t(params) {
        Ok(chi) => chi,
        Err(_) => return f64::INFINITY,
    };
    let expected = expected_counts(&chi, counts.shots);
    expected
        .iter()
        .zip(counts.n.iter())
        .map(|(nbar, n)| {
            let denom = nbar.max(LIKELIHOOD_COUNT_FLOOR);
            (nbar - n) * (nbar - n) / (2.0 * denom)
        })
        .sum()
}

/// Maximum-likelihood estimate with diagnostics. `converged` is false only
/// when both the initial run and one restart from a perturbed start hit the
/// iteration budget; the best parameters found are returned regardless.
#[derive(Clone, Debug)]
pub struct MleResult {
    pub chi: ChiMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Refines the linear-inversion estimate into the physical channel that
/// best explains the counts.
pub fn mle_chi(
    counts: &CountsVector,
    tol: f64,
    max_iters: usize,
) -> Result<MleResult, ReconstructionError> {
    let chi_p = chi_linear_inversion(&states_from_counts(counts));
    let start = t_from_chi(&chi_p)?;
    let objective = |x: &[f64]| {
        let mut params = TParams { x: [0.0; 16] };
        params.x.copy_from_slice(x);
        likelihood(&params, counts)
    };
    let first = nelder_mead(objective, &start.x, tol, max_iters);
    let result: SimplexResult = if first.converged {
        first
    } else {
        let mut nudged = start.x;
        for (i, v) in nudged.iter_mut().enumerate() {
            *v += 0.01 * (1.0 + i as f64 / 16.0);
        }
        let second = nelder_mead(objective, &nudged, tol, max_iters);
        if second.objective < first.objective {
            second
        } else {
            first
        }
    };
    let mut params = TParams { x: [0.0; 16] };
    params.x.copy_from_slice(&result.x);
    Ok(MleResult {
        chi: chi_from_t(&params)?,
        objective: result.objective,
        iterations: result.iterations,
        converged: result.converged,
        history: result.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_pauli, ChannelFamily};
    use crate::circuits::{build_depol_circuit, build_flip_circuit, build_total_mm_circuit, FlipAxis};
    use crate::divisibility::{apply_chi, process_fidelity};

    fn identity_circuit() -> Circuit {
        build_flip_circuit(1.0, FlipAxis::X).unwrap()
    }

    fn counts_for_family(family: &ChannelFamily, t: f64, shots: u64) -> CountsVector {
        let chi = family.chi_ideal(t).unwrap();
        CountsVector::new(expected_counts(&chi, shots), shots).unwrap()
    }

    #[test]
    fn projector_pairs_partition_and_project() {
        let pairs = projector_pairs();
        let sum_hv = &pairs[0].1 + &pairs[1].1;
        assert!(sum_hv.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        for nu in [2usize, 3] {
            let p = &pairs[nu].1;
            assert!((p.trace().re - 1.0).abs() < 1e-15);
            assert!(p.matmul(p).max_abs_diff(p) < 1e-15);
        }
    }

    #[test]
    fn exact_identity_tomography_blocks() {
        let counts = run_tomography(&identity_circuit(), 8192, 0, true).unwrap();
        let shots = 8192.0;
        assert!((counts.n[0] - shots).abs() < 1e-9);
        assert!(counts.n[1].abs() < 1e-9);
        assert!((counts.n[2] - shots / 2.0).abs() < 1e-9);
        assert!((counts.n[3] - shots / 2.0).abs() < 1e-9);
        // |+> input block: certain in X, balanced in Z and Y
        assert!((counts.n[10] - shots).abs() < 1e-9);
        assert!((counts.n[8] - shots / 2.0).abs() < 1e-9);
        assert!((counts.n[9] - shots / 2.0).abs() < 1e-9);
        assert!((counts.n[11] - shots / 2.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_flip_swaps_z_counts() {
        let circuit = build_flip_circuit(0.0, FlipAxis::X).unwrap();
        let counts = run_tomography(&circuit, 4096, 0, true).unwrap();
        assert!(counts.n[0].abs() < 1e-9);
        assert!((counts.n[1] - 4096.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_tomography_keeps_pair_sums() {
        let circuit = build_total_mm_circuit(0.7).unwrap();
        let counts = run_tomography(&circuit, 8192, 99, false).unwrap();
        for block in 0..4 {
            assert_eq!(counts.n[4 * block] + counts.n[4 * block + 1], 8192.0);
        }
        let repeat = run_tomography(&circuit, 8192, 99, false).unwrap();
        assert_eq!(counts, repeat);
    }

    #[test]
    fn states_from_exact_identity_counts() {
        let counts = run_tomography(&identity_circuit(), 8192, 0, true).unwrap();
        let states = states_from_counts(&counts);
        for (state, input) in states.iter().zip(tomography_inputs().iter()) {
            assert!(state.max_abs_diff(input) < 1e-12);
        }
    }

    #[test]
    fn balanced_counts_give_maximally_mixed_states() {
        let counts = CountsVector::new([2048.0; 16], 4096).unwrap();
        for state in states_from_counts(&counts) {
            assert!(state.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-12);
        }
    }

    #[test]
    fn depolarized_input_shrinks_bloch_vector() {
        let circuit = build_depol_circuit(0.4).unwrap();
        let counts = run_tomography(&circuit, 8192, 0, true).unwrap();
        let states = states_from_counts(&counts);
        let z = states[0][(0, 0)].re - states[0][(1, 1)].re;
        assert!((z - 0.6).abs() < 1e-9);
        assert!(states[0][(0, 1)].norm() < 1e-9);
    }

    #[test]
    fn linear_inversion_of_exact_identity() {
        let counts = run_tomography(&identity_circuit(), 8192, 0, true).unwrap();
        let chi = chi_linear_inversion(&states_from_counts(&counts));
        assert!(chi.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0])) < 1e-10);
    }

    #[test]
    fn linear_inversion_recovers_mixed_mm_process() {
        let t = 1.0;
        let p = crate::channels::prob_mm(t).unwrap();
        let circuit = build_total_mm_circuit(p).unwrap();
        let counts = run_tomography(&circuit, 8192, 0, true).unwrap();
        let chi = chi_linear_inversion(&states_from_counts(&counts));
        let expected = ComplexMatrix::diag_real(&[
            0.6839397205857212,
            0.15803013970713942,
            0.15803013970713942,
            0.0,
        ]);
        assert!(chi.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn reconstructed_channel_reproduces_measured_outputs() {
        let probs = ChannelFamily::NmX1.probs(1.2).unwrap();
        let states: [ComplexMatrix; 4] = std::array::from_fn(|i| {
            apply_pauli(&probs, &tomography_inputs()[i]).unwrap()
        });
        let chi = chi_linear_inversion(&states);
        for (input, state) in tomography_inputs().iter().zip(states.iter()) {
            assert!(apply_chi(&chi, input).max_abs_diff(state) < 1e-10);
        }
    }

    #[test]
    fn expected_counts_for_reference_processes() {
        let shots = 8192u64;
        let identity = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]);
        let counts = expected_counts(&identity, shots);
        assert!((counts[0] - shots as f64).abs() < 1e-9);
        assert!((counts[2] - shots as f64 / 2.0).abs() < 1e-9);
        let depol = ComplexMatrix::diag_real(&[0.7, 0.1, 0.1, 0.1]);
        let counts = expected_counts(&depol, shots);
        assert!((counts[0] - 0.8 * shots as f64).abs() < 1e-9);
    }

    #[test]
    fn expected_counts_agree_with_circuit_tomography() {
        let t = 0.7;
        let p = crate::channels::prob_mm(t).unwrap();
        let circuit = build_total_mm_circuit(p).unwrap();
        let measured = run_tomography(&circuit, 8192, 0, true).unwrap();
        let chi = ChannelFamily::MixedMm.chi_ideal(t).unwrap();
        let predicted = expected_counts(&chi, 8192);
        for (a, b) in measured.n.iter().zip(predicted.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn factorisation_is_physical_for_any_parameters() {
        let mut state = 5u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..1000 {
            let params = TParams { x: std::array::from_fn(|_| next()) };
            let chi = match chi_from_t(&params) {
                Ok(chi) => chi,
                Err(ReconstructionError::DegenerateParameters) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!((chi.trace().re - 1.0).abs() < 1e-12);
            let eig = chi.hermitian_eigen().unwrap();
            assert!(eig.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn factorisation_round_trips_through_parameters() {
        let cases = [
            ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]),
            ComplexMatrix::diag_real(&[0.25, 0.25, 0.25, 0.25]),
            ChannelFamily::MixedMm.chi_ideal(1.0).unwrap(),
            ChannelFamily::DepolMixed.chi_ideal(4.0).unwrap(),
        ];
        for chi in &cases {
            let params = t_from_chi(chi).unwrap();
            let back = chi_from_t(&params).unwrap();
            assert!(back.max_abs_diff(chi) < 1e-9);
        }
    }

    #[test]
    fn factorisation_clips_negative_eigenvalues() {
        let chi = ComplexMatrix::diag_real(&[1.02, 0.03, -0.05, 0.0]);
        let params = t_from_chi(&chi).unwrap();
        let back = chi_from_t(&params).unwrap();
        let expected =
            ComplexMatrix::diag_real(&[1.02 / 1.05, 0.03 / 1.05, 0.0, 0.0]);
        assert!(back.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn identity_factorisation_uses_single_parameter() {
        let chi = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]);
        let params = t_from_chi(&chi).unwrap();
        assert!((params.x[0] - 1.0).abs() < 1e-12);
        for v in &params.x[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn likelihood_vanishes_at_the_generating_process() {
        let counts = counts_for_family(&ChannelFamily::MixedMm, 1.0, 8192);
        let params = t_from_chi(&ChannelFamily::MixedMm.chi_ideal(1.0).unwrap()).unwrap();
        assert!(likelihood(&params, &counts) < 1e-9);
    }

    #[test]
    fn likelihood_blows_up_for_a_wrong_process() {
        let counts = run_tomography(&identity_circuit(), 8192, 0, true).unwrap();
        let mut x = [0.0; 16];
        x[1] = 1.0;
        let bit_flip = TParams { x };
        assert!(likelihood(&bit_flip, &counts) > 8192.0 / 4.0);
    }

    #[test]
    fn likelihood_is_scale_homogeneous() {
        let base = counts_for_family(&ChannelFamily::MixedMm, 1.0, 4096);
        let doubled = CountsVector::new(base.n.map(|v| 2.0 * v), 8192).unwrap();
        let params = t_from_chi(&ChannelFamily::MixedMm.chi_ideal(0.4).unwrap()).unwrap();
        let small = likelihood(&params, &base);
        let big = likelihood(&params, &doubled);
        assert!((big - 2.0 * small).abs() < 1e-9 * big.max(1.0));
    }

    #[test]
    fn mle_recovers_identity_from_exact_counts() {
        let counts = run_tomography(&identity_circuit(), 8192, 0, true).unwrap();
        let result = mle_chi(&counts, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS).unwrap();
        let ideal = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]);
        assert!(process_fidelity(&result.chi, &ideal).unwrap() >= 0.999);
        for pair in result.history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
    }

    #[test]
    fn mle_recovers_mixed_mm_from_exact_counts() {
        let counts = counts_for_family(&ChannelFamily::MixedMm, 1.0, 8192);
        let result = mle_chi(&counts, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS).unwrap();
        let ideal = ChannelFamily::MixedMm.chi_ideal(1.0).unwrap();
        assert!(process_fidelity(&result.chi, &ideal).unwrap() >= 0.999);
        assert!(result.objective < 1.0);
    }

    #[test]
    fn counts_validation_rejects_bad_entries() {
        let mut n = [0.0; 16];
        n[3] = 10.0;
        assert!(CountsVector::new(n, 4).is_err());
        n[3] = -1.0;
        assert!(CountsVector::new(n, 4).is_err());
        n[3] = f64::NAN;
        assert!(CountsVector::new(n, 4).is_err());
        n[3] = 4.0;
        assert!(CountsVector::new(n, 4).is_ok());
        assert!(CountsVector::new(n, 0).is_err());
    }

    #[test]
    fn counts_rows_carry_shots_and_seed() {
        let counts = CountsVector::new([1.0; 16], 2).unwrap();
        let row = counts.csv_row(7);
        assert_eq!(row.split(',').count(), CountsVector::CSV_HEADER.split(',').count());
        assert!(row.ends_with(",2,7"));
    }
}
