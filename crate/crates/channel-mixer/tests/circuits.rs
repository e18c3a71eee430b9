//! Circuit constructions against the analytic channels they realise.

mod common;

use channel_mixer::channels::{apply_pauli, tomography_inputs, PauliProbs};
use channel_mixer::circuits::{
    build_depol_circuit, build_flip_circuit, build_total_mm_circuit, channel_from_circuit,
    derive_seed, sample_counts, simulate, system_marginal, Circuit, FlipAxis, Gate, MeasBasis,
};
use channel_mixer::qmath::ComplexMatrix;
use common::TestRng;

fn max_output_deviation(circuit: &Circuit, probs: &PauliProbs) -> f64 {
    let outputs = channel_from_circuit(circuit).unwrap();
    let mut worst = 0.0f64;
    for (rho_in, rho_out) in tomography_inputs().iter().zip(&outputs) {
        let expected = apply_pauli(probs, rho_in).unwrap();
        worst = worst.max(rho_out.max_abs_diff(&expected));
    }
    worst
}

#[test]
fn flip_circuits_realise_single_axis_channels_over_random_probabilities() {
    let mut rng = TestRng(404);
    for _ in 0..50 {
        let p = rng.next_f64();
        let x = build_flip_circuit(p, FlipAxis::X).unwrap();
        let dev = max_output_deviation(&x, &PauliProbs::new(p, 1.0 - p, 0.0, 0.0).unwrap());
        assert!(dev < 1e-12, "p = {p}: {dev}");

        let y = build_flip_circuit(p, FlipAxis::Y).unwrap();
        let dev = max_output_deviation(&y, &PauliProbs::new(p, 0.0, 1.0 - p, 0.0).unwrap());
        assert!(dev < 1e-12, "p = {p}: {dev}");
    }
}

#[test]
fn combined_circuit_realises_the_equal_flip_mixture_over_random_probabilities() {
    let mut rng = TestRng(405);
    for _ in 0..50 {
        let p = rng.next_f64();
        let circuit = build_total_mm_circuit(p).unwrap();
        let probs =
            PauliProbs::new(p, 0.5 * (1.0 - p), 0.5 * (1.0 - p), 0.0).unwrap();
        let dev = max_output_deviation(&circuit, &probs);
        assert!(dev < 1e-12, "p = {p}: {dev}");
    }
}

#[test]
fn depolarizing_circuit_realises_the_isotropic_channel_over_random_strengths() {
    let mut rng = TestRng(406);
    for _ in 0..50 {
        let p = rng.next_f64();
        let circuit = build_depol_circuit(p).unwrap();
        let probs =
            PauliProbs::new(1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p).unwrap();
        let dev = max_output_deviation(&circuit, &probs);
        assert!(dev < 1e-12, "p = {p}: {dev}");
    }
}

#[test]
fn simulation_preserves_density_matrix_structure() {
    let mut rng = TestRng(407);
    for _ in 0..20 {
        let p = rng.next_f64();
        let circuit = build_total_mm_circuit(p).unwrap();
        for rho_in in tomography_inputs() {
            let rho_out = simulate(&circuit, &rho_in).unwrap();
            assert!((rho_out.trace().re - 1.0).abs() < 1e-12);
            assert!(rho_out.hermiticity_deviation() < 1e-12);
            let eig = rho_out.hermitian_eigen().unwrap();
            assert!(eig.min_eigenvalue() > -1e-12);
        }
    }
}

#[test]
fn boundary_probabilities_give_deterministic_channels() {
    // p = 1 leaves the state alone; p = 0 always applies the flip.
    let id = build_flip_circuit(1.0, FlipAxis::X).unwrap();
    let outputs = channel_from_circuit(&id).unwrap();
    for (rho_in, rho_out) in tomography_inputs().iter().zip(&outputs) {
        assert!(rho_out.max_abs_diff(rho_in) < 1e-12);
    }

    let flip = build_flip_circuit(0.0, FlipAxis::X).unwrap();
    let zero_in = &tomography_inputs()[0];
    let full = simulate(&flip, zero_in).unwrap();
    let one_out = system_marginal(&full, flip.num_qubits);
    assert!((one_out[(1, 1)].re - 1.0).abs() < 1e-12);
}

#[test]
fn measurement_statistics_follow_the_born_rule() {
    // |+><+| measured along Z: both outcomes near half the shots.
    let plus = &tomography_inputs()[2];
    let shots = 100_000;
    let (up, down) = sample_counts(plus, MeasBasis::Z, shots, 5).unwrap();
    assert_eq!(up + down, shots);
    let sigma = (shots as f64 * 0.25).sqrt();
    assert!((up as f64 - shots as f64 / 2.0).abs() < 5.0 * sigma);

    // Measured along X it is deterministic.
    let (up, _) = sample_counts(plus, MeasBasis::X, shots, 5).unwrap();
    assert_eq!(up, shots);
}

#[test]
fn sampling_is_reproducible_per_seed_and_independent_across_seeds() {
    let rho = &tomography_inputs()[3];
    let a = sample_counts(rho, MeasBasis::Z, 4096, 9).unwrap();
    let b = sample_counts(rho, MeasBasis::Z, 4096, 9).unwrap();
    assert_eq!(a, b);
    let c = sample_counts(rho, MeasBasis::Z, 4096, 10).unwrap();
    assert_ne!(a, c);
}

#[test]
fn derived_seeds_separate_nearby_streams() {
    let mut seen = std::collections::HashSet::new();
    for channel in 0..3u64 {
        for point in 0..40u64 {
            for role in 0..2u64 {
                assert!(seen.insert(derive_seed(7, &[channel, point, role])));
            }
        }
    }
    assert_ne!(derive_seed(7, &[1, 2]), derive_seed(8, &[1, 2]));
}

#[test]
fn oversized_registers_and_bad_gates_are_rejected() {
    assert!(Circuit::new(5, vec![]).is_err());
    assert!(Circuit::new(2, vec![Gate::x(2)]).is_err());
    assert!(Circuit::new(2, vec![Gate::cx(1, 1)]).is_err());
    assert!(build_flip_circuit(1.5, FlipAxis::X).is_err());
    assert!(build_depol_circuit(-0.2).is_err());
}

#[test]
fn gate_unitaries_are_unitary() {
    let circuit = Circuit::new(
        3,
        vec![Gate::ry(1, 1.234), Gate::cx(1, 2), Gate::cry(2, 1, 0.777), Gate::cz(1, 0)],
    )
    .unwrap();
    let id = ComplexMatrix::identity(8);
    for gate in &circuit.gates {
        let u = circuit.gate_unitary(gate);
        assert!(u.adjoint().matmul(&u).max_abs_diff(&id) < 1e-12, "{gate:?}");
    }
}
