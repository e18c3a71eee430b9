//! Ancilla-circuit realisations of the Pauli channels and their exact
//! simulation.
//!
//! Convention used throughout: qubit 0 is the system and the most
//! significant bit of a basis index; ancillas follow in order. Registers
//! stay small (at most 4 qubits), so circuits are simulated exactly by
//! conjugating the full register density matrix with each gate unitary,
//! then tracing out the ancillas. Shot noise enters only at measurement
//! time, through seeded binomial sampling of projector expectation values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::channels::{tomography_inputs, validate_density};
use crate::qmath::{Complex64, ComplexMatrix};

pub const MAX_QUBITS: usize = 4;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("probability {0} outside [0, 1]")]
    ProbOutOfRange(f64),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("register must have 1..={MAX_QUBITS} qubits, got {0}")]
    BadRegisterSize(usize),
    #[error("input is not a density matrix: {0}")]
    InvalidState(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    Ry(f64),
}

/// One gate: a single-qubit operation on `target`, optionally conditioned
/// on `control` being |1>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate { kind: GateKind::X, target, control: None }
    }

    pub fn y(target: usize) -> Self {
        Gate { kind: GateKind::Y, target, control: None }
    }

    pub fn z(target: usize) -> Self {
        Gate { kind: GateKind::Z, target, control: None }
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::Ry(theta), target, control: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::X, target, control: Some(control) }
    }

    pub fn cy(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Y, target, control: Some(control) }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Z, target, control: Some(control) }
    }

    pub fn cry(control: usize, target: usize, theta: f64) -> Self {
        Gate { kind: GateKind::Ry(theta), target, control: Some(control) }
    }

    fn matrix(&self) -> ComplexMatrix {
        match self.kind {
            GateKind::X => crate::qmath::pauli(1),
            GateKind::Y => crate::qmath::pauli(2),
            GateKind::Z => crate::qmath::pauli(3),
            GateKind::Ry(theta) => ry_matrix(theta),
        }
    }
}

/// RY(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
pub fn ry_matrix(theta: f64) -> ComplexMatrix {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new((theta / 2.0).sin(), 0.0);
    ComplexMatrix::from_rows(&[&[c, -s], &[s, c]])
}

/// Gate list over a fixed-size register. Qubit 0 is the system.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(CircuitError::BadRegisterSize(num_qubits));
        }
        let circuit = Circuit { num_qubits, gates };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (i, g) in self.gates.iter().enumerate() {
            if g.target >= self.num_qubits {
                return Err(CircuitError::InvalidGate(format!(
                    "gate {i} targets qubit {} of {}",
                    g.target, self.num_qubits
                )));
            }
            if let Some(c) = g.control {
                if c >= self.num_qubits {
                    return Err(CircuitError::InvalidGate(format!(
                        "gate {i} controlled by qubit {c} of {}",
                        self.num_qubits
                    )));
                }
                if c == g.target {
                    return Err(CircuitError::InvalidGate(format!(
                        "gate {i} has control == target == {c}"
                    )));
                }
            }
            if let GateKind::Ry(theta) = g.kind {
                if !theta.is_finite() {
                    return Err(CircuitError::InvalidGate(format!(
                        "gate {i} has non-finite angle"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full-register unitary of one gate. With qubit 0 most significant,
    /// qubit `q` owns bit `num_qubits - 1 - q` of a basis index.
    pub fn gate_unitary(&self, gate: &Gate) -> ComplexMatrix {
        let n = self.num_qubits;
        let dim = 1usize << n;
        let u = gate.matrix();
        let tbit = n - 1 - gate.target;
        let cbit = gate.control.map(|c| n - 1 - c);
        let mut full = ComplexMatrix::zeros(dim);
        for b in 0..dim {
            if let Some(cb) = cbit {
                if (b >> cb) & 1 == 0 {
                    full[(b, b)] = Complex64::new(1.0, 0.0);
                    continue;
                }
            }
            let j = (b >> tbit) & 1;
            for i in 0..2 {
                let b_out = (b & !(1 << tbit)) | (i << tbit);
                let v = u[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    full[(b_out, b)] = full[(b_out, b)] + v;
                }
            }
        }
        full
    }
}

/// Pure state of the register, amplitudes ordered with qubit 0 as the most
/// significant bit.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// |0...0> on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(CircuitError::BadRegisterSize(num_qubits));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let n = self.num_qubits;
        let u = gate.matrix();
        let tbit = n - 1 - gate.target;
        let cbit = gate.control.map(|c| n - 1 - c);
        for b in 0..self.amplitudes.len() {
            // visit each (b0, b1) pair once, from its target-bit-0 member
            if (b >> tbit) & 1 == 1 {
                continue;
            }
            if let Some(cb) = cbit {
                if (b >> cb) & 1 == 0 {
                    continue;
                }
            }
            let b1 = b | (1 << tbit);
            let a0 = self.amplitudes[b];
            let a1 = self.amplitudes[b1];
            self.amplitudes[b] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            self.amplitudes[b1] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, basis_index: usize) -> f64 {
        self.amplitudes[basis_index].norm_sqr()
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        let dim = self.amplitudes.len();
        let mut rho = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        rho
    }
}

/// Runs the circuit on `rho_system ⊗ |0..0><0..0|` by exact density-matrix
/// evolution and returns the full register state.
pub fn simulate(circuit: &Circuit, rho_system: &ComplexMatrix) -> Result<ComplexMatrix, CircuitError> {
    validate_density(rho_system).map_err(|e| CircuitError::InvalidState(e.to_string()))?;
    circuit.validate()?;
    let anc_dim = 1usize << (circuit.num_qubits - 1);
    let mut ancillas = ComplexMatrix::zeros(anc_dim);
    ancillas[(0, 0)] = Complex64::new(1.0, 0.0);
    let mut rho = if circuit.num_qubits == 1 {
        rho_system.clone()
    } else {
        rho_system.kron(&ancillas)
    };
    for gate in &circuit.gates {
        let u = circuit.gate_unitary(gate);
        rho = &(&u * &rho) * &u.adjoint();
    }
    Ok(rho)
}

/// Partial trace over everything but the system qubit.
pub fn system_marginal(rho_full: &ComplexMatrix, num_qubits: usize) -> ComplexMatrix {
    let anc_dim = 1usize << (num_qubits - 1);
    assert_eq!(rho_full.dim(), 2 * anc_dim, "register dimension mismatch");
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..anc_dim {
                sum += rho_full[(i * anc_dim + k, j * anc_dim + k)];
            }
            out[(i, j)] = sum;
        }
    }
    out
}

/// Runs the circuit on each of the four tomography inputs and returns the
/// system outputs; this is the channel restricted to the tomography set.
pub fn channel_from_circuit(circuit: &Circuit) -> Result<[ComplexMatrix; 4], CircuitError> {
    let inputs = tomography_inputs();
    let mut out = Vec::with_capacity(4);
    for rho in &inputs {
        let full = simulate(circuit, rho)?;
        out.push(system_marginal(&full, circuit.num_qubits));
    }
    Ok([
        out[0].clone(),
        out[1].clone(),
        out[2].clone(),
        out[3].clone(),
    ])
}

/// Rotation angle giving an ancilla |1>-weight of `1 - p`:
/// theta = 2 arccos(sqrt(p)).
pub fn angle_single(p: f64) -> Result<f64, CircuitError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || !p.is_finite() {
        return Err(CircuitError::ProbOutOfRange(p));
    }
    Ok(2.0 * p.clamp(0.0, 1.0).sqrt().acos())
}

/// Rotation angle for the depolarizing circuit: theta = arccos(1 - 2p)/2,
/// so that cos^2(theta) = 1 - p.
pub fn angle_depol(p: f64) -> Result<f64, CircuitError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || !p.is_finite() {
        return Err(CircuitError::ProbOutOfRange(p));
    }
    Ok(0.5 * (1.0 - 2.0 * p.clamp(0.0, 1.0)).acos())
}

/// Axis of the controlled flip applied by [`build_flip_circuit`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlipAxis {
    X,
    Y,
}

/// Two-qubit circuit applying X (or Y) to the system with probability
/// `1 - p`: RY on the ancilla, then a controlled flip onto the system.
pub fn build_flip_circuit(p: f64, axis: FlipAxis) -> Result<Circuit, CircuitError> {
    let theta = angle_single(p)?;
    let flip = match axis {
        FlipAxis::X => Gate::cx(1, 0),
        FlipAxis::Y => Gate::cy(1, 0),
    };
    Circuit::new(2, vec![Gate::ry(1, theta), flip])
}

/// Three-qubit circuit for the half-half flip mixture: the ancilla pair is
/// steered to P(00) = p, P(01) = P(11) = (1-p)/2, then |01> fires X on the
/// system and |11> fires ZX (equal to Y up to a branch phase the channel
/// cannot see).
pub fn build_total_mm_circuit(p: f64) -> Result<Circuit, CircuitError> {
    let theta1 = angle_single(p)?;
    let theta2 = std::f64::consts::FRAC_PI_2;
    Circuit::new(
        3,
        vec![
            Gate::ry(1, theta1),
            Gate::cx(1, 2),
            Gate::cry(2, 1, theta2),
            Gate::cx(2, 0),
            Gate::cz(1, 0),
        ],
    )
}

/// Four-qubit depolarizing circuit: one rotated ancilla per Pauli axis,
/// each controlling its flip onto the system. Every flip multiplies two
/// Pauli eigenvalues by cos(theta), so all three end up at cos^2 = 1 - p.
pub fn build_depol_circuit(p: f64) -> Result<Circuit, CircuitError> {
    let theta = angle_depol(p)?;
    Circuit::new(
        4,
        vec![
            Gate::ry(1, theta),
            Gate::ry(2, theta),
            Gate::ry(3, theta),
            Gate::cx(1, 0),
            Gate::cy(2, 0),
            Gate::cz(3, 0),
        ],
    )
}

/// Measurement basis for single-qubit counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasBasis {
    Z,
    X,
    Y,
}

impl MeasBasis {
    /// Projector whose expectation is the probability of outcome 0:
    /// |0><0|, |+><+|, or |+_y><+_y|.
    pub fn projector(&self) -> ComplexMatrix {
        let inputs = tomography_inputs();
        match self {
            MeasBasis::Z => inputs[0].clone(),
            MeasBasis::X => inputs[2].clone(),
            MeasBasis::Y => inputs[3].clone(),
        }
    }
}

/// Draws `shots` measurements of `rho` in the given basis and returns the
/// (outcome 0, outcome 1) counts. One binomial draw from a ChaCha8 stream;
/// identical seeds reproduce identical counts.
pub fn sample_counts(
    rho: &ComplexMatrix,
    basis: MeasBasis,
    shots: u64,
    seed: u64,
) -> Result<(u64, u64), CircuitError> {
    validate_density(rho).map_err(|e| CircuitError::InvalidState(e.to_string()))?;
    let p = (basis.projector().matmul(rho)).trace().re.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Binomial::new(shots, p).expect("probability clamped to [0, 1]");
    let zeros = dist.sample(&mut rng);
    Ok((zeros, shots - zeros))
}

/// Exact expected counts for the same measurement, shots * Tr[P rho].
pub fn exact_counts(rho: &ComplexMatrix, basis: MeasBasis, shots: u64) -> Result<(f64, f64), CircuitError> {
    validate_density(rho).map_err(|e| CircuitError::InvalidState(e.to_string()))?;
    let p = (basis.projector().matmul(rho)).trace().re.clamp(0.0, 1.0);
    let zeros = shots as f64 * p;
    Ok((zeros, shots as f64 - zeros))
}

/// Splitmix-style seed derivation, so that parallel work items draw from
/// independent, schedule-free streams.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut z = master ^ 0x9e3779b97f4a7c15;
    for &w in words {
        z ^= w.wrapping_mul(0xbf58476d1ce4e5b9).rotate_left(31);
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_pauli, ChannelFamily, PauliProbs};

    #[test]
    fn angles_at_endpoints() {
        assert!(angle_single(1.0).unwrap().abs() < 1e-12);
        assert!((angle_single(0.0).unwrap() - std::f64::consts::PI).abs() < 1e-12);
        assert!(angle_depol(0.0).unwrap().abs() < 1e-12);
        assert!((angle_depol(0.5).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!(matches!(angle_single(1.2), Err(CircuitError::ProbOutOfRange(_))));
        assert!(matches!(angle_depol(-0.1), Err(CircuitError::ProbOutOfRange(_))));
    }

    #[test]
    fn depol_angle_identity() {
        for p in [0.0, 0.1, 0.37, 0.75, 1.0] {
            let theta = angle_depol(p).unwrap();
            assert!((theta.cos().powi(2) - (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn gate_validation() {
        assert!(Circuit::new(2, vec![Gate::cx(0, 0)]).is_err());
        assert!(Circuit::new(2, vec![Gate::x(2)]).is_err());
        assert!(Circuit::new(5, vec![]).is_err());
        assert!(Circuit::new(2, vec![Gate::ry(1, f64::NAN)]).is_err());
    }

    #[test]
    fn statevector_stays_normalised() {
        let mut sv = StateVector::zero(3).unwrap();
        for gate in [Gate::ry(1, 1.1), Gate::cx(1, 2), Gate::cry(2, 1, 0.7), Gate::cx(2, 0)] {
            sv.apply_gate(&gate);
            assert!((sv.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_circuit_matches_channel() {
        for (p, axis, probs) in [
            (0.3, FlipAxis::X, [0.3, 0.7, 0.0, 0.0]),
            (0.85, FlipAxis::Y, [0.85, 0.0, 0.15, 0.0]),
        ] {
            let circuit = build_flip_circuit(p, axis).unwrap();
            let outputs = channel_from_circuit(&circuit).unwrap();
            let probs = PauliProbs::new(probs[0], probs[1], probs[2], probs[3]).unwrap();
            for (rho_in, rho_out) in crate::channels::tomography_inputs().iter().zip(&outputs) {
                let expected = apply_pauli(&probs, rho_in).unwrap();
                assert!(rho_out.max_abs_diff(&expected) < 1e-12);
            }
        }
    }

    #[test]
    fn total_mm_circuit_matches_family() {
        let t = 1.4;
        let p = crate::channels::prob_mm(t).unwrap();
        let circuit = build_total_mm_circuit(p).unwrap();
        let outputs = channel_from_circuit(&circuit).unwrap();
        let probs = ChannelFamily::MixedMm.probs(t).unwrap();
        for (rho_in, rho_out) in crate::channels::tomography_inputs().iter().zip(&outputs) {
            let expected = apply_pauli(&probs, rho_in).unwrap();
            assert!(rho_out.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn total_mm_ancilla_distribution() {
        let p = 0.3f64;
        let mut sv = StateVector::zero(3).unwrap();
        let circuit = build_total_mm_circuit(p).unwrap();
        for gate in &circuit.gates[..3] {
            sv.apply_gate(gate);
        }
        // system untouched so far; ancilla pair (a1, a2) lives in the low bits
        assert!((sv.probability(0b000) - p).abs() < 1e-12);
        assert!((sv.probability(0b001) - (1.0 - p) / 2.0).abs() < 1e-12);
        assert!(sv.probability(0b010) < 1e-15);
        assert!((sv.probability(0b011) - (1.0 - p) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn total_mm_branch_phase_is_channel_invisible() {
        // swapping the controlled pair (CX from a2, CZ from a1) for
        // (CY from a2, CZ from a1) exchanges which ancilla branch carries
        // X and Y, up to phases; the extracted channel is identical
        let p = 0.6;
        let theta1 = angle_single(p).unwrap();
        let drawn = build_total_mm_circuit(p).unwrap();
        let variant = Circuit::new(
            3,
            vec![
                Gate::ry(1, theta1),
                Gate::cx(1, 2),
                Gate::cry(2, 1, std::f64::consts::FRAC_PI_2),
                Gate::cy(2, 0),
                Gate::cz(1, 0),
            ],
        )
        .unwrap();
        let a = channel_from_circuit(&drawn).unwrap();
        let b = channel_from_circuit(&variant).unwrap();
        for k in 0..4 {
            assert!(a[k].max_abs_diff(&b[k]) < 1e-12);
        }
    }

    #[test]
    fn depol_circuit_matches_family() {
        for p in [0.0, 0.4, 0.9] {
            let circuit = build_depol_circuit(p).unwrap();
            let outputs = channel_from_circuit(&circuit).unwrap();
            let probs =
                PauliProbs::new(1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p).unwrap();
            for (rho_in, rho_out) in crate::channels::tomography_inputs().iter().zip(&outputs) {
                let expected = apply_pauli(&probs, rho_in).unwrap();
                assert!(rho_out.max_abs_diff(&expected) < 1e-12, "p = {p}");
            }
        }
    }

    #[test]
    fn simulate_preserves_trace_and_positivity() {
        let circuit = build_total_mm_circuit(0.45).unwrap();
        let inputs = crate::channels::tomography_inputs();
        let full = simulate(&circuit, &inputs[2]).unwrap();
        assert!((full.trace().re - 1.0).abs() < 1e-12);
        let marginal = system_marginal(&full, 3);
        assert!((marginal.trace().re - 1.0).abs() < 1e-12);
        let eig = marginal.hermitian_eigen().unwrap();
        assert!(eig.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let rho = crate::channels::tomography_inputs()[2].clone();
        let a = sample_counts(&rho, MeasBasis::Z, 8192, 42).unwrap();
        let b = sample_counts(&rho, MeasBasis::Z, 8192, 42).unwrap();
        let c = sample_counts(&rho, MeasBasis::Z, 8192, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.0 + a.1, 8192);
    }

    #[test]
    fn sampling_matches_expectation_within_binomial_bounds() {
        // |+> measured in Z: p = 1/2; 3 sigma = 3 sqrt(n/4)
        let rho = crate::channels::tomography_inputs()[2].clone();
        let shots = 10_000u64;
        for seed in 0..20 {
            let (zeros, _) = sample_counts(&rho, MeasBasis::Z, shots, seed).unwrap();
            let dev = (zeros as f64 - 5000.0).abs();
            assert!(dev < 3.0 * (shots as f64 / 4.0).sqrt() + 1.0, "seed {seed}: {zeros}");
        }
    }

    #[test]
    fn exact_counts_need_no_rng() {
        let rho = crate::channels::tomography_inputs()[3].clone();
        let (zeros, ones) = exact_counts(&rho, MeasBasis::Y, 1000).unwrap();
        assert!((zeros - 1000.0).abs() < 1e-9);
        assert!(ones.abs() < 1e-9);
    }

    #[test]
    fn derive_seed_separates_streams() {
        let a = derive_seed(7, &[0, 1, 2]);
        let b = derive_seed(7, &[0, 1, 3]);
        let c = derive_seed(7, &[0, 1, 2]);
        assert_eq!(a, c);
        assert_ne!(a, b);
        assert_ne!(derive_seed(7, &[1, 0]), derive_seed(7, &[0, 1]));
    }
}
