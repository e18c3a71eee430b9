//! Time-parameterised Pauli channels and their convex mixtures.
//!
//! Every channel here acts as `rho -> sum_a p_a(t) sigma_a rho sigma_a` for
//! a probability vector `p(t)` over the four Paulis. The module carries the
//! named families used by the three experiments (bit/Y flips, their
//! half-half mixture, the two non-Markovian X channels and their replica
//! mixture, and the engineered depolarizing pair), arbitrary convex
//! mixtures of those, closed-form time derivatives, and the decay rates of
//! the canonical master equation obtained by Hadamard-transforming `p`.

use thiserror::Error;

use crate::qmath::{pauli, Complex64, ComplexMatrix, HERMITICITY_TOL};

/// 4x4 Hadamard matrix linking Pauli probabilities and Pauli eigenvalues.
pub const HADAMARD4: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Pauli eigenvalues smaller than this trip [`ChannelError::SingularEigenvalue`].
pub const EIGENVALUE_FLOOR: f64 = 1e-10;

const PROB_SUM_TOL: f64 = 1e-12;
const PROB_RANGE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("channel families are defined for t >= 0, got t = {0}")]
    NegativeTime(f64),
    #[error("probabilities ({0}, {1}, {2}, {3}) do not form a distribution")]
    DomainViolation(f64, f64, f64, f64),
    #[error("mixing weight eta = {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("input is not a density matrix: {0}")]
    InvalidState(String),
    #[error("Pauli eigenvalue lambda_{index} vanishes at t = {t} (|lambda| < 1e-10)")]
    SingularEigenvalue { index: usize, t: f64 },
}

/// Probability vector over (identity, X, Y, Z) conjugations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliProbs {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl PauliProbs {
    /// Validates that the four entries form a probability distribution
    /// (entries within 1e-12 of [0, 1], sum within 1e-12 of 1).
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self, ChannelError> {
        let entries = [p0, p1, p2, p3];
        let in_range = entries
            .iter()
            .all(|&p| p.is_finite() && p >= -PROB_RANGE_TOL && p <= 1.0 + PROB_RANGE_TOL);
        let sum: f64 = entries.iter().sum();
        if !in_range || (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(ChannelError::DomainViolation(p0, p1, p2, p3));
        }
        Ok(PauliProbs { p0, p1, p2, p3 })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }
}

/// The channel families of the three mixing experiments, plus arbitrary
/// convex mixtures of them.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFamily {
    /// Bit flip with p(t) = (1 + e^-t)/2; Markovian.
    MarkovBitFlip,
    /// Y flip with the same decaying weight; Markovian.
    MarkovYFlip,
    /// Half-half mixture of the two flips above; non-Markovian.
    MixedMm,
    /// First X-flip channel of the replica pair; non-Markovian.
    NmX1,
    /// Second X-flip channel, weight cos^2(t); non-Markovian.
    NmX2,
    /// 2:1 mixture of NmX1 and NmX2; collapses to a Markovian bit flip.
    MixedNmReplica,
    /// Depolarizing with the engineered rate q = a + b; non-Markovian.
    DepolQ,
    /// Depolarizing with r = a - b; non-Markovian.
    DepolR,
    /// Depolarizing with the mixture rate w = (q + r)/2 = a; Markovian.
    DepolMixed,
    /// Convex mixture `eta * first + (1 - eta) * second`.
    Mix {
        eta: f64,
        first: Box<ChannelFamily>,
        second: Box<ChannelFamily>,
    },
}

/// Convex mixture of two channel families with weight `eta` on the first.
pub fn mix(
    eta: f64,
    first: ChannelFamily,
    second: ChannelFamily,
) -> Result<ChannelFamily, ChannelError> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(ChannelError::EtaOutOfRange(eta));
    }
    Ok(ChannelFamily::Mix {
        eta,
        first: Box::new(first),
        second: Box::new(second),
    })
}

/// Identity weight (1 + e^-t)/2 shared by both Markovian flip channels.
pub fn prob_mm(t: f64) -> Result<f64, ChannelError> {
    if t < 0.0 {
        return Err(ChannelError::NegativeTime(t));
    }
    Ok((1.0 + (-t).exp()) / 2.0)
}

/// Identity weights (p1, p2) of the two non-Markovian X-flip channels.
pub fn probs_nm_replica(t: f64) -> Result<(f64, f64), ChannelError> {
    if t < 0.0 {
        return Err(ChannelError::NegativeTime(t));
    }
    let p1 = 1.5 * ((1.0 + (-t).exp()) / 2.0 - t.cos().powi(2) / 3.0);
    let p2 = t.cos().powi(2);
    if !(-1e-9..=1.0 + 1e-9).contains(&p1) {
        return Err(ChannelError::DomainViolation(p1, 1.0 - p1, 0.0, 0.0));
    }
    Ok((p1, p2))
}

/// The engineered depolarizing rates evaluated at one time.
///
/// `q = a + b` and `r = a - b` cross their own past values (non-Markovian),
/// while the even mixture `w = (q + r)/2 = a` is monotone (Markovian).
/// The design keeps `b <= a < 1 - b` so that all three stay in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignFunctions {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub r: f64,
    pub w: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn design_a(t: f64) -> f64 {
    0.5 * logistic(4.0 * (t - 2.0)) + 0.48 * logistic(4.5 * (t - 6.0))
}

fn design_b(t: f64) -> f64 {
    0.49 * (-(t - 4.0).powi(6)).exp()
}

fn design_a_dot(t: f64) -> f64 {
    let l1 = logistic(4.0 * (t - 2.0));
    let l2 = logistic(4.5 * (t - 6.0));
    0.5 * 4.0 * l1 * (1.0 - l1) + 0.48 * 4.5 * l2 * (1.0 - l2)
}

fn design_b_dot(t: f64) -> f64 {
    -6.0 * (t - 4.0).powi(5) * design_b(t)
}

/// Evaluates the engineered depolarizing rates a, b, q, r, w at time `t`.
///
/// `w` is returned as `a` itself, so `w == a` holds exactly; `q` and `r`
/// are the sum and difference.
pub fn design_functions(t: f64) -> Result<DesignFunctions, ChannelError> {
    if t < 0.0 {
        return Err(ChannelError::NegativeTime(t));
    }
    let a = design_a(t);
    let b = design_b(t);
    Ok(DesignFunctions {
        a,
        b,
        q: a + b,
        r: a - b,
        w: a,
    })
}

fn depol_probs(p: f64) -> Result<PauliProbs, ChannelError> {
    PauliProbs::new(1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p)
}

impl ChannelFamily {
    /// Pauli probability vector at time `t`.
    pub fn probs(&self, t: f64) -> Result<PauliProbs, ChannelError> {
        if t < 0.0 {
            return Err(ChannelError::NegativeTime(t));
        }
        match self {
            ChannelFamily::MarkovBitFlip => {
                let p = prob_mm(t)?;
                PauliProbs::new(p, 1.0 - p, 0.0, 0.0)
            }
            ChannelFamily::MarkovYFlip => {
                let p = prob_mm(t)?;
                PauliProbs::new(p, 0.0, 1.0 - p, 0.0)
            }
            ChannelFamily::MixedMm => {
                let p = prob_mm(t)?;
                let e = (1.0 - (-t).exp()) / 4.0;
                PauliProbs::new(p, e, e, 0.0)
            }
            ChannelFamily::NmX1 => {
                let (p1, _) = probs_nm_replica(t)?;
                PauliProbs::new(p1, 1.0 - p1, 0.0, 0.0)
            }
            ChannelFamily::NmX2 => {
                let (_, p2) = probs_nm_replica(t)?;
                PauliProbs::new(p2, 1.0 - p2, 0.0, 0.0)
            }
            ChannelFamily::MixedNmReplica => {
                let p = prob_mm(t)?;
                PauliProbs::new(p, 1.0 - p, 0.0, 0.0)
            }
            ChannelFamily::DepolQ => depol_probs(design_functions(t)?.q),
            ChannelFamily::DepolR => depol_probs(design_functions(t)?.r),
            ChannelFamily::DepolMixed => depol_probs(design_functions(t)?.w),
            ChannelFamily::Mix { eta, first, second } => {
                let a = first.probs(t)?.as_array();
                let b = second.probs(t)?.as_array();
                let m: Vec<f64> = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| eta * x + (1.0 - eta) * y)
                    .collect();
                PauliProbs::new(m[0], m[1], m[2], m[3])
            }
        }
    }

    /// Closed-form time derivative of the probability vector.
    pub fn probs_dot(&self, t: f64) -> Result<[f64; 4], ChannelError> {
        if t < 0.0 {
            return Err(ChannelError::NegativeTime(t));
        }
        let exp_decay = -(-t).exp() / 2.0;
        Ok(match self {
            ChannelFamily::MarkovBitFlip => [exp_decay, -exp_decay, 0.0, 0.0],
            ChannelFamily::MarkovYFlip => [exp_decay, 0.0, -exp_decay, 0.0],
            ChannelFamily::MixedMm => {
                [exp_decay, -exp_decay / 2.0, -exp_decay / 2.0, 0.0]
            }
            ChannelFamily::NmX1 => {
                let d = 1.5 * exp_decay + 0.5 * (2.0 * t).sin();
                [d, -d, 0.0, 0.0]
            }
            ChannelFamily::NmX2 => {
                let d = -(2.0 * t).sin();
                [d, -d, 0.0, 0.0]
            }
            ChannelFamily::MixedNmReplica => [exp_decay, -exp_decay, 0.0, 0.0],
            ChannelFamily::DepolQ => {
                let d = design_a_dot(t) + design_b_dot(t);
                [-0.75 * d, 0.25 * d, 0.25 * d, 0.25 * d]
            }
            ChannelFamily::DepolR => {
                let d = design_a_dot(t) - design_b_dot(t);
                [-0.75 * d, 0.25 * d, 0.25 * d, 0.25 * d]
            }
            ChannelFamily::DepolMixed => {
                let d = design_a_dot(t);
                [-0.75 * d, 0.25 * d, 0.25 * d, 0.25 * d]
            }
            ChannelFamily::Mix { eta, first, second } => {
                let a = first.probs_dot(t)?;
                let b = second.probs_dot(t)?;
                [
                    eta * a[0] + (1.0 - eta) * b[0],
                    eta * a[1] + (1.0 - eta) * b[1],
                    eta * a[2] + (1.0 - eta) * b[2],
                    eta * a[3] + (1.0 - eta) * b[3],
                ]
            }
        })
    }

    /// Central-difference derivative of the probability vector, for checking
    /// the registered closed forms (and for any future family without one).
    pub fn probs_dot_numeric(&self, t: f64, dt: f64) -> Result<[f64; 4], ChannelError> {
        assert!(dt > 0.0, "step must be positive");
        let lo = if t >= dt { t - dt } else { 0.0 };
        let hi = t + dt;
        let a = self.probs(lo)?.as_array();
        let b = self.probs(hi)?.as_array();
        let span = hi - lo;
        Ok([
            (b[0] - a[0]) / span,
            (b[1] - a[1]) / span,
            (b[2] - a[2]) / span,
            (b[3] - a[3]) / span,
        ])
    }

    /// Pauli eigenvalues lambda_a = sum_b H_ab p_b; lambda_0 is always 1.
    pub fn pauli_eigenvalues(&self, t: f64) -> Result<[f64; 4], ChannelError> {
        Ok(hadamard_apply(&self.probs(t)?.as_array()))
    }

    /// Decay rates (gamma_1, gamma_2, gamma_3) of the canonical master
    /// equation at time `t`.
    ///
    /// Uses the registered closed-form derivative when the family provides
    /// one (all built-in families do) and falls back to a central difference
    /// with step `dt` otherwise. Errors out when a Pauli eigenvalue sits
    /// within 1e-10 of zero, where the rates are singular.
    pub fn decay_rates(&self, t: f64, dt: f64) -> Result<[f64; 3], ChannelError> {
        let p_dot = match self.probs_dot(t) {
            Ok(d) => d,
            Err(ChannelError::NegativeTime(t)) => return Err(ChannelError::NegativeTime(t)),
            Err(_) => self.probs_dot_numeric(t, dt)?,
        };
        let lambda = self.pauli_eigenvalues(t)?;
        let lambda_dot = hadamard_apply(&p_dot);
        let mut mu = [0.0f64; 4];
        for beta in 1..4 {
            if lambda[beta].abs() < EIGENVALUE_FLOOR {
                return Err(ChannelError::SingularEigenvalue { index: beta, t });
            }
            mu[beta] = lambda_dot[beta] / lambda[beta];
        }
        let mut gamma = [0.0f64; 3];
        for (k, g) in gamma.iter_mut().enumerate() {
            let row = HADAMARD4[k + 1];
            *g = 0.25 * (row[0] * mu[0] + row[1] * mu[1] + row[2] * mu[2] + row[3] * mu[3]);
        }
        Ok(gamma)
    }

    /// Ideal process matrix: chi is diagonal in the Pauli basis for every
    /// family here, with the probability vector on the diagonal.
    pub fn chi_ideal(&self, t: f64) -> Result<ComplexMatrix, ChannelError> {
        Ok(ComplexMatrix::diag_real(&self.probs(t)?.as_array()))
    }
}

fn hadamard_apply(v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0f64; 4];
    for (i, o) in out.iter_mut().enumerate() {
        let row = HADAMARD4[i];
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

/// Linear Pauli conjugation sum `sum_a p_a sigma_a m sigma_a` without any
/// state validation; accepts arbitrary 2x2 inputs (e.g. bare Paulis).
pub fn pauli_map(probs: &PauliProbs, m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.dim(), 2, "Pauli channels act on single-qubit operators");
    let mut out = ComplexMatrix::zeros(2);
    for (k, &p) in probs.as_array().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let s = pauli(k);
        out = &out + &(&(&s * m) * &s).scale_real(p);
    }
    out
}

/// Applies the Pauli channel to a density matrix, validating the input
/// (Hermitian, unit trace, positive semidefinite, all within 1e-9).
pub fn apply_pauli(probs: &PauliProbs, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
    validate_density(rho)?;
    Ok(pauli_map(probs, rho))
}

pub(crate) fn validate_density(rho: &ComplexMatrix) -> Result<(), ChannelError> {
    if rho.dim() != 2 {
        return Err(ChannelError::InvalidState(format!(
            "expected a 2x2 density matrix, got {0}x{0}",
            rho.dim()
        )));
    }
    let dev = rho.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(ChannelError::InvalidState(format!(
            "not Hermitian (deviation {dev:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(ChannelError::InvalidState(format!(
            "trace {} + {}i != 1",
            tr.re, tr.im
        )));
    }
    // 2x2 Hermitian eigenvalues in closed form
    let half_tr = tr.re / 2.0;
    let det = (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re;
    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
    if half_tr - disc < -1e-9 {
        return Err(ChannelError::InvalidState(format!(
            "negative eigenvalue {:.3e}",
            half_tr - disc
        )));
    }
    Ok(())
}

/// Density matrices of the four tomography inputs |0>, |1>, |+>, |+_y>.
pub fn tomography_inputs() -> [ComplexMatrix; 4] {
    let h = Complex64::new(0.5, 0.0);
    let i2 = Complex64::new(0.0, 0.5);
    let one = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [
        ComplexMatrix::from_rows(&[&[one, z], &[z, z]]),
        ComplexMatrix::from_rows(&[&[z, z], &[z, one]]),
        ComplexMatrix::from_rows(&[&[h, h], &[h, h]]),
        ComplexMatrix::from_rows(&[&[h, -i2], &[i2, h]]),
    ]
}
