//! Self-check suite behind the `verify` subcommand: fast, deterministic
//! cross-checks of the identities the rest of the library leans on.

use crate::channels::{design_functions, ChannelFamily};
use crate::circuits::channel_from_circuit;
use crate::divisibility::{
    bell_state, chi_from_transfer, choi_from_transfer, markovianity_scan, process_fidelity,
    tp_deviation, transfer_from_chi, Tolerances,
};
use crate::experiment::{ChannelId, ExperimentKind};
use crate::qmath::{Complex64, ComplexMatrix};
use crate::reconstruction::{
    chi_from_t, expected_counts, mle_chi, t_from_chi, CountsVector, DEFAULT_MLE_MAX_ITERS,
    DEFAULT_MLE_TOL,
};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn named_families() -> [ChannelFamily; 9] {
    [
        ChannelFamily::MarkovBitFlip,
        ChannelFamily::MarkovYFlip,
        ChannelFamily::MixedMm,
        ChannelFamily::NmX1,
        ChannelFamily::NmX2,
        ChannelFamily::MixedNmReplica,
        ChannelFamily::DepolQ,
        ChannelFamily::DepolR,
        ChannelFamily::DepolMixed,
    ]
}

fn lcg_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn probability_conservation() -> CheckResult {
    let mut worst = 0.0f64;
    for family in named_families() {
        for k in 0..=44 {
            let t = 0.2 * k as f64;
            match family.probs(t) {
                Ok(probs) => {
                    let p = probs.as_array();
                    let sum_dev = (p.iter().sum::<f64>() - 1.0).abs();
                    let range_dev = p
                        .iter()
                        .map(|v| (-v).max(v - 1.0).max(0.0))
                        .fold(0.0f64, f64::max);
                    worst = worst.max(sum_dev).max(range_dev);
                }
                Err(e) => {
                    return CheckResult {
                        name: "probability-conservation",
                        passed: false,
                        detail: format!("{family:?} at t={t}: {e}"),
                    }
                }
            }
        }
    }
    CheckResult {
        name: "probability-conservation",
        passed: worst < 1e-12,
        detail: format!("worst deviation {worst:.2e}"),
    }
}

fn circuit_channel_equivalence() -> CheckResult {
    let mut worst = 0.0f64;
    for kind in ExperimentKind::ALL {
        for channel in ChannelId::ALL {
            for t in [0.4, 1.7, 3.1] {
                let family = kind.family_for(channel);
                let outcome = kind.circuit_for(channel, t).map_err(|e| e.to_string()).and_then(
                    |circuit| channel_from_circuit(&circuit).map_err(|e| e.to_string()),
                );
                let outputs = match outcome {
                    Ok(outputs) => outputs,
                    Err(detail) => {
                        return CheckResult {
                            name: "circuit-channel-equivalence",
                            passed: false,
                            detail,
                        }
                    }
                };
                let probs = family.probs(t).expect("grid stays in the families' domain");
                for (rho_in, rho_out) in
                    crate::channels::tomography_inputs().iter().zip(&outputs)
                {
                    let expected = crate::channels::apply_pauli(&probs, rho_in)
                        .expect("tomography inputs are valid states");
                    worst = worst.max(rho_out.max_abs_diff(&expected));
                }
            }
        }
    }
    CheckResult {
        name: "circuit-channel-equivalence",
        passed: worst < 1e-9,
        detail: format!("worst output deviation {worst:.2e}"),
    }
}

fn transfer_round_trip() -> CheckResult {
    let mut next = lcg_stream(17);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut raw = ComplexMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                raw[(i, j)] = Complex64::new(next() - 0.5, next() - 0.5);
            }
        }
        let chi = ComplexMatrix::hermitian_from(&raw);
        let back = chi_from_transfer(&transfer_from_chi(&chi));
        worst = worst.max(back.max_abs_diff(&chi));
    }
    CheckResult {
        name: "process-transfer-round-trip",
        passed: worst < 1e-10,
        detail: format!("worst round-trip deviation {worst:.2e}"),
    }
}

fn identity_choi_shape() -> CheckResult {
    let w = choi_from_transfer(&ComplexMatrix::identity(4));
    let bell = bell_state();
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((w[(i, j)] - bell[i] * bell[j].conj()).norm());
        }
    }
    let chi = chi_from_transfer(&ComplexMatrix::identity(4));
    worst = worst.max(chi.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0])));
    CheckResult {
        name: "identity-choi-shape",
        passed: worst < 1e-12,
        detail: format!("worst deviation from the entangled projector {worst:.2e}"),
    }
}

fn trace_preservation_rows() -> CheckResult {
    let mut worst = 0.0f64;
    for family in named_families() {
        for t in [0.2, 1.3, 2.9] {
            let chi = family.chi_ideal(t).expect("grid stays in the families' domain");
            worst = worst.max(tp_deviation(&transfer_from_chi(&chi)));
        }
    }
    CheckResult {
        name: "trace-preservation-rows",
        passed: worst < 1e-12,
        detail: format!("worst row-sum deviation {worst:.2e}"),
    }
}

fn factorisation_round_trip() -> CheckResult {
    let mut worst = 0.0f64;
    for family in named_families() {
        let chi = family.chi_ideal(1.0).expect("t=1 is valid for every family");
        let outcome = t_from_chi(&chi)
            .and_then(|params| chi_from_t(&params))
            .map(|back| back.max_abs_diff(&chi));
        match outcome {
            Ok(dev) => worst = worst.max(dev),
            Err(e) => {
                return CheckResult {
                    name: "factorisation-round-trip",
                    passed: false,
                    detail: format!("{family:?}: {e}"),
                }
            }
        }
    }
    CheckResult {
        name: "factorisation-round-trip",
        passed: worst < 1e-9,
        detail: format!("worst round-trip deviation {worst:.2e}"),
    }
}

fn design_constraints() -> CheckResult {
    let mut worst_range = 0.0f64;
    let mut worst_w_rate = 0.0f64;
    let mut q_dip = f64::INFINITY;
    let mut r_dip = f64::INFINITY;
    for k in 0..=880 {
        let t = 0.01 * k as f64;
        let d = match design_functions(t) {
            Ok(d) => d,
            Err(e) => {
                return CheckResult {
                    name: "design-constraints",
                    passed: false,
                    detail: format!("t={t}: {e}"),
                }
            }
        };
        for v in [d.q, d.r, d.w] {
            worst_range = worst_range.max((-v).max(v - 1.0).max(0.0));
        }
        if d.w != d.a {
            return CheckResult {
                name: "design-constraints",
                passed: false,
                detail: format!("w and a differ at t={t}"),
            };
        }
        let w_dot = 4.0
            * ChannelFamily::DepolMixed
                .probs_dot(t)
                .expect("derivatives exist on the grid")[1];
        worst_w_rate = worst_w_rate.max(-w_dot);
        if (3.0..=5.0).contains(&t) {
            q_dip = q_dip.min(4.0 * ChannelFamily::DepolQ.probs_dot(t).unwrap()[1]);
            r_dip = r_dip.min(4.0 * ChannelFamily::DepolR.probs_dot(t).unwrap()[1]);
        }
    }
    let passed = worst_range < 1e-12 && worst_w_rate < 1e-12 && q_dip < 0.0 && r_dip < 0.0;
    CheckResult {
        name: "design-constraints",
        passed,
        detail: format!(
            "range dev {worst_range:.2e}, min w-rate {:.2e}, q-rate dip {q_dip:.3}, r-rate dip {r_dip:.3}",
            -worst_w_rate
        ),
    }
}

fn exact_counts_mle() -> CheckResult {
    let chi = ChannelFamily::MixedMm.chi_ideal(1.0).expect("t=1 is valid");
    let counts = CountsVector::new(expected_counts(&chi, 8192), 8192)
        .expect("expected counts of a physical process stay in range");
    let outcome = mle_chi(&counts, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS)
        .map_err(|e| e.to_string())
        .and_then(|result| {
            process_fidelity(&result.chi, &chi).map_err(|e| e.to_string())
        });
    match outcome {
        Ok(fidelity) => CheckResult {
            name: "exact-counts-mle",
            passed: fidelity >= 0.999,
            detail: format!("fidelity {fidelity:.6}"),
        },
        Err(detail) => CheckResult { name: "exact-counts-mle", passed: false, detail },
    }
}

fn derivative_consistency() -> CheckResult {
    let mut worst = 0.0f64;
    for family in named_families() {
        for k in 1..=18 {
            let t = 0.2 * k as f64;
            let closed = family.probs_dot(t).expect("derivatives exist on the grid");
            let numeric = family
                .probs_dot_numeric(t, 1e-5)
                .expect("numeric derivatives exist on the grid");
            for (a, b) in closed.iter().zip(numeric.iter()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    CheckResult {
        name: "derivative-consistency",
        passed: worst < 1e-6,
        detail: format!("worst closed-vs-numeric deviation {worst:.2e}"),
    }
}

fn rate_scan_agreement() -> CheckResult {
    let s = 0.5;
    let grid: Vec<f64> = (0..=33).map(|k| s + 0.1 * k as f64).collect();
    for (family, expect_nm) in
        [(ChannelFamily::MarkovBitFlip, false), (ChannelFamily::MixedMm, true)]
    {
        let scan = match markovianity_scan(&family, s, &grid, &Tolerances::default()) {
            Ok(scan) => scan,
            Err(e) => {
                return CheckResult {
                    name: "rate-scan-agreement",
                    passed: false,
                    detail: format!("{family:?}: {e}"),
                }
            }
        };
        let mut any_negative_rate = false;
        for &t in &grid {
            let rates = family.decay_rates(t, 1e-6).expect("rates exist on the grid");
            any_negative_rate |= rates.iter().any(|&g| g < -1e-6);
        }
        if scan.non_markovian != any_negative_rate || scan.non_markovian != expect_nm {
            return CheckResult {
                name: "rate-scan-agreement",
                passed: false,
                detail: format!(
                    "{family:?}: scan says non_markovian={}, rate sign says {}",
                    scan.non_markovian, any_negative_rate
                ),
            };
        }
    }
    CheckResult {
        name: "rate-scan-agreement",
        passed: true,
        detail: "flip family and its mixture agree with the rate sign test".into(),
    }
}

/// Runs every check; the CLI prints one line per entry.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        probability_conservation(),
        circuit_channel_equivalence(),
        transfer_round_trip(),
        identity_choi_shape(),
        trace_preservation_rows(),
        factorisation_round_trip(),
        design_constraints(),
        exact_counts_mle(),
        derivative_consistency(),
        rate_scan_agreement(),
    ]
}
