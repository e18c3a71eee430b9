//! Channel families against hand-derived closed forms and the polynomial
//! spectral oracle.

mod common;

use channel_mixer::channels::{design_functions, mix, ChannelFamily};
use common::power_sum_mismatch;

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

#[test]
fn flip_probability_follows_the_exponential_relaxation() {
    // p(t) = (1 + e^{-t}) / 2, evaluated independently here.
    for t in [0.0f64, 0.4, 1.0, 2.5, 3.8] {
        let expected = 0.5 * (1.0 + (-t).exp());
        let p = ChannelFamily::MarkovBitFlip.probs(t).unwrap();
        assert!((p.as_array()[0] - expected).abs() < 1e-14);
        assert!((p.as_array()[1] - (1.0 - expected)).abs() < 1e-14);
    }
}

#[test]
fn oscillating_probability_is_a_squared_cosine() {
    for t in [0.0f64, 0.3, 1.0, 2.2, 3.7] {
        let expected = t.cos() * t.cos();
        let p = ChannelFamily::NmX2.probs(t).unwrap();
        assert!((p.as_array()[0] - expected).abs() < 1e-14);
    }
}

#[test]
fn replica_family_equals_the_two_to_one_mixture() {
    let mixture = mix(2.0 / 3.0, ChannelFamily::NmX1, ChannelFamily::NmX2).unwrap();
    for k in 0..=37 {
        let t = 0.1 * k as f64;
        let mixed = mixture.probs(t).unwrap();
        let direct = ChannelFamily::MixedNmReplica.probs(t).unwrap();
        for (a, b) in mixed.as_array().iter().zip(direct.as_array().iter()) {
            assert!((a - b).abs() < 1e-12, "t = {t}");
        }
    }
}

#[test]
fn process_matrix_spectra_match_the_polynomial_oracle() {
    for family in named_families() {
        for t in [0.2, 0.9, 1.7, 3.1] {
            let chi = family.chi_ideal(t).unwrap();
            let eig = chi.hermitian_eigen().unwrap();
            assert!(
                power_sum_mismatch(&chi, &eig.eigenvalues) < 1e-10,
                "{family:?} at t = {t}"
            );
            // The process matrix of a Pauli-diagonal channel is diagonal in
            // the Pauli basis, so its spectrum is the probability vector.
            let mut probs = family.probs(t).unwrap().as_array().to_vec();
            probs.sort_by(f64::total_cmp);
            let mut spectrum = eig.eigenvalues.clone();
            spectrum.sort_by(f64::total_cmp);
            for (p, l) in probs.iter().zip(&spectrum) {
                assert!((p - l).abs() < 1e-10, "{family:?} at t = {t}");
            }
        }
    }
}

#[test]
fn eigenvalue_vector_is_the_hadamard_image_of_the_probabilities() {
    // lambda_k = sum_b H_kb p_b with H the 4x4 Hadamard sign pattern.
    let signs = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    for family in named_families() {
        for t in [0.5, 1.3, 2.9] {
            let p = family.probs(t).unwrap();
            let p = p.as_array();
            let lambda = family.pauli_eigenvalues(t).unwrap();
            for k in 0..4 {
                let expected: f64 = (0..4).map(|b| signs[k][b] * p[b]).sum();
                assert!((lambda[k] - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn flip_channel_rates_are_constant_one_half() {
    for t in [0.1, 0.8, 2.0, 3.5] {
        let g = ChannelFamily::MarkovBitFlip.decay_rates(t, 1e-6).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-10);
        assert!(g[1].abs() < 1e-10);
        assert!(g[2].abs() < 1e-10);
    }
}

#[test]
fn mixture_rate_dips_negative_where_the_hyperbolic_tangent_says_so() {
    // gamma_z = -tanh(t/2) / 4 for the equal flip mixture.
    for t in [0.3, 1.0, 2.4, 3.6] {
        let g = ChannelFamily::MixedMm.decay_rates(t, 1e-6).unwrap();
        assert!((g[0] - 0.25).abs() < 1e-9);
        assert!((g[1] - 0.25).abs() < 1e-9);
        assert!((g[2] + (t / 2.0).tanh() / 4.0).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn oscillating_rate_is_the_double_angle_tangent() {
    for t in [0.2, 0.6, 1.0, 1.4] {
        let g = ChannelFamily::NmX2.decay_rates(t, 1e-6).unwrap();
        assert!((g[0] - (2.0 * t).tan()).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn depolarizing_rates_are_isotropic() {
    for family in [ChannelFamily::DepolQ, ChannelFamily::DepolR, ChannelFamily::DepolMixed] {
        for t in [1.0, 3.5, 4.2, 6.0] {
            let g = family.decay_rates(t, 1e-6).unwrap();
            assert!((g[0] - g[1]).abs() < 1e-10);
            assert!((g[1] - g[2]).abs() < 1e-10);
        }
    }
}

#[test]
fn design_functions_average_as_specified() {
    // q = a + b, r = a - b, w = a, hence w = (q + r) / 2 identically.
    for k in 0..=88 {
        let t = 0.1 * k as f64;
        let d = design_functions(t).unwrap();
        assert!((d.q - (d.a + d.b)).abs() < 1e-14);
        assert!((d.r - (d.a - d.b)).abs() < 1e-14);
        assert!((d.w - 0.5 * (d.q + d.r)).abs() < 1e-14);
    }
}

#[test]
fn mixture_weights_outside_the_interval_are_rejected() {
    assert!(mix(-0.1, ChannelFamily::MarkovBitFlip, ChannelFamily::MarkovYFlip).is_err());
    assert!(mix(1.1, ChannelFamily::MarkovBitFlip, ChannelFamily::MarkovYFlip).is_err());
    assert!(mix(0.0, ChannelFamily::MarkovBitFlip, ChannelFamily::MarkovYFlip).is_ok());
}

#[test]
fn negative_times_are_rejected_across_families() {
    for family in named_families() {
        assert!(family.probs(-0.01).is_err(), "{family:?}");
        assert!(family.chi_ideal(-0.01).is_err(), "{family:?}");
    }
}

#[test]
fn process_matrices_have_unit_trace() {
    for family in named_families() {
        for t in [0.0, 1.0, 3.0] {
            let chi = family.chi_ideal(t).unwrap();
            assert!((chi.trace().re - 1.0).abs() < 1e-12);
            assert!(chi.trace().im.abs() < 1e-12);
        }
    }
}
