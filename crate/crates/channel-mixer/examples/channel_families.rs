//! Walks the channel families: probability vectors over time, Pauli
//! eigenvalues, decay rates, and the two convex-mixture identities.

use channel_mixer::channels::{mix, ChannelFamily};

fn main() {
    let families = [
        ChannelFamily::MarkovBitFlip,
        ChannelFamily::MarkovYFlip,
        ChannelFamily::MixedMm,
        ChannelFamily::NmX1,
        ChannelFamily::NmX2,
        ChannelFamily::MixedNmReplica,
        ChannelFamily::DepolQ,
        ChannelFamily::DepolR,
        ChannelFamily::DepolMixed,
    ];

    println!("probability vectors (p_I, p_x, p_y, p_z) at t = 1.0:");
    for family in &families {
        let p = family.probs(1.0).expect("t = 1 is valid for every family");
        let p = p.as_array();
        println!("  {family:?}: ({:.4}, {:.4}, {:.4}, {:.4})", p[0], p[1], p[2], p[3]);
    }

    println!();
    println!("decay rates (gamma_x, gamma_y, gamma_z); negative entries mark");
    println!("the times where the channel is not divisible:");
    for family in [ChannelFamily::MarkovBitFlip, ChannelFamily::MixedMm, ChannelFamily::NmX2] {
        println!("  {family:?}:");
        for t in [0.5, 1.0, 2.0] {
            let g = family.decay_rates(t, 1e-6).expect("rates exist away from crossings");
            println!("    t = {t:.1}: ({:+.4}, {:+.4}, {:+.4})", g[0], g[1], g[2]);
        }
    }

    // Mixing the two flip channels in equal parts reproduces the combined
    // family, probability by probability.
    println!();
    println!("equal mixture of the two flip channels vs the combined family:");
    let mixture = mix(0.5, ChannelFamily::MarkovBitFlip, ChannelFamily::MarkovYFlip)
        .expect("eta = 0.5 is a valid weight");
    for t in [0.5, 1.5, 3.0] {
        let mixed = mixture.probs(t).unwrap();
        let direct = ChannelFamily::MixedMm.probs(t).unwrap();
        let dev = mixed
            .as_array()
            .iter()
            .zip(direct.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("  t = {t:.1}: max deviation {dev:.2e}");
    }

    // The same game with the two non-divisible channels at weights 2/3, 1/3.
    println!();
    println!("2:1 mixture of the non-divisible pair vs its replica family:");
    let replica = mix(2.0 / 3.0, ChannelFamily::NmX1, ChannelFamily::NmX2)
        .expect("eta = 2/3 is a valid weight");
    for t in [0.5, 1.5, 3.0] {
        let mixed = replica.probs(t).unwrap();
        let direct = ChannelFamily::MixedNmReplica.probs(t).unwrap();
        let dev = mixed
            .as_array()
            .iter()
            .zip(direct.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("  t = {t:.1}: max deviation {dev:.2e}");
    }
}
