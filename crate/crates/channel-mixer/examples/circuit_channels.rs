//! Realises each channel as a system-plus-ancilla circuit and checks the
//! simulated outputs against the analytic Pauli map.

use channel_mixer::channels::{apply_pauli, tomography_inputs};
use channel_mixer::circuits::{angle_depol, angle_single, channel_from_circuit};
use channel_mixer::experiment::{ChannelId, ExperimentKind};

fn main() {
    println!("rotation angles used by the circuit constructions:");
    for p in [0.25, 0.5, 0.9] {
        println!(
            "  p = {p:.2}: flip ancilla angle {:.4}, depolarizing ancilla angle {:.4}",
            angle_single(p).unwrap(),
            angle_depol(p).unwrap()
        );
    }

    println!();
    println!("worst deviation between circuit simulation and analytic channel,");
    println!("over the four tomography inputs:");
    for kind in ExperimentKind::ALL {
        for channel in ChannelId::ALL {
            let mut worst = 0.0f64;
            for t in [0.3, 1.0, 2.4] {
                let circuit = kind
                    .circuit_for(channel, t)
                    .expect("sample times are valid for every family");
                let outputs = channel_from_circuit(&circuit).expect("circuits validate");
                let probs = kind.family_for(channel).probs(t).unwrap();
                for (rho_in, rho_out) in tomography_inputs().iter().zip(&outputs) {
                    let expected = apply_pauli(&probs, rho_in).unwrap();
                    worst = worst.max(rho_out.max_abs_diff(&expected));
                }
            }
            println!("  {kind} {channel}: {worst:.2e}");
        }
    }

    // One concrete output state, to make the agreement tangible: the
    // combined channel of the first experiment acting on |+><+| at t = 1.
    println!();
    let circuit = ExperimentKind::Mm.circuit_for(ChannelId::LT, 1.0).unwrap();
    let outputs = channel_from_circuit(&circuit).unwrap();
    println!("combined channel at t = 1 applied to |+><+| (simulated):");
    println!("{}", outputs[2]);
}
