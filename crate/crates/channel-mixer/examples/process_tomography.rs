//! Full tomography of one channel: sampled counts, linear inversion, and
//! the likelihood-maximising reconstruction.

use channel_mixer::channels::ChannelFamily;
use channel_mixer::divisibility::process_fidelity;
use channel_mixer::experiment::{ChannelId, ExperimentKind};
use channel_mixer::reconstruction::{
    chi_linear_inversion, mle_chi, run_tomography, states_from_counts, CountsVector,
    DEFAULT_MLE_MAX_ITERS, DEFAULT_MLE_TOL,
};

fn main() {
    let t = 1.0;
    let shots = 8192;
    let circuit = ExperimentKind::Mm
        .circuit_for(ChannelId::LT, t)
        .expect("t = 1 is a valid probe time");

    let counts = run_tomography(&circuit, shots, 42, false).expect("shots > 0");
    println!("sampled counts ({} shots per measurement run):", shots);
    println!("{}", CountsVector::CSV_HEADER);
    println!("{}", counts.csv_row(42));

    // Both outcomes of a shared measurement run add up to the shot budget.
    let n = counts.n;
    println!();
    println!("shared-run pairs: {} + {} = {}", n[0], n[1], n[0] + n[1]);
    println!("                  {} + {} = {}", n[4], n[5], n[4] + n[5]);

    let chi_p = chi_linear_inversion(&states_from_counts(&counts));
    println!();
    println!("linear inversion (can leave small negative eigenvalues):");
    println!("{chi_p}");

    let mle = mle_chi(&counts, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS)
        .expect("sampled counts are in range");
    println!(
        "likelihood maximisation ({} iterations, converged = {}):",
        mle.iterations, mle.converged
    );
    println!("{}", mle.chi);

    let ideal = ChannelFamily::MixedMm.chi_ideal(t).unwrap();
    let sampled = process_fidelity(&mle.chi, &ideal).unwrap();
    println!("process fidelity against the ideal channel: {sampled:.6}");

    // With exact Born expectations instead of sampled counts, the
    // reconstruction pipeline recovers the channel almost perfectly.
    let exact = run_tomography(&circuit, shots, 0, true).unwrap();
    let mle_exact = mle_chi(&exact, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS).unwrap();
    let recovered = process_fidelity(&mle_exact.chi, &ideal).unwrap();
    println!("same pipeline on exact expectations: fidelity {recovered:.6}");
}
