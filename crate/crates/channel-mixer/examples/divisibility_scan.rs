//! Classifies intermediate maps: evolve to s, then ask whether the step
//! from s to t is completely positive. A single negative Choi eigenvalue
//! anywhere makes the channel non-Markovian.

use std::f64::consts::FRAC_PI_4;

use channel_mixer::channels::ChannelFamily;
use channel_mixer::divisibility::{markovianity_scan, Tolerances, Verdict};

fn main() {
    let s = 0.5;
    let grid: Vec<f64> = (0..=33).map(|k| s + 0.1 * k as f64).collect();
    let tol = Tolerances::default();

    // The two flip channels are divisible at every step; their equal
    // mixture is not, even though both ingredients are.
    for family in
        [ChannelFamily::MarkovBitFlip, ChannelFamily::MarkovYFlip, ChannelFamily::MixedMm]
    {
        let scan = markovianity_scan(&family, s, &grid, &tol).expect("grid starts at s");
        let most_negative = scan
            .reports
            .iter()
            .map(|r| r.min_eig)
            .fold(f64::INFINITY, f64::min);
        println!(
            "{family:?}: {} (most negative step eigenvalue {most_negative:+.6})",
            if scan.non_markovian { "non-Markovian" } else { "Markovian" }
        );
    }

    println!();
    println!("step-by-step view of the mixture, s = {s}:");
    println!("      t    min eig     verdict");
    let scan = markovianity_scan(&ChannelFamily::MixedMm, s, &grid, &tol).unwrap();
    for report in scan.reports.iter().step_by(4) {
        println!("  {:5.2}  {:+.6}   {}", report.t, report.min_eig, report.verdict);
    }

    // The oscillating family has times where its map is singular; steps from
    // such a reference cannot be classified and are flagged instead.
    println!();
    let singular_grid = [FRAC_PI_4, FRAC_PI_4 + 0.1, FRAC_PI_4 + 0.2];
    let scan = markovianity_scan(&ChannelFamily::NmX2, FRAC_PI_4, &singular_grid, &tol).unwrap();
    println!("oscillating family with the reference on a zero crossing:");
    for report in &scan.reports {
        match report.verdict {
            Verdict::Singular => println!("  t = {:.4}: singular, left unclassified", report.t),
            _ => println!("  t = {:.4}: {}", report.t, report.verdict),
        }
    }
}
