//! End-to-end shot-mode run on a truncated grid: sampled tomography at
//! every time, resampled reconstructions, step classification, CSV output.
//! The full-size grids live behind `channel-mixer run`.

use channel_mixer::experiment::{
    emit_outputs, run_experiment, ExperimentConfig, ExperimentKind, Mode,
};

fn main() {
    // Default shot budget; fewer resamples and a short grid keep this quick.
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::Mm, Mode::Shots);
    cfg.t_max = 1.0;
    cfg.resamples = 5;
    cfg.output_dir = std::env::temp_dir().join("channel-mixer-example");

    let output = run_experiment(&cfg).expect("config validates");
    if !output.failures.is_empty() {
        for failure in &output.failures {
            eprintln!("failed point {} t = {}: {}", failure.channel, failure.t, failure.message);
        }
    }

    for series in &output.channels {
        let mean_fidelity: f64 =
            series.fidelity.iter().map(|p| p.mean).sum::<f64>() / series.fidelity.len() as f64;
        println!(
            "{}: mean reconstruction fidelity {:.4} over {} grid times, {}",
            series.channel,
            mean_fidelity,
            series.fidelity.len(),
            if series.non_markovian { "non-Markovian" } else { "Markovian" }
        );
        for report in &series.steps {
            println!(
                "    step {:.1} -> {:.1}: min eig {:+.4} (std {:.4}), {}",
                report.s,
                report.t,
                report.min_eig,
                report.min_eig_std.unwrap_or(f64::NAN),
                report.verdict
            );
        }
    }

    let written = emit_outputs(&output, &cfg.output_dir).expect("temp dir is writable");
    println!();
    for path in &written {
        println!("wrote {}", path.display());
    }
}
