//! Command line front end over the library pipelines.
//!
//! Exit codes: 0 on success, 2 on a configuration problem, 3 when a run
//! completed only partially or a check failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use channel_mixer::divisibility::{markovianity_scan, process_fidelity, DivisibilityReport};
use channel_mixer::experiment::{
    emit_outputs, run_experiment, time_grid, ChannelId, ExperimentConfig, ExperimentKind, Mode,
    DEFAULT_RESAMPLES, DEFAULT_SEED, DEFAULT_SHOTS, DEFAULT_T_STEP,
};
use channel_mixer::reconstruction::{
    chi_linear_inversion, mle_chi, run_tomography, states_from_counts, CountsVector,
    DEFAULT_MLE_MAX_ITERS, DEFAULT_MLE_TOL,
};
use channel_mixer::verify;

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

const TIME_MATCH_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "channel-mixer",
    version,
    about = "Pauli channel mixtures: circuit simulation, process tomography, divisibility analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: tomography, reconstruction, step classification, CSV output.
    Run(RunArgs),
    /// Analytic divisibility scan; writes one report CSV per channel.
    Scan(ScanArgs),
    /// Tomography of a single channel at one time; prints counts and process matrices.
    Tomo(TomoArgs),
    /// Built-in invariant suite; one line per check.
    Verify,
}

#[derive(Args)]
struct GridArgs {
    /// Which experiment: mm, nm-replica, or nm-depol.
    #[arg(long)]
    experiment: ExperimentKind,
    /// Largest grid time; defaults to the experiment's own horizon.
    #[arg(long)]
    t_max: Option<f64>,
    /// Grid spacing.
    #[arg(long, default_value_t = DEFAULT_T_STEP)]
    t_step: f64,
    /// Reference time the intermediate maps start from; defaults per experiment.
    #[arg(long)]
    s: Option<f64>,
    /// Tolerance on the smallest Choi eigenvalue before a step counts as not CP.
    #[arg(long)]
    eps_class: Option<f64>,
    /// Tolerance on the trace-norm deviation from 1.
    #[arg(long)]
    eps_tp: Option<f64>,
    /// Singular-value cutoff when inverting the reference map.
    #[arg(long)]
    pinv_cutoff: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// shots (sampled tomography) or analytic (ideal process matrices).
    #[arg(long, default_value = "shots")]
    mode: Mode,
    /// Measurement shots per tomography run.
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    /// Count resamplings per grid point.
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    resamples: usize,
    /// Master seed; every sampled number derives from it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory for the CSV files and manifest.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Output directory for the per-channel report CSVs.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct TomoArgs {
    /// Which experiment the channel belongs to: mm, nm-replica, or nm-depol.
    #[arg(long)]
    experiment: ExperimentKind,
    /// Which channel: L1, L2, or LT.
    #[arg(long, default_value = "LT")]
    channel: ChannelId,
    /// Time at which to probe the channel.
    #[arg(long)]
    t: f64,
    /// Measurement shots per tomography run.
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    /// Seed for the sampled counts.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Use exact Born expectations instead of sampled counts.
    #[arg(long)]
    exact: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Tomo(args) => cmd_tomo(args),
        Command::Verify => cmd_verify(),
    };
    ExitCode::from(code)
}

/// Sizes the worker pool from CHANNEL_MIXER_THREADS; 0 or unset picks the
/// number of cores.
fn configure_threads() -> Result<(), String> {
    let raw = match std::env::var("CHANNEL_MIXER_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("cannot read CHANNEL_MIXER_THREADS: {e}")),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("CHANNEL_MIXER_THREADS must be a non-negative integer, got '{raw}'"))?;
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot size the worker pool: {e}"))
}

fn apply_grid(cfg: &mut ExperimentConfig, grid: &GridArgs) {
    if let Some(t_max) = grid.t_max {
        cfg.t_max = t_max;
    }
    cfg.t_step = grid.t_step;
    if let Some(s) = grid.s {
        cfg.s = s;
    }
    if let Some(v) = grid.eps_class {
        cfg.tolerances.eps_class = v;
    }
    if let Some(v) = grid.eps_tp {
        cfg.tolerances.eps_tp = v;
    }
    if let Some(v) = grid.pinv_cutoff {
        cfg.tolerances.pinv_cutoff = v;
    }
}

fn cmd_run(args: RunArgs) -> u8 {
    let mut cfg = ExperimentConfig::defaults(args.grid.experiment, args.mode);
    apply_grid(&mut cfg, &args.grid);
    cfg.shots = args.shots;
    cfg.resamples = args.resamples;
    cfg.seed = args.seed;
    cfg.output_dir = args.out;

    let output = match run_experiment(&cfg) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let written = match emit_outputs(&output, &cfg.output_dir) {
        Ok(written) => written,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    for path in &written {
        println!("wrote {}", path.display());
    }
    for series in &output.channels {
        println!("{}: {}", series.channel, verdict_word(series.non_markovian));
    }
    if output.failures.is_empty() {
        EXIT_OK
    } else {
        for failure in &output.failures {
            eprintln!("failed point {} t = {}: {}", failure.channel, failure.t, failure.message);
        }
        eprintln!("{} grid point(s) failed; outputs cover the rest", output.failures.len());
        EXIT_PARTIAL
    }
}

fn verdict_word(non_markovian: bool) -> &'static str {
    if non_markovian {
        "non-Markovian"
    } else {
        "Markovian"
    }
}

fn cmd_scan(args: ScanArgs) -> u8 {
    let mut cfg = ExperimentConfig::defaults(args.grid.experiment, Mode::Analytic);
    apply_grid(&mut cfg, &args.grid);
    cfg.output_dir = args.out;
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }

    let grid: Vec<f64> = time_grid(cfg.t_max, cfg.t_step)
        .into_iter()
        .filter(|&t| t >= cfg.s - TIME_MATCH_TOL)
        .map(|t| t.max(cfg.s))
        .collect();

    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        eprintln!("error: cannot create {}: {e}", cfg.output_dir.display());
        return EXIT_CONFIG;
    }

    for &channel in &ChannelId::ALL {
        let family = cfg.experiment.family_for(channel);
        let scan = match markovianity_scan(&family, cfg.s, &grid, &cfg.tolerances) {
            Ok(scan) => scan,
            Err(e) => {
                eprintln!("error scanning {channel}: {e}");
                return EXIT_PARTIAL;
            }
        };
        let path = cfg.output_dir.join(format!("scan_{channel}.csv"));
        if let Err(e) = write_scan_csv(&path, &cfg, channel, &scan.reports) {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        println!("wrote {}", path.display());
        let singular = scan.reports.iter().filter(|r| r.singular).count();
        if singular > 0 {
            println!("{channel}: {singular} singular step(s) left unclassified");
        }
        println!("{}: {}", channel, verdict_word(scan.non_markovian));
    }
    EXIT_OK
}

fn write_scan_csv(
    path: &Path,
    cfg: &ExperimentConfig,
    channel: ChannelId,
    reports: &[DivisibilityReport],
) -> Result<(), String> {
    let mut lines = vec![
        format!("# experiment = {}", cfg.experiment),
        format!("# channel = {channel}"),
        format!("# s = {}", cfg.s),
        format!("# t_max = {}", cfg.t_max),
        format!("# t_step = {}", cfg.t_step),
        format!("# eps_class = {:e}", cfg.tolerances.eps_class),
        format!("# eps_tp = {:e}", cfg.tolerances.eps_tp),
        format!("# pinv_cutoff = {:e}", cfg.tolerances.pinv_cutoff),
        DivisibilityReport::CSV_HEADER.to_string(),
    ];
    let experiment = cfg.experiment.to_string();
    let channel = channel.to_string();
    for report in reports {
        lines.push(report.csv_row(&experiment, &channel));
    }
    lines.push(String::new());
    std::fs::write(path, lines.join("\n"))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_tomo(args: TomoArgs) -> u8 {
    let family = args.experiment.family_for(args.channel);
    let circuit = match args.experiment.circuit_for(args.channel, args.t) {
        Ok(circuit) => circuit,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let counts = match run_tomography(&circuit, args.shots, args.seed, args.exact) {
        Ok(counts) => counts,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    println!("{}", CountsVector::CSV_HEADER);
    println!("{}", counts.csv_row(args.seed));
    println!();

    let chi_p = chi_linear_inversion(&states_from_counts(&counts));
    println!("linear-inversion process matrix:");
    println!("{chi_p}");

    let mle = match mle_chi(&counts, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS) {
        Ok(mle) => mle,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARTIAL;
        }
    };
    println!(
        "likelihood-maximising process matrix ({} iterations, converged = {}):",
        mle.iterations, mle.converged
    );
    println!("{}", mle.chi);

    let chi_id = match family.chi_ideal(args.t) {
        Ok(chi_id) => chi_id,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match process_fidelity(&mle.chi, &chi_id) {
        Ok(fidelity) => println!("process fidelity against the ideal channel: {fidelity:.6}"),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARTIAL;
        }
    }
    if mle.converged {
        EXIT_OK
    } else {
        eprintln!("optimiser stopped before converging; reporting its best point");
        EXIT_PARTIAL
    }
}

fn cmd_verify() -> u8 {
    let results = verify::run_all();
    let mut failed = 0usize;
    for result in &results {
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!("{status} {} ({})", result.name, result.detail);
        if !result.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} checks passed", results.len());
        EXIT_OK
    } else {
        eprintln!("{failed} of {} checks failed", results.len());
        EXIT_PARTIAL
    }
}
