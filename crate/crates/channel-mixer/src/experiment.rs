//! End-to-end experiment pipeline: builds the three channels of an
//! experiment on a time grid, reconstructs each from (optionally sampled)
//! tomography, aggregates divisibility statistics over resamples, and
//! emits plottable CSV files plus a run manifest.
//!
//! Every random draw is seeded from (master seed, channel index, time
//! index, role, resample index), so results are independent of thread
//! scheduling and identical configs produce byte-identical outputs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::channels::{design_functions, prob_mm, probs_nm_replica, ChannelError, ChannelFamily};
use crate::circuits::{
    build_depol_circuit, build_flip_circuit, build_total_mm_circuit, derive_seed, Circuit,
    CircuitError, FlipAxis,
};
use crate::divisibility::{
    choi_from_transfer, classify_step, process_fidelity, transfer_from_chi, DivisibilityError,
    DivisibilityReport, Tolerances, TransferMatrix, Verdict,
};
use crate::qmath::ComplexMatrix;
use crate::reconstruction::{
    mle_chi, run_tomography, CountsVector, ReconstructionError, DEFAULT_MLE_MAX_ITERS,
    DEFAULT_MLE_TOL,
};

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_RESAMPLES: usize = 20;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_T_STEP: f64 = 0.1;
/// Trace-norm tolerance used instead of the analytic one when counts are
/// sampled.
pub const SHOT_EPS_TP: f64 = 0.05;
/// Shot-mode classification threshold: a step is not CP when its mean
/// minimum eigenvalue lies more than this many sample standard deviations
/// below zero.
pub const SHOT_SIGMA_FACTOR: f64 = 3.0;

/// Times closer than this are treated as the same grid point.
const TIME_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Reconstruction(#[from] ReconstructionError),
    #[error(transparent)]
    Divisibility(#[from] DivisibilityError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Two Markovian flip channels whose even mixture is non-Markovian.
    Mm,
    /// Two non-Markovian X-flip channels whose 2:1 mixture is Markovian.
    NmReplica,
    /// Two designed depolarizing channels with a Markovian mixture.
    NmDepol,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 3] =
        [ExperimentKind::Mm, ExperimentKind::NmReplica, ExperimentKind::NmDepol];

    /// The analytic family behind each of the experiment's three channels.
    pub fn family_for(&self, channel: ChannelId) -> ChannelFamily {
        match (self, channel) {
            (ExperimentKind::Mm, ChannelId::L1) => ChannelFamily::MarkovBitFlip,
            (ExperimentKind::Mm, ChannelId::L2) => ChannelFamily::MarkovYFlip,
            (ExperimentKind::Mm, ChannelId::LT) => ChannelFamily::MixedMm,
            (ExperimentKind::NmReplica, ChannelId::L1) => ChannelFamily::NmX1,
            (ExperimentKind::NmReplica, ChannelId::L2) => ChannelFamily::NmX2,
            (ExperimentKind::NmReplica, ChannelId::LT) => ChannelFamily::MixedNmReplica,
            (ExperimentKind::NmDepol, ChannelId::L1) => ChannelFamily::DepolQ,
            (ExperimentKind::NmDepol, ChannelId::L2) => ChannelFamily::DepolR,
            (ExperimentKind::NmDepol, ChannelId::LT) => ChannelFamily::DepolMixed,
        }
    }

    /// The ancilla circuit realising a channel at time `t`.
    pub fn circuit_for(&self, channel: ChannelId, t: f64) -> Result<Circuit, ExperimentError> {
        let circuit = match (self, channel) {
            (ExperimentKind::Mm, ChannelId::L1) => {
                build_flip_circuit(prob_mm(t)?, FlipAxis::X)?
            }
            (ExperimentKind::Mm, ChannelId::L2) => {
                build_flip_circuit(prob_mm(t)?, FlipAxis::Y)?
            }
            (ExperimentKind::Mm, ChannelId::LT) => build_total_mm_circuit(prob_mm(t)?)?,
            (ExperimentKind::NmReplica, ChannelId::L1) => {
                build_flip_circuit(probs_nm_replica(t)?.0, FlipAxis::X)?
            }
            (ExperimentKind::NmReplica, ChannelId::L2) => {
                build_flip_circuit(probs_nm_replica(t)?.1, FlipAxis::X)?
            }
            (ExperimentKind::NmReplica, ChannelId::LT) => {
                build_flip_circuit(prob_mm(t)?, FlipAxis::X)?
            }
            (ExperimentKind::NmDepol, ChannelId::L1) => {
                build_depol_circuit(design_functions(t)?.q)?
            }
            (ExperimentKind::NmDepol, ChannelId::L2) => {
                build_depol_circuit(design_functions(t)?.r)?
            }
            (ExperimentKind::NmDepol, ChannelId::LT) => {
                build_depol_circuit(design_functions(t)?.w)?
            }
        };
        Ok(circuit)
    }

    fn default_t_max(&self) -> f64 {
        match self {
            ExperimentKind::Mm => 3.8,
            ExperimentKind::NmReplica => 3.7,
            ExperimentKind::NmDepol => 8.8,
        }
    }

    fn default_s(&self) -> f64 {
        match self {
            ExperimentKind::Mm | ExperimentKind::NmReplica => 0.5,
            ExperimentKind::NmDepol => 3.0,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Mm => "mm",
            ExperimentKind::NmReplica => "nm-replica",
            ExperimentKind::NmDepol => "nm-depol",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mm" => Ok(ExperimentKind::Mm),
            "nm-replica" => Ok(ExperimentKind::NmReplica),
            "nm-depol" => Ok(ExperimentKind::NmDepol),
            other => Err(ExperimentError::Config(format!(
                "unknown experiment '{other}' (expected mm, nm-replica, or nm-depol)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelId {
    L1,
    L2,
    LT,
}

impl ChannelId {
    pub const ALL: [ChannelId; 3] = [ChannelId::L1, ChannelId::L2, ChannelId::LT];
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelId::L1 => "L1",
            ChannelId::L2 => "L2",
            ChannelId::LT => "LT",
        })
    }
}

impl FromStr for ChannelId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L1" => Ok(ChannelId::L1),
            "L2" => Ok(ChannelId::L2),
            "LT" => Ok(ChannelId::LT),
            other => Err(ExperimentError::Config(format!(
                "unknown channel '{other}' (expected L1, L2, or LT)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Ideal process matrices, no sampling; fidelities are trivially 1.
    Analytic,
    /// Sampled tomography, resampled counts, MLE reconstruction.
    Shots,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Analytic => "analytic",
            Mode::Shots => "shots",
        })
    }
}

impl FromStr for Mode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "shots" => Ok(Mode::Shots),
            other => Err(ExperimentError::Config(format!(
                "unknown mode '{other}' (expected analytic or shots)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub t_max: f64,
    pub t_step: f64,
    pub s: f64,
    pub shots: u64,
    pub resamples: usize,
    pub seed: u64,
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Built-in grid for each experiment: times 0..=t_max at step 0.1 with
    /// a reference s placed where every channel is still invertible. Shot
    /// mode swaps in the looser trace-norm tolerance.
    pub fn defaults(experiment: ExperimentKind, mode: Mode) -> Self {
        let tolerances = match mode {
            Mode::Analytic => Tolerances::default(),
            Mode::Shots => Tolerances { eps_tp: SHOT_EPS_TP, ..Tolerances::default() },
        };
        ExperimentConfig {
            experiment,
            t_max: experiment.default_t_max(),
            t_step: DEFAULT_T_STEP,
            s: experiment.default_s(),
            shots: DEFAULT_SHOTS,
            resamples: DEFAULT_RESAMPLES,
            seed: DEFAULT_SEED,
            mode,
            tolerances,
            output_dir: PathBuf::from("results"),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.t_step > 0.0) || !self.t_step.is_finite() {
            return Err(ExperimentError::Config(format!(
                "t_step must be positive, got {}",
                self.t_step
            )));
        }
        if !self.t_max.is_finite() {
            return Err(ExperimentError::Config(format!("t_max must be finite, got {}", self.t_max)));
        }
        if !self.s.is_finite() || self.s < 0.0 || self.s > self.t_max {
            return Err(ExperimentError::Config(format!(
                "s must lie in [0, t_max] = [0, {}], got {}",
                self.t_max, self.s
            )));
        }
        if self.resamples == 0 {
            return Err(ExperimentError::Config("resamples must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(ExperimentError::Config("shots must be at least 1".into()));
        }
        Ok(())
    }
}

/// Grid times 0, t_step, 2 t_step, ... up to t_max. A horizon shorter than
/// one step yields the empty grid, and downstream emitters then write
/// header-only files.
pub fn time_grid(t_max: f64, t_step: f64) -> Vec<f64> {
    if t_max < t_step {
        return Vec::new();
    }
    let count = (t_max / t_step + TIME_MATCH_TOL).floor() as usize;
    (0..=count).map(|k| k as f64 * t_step).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct FidelityPoint {
    pub t: f64,
    pub mean: f64,
    pub std: Option<f64>,
}

/// A point that could not be processed; the run continues without it.
#[derive(Clone, Debug)]
pub struct PointFailure {
    pub channel: ChannelId,
    pub t: f64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct ChannelSeries {
    pub channel: ChannelId,
    pub fidelity: Vec<FidelityPoint>,
    /// Classified steps from s to each grid time strictly past s. Shot mode
    /// aggregates over all resample pairings and fills `min_eig_std`.
    pub steps: Vec<DivisibilityReport>,
    /// Analytic reference curve on the same grid, for overplotting.
    pub theory: Vec<DivisibilityReport>,
    pub non_markovian: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub channels: Vec<ChannelSeries>,
    pub failures: Vec<PointFailure>,
}

/// Adds one Gaussian draw of width sqrt(n) to every count, rounded and
/// clamped to the physical range. Zero counts stay zero.
pub fn resample_counts(counts: &CountsVector, seed: u64) -> CountsVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shots = counts.shots as f64;
    let n = counts.n.map(|v| {
        let g: f64 = StandardNormal.sample(&mut rng);
        (v + (g * v.sqrt()).round()).clamp(0.0, shots)
    });
    CountsVector::new(n, counts.shots).expect("clamped counts stay in range")
}

fn mean_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

fn theory_steps(
    family: &ChannelFamily,
    s: f64,
    times: &[f64],
    tol: &Tolerances,
    channel: ChannelId,
    failures: &mut Vec<PointFailure>,
) -> Vec<DivisibilityReport> {
    let f_s = match family.chi_ideal(s) {
        Ok(chi) => transfer_from_chi(&chi),
        Err(e) => {
            failures.push(PointFailure { channel, t: s, message: e.to_string() });
            return Vec::new();
        }
    };
    let mut reports = Vec::new();
    for &t in times {
        if t <= s + TIME_MATCH_TOL {
            continue;
        }
        let step = family
            .chi_ideal(t)
            .map_err(DivisibilityError::from)
            .and_then(|chi| classify_step(&transfer_from_chi(&chi), &f_s, s, t, tol));
        match step {
            Ok(report) => reports.push(report),
            Err(e) => failures.push(PointFailure { channel, t, message: e.to_string() }),
        }
    }
    reports
}

fn analytic_series(
    cfg: &ExperimentConfig,
    channel: ChannelId,
    grid: &[f64],
    failures: &mut Vec<PointFailure>,
) -> ChannelSeries {
    let family = cfg.experiment.family_for(channel);
    let mut fidelity = Vec::new();
    for &t in grid {
        match family
            .chi_ideal(t)
            .map_err(DivisibilityError::from)
            .and_then(|chi| process_fidelity(&chi, &chi))
        {
            Ok(value) => fidelity.push(FidelityPoint { t, mean: value, std: None }),
            Err(e) => failures.push(PointFailure { channel, t, message: e.to_string() }),
        }
    }
    let steps = theory_steps(&family, cfg.s, grid, &cfg.tolerances, channel, failures);
    let non_markovian = steps.iter().any(|r| r.verdict == Verdict::NotCp);
    ChannelSeries { channel, fidelity, steps: steps.clone(), theory: steps, non_markovian }
}

struct TomoPoint {
    t: f64,
    in_grid: bool,
}

enum PointOutcome {
    Done {
        t: f64,
        in_grid: bool,
        fidelity: Option<FidelityPoint>,
        transfers: Vec<TransferMatrix>,
    },
    Failed {
        t: f64,
        message: String,
    },
}

fn reconstruct_point(
    cfg: &ExperimentConfig,
    channel: ChannelId,
    channel_idx: u64,
    point_idx: u64,
    point: &TomoPoint,
) -> Result<PointOutcome, String> {
    let t = point.t;
    let family = cfg.experiment.family_for(channel);
    let circuit = cfg.experiment.circuit_for(channel, t).map_err(|e| e.to_string())?;
    // Expected counts as the base; all measurement noise enters through the
    // resampler below, so the resample spread is an honest error bar for the
    // reported means.
    let counts = run_tomography(&circuit, cfg.shots, 0, true).map_err(|e| e.to_string())?;
    let ideal = family.chi_ideal(t).map_err(|e| e.to_string())?;

    let mut fidelities = Vec::with_capacity(cfg.resamples);
    let mut transfers = Vec::with_capacity(cfg.resamples);
    for r in 0..cfg.resamples {
        let noise_seed = derive_seed(cfg.seed, &[channel_idx, point_idx, 1, r as u64]);
        let noisy = resample_counts(&counts, noise_seed);
        let result =
            mle_chi(&noisy, DEFAULT_MLE_TOL, DEFAULT_MLE_MAX_ITERS).map_err(|e| e.to_string())?;
        fidelities.push(process_fidelity(&result.chi, &ideal).map_err(|e| e.to_string())?);
        transfers.push(transfer_from_chi(&result.chi));
    }
    let (mean, std) = mean_std(&fidelities);
    let fidelity = point.in_grid.then_some(FidelityPoint { t, mean, std });
    Ok(PointOutcome::Done { t, in_grid: point.in_grid, fidelity, transfers })
}

fn shot_series(
    cfg: &ExperimentConfig,
    channel: ChannelId,
    channel_idx: u64,
    grid: &[f64],
    failures: &mut Vec<PointFailure>,
) -> ChannelSeries {
    let family = cfg.experiment.family_for(channel);
    let mut points: Vec<TomoPoint> =
        grid.iter().map(|&t| TomoPoint { t, in_grid: true }).collect();
    if !grid.iter().any(|&t| (t - cfg.s).abs() <= TIME_MATCH_TOL) {
        points.push(TomoPoint { t: cfg.s, in_grid: false });
    }

    let outcomes: Vec<PointOutcome> = points
        .par_iter()
        .enumerate()
        .map(|(idx, point)| {
            reconstruct_point(cfg, channel, channel_idx, idx as u64, point).unwrap_or_else(
                |message| PointOutcome::Failed { t: point.t, message },
            )
        })
        .collect();

    let mut fidelity = Vec::new();
    let mut reconstructed: Vec<(f64, bool, Vec<TransferMatrix>)> = Vec::new();
    for outcome in outcomes {
        match outcome {
            PointOutcome::Done { t, in_grid, fidelity: fid, transfers } => {
                if let Some(point) = fid {
                    fidelity.push(point);
                }
                reconstructed.push((t, in_grid, transfers));
            }
            PointOutcome::Failed { t, message } => {
                failures.push(PointFailure { channel, t, message });
            }
        }
    }

    let reference = reconstructed
        .iter()
        .find(|(t, _, _)| (t - cfg.s).abs() <= TIME_MATCH_TOL)
        .map(|(_, _, transfers)| {
            transfers
                .iter()
                .map(|f_s| {
                    let svals = f_s.singular_values();
                    let largest = svals.iter().cloned().fold(0.0f64, f64::max);
                    let singular =
                        largest <= 0.0 || svals.iter().any(|&v| v <= cfg.tolerances.pinv_cutoff * largest);
                    (f_s.pseudo_inverse(cfg.tolerances.pinv_cutoff), singular)
                })
                .collect::<Vec<_>>()
        });

    let mut steps = Vec::new();
    if let Some(reference) = &reference {
        let eligible: Vec<(f64, &[TransferMatrix])> = reconstructed
            .iter()
            .filter(|(t, in_grid, _)| *in_grid && *t > cfg.s + TIME_MATCH_TOL)
            .map(|(t, _, transfers)| (*t, transfers.as_slice()))
            .collect();
        let aggregated: Vec<Result<DivisibilityReport, (f64, String)>> = eligible
            .par_iter()
            .map(|(t, transfers)| aggregate_step(cfg, *t, transfers, reference))
            .collect();
        for result in aggregated {
            match result {
                Ok(report) => steps.push(report),
                Err((t, message)) => failures.push(PointFailure { channel, t, message }),
            }
        }
    } else {
        failures.push(PointFailure {
            channel,
            t: cfg.s,
            message: "no reconstruction at the reference time, steps skipped".into(),
        });
    }

    let theory_times: Vec<f64> = steps.iter().map(|r| r.t).collect();
    let theory =
        theory_steps(&family, cfg.s, &theory_times, &Tolerances::default(), channel, failures);
    let non_markovian = steps.iter().any(|r| r.verdict == Verdict::NotCp);
    ChannelSeries { channel, fidelity, steps, theory, non_markovian }
}

fn aggregate_step(
    cfg: &ExperimentConfig,
    t: f64,
    transfers: &[TransferMatrix],
    reference: &[(TransferMatrix, bool)],
) -> Result<DivisibilityReport, (f64, String)> {
    if reference.iter().any(|(_, singular)| *singular) {
        return Ok(DivisibilityReport {
            s: cfg.s,
            t,
            min_eig: f64::NAN,
            min_eig_std: None,
            trace_norm: f64::NAN,
            verdict: Verdict::Singular,
            singular: true,
        });
    }
    let mut min_eigs = Vec::with_capacity(transfers.len() * reference.len());
    let mut choi_sum = ComplexMatrix::zeros(4);
    for f_t in transfers {
        for (pinv_s, _) in reference {
            let w = choi_from_transfer(&f_t.matmul(pinv_s));
            let eig = w.hermitian_eigen().map_err(|e| (t, e.to_string()))?;
            min_eigs.push(eig.min_eigenvalue());
            choi_sum = &choi_sum + &w;
        }
    }
    if min_eigs.is_empty() {
        return Err((t, "no reconstructions to pair with the reference".into()));
    }
    // The pair-averaged Choi matrix is the step estimate; the per-pair
    // eigenvalue scatter only supplies the error bar. The minimum eigenvalue
    // of each noisy pair sits systematically below the true minimum whenever
    // levels are nearly degenerate, so averaging the eigenvalues instead
    // would push the curve down by the noise scale even for a CP step.
    let choi_mean = choi_sum.scale_real(1.0 / min_eigs.len() as f64);
    let mean_eig = choi_mean.hermitian_eigen().map_err(|e| (t, e.to_string()))?;
    let min_eig = mean_eig.min_eigenvalue();
    let trace_norm = choi_mean.trace_norm();
    let (_, std_min) = mean_std(&min_eigs);
    let threshold = -SHOT_SIGMA_FACTOR * std_min.unwrap_or(0.0);
    let verdict = if min_eig < threshold || (trace_norm - 1.0).abs() > cfg.tolerances.eps_tp {
        Verdict::NotCp
    } else {
        Verdict::CpStep
    };
    Ok(DivisibilityReport {
        s: cfg.s,
        t,
        min_eig,
        min_eig_std: std_min,
        trace_norm,
        verdict,
        singular: false,
    })
}

/// Runs one experiment under the given config. Failed grid points are
/// collected in the output rather than aborting the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, ExperimentError> {
    cfg.validate()?;
    let grid = time_grid(cfg.t_max, cfg.t_step);
    let mut channels = Vec::with_capacity(ChannelId::ALL.len());
    let mut failures = Vec::new();
    for (channel_idx, &channel) in ChannelId::ALL.iter().enumerate() {
        let series = match cfg.mode {
            Mode::Analytic => analytic_series(cfg, channel, &grid, &mut failures),
            Mode::Shots => shot_series(cfg, channel, channel_idx as u64, &grid, &mut failures),
        };
        channels.push(series);
    }
    Ok(RunOutput { config: cfg.clone(), channels, failures })
}

fn fmt_field(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_field).unwrap_or_default()
}

fn config_header(cfg: &ExperimentConfig, channel: Option<ChannelId>) -> String {
    let mut lines = vec![format!("# experiment = {}", cfg.experiment)];
    if let Some(channel) = channel {
        lines.push(format!("# channel = {channel}"));
    }
    lines.push(format!("# mode = {}", cfg.mode));
    lines.push(format!("# t_max = {}", cfg.t_max));
    lines.push(format!("# t_step = {}", cfg.t_step));
    lines.push(format!("# s = {}", cfg.s));
    lines.push(format!("# shots = {}", cfg.shots));
    lines.push(format!("# resamples = {}", cfg.resamples));
    lines.push(format!("# seed = {}", cfg.seed));
    lines.push(format!("# eps_class = {:e}", cfg.tolerances.eps_class));
    lines.push(format!("# eps_tp = {:e}", cfg.tolerances.eps_tp));
    lines.push(format!("# pinv_cutoff = {:e}", cfg.tolerances.pinv_cutoff));
    lines.push("# count_noise = gaussian-sqrt-n".into());
    lines.join("\n")
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, contents)
        .map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })
}

/// Writes per-channel fidelity, step, and theory CSVs plus the manifest.
/// Returns the paths written. Output is a pure function of the run record,
/// so identical runs produce identical bytes.
pub fn emit_outputs(output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir)
        .map_err(|source| ExperimentError::Io { path: dir.to_path_buf(), source })?;
    let cfg = &output.config;
    let mut written = Vec::new();

    for series in &output.channels {
        let header = config_header(cfg, Some(series.channel));

        let mut fidelity = format!("{header}\nt,mean,std\n");
        for point in &series.fidelity {
            fidelity.push_str(&format!(
                "{},{},{}\n",
                fmt_field(point.t),
                fmt_field(point.mean),
                fmt_opt(point.std)
            ));
        }
        let path = dir.join(format!("fidelity_{}.csv", series.channel));
        write_file(&path, &fidelity)?;
        written.push(path);

        let mut mineig = format!("{header}\nt,s,mean,std,theory,verdict\n");
        for report in &series.steps {
            let theory = series
                .theory
                .iter()
                .find(|r| (r.t - report.t).abs() <= TIME_MATCH_TOL)
                .map(|r| r.min_eig)
                .unwrap_or(f64::NAN);
            mineig.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_field(report.t),
                fmt_field(report.s),
                fmt_field(report.min_eig),
                fmt_opt(report.min_eig_std),
                fmt_field(theory),
                report.verdict
            ));
        }
        let path = dir.join(format!("mineig_{}.csv", series.channel));
        write_file(&path, &mineig)?;
        written.push(path);

        let mut theory = format!("{header}\nt,s,min_eig\n");
        for report in &series.theory {
            theory.push_str(&format!(
                "{},{},{}\n",
                fmt_field(report.t),
                fmt_field(report.s),
                fmt_field(report.min_eig)
            ));
        }
        let path = dir.join(format!("theory_{}.csv", series.channel));
        write_file(&path, &theory)?;
        written.push(path);
    }

    let mut manifest = String::new();
    manifest.push_str(&format!("experiment = {}\n", cfg.experiment));
    manifest.push_str(&format!("mode = {}\n", cfg.mode));
    manifest.push_str(&format!("t_max = {}\n", cfg.t_max));
    manifest.push_str(&format!("t_step = {}\n", cfg.t_step));
    manifest.push_str(&format!("s = {}\n", cfg.s));
    manifest.push_str(&format!("shots = {}\n", cfg.shots));
    manifest.push_str(&format!("resamples = {}\n", cfg.resamples));
    manifest.push_str(&format!("seed = {}\n", cfg.seed));
    manifest.push_str(&format!("eps_class = {:e}\n", cfg.tolerances.eps_class));
    manifest.push_str(&format!("eps_tp = {:e}\n", cfg.tolerances.eps_tp));
    manifest.push_str(&format!("pinv_cutoff = {:e}\n", cfg.tolerances.pinv_cutoff));
    manifest.push_str("count_noise = gaussian-sqrt-n\n");
    manifest.push_str(&format!(
        "channels = {}\n",
        ChannelId::ALL.map(|c| c.to_string()).join(",")
    ));
    manifest.push_str(&format!(
        "grid_points = {}\n",
        time_grid(cfg.t_max, cfg.t_step).len()
    ));
    for series in &output.channels {
        manifest.push_str(&format!(
            "verdict_{} = {}\n",
            series.channel,
            if series.non_markovian { "non-markovian" } else { "markovian" }
        ));
    }
    manifest.push_str(&format!("failures = {}\n", output.failures.len()));
    let path = dir.join("manifest.txt");
    write_file(&path, &manifest)?;
    written.push(path);

    Ok(written)
}
