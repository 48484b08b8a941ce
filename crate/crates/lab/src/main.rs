use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirtomo_core::io::{
    read_probability_table, read_state_file, write_counts, write_diagnostics, write_probability_table,
    write_state_file, StateFile,
};
use dirtomo_core::measurement::SamplingScheme;
use dirtomo_core::reconstruction::{Estimate, Method};
use dirtomo_core::CouplingAngle;
use dirtomo_lab::campaigns::{
    accuracy_sweep, mixed_campaign, reconstruct, scatter, shot_noise_validation, theta_means, ReconstructRequest,
    ShotNoiseStates, StateSource,
};
use dirtomo_lab::config::{ExperimentConfig, DESK_SAMPLES, FULL_SAMPLES};
use dirtomo_lab::output::{emit, gnuplot_hints, hints_path, metadata_line, render_csv};
use dirtomo_lab::{LabError, LabResult};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "dirtomo", version, about = "Direct wavefunction tomography laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fraction of Haar states failing the sufficiency test or with D > 0.1, per θ.
    AccuracySweep(Common),
    /// Per-state accuracy and precision predictions at one θ (default 0.2).
    Scatter(Common),
    /// Mean precision ratio and mean D per θ.
    ThetaMeans(Common),
    /// Empirical finite-shot spread against the asymptotic error formulas.
    ShotNoise(ShotNoiseArgs),
    /// Simulate and reconstruct a single state.
    Reconstruct(ReconstructArgs),
    /// Weak distortion and exact residual for random density matrices.
    Mixed(MixedArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// One coupling or a comma-separated grid.
    #[arg(long, alias = "theta-grid", value_delimiter = ',')]
    theta: Vec<f64>,
    /// Number of random states (default 10^5, or 10^6 with --full).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    shots: u64,
    #[arg(long, default_value_t = 200)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use 10^6 random states.
    #[arg(long)]
    full: bool,
    /// Also write a gnuplot script to <out>.gp.
    #[arg(long)]
    gnuplot_hints: bool,
}

#[derive(Args)]
struct ShotNoiseArgs {
    #[command(flatten)]
    common: Common,
    /// Run on the flat state instead of Haar states.
    #[arg(long, conflicts_with = "state")]
    uniform: bool,
    /// Run on the pure state in this file.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value = "poisson")]
    scheme: SamplingScheme,
}

#[derive(Args)]
struct MixedArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2)]
    rank: usize,
}

#[derive(Args)]
struct ReconstructArgs {
    /// JSON state file (vector or density matrix).
    #[arg(long, required_unless_present = "probs", conflicts_with = "probs")]
    state: Option<PathBuf>,
    /// Probability-table CSV to reconstruct from instead of a state.
    #[arg(long)]
    probs: Option<PathBuf>,
    /// DWT, DST, ARBITRARY, MIXED_DWT or MIXED_DST.
    #[arg(long, default_value = "DWT")]
    method: Method,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    momentum: usize,
    /// Total shots per setting; omit for exact probabilities.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value = "multinomial")]
    scheme: SamplingScheme,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the estimate as a JSON state file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the diagnostics CSV.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Write the probability table the estimator used.
    #[arg(long)]
    emit_probs: Option<PathBuf>,
    /// Write the simulated counts (finite-shot runs only).
    #[arg(long)]
    emit_counts: Option<PathBuf>,
}

impl Common {
    fn config(&self, default_thetas: Vec<f64>, default_samples: u64) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        ExperimentConfig {
            d: self.d,
            thetas: if self.theta.is_empty() { default_thetas } else { self.theta.clone() },
            samples: self.samples.unwrap_or(if self.full { FULL_SAMPLES } else { default_samples }),
            shots: self.shots,
            reps: self.reps,
            seed: self.seed,
            workers: self.workers.unwrap_or(base.workers),
            ..base
        }
    }
}

fn write_campaign<R: Serialize>(campaign: &str, cfg: &ExperimentConfig, common: &Common, rows: &[R]) -> LabResult<()> {
    let bytes = render_csv(&metadata_line(campaign, cfg), rows)?;
    emit(common.out.as_deref(), &bytes)?;
    if common.gnuplot_hints {
        let out = common
            .out
            .as_deref()
            .ok_or_else(|| LabError::Config("--gnuplot-hints needs --out".into()))?;
        std::fs::write(hints_path(out), gnuplot_hints(campaign, out))?;
    }
    Ok(())
}

fn create(path: &Path) -> LabResult<File> {
    File::create(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

fn run_reconstruct(args: &ReconstructArgs) -> LabResult<()> {
    let source = match (&args.state, &args.probs) {
        (Some(path), _) => match read_state_file(path)? {
            StateFile::Vector(psi) => StateSource::Vector(psi),
            StateFile::Matrix(rho) => StateSource::Matrix(rho),
        },
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
            StateSource::Probabilities(read_probability_table(BufReader::new(file))?)
        }
        (None, None) => return Err(LabError::Config("either --state or --probs is required".into())),
    };
    let theta = args.theta.map(CouplingAngle::new).transpose()?;
    let report = reconstruct(&ReconstructRequest {
        source,
        method: args.method,
        theta,
        momentum: args.momentum,
        shots: args.shots,
        scheme: args.scheme,
        seed: args.seed,
    })?;
    print!("{}", report.summary());
    if let Some(path) = &args.out {
        let state = match &report.result.estimate {
            Estimate::Pure(psi) => StateFile::Vector(psi.clone()),
            Estimate::Mixed(rho) => StateFile::Matrix(rho.clone()),
        };
        write_state_file(path, &state)?;
    }
    if let Some(path) = &args.diagnostics {
        write_diagnostics(create(path)?, std::slice::from_ref(&report.result))?;
    }
    if let Some(path) = &args.emit_probs {
        write_probability_table(create(path)?, &report.probabilities)?;
    }
    if let Some(path) = &args.emit_counts {
        if report.counts.is_empty() {
            return Err(LabError::Config("--emit-counts needs a finite-shot run (--shots)".into()));
        }
        write_counts(create(path)?, &report.counts)?;
    }
    Ok(())
}

fn run(cli: Cli) -> LabResult<()> {
    match cli.command {
        Command::AccuracySweep(common) => {
            let cfg = common.config(dirtomo_lab::config::default_theta_grid(), DESK_SAMPLES);
            let rows = accuracy_sweep(&cfg)?;
            write_campaign("accuracy-sweep", &cfg, &common, &rows)
        }
        Command::Scatter(common) => {
            let cfg = common.config(vec![0.2], DESK_SAMPLES);
            let rows = scatter(&cfg)?;
            write_campaign("scatter", &cfg, &common, &rows)
        }
        Command::ThetaMeans(common) => {
            let cfg = common.config(dirtomo_lab::config::default_theta_grid(), DESK_SAMPLES);
            let rows = theta_means(&cfg)?;
            write_campaign("theta-means", &cfg, &common, &rows)
        }
        Command::ShotNoise(args) => {
            let mut cfg = args.common.config(vec![0.2], 1);
            cfg.scheme = args.scheme;
            let states = match (&args.state, args.uniform) {
                (Some(path), _) => match read_state_file(path)? {
                    StateFile::Vector(psi) => {
                        cfg.d = psi.dim();
                        ShotNoiseStates::Given(psi)
                    }
                    StateFile::Matrix(_) => {
                        return Err(LabError::Config("shot-noise validation takes a pure state".into()))
                    }
                },
                (None, true) => ShotNoiseStates::Uniform,
                (None, false) => ShotNoiseStates::Haar,
            };
            let rows = shot_noise_validation(&cfg, &states)?;
            write_campaign("shot-noise", &cfg, &args.common, &rows)
        }
        Command::Reconstruct(args) => run_reconstruct(&args),
        Command::Mixed(args) => {
            let mut cfg = args.common.config(
                dirtomo_lab::config::default_theta_grid(),
                dirtomo_lab::campaigns::DEFAULT_MIXED_SAMPLES,
            );
            cfg.rank = args.rank;
            let rows = mixed_campaign(&cfg)?;
            write_campaign("mixed", &cfg, &args.common, &rows)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
