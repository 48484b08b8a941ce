use std::f64::consts::FRAC_PI_2;

use dirtomo_core::measurement::SamplingScheme;
use dirtomo_core::CouplingAngle;

use crate::error::{LabError, LabResult};

/// Haar states per θ at desk scale.
pub const DESK_SAMPLES: u64 = 100_000;

/// Haar states per θ with `--full`.
pub const FULL_SAMPLES: u64 = 1_000_000;

/// Coupling grid spanning the weak regime up to full strength.
pub fn default_theta_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.25, FRAC_PI_2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub thetas: Vec<f64>,
    /// Number of random states `M`.
    pub samples: u64,
    /// Total shots `N` per position setting, split evenly over the measured bases.
    pub shots: u64,
    /// Finite-shot repetitions `R` per state.
    pub reps: u64,
    pub seed: u64,
    pub workers: usize,
    /// Rank of random density matrices (mixed campaign).
    pub rank: usize,
    pub scheme: SamplingScheme,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 10,
            thetas: default_theta_grid(),
            samples: DESK_SAMPLES,
            shots: 1_000_000,
            reps: 200,
            seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            rank: 2,
            scheme: SamplingScheme::MultinomialWithDiscard,
        }
    }
}

fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn validate(&self) -> LabResult<()> {
        if self.d < 2 {
            return Err(config_err(format!("d must be at least 2, got {}", self.d)));
        }
        if self.thetas.is_empty() {
            return Err(config_err("at least one θ is required"));
        }
        self.angles()?;
        if self.samples == 0 {
            return Err(config_err("samples must be at least 1"));
        }
        if self.shots == 0 {
            return Err(config_err("shots must be at least 1"));
        }
        if self.reps == 0 {
            return Err(config_err("reps must be at least 1"));
        }
        if self.workers == 0 {
            return Err(config_err("workers must be at least 1"));
        }
        if self.rank == 0 || self.rank > self.d {
            return Err(config_err(format!("rank must lie in 1..={}, got {}", self.d, self.rank)));
        }
        Ok(())
    }

    pub fn angles(&self) -> LabResult<Vec<CouplingAngle>> {
        self.thetas
            .iter()
            .map(|&t| {
                CouplingAngle::new(t).map_err(|_| config_err(format!("θ = {t} is outside (0, π/2]")))
            })
            .collect()
    }
}
