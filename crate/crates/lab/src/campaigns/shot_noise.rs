use dirtomo_core::analysis::{delta_psi_s, delta_psi_w, dwt_closed_form};
use dirtomo_core::measurement::{probability_table, sample_table};
use dirtomo_core::reconstruction::{dst_estimate, dwt_estimate, Method};
use dirtomo_core::state::{haar_random_state_with_rng, trace_distance_pure};
use dirtomo_core::{Complex64, CouplingAngle, PointerBasis, StateVector};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::seeding::{par_map, rng_for};

pub const MIN_REPS: u64 = 50;
pub const MIN_SHOTS: u64 = 3;

/// Which states the validation runs on.
#[derive(Debug, Clone, PartialEq)]
pub enum ShotNoiseStates {
    /// `samples` Haar states of dimension `d`.
    Haar,
    /// The flat state of dimension `d`.
    Uniform,
    Given(StateVector),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotNoiseRow {
    pub state_id: u64,
    pub method: &'static str,
    pub theta: f64,
    #[serde(rename = "N")]
    pub shots: u64,
    pub delta_emp: f64,
    pub delta_pred: f64,
    /// `delta_emp / delta_pred - 1`.
    pub rel_err: f64,
}

/// `√(Σ_r Σ_x |ψ̂_x - ψ̄_x|² / (R - 1))` around the sample mean `ψ̄`.
pub fn empirical_spread(estimates: &[Vec<Complex64>]) -> f64 {
    let r = estimates.len();
    let d = estimates[0].len();
    let mean: Vec<Complex64> = (0..d)
        .map(|x| estimates.iter().map(|e| e[x]).sum::<Complex64>() / r as f64)
        .collect();
    let ss: f64 = estimates
        .iter()
        .map(|e| e.iter().zip(&mean).map(|(a, m)| (a - m).norm_sqr()).sum::<f64>())
        .sum();
    (ss / (r as f64 - 1.0)).sqrt()
}

fn check_exact_pipeline(state_id: u64, psi: &StateVector, angles: &[CouplingAngle]) -> LabResult<()> {
    for &theta in angles {
        let est = dwt_estimate(&probability_table(psi, theta, 0)?, theta)?;
        let closed = dwt_closed_form(psi, theta)?;
        let gap = est
            .pure()
            .expect("pure estimate")
            .amplitudes()
            .iter()
            .zip(closed.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if gap > 1e-9 {
            return Err(LabError::Numerical(format!(
                "audit failed for state {state_id}: weak estimate deviates from closed form by {gap:e}"
            )));
        }
    }
    let strong = dst_estimate(&probability_table(psi, CouplingAngle::strong(), 0)?)?;
    let residual = trace_distance_pure(strong.pure().expect("pure estimate"), psi)?;
    if residual > 1e-9 {
        return Err(LabError::Numerical(format!(
            "audit failed for state {state_id}: strong estimate residual {residual:e}"
        )));
    }
    Ok(())
}

/// Repeats finite-shot weak (each θ) and strong reconstructions `R` times per
/// state and compares the spread of the estimates with the asymptotic
/// prediction. The weak scheme spends `N/2` shots on each of two bases, the
/// strong one `N/3` on each of three.
pub fn shot_noise_validation(cfg: &ExperimentConfig, states: &ShotNoiseStates) -> LabResult<Vec<ShotNoiseRow>> {
    cfg.validate()?;
    if cfg.shots < MIN_SHOTS {
        return Err(LabError::Config(format!(
            "shot-noise validation needs N >= {MIN_SHOTS} to split shots over three bases, got {}",
            cfg.shots
        )));
    }
    if cfg.reps < MIN_REPS {
        return Err(LabError::Config(format!(
            "shot-noise validation needs at least {MIN_REPS} repetitions, got {}",
            cfg.reps
        )));
    }
    let angles = cfg.angles()?;
    let psis: Vec<StateVector> = match states {
        ShotNoiseStates::Haar => (0..cfg.samples)
            .map(|i| haar_random_state_with_rng(cfg.d, &mut rng_for(cfg.seed, &[i])))
            .collect::<Result<_, _>>()?,
        ShotNoiseStates::Uniform => vec![StateVector::uniform(cfg.d)?],
        ShotNoiseStates::Given(psi) => vec![psi.clone()],
    };

    let mut rows = Vec::new();
    for (state_id, psi) in psis.iter().enumerate() {
        let state_id = state_id as u64;
        check_exact_pipeline(state_id, psi, &angles)?;
        // Stream 0 of each state's generator produced the state itself.
        for (slot, &theta) in angles.iter().enumerate() {
            let per_basis = cfg.shots / 2;
            let table = probability_table(psi, theta, 0)?;
            let estimates = par_map(cfg.workers, cfg.reps, |r| {
                let mut rng = rng_for(cfg.seed, &[state_id, 1 + slot as u64, r]);
                let counts = sample_table(&table, &PointerBasis::WEAK, per_basis, cfg.scheme, &mut rng)?;
                let probs: Vec<_> = counts.iter().map(|c| c.estimate()).collect();
                Ok(dwt_estimate(&probs, theta)?.pure().expect("pure estimate").amplitudes().to_vec())
            })?;
            let delta_emp = empirical_spread(&estimates);
            let delta_pred = delta_psi_w(psi, theta, 2 * per_basis)?;
            rows.push(ShotNoiseRow {
                state_id,
                method: Method::Dwt.label(),
                theta: theta.radians(),
                shots: cfg.shots,
                delta_emp,
                delta_pred,
                rel_err: delta_emp / delta_pred - 1.0,
            });
        }

        let strong = CouplingAngle::strong();
        let per_basis = cfg.shots / 3;
        let table = probability_table(psi, strong, 0)?;
        let slot = 1 + angles.len() as u64;
        let estimates = par_map(cfg.workers, cfg.reps, |r| {
            let mut rng = rng_for(cfg.seed, &[state_id, slot, r]);
            let counts = sample_table(&table, &PointerBasis::STRONG, per_basis, cfg.scheme, &mut rng)?;
            let probs: Vec<_> = counts.iter().map(|c| c.estimate()).collect();
            Ok(dst_estimate(&probs)?.pure().expect("pure estimate").amplitudes().to_vec())
        })?;
        let delta_emp = empirical_spread(&estimates);
        let delta_pred = delta_psi_s(psi, 3 * per_basis)?;
        rows.push(ShotNoiseRow {
            state_id,
            method: Method::Dst.label(),
            theta: strong.radians(),
            shots: cfg.shots,
            delta_emp,
            delta_pred,
            rel_err: delta_emp / delta_pred - 1.0,
        });
    }
    Ok(rows)
}
