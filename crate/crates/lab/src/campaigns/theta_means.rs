use dirtomo_core::analysis::{accuracy_d, delta_psi_s, delta_psi_w};
use dirtomo_core::state::haar_random_state_with_rng;
use serde::Serialize;

use super::{audit_weak, is_audited};
use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::seeding::{par_map, rng_for};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaMeansRow {
    pub theta: f64,
    /// Mean of `δψ_S / δψ_W`.
    pub mean_ratio: f64,
    #[serde(rename = "mean_D")]
    pub mean_distance: f64,
    #[serde(rename = "M")]
    pub samples: u64,
}

/// Mean precision ratio and mean weak-value distance per θ over the same
/// `M` Haar states.
pub fn theta_means(cfg: &ExperimentConfig) -> LabResult<Vec<ThetaMeansRow>> {
    cfg.validate()?;
    let angles = cfg.angles()?;
    let per_state = par_map(cfg.workers, cfg.samples, |i| {
        let psi = haar_random_state_with_rng(cfg.d, &mut rng_for(cfg.seed, &[i]))?;
        let strong = delta_psi_s(&psi, cfg.shots)?;
        angles
            .iter()
            .map(|&theta| {
                let report = accuracy_d(&psi, theta);
                if is_audited(i) {
                    audit_weak(i, &psi, theta, &report)?;
                }
                Ok((strong / delta_psi_w(&psi, theta, cfg.shots)?, report.distance))
            })
            .collect::<LabResult<Vec<_>>>()
    })?;
    let m = cfg.samples as f64;
    Ok(angles
        .iter()
        .enumerate()
        .map(|(k, theta)| {
            let (ratio_sum, distance_sum) = per_state
                .iter()
                .fold((0.0, 0.0), |(r, d), v| (r + v[k].0, d + v[k].1));
            ThetaMeansRow {
                theta: theta.radians(),
                mean_ratio: ratio_sum / m,
                mean_distance: distance_sum / m,
                samples: cfg.samples,
            }
        })
        .collect())
}
