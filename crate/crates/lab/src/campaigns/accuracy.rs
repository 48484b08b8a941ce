use dirtomo_core::analysis::accuracy_d;
use dirtomo_core::state::haar_random_state_with_rng;
use serde::Serialize;

use super::{audit_weak, is_audited};
use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::seeding::{par_map, rng_for};

/// Trace distance above which a weak-value estimate counts as inaccurate.
pub const DISTANCE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub theta: f64,
    /// Fraction of states with `ψ̃_W < 0`.
    #[serde(rename = "p_W")]
    pub p_w: f64,
    /// Fraction of states with `D > 0.1`.
    #[serde(rename = "p_D")]
    pub p_d: f64,
    #[serde(rename = "M")]
    pub samples: u64,
    pub d: usize,
    pub seed: u64,
}

/// For every θ, the fraction of `M` Haar states whose weak-value estimate
/// fails the sufficiency test and the fraction with `D > 0.1`. The same
/// states are used for every θ.
pub fn accuracy_sweep(cfg: &ExperimentConfig) -> LabResult<Vec<AccuracyRow>> {
    cfg.validate()?;
    let angles = cfg.angles()?;
    let flags = par_map(cfg.workers, cfg.samples, |i| {
        let psi = haar_random_state_with_rng(cfg.d, &mut rng_for(cfg.seed, &[i]))?;
        angles
            .iter()
            .map(|&theta| {
                let report = accuracy_d(&psi, theta);
                if is_audited(i) {
                    audit_weak(i, &psi, theta, &report)?;
                }
                Ok((report.psi_tilde_w < 0.0, report.distance > DISTANCE_THRESHOLD))
            })
            .collect::<LabResult<Vec<_>>>()
    })?;
    let m = cfg.samples as f64;
    Ok(angles
        .iter()
        .enumerate()
        .map(|(k, theta)| {
            let negative = flags.iter().filter(|f| f[k].0).count() as f64;
            let inaccurate = flags.iter().filter(|f| f[k].1).count() as f64;
            AccuracyRow {
                theta: theta.radians(),
                p_w: negative / m,
                p_d: inaccurate / m,
                samples: cfg.samples,
                d: cfg.d,
                seed: cfg.seed,
            }
        })
        .collect())
}
