use dirtomo_core::analysis::{analysis_row, psi_tilde_from_psi_tilde_w, ratio_bound_at};
use dirtomo_core::state::haar_random_state_with_rng;
use serde::Serialize;

use super::{audit_weak, is_audited};
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::seeding::{par_map, rng_for};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub state_id: u64,
    pub d: usize,
    pub theta: f64,
    #[serde(rename = "D")]
    pub distance: f64,
    #[serde(rename = "D_approx")]
    pub distance_approx: Option<f64>,
    #[serde(rename = "psi_tilde_W")]
    pub psi_tilde_w: f64,
    pub bound: f64,
    #[serde(rename = "delta_psi_W")]
    pub delta_psi_w: f64,
    #[serde(rename = "delta_psi_S")]
    pub delta_psi_s: Option<f64>,
    pub ratio: Option<f64>,
    pub ratio_bound: Option<f64>,
    /// Ratio bound with `ψ̃` recovered from the measurable `ψ̃_W`.
    pub dashed_bound: Option<f64>,
}

/// Per-state accuracy and precision predictions at a single θ.
pub fn scatter(cfg: &ExperimentConfig) -> LabResult<Vec<ScatterRow>> {
    cfg.validate()?;
    let angles = cfg.angles()?;
    let [theta] = angles[..] else {
        return Err(LabError::Config(format!(
            "scatter takes exactly one θ, got {}",
            angles.len()
        )));
    };
    par_map(cfg.workers, cfg.samples, |i| {
        let psi = haar_random_state_with_rng(cfg.d, &mut rng_for(cfg.seed, &[i]))?;
        let row = analysis_row(i, &psi, theta, cfg.shots)?;
        if is_audited(i) {
            audit_weak(i, &psi, theta, &dirtomo_core::analysis::accuracy_d(&psi, theta))?;
        }
        let dashed = ratio_bound_at(psi_tilde_from_psi_tilde_w(row.psi_tilde_w, theta), theta, cfg.d);
        Ok(ScatterRow {
            state_id: row.state_id,
            d: row.d,
            theta: row.theta,
            distance: row.distance,
            distance_approx: row.distance_approx,
            psi_tilde_w: row.psi_tilde_w,
            bound: row.bound,
            delta_psi_w: row.delta_psi_w,
            delta_psi_s: row.delta_psi_s,
            ratio: row.ratio,
            ratio_bound: row.ratio_bound,
            dashed_bound: dashed,
        })
    })
}
