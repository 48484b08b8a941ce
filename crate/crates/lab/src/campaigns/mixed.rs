use dirtomo_core::analysis::mixed_accuracy_d;
use dirtomo_core::measurement::mixed_probability_table;
use dirtomo_core::reconstruction::{mixed_dst_estimate, mixed_dwt_estimate, PointerTable};
use dirtomo_core::state::{random_density_matrix_with_rng, trace_distance_mixed};
use serde::Serialize;

use super::is_audited;
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::seeding::{par_map, rng_for};

/// Haar-induced density matrices per θ when `--samples` is not given.
pub const DEFAULT_MIXED_SAMPLES: u64 = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedRow {
    pub state_id: u64,
    pub d: usize,
    pub rank: usize,
    pub theta: f64,
    /// Weak-value distance from the closed form; empty at `θ = π/2`.
    #[serde(rename = "D_closed")]
    pub distance_closed: Option<f64>,
    /// Weak-value distance of the reconstructed matrix; empty at `θ = π/2`.
    #[serde(rename = "D_pipeline")]
    pub distance_pipeline: Option<f64>,
    /// Trace distance of the exact reconstruction to the true matrix.
    pub dst_residual: f64,
}

/// Mixed-state weak distortion (closed form and pipeline) and exact
/// reconstruction residual for random density matrices of rank `cfg.rank`.
pub fn mixed_campaign(cfg: &ExperimentConfig) -> LabResult<Vec<MixedRow>> {
    cfg.validate()?;
    let angles = cfg.angles()?;
    let per_state = par_map(cfg.workers, cfg.samples, |i| {
        let rho = random_density_matrix_with_rng(cfg.d, cfg.rank, &mut rng_for(cfg.seed, &[i]))?;
        angles
            .iter()
            .map(|&theta| {
                let table = PointerTable::from_probabilities(cfg.d, &mixed_probability_table(&rho, theta)?)?;
                let exact = mixed_dst_estimate(&table, theta)?;
                let dst_residual = trace_distance_mixed(exact.mixed().expect("mixed estimate"), &rho)?;
                let (closed, pipeline) = if theta.is_strong() {
                    (None, None)
                } else {
                    let weak = mixed_dwt_estimate(&table, theta)?;
                    (
                        Some(mixed_accuracy_d(&rho, theta)?),
                        Some(trace_distance_mixed(weak.mixed().expect("mixed estimate"), &rho)?),
                    )
                };
                if is_audited(i) {
                    let gap = match (closed, pipeline) {
                        (Some(a), Some(b)) => (a - b).abs(),
                        _ => 0.0,
                    };
                    if gap > 1e-9 || dst_residual > 1e-9 {
                        return Err(LabError::Numerical(format!(
                            "audit failed for matrix {i} at θ = {theta}: D gap {gap:e}, residual {dst_residual:e}"
                        )));
                    }
                }
                Ok(MixedRow {
                    state_id: i,
                    d: cfg.d,
                    rank: cfg.rank,
                    theta: theta.radians(),
                    distance_closed: closed,
                    distance_pipeline: pipeline,
                    dst_residual,
                })
            })
            .collect::<LabResult<Vec<_>>>()
    })?;
    Ok(per_state.into_iter().flatten().collect())
}
