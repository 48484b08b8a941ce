//! Monte-Carlo campaigns. Each returns its CSV rows; rendering and writing
//! are left to the caller.

mod accuracy;
mod mixed;
mod reconstruct;
mod scatter;
mod shot_noise;
mod theta_means;

pub use accuracy::{accuracy_sweep, AccuracyRow};
pub use mixed::{mixed_campaign, MixedRow, DEFAULT_MIXED_SAMPLES};
pub use reconstruct::{reconstruct, ReconstructReport, ReconstructRequest, StateSource};
pub use scatter::{scatter, ScatterRow};
pub use shot_noise::{shot_noise_validation, ShotNoiseRow, ShotNoiseStates};
pub use theta_means::{theta_means, ThetaMeansRow};

use dirtomo_core::analysis::AccuracyReport;
use dirtomo_core::measurement::probability_table;
use dirtomo_core::reconstruction::dwt_estimate;
use dirtomo_core::state::trace_distance_pure;
use dirtomo_core::{CouplingAngle, StateVector};

use crate::error::{LabError, LabResult};

/// One state in `AUDIT_STRIDE` is pushed through the full simulate-and-
/// reconstruct pipeline and compared with the closed form.
pub const AUDIT_STRIDE: u64 = 100;

const AUDIT_TOL: f64 = 1e-9;

pub(crate) fn is_audited(state_id: u64) -> bool {
    state_id.is_multiple_of(AUDIT_STRIDE)
}

/// Checks the closed-form accuracy report of `psi` against the weak-value
/// estimate computed from its exact probabilities.
pub(crate) fn audit_weak(state_id: u64, psi: &StateVector, theta: CouplingAngle, report: &AccuracyReport) -> LabResult<()> {
    let est = dwt_estimate(&probability_table(psi, theta, 0)?, theta)?;
    let distance = trace_distance_pure(psi, est.pure().expect("pure estimate"))?;
    let indicator = est.psi_tilde_w.expect("pure estimate");
    let sign_ok = report.psi_tilde_w.abs() < AUDIT_TOL || (indicator >= 0.0) == (report.psi_tilde_w >= 0.0);
    if (distance - report.distance).abs() > AUDIT_TOL || !sign_ok {
        return Err(LabError::Numerical(format!(
            "audit failed for state {state_id} at θ = {theta}: pipeline D = {distance:e}, closed form D = {:e}",
            report.distance
        )));
    }
    Ok(())
}
