use std::f64::consts::PI;

use dirtomo_core::analysis::{accuracy_d, dwt_closed_form, mixed_accuracy_d};
use dirtomo_core::measurement::{
    mixed_probability_table, momentum_frame, probability_table, sample_table, SamplingScheme, ShotCounts,
};
use dirtomo_core::reconstruction::{
    arbitrary_theta_estimate, dst_estimate, dwt_estimate, mixed_dst_estimate, mixed_dwt_estimate, Estimate, Method,
    PointerTable, ReconstructionResult,
};
use dirtomo_core::state::{trace_distance_mixed, trace_distance_pure};
use dirtomo_core::{Complex64, CouplingAngle, DensityMatrix, PointerBasis, PointerProbabilities, StateVector};

use crate::error::{LabError, LabResult};
use crate::output::scheme_label;
use crate::seeding::rng_for;

/// Coupling used by the weak and arbitrary estimators when none is given.
pub const DEFAULT_WEAK_THETA: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Vector(StateVector),
    Matrix(DensityMatrix),
    /// A measured or previously exported probability table; there is no
    /// true state to compare with.
    Probabilities(Vec<PointerProbabilities>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructRequest {
    pub source: StateSource,
    pub method: Method,
    pub theta: Option<CouplingAngle>,
    pub momentum: usize,
    /// Total shots per setting; `None` reconstructs from exact probabilities.
    pub shots: Option<u64>,
    pub scheme: SamplingScheme,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructReport {
    pub result: ReconstructionResult,
    pub shots: Option<u64>,
    pub scheme: SamplingScheme,
    pub momentum: usize,
    /// The table the estimator consumed (exact or frequency estimates).
    pub probabilities: Vec<PointerProbabilities>,
    pub counts: Vec<ShotCounts>,
    /// Trace distance of the estimate to the true state.
    pub trace_distance: Option<f64>,
    /// Closed-form weak-value distance for the weak estimators.
    pub predicted_distance: Option<f64>,
    /// Closed-form weak-value state for the pure weak estimator.
    pub predicted_estimate: Option<StateVector>,
}

fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn bases_for(method: Method) -> &'static [PointerBasis] {
    match method {
        Method::Dwt | Method::MixedDwt => &PointerBasis::WEAK,
        _ => &PointerBasis::STRONG,
    }
}

fn resolve_theta(method: Method, theta: Option<CouplingAngle>) -> LabResult<CouplingAngle> {
    match (method, theta) {
        (Method::Dst | Method::MixedDst, None) => Ok(CouplingAngle::strong()),
        (Method::Dst, Some(t)) if !t.is_strong() => Err(config_err(format!(
            "DST runs at θ = π/2; got θ = {t} (use ARBITRARY for other couplings)"
        ))),
        (_, Some(t)) => Ok(t),
        (_, None) => Ok(CouplingAngle::new(DEFAULT_WEAK_THETA)?),
    }
}

fn sample(
    table: Vec<PointerProbabilities>,
    req: &ReconstructRequest,
) -> LabResult<(Vec<PointerProbabilities>, Vec<ShotCounts>)> {
    let Some(shots) = req.shots else {
        return Ok((table, Vec::new()));
    };
    let bases = bases_for(req.method);
    let per_basis = shots / bases.len() as u64;
    if per_basis == 0 {
        return Err(config_err(format!(
            "{shots} shots cannot be split over {} bases",
            bases.len()
        )));
    }
    let counts = sample_table(&table, bases, per_basis, req.scheme, &mut rng_for(req.seed, &[]))?;
    let probs = counts.iter().map(ShotCounts::estimate).collect();
    Ok((probs, counts))
}

fn estimate_pure(method: Method, probs: &[PointerProbabilities], theta: CouplingAngle) -> LabResult<ReconstructionResult> {
    Ok(match method {
        Method::Dwt => dwt_estimate(probs, theta)?,
        Method::Dst => dst_estimate(probs)?,
        Method::Arbitrary => arbitrary_theta_estimate(probs, theta)?,
        Method::MixedDwt | Method::MixedDst => unreachable!("mixed methods take a pointer table"),
    })
}

fn estimate_mixed(method: Method, d: usize, probs: &[PointerProbabilities], theta: CouplingAngle) -> LabResult<ReconstructionResult> {
    let table = PointerTable::from_probabilities(d, probs)?;
    match method {
        Method::MixedDwt if theta.is_strong() => Err(config_err("MIXED_DWT is undefined at θ = π/2")),
        Method::MixedDwt => Ok(mixed_dwt_estimate(&table, theta)?),
        Method::MixedDst => Ok(mixed_dst_estimate(&table, theta)?),
        _ => unreachable!("pure methods take a single-momentum table"),
    }
}

/// The closed-form weak-value state brought to the same frame and phase
/// convention as the pipeline estimate at `momentum`.
fn predicted_weak_state(psi: &StateVector, theta: CouplingAngle, momentum: usize) -> LabResult<StateVector> {
    let closed = dwt_closed_form(&momentum_frame(psi, momentum), theta)?;
    if momentum == 0 {
        return Ok(closed);
    }
    let d = psi.dim();
    let unramped: Vec<Complex64> = closed
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| a * Complex64::from_polar(1.0, 2.0 * PI * (x * momentum) as f64 / d as f64))
        .collect();
    Ok(StateVector::normalize_and_fix_phase(&unramped)?)
}

fn refuse_pathological(psi: &StateVector, momentum: usize) -> LabResult<()> {
    if !momentum_frame(psi, momentum).is_pathological() {
        return Ok(());
    }
    let remedy = (0..psi.dim())
        .find(|&p| !momentum_frame(psi, p).is_pathological())
        .map_or_else(
            || "no momentum in 0..d gives a non-zero amplitude sum".to_string(),
            |p| format!("post-select on a different momentum state instead, e.g. --momentum {p}"),
        );
    Err(LabError::Numerical(format!(
        "the amplitude sum of this state vanishes for momentum {momentum}, so it cannot be reconstructed there; {remedy}"
    )))
}

/// Simulates the measurement of a state (or takes a given probability table)
/// and reconstructs it.
pub fn reconstruct(req: &ReconstructRequest) -> LabResult<ReconstructReport> {
    match &req.source {
        StateSource::Vector(psi) => {
            if req.method.is_mixed() {
                return Err(config_err(format!("{} needs a density-matrix state file", req.method)));
            }
            if req.momentum >= psi.dim() {
                return Err(config_err(format!("momentum {} out of range for d = {}", req.momentum, psi.dim())));
            }
            refuse_pathological(psi, req.momentum)?;
            let theta = resolve_theta(req.method, req.theta)?;
            let (probs, counts) = sample(probability_table(psi, theta, req.momentum)?, req)?;
            let result = estimate_pure(req.method, &probs, theta)?;
            let estimate = result.pure().expect("pure estimate");
            let trace_distance = Some(trace_distance_pure(estimate, psi)?);
            let (predicted_distance, predicted_estimate) = if req.method == Method::Dwt {
                (
                    Some(accuracy_d(&momentum_frame(psi, req.momentum), theta).distance),
                    Some(predicted_weak_state(psi, theta, req.momentum)?),
                )
            } else {
                (None, None)
            };
            Ok(ReconstructReport {
                result,
                shots: req.shots,
                scheme: req.scheme,
                momentum: req.momentum,
                probabilities: probs,
                counts,
                trace_distance,
                predicted_distance,
                predicted_estimate,
            })
        }
        StateSource::Matrix(rho) => {
            if !req.method.is_mixed() {
                return Err(config_err(format!(
                    "{} reconstructs pure states; use MIXED_DWT or MIXED_DST for a density matrix",
                    req.method
                )));
            }
            if !rho.is_psd() {
                return Err(config_err("the density matrix in the state file is not positive semidefinite"));
            }
            let theta = resolve_theta(req.method, req.theta)?;
            let (probs, counts) = sample(mixed_probability_table(rho, theta)?, req)?;
            let result = estimate_mixed(req.method, rho.dim(), &probs, theta)?;
            let trace_distance = Some(trace_distance_mixed(result.mixed().expect("mixed estimate"), rho)?);
            let predicted_distance = match req.method {
                Method::MixedDwt => Some(mixed_accuracy_d(rho, theta)?),
                _ => None,
            };
            Ok(ReconstructReport {
                result,
                shots: req.shots,
                scheme: req.scheme,
                momentum: 0,
                probabilities: probs,
                counts,
                trace_distance,
                predicted_distance,
                predicted_estimate: None,
            })
        }
        StateSource::Probabilities(table) => {
            if req.shots.is_some() {
                return Err(config_err("--shots applies to simulated states, not to a probability table"));
            }
            let first = table.first().ok_or_else(|| config_err("probability table is empty"))?;
            let theta = req.theta.unwrap_or(first.theta);
            let result = if req.method.is_mixed() {
                let d = table.iter().map(|p| p.x.max(p.momentum)).max().unwrap_or(0) + 1;
                estimate_mixed(req.method, d, table, theta)?
            } else {
                estimate_pure(req.method, table, theta)?
            };
            Ok(ReconstructReport {
                result,
                shots: None,
                scheme: req.scheme,
                momentum: first.momentum,
                probabilities: table.clone(),
                counts: Vec::new(),
                trace_distance: None,
                predicted_distance: None,
                predicted_estimate: None,
            })
        }
    }
}

fn push_opt<T: std::fmt::Display>(out: &mut String, key: &str, value: Option<T>) {
    match value {
        Some(v) => out.push_str(&format!("{key}: {v}\n")),
        None => out.push_str(&format!("{key}: n/a\n")),
    }
}

impl ReconstructReport {
    /// Human-readable `key: value` summary.
    pub fn summary(&self) -> String {
        let r = &self.result;
        let mut out = String::new();
        out.push_str(&format!("method: {}\n", r.method));
        out.push_str(&format!("theta: {}\n", r.theta.radians()));
        out.push_str(&format!("momentum: {}\n", self.momentum));
        match self.shots {
            Some(n) => out.push_str(&format!("shots: {n} ({})\n", scheme_label(self.scheme))),
            None => out.push_str("shots: exact\n"),
        }
        match &r.estimate {
            Estimate::Pure(psi) => {
                for (x, a) in psi.amplitudes().iter().enumerate() {
                    out.push_str(&format!("estimate[{x}]: {} {}\n", a.re, a.im));
                }
            }
            Estimate::Mixed(rho) => {
                for x in 0..rho.dim() {
                    let row: Vec<String> = (0..rho.dim())
                        .map(|y| {
                            let z = rho.get(x, y);
                            format!("{}{:+}i", z.re, z.im)
                        })
                        .collect();
                    out.push_str(&format!("estimate[{x}]: {}\n", row.join(" ")));
                }
                out.push_str(&format!("min_eigenvalue: {}\n", rho.min_eigenvalue()));
            }
        }
        push_opt(&mut out, "trace_distance", self.trace_distance);
        push_opt(&mut out, "psi_tilde_W", r.psi_tilde_w);
        push_opt(&mut out, "sufficiency_ok", r.sufficiency_ok);
        push_opt(&mut out, "bound_value", r.bound_value);
        push_opt(&mut out, "predicted_D", self.predicted_distance);
        if let Some(pred) = &self.predicted_estimate {
            for (x, a) in pred.amplitudes().iter().enumerate() {
                out.push_str(&format!("predicted[{x}]: {} {}\n", a.re, a.im));
            }
        }
        out
    }
}
