//! Closed-form predictions: the weak-value distortion and its accuracy, the
//! sufficiency bound, asymptotic shot-noise errors of the weak and strong
//! estimators, their ratio, and the mixed-state weak-value matrix.
//!
//! Shot budgets are totals: the weak estimator splits `N` evenly over the two
//! bases it measures (`N/2` each), the strong one over three (`N/3` each).
//! Counts are taken as Poisson, so `Var(n_j) = N_b P_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::CouplingAngle;
use crate::state::{trace_norm_hermitian, wavefunction_stats, DensityMatrix, StateVector, PATHOLOGICAL_TOL};

/// `ψ_W,x = ψ_x(ψ̃ - ε ψ*_x) / 𝒩`, evaluated in the `ψ̃ ≥ 0` phase of `psi`.
///
/// Not re-phased: for `ψ̃ = 0` the result is `-|ψ_x|² / √⟨|ψ_x|²⟩`.
pub fn dwt_closed_form(psi: &StateVector, theta: CouplingAngle) -> Result<StateVector> {
    let psi = psi.with_fixed_phase();
    let psi_tilde = psi.psi_tilde();
    let eps = theta.eps();
    let raw: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .map(|a| a * (psi_tilde - eps * a.conj()))
        .collect();
    StateVector::normalized(&raw)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    /// Trace distance `𝒟 = ε σ_ψ / 𝒩` between `ψ` and its weak-value estimate.
    pub distance: f64,
    /// `ε σ_ψ / ψ̃`; `None` when `ψ̃ = 0`.
    pub distance_approx: Option<f64>,
    /// `ψ̃_W = (ψ̃² - ε) / 𝒩`.
    pub psi_tilde_w: f64,
    /// [`dwt_error_bound`] at `theta`.
    pub bound: f64,
    pub theta: CouplingAngle,
}

pub fn accuracy_d(psi: &StateVector, theta: CouplingAngle) -> AccuracyReport {
    let stats = wavefunction_stats(psi, theta);
    let eps = stats.eps_theta;
    let distance = (eps * stats.sigma_psi / stats.norm_n).min(1.0);
    let distance_approx =
        (stats.psi_tilde > PATHOLOGICAL_TOL).then(|| eps * stats.sigma_psi / stats.psi_tilde);
    AccuracyReport {
        distance,
        distance_approx,
        psi_tilde_w: (stats.psi_tilde * stats.psi_tilde - eps) / stats.norm_n,
        bound: dwt_error_bound(theta),
        theta,
    }
}

/// `√ε / √(2 - 4√ε + 3ε)`, the largest weak-value trace distance compatible
/// with `ψ̃_W ≥ 0`. Behaves as `θ/2` for small `θ`.
pub fn dwt_error_bound(theta: CouplingAngle) -> f64 {
    let eps = theta.eps();
    let root = eps.sqrt();
    root / (2.0 - 4.0 * root + 3.0 * eps).sqrt()
}

/// Inverts `ψ̃_W = (ψ̃² - ε)/ψ̃` for `ψ̃`: `½(ψ̃_W + √(ψ̃_W² + 4ε))`.
pub fn psi_tilde_from_psi_tilde_w(psi_tilde_w: f64, theta: CouplingAngle) -> f64 {
    let eps = theta.eps();
    0.5 * (psi_tilde_w + (psi_tilde_w * psi_tilde_w + 4.0 * eps).sqrt())
}

fn check_shots(shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be at least 1"));
    }
    Ok(shots as f64)
}

/// Asymptotic error of the weak-value estimate with `N/2` shots per basis:
///
/// ```text
/// δψ_W = 1/(sin θ 𝒩) √(d/2N) √[(2d-1)ψ̃² + 4ε(1-ψ̃²) + 2ε Σ_x |ψ_W,x|²(ψ̃ Re ψ_x - |ψ_x|²)]
/// ```
///
/// Finite for `ψ̃ = 0` states as well.
pub fn delta_psi_w(psi: &StateVector, theta: CouplingAngle, shots: u64) -> Result<f64> {
    let n = check_shots(shots)?;
    let psi = psi.with_fixed_phase();
    let stats = wavefunction_stats(&psi, theta);
    let psi_w = dwt_closed_form(&psi, theta)?;
    let d = psi.dim() as f64;
    let (t, eps) = (stats.psi_tilde, stats.eps_theta);
    let tail: f64 = psi
        .amplitudes()
        .iter()
        .zip(psi_w.amplitudes())
        .map(|(a, w)| w.norm_sqr() * (t * a.re - a.norm_sqr()))
        .sum();
    let bracket = (2.0 * d - 1.0) * t * t + 4.0 * eps * (1.0 - t * t) + 2.0 * eps * tail;
    Ok((d / (2.0 * n)).sqrt() * bracket.max(0.0).sqrt() / (theta.sin() * stats.norm_n))
}

/// [`delta_psi_w`] with the bracket replaced by its lower bound
/// `(2d-1)ψ̃² + 2ε(1 - ψ̃ - 2ψ̃²)`.
pub fn delta_psi_w_lower_bound(psi: &StateVector, theta: CouplingAngle, shots: u64) -> Result<f64> {
    let n = check_shots(shots)?;
    let stats = wavefunction_stats(psi, theta);
    let d = psi.dim() as f64;
    let bracket = weak_lower_bracket(stats.psi_tilde, stats.eps_theta, d);
    Ok((d / (2.0 * n)).sqrt() * bracket.max(0.0).sqrt() / (theta.sin() * stats.norm_n))
}

fn weak_lower_bracket(t: f64, eps: f64, d: f64) -> f64 {
    (2.0 * d - 1.0) * t * t + 2.0 * eps * (1.0 - t - 2.0 * t * t)
}

fn strong_upper_bracket(t: f64, d: f64) -> f64 {
    (2.0 * d - 5.0) * t * t + 2.0 * t + 8.0 - 2.0 / d
}

fn require_regular(psi: &StateVector) -> Result<f64> {
    let t = psi.psi_tilde();
    if t <= PATHOLOGICAL_TOL {
        return Err(Error::degenerate(
            "the exact estimator's error diverges for ψ̃ = 0; post-select on another momentum",
        ));
    }
    Ok(t)
}

/// Asymptotic error of the exact estimator at coupling `θ` with `N/3` shots
/// per basis:
///
/// ```text
/// δψ = 1/(ψ̃ sin θ) √(3d/4N)
///      √[(2d-1)ψ̃² + 4ε(1+ε-ψ̃²) + 2εψ̃⟨Re ψ_x⟩ - 2ε⟨|ψ_x|²⟩ - 4ε²⟨Re(ψ_x)²⟩]
/// ```
///
/// with `⟨f⟩ = Σ_x f(ψ_x)|ψ_x|²`.
pub fn delta_psi_arbitrary(psi: &StateVector, theta: CouplingAngle, shots: u64) -> Result<f64> {
    let n = check_shots(shots)?;
    let t = require_regular(psi)?;
    let stats = wavefunction_stats(psi, theta);
    let d = psi.dim() as f64;
    let eps = stats.eps_theta;
    let bracket = (2.0 * d - 1.0) * t * t + 4.0 * eps * (1.0 + eps - t * t) + 2.0 * eps * t * stats.mean_psi.re
        - 2.0 * eps * stats.mean_abs2
        - 4.0 * eps * eps * stats.mean_re2;
    Ok((3.0 * d / (4.0 * n)).sqrt() * bracket.max(0.0).sqrt() / (t * theta.sin()))
}

/// [`delta_psi_arbitrary`] at `θ = π/2`.
pub fn delta_psi_s(psi: &StateVector, shots: u64) -> Result<f64> {
    delta_psi_arbitrary(psi, CouplingAngle::strong(), shots)
}

/// `(1/ψ̃) √(3d/4N) √((2d-5)ψ̃² + 2ψ̃ + 8 - 2/d)`, using `⟨Re ψ_x⟩ ≤ 1`.
pub fn delta_psi_s_upper_bound(psi: &StateVector, shots: u64) -> Result<f64> {
    let n = check_shots(shots)?;
    let t = require_regular(psi)?;
    let d = psi.dim() as f64;
    Ok((3.0 * d / (4.0 * n)).sqrt() * strong_upper_bracket(t, d).sqrt() / t)
}

/// How the `𝒩/ψ̃` prefactor of the ratio bound is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioMode {
    /// `𝒩/ψ̃ = 1`.
    #[default]
    MainText,
    /// Keeps `𝒩/ψ̃` evaluated at `θ₀`.
    Exact,
}

/// Approximate upper bound on `δψ_S/δψ_W` for a weak measurement at `θ₀`:
///
/// ```text
/// sin θ₀ √(3/2) √[((2d-5)ψ̃² + 2ψ̃ + 8 - 2/d) / ((2d-1)ψ̃² + 2ε(1 - ψ̃ - 2ψ̃²))]
/// ```
///
/// `None` when the denominator is not positive.
pub fn ratio_bound_at(psi_tilde: f64, theta0: CouplingAngle, d: usize) -> Option<f64> {
    let d = d as f64;
    let lower = weak_lower_bracket(psi_tilde, theta0.eps(), d);
    let upper = strong_upper_bracket(psi_tilde, d);
    (lower > 0.0 && upper > 0.0).then(|| theta0.sin() * 1.5f64.sqrt() * (upper / lower).sqrt())
}

pub fn ratio_bound(psi: &StateVector, theta0: CouplingAngle, mode: RatioMode) -> Option<f64> {
    let t = psi.psi_tilde();
    let bound = ratio_bound_at(t, theta0, psi.dim())?;
    match mode {
        RatioMode::MainText => Some(bound),
        RatioMode::Exact => {
            if t <= PATHOLOGICAL_TOL {
                return None;
            }
            Some(bound * wavefunction_stats(psi, theta0).norm_n / t)
        }
    }
}

/// `sin θ₀ √(3/2) √((2d-5)/(2d-1))`, the ratio bound for `ψ̃ ≫ 1`.
pub fn ratio_bound_large_psi(theta0: CouplingAngle, d: usize) -> f64 {
    let d = d as f64;
    theta0.sin() * 1.5f64.sqrt() * ((2.0 * d - 5.0).max(0.0) / (2.0 * d - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionReport {
    pub shots: u64,
    pub delta_psi_w: f64,
    pub delta_psi_s: f64,
    /// `δψ_S / δψ_W`.
    pub ratio: f64,
    pub ratio_bound: Option<f64>,
}

/// Weak estimator at `theta0` against the strong one, both with `shots` shots.
pub fn precision_report(
    psi: &StateVector,
    theta0: CouplingAngle,
    shots: u64,
    mode: RatioMode,
) -> Result<PrecisionReport> {
    let delta_psi_w = delta_psi_w(psi, theta0, shots)?;
    let delta_psi_s = delta_psi_s(psi, shots)?;
    Ok(PrecisionReport {
        shots,
        delta_psi_w,
        delta_psi_s,
        ratio: delta_psi_s / delta_psi_w,
        ratio_bound: ratio_bound(psi, theta0, mode),
    })
}

fn require_weak(theta: CouplingAngle) -> Result<f64> {
    let c = theta.cos();
    if theta.is_strong() || c <= 1e-12 {
        return Err(Error::invalid(
            "the weak-value density matrix is singular at θ = π/2",
        ));
    }
    Ok(c)
}

/// `ρ^W = [ρ + (cos θ - 1) D] / cos θ` with `D` the diagonal of `ρ`: the
/// off-diagonal elements are amplified by `1/cos θ`. Hermitian with unit
/// trace but not necessarily positive.
pub fn mixed_rho_w_closed_form(rho: &DensityMatrix, theta: CouplingAngle) -> Result<DensityMatrix> {
    let c = require_weak(theta)?;
    let d = rho.dim();
    let entries = DMatrix::from_fn(d, d, |x, y| if x == y { rho.get(x, y) } else { rho.get(x, y) / c });
    DensityMatrix::new(entries)
}

/// `𝒟 = (1 - cos θ)/(2 cos θ) · Tr|ρ - D|`.
pub fn mixed_accuracy_d(rho: &DensityMatrix, theta: CouplingAngle) -> Result<f64> {
    let c = require_weak(theta)?;
    let off_diagonal = rho.entries() - rho.diagonal_part();
    Ok((1.0 - c) / (2.0 * c) * trace_norm_hermitian(&off_diagonal)?)
}

/// One CSV row of accuracy and precision predictions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisRow {
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
}

/// Predictions for `psi` measured weakly at `theta` with `shots` shots.
/// Strong-measurement fields are empty for `ψ̃ = 0` states.
pub fn analysis_row(state_id: u64, psi: &StateVector, theta: CouplingAngle, shots: u64) -> Result<AnalysisRow> {
    let acc = accuracy_d(psi, theta);
    let delta_w = delta_psi_w(psi, theta, shots)?;
    let delta_s = match delta_psi_s(psi, shots) {
        Ok(v) => Some(v),
        Err(Error::DegenerateInput(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AnalysisRow {
        state_id,
        d: psi.dim(),
        theta: theta.radians(),
        distance: acc.distance,
        distance_approx: acc.distance_approx,
        psi_tilde_w: acc.psi_tilde_w,
        bound: acc.bound,
        delta_psi_w: delta_w,
        delta_psi_s: delta_s,
        ratio: delta_s.map(|s| s / delta_w),
        ratio_bound: ratio_bound(psi, theta, RatioMode::MainText),
    })
}
