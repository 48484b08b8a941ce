//! Estimators that turn pointer statistics into states.
//!
//! Pure states: with `A_x` and `B_x` built from the outcome probabilities of
//! setting `x`, every estimator returns `(A_x + iB_x) / √Σ(A² + B²)`. The
//! proportionality constants of the underlying relations are `x`-independent
//! and cancel in the normalization, so nothing is fitted.
//!
//! Mixed states: the pointer coherence `ρ_10(x, p)` and population
//! `ρ_11(x, p)` are read from the probabilities on the full position ×
//! momentum grid and Fourier-summed over `p`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analysis::dwt_error_bound;
use crate::error::{Error, Result};
use crate::measurement::{CouplingAngle, PointerDensity, PointerProbabilities};
use crate::state::{DensityMatrix, StateVector};

const THETA_MATCH_TOL: f64 = 1e-12;

/// `M < DEGENERACY_SCALE · d` is treated as "no signal".
pub const DEGENERACY_SCALE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dwt,
    Dst,
    Arbitrary,
    MixedDwt,
    MixedDst,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Dwt => "DWT",
            Method::Dst => "DST",
            Method::Arbitrary => "ARBITRARY",
            Method::MixedDwt => "MIXED_DWT",
            Method::MixedDst => "MIXED_DST",
        }
    }

    pub fn is_mixed(self) -> bool {
        matches!(self, Method::MixedDwt | Method::MixedDst)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "dwt" => Ok(Method::Dwt),
            "dst" => Ok(Method::Dst),
            "arbitrary" => Ok(Method::Arbitrary),
            "mixed-dwt" => Ok(Method::MixedDwt),
            "mixed-dst" => Ok(Method::MixedDst),
            other => Err(Error::invalid(format!("unknown reconstruction method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl Estimate {
    pub fn as_pure(&self) -> Option<&StateVector> {
        match self {
            Estimate::Pure(s) => Some(s),
            Estimate::Mixed(_) => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&DensityMatrix> {
        match self {
            Estimate::Mixed(m) => Some(m),
            Estimate::Pure(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub estimate: Estimate,
    pub method: Method,
    pub theta: CouplingAngle,
    /// `ψ̃_W = Σ_x (P_+ - P_-) / M_W`: the amplitude sum the weak-value
    /// estimator would report on these probabilities. Pure states only.
    pub psi_tilde_w: Option<f64>,
    /// `Σ_x (P_+ - P_-) ≥ 0`. Pure states only.
    pub sufficiency_ok: Option<bool>,
    /// Upper bound on the systematic error, when one applies: the weak-value
    /// bound for DWT when sufficiency holds, 0 for the exact estimators.
    pub bound_value: Option<f64>,
}

impl ReconstructionResult {
    pub fn pure(&self) -> Option<&StateVector> {
        self.estimate.as_pure()
    }

    pub fn mixed(&self) -> Option<&DensityMatrix> {
        self.estimate.as_mixed()
    }
}

/// Rows of a single-momentum table sorted by `x`, with their common momentum.
fn sorted_pure_table(
    probs: &[PointerProbabilities],
    theta: CouplingAngle,
) -> Result<(Vec<PointerProbabilities>, usize)> {
    let d = probs.len();
    if d < 2 {
        return Err(Error::invalid(format!("need one probability row per position, d >= 2; got {d} rows")));
    }
    let mut rows = probs.to_vec();
    rows.sort_by_key(|p| p.x);
    for (i, row) in rows.iter().enumerate() {
        if row.x != i {
            return Err(Error::invalid(format!(
                "probability table must cover x = 0..{d} exactly once"
            )));
        }
        if (row.theta.radians() - theta.radians()).abs() > THETA_MATCH_TOL {
            return Err(Error::invalid(format!(
                "row x={} was taken at θ = {}, expected {}",
                row.x, row.theta, theta
            )));
        }
    }
    let momentum = rows[0].momentum;
    if rows.iter().any(|r| r.momentum != momentum) {
        return Err(Error::invalid("all rows of a pure-state table must share one momentum"));
    }
    if momentum >= d {
        return Err(Error::invalid(format!("momentum {momentum} out of range for d = {d}")));
    }
    Ok((rows, momentum))
}

/// `(ψ̃_W, Σ(P_+ - P_-) ≥ 0)`.
fn weak_indicator(rows: &[PointerProbabilities]) -> (f64, bool) {
    let a_sum: f64 = rows.iter().map(|r| r.p_plus - r.p_minus).sum();
    let m_w = rows
        .iter()
        .map(|r| (r.p_plus - r.p_minus).powi(2) + (r.p_l - r.p_r).powi(2))
        .sum::<f64>()
        .sqrt();
    let psi_tilde_w = if m_w > 0.0 { a_sum / m_w } else { 0.0 };
    (psi_tilde_w, a_sum >= 0.0)
}

fn normalize_components(
    components: Vec<Complex64>,
    momentum: usize,
) -> Result<StateVector> {
    let d = components.len();
    let m = components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !m.is_finite() || m < DEGENERACY_SCALE * d as f64 {
        return Err(Error::degenerate(format!(
            "normalization M = {m:e} vanishes; the state may have ψ̃ = 0 at momentum {momentum}, \
             post-select on a different momentum"
        )));
    }
    if momentum == 0 {
        return StateVector::normalized(&components);
    }
    // Undo the ψ_x e^{-2πi x p/d} ramp of momentum post-selection.
    let unramped: Vec<Complex64> = components
        .iter()
        .enumerate()
        .map(|(x, z)| z * Complex64::from_polar(1.0, 2.0 * PI * (x * momentum) as f64 / d as f64))
        .collect();
    StateVector::normalize_and_fix_phase(&unramped)
}

/// Weak-value estimate `ψ_W,x ∝ (P_+ - P_-) + i(P_L - P_R)`.
///
/// The global phase is the one fixed by the formula itself, so `Σ_x ψ_W,x`
/// may be negative; its sign is the sufficiency indicator.
pub fn dwt_estimate(probs: &[PointerProbabilities], theta: CouplingAngle) -> Result<ReconstructionResult> {
    let (rows, momentum) = sorted_pure_table(probs, theta)?;
    let components = rows
        .iter()
        .map(|r| Complex64::new(r.p_plus - r.p_minus, r.p_l - r.p_r))
        .collect();
    let estimate = normalize_components(components, momentum)?;
    let (psi_tilde_w, ok) = weak_indicator(&rows);
    Ok(ReconstructionResult {
        estimate: Estimate::Pure(estimate),
        method: Method::Dwt,
        theta,
        psi_tilde_w: Some(psi_tilde_w),
        sufficiency_ok: Some(ok),
        bound_value: ok.then(|| dwt_error_bound(theta)),
    })
}

fn exact_pure_estimate(
    probs: &[PointerProbabilities],
    theta: CouplingAngle,
    method: Method,
) -> Result<ReconstructionResult> {
    let (rows, momentum) = sorted_pure_table(probs, theta)?;
    let weight = 2.0 * theta.tan_half();
    let components = rows
        .iter()
        .map(|r| Complex64::new(r.p_plus - r.p_minus + weight * r.p1, r.p_l - r.p_r))
        .collect();
    let estimate = normalize_components(components, momentum)?;
    let (psi_tilde_w, ok) = weak_indicator(&rows);
    Ok(ReconstructionResult {
        estimate: Estimate::Pure(estimate),
        method,
        theta,
        psi_tilde_w: Some(psi_tilde_w),
        sufficiency_ok: Some(ok),
        bound_value: Some(0.0),
    })
}

/// Strong-coupling estimate `ψ_x ∝ (P_+ - P_- + 2P_1) + i(P_L - P_R)`.
/// Exact; requires probabilities taken at `θ = π/2`.
pub fn dst_estimate(probs: &[PointerProbabilities]) -> Result<ReconstructionResult> {
    if let Some(r) = probs.iter().find(|r| !r.theta.is_strong()) {
        return Err(Error::invalid(format!(
            "strong-coupling estimate needs θ = π/2, row x={} has θ = {}",
            r.x, r.theta
        )));
    }
    exact_pure_estimate(probs, CouplingAngle::strong(), Method::Dst)
}

/// Exact estimate at any coupling:
/// `Re ψ_x ∝ P_+ - P_- + 2 tan(θ/2) P_1`, `Im ψ_x ∝ P_L - P_R`.
pub fn arbitrary_theta_estimate(
    probs: &[PointerProbabilities],
    theta: CouplingAngle,
) -> Result<ReconstructionResult> {
    exact_pure_estimate(probs, theta, Method::Arbitrary)
}

/// Pointer tomography for one `(x, p)`: returns `(ρ_10, ρ_11)` with
/// `ρ_10 = ⟨1|ρ^P|0⟩ = ½[(P_+ - P_-) + i(P_L - P_R)]` and `ρ_11 = P_1`.
///
/// The conjugate combination `½[(P_+ - P_-) - i(P_L - P_R)]` is `ρ_01`.
pub fn pointer_tomography(probs: &PointerProbabilities) -> (Complex64, f64) {
    let rho10 = 0.5 * Complex64::new(probs.p_plus - probs.p_minus, probs.p_l - probs.p_r);
    (rho10, probs.p1)
}

/// `ρ_10(x, p)` and `ρ_11(x, p)` on the complete `d × d` position/momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerTable {
    d: usize,
    theta: CouplingAngle,
    rho10: Vec<Complex64>,
    rho11: Vec<f64>,
}

impl PointerTable {
    fn from_entries(
        d: usize,
        entries: impl IntoIterator<Item = (usize, usize, CouplingAngle, Complex64, f64)>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let mut rho10 = vec![None; d * d];
        let mut rho11 = vec![0.0; d * d];
        let mut theta = None;
        for (x, p, t, r10, r11) in entries {
            if x >= d || p >= d {
                return Err(Error::invalid(format!("(x, p) = ({x}, {p}) out of range for d = {d}")));
            }
            match theta {
                None => theta = Some(t),
                Some(t0) if (t0.radians() - t.radians()).abs() > THETA_MATCH_TOL => {
                    return Err(Error::invalid("pointer table mixes coupling angles"));
                }
                _ => {}
            }
            let slot = &mut rho10[x * d + p];
            if slot.is_some() {
                return Err(Error::invalid(format!("duplicate entry for (x, p) = ({x}, {p})")));
            }
            *slot = Some(r10);
            rho11[x * d + p] = r11;
        }
        let missing = rho10.iter().filter(|v| v.is_none()).count();
        if missing > 0 {
            return Err(Error::invalid(format!(
                "incomplete momentum grid: {missing} of {} (x, p) entries missing",
                d * d
            )));
        }
        Ok(Self {
            d,
            theta: theta.expect("grid is non-empty"),
            rho10: rho10.into_iter().map(Option::unwrap).collect(),
            rho11,
        })
    }

    /// Applies [`pointer_tomography`] to every `(x, p)` row.
    pub fn from_probabilities(d: usize, probs: &[PointerProbabilities]) -> Result<Self> {
        Self::from_entries(
            d,
            probs.iter().map(|p| {
                let (r10, r11) = pointer_tomography(p);
                (p.x, p.momentum, p.theta, r10, r11)
            }),
        )
    }

    pub fn from_densities(d: usize, densities: &[PointerDensity]) -> Result<Self> {
        Self::from_entries(
            d,
            densities
                .iter()
                .map(|pd| (pd.x, pd.momentum, pd.theta, pd.rho10, pd.rho11)),
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> CouplingAngle {
        self.theta
    }

    pub fn rho10(&self, x: usize, p: usize) -> Complex64 {
        self.rho10[x * self.d + p]
    }

    pub fn rho11(&self, x: usize, p: usize) -> f64 {
        self.rho11[x * self.d + p]
    }
}

fn mixed_estimate(
    table: &PointerTable,
    theta: CouplingAngle,
    with_population: bool,
) -> Result<DensityMatrix> {
    if (table.theta().radians() - theta.radians()).abs() > THETA_MATCH_TOL {
        return Err(Error::invalid(format!(
            "pointer table was taken at θ = {}, expected {}",
            table.theta(),
            theta
        )));
    }
    let d = table.dim();
    let df = d as f64;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for x in 0..d {
        for y in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..d {
                let phase = 2.0 * PI * (x as f64 - y as f64) * p as f64 / df;
                acc += Complex64::from_polar(1.0, phase) * table.rho10(x, p);
            }
            m[(x, y)] = acc;
        }
        if with_population {
            // ρ_11 does not depend on p; average the grid.
            let population = (0..d).map(|p| table.rho11(x, p)).sum::<f64>() / df;
            m[(x, x)] += df * theta.tan_half() * population;
        }
    }
    let herm = (&m + m.adjoint()).scale(0.5);
    let trace = herm.trace().re;
    if !trace.is_finite() || trace < DEGENERACY_SCALE * df {
        return Err(Error::degenerate(format!(
            "reconstructed matrix has trace {trace:e}; cannot normalize"
        )));
    }
    DensityMatrix::new(herm.unscale(trace))
}

/// Weak-value density matrix `ρ^W_xy ∝ Σ_p e^{2πi(x-y)p/d} ρ_10(x, p)`,
/// Hermitized and trace-normalized. Not projected onto PSD matrices.
pub fn mixed_dwt_estimate(table: &PointerTable, theta: CouplingAngle) -> Result<ReconstructionResult> {
    Ok(ReconstructionResult {
        estimate: Estimate::Mixed(mixed_estimate(table, theta, false)?),
        method: Method::MixedDwt,
        theta,
        psi_tilde_w: None,
        sufficiency_ok: None,
        bound_value: None,
    })
}

/// Exact density matrix
/// `ρ_xy ∝ d tan(θ/2) δ_xy ρ_11(x) + Σ_p e^{2πi(x-y)p/d} ρ_10(x, p)`.
pub fn mixed_dst_estimate(table: &PointerTable, theta: CouplingAngle) -> Result<ReconstructionResult> {
    Ok(ReconstructionResult {
        estimate: Estimate::Mixed(mixed_estimate(table, theta, true)?),
        method: Method::MixedDst,
        theta,
        psi_tilde_w: None,
        sufficiency_ok: None,
        bound_value: Some(0.0),
    })
}
