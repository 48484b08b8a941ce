use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{coupling_unitary, CouplingAngle, PointerBasis, PointerOutcome};
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Joint probabilities of momentum post-selection and each pointer outcome
/// for one `(x, p, θ)` setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerProbabilities {
    pub x: usize,
    pub momentum: usize,
    pub theta: CouplingAngle,
    pub p0: f64,
    pub p1: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_l: f64,
    pub p_r: f64,
}

impl PointerProbabilities {
    pub fn get(&self, outcome: PointerOutcome) -> f64 {
        match outcome {
            PointerOutcome::Zero => self.p0,
            PointerOutcome::One => self.p1,
            PointerOutcome::Plus => self.p_plus,
            PointerOutcome::Minus => self.p_minus,
            PointerOutcome::L => self.p_l,
            PointerOutcome::R => self.p_r,
        }
    }

    pub(crate) fn set(&mut self, outcome: PointerOutcome, value: f64) {
        match outcome {
            PointerOutcome::Zero => self.p0 = value,
            PointerOutcome::One => self.p1 = value,
            PointerOutcome::Plus => self.p_plus = value,
            PointerOutcome::Minus => self.p_minus = value,
            PointerOutcome::L => self.p_l = value,
            PointerOutcome::R => self.p_r = value,
        }
    }

    /// Post-selection probability as seen by one basis.
    pub fn basis_total(&self, basis: PointerBasis) -> f64 {
        let [a, b] = basis.outcomes();
        self.get(a) + self.get(b)
    }

    /// All three bases see the same post-selected pointer state.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let t = self.basis_total(PointerBasis::Computational);
        (t - self.basis_total(PointerBasis::Diagonal)).abs() <= tol
            && (t - self.basis_total(PointerBasis::Circular)).abs() <= tol
            && PointerOutcome::ALL
                .iter()
                .all(|&o| (-tol..=1.0 + tol).contains(&self.get(o)))
    }

    /// Every probability multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        for o in PointerOutcome::ALL {
            out.set(o, self.get(o) * factor);
        }
        out
    }

    pub(crate) fn zeroed(x: usize, momentum: usize, theta: CouplingAngle) -> Self {
        Self {
            x,
            momentum,
            theta,
            p0: 0.0,
            p1: 0.0,
            p_plus: 0.0,
            p_minus: 0.0,
            p_l: 0.0,
            p_r: 0.0,
        }
    }
}

/// CSV row layout `(x, p, theta, P0, P1, Pplus, Pminus, PL, PR)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ProbabilityRow {
    pub x: usize,
    pub p: usize,
    pub theta: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "Pplus")]
    pub p_plus: f64,
    #[serde(rename = "Pminus")]
    pub p_minus: f64,
    #[serde(rename = "PL")]
    pub p_l: f64,
    #[serde(rename = "PR")]
    pub p_r: f64,
}

impl From<&PointerProbabilities> for ProbabilityRow {
    fn from(p: &PointerProbabilities) -> Self {
        Self {
            x: p.x,
            p: p.momentum,
            theta: p.theta.radians(),
            p0: p.p0,
            p1: p.p1,
            p_plus: p.p_plus,
            p_minus: p.p_minus,
            p_l: p.p_l,
            p_r: p.p_r,
        }
    }
}

impl TryFrom<ProbabilityRow> for PointerProbabilities {
    type Error = Error;

    fn try_from(r: ProbabilityRow) -> Result<Self> {
        let values = [r.p0, r.p1, r.p_plus, r.p_minus, r.p_l, r.p_r];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite probability in row x={}, p={}", r.x, r.p)));
        }
        Ok(Self {
            x: r.x,
            momentum: r.p,
            theta: CouplingAngle::new(r.theta)?,
            p0: r.p0,
            p1: r.p1,
            p_plus: r.p_plus,
            p_minus: r.p_minus,
            p_l: r.p_l,
            p_r: r.p_r,
        })
    }
}

fn check_indices(d: usize, x: usize, momentum: usize) -> Result<()> {
    if x >= d {
        return Err(Error::invalid(format!("position {x} out of range for d = {d}")));
    }
    if momentum >= d {
        return Err(Error::invalid(format!("momentum {momentum} out of range for d = {d}")));
    }
    Ok(())
}

/// `ψ_x e^{-2πi x p/d}` brought back to the `ψ̃ ≥ 0` convention.
///
/// Post-selecting on momentum `p` is equivalent to post-selecting this state
/// on `p = 0`.
pub fn momentum_frame(psi: &StateVector, momentum: usize) -> StateVector {
    if momentum == 0 {
        return psi.with_fixed_phase();
    }
    let d = psi.dim() as f64;
    let shifted: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, a)| a * Complex64::from_polar(1.0, -2.0 * PI * (x as f64) * (momentum as f64) / d))
        .collect();
    StateVector::normalize_and_fix_phase(&shifted).expect("phase ramp preserves the norm")
}

/// Closed-form outcome probabilities.
///
/// With `t = ψ̃`, `s = sin θ`, `ε = ε_θ` and `ψ_x` taken in the `ψ̃ ≥ 0`
/// convention:
///
/// ```text
/// P_0 = [t² - 2εt Re ψ_x + ε²|ψ_x|²] / d
/// P_1 = s²|ψ_x|² / d
/// P_+ = [t²/2 + (s - ε) t Re ψ_x + (1 - s) ε|ψ_x|²] / d
/// P_- = [t²/2 - (s + ε) t Re ψ_x + (1 + s) ε|ψ_x|²] / d
/// P_L = [t²/2 + s t Im ψ_x + ε(|ψ_x|² - t Re ψ_x)] / d
/// P_R = [t²/2 - s t Im ψ_x + ε(|ψ_x|² - t Re ψ_x)] / d
/// ```
pub fn exact_pointer_probabilities(
    psi: &StateVector,
    x: usize,
    theta: CouplingAngle,
    momentum: usize,
) -> Result<PointerProbabilities> {
    let d = psi.dim();
    check_indices(d, x, momentum)?;
    let frame = momentum_frame(psi, momentum);
    let t = frame.psi_tilde();
    let a = frame.amplitudes()[x];
    let (re, im, a2) = (a.re, a.im, a.norm_sqr());
    let (s, eps) = (theta.sin(), theta.eps());
    let df = d as f64;
    let half = t * t / 2.0;

    let clamp = |v: f64| (v / df).max(0.0);
    Ok(PointerProbabilities {
        x,
        momentum,
        theta,
        p0: clamp(t * t - 2.0 * eps * t * re + eps * eps * a2),
        p1: clamp(s * s * a2),
        p_plus: clamp(half - (eps - s) * t * re + (1.0 - s) * eps * a2),
        p_minus: clamp(half - (eps + s) * t * re + (1.0 + s) * eps * a2),
        // sin θ multiplies the Im term in both P_L and P_R.
        p_l: clamp(half + s * t * im + eps * (a2 - t * re)),
        p_r: clamp(half - s * t * im + eps * (a2 - t * re)),
    })
}

/// Probabilities for every `x` at a fixed momentum.
pub fn probability_table(
    psi: &StateVector,
    theta: CouplingAngle,
    momentum: usize,
) -> Result<Vec<PointerProbabilities>> {
    (0..psi.dim())
        .map(|x| exact_pointer_probabilities(psi, x, theta, momentum))
        .collect()
}

/// Brute-force reference: evolves `ψ ⊗ |0⟩` with the full `2d × 2d` coupling
/// unitary and projects on `|p⟩ ⊗ |e_j⟩`.
pub fn exact_pointer_probabilities_oracle(
    psi: &StateVector,
    x: usize,
    theta: CouplingAngle,
    momentum: usize,
) -> Result<PointerProbabilities> {
    let d = psi.dim();
    check_indices(d, x, momentum)?;
    let u = coupling_unitary(d, x, theta)?;
    let mut input = nalgebra::DVector::<Complex64>::zeros(2 * d);
    for (y, a) in psi.amplitudes().iter().enumerate() {
        input[2 * y] = *a;
    }
    let out = u * input;

    // ⟨p|y⟩ = e^{-2πi y p/d} / √d
    let norm = (d as f64).sqrt();
    let mut pointer = [Complex64::new(0.0, 0.0); 2];
    for y in 0..d {
        let bra = Complex64::from_polar(1.0, -2.0 * PI * (y * momentum) as f64 / d as f64) / norm;
        pointer[0] += bra * out[2 * y];
        pointer[1] += bra * out[2 * y + 1];
    }

    let mut probs = PointerProbabilities::zeroed(x, momentum, theta);
    for o in PointerOutcome::ALL {
        let (alpha, beta) = o.bra();
        probs.set(o, (alpha * pointer[0] + beta * pointer[1]).norm_sqr());
    }
    Ok(probs)
}
