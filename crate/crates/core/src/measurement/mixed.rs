use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{coupling_unitary, CouplingAngle, PointerOutcome, PointerProbabilities};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Unnormalized pointer state `⟨p| U_x ρ⊗|0⟩⟨0| U_x† |p⟩` left after
/// post-selecting the system on momentum `p`.
///
/// Its trace is the post-selection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerDensity {
    pub x: usize,
    pub momentum: usize,
    pub theta: CouplingAngle,
    pub rho00: f64,
    /// `⟨0|ρ^P|1⟩`
    pub rho01: Complex64,
    /// `⟨1|ρ^P|0⟩`
    pub rho10: Complex64,
    pub rho11: f64,
}

impl PointerDensity {
    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// `⟨e_j|ρ^P|e_j⟩`.
    pub fn probability(&self, outcome: PointerOutcome) -> f64 {
        // ⟨e|ρ|e⟩ = Σ_kl ⟨e|k⟩ ρ_kl ⟨l|e⟩
        let (a, b) = outcome.bra();
        let v = a * a.conj() * self.rho00
            + a * b.conj() * self.rho01
            + b * a.conj() * self.rho10
            + b * b.conj() * self.rho11;
        v.re.max(0.0)
    }

    pub fn to_probabilities(&self) -> PointerProbabilities {
        let mut probs = PointerProbabilities::zeroed(self.x, self.momentum, self.theta);
        for o in PointerOutcome::ALL {
            probs.set(o, self.probability(o));
        }
        probs
    }
}

fn check_indices(d: usize, x: usize, momentum: usize) -> Result<()> {
    if x >= d || momentum >= d {
        return Err(Error::invalid(format!(
            "(x, p) = ({x}, {momentum}) out of range for d = {d}"
        )));
    }
    Ok(())
}

fn fourier_phase(k: isize, momentum: usize, d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k as f64) * (momentum as f64) / d as f64)
}

/// Closed-form pointer density.
///
/// With `S = Σ_y ρ_xy e^{2πi(y-x)p/d}` and `T = Σ_yz ρ_yz e^{2πi(z-y)p/d}`:
///
/// ```text
/// ρ_00 = [T - ε(S + S*) + ε² ρ_xx] / d
/// ρ_10 = sin θ [S - ε ρ_xx] / d
/// ρ_11 = sin²θ ρ_xx / d
/// ```
pub fn pointer_density_mixed(
    rho: &DensityMatrix,
    x: usize,
    momentum: usize,
    theta: CouplingAngle,
) -> Result<PointerDensity> {
    let d = rho.dim();
    check_indices(d, x, momentum)?;
    let df = d as f64;
    let eps = theta.eps();
    let s = theta.sin();
    let rho_xx = rho.get(x, x).re;

    let sum_s: Complex64 = (0..d)
        .map(|y| rho.get(x, y) * fourier_phase(y as isize - x as isize, momentum, d))
        .sum();
    let mut sum_t = Complex64::new(0.0, 0.0);
    for y in 0..d {
        for z in 0..d {
            sum_t += rho.get(y, z) * fourier_phase(z as isize - y as isize, momentum, d);
        }
    }

    let rho10 = s * (sum_s - eps * rho_xx) / df;
    Ok(PointerDensity {
        x,
        momentum,
        theta,
        rho00: (sum_t.re - 2.0 * eps * sum_s.re + eps * eps * rho_xx) / df,
        rho01: rho10.conj(),
        rho10,
        rho11: s * s * rho_xx / df,
    })
}

/// Brute-force reference: `U_x (ρ ⊗ |0⟩⟨0|) U_x†` on the full `2d`-dimensional
/// space, contracted with `|p⟩` on the system.
pub fn pointer_density_oracle(
    rho: &DensityMatrix,
    x: usize,
    momentum: usize,
    theta: CouplingAngle,
) -> Result<PointerDensity> {
    let d = rho.dim();
    check_indices(d, x, momentum)?;
    let u = coupling_unitary(d, x, theta)?;
    let mut joint = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    for y in 0..d {
        for z in 0..d {
            joint[(2 * y, 2 * z)] = rho.get(y, z);
        }
    }
    let evolved = &u * joint * u.adjoint();
    // ⟨p|y⟩ = e^{-2πi y p/d} / √d
    let bra: Vec<Complex64> = (0..d)
        .map(|y| fourier_phase(-(y as isize), momentum, d) / (d as f64).sqrt())
        .collect();
    let mut block = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (k, row) in block.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            for y in 0..d {
                for z in 0..d {
                    *entry += bra[y] * evolved[(2 * y + k, 2 * z + l)] * bra[z].conj();
                }
            }
        }
    }
    Ok(PointerDensity {
        x,
        momentum,
        theta,
        rho00: block[0][0].re,
        rho01: block[0][1],
        rho10: block[1][0],
        rho11: block[1][1].re,
    })
}

/// Outcome probabilities on the full `(x, p)` grid, ordered by `x` then `p`.
pub fn mixed_probability_table(
    rho: &DensityMatrix,
    theta: CouplingAngle,
) -> Result<Vec<PointerProbabilities>> {
    let d = rho.dim();
    let mut out = Vec::with_capacity(d * d);
    for x in 0..d {
        for p in 0..d {
            out.push(pointer_density_mixed(rho, x, p, theta)?.to_probabilities());
        }
    }
    Ok(out)
}
