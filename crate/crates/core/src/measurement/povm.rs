use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{CouplingAngle, PointerOutcome};
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Post-selected measurement operator `E_j = α_j|p₀⟩⟨p₀| - γ_j|p₀⟩⟨x|` with
/// `γ_j = [(1 - cos θ)α_j - sin θ β_j] / √d`.
///
/// `P_j = Tr[E_j† E_j |ψ⟩⟨ψ|]`. The six operators describe post-selected
/// events and do not sum to the identity.
pub fn povm_element(
    d: usize,
    x: usize,
    theta: CouplingAngle,
    outcome: PointerOutcome,
) -> Result<DMatrix<Complex64>> {
    if x >= d {
        return Err(Error::invalid(format!("position {x} out of range for d = {d}")));
    }
    let (alpha, beta) = outcome.bra();
    let sqrt_d = (d as f64).sqrt();
    let gamma = ((1.0 - theta.cos()) * alpha - theta.sin() * beta) / sqrt_d;
    let p0 = Complex64::new(1.0 / sqrt_d, 0.0);
    // Every row is p₀ times the row vector α⟨p₀| - γ⟨x|.
    Ok(DMatrix::from_fn(d, d, |_, c| {
        let bra = if c == x { alpha * p0 - gamma } else { alpha * p0 };
        p0 * bra
    }))
}

/// `⟨ψ|E†E|ψ⟩`.
pub fn povm_probability(element: &DMatrix<Complex64>, psi: &StateVector) -> Result<f64> {
    if element.ncols() != psi.dim() {
        return Err(Error::invalid("operator and state dimensions differ"));
    }
    let v = element * DVector::from_column_slice(psi.amplitudes());
    Ok(v.norm_squared())
}
