use nalgebra::DMatrix;
use num_complex::Complex64;

use super::CouplingAngle;
use crate::error::{Error, Result};

/// `U_x(θ) = 𝟙⊗𝟙 - |x⟩⟨x| ⊗ [(1 - cos θ)𝟙 + i sin θ σ_y]` on `C^d ⊗ C^2`.
///
/// Basis index of `|y⟩ ⊗ |k⟩` is `2y + k`. `x` is zero-based.
pub fn coupling_unitary(d: usize, x: usize, theta: CouplingAngle) -> Result<DMatrix<Complex64>> {
    if x >= d {
        return Err(Error::invalid(format!("position {x} out of range for d = {d}")));
    }
    let mut u = DMatrix::<Complex64>::identity(2 * d, 2 * d);
    let (c, s) = (theta.cos(), theta.sin());
    // (1 - cos θ)𝟙 + i sin θ σ_y = [[1 - c, s], [-s, 1 - c]]
    let block = [[1.0 - c, s], [-s, 1.0 - c]];
    for (k, row) in block.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            u[(2 * x + k, 2 * x + l)] -= Complex64::new(*v, 0.0);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn unitary_for_all_settings() {
        for d in 1..=6 {
            for x in 0..d {
                for &t in &[1e-9, 0.05, 0.2, 0.5, 1.0, FRAC_PI_2] {
                    let u = coupling_unitary(d, x, CouplingAngle::new(t).unwrap()).unwrap();
                    let id = DMatrix::<Complex64>::identity(2 * d, 2 * d);
                    assert!(max_abs(&(u.adjoint() * &u - id)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vanishing_coupling_is_identity() {
        let u = coupling_unitary(3, 1, CouplingAngle::new(1e-14).unwrap()).unwrap();
        assert!(max_abs(&(u - DMatrix::identity(6, 6))) < 1e-13);
    }

    #[test]
    fn strong_coupling_rotates_pointer() {
        let u = coupling_unitary(1, 0, CouplingAngle::strong()).unwrap();
        // |0⟩ → |1⟩, |1⟩ → -|0⟩
        assert!((u[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(u[(0, 0)].norm() < 1e-15);
        assert!((u[(0, 1)] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(u[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn matches_matrix_exponential() {
        // exp(-iθ π_x ⊗ σ_y) built independently through nalgebra's exp.
        let (d, x, t) = (3, 2, 0.37);
        let mut gen = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
        // -iθσ_y = θ [[0, -1], [1, 0]]
        gen[(2 * x, 2 * x + 1)] = Complex64::new(-t, 0.0);
        gen[(2 * x + 1, 2 * x)] = Complex64::new(t, 0.0);
        let expected = gen.exp();
        let u = coupling_unitary(d, x, CouplingAngle::new(t).unwrap()).unwrap();
        assert!(max_abs(&(u - expected)) < 1e-13);
    }

    #[test]
    fn rejects_out_of_range_position() {
        assert!(coupling_unitary(3, 3, CouplingAngle::strong()).is_err());
    }
}
