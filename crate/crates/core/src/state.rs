//! Pure and mixed state representations, Haar sampling, trace distances and
//! the wavefunction moments that enter the weak-value closed forms.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::CouplingAngle;

/// Tolerance for algebraic identities (normalization, Hermiticity, trace).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Eigenvalues above `-PSD_TOL` count as non-negative.
pub const PSD_TOL: f64 = 1e-10;

/// `|Σ_x ψ_x|` at or below this value marks a state as pathological.
pub const PATHOLOGICAL_TOL: f64 = 1e-12;

/// A unit-norm pure state `ψ_x`, `x = 0..d`.
///
/// States built by [`StateVector::normalize_and_fix_phase`] carry the phase
/// convention `ψ̃ = Σ_x ψ_x ≥ 0`. States with `ψ̃ = 0` cannot be brought to
/// that convention; they keep their phase and are flagged pathological.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    pathological: bool,
}

impl StateVector {
    /// Normalizes `raw` and rotates its global phase so that `Σ_x ψ_x` is
    /// real and non-negative.
    pub fn normalize_and_fix_phase(raw: &[Complex64]) -> Result<Self> {
        let mut state = Self::normalized(raw)?;
        state.fix_phase();
        Ok(state)
    }

    /// Normalizes `raw` without touching its global phase.
    ///
    /// Estimators whose phase is set by their own formula (the weak-value
    /// estimate in particular) are built this way.
    pub fn normalized(raw: &[Complex64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::invalid(format!(
                "state dimension must be at least 2, got {}",
                raw.len()
            )));
        }
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero-norm vector"));
        }
        let amplitudes: Vec<Complex64> = raw.iter().map(|z| z / norm).collect();
        let pathological = amplitudes.iter().sum::<Complex64>().norm() <= PATHOLOGICAL_TOL;
        Ok(Self {
            amplitudes,
            pathological,
        })
    }

    /// The position eigenstate `|x⟩`.
    pub fn basis(d: usize, x: usize) -> Result<Self> {
        if x >= d {
            return Err(Error::invalid(format!("basis index {x} out of range for d = {d}")));
        }
        let mut raw = vec![Complex64::new(0.0, 0.0); d];
        raw[x] = Complex64::new(1.0, 0.0);
        Self::normalize_and_fix_phase(&raw)
    }

    /// The flat state `1/√d Σ_x |x⟩`, i.e. the zero-momentum state.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::normalize_and_fix_phase(&vec![Complex64::new(1.0, 0.0); d])
    }

    fn fix_phase(&mut self) {
        if self.pathological {
            return;
        }
        let sum: Complex64 = self.amplitudes.iter().sum();
        let rotation = sum.conj() / sum.norm();
        for a in &mut self.amplitudes {
            *a *= rotation;
        }
    }

    /// Copy of `self` in the `ψ̃ ≥ 0` phase convention (unchanged when pathological).
    pub fn with_fixed_phase(&self) -> Self {
        let mut state = self.clone();
        state.fix_phase();
        state
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ_x ψ_x` in the state's current phase.
    pub fn amplitude_sum(&self) -> Complex64 {
        self.amplitudes.iter().sum()
    }

    /// `ψ̃ = |Σ_x ψ_x|`, the value of the amplitude sum in the fixed-phase convention.
    pub fn psi_tilde(&self) -> f64 {
        self.amplitude_sum().norm()
    }

    pub fn is_pathological(&self) -> bool {
        self.pathological
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.dim();
        let entries =
            DMatrix::from_fn(d, d, |x, y| self.amplitudes[x] * self.amplitudes[y].conj());
        DensityMatrix { entries }
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Haar-random pure state of dimension `d`, deterministic in `seed`.
pub fn haar_random_state(d: usize, seed: u64) -> Result<StateVector> {
    haar_random_state_with_rng(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random pure state drawn from `rng` as normalized complex Gaussians.
pub fn haar_random_state_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::invalid(format!("Haar sampling needs d >= 2, got {d}")));
    }
    let raw: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalize_and_fix_phase(&raw)
}

/// `√(1 - |⟨a|b⟩|²)`.
///
/// Evaluated through Lagrange's identity
/// `‖a‖²‖b‖² - |⟨a|b⟩|² = ½ Σ_{ij} |a_i b_j - a_j b_i|²` so that nearly equal
/// states give distances at rounding level instead of `√ε_mach`.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    let (u, v) = (a.amplitudes(), b.amplitudes());
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            acc += (u[i] * v[j] - u[j] * v[i]).norm_sqr();
        }
    }
    Ok(acc.sqrt().min(1.0))
}

/// Hermitian, unit-trace `d × d` matrix.
///
/// Positivity is not part of the type: the weak-value estimate `ρ^W` can have
/// negative eigenvalues. Use [`DensityMatrix::physical`] to also require PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let d = entries.nrows();
        if d == 0 || entries.ncols() != d {
            return Err(Error::invalid("density matrix must be square and non-empty"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("density matrix entries must be finite"));
        }
        let herm_err = hermiticity_error(&entries);
        if herm_err > ALGEBRAIC_TOL {
            return Err(Error::invalid(format!("matrix is not Hermitian (max deviation {herm_err:e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > ALGEBRAIC_TOL || trace.im.abs() > ALGEBRAIC_TOL {
            return Err(Error::invalid(format!("trace must be 1, got {trace}")));
        }
        // Snap to exact Hermiticity.
        let entries = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self { entries })
    }

    /// Like [`DensityMatrix::new`] but additionally rejects eigenvalues below `-PSD_TOL`.
    pub fn physical(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::new(entries)?;
        let min = rho.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::invalid(format!("matrix is not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self {
            entries: DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.entries[(x, y)]
    }

    /// `D = diag(ρ)` as a full matrix.
    pub fn diagonal_part(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&self.entries.diagonal())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL
    }
}

fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `½ Σ |λ_k(a - b)|`.
pub fn trace_distance_mixed(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = a.entries() - b.entries();
    trace_norm_hermitian(&diff).map(|n| 0.5 * n)
}

/// `Tr|A| = Σ |λ_k(A)|` for Hermitian `A`.
pub fn trace_norm_hermitian(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid("trace norm needs a square matrix"));
    }
    let herm_err = hermiticity_error(m);
    if herm_err > ALGEBRAIC_TOL {
        return Err(Error::invalid(format!(
            "matrix difference is not Hermitian (max deviation {herm_err:e})"
        )));
    }
    Ok(SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum())
}

/// Random density matrix of rank at most `rank`: the reduced state of a
/// Haar-random pure state on `C^d ⊗ C^rank`.
pub fn random_density_matrix(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_matrix_with_rng(d, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_density_matrix_with_rng<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if rank == 0 || rank > d {
        return Err(Error::invalid(format!("rank must lie in 1..={d}, got {rank}")));
    }
    // Column k of G holds the system amplitudes paired with ancilla state |k⟩.
    let g = DMatrix::from_fn(d, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    DensityMatrix::physical(gg.unscale(trace))
}

/// Moments of `ψ` under the Born weights `p_x = |ψ_x|²`, together with the
/// normalizer `𝒩` of the weak-value closed form at coupling `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionStats {
    /// `ψ̃ = Σ_x ψ_x` in the fixed-phase convention.
    pub psi_tilde: f64,
    /// `⟨ψ_x⟩ = Σ_x ψ_x |ψ_x|²`.
    pub mean_psi: Complex64,
    /// `⟨|ψ_x|²⟩ = Σ_x |ψ_x|⁴`.
    pub mean_abs2: f64,
    /// `⟨Re(ψ_x)²⟩ = Σ_x Re(ψ_x)² |ψ_x|²`.
    pub mean_re2: f64,
    pub sigma_psi: f64,
    pub eps_theta: f64,
    /// `𝒩 = √(|ψ̃ - ε⟨ψ_x⟩|² + ε²σ²)`.
    pub norm_n: f64,
}

pub fn wavefunction_stats(psi: &StateVector, theta: CouplingAngle) -> WavefunctionStats {
    let psi = psi.with_fixed_phase();
    let amps = psi.amplitudes();
    let psi_tilde = psi.psi_tilde();
    let mean_psi: Complex64 = amps.iter().map(|a| a * a.norm_sqr()).sum();
    let mean_abs2: f64 = amps.iter().map(|a| a.norm_sqr().powi(2)).sum();
    let mean_re2: f64 = amps.iter().map(|a| a.re * a.re * a.norm_sqr()).sum();
    // Σ p_x |ψ_x - ⟨ψ⟩|² is the same variance but never cancels below zero.
    let variance: f64 = amps
        .iter()
        .map(|a| a.norm_sqr() * (a - mean_psi).norm_sqr())
        .sum();
    let eps = theta.eps();
    let norm_n = ((psi_tilde - eps * mean_psi).norm_sqr() + eps * eps * variance).sqrt();
    WavefunctionStats {
        psi_tilde,
        mean_psi,
        mean_abs2,
        mean_re2,
        sigma_psi: variance.sqrt(),
        eps_theta: eps,
        norm_n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phase_fix_removes_global_phase() {
        let s = StateVector::normalize_and_fix_phase(&[c(0.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert!((s.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.psi_tilde() - 1.0).abs() < 1e-15);
        assert!(!s.is_pathological());
    }

    #[test]
    fn antisymmetric_state_is_pathological() {
        let s = StateVector::normalize_and_fix_phase(&[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)])
            .unwrap();
        assert!(s.is_pathological());
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn common_phase_is_stripped() {
        let s = StateVector::normalize_and_fix_phase(&[c(0.5, 0.5), c(0.5, 0.5)]).unwrap();
        for a in s.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
        let sum = s.amplitude_sum();
        assert!(sum.im.abs() < 1e-15);
        assert!((sum.re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_norm_and_tiny_dimension() {
        assert!(matches!(
            StateVector::normalize_and_fix_phase(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(StateVector::normalize_and_fix_phase(&[c(1.0, 0.0)]).is_err());
        assert!(StateVector::normalize_and_fix_phase(&[c(f64::NAN, 0.0), c(1.0, 0.0)]).is_err());
        assert!(haar_random_state(1, 0).is_err());
    }

    #[test]
    fn haar_is_deterministic() {
        assert_eq!(haar_random_state(10, 1).unwrap(), haar_random_state(10, 1).unwrap());
        assert_ne!(haar_random_state(10, 1).unwrap(), haar_random_state(10, 2).unwrap());
    }

    #[test]
    fn pure_trace_distance_examples() {
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap();
        let plus = StateVector::uniform(2).unwrap();
        assert_eq!(trace_distance_pure(&e0, &e0).unwrap(), 0.0);
        assert!((trace_distance_pure(&e0, &e1).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance_pure(&e0, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(trace_distance_pure(&e0, &StateVector::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn pure_trace_distance_ignores_global_phase() {
        let psi = haar_random_state(6, 4).unwrap();
        let rotated: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, 0.7))
            .collect();
        let rotated = StateVector::normalized(&rotated).unwrap();
        assert!(trace_distance_pure(&psi, &rotated).unwrap() < 1e-15);
    }

    #[test]
    fn mixed_trace_distance_examples() {
        let e0 = StateVector::basis(2, 0).unwrap().projector();
        let e1 = StateVector::basis(2, 1).unwrap().projector();
        assert!(trace_distance_mixed(&e0, &e0).unwrap() < 1e-15);
        assert!((trace_distance_mixed(&e0, &e1).unwrap() - 1.0).abs() < 1e-14);

        let plus = StateVector::uniform(2).unwrap().projector();
        let rho_w = DensityMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)],
        ))
        .unwrap();
        assert!(!rho_w.is_psd());
        assert!((trace_distance_mixed(&plus, &rho_w).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = DMatrix::from_diagonal_element(2, 2, c(1.0, 0.0));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let non_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        let non_psd = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(non_psd.clone()).is_ok());
        assert!(DensityMatrix::physical(non_psd).is_err());
    }

    #[test]
    fn stats_of_flat_and_basis_states() {
        let theta = CouplingAngle::new(0.2).unwrap();
        let flat = wavefunction_stats(&StateVector::uniform(10).unwrap(), theta);
        assert!(flat.sigma_psi < 1e-15);
        let sqrt10 = 10f64.sqrt();
        assert!((flat.norm_n - (sqrt10 - theta.eps() / sqrt10).abs()).abs() < 1e-14);

        let basis = wavefunction_stats(&StateVector::basis(2, 0).unwrap(), theta);
        assert!((basis.mean_psi - c(1.0, 0.0)).norm() < 1e-15);
        assert!((basis.mean_abs2 - 1.0).abs() < 1e-15);
        assert_eq!(basis.sigma_psi, 0.0);
    }

    #[test]
    fn stats_of_antisymmetric_state() {
        let psi = StateVector::normalize_and_fix_phase(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let s = wavefunction_stats(&psi, CouplingAngle::new(FRAC_PI_2).unwrap());
        assert!(s.psi_tilde < 1e-15);
        assert!((s.sigma_psi - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.mean_abs2 - 0.5).abs() < 1e-15);
        assert!(s.mean_psi.norm() < 1e-15);
    }

    #[test]
    fn stats_satisfy_defining_identities() {
        let theta = CouplingAngle::new(0.7).unwrap();
        for seed in 0..50 {
            let psi = haar_random_state(7, seed).unwrap();
            let s = wavefunction_stats(&psi, theta);
            let var = s.mean_abs2 - s.mean_psi.norm_sqr();
            assert!((s.sigma_psi.powi(2) - var).abs() < 1e-14);
            let n2 = (s.psi_tilde - s.eps_theta * s.mean_psi).norm_sqr() + (s.eps_theta * s.sigma_psi).powi(2);
            assert!((s.norm_n.powi(2) - n2).abs() < 1e-14);
        }
    }

    #[test]
    fn random_density_matrix_rank_one_is_projector() {
        let rho = random_density_matrix(5, 1, 3).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[4] - 1.0).abs() < 1e-12);
        assert!(ev[..4].iter().all(|l| l.abs() < 1e-12));
        // ρ² = ρ for a pure state.
        let sq = rho.entries() * rho.entries();
        assert!((sq - rho.entries()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn random_density_matrix_validation() {
        assert!(random_density_matrix(3, 0, 0).is_err());
        assert!(random_density_matrix(3, 4, 0).is_err());
        for seed in 0..20 {
            let rho = random_density_matrix(4, 2, seed).unwrap();
            assert!(rho.min_eigenvalue() >= -PSD_TOL);
            assert!((rho.entries().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
