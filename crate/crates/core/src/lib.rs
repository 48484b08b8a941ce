//! Direct measurement of quantum wavefunctions through a qubit pointer.
//!
//! A system state `ψ` in a `d`-dimensional position basis is coupled to a
//! two-level pointer by `U_x(θ) = exp(-iθ |x⟩⟨x| ⊗ σ_y)`, post-selected on a
//! momentum state and the pointer is read out in the `{0,1}`, `{+,-}` and
//! `{L,R}` bases. From the resulting probabilities the crate reconstructs the
//! state with
//!
//! - the weak-coupling estimator (DWT), which is only approximate,
//! - the strong-coupling estimator (DST, `θ = π/2`), which is exact,
//! - the arbitrary-strength estimator, exact for every `0 < θ ≤ π/2`,
//! - and the mixed-state variants of DWT and DST.
//!
//! The [`analysis`] module holds the closed-form accuracy and precision
//! predictions that the Monte-Carlo campaigns in `dirtomo-lab` check.

pub mod analysis;
pub mod error;
pub mod io;
pub mod measurement;
pub mod reconstruction;
pub mod state;

pub use error::{Error, Result};
pub use measurement::{CouplingAngle, PointerBasis, PointerOutcome, PointerProbabilities};
pub use num_complex::Complex64;
pub use state::{DensityMatrix, StateVector};
