//! System–pointer coupling, exact outcome probabilities and finite-shot sampling.

mod coupling;
mod mixed;
mod povm;
pub(crate) mod probabilities;
mod sampling;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use coupling::coupling_unitary;
pub use mixed::{mixed_probability_table, pointer_density_mixed, pointer_density_oracle, PointerDensity};
pub use povm::{povm_element, povm_probability};
pub use probabilities::{
    exact_pointer_probabilities, exact_pointer_probabilities_oracle, momentum_frame,
    probability_table, PointerProbabilities,
};
pub use sampling::{
    sample_counts, sample_counts_with_rng, sample_table, BasisCounts, SamplingScheme, ShotCounts,
};

/// Coupling strength `θ ∈ (0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CouplingAngle(f64);

impl CouplingAngle {
    pub fn new(theta: f64) -> Result<Self> {
        // Accept π/2 up to last-digit rounding in textual round trips.
        if theta.is_finite() && theta > 0.0 && theta <= FRAC_PI_2 * (1.0 + 1e-14) {
            Ok(Self(theta.min(FRAC_PI_2)))
        } else {
            Err(Error::invalid(format!("coupling angle must lie in (0, π/2], got {theta}")))
        }
    }

    /// Maximal coupling `θ = π/2`.
    pub fn strong() -> Self {
        Self(FRAC_PI_2)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `ε_θ = 2 sin²(θ/2) = 1 - cos θ`.
    pub fn eps(self) -> f64 {
        2.0 * (self.0 / 2.0).sin().powi(2)
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn tan_half(self) -> f64 {
        (self.0 / 2.0).tan()
    }

    pub fn is_strong(self) -> bool {
        (self.0 - FRAC_PI_2).abs() <= 1e-12
    }
}

impl fmt::Display for CouplingAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pointer projection `|e_j⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointerOutcome {
    Zero,
    One,
    Plus,
    Minus,
    /// `(|0⟩ + i|1⟩)/√2`
    L,
    /// `(|0⟩ - i|1⟩)/√2`
    R,
}

impl PointerOutcome {
    pub const ALL: [PointerOutcome; 6] = [
        PointerOutcome::Zero,
        PointerOutcome::One,
        PointerOutcome::Plus,
        PointerOutcome::Minus,
        PointerOutcome::L,
        PointerOutcome::R,
    ];

    /// `(α_j, β_j) = (⟨e_j|0⟩, ⟨e_j|1⟩)`.
    pub fn bra(self) -> (Complex64, Complex64) {
        let h = FRAC_1_SQRT_2;
        match self {
            PointerOutcome::Zero => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            PointerOutcome::One => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            PointerOutcome::Plus => (Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
            PointerOutcome::Minus => (Complex64::new(h, 0.0), Complex64::new(-h, 0.0)),
            PointerOutcome::L => (Complex64::new(h, 0.0), Complex64::new(0.0, -h)),
            PointerOutcome::R => (Complex64::new(h, 0.0), Complex64::new(0.0, h)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PointerOutcome::Zero => "0",
            PointerOutcome::One => "1",
            PointerOutcome::Plus => "+",
            PointerOutcome::Minus => "-",
            PointerOutcome::L => "L",
            PointerOutcome::R => "R",
        }
    }

    pub fn basis(self) -> PointerBasis {
        match self {
            PointerOutcome::Zero | PointerOutcome::One => PointerBasis::Computational,
            PointerOutcome::Plus | PointerOutcome::Minus => PointerBasis::Diagonal,
            PointerOutcome::L | PointerOutcome::R => PointerBasis::Circular,
        }
    }
}

impl fmt::Display for PointerOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PointerOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(PointerOutcome::Zero),
            "1" => Ok(PointerOutcome::One),
            "+" => Ok(PointerOutcome::Plus),
            "-" => Ok(PointerOutcome::Minus),
            "L" | "l" => Ok(PointerOutcome::L),
            "R" | "r" => Ok(PointerOutcome::R),
            other => Err(Error::invalid(format!("unknown pointer outcome {other:?}"))),
        }
    }
}

/// A two-outcome pointer measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointerBasis {
    /// `{|0⟩, |1⟩}`
    Computational,
    /// `{|+⟩, |-⟩}`
    Diagonal,
    /// `{|L⟩, |R⟩}`
    Circular,
}

impl PointerBasis {
    /// Bases read out by the weak-coupling scheme.
    pub const WEAK: [PointerBasis; 2] = [PointerBasis::Diagonal, PointerBasis::Circular];
    /// Bases read out by the strong and arbitrary-strength schemes.
    pub const STRONG: [PointerBasis; 3] = [
        PointerBasis::Computational,
        PointerBasis::Diagonal,
        PointerBasis::Circular,
    ];

    pub fn outcomes(self) -> [PointerOutcome; 2] {
        match self {
            PointerBasis::Computational => [PointerOutcome::Zero, PointerOutcome::One],
            PointerBasis::Diagonal => [PointerOutcome::Plus, PointerOutcome::Minus],
            PointerBasis::Circular => [PointerOutcome::L, PointerOutcome::R],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PointerBasis::Computational => "01",
            PointerBasis::Diagonal => "pm",
            PointerBasis::Circular => "LR",
        }
    }
}

impl fmt::Display for PointerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PointerBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "01" => Ok(PointerBasis::Computational),
            "pm" | "+-" => Ok(PointerBasis::Diagonal),
            "LR" | "lr" => Ok(PointerBasis::Circular),
            other => Err(Error::invalid(format!("unknown pointer basis {other:?}"))),
        }
    }
}
