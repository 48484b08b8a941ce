use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

use super::{CouplingAngle, PointerBasis, PointerOutcome, PointerProbabilities};
use crate::error::{Error, Result};

const BASIS_TOTAL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingScheme {
    /// Each of the `N_b` trials of a basis lands on one of the two outcomes
    /// or fails post-selection.
    #[default]
    MultinomialWithDiscard,
    /// Independent `n_j ~ Poisson(N_b P_j)`.
    Poisson,
}

impl std::str::FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial" | "multinomial-with-discard" => Ok(SamplingScheme::MultinomialWithDiscard),
            "poisson" => Ok(SamplingScheme::Poisson),
            other => Err(Error::invalid(format!("unknown sampling scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisCounts {
    pub basis: PointerBasis,
    pub first: u64,
    pub second: u64,
    /// Trials that failed post-selection; always 0 under the Poisson scheme.
    pub discarded: u64,
}

impl BasisCounts {
    pub fn count(&self, outcome: PointerOutcome) -> Option<u64> {
        let [a, b] = self.basis.outcomes();
        if outcome == a {
            Some(self.first)
        } else if outcome == b {
            Some(self.second)
        } else {
            None
        }
    }
}

/// Outcome counts of a finite-shot run for one `(x, p, θ)` setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotCounts {
    pub x: usize,
    pub momentum: usize,
    pub theta: CouplingAngle,
    pub trials_per_basis: u64,
    pub scheme: SamplingScheme,
    pub bases: Vec<BasisCounts>,
}

impl ShotCounts {
    pub fn count(&self, outcome: PointerOutcome) -> Option<u64> {
        self.bases.iter().find_map(|b| b.count(outcome))
    }

    /// Frequency estimates `P̃_j = n_j / N_b`; outcomes of bases that were not
    /// measured are reported as 0.
    pub fn estimate(&self) -> PointerProbabilities {
        let mut probs = PointerProbabilities::zeroed(self.x, self.momentum, self.theta);
        let n = self.trials_per_basis as f64;
        for o in PointerOutcome::ALL {
            if let Some(c) = self.count(o) {
                probs.set(o, c as f64 / n);
            }
        }
        probs
    }
}

/// Draws counts for each basis in `bases`, deterministic in `seed`.
pub fn sample_counts(
    probs: &PointerProbabilities,
    bases: &[PointerBasis],
    trials_per_basis: u64,
    scheme: SamplingScheme,
    seed: u64,
) -> Result<ShotCounts> {
    sample_counts_with_rng(
        probs,
        bases,
        trials_per_basis,
        scheme,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

pub fn sample_counts_with_rng<R: Rng + ?Sized>(
    probs: &PointerProbabilities,
    bases: &[PointerBasis],
    trials_per_basis: u64,
    scheme: SamplingScheme,
    rng: &mut R,
) -> Result<ShotCounts> {
    if trials_per_basis == 0 {
        return Err(Error::invalid("trials per basis must be at least 1"));
    }
    let mut out = Vec::with_capacity(bases.len());
    for &basis in bases {
        let [a, b] = basis.outcomes();
        let (pa, pb) = (probs.get(a), probs.get(b));
        if !(pa >= 0.0 && pb >= 0.0) {
            return Err(Error::invalid(format!("negative probability in basis {basis}")));
        }
        if pa + pb > 1.0 + BASIS_TOTAL_SLACK {
            return Err(Error::invalid(format!(
                "probabilities in basis {basis} sum to {} > 1",
                pa + pb
            )));
        }
        let counts = match scheme {
            SamplingScheme::MultinomialWithDiscard => {
                let n = trials_per_basis;
                let first = binomial(rng, n, pa)?;
                let rest = n - first;
                let cond = if pa < 1.0 { (pb / (1.0 - pa)).min(1.0) } else { 0.0 };
                let second = binomial(rng, rest, cond)?;
                BasisCounts {
                    basis,
                    first,
                    second,
                    discarded: rest - second,
                }
            }
            SamplingScheme::Poisson => BasisCounts {
                basis,
                first: poisson(rng, trials_per_basis as f64 * pa)?,
                second: poisson(rng, trials_per_basis as f64 * pb)?,
                discarded: 0,
            },
        };
        out.push(counts);
    }
    Ok(ShotCounts {
        x: probs.x,
        momentum: probs.momentum,
        theta: probs.theta,
        trials_per_basis,
        scheme,
        bases: out,
    })
}

/// Samples every row of a probability table with one shared generator.
pub fn sample_table<R: Rng + ?Sized>(
    table: &[PointerProbabilities],
    bases: &[PointerBasis],
    trials_per_basis: u64,
    scheme: SamplingScheme,
    rng: &mut R,
) -> Result<Vec<ShotCounts>> {
    table
        .iter()
        .map(|p| sample_counts_with_rng(p, bases, trials_per_basis, scheme, rng))
        .collect()
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> Result<u64> {
    let p = p.clamp(0.0, 1.0);
    if n == 0 || p == 0.0 {
        return Ok(0);
    }
    let dist = Binomial::new(n, p).map_err(|e| Error::invalid(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::invalid(format!("poisson({mean}): {e}")))?;
    Ok(dist.sample(rng) as u64)
}
