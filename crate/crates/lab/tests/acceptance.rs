//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p dirtomo-lab --test acceptance`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};
use std::process::ExitCode;
use std::time::Instant;

use dirtomo_core::analysis::{accuracy_d, dwt_error_bound, mixed_accuracy_d};
use dirtomo_core::measurement::{
    exact_pointer_probabilities, exact_pointer_probabilities_oracle, mixed_probability_table, probability_table,
    SamplingScheme,
};
use dirtomo_core::reconstruction::{
    arbitrary_theta_estimate, dst_estimate, dwt_estimate, mixed_dst_estimate, mixed_dwt_estimate, PointerTable,
};
use dirtomo_core::state::{haar_random_state, random_density_matrix, trace_distance_mixed, wavefunction_stats};
use dirtomo_core::{Complex64, CouplingAngle, DensityMatrix, PointerOutcome, StateVector};
use dirtomo_lab::campaigns::{
    accuracy_sweep, mixed_campaign, scatter, shot_noise_validation, theta_means, ShotNoiseStates,
};
use dirtomo_lab::config::{default_theta_grid, ExperimentConfig};
use dirtomo_lab::output::{metadata_line, render_csv};
use dirtomo_lab::seeding::rng_for;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn angle(t: f64) -> CouplingAngle {
    CouplingAngle::new(t).unwrap()
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `√(1 - |⟨a|b⟩|²)` from raw amplitudes. With `b` rotated onto `a`,
/// `1 - |⟨a|b⟩| = ½‖a - b‖²`, which keeps the difference free of cancellation.
fn pure_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    let gap = 0.5 * a.iter().zip(b).map(|(x, y)| (x - y * phase).norm_sqr()).sum::<f64>();
    (gap * (2.0 - gap)).max(0.0).sqrt()
}

/// `ψ_x(ψ̃ - ε ψ*_x)`, normalized, with `ψ̃ = |Σψ|` after removing the global phase.
fn weak_value_oracle(psi: &StateVector, theta: f64) -> Vec<Complex64> {
    let sum: Complex64 = psi.amplitudes().iter().sum();
    let phase = if sum.norm() > 0.0 { sum.conj() / sum.norm() } else { Complex64::new(1.0, 0.0) };
    let eps = 1.0 - theta.cos();
    let raw: Vec<Complex64> =
        psi.amplitudes().iter().map(|a| a * phase).map(|a| a * (sum.norm() - eps * a.conj())).collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|z| z / norm).collect()
}

fn ac1() -> Outcome {
    let mut worst = 0.0f64;
    for &d in &[2, 4, 8, 10, 16] {
        for i in 0..1000u64 {
            let psi = haar_random_state(d, 1_000_000 * d as u64 + i).unwrap();
            let est = dst_estimate(&probability_table(&psi, CouplingAngle::strong(), 0).unwrap()).unwrap();
            worst = worst.max(pure_distance(est.pure().unwrap().amplitudes(), psi.amplitudes()));
        }
    }
    gate(worst < 1e-10, format!("max D = {worst:.2e} (< 1e-10) over 5000 states"))
}

fn ac2() -> Outcome {
    let mut worst = 0.0f64;
    for &t in &[0.1, 0.3, 1.0] {
        let th = angle(t);
        for &d in &[2, 4, 8, 10, 16] {
            for i in 0..1000u64 {
                let psi = haar_random_state(d, 2_000_000 * d as u64 + i).unwrap();
                let est = arbitrary_theta_estimate(&probability_table(&psi, th, 0).unwrap(), th).unwrap();
                worst = worst.max(pure_distance(est.pure().unwrap().amplitudes(), psi.amplitudes()));
            }
        }
    }
    gate(worst < 1e-10, format!("max D = {worst:.2e} (< 1e-10) over 15000 state/θ pairs"))
}

fn ac3() -> Outcome {
    let mut rng = rng_for(3, &[]);
    let mut worst = 0.0f64;
    for i in 0..10_000u64 {
        let d = rng.random_range(2..=12usize);
        let psi = haar_random_state(d, 3_000_000 + i).unwrap();
        let x = rng.random_range(0..d);
        let p = rng.random_range(0..d);
        let th = angle(rng.random_range(0.0..FRAC_PI_2));
        let a = exact_pointer_probabilities(&psi, x, th, p).unwrap();
        let b = exact_pointer_probabilities_oracle(&psi, x, th, p).unwrap();
        for o in PointerOutcome::ALL {
            worst = worst.max((a.get(o) - b.get(o)).abs());
        }
    }
    gate(worst < 1e-12, format!("max |ΔP| = {worst:.2e} (< 1e-12) over 10^4 tuples"))
}

fn ac4() -> Outcome {
    let (mut law, mut dist, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for &t in &[0.05, 0.2, 0.5, 1.0] {
        let th = angle(t);
        for i in 0..2500u64 {
            let psi = haar_random_state(10, 4_000_000 + i).unwrap();
            let est = dwt_estimate(&probability_table(&psi, th, 0).unwrap(), th).unwrap();
            let oracle = weak_value_oracle(&psi, t);
            for (a, b) in est.pure().unwrap().amplitudes().iter().zip(&oracle) {
                law = law.max((a - b).norm());
            }
            let d_direct = pure_distance(&oracle, psi.with_fixed_phase().amplitudes());
            let d_formula = accuracy_d(&psi, th).distance;
            dist = dist.max((d_formula - d_direct).abs());
            let s = wavefunction_stats(&psi, th);
            let rhs = d_formula / (1.0 - d_formula * d_formula).sqrt() * (s.psi_tilde - s.eps_theta * s.mean_psi).norm();
            inv = inv.max((s.eps_theta * s.sigma_psi - rhs).abs());
        }
    }
    gate(
        law < 1e-12 && dist < 1e-10 && inv < 1e-10,
        format!("pipeline vs closed form {law:.1e} (< 1e-12), D vs direct {dist:.1e}, inversion {inv:.1e} (< 1e-10)"),
    )
}

fn ac5() -> Outcome {
    let cfg = ExperimentConfig { d: 10, thetas: vec![0.2], samples: 1_000_000, ..Default::default() };
    let row = &accuracy_sweep(&cfg).map_err(|e| e.to_string())?[0];
    // Without the distance gate, ψ̃_W < 0 ⇔ |Σψ|² < ε, and |Σψ|²/d is Beta(1, d-1).
    let eps = 1.0 - 0.2f64.cos();
    let analytic = 1.0 - (1.0 - eps / 10.0).powi(9);
    gate(
        (row.p_w - 0.0175).abs() <= 0.0005 && (row.p_d - 0.0057).abs() <= 0.0003,
        format!(
            "M=10^6: p_W = {:.4}% (1.75 ± 0.05), p_D = {:.4}% (0.57 ± 0.03); analytic p_W = {:.4}%",
            100.0 * row.p_w,
            100.0 * row.p_d,
            100.0 * analytic
        ),
    )
}

fn ac6() -> Outcome {
    let mut violations = 0u64;
    let mut checked = 0u64;
    for &t in &[0.05, 0.1, 0.2, 0.5] {
        let th = angle(t);
        let bound = dwt_error_bound(th);
        for i in 0..100_000u64 {
            let psi = haar_random_state(10, 6_000_000 + i).unwrap();
            let acc = accuracy_d(&psi, th);
            if acc.psi_tilde_w >= 0.0 {
                checked += 1;
                if acc.distance > bound {
                    violations += 1;
                }
            }
        }
    }
    gate(violations == 0, format!("{violations} counterexamples among {checked} sufficient states"))
}

fn ac7() -> Outcome {
    let mut spread = 0.0f64;
    let mut against_sigma = 0.0f64;
    for i in 0..200u64 {
        let d = 2 + (i % 9) as usize;
        let base = haar_random_state(d, 7_000_000 + i).unwrap();
        let mean: Complex64 = base.amplitudes().iter().sum::<Complex64>() / d as f64;
        let raw: Vec<Complex64> = base.amplitudes().iter().map(|a| a - mean).collect();
        let psi = StateVector::normalized(&raw).unwrap();
        let p: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let avg: Complex64 = psi.amplitudes().iter().zip(&p).map(|(a, w)| a * w).sum();
        let avg_abs2: f64 = p.iter().map(|w| w * w).sum();
        let sigma = psi.amplitudes().iter().zip(&p).map(|(a, w)| w * (a - avg).norm_sqr()).sum::<f64>().sqrt();
        let expected = sigma / avg_abs2.sqrt();
        let ds: Vec<f64> = [0.1, 1.0, FRAC_PI_2].iter().map(|&t| accuracy_d(&psi, angle(t)).distance).collect();
        for &dd in &ds {
            spread = spread.max((dd - ds[0]).abs());
            against_sigma = against_sigma.max((dd - expected).abs());
        }
    }
    let pair = StateVector::normalized(&[Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)]).unwrap();
    let pair_d: Vec<f64> = [0.1, 1.0, FRAC_PI_2].iter().map(|&t| accuracy_d(&pair, angle(t)).distance).collect();
    gate(
        spread < 1e-12 && against_sigma < 1e-12 && pair_d.iter().all(|&dd| dd == 1.0),
        format!("θ spread {spread:.1e}, vs σ/√⟨|ψ|²⟩ {against_sigma:.1e} (< 1e-12); (1,-1)/√2 gives D = {pair_d:?}"),
    )
}

fn ac8() -> Outcome {
    let shots = 1_000_000u64;
    let base = ExperimentConfig {
        thetas: vec![0.2],
        shots,
        reps: 200,
        seed: 8,
        scheme: SamplingScheme::Poisson,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let uniform = ExperimentConfig { d: 2, ..base.clone() };
    let uniform_rows = shot_noise_validation(&uniform, &ShotNoiseStates::Uniform).map_err(|e| e.to_string())?;
    rows.extend(uniform_rows.iter().cloned());
    for d in [2, 10] {
        let cfg = ExperimentConfig { d, samples: 5, ..base.clone() };
        rows.extend(shot_noise_validation(&cfg, &ShotNoiseStates::Haar).map_err(|e| e.to_string())?);
    }
    let worst_row = rows.iter().max_by(|a, b| a.rel_err.abs().total_cmp(&b.rel_err.abs())).ok_or("no rows")?;
    let worst = worst_row.rel_err.abs();
    let hand = 1.9365 / (shots as f64).sqrt();
    let dst = uniform_rows.iter().find(|r| r.method == "DST").ok_or("no DST row")?;
    let hand_err = (dst.delta_emp / hand - 1.0).abs();
    gate(
        worst < 0.1 && hand_err < 0.1 && (dst.delta_pred / hand - 1.0).abs() < 1e-4,
        format!(
            "max |emp/pred - 1| = {:.2}% over {} rows (< 10%, worst: {} state {}); uniform d=2 DST: emp {:.4e} vs 1.9365/√N = {:.4e}",
            100.0 * worst,
            rows.len(),
            worst_row.method,
            worst_row.state_id,
            dst.delta_emp,
            hand
        ),
    )
}

fn ac9() -> Outcome {
    let cfg = ExperimentConfig { d: 10, thetas: vec![0.2], samples: 100_000, ..Default::default() };
    let rows = scatter(&cfg).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = rows.iter().filter(|r| r.psi_tilde_w >= 0.0).filter_map(|r| r.ratio).collect();
    let fraction = ratios.iter().filter(|&&r| r < 1.0).count() as f64 / ratios.len() as f64;
    let means = theta_means(&ExperimentConfig { thetas: default_theta_grid(), ..cfg }).map_err(|e| e.to_string())?;
    let monotone = means.windows(2).all(|w| w[0].mean_distance < w[1].mean_distance);
    gate(
        fraction > 0.9 && monotone,
        format!(
            "fraction with δψ_S/δψ_W < 1 = {:.2}% of {} sufficient states (> 90%); mean_D monotone: {monotone}",
            100.0 * fraction,
            ratios.len()
        ),
    )
}

fn ac10() -> Outcome {
    let (mut closed, mut accuracy, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    for d in [2usize, 4, 8] {
        for rank in [1, 2, d] {
            for i in 0..10u64 {
                let rho = random_density_matrix(d, rank, 10_000_000 + 100 * d as u64 + 10 * rank as u64 + i).unwrap();
                for &t in &[0.05, 0.2, 0.7, 1.2] {
                    let th = angle(t);
                    let table =
                        PointerTable::from_probabilities(d, &mixed_probability_table(&rho, th).unwrap()).unwrap();
                    let est = mixed_dwt_estimate(&table, th).unwrap();
                    let mut oracle = rho.entries().clone();
                    for x in 0..d {
                        for y in 0..d {
                            if x != y {
                                oracle[(x, y)] /= t.cos();
                            }
                        }
                    }
                    closed = closed.max((est.mixed().unwrap().entries() - &oracle).camax());
                    let direct = trace_distance_mixed(&rho, &DensityMatrix::new(oracle).unwrap()).unwrap();
                    accuracy = accuracy.max((mixed_accuracy_d(&rho, th).unwrap() - direct).abs());
                }
                for &t in &[0.05, 0.7, FRAC_PI_2] {
                    let th = angle(t);
                    let table =
                        PointerTable::from_probabilities(d, &mixed_probability_table(&rho, th).unwrap()).unwrap();
                    let est = mixed_dst_estimate(&table, th).unwrap();
                    residual = residual.max(trace_distance_mixed(est.mixed().unwrap(), &rho).unwrap());
                }
            }
        }
    }
    let plus = StateVector::uniform(2).unwrap().projector();
    let plus_d = mixed_accuracy_d(&plus, angle(FRAC_PI_3)).unwrap();
    gate(
        closed < 1e-12 && accuracy < 1e-10 && residual < 1e-10 && (plus_d - 0.5).abs() < 1e-12,
        format!(
            "ρ^W vs closed form {closed:.1e} (< 1e-12), D vs direct {accuracy:.1e}, exact residual {residual:.1e} (< 1e-10), |+⟩ at π/3: D = {plus_d:.12}"
        ),
    )
}

fn ac11() -> Outcome {
    let mut compared = Vec::new();
    for workers in [1usize, 4] {
        let cfg = ExperimentConfig { d: 6, thetas: vec![0.1, 0.2, 0.5], samples: 5000, seed: 11, workers, ..Default::default() };
        let one = ExperimentConfig { thetas: vec![0.2], ..cfg.clone() };
        let shot = ExperimentConfig { samples: 3, reps: 50, shots: 30_000, scheme: SamplingScheme::Poisson, ..one.clone() };
        let mixed = ExperimentConfig { samples: 30, d: 4, ..cfg.clone() };
        let mut bytes = Vec::new();
        let err = |e: dirtomo_lab::LabError| e.to_string();
        bytes.push(render_csv(&metadata_line("accuracy-sweep", &cfg), &accuracy_sweep(&cfg).map_err(err)?).map_err(err)?);
        bytes.push(render_csv(&metadata_line("scatter", &one), &scatter(&one).map_err(err)?).map_err(err)?);
        bytes.push(render_csv(&metadata_line("theta-means", &cfg), &theta_means(&cfg).map_err(err)?).map_err(err)?);
        bytes.push(
            render_csv(&metadata_line("shot-noise", &shot), &shot_noise_validation(&shot, &ShotNoiseStates::Haar).map_err(err)?)
                .map_err(err)?,
        );
        bytes.push(render_csv(&metadata_line("mixed", &mixed), &mixed_campaign(&mixed).map_err(err)?).map_err(err)?);
        compared.push(bytes);
    }
    let identical = compared[0] == compared[1];
    gate(identical, format!("5 campaigns, workers 1 vs 4: byte-identical = {identical}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1", "strong tomography exactness", ac1),
        ("AC2", "arbitrary-θ exactness", ac2),
        ("AC3", "closed-form probabilities vs unitary simulation", ac3),
        ("AC4", "weak-value distortion law", ac4),
        ("AC5", "sufficiency and accuracy failure rates", ac5),
        ("AC6", "sufficiency bound", ac6),
        ("AC7", "pathological states", ac7),
        ("AC8", "shot-noise formulas", ac8),
        ("AC9", "precision dominance", ac9),
        ("AC10", "mixed states", ac10),
        ("AC11", "determinism across worker counts", ac11),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {id} {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
