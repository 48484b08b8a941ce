//! JSON state files and the CSV layouts for probability tables, shot counts,
//! reconstruction diagnostics and analysis rows.
//!
//! State files hold `{"d": n, "amplitudes": [[re, im], ...]}` for vectors and
//! `{"d": n, "rows": [[[re, im], ...], ...]}` for matrices.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisRow;
use crate::error::{Error, Result};
use crate::measurement::probabilities::ProbabilityRow;
use crate::measurement::{
    BasisCounts, CouplingAngle, PointerBasis, PointerOutcome, PointerProbabilities, SamplingScheme, ShotCounts,
};
use crate::reconstruction::ReconstructionResult;
use crate::state::{DensityMatrix, StateVector};

/// Outcome label used in count files for trials that failed post-selection.
pub const DISCARD_LABEL: &str = "discard";

#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Vector(StateVector),
    Matrix(DensityMatrix),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawState {
    Vector { d: usize, amplitudes: Vec<[f64; 2]> },
    Matrix { d: usize, rows: Vec<Vec<[f64; 2]>> },
}

#[derive(Serialize)]
struct VectorOut<'a> {
    d: usize,
    amplitudes: &'a [[f64; 2]],
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    d: usize,
    rows: &'a [Vec<[f64; 2]>],
}

fn to_complex(pair: [f64; 2]) -> Result<Complex64> {
    if !pair[0].is_finite() || !pair[1].is_finite() {
        return Err(Error::invalid("state file contains a non-finite number"));
    }
    Ok(Complex64::new(pair[0], pair[1]))
}

/// Parses a state document. Vectors are normalized and brought to the
/// `Σ_x ψ_x ≥ 0` phase; matrices must be Hermitian with unit trace.
pub fn parse_state(text: &str) -> Result<StateFile> {
    match serde_json::from_str::<RawState>(text)? {
        RawState::Vector { d, amplitudes } => {
            if amplitudes.len() != d {
                return Err(Error::invalid(format!(
                    "state file declares d = {d} but lists {} amplitudes",
                    amplitudes.len()
                )));
            }
            let raw = amplitudes.into_iter().map(to_complex).collect::<Result<Vec<_>>>()?;
            Ok(StateFile::Vector(StateVector::normalize_and_fix_phase(&raw)?))
        }
        RawState::Matrix { d, rows } => {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::invalid(format!("state file declares d = {d} but rows are not {d} × {d}")));
            }
            let mut entries = DMatrix::zeros(d, d);
            for (x, row) in rows.into_iter().enumerate() {
                for (y, pair) in row.into_iter().enumerate() {
                    entries[(x, y)] = to_complex(pair)?;
                }
            }
            Ok(StateFile::Matrix(DensityMatrix::new(entries)?))
        }
    }
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<StateFile> {
    parse_state(&fs::read_to_string(path)?)
}

pub fn state_vector_json(psi: &StateVector) -> Result<String> {
    let amplitudes: Vec<[f64; 2]> = psi.amplitudes().iter().map(|a| [a.re, a.im]).collect();
    Ok(serde_json::to_string_pretty(&VectorOut {
        d: psi.dim(),
        amplitudes: &amplitudes,
    })?)
}

pub fn density_matrix_json(rho: &DensityMatrix) -> Result<String> {
    let d = rho.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|x| (0..d).map(|y| rho.get(x, y)).map(|z| [z.re, z.im]).collect())
        .collect();
    Ok(serde_json::to_string_pretty(&MatrixOut { d, rows: &rows })?)
}

pub fn write_state_file(path: impl AsRef<Path>, state: &StateFile) -> Result<()> {
    let text = match state {
        StateFile::Vector(psi) => state_vector_json(psi)?,
        StateFile::Matrix(rho) => density_matrix_json(rho)?,
    };
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Columns `x, p, theta, P0, P1, Pplus, Pminus, PL, PR`.
pub fn write_probability_table<W: Write>(writer: W, table: &[PointerProbabilities]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in table {
        w.serialize(ProbabilityRow::from(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_probability_table<R: Read>(reader: R) -> Result<Vec<PointerProbabilities>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    r.deserialize::<ProbabilityRow>()
        .map(|row| PointerProbabilities::try_from(row?))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRow {
    x: usize,
    basis: String,
    outcome: String,
    count: u64,
    trials: u64,
}

/// Columns `x, basis, outcome, count, trials`; multinomial runs add one
/// `discard` row per basis.
pub fn write_counts<W: Write>(writer: W, counts: &[ShotCounts]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for c in counts {
        for b in &c.bases {
            let [first, second] = b.basis.outcomes();
            let mut rows = vec![(first.label(), b.first), (second.label(), b.second)];
            if c.scheme == SamplingScheme::MultinomialWithDiscard {
                rows.push((DISCARD_LABEL, b.discarded));
            }
            for (outcome, count) in rows {
                w.serialize(CountRow {
                    x: c.x,
                    basis: b.basis.label().to_string(),
                    outcome: outcome.to_string(),
                    count,
                    trials: c.trials_per_basis,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a count file back. The file carries neither coupling nor momentum,
/// so both are supplied; a file with `discard` rows is taken as multinomial.
pub fn read_counts<R: Read>(reader: R, theta: CouplingAngle, momentum: usize) -> Result<Vec<ShotCounts>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let mut out: Vec<ShotCounts> = Vec::new();
    for row in r.deserialize::<CountRow>() {
        let row = row?;
        let basis: PointerBasis = row.basis.parse()?;
        if row.trials == 0 {
            return Err(Error::invalid(format!("zero trials for x = {}", row.x)));
        }
        let idx = match out.iter().position(|c| c.x == row.x) {
            Some(i) => i,
            None => {
                out.push(ShotCounts {
                    x: row.x,
                    momentum,
                    theta,
                    trials_per_basis: row.trials,
                    scheme: SamplingScheme::Poisson,
                    bases: Vec::new(),
                });
                out.len() - 1
            }
        };
        let entry = &mut out[idx];
        if entry.trials_per_basis != row.trials {
            return Err(Error::invalid(format!("inconsistent trial counts for x = {}", row.x)));
        }
        let bi = match entry.bases.iter().position(|b| b.basis == basis) {
            Some(i) => i,
            None => {
                entry.bases.push(BasisCounts {
                    basis,
                    first: 0,
                    second: 0,
                    discarded: 0,
                });
                entry.bases.len() - 1
            }
        };
        let counts = &mut entry.bases[bi];
        if row.outcome == DISCARD_LABEL {
            counts.discarded = row.count;
            entry.scheme = SamplingScheme::MultinomialWithDiscard;
            continue;
        }
        let outcome: PointerOutcome = row.outcome.parse()?;
        let [first, second] = basis.outcomes();
        if outcome == first {
            counts.first = row.count;
        } else if outcome == second {
            counts.second = row.count;
        } else {
            return Err(Error::invalid(format!("outcome {outcome:?} does not belong to basis {basis}")));
        }
    }
    out.sort_by_key(|c| c.x);
    Ok(out)
}

#[derive(Serialize)]
struct DiagnosticsRow {
    method: &'static str,
    theta: f64,
    #[serde(rename = "psi_tilde_W")]
    psi_tilde_w: Option<f64>,
    sufficiency_ok: Option<bool>,
    bound_value: Option<f64>,
}

/// Columns `method, theta, psi_tilde_W, sufficiency_ok, bound_value`; fields
/// that do not apply are left empty.
pub fn write_diagnostics<W: Write>(writer: W, results: &[ReconstructionResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in results {
        w.serialize(DiagnosticsRow {
            method: r.method.label(),
            theta: r.theta.radians(),
            psi_tilde_w: r.psi_tilde_w,
            sufficiency_ok: r.sufficiency_ok,
            bound_value: r.bound_value,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_analysis_rows<W: Write>(writer: W, rows: &[AnalysisRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
