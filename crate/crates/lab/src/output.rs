//! CSV rendering with a leading metadata comment.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dirtomo_core::measurement::SamplingScheme;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::LabResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn scheme_label(scheme: SamplingScheme) -> &'static str {
    match scheme {
        SamplingScheme::MultinomialWithDiscard => "multinomial",
        SamplingScheme::Poisson => "poisson",
    }
}

/// `# dirtomo-lab <version> campaign=... d=... ...`. The worker count is left
/// out so that output does not depend on it.
pub fn metadata_line(campaign: &str, cfg: &ExperimentConfig) -> String {
    let thetas: Vec<String> = cfg.thetas.iter().map(|t| t.to_string()).collect();
    format!(
        "# dirtomo-lab {VERSION} campaign={campaign} d={} thetas={} samples={} shots={} reps={} seed={} rank={} scheme={}",
        cfg.d,
        thetas.join(";"),
        cfg.samples,
        cfg.shots,
        cfg.reps,
        cfg.seed,
        cfg.rank,
        scheme_label(cfg.scheme),
    )
}

pub fn render_csv<R: Serialize>(metadata: &str, rows: &[R]) -> LabResult<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "{metadata}")?;
    let mut w = csv::Writer::from_writer(&mut buf);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    drop(w);
    Ok(buf)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> LabResult<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Path of the gnuplot script written next to `csv`.
pub fn hints_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".gp");
    PathBuf::from(name)
}

/// A gnuplot script plotting the campaign's main columns from `csv`.
pub fn gnuplot_hints(campaign: &str, csv: &Path) -> String {
    let file = csv.display();
    let body = match campaign {
        "accuracy-sweep" => format!(
            "set xlabel 'theta'\nset ylabel 'probability'\nset logscale y\n\
             plot '{file}' using 1:2 with linespoints title 'p_W', '' using 1:3 with linespoints title 'p_D'\n"
        ),
        "scatter" => format!(
            "set xlabel 'psi_tilde_W'\nset ylabel 'delta_psi_S / delta_psi_W'\n\
             plot '{file}' using 6:10 with dots title 'states', '' using 6:12 with dots title 'bound (psi_tilde from psi_tilde_W)'\n\
             # versus D: plot '{file}' using 4:10 with dots\n"
        ),
        "theta-means" => format!(
            "set xlabel 'theta'\nset ylabel 'mean'\n\
             plot '{file}' using 1:2 with linespoints title 'mean ratio', '' using 1:3 with linespoints title 'mean D'\n"
        ),
        "shot-noise" => format!(
            "set xlabel 'delta_pred'\nset ylabel 'delta_emp'\n\
             plot '{file}' using 6:5 with points title 'states', x title 'y = x'\n"
        ),
        "mixed" => format!(
            "set xlabel 'D_closed'\nset ylabel 'D_pipeline'\n\
             plot '{file}' using 5:6 with points title 'rho', x title 'y = x'\n"
        ),
        _ => String::new(),
    };
    format!("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n{body}")
}
