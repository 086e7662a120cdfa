//! Per-table CSV exports. JSON stays the canonical report; these are flat
//! tables for plotting tools.

use serde::Serialize;

use crate::config::Mode;
use crate::run::RunOutput;

#[derive(Serialize)]
struct TrajectoryRow {
    step: usize,
    arc: usize,
    re: f64,
    im: f64,
    /// `sup |z ψ_{n+1} - ψ_n|`, empty for the last recorded state.
    residual: Option<f64>,
}

#[derive(Serialize)]
struct StateRow {
    arc: usize,
    origin: usize,
    terminus: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EigenRow {
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
    class: &'static str,
    residual: f64,
}

#[derive(Serialize)]
struct MatrixRow {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    check: &'a str,
    magnitude: f64,
    tolerance: f64,
    passed: bool,
}

/// CSV table for the run's mode. Sections that failed to compute yield a
/// header-only table.
pub fn to_csv(output: &RunOutput, mode: Mode) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match mode {
        Mode::Evolve => {
            if let Some(traj) = &output.trajectory {
                for (step, state) in traj.states.iter().enumerate() {
                    for (arc, z) in state.0.iter().enumerate() {
                        let residual = traj.residuals.get(step).copied();
                        w.serialize(TrajectoryRow {
                            step,
                            arc,
                            re: z.re,
                            im: z.im,
                            residual,
                        })?;
                    }
                }
            } else {
                w.write_record(["step", "arc", "re", "im", "residual"])?;
            }
        }
        Mode::Stationary => match (&output.stationary, &output.analysis) {
            (Some(state), Some(a)) => {
                for (arc, origin, terminus) in a.arcs().iter() {
                    let z = state.psi.0[arc];
                    w.serialize(StateRow {
                        arc,
                        origin,
                        terminus,
                        re: z.re,
                        im: z.im,
                    })?;
                }
            }
            _ => w.write_record(["arc", "origin", "terminus", "re", "im"])?,
        },
        Mode::Spectrum => match &output.spectrum {
            Some(dec) => {
                for (index, ((z, class), &residual)) in dec
                    .eigenvalues
                    .iter()
                    .zip(&dec.classes)
                    .zip(&dec.residuals)
                    .enumerate()
                {
                    w.serialize(EigenRow {
                        index,
                        re: z.re,
                        im: z.im,
                        modulus: z.norm(),
                        class: class.as_str(),
                        residual,
                    })?;
                }
            }
            None => w.write_record(["index", "re", "im", "modulus", "class", "residual"])?,
        },
        Mode::Scatter => match output
            .report
            .scattering
            .as_ref()
            .and_then(|s| s.scattering_matrix.as_ref())
        {
            Some(rows) => {
                for (row, entries) in rows.iter().enumerate() {
                    for (col, z) in entries.iter().enumerate() {
                        w.serialize(MatrixRow {
                            row,
                            col,
                            re: z.0[0],
                            im: z.0[1],
                        })?;
                    }
                }
            }
            None => w.write_record(["row", "col", "re", "im"])?,
        },
        Mode::Verify => match output
            .report
            .scattering
            .as_ref()
            .and_then(|s| s.checks.as_ref())
        {
            Some(checks) => {
                for (name, c) in checks {
                    w.serialize(CheckRow {
                        check: name,
                        magnitude: c.magnitude,
                        tolerance: c.tolerance,
                        passed: c.passed,
                    })?;
                }
            }
            None => w.write_record(["check", "magnitude", "tolerance", "passed"])?,
        },
        Mode::All => anyhow::bail!("csv output covers a single table"),
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
