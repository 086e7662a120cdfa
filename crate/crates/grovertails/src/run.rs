use std::fmt::Debug;
use std::path::PathBuf;

use grovertails_core::dynamics::{
    default_max_steps, iterate, truncated_unitary_evolve, Trajectory,
};
use grovertails_core::linalg::{eigenvalues, max_abs, real};
use grovertails_core::scattering::{
    check_laws, extend_to_tails, internal_mass, kappa_all, mass_bound,
};
use grovertails_core::spectral::DEFAULT_EPSILON;
use grovertails_core::{
    grover_matrix, parse_edge_list, transmission_reflection, verify_center_space, Analysis,
    DriveConfig, Error, GraphError, SpectralDecomposition, StationaryState,
};
use thiserror::Error;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::report::{
    check_map, cx_column, cx_rows, cx_vec, CenterCheck, CenterEntry, ConfigEcho, EigenEntry,
    EvolveReport, Failure, GraphSummary, RunReport, ScatteringReport, SpectrumReport,
    TruncatedCheck,
};

/// Agreement required between the evolve limit and the linear solve.
pub const EVOLVE_AGREEMENT_TOL: f64 = 1e-8;
/// Agreement required between the truncated unitary walk and the recursion.
pub const TRUNCATION_TOL: f64 = 1e-12;
/// Steps of the truncated cross-check, further capped by the tail length.
pub const TRUNCATED_STEPS: usize = 64;
/// Tail length used when extending the stationary state for the law checks.
const LAW_TAIL_LENGTH: usize = 4;

/// Errors that stop a run before any analysis: bad configuration, unreadable
/// files, malformed graphs and tails that do not fit the graph.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl RunError {
    pub fn kind(&self) -> String {
        match self {
            RunError::Config(e) => variant_name(e),
            RunError::Io { .. } => "IoError".to_string(),
            RunError::Graph(e) => variant_name(e),
        }
    }
}

/// Innermost enum variant name from a `Debug` rendering, so that
/// `Spectral(AmbiguousModulus { .. })` becomes `AmbiguousModulus`.
pub fn variant_name(e: &impl Debug) -> String {
    let text = format!("{e:?}");
    let mut rest = text.as_str();
    loop {
        let end = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let ident = &rest[..end];
        let tail = &rest[end..];
        match tail.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => rest = inner,
            _ => return ident.to_string(),
        }
    }
}

/// Everything computed by a run, kept for the CSV exporters.
pub struct RunOutput {
    pub report: RunReport,
    pub trajectory: Option<Trajectory>,
    pub stationary: Option<StationaryState>,
    pub spectrum: Option<SpectralDecomposition>,
    pub analysis: Option<Analysis>,
}

struct Stages {
    failures: Vec<Failure>,
}

impl Stages {
    fn record<T>(&mut self, stage: &'static str, result: Result<T, Error>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(Failure {
                    stage,
                    kind: variant_name(&e),
                    message: e.to_string(),
                });
                None
            }
        }
    }

    fn fail(&mut self, stage: &'static str, kind: &str, message: String) {
        self.failures.push(Failure {
            stage,
            kind: kind.to_string(),
            message,
        });
    }
}

pub fn load_graph(path: &PathBuf) -> Result<grovertails_core::InternalGraph, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(parse_edge_list(&text)?)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let graph = load_graph(&cfg.graph_path)?;
    // invalid tail positions are input errors, not analysis failures
    grovertails_core::attach_tails(graph.clone(), &cfg.tails)?;

    let mut stages = Stages {
        failures: Vec::new(),
    };
    let summary = GraphSummary {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        arcs: 2 * graph.edge_count(),
        cyclomatic_number: graph.cyclomatic_number(),
        boundary: {
            let mut b = cfg.tails.clone();
            b.sort_unstable();
            b.dedup();
            b
        },
        tilde_degrees: (0..graph.vertex_count())
            .map(|u| graph.degree(u) + cfg.tails.iter().filter(|&&t| t == u).count())
            .collect(),
    };
    let mut out = RunOutput {
        report: RunReport {
            config: ConfigEcho::new(cfg),
            graph: summary,
            evolve: None,
            spectrum: None,
            scattering: None,
            passed: false,
            failures: Vec::new(),
        },
        trajectory: None,
        stationary: None,
        spectrum: None,
        analysis: None,
    };

    if let Some(analysis) = stages.record("construct", Analysis::new(graph, &cfg.tails)) {
        let inflow = cfg.inflow_or_default();
        let mode = cfg.mode;

        let stationary = if mode.is_stationary() || (mode == Mode::Evolve && is_one(cfg)) {
            let drive =
                DriveConfig::stationary(analysis.tailed(), inflow.clone()).map_err(Error::from);
            let solved = drive.and_then(|d| analysis.stationary(&d).map(|s| (d, s)));
            stages.record("stationary", solved)
        } else {
            None
        };

        if matches!(mode, Mode::Evolve | Mode::All) {
            let drive =
                DriveConfig::new(analysis.tailed(), inflow.clone(), cfg.z).map_err(Error::from);
            if let Some(drive) = stages.record("evolve", drive) {
                let (report, traj) = evolve_stage(
                    cfg,
                    &analysis,
                    &drive,
                    stationary.as_ref().map(|(_, s)| s),
                    &mut stages,
                );
                out.report.evolve = report;
                out.trajectory = traj;
            }
        }

        if matches!(mode, Mode::Spectrum | Mode::Verify | Mode::All) {
            if let Some(dec) = stages.record("spectrum", analysis.spectrum(DEFAULT_EPSILON)) {
                out.report.spectrum = Some(spectrum_stage(&analysis, &dec, &mut stages));
                out.spectrum = Some(dec);
            }
        }

        if let (true, Some((drive, state))) = (mode.is_stationary(), &stationary) {
            out.report.scattering =
                Some(scattering_stage(cfg, &analysis, drive, state, &mut stages));
        }
        out.stationary = stationary.map(|(_, s)| s);
        out.analysis = Some(analysis);
    }

    out.report.passed = stages.failures.is_empty();
    out.report.failures = stages.failures;
    Ok(out)
}

fn is_one(cfg: &RunConfig) -> bool {
    (cfg.z - real(1.0)).norm() <= 1e-12
}

fn evolve_stage(
    cfg: &RunConfig,
    analysis: &Analysis,
    drive: &DriveConfig,
    solved: Option<&StationaryState>,
    stages: &mut Stages,
) -> (Option<EvolveReport>, Option<Trajectory>) {
    let max_steps = match cfg.steps {
        Some(n) => n,
        None => {
            let ev = match eigenvalues(&analysis.operators().e_pon) {
                Ok(ev) => ev,
                Err(e) => {
                    stages.record::<()>("evolve", Err(e.into()));
                    return (None, None);
                }
            };
            let radius = ev
                .iter()
                .map(|z| z.norm())
                .filter(|&m| m < 1.0 - DEFAULT_EPSILON)
                .fold(0.0, f64::max);
            default_max_steps(analysis.arcs().len(), radius)
        }
    };
    let traj = iterate(
        analysis.tailed(),
        analysis.arcs(),
        analysis.operators(),
        drive,
        max_steps,
        cfg.tol,
    );
    let final_residual = traj.residuals.last().copied();
    if !traj.converged {
        stages.fail(
            "evolve",
            "NotConverged",
            format!(
                "no convergence after {} steps, last residual {:e}",
                traj.steps_taken,
                final_residual.unwrap_or(f64::NAN)
            ),
        );
    }
    let limit = traj.limit(drive.z());
    let distance_to_solve = solved
        .filter(|_| traj.converged)
        .map(|s| limit.sup_distance(&s.psi));
    if let Some(d) = distance_to_solve {
        if d >= EVOLVE_AGREEMENT_TOL {
            stages.fail(
                "evolve",
                "LimitMismatch",
                format!("evolve limit differs from the linear solve by {d:e}"),
            );
        }
    }

    let steps = TRUNCATED_STEPS.min(cfg.truncation - 1);
    let truncated = match truncated_unitary_evolve(
        analysis.tailed(),
        analysis.arcs(),
        drive,
        cfg.truncation,
        steps,
    ) {
        Ok(history) => {
            let reference = iterate(
                analysis.tailed(),
                analysis.arcs(),
                analysis.operators(),
                drive,
                steps,
                0.0,
            );
            let max_deviation = history
                .restricted()
                .zip(&reference.states)
                .map(|(x, y)| x.sup_distance(y))
                .fold(0.0, f64::max);
            let max_norm_defect = history
                .norm_defects
                .iter()
                .fold(0.0f64, |m, d| m.max(d.abs()));
            if max_deviation >= TRUNCATION_TOL || max_norm_defect >= TRUNCATION_TOL {
                stages.fail(
                    "evolve",
                    "TruncationMismatch",
                    format!("truncated walk deviates by {max_deviation:e}, norm defect {max_norm_defect:e}"),
                );
            }
            TruncatedCheck {
                tail_length: cfg.truncation,
                steps,
                max_deviation,
                max_norm_defect,
                tolerance: TRUNCATION_TOL,
            }
        }
        Err(e) => {
            stages.record::<()>("evolve", Err(e.into()));
            return (None, Some(traj));
        }
    };

    let report = EvolveReport {
        max_steps,
        steps_taken: traj.steps_taken,
        converged: traj.converged,
        tol: cfg.tol,
        final_residual,
        limit: cx_column(&limit.0),
        distance_to_solve,
        truncated,
    };
    (Some(report), Some(traj))
}

fn spectrum_stage(
    analysis: &Analysis,
    dec: &SpectralDecomposition,
    stages: &mut Stages,
) -> SpectrumReport {
    let center_check = stages
        .record(
            "spectrum",
            verify_center_space(dec, analysis.center(), analysis.arcs().len()).map_err(Error::from),
        )
        .map(|r| CenterCheck {
            center_dim: r.center_dim,
            basis_dim: r.basis_dim,
            c_plus_dim: r.c_plus_dim,
            c_minus_dim: r.c_minus_dim,
            t_per_dim: r.t_per_dim,
            max_principal_sine: r.max_principal_sine,
            eigenvalues_match: r.eigenvalues_match,
        });
    SpectrumReport {
        epsilon: dec.epsilon,
        spectral_radius: dec.spectral_radius(),
        stable_radius: dec.stable_radius(),
        eigenvalues: dec
            .eigenvalues
            .iter()
            .zip(&dec.classes)
            .zip(&dec.residuals)
            .map(|((z, class), &residual)| EigenEntry {
                value: (*z).into(),
                modulus: z.norm(),
                class: class.as_str(),
                residual,
            })
            .collect(),
        center: dec
            .center
            .iter()
            .map(|c| CenterEntry {
                eigenvalue: c.eigenvalue.into(),
                multiplicity: c.multiplicity,
            })
            .collect(),
        sigma_per: analysis.center().sigma_per.clone(),
        center_check,
    }
}

fn scattering_stage(
    cfg: &RunConfig,
    analysis: &Analysis,
    drive: &DriveConfig,
    state: &StationaryState,
    stages: &mut Stages,
) -> ScatteringReport {
    let (tg, arcs) = (analysis.tailed(), analysis.arcs());
    let outflow = transmission_reflection(tg, arcs, &state.psi, drive);

    let (scattering_matrix, matrix_deviation) =
        if matches!(cfg.mode, Mode::Scatter | Mode::Verify | Mode::All) && tg.tail_count() >= 2 {
            match stages.record("scatter", analysis.scattering_matrix()) {
                Some(m) => {
                    let expect = grover_matrix(tg.tail_count())
                        .expect("at least two tails")
                        .map(real);
                    let deviation = max_abs(&(&m - expect));
                    (Some(cx_rows(&m)), Some(deviation))
                }
                None => (None, None),
            }
        } else {
            (None, None)
        };

    let full = extend_to_tails(&state.psi, &outflow, LAW_TAIL_LENGTH);
    let laws = check_laws(
        tg,
        arcs,
        analysis.operators(),
        analysis.cycles(),
        &full,
        &outflow,
        cfg.seed,
    )
    .map_err(Error::from);
    let checks = stages.record("verify", laws).map(|report| {
        for c in report.checks.iter().filter(|c| !c.passed) {
            stages.fail(
                "verify",
                "LawViolated",
                format!("law `{}` violated by {:e}", c.name, c.magnitude),
            );
        }
        check_map(&report)
    });

    ScatteringReport {
        tails: cfg.tails.clone(),
        alpha: cx_vec(&outflow.alpha),
        beta: cx_vec(&outflow.beta),
        c: outflow.c.into(),
        t_star: outflow.t_star.map(Into::into),
        r_star: outflow.r_star.map(Into::into),
        transmission_rate: outflow.transmission_rate(),
        reflection_rate: outflow.reflection_rate(),
        kappa: cx_vec(&kappa_all(tg, arcs, &state.psi)),
        internal_mass: internal_mass(&state.psi),
        bound: mass_bound(tg),
        psi: cx_column(&state.psi.0),
        residual: state.residual,
        center_leak: state.center_leak,
        scattering_matrix,
        matrix_deviation,
        checks,
    }
}
