//! Stationary state of the `z = 1` drive, the outflow it produces on the
//! tails, the r-tail scattering matrix and the flow laws the stationary
//! state obeys.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{
    external_source, grover_step, DriveConfig, DynamicsError, StateVector, TailedState,
};
use crate::graph::{ArcSpace, OrientedCycle, TailedGraph};
use crate::linalg::{
    max_abs, min_norm_solve, orthonormal_basis, real, singular_values, sup_norm, CMatrix, CVector,
    LinalgError,
};
use crate::operators::{grover_matrix, WalkOperators};
use crate::spectral::CenterBasis;

pub const STATIONARY_TOL: f64 = 1e-10;
pub const LAW_TOL: f64 = 1e-10;
pub const MATRIX_TOL: f64 = 1e-8;
pub const CUT_SAMPLES: usize = 20;
const SOLVE_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error("stationary problems need z = 1, got {re}+{im}i")]
    DriveNotStationary { re: f64, im: f64 },
    #[error("stationary residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },
    #[error("source overlaps the center space by {leak:e}")]
    CenterLeak { leak: f64 },
    #[error("scattering matrix deviates from the Grover matrix by {deviation:e}")]
    MatrixMismatch { deviation: f64 },
    #[error("a scattering matrix needs at least two tails, got {count}")]
    TooFewTails { count: usize },
    #[error("law `{name}` violated by {magnitude:e}")]
    LawViolated { name: &'static str, magnitude: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub psi: StateVector,
    /// `‖(I - E_PON)ψ - ρ‖_sup`.
    pub residual: f64,
    /// Largest overlap of the source with a unit center direction, measured
    /// before the center components are projected out.
    pub center_leak: f64,
}

/// Minimal-norm solution of `(I - E_PON)ψ = ρ` with all center components
/// removed.
pub fn solve_stationary(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    drive: &DriveConfig,
    center: &CenterBasis,
) -> Result<StationaryState, ScatteringError> {
    let z = drive.z();
    if (z - real(1.0)).norm() > 1e-12 {
        return Err(ScatteringError::DriveNotStationary { re: z.re, im: z.im });
    }
    let n = arcs.len();
    let rho = external_source(tg, arcs, drive);
    let q = orthonormal_basis(n, &center.vectors(), 1e-10)?;
    let center_leak = if q.ncols() == 0 {
        0.0
    } else {
        sup_norm(&(q.adjoint() * &rho.0))
    };

    let system = CMatrix::identity(n, n) - &ops.e_pon;
    let mut psi = min_norm_solve(&system, &rho.0, SOLVE_CUTOFF)?;
    if q.ncols() > 0 {
        psi -= &q * (q.adjoint() * &psi);
    }
    let residual = sup_norm(&(&system * &psi - &rho.0));
    if residual >= STATIONARY_TOL {
        return Err(ScatteringError::ResidualTooLarge { residual });
    }
    if center_leak >= STATIONARY_TOL {
        return Err(ScatteringError::CenterLeak { leak: center_leak });
    }
    Ok(StationaryState {
        psi: StateVector(psi),
        residual,
        center_leak,
    })
}

/// `κ(u) = (2/d̃(u)) Σ_{t(a)=u} ψ(a)`.
pub fn kappa(tg: &TailedGraph, arcs: &ArcSpace, psi: &StateVector, u: usize) -> Complex64 {
    let sum: Complex64 = arcs.in_arcs(u).iter().map(|&a| psi.0[a]).sum();
    sum * (2.0 / tg.tilde_degree(u) as f64)
}

pub fn kappa_all(tg: &TailedGraph, arcs: &ArcSpace, psi: &StateVector) -> Vec<Complex64> {
    (0..tg.internal().vertex_count())
        .map(|u| kappa(tg, arcs, psi, u))
        .collect()
}

pub fn average(values: &[Complex64]) -> Complex64 {
    if values.is_empty() {
        return real(0.0);
    }
    values.iter().sum::<Complex64>() / values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outflow {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// Mean in-amplitude `κ(u)/2 + f_in(u)/d̃(u)` per vertex.
    pub vertex_constant: Vec<Complex64>,
    /// Average of `vertex_constant`; equals `ave(α)` for a genuine stationary state.
    pub c: Complex64,
    /// Far-tail outflow for two tails with `α = (1, 0)`.
    pub t_star: Option<Complex64>,
    /// Near-tail outflow for two tails with `α = (1, 0)`.
    pub r_star: Option<Complex64>,
}

impl Outflow {
    pub fn transmission_rate(&self) -> Option<f64> {
        self.t_star.map(|t| t.norm_sqr())
    }

    pub fn reflection_rate(&self) -> Option<f64> {
        self.r_star.map(|r| r.norm_sqr())
    }
}

fn is_unit_first_two_tail(alpha: &[Complex64]) -> bool {
    alpha.len() == 2 && alpha[0] == real(1.0) && alpha[1] == real(0.0)
}

/// Outflow per tail, `β_j = -α_j + (2/d̃(u_j)) f_in(u_j) + κ(u_j)`.
pub fn transmission_reflection(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    psi: &StateVector,
    drive: &DriveConfig,
) -> Outflow {
    let alpha = drive.inflow().to_vec();
    let n = tg.internal().vertex_count();
    let kappas = kappa_all(tg, arcs, psi);
    let vertex_constant: Vec<Complex64> = (0..n)
        .map(|u| kappas[u] * 0.5 + drive.inflow_at(tg, u) / tg.tilde_degree(u) as f64)
        .collect();
    let beta: Vec<Complex64> = tg
        .tail_attachments()
        .iter()
        .zip(&alpha)
        .map(|(&u, &a)| -a + drive.inflow_at(tg, u) * (2.0 / tg.tilde_degree(u) as f64) + kappas[u])
        .collect();
    let (t_star, r_star) = if is_unit_first_two_tail(&alpha) {
        (Some(beta[1]), Some(beta[0]))
    } else {
        (None, None)
    };
    Outflow {
        c: average(&vertex_constant),
        alpha,
        beta,
        vertex_constant,
        t_star,
        r_star,
    }
}

/// Column `j` is the outflow for unit inflow on tail `j`. Fails when the
/// result is not the Grover matrix of size `r` to within `MATRIX_TOL`.
pub fn scattering_matrix(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    center: &CenterBasis,
) -> Result<CMatrix, ScatteringError> {
    let r = tg.tail_count();
    if r < 2 {
        return Err(ScatteringError::TooFewTails { count: r });
    }
    let mut m = CMatrix::zeros(r, r);
    for j in 0..r {
        let mut inflow = vec![real(0.0); r];
        inflow[j] = real(1.0);
        let drive = DriveConfig::stationary(tg, inflow)?;
        let state = solve_stationary(tg, arcs, ops, &drive, center)?;
        let out = transmission_reflection(tg, arcs, &state.psi, &drive);
        for i in 0..r {
            m[(i, j)] = out.beta[i];
        }
    }
    let expect = grover_matrix(r).expect("r >= 2").map(real);
    let deviation = max_abs(&(&m - expect));
    if deviation >= MATRIX_TOL {
        return Err(ScatteringError::MatrixMismatch { deviation });
    }
    Ok(m)
}

/// The stationary state on the tailed graph cut at `tail_length`: inbound
/// tail arcs carry `α`, outbound tail arcs `β`, internal arcs `ψ`.
pub fn extend_to_tails(psi: &StateVector, outflow: &Outflow, tail_length: usize) -> TailedState {
    TailedState {
        internal: psi.0.clone(),
        inbound: outflow
            .alpha
            .iter()
            .map(|&a| vec![a; tail_length])
            .collect(),
        outbound: outflow.beta.iter().map(|&b| vec![b; tail_length]).collect(),
    }
}

/// `‖UΨ - Ψ‖_sup` with the far ends of the inbound tails fed with `α`.
pub fn stationarity_residual(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    state: &TailedState,
    alpha: &[Complex64],
) -> f64 {
    let (next, _) = grover_step(tg, arcs, state, alpha);
    let internal = sup_norm(&(&next.internal - &state.internal));
    let tails = next
        .inbound
        .iter()
        .zip(&state.inbound)
        .chain(next.outbound.iter().zip(&state.outbound))
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max);
    internal.max(tails)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawCheck {
    pub name: &'static str,
    pub magnitude: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KirchhoffReport {
    pub checks: Vec<LawCheck>,
}

impl KirchhoffReport {
    fn push(&mut self, name: &'static str, magnitude: f64, tolerance: f64) {
        let passed = magnitude.is_finite() && magnitude < tolerance;
        self.checks.push(LawCheck {
            name,
            magnitude,
            tolerance,
            passed,
        });
    }

    /// Records `value >= bound` as a check whose magnitude is the shortfall.
    fn push_lower_bound(&mut self, name: &'static str, value: f64, bound: f64) {
        let shortfall = (bound - value).max(0.0);
        let passed = value.is_finite() && value >= bound - LAW_TOL;
        self.checks.push(LawCheck {
            name,
            magnitude: shortfall,
            tolerance: LAW_TOL,
            passed,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Σ|ψ(a)|²` over internal arcs.
pub fn internal_mass(psi: &StateVector) -> f64 {
    psi.mass()
}

/// Random nonempty vertex subsets from a fixed-seed generator.
pub fn random_vertex_subsets(vertex_count: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count && vertex_count > 0 {
        let subset: Vec<usize> = (0..vertex_count)
            .filter(|_| rng.next_u32() & 1 == 1)
            .collect();
        if !subset.is_empty() {
            out.push(subset);
        }
    }
    out
}

/// `|‖Ψ|_in‖² - ‖Ψ|_out‖²|` for the arcs crossing into and out of `subset`,
/// tail arcs included.
pub fn cut_flux_defect(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    state: &TailedState,
    subset: &[usize],
) -> f64 {
    let mut inside = vec![false; tg.internal().vertex_count()];
    for &u in subset {
        inside[u] = true;
    }
    let mut flux_in = 0.0;
    let mut flux_out = 0.0;
    for (a, o, t) in arcs.iter() {
        let w = state.internal[a].norm_sqr();
        match (inside[o], inside[t]) {
            (false, true) => flux_in += w,
            (true, false) => flux_out += w,
            _ => {}
        }
    }
    for (s, &u) in tg.tail_attachments().iter().enumerate() {
        if inside[u] {
            flux_in += state.inbound[s][0].norm_sqr();
            flux_out += state.outbound[s][0].norm_sqr();
        }
    }
    (flux_in - flux_out).abs()
}

/// Smallest and second-smallest singular values of `T - D` and the angle
/// defect between the kernel direction and `√d̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronKernel {
    pub smallest: f64,
    pub second: f64,
    pub direction_defect: f64,
}

pub fn perron_kernel(ops: &WalkOperators) -> Result<PerronKernel, ScatteringError> {
    let n = ops.vertex_count();
    let m = &ops.t - &ops.d;
    let sv = singular_values(&m)?;
    let smallest = sv.last().copied().unwrap_or(0.0);
    let second = if n >= 2 { sv[n - 2] } else { f64::INFINITY };
    let root: CVector = CVector::from_iterator(
        n,
        ops.tilde_degrees().iter().map(|&d| real(Float::sqrt(d as f64))),
    );
    let unit = &root / real(root.norm());
    let direction_defect = sup_norm(&(&m * &unit));
    Ok(PerronKernel {
        smallest,
        second,
        direction_defect,
    })
}

/// `(T - D)((1/2)M^{1/2}κ + M^{-1/2}f_in)` in sup norm.
pub fn master_vertex_residual(
    tg: &TailedGraph,
    ops: &WalkOperators,
    kappas: &[Complex64],
    drive: &DriveConfig,
) -> f64 {
    let n = ops.vertex_count();
    let x = CVector::from_iterator(
        n,
        (0..n).map(|u| {
            let root = Float::sqrt(tg.tilde_degree(u) as f64);
            kappas[u] * (0.5 * root) + drive.inflow_at(tg, u) / root
        }),
    );
    sup_norm(&((&ops.t - &ops.d) * x))
}

/// Evaluates every stationary-state law on the tail-extended state.
#[allow(clippy::too_many_arguments)]
pub fn check_laws(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    cycles: &[OrientedCycle],
    state: &TailedState,
    outflow: &Outflow,
    seed: u64,
) -> Result<KirchhoffReport, ScatteringError> {
    let mut report = KirchhoffReport::default();
    let alpha = &outflow.alpha;
    let ave = average(alpha);
    let n = tg.internal().vertex_count();
    let psi = StateVector(state.internal.clone());

    let mut vertex = 0.0f64;
    for u in 0..n {
        let target = ave * tg.tilde_degree(u) as f64;
        vertex = vertex.max((state.in_sum(tg, arcs, u) - target).norm());
        vertex = vertex.max((state.out_sum(tg, arcs, u) - target).norm());
    }
    report.push("vertex_sums", vertex, LAW_TOL);

    let edge = arcs
        .iter()
        .map(|(a, _, _)| (psi.0[a] + psi.0[arcs.bar(a)] - ave * 2.0).norm())
        .fold(0.0, f64::max);
    report.push("edge_sums", edge, LAW_TOL);

    let c_spread = outflow
        .vertex_constant
        .iter()
        .map(|c| (c - ave).norm())
        .fold(0.0, f64::max);
    report.push("perron_constant", c_spread, LAW_TOL);

    let flow = |a: usize| psi.0[a] - ave;
    let mut antisymmetry = arcs
        .iter()
        .map(|(a, _, _)| (flow(a) + flow(arcs.bar(a))).norm())
        .fold(0.0, f64::max);
    for (a, b) in alpha.iter().zip(&outflow.beta) {
        antisymmetry = antisymmetry.max((a + b - ave * 2.0).norm());
    }
    report.push("flow_antisymmetry", antisymmetry, LAW_TOL);

    let mut current = 0.0f64;
    for u in 0..n {
        let internal: Complex64 = arcs.out_arcs(u).iter().map(|&a| flow(a)).sum();
        let tails: Complex64 = tg
            .tail_attachments()
            .iter()
            .zip(&outflow.beta)
            .filter(|(&v, _)| v == u)
            .map(|(_, &b)| b - ave)
            .sum();
        current = current.max((internal + tails).norm());
    }
    report.push("current_law", current, LAW_TOL);

    let cycle = cycles
        .iter()
        .map(|c| c.arcs().iter().map(|&a| flow(a)).sum::<Complex64>().norm())
        .fold(0.0, f64::max);
    report.push("cycle_sums", cycle, LAW_TOL);

    let cut = random_vertex_subsets(n, CUT_SAMPLES, seed)
        .iter()
        .map(|s| cut_flux_defect(tg, arcs, state, s))
        .fold(0.0, f64::max);
    report.push("cut_conservation", cut, LAW_TOL);

    let flux_in: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
    let flux_out: f64 = outflow.beta.iter().map(|b| b.norm_sqr()).sum();
    report.push("tail_flux", (flux_in - flux_out).abs(), LAW_TOL);

    let re_in: f64 = alpha.iter().map(|a| a.re * a.re).sum();
    let re_out: f64 = outflow.beta.iter().map(|b| b.re * b.re).sum();
    report.push("energy_real", (re_in - re_out).abs(), LAW_TOL);
    let im_in: f64 = alpha.iter().map(|a| a.im * a.im).sum();
    let im_out: f64 = outflow.beta.iter().map(|b| b.im * b.im).sum();
    report.push("energy_imag", (im_in - im_out).abs(), LAW_TOL);

    let kappas = kappa_all(tg, arcs, &psi);
    let drive = DriveConfig::stationary(tg, alpha.clone())?;
    report.push(
        "master_vertex_equation",
        master_vertex_residual(tg, ops, &kappas, &drive),
        LAW_TOL,
    );

    let perron = perron_kernel(ops)?;
    report.push(
        "perron_kernel",
        perron.smallest.max(perron.direction_defect),
        1e-12,
    );

    if is_unit_first_two_tail(alpha) {
        report.push_lower_bound("mass_bound", internal_mass(&psi), mass_bound(tg));
    }
    Ok(report)
}

/// `|E0| / 2`.
pub fn mass_bound(tg: &TailedGraph) -> f64 {
    tg.internal().edge_count() as f64 / 2.0
}

/// [`check_laws`] turned into an error on the first failing law.
#[allow(clippy::too_many_arguments)]
pub fn verify_laws(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    cycles: &[OrientedCycle],
    state: &TailedState,
    outflow: &Outflow,
    seed: u64,
) -> Result<KirchhoffReport, ScatteringError> {
    let report = check_laws(tg, arcs, ops, cycles, state, outflow, seed)?;
    match report.first_failure() {
        Some(fail) => Err(ScatteringError::LawViolated {
            name: fail.name,
            magnitude: fail.magnitude,
        }),
        None => Ok(report),
    }
}
