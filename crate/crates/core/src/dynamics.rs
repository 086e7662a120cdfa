//! The driven recursion `ψ_{n+1} = E_PON ψ_n + z^{-n} ρ` on internal arcs and
//! an independent full-unitary evolution on a tailed graph whose tails are
//! cut at a finite length.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use thiserror::Error;

use crate::graph::{ArcSpace, TailedGraph};
use crate::linalg::{sup_norm, CVector};
use crate::operators::WalkOperators;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_STEPS_CAP: usize = 2_000_000;
/// Number of leading states a [`Trajectory`] keeps.
pub const HISTORY_LEN: usize = 4_096;
pub const MIN_STEPS: usize = 1_000;
const UNIT_MODULUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("drive frequency z = {re} + {im}i is not on the unit circle")]
    NotUnitModulus { re: f64, im: f64 },
    #[error("expected {expected} inflow amplitudes (one per tail), got {got}")]
    InflowLength { expected: usize, got: usize },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("no convergence after {steps} steps, last residual {last_residual:e}")]
    NotConverged { steps: usize, last_residual: f64 },
    #[error("truncation length {tail_length} must exceed the step count {steps}")]
    TruncationTooShort { tail_length: usize, steps: usize },
}

/// Walker amplitudes on the internal arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub CVector);

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        StateVector(CVector::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn sup_distance(&self, other: &StateVector) -> f64 {
        sup_norm(&(&self.0 - &other.0))
    }

    /// `Σ |ψ(a)|²`.
    pub fn mass(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Constant inflow `α_j` per tail and drive frequency `z` on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    inflow: Vec<Complex64>,
    z: Complex64,
}

impl DriveConfig {
    pub fn new(
        tg: &TailedGraph,
        inflow: Vec<Complex64>,
        z: Complex64,
    ) -> Result<Self, DynamicsError> {
        if inflow.len() != tg.tail_count() {
            return Err(DynamicsError::InflowLength {
                expected: tg.tail_count(),
                got: inflow.len(),
            });
        }
        if (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(DynamicsError::NotUnitModulus { re: z.re, im: z.im });
        }
        Ok(DriveConfig { inflow, z })
    }

    /// `z = 1` drive.
    pub fn stationary(tg: &TailedGraph, inflow: Vec<Complex64>) -> Result<Self, DynamicsError> {
        Self::new(tg, inflow, Complex64::new(1.0, 0.0))
    }

    /// Unit inflow on the first tail, nothing on the others, `z = 1`.
    pub fn unit_first(tg: &TailedGraph) -> Self {
        let mut inflow = vec![Complex64::new(0.0, 0.0); tg.tail_count()];
        inflow[0] = Complex64::new(1.0, 0.0);
        DriveConfig {
            inflow,
            z: Complex64::new(1.0, 0.0),
        }
    }

    pub fn inflow(&self) -> &[Complex64] {
        &self.inflow
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Summed inflow per vertex, `f_in(u)`.
    pub fn inflow_at(&self, tg: &TailedGraph, u: usize) -> Complex64 {
        tg.tail_attachments()
            .iter()
            .zip(&self.inflow)
            .filter(|(&v, _)| v == u)
            .map(|(_, &alpha)| alpha)
            .sum()
    }
}

/// `ρ = χ U Ψ_0`: one Grover step applied to the incoming plane state and
/// restricted to internal arcs.
pub fn external_source(tg: &TailedGraph, arcs: &ArcSpace, drive: &DriveConfig) -> StateVector {
    let mut rho = CVector::zeros(arcs.len());
    for (a, o, _) in arcs.iter() {
        // Ψ_0 vanishes on internal arcs, so only the tail arcs into o(a) count
        // and the reflection term -Ψ_0(ā) drops.
        let incoming = drive.inflow_at(tg, o);
        rho[a] = incoming * (2.0 / tg.tilde_degree(o) as f64);
    }
    StateVector(rho)
}

/// `ψ_{n+1} = E_PON ψ_n + z^{-n} ρ`.
pub fn step(
    psi: &StateVector,
    n: usize,
    ops: &WalkOperators,
    rho: &StateVector,
    z: Complex64,
) -> StateVector {
    let phase = z.powi(-(n as i32));
    StateVector(&ops.e_pon * &psi.0 + &rho.0 * phase)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `ψ_0, ψ_1, ...` as produced by the recursion, at most [`HISTORY_LEN`]
    /// of them.
    pub states: Vec<StateVector>,
    /// `ψ_n` for `n = steps_taken`.
    pub last: StateVector,
    /// `residuals[n] = sup |z ψ_{n+1} - ψ_n|`.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Number of recursion steps applied.
    pub steps_taken: usize,
}

impl Trajectory {
    /// Index of the first state already within tolerance of its successor.
    pub fn settled_step(&self) -> Option<usize> {
        self.converged.then(|| self.steps_taken - 1)
    }

    /// `z^n ψ_n` at the last step, the stationary limit when converged.
    pub fn limit(&self, z: Complex64) -> StateVector {
        StateVector(&self.last.0 * z.powi(self.steps_taken as i32))
    }
}

/// Iterates until the successive difference of `z^n ψ_n` drops below `tol`
/// or `max_steps` is reached. Never fails; see [`evolve`].
pub fn iterate(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    drive: &DriveConfig,
    max_steps: usize,
    tol: f64,
) -> Trajectory {
    let rho = external_source(tg, arcs, drive);
    let z = drive.z();
    let mut current = StateVector::zeros(arcs.len());
    let mut states = vec![current.clone()];
    let mut residuals = Vec::new();
    let mut converged = false;
    for n in 0..max_steps {
        let next = step(&current, n, ops, &rho, z);
        let residual = sup_norm(&(&next.0 * z - &current.0));
        residuals.push(residual);
        if states.len() < HISTORY_LEN {
            states.push(next.clone());
        }
        current = next;
        if residual < tol {
            converged = true;
            break;
        }
    }
    let steps_taken = residuals.len();
    Trajectory {
        states,
        last: current,
        residuals,
        converged,
        steps_taken,
    }
}

/// [`iterate`] that reports a missing limit as an error.
pub fn evolve(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    ops: &WalkOperators,
    drive: &DriveConfig,
    max_steps: usize,
    tol: f64,
) -> Result<Trajectory, DynamicsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(DynamicsError::NonPositiveTolerance(tol));
    }
    let traj = iterate(tg, arcs, ops, drive, max_steps, tol);
    if traj.converged {
        Ok(traj)
    } else {
        Err(DynamicsError::NotConverged {
            steps: traj.steps_taken,
            last_residual: traj.residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// `10 |A0| / gap`, clamped to `[MIN_STEPS, MAX_STEPS_CAP]`, where `gap` is
/// one minus the largest stable eigenvalue modulus.
pub fn default_max_steps(arc_count: usize, stable_radius: f64) -> usize {
    let gap = (1.0 - stable_radius).max(1e-12);
    let estimate = 10.0 * (arc_count.max(1) as f64) / gap;
    if estimate >= MAX_STEPS_CAP as f64 {
        MAX_STEPS_CAP
    } else {
        (Float::ceil(estimate) as usize).max(MIN_STEPS)
    }
}

/// Whole-graph state on the internal arcs plus each tail cut to `L` arcs per
/// direction. `inbound[s][k]` is the arc of tail `s` ending `k` steps from
/// the attachment vertex; `outbound[s][k]` is the arc starting `k` steps out.
#[derive(Debug, Clone, PartialEq)]
pub struct TailedState {
    pub internal: CVector,
    pub inbound: Vec<Vec<Complex64>>,
    pub outbound: Vec<Vec<Complex64>>,
}

impl TailedState {
    pub fn norm_sqr(&self) -> f64 {
        let tails: f64 = self
            .inbound
            .iter()
            .chain(&self.outbound)
            .flat_map(|t| t.iter())
            .map(|z| z.norm_sqr())
            .sum();
        self.internal.iter().map(|z| z.norm_sqr()).sum::<f64>() + tails
    }

    pub fn tail_length(&self) -> usize {
        self.inbound.first().map_or(0, Vec::len)
    }

    /// Sum of amplitudes on every arc ending at internal vertex `u`.
    pub fn in_sum(&self, tg: &TailedGraph, arcs: &ArcSpace, u: usize) -> Complex64 {
        let internal: Complex64 = arcs.in_arcs(u).iter().map(|&a| self.internal[a]).sum();
        let tails: Complex64 = tg
            .tail_attachments()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == u)
            .map(|(s, _)| self.inbound[s][0])
            .sum();
        internal + tails
    }

    /// Sum of amplitudes on every arc leaving internal vertex `u`.
    pub fn out_sum(&self, tg: &TailedGraph, arcs: &ArcSpace, u: usize) -> Complex64 {
        let internal: Complex64 = arcs.out_arcs(u).iter().map(|&a| self.internal[a]).sum();
        let tails: Complex64 = tg
            .tail_attachments()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == u)
            .map(|(s, _)| self.outbound[s][0])
            .sum();
        internal + tails
    }
}

/// One application of the Grover rule `(UΨ)(a) = -Ψ(ā) + 2/d̃(o(a)) Σ_{t(b)=o(a)} Ψ(b)`
/// on the truncated graph. `feed[s]` enters at the far end of inbound tail
/// `s`; returns the new state and the amplitudes leaving through the far
/// end of each outbound tail.
pub fn grover_step(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    state: &TailedState,
    feed: &[Complex64],
) -> (TailedState, Vec<Complex64>) {
    let r = tg.tail_count();
    let len = state.tail_length();
    let n = tg.internal().vertex_count();
    let in_sums: Vec<Complex64> = (0..n).map(|u| state.in_sum(tg, arcs, u)).collect();
    let coin = |u: usize| in_sums[u] * (2.0 / tg.tilde_degree(u) as f64);

    let mut internal = CVector::zeros(arcs.len());
    for (a, o, _) in arcs.iter() {
        internal[a] = -state.internal[arcs.bar(a)] + coin(o);
    }
    let mut inbound = vec![vec![Complex64::new(0.0, 0.0); len]; r];
    let mut outbound = vec![vec![Complex64::new(0.0, 0.0); len]; r];
    let mut absorbed = Vec::with_capacity(r);
    for s in 0..r {
        let u = tg.tail_attachments()[s];
        if len > 0 {
            // free walk: inbound moves one step closer, outbound one step away
            inbound[s][..len - 1].copy_from_slice(&state.inbound[s][1..]);
            inbound[s][len - 1] = feed[s];
            outbound[s][1..].copy_from_slice(&state.outbound[s][..len - 1]);
            outbound[s][0] = -state.inbound[s][0] + coin(u);
            absorbed.push(state.outbound[s][len - 1]);
        }
    }
    (
        TailedState {
            internal,
            inbound,
            outbound,
        },
        absorbed,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHistory {
    pub states: Vec<TailedState>,
    /// `‖Ψ_{n+1}‖² - ‖Ψ_n‖² - (fed - absorbed)`; zero up to rounding for a
    /// unitary step.
    pub norm_defects: Vec<f64>,
}

impl TruncatedHistory {
    /// `χΨ_n` for each step.
    pub fn restricted(&self) -> impl Iterator<Item = StateVector> + '_ {
        self.states.iter().map(|s| StateVector(s.internal.clone()))
    }

    /// Outflow read-out on tail `s` (amplitude on its first outbound arc).
    pub fn outflow(&self, s: usize) -> Vec<Complex64> {
        self.states.iter().map(|st| st.outbound[s][0]).collect()
    }
}

/// Runs the unitary Grover walk on the tailed graph with tails truncated at
/// `tail_length` arcs. The inbound plane wave `α_s z^{-k-n}` is fed at the
/// far end, so with `steps < tail_length` nothing ever leaves the window and
/// the run reproduces the infinite-tail dynamics exactly.
pub fn truncated_unitary_evolve(
    tg: &TailedGraph,
    arcs: &ArcSpace,
    drive: &DriveConfig,
    tail_length: usize,
    steps: usize,
) -> Result<TruncatedHistory, DynamicsError> {
    if steps >= tail_length {
        return Err(DynamicsError::TruncationTooShort { tail_length, steps });
    }
    let r = tg.tail_count();
    let z = drive.z();
    let wave = |s: usize, k: usize, n: usize| drive.inflow()[s] * z.powi(-((k + n) as i32));
    let initial = TailedState {
        internal: CVector::zeros(arcs.len()),
        inbound: (0..r)
            .map(|s| (0..tail_length).map(|k| wave(s, k, 0)).collect())
            .collect(),
        outbound: vec![vec![Complex64::new(0.0, 0.0); tail_length]; r],
    };
    let mut states = vec![initial];
    let mut norm_defects = Vec::with_capacity(steps);
    for n in 0..steps {
        let current = states.last().expect("nonempty");
        let feed: Vec<Complex64> = (0..r).map(|s| wave(s, tail_length - 1, n + 1)).collect();
        let (next, absorbed) = grover_step(tg, arcs, current, &feed);
        let fed: f64 = feed.iter().map(|z| z.norm_sqr()).sum();
        let lost: f64 = absorbed.iter().map(|z| z.norm_sqr()).sum();
        norm_defects.push(next.norm_sqr() - current.norm_sqr() - fed + lost);
        states.push(next);
    }
    Ok(TruncatedHistory {
        states,
        norm_defects,
    })
}
