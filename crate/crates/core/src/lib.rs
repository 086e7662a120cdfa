//! Driven Grover walks on a finite graph with semi-infinite tails.
//!
//! A connected graph `G0` gets `r` tails attached at boundary vertices. A
//! constant plane wave enters along the tails; on the internal arcs the walk
//! reduces to the affine recursion `ψ_{n+1} = E_PON ψ_n + z^{-n} ρ`, where
//! `E_PON` is the Grover unitary of the tailed graph cut off to internal
//! arcs. The crate builds these operators, runs the recursion, classifies
//! the spectrum of `E_PON`, solves for the stationary state and checks the
//! transmission and flow laws it satisfies.
//!
//! ```
//! use grovertails_core::{Analysis, DriveConfig, parse_edge_list};
//!
//! let graph = parse_edge_list("0 1\n1 2\n2 0").unwrap();
//! let analysis = Analysis::new(graph, &[0, 1]).unwrap();
//! let drive = DriveConfig::unit_first(analysis.tailed());
//! let out = analysis.stationary_outflow(&drive).unwrap();
//! assert!((out.t_star.unwrap().re - 1.0).abs() < 1e-10);
//! ```

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod scattering;
pub mod spectral;

use alloc::vec::Vec;

use thiserror::Error;

pub use dynamics::{
    evolve, external_source, iterate, truncated_unitary_evolve, DriveConfig, DynamicsError,
    StateVector, TailedState, Trajectory, TruncatedHistory,
};
pub use graph::{
    arc_space, attach_tails, fundamental_cycles, parse_edge_list, ArcSpace, GraphError,
    InternalGraph, OrientedCycle, TailedGraph,
};
pub use linalg::{CMatrix, CVector, LinalgError};
pub use operators::{
    build_operators, grover_matrix, intertwine_check, xi_sequence, OperatorError, WalkOperators,
};
pub use scattering::{
    scattering_matrix, solve_stationary, transmission_reflection, KirchhoffReport, LawCheck,
    Outflow, ScatteringError, StationaryState,
};
pub use spectral::{
    center_basis, eigen_classify, verify_center_space, CenterBasis, SpectralClass,
    SpectralDecomposition, SpectralError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A tailed graph together with its arc space, operators, fundamental
/// cycles and explicit center basis.
#[derive(Debug, Clone)]
pub struct Analysis {
    tailed: TailedGraph,
    arcs: ArcSpace,
    ops: WalkOperators,
    cycles: Vec<OrientedCycle>,
    center: CenterBasis,
}

impl Analysis {
    pub fn new(graph: InternalGraph, tails: &[usize]) -> Result<Self, Error> {
        let arcs = arc_space(&graph);
        let cycles = fundamental_cycles(&graph);
        let tailed = attach_tails(graph, tails)?;
        let ops = build_operators(&tailed, &arcs);
        let center = center_basis(&ops, &tailed, &arcs, &cycles)?;
        Ok(Analysis {
            tailed,
            arcs,
            ops,
            cycles,
            center,
        })
    }

    pub fn tailed(&self) -> &TailedGraph {
        &self.tailed
    }

    pub fn arcs(&self) -> &ArcSpace {
        &self.arcs
    }

    pub fn operators(&self) -> &WalkOperators {
        &self.ops
    }

    pub fn cycles(&self) -> &[OrientedCycle] {
        &self.cycles
    }

    pub fn center(&self) -> &CenterBasis {
        &self.center
    }

    pub fn stationary(&self, drive: &DriveConfig) -> Result<StationaryState, Error> {
        Ok(solve_stationary(
            &self.tailed,
            &self.arcs,
            &self.ops,
            drive,
            &self.center,
        )?)
    }

    pub fn stationary_outflow(&self, drive: &DriveConfig) -> Result<Outflow, Error> {
        let state = self.stationary(drive)?;
        Ok(transmission_reflection(
            &self.tailed,
            &self.arcs,
            &state.psi,
            drive,
        ))
    }

    pub fn spectrum(&self, epsilon: f64) -> Result<SpectralDecomposition, Error> {
        Ok(eigen_classify(&self.ops, epsilon)?)
    }

    pub fn scattering_matrix(&self) -> Result<CMatrix, Error> {
        Ok(scattering_matrix(
            &self.tailed,
            &self.arcs,
            &self.ops,
            &self.center,
        )?)
    }
}
