//! Eigen-classification of the non-normal cut-off operator `E_PON` and the
//! explicit bases of its unit-circle eigenspace.
//!
//! The center part (`|λ| = 1`) splits into three families:
//!
//! * `C+`: one `+1` eigenvector per fundamental cycle, `+1` along the cycle
//!   and `-1` on the reversed arcs;
//! * `C-`: `-1` eigenvectors, symmetric under arc reversal, built from even
//!   cycles and from closed even walks pairing each odd cycle with a fixed
//!   odd cycle;
//! * `T_per`: eigenvectors `K*g - λ SK*g` with `λ = e^{±i arccos x}` for
//!   Dirichlet eigenpairs `(x, g)` of `T` whose eigenfunction vanishes on
//!   every boundary vertex.
//!
//! Nothing here computes Jordan chains: unit-circle eigenvalues must be
//! semisimple and [`eigen_classify`] rejects the operator if a rank test
//! says otherwise.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Float;
use thiserror::Error;

use crate::graph::{ArcSpace, InternalGraph, OrientedCycle, TailedGraph};
use crate::linalg::{
    dominant_range, from_columns, max_principal_sine, null_space, orthonormal_basis, real,
    singular_values, smallest_right_singular_vector, sup_norm, symmetric_eigen, CMatrix, CVector,
    LinalgError,
};
use crate::operators::WalkOperators;

pub const DEFAULT_EPSILON: f64 = 1e-8;
/// Eigenvalues with modulus in `[1 - GUARD_BAND, 1 - ε)` need a certificate
/// that they are really off the unit circle.
pub const GUARD_BAND: f64 = 1e-4;
/// Minimum `σ_min(E_PON - wI)` at the radial projection `w` of a guard-band
/// eigenvalue for it to count as stable.
pub const GUARD_SEPARATION: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-6;
const RANK_TOL: f64 = 1e-8;
const EIGEN_CHECK_TOL: f64 = 1e-10;
const BOUNDARY_TOL: f64 = 1e-10;
const T_CLUSTER_TOL: f64 = 1e-9;
pub const SPAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("classification tolerance {0} outside (0, 1e-4]")]
    EpsilonOutOfRange(f64),
    #[error("eigenvalue of modulus {modulus} lies outside the unit disk")]
    UnstableEigenvalueFound { modulus: f64 },
    #[error("eigenvalue of modulus {modulus} sits in the guard band, only {separation:e} from the unit circle spectrally")]
    AmbiguousModulus { modulus: f64, separation: f64 },
    #[error("unit-circle eigenvalue {re}+{im}i has algebraic multiplicity {algebraic} but {geometric} eigenvectors")]
    JordanBlockOnCircle {
        re: f64,
        im: f64,
        algebraic: usize,
        geometric: usize,
    },
    #[error("{family} vector failed its eigen-equation (residual {residual:e})")]
    ConstructionFailed { family: &'static str, residual: f64 },
    #[error("center space mismatch: eigensolver dim {center_dim}, explicit basis dim {basis_dim}, max principal sine {max_sine:e}")]
    SpanMismatch {
        center_dim: usize,
        basis_dim: usize,
        max_sine: f64,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralClass {
    Stable,
    Center,
    Unstable,
}

impl SpectralClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralClass::Stable => "stable",
            SpectralClass::Center => "center",
            SpectralClass::Unstable => "unstable",
        }
    }
}

/// One unit-circle eigenvalue with an orthonormal eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterEigenspace {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub basis: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub classes: Vec<SpectralClass>,
    /// Unit-norm right eigenvector per eigenvalue (best approximation for
    /// defective stable eigenvalues).
    pub right_eigenvectors: Vec<CVector>,
    /// `‖E v - λ v‖_sup` per eigenpair.
    pub residuals: Vec<f64>,
    pub center: Vec<CenterEigenspace>,
    pub epsilon: f64,
}

impl SpectralDecomposition {
    pub fn center_dimension(&self) -> usize {
        self.center.iter().map(|c| c.multiplicity).sum()
    }

    /// Largest modulus among stable eigenvalues (0 when there are none).
    pub fn stable_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.classes)
            .filter(|(_, &c)| c == SpectralClass::Stable)
            .fold(0.0, |acc, (z, _)| acc.max(z.norm()))
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Unit-circle eigenvalues repeated by multiplicity.
    pub fn center_eigenvalues(&self) -> Vec<Complex64> {
        self.center
            .iter()
            .flat_map(|c| core::iter::repeat_n(c.eigenvalue, c.multiplicity))
            .collect()
    }

    /// All center eigenvectors as columns.
    pub fn center_vectors(&self) -> Vec<CVector> {
        self.center
            .iter()
            .flat_map(|c| {
                c.basis
                    .column_iter()
                    .map(|col| col.into_owned())
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

fn eigen_residual(ops: &WalkOperators, v: &CVector, lambda: Complex64) -> f64 {
    sup_norm(&(&ops.e_pon * v - v * lambda))
}

/// Full dense eigen-analysis of `E_PON` with classification by modulus.
/// Accepts a guard-band eigenvalue `z` as stable only when the unit-circle
/// point `z/|z|` is at least [`GUARD_SEPARATION`] away from the spectrum of
/// every small perturbation of `e`, measured by the smallest singular value.
pub fn guard_band_check(e: &CMatrix, z: Complex64) -> Result<(), SpectralError> {
    let n = e.nrows();
    let w = z / z.norm();
    let separation = singular_values(&(e - CMatrix::identity(n, n) * w))?
        .last()
        .copied()
        .unwrap_or(0.0);
    if separation >= GUARD_SEPARATION {
        Ok(())
    } else {
        Err(SpectralError::AmbiguousModulus {
            modulus: z.norm(),
            separation,
        })
    }
}

pub fn eigen_classify(
    ops: &WalkOperators,
    epsilon: f64,
) -> Result<SpectralDecomposition, SpectralError> {
    if !(epsilon > 0.0 && epsilon <= 1e-4) {
        return Err(SpectralError::EpsilonOutOfRange(epsilon));
    }
    let n = ops.arc_count();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            classes: Vec::new(),
            right_eigenvectors: Vec::new(),
            residuals: Vec::new(),
            center: Vec::new(),
            epsilon,
        });
    }
    let mut eigenvalues = crate::linalg::eigenvalues(&ops.e_pon)?;
    eigenvalues.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });

    let mut classes = Vec::with_capacity(n);
    for z in &eigenvalues {
        let m = z.norm();
        let class = if m > 1.0 + epsilon {
            return Err(SpectralError::UnstableEigenvalueFound { modulus: m });
        } else if m >= 1.0 - epsilon {
            SpectralClass::Center
        } else if m >= 1.0 - GUARD_BAND {
            guard_band_check(&ops.e_pon, *z)?;
            SpectralClass::Stable
        } else {
            SpectralClass::Stable
        };
        classes.push(class);
    }

    // group center eigenvalues into clusters of numerically equal values
    let mut center = Vec::new();
    let mut assigned = vec![false; n];
    let mut right_eigenvectors: Vec<Option<CVector>> = vec![None; n];
    let identity = CMatrix::identity(n, n);
    for i in 0..n {
        if classes[i] != SpectralClass::Center || assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| classes[j] == SpectralClass::Center && !assigned[j])
            .filter(|&j| (eigenvalues[j] - eigenvalues[i]).norm() < CLUSTER_TOL)
            .collect();
        let mean =
            members.iter().map(|&j| eigenvalues[j]).sum::<Complex64>() / members.len() as f64;
        let basis = null_space(&(&ops.e_pon - &identity * mean), RANK_TOL)?;
        if basis.ncols() != members.len() {
            return Err(SpectralError::JordanBlockOnCircle {
                re: mean.re,
                im: mean.im,
                algebraic: members.len(),
                geometric: basis.ncols(),
            });
        }
        for (slot, &j) in members.iter().enumerate() {
            assigned[j] = true;
            right_eigenvectors[j] = Some(basis.column(slot).into_owned());
        }
        center.push(CenterEigenspace {
            eigenvalue: mean,
            multiplicity: members.len(),
            basis,
        });
    }

    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (j, slot) in right_eigenvectors.into_iter().enumerate() {
        let v = match slot {
            Some(v) => v,
            None => smallest_right_singular_vector(&(&ops.e_pon - &identity * eigenvalues[j]))?,
        };
        residuals.push(eigen_residual(ops, &v, eigenvalues[j]));
        vectors.push(v);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        classes,
        right_eigenvectors: vectors,
        residuals,
        center,
        epsilon,
    })
}

/// Orthonormal basis of the stable generalized eigenspace, obtained as the
/// range of `∏ (E_PON - λ_k)` over the distinct center eigenvalues.
pub fn stable_subspace(
    ops: &WalkOperators,
    decomp: &SpectralDecomposition,
) -> Result<CMatrix, SpectralError> {
    let n = ops.arc_count();
    let identity = CMatrix::identity(n, n);
    let mut p = identity.clone();
    for c in &decomp.center {
        p = &p * (&ops.e_pon - &identity * c.eigenvalue);
    }
    Ok(dominant_range(&p, n - decomp.center_dimension())?)
}

/// Largest `|⟨v, w⟩|` between unit center eigenvectors and an orthonormal
/// basis of the stable generalized eigenspace.
pub fn center_stable_overlap(
    ops: &WalkOperators,
    decomp: &SpectralDecomposition,
) -> Result<f64, SpectralError> {
    let stable = stable_subspace(ops, decomp)?;
    let n = ops.arc_count();
    let center = from_columns(n, &decomp.center_vectors());
    if stable.ncols() == 0 || center.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(crate::linalg::max_abs(&(center.adjoint() * stable)))
}

/// Largest in- or out-sum of a center eigenvector at any boundary vertex.
pub fn boundary_kirchhoff_residual(
    decomp: &SpectralDecomposition,
    tg: &TailedGraph,
    arcs: &ArcSpace,
) -> f64 {
    let mut worst = 0.0f64;
    for v in decomp.center_vectors() {
        for u in tg.boundary() {
            let inflow: Complex64 = arcs.in_arcs(u).iter().map(|&a| v[a]).sum();
            let outflow: Complex64 = arcs.out_arcs(u).iter().map(|&a| v[a]).sum();
            worst = worst.max(inflow.norm()).max(outflow.norm());
        }
    }
    worst
}

/// For each isolated, nonzero stable eigenvalue `λ`, the smallest singular
/// value of `λ² - 2λT + (2D - I)`; returns the largest over all of them
/// together with how many eigenvalues were checked.
pub fn quadratic_pencil_residual(
    ops: &WalkOperators,
    decomp: &SpectralDecomposition,
) -> Result<(f64, usize), SpectralError> {
    const ISOLATION: f64 = 1e-4;
    let n = ops.vertex_count();
    let identity = CMatrix::identity(n, n);
    let damping = &ops.d * real(2.0) - &identity;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (i, (&lambda, &class)) in decomp.eigenvalues.iter().zip(&decomp.classes).enumerate() {
        if class != SpectralClass::Stable || lambda.norm() < ISOLATION {
            continue;
        }
        let isolated = decomp
            .eigenvalues
            .iter()
            .enumerate()
            .all(|(j, &mu)| j == i || (mu - lambda).norm() > ISOLATION);
        if !isolated {
            continue;
        }
        let pencil = &identity * (lambda * lambda) - &ops.t * (lambda * 2.0) + &damping;
        let smallest = singular_values(&pencil)?.last().copied().unwrap_or(0.0);
        worst = worst.max(smallest);
        checked += 1;
    }
    Ok((worst, checked))
}

/// A `T_per` eigenvector with its Dirichlet eigenvalue `x` and the
/// `E_PON` eigenvalue `λ = e^{±i arccos x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMode {
    pub x: f64,
    pub eigenvalue: Complex64,
    pub vector: CVector,
}

/// `ζ(λ) = (λ + λ⁻¹) / 2`.
pub fn zeta(lambda: Complex64) -> Complex64 {
    (lambda + lambda.inv()) * 0.5
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CenterBasis {
    pub c_plus: Vec<CVector>,
    pub c_minus: Vec<CVector>,
    pub t_per: Vec<PeriodicMode>,
    /// Distinct Dirichlet eigenvalues contributing to `T_per`.
    pub sigma_per: Vec<f64>,
}

impl CenterBasis {
    pub fn dim(&self) -> usize {
        self.c_plus.len() + self.c_minus.len() + self.t_per.len()
    }

    /// Every basis vector with its eigenvalue label.
    pub fn labelled(&self) -> Vec<(Complex64, &CVector)> {
        let plus = self.c_plus.iter().map(|v| (real(1.0), v));
        let minus = self.c_minus.iter().map(|v| (real(-1.0), v));
        let per = self.t_per.iter().map(|m| (m.eigenvalue, &m.vector));
        plus.chain(minus).chain(per).collect()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.labelled()
            .into_iter()
            .map(|(_, v)| v.clone())
            .collect()
    }
}

/// `+1` on the cycle arcs, `-1` on their reversals.
pub fn cycle_basis_c_plus(cycles: &[OrientedCycle], arcs: &ArcSpace) -> Vec<CVector> {
    cycles
        .iter()
        .map(|cycle| {
            let mut w = CVector::zeros(arcs.len());
            for &a in cycle.arcs() {
                w[a] = real(1.0);
                w[arcs.bar(a)] = real(-1.0);
            }
            w
        })
        .collect()
}

/// Rotates the cycle so that it starts at vertex `start`.
fn rotate_to(cycle: &OrientedCycle, arcs: &ArcSpace, start: usize) -> Vec<usize> {
    let a = cycle.arcs();
    let pos = a.iter().position(|&x| arcs.origin(x) == start).unwrap_or(0);
    a[pos..].iter().chain(&a[..pos]).copied().collect()
}

/// Symmetric vector with alternating signs `(-1)^j` along a closed walk of
/// even length; contributions of repeated edges add up.
fn alternating_walk_vector(walk: &[usize], arcs: &ArcSpace) -> CVector {
    let mut w = CVector::zeros(arcs.len());
    for (j, &a) in walk.iter().enumerate() {
        let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
        w[a] += real(sign);
        w[arcs.bar(a)] += real(sign);
    }
    w
}

fn check_eigen(
    ops: &WalkOperators,
    v: &CVector,
    lambda: Complex64,
    family: &'static str,
) -> Result<(), SpectralError> {
    let residual = eigen_residual(ops, v, lambda) / sup_norm(v).max(1.0);
    if residual > EIGEN_CHECK_TOL {
        return Err(SpectralError::ConstructionFailed { family, residual });
    }
    Ok(())
}

/// `-1` eigenvectors: one alternating vector per even cycle, and one per
/// odd cycle other than the first, built on the closed walk that runs the
/// first odd cycle, crosses to the other along a shortest path, runs it and
/// returns. The path is traversed twice with the same sign, so it carries
/// doubled amplitude. Each vector is checked against `E_PON v = -v`.
pub fn cycle_basis_c_minus(
    cycles: &[OrientedCycle],
    arcs: &ArcSpace,
    graph: &InternalGraph,
    ops: &WalkOperators,
) -> Result<Vec<CVector>, SpectralError> {
    let mut out = Vec::new();
    for cycle in cycles.iter().filter(|c| c.is_even()) {
        let v = alternating_walk_vector(cycle.arcs(), arcs);
        check_eigen(ops, &v, real(-1.0), "C-")?;
        out.push(v);
    }
    let mut odd = cycles.iter().filter(|c| !c.is_even());
    if let Some(anchor) = odd.next() {
        let anchor_vertices = anchor.vertices(arcs);
        for cycle in odd {
            let vertices = cycle.vertices(arcs);
            let path = graph
                .shortest_path_between(&anchor_vertices, &vertices)
                .ok_or(SpectralError::ConstructionFailed {
                    family: "C-",
                    residual: f64::INFINITY,
                })?;
            let (x, y) = (path[0], path[path.len() - 1]);
            let path_arcs: Vec<usize> = path
                .windows(2)
                .map(|p| arcs.find(p[0], p[1]).expect("path follows edges"))
                .collect();
            let mut walk = rotate_to(anchor, arcs, x);
            walk.extend(&path_arcs);
            walk.extend(rotate_to(cycle, arcs, y));
            walk.extend(path_arcs.iter().rev().map(|&a| arcs.bar(a)));
            let v = alternating_walk_vector(&walk, arcs);
            check_eigen(ops, &v, real(-1.0), "C-")?;
            out.push(v);
        }
    }
    Ok(out)
}

fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// `T_per`: for each eigenvalue `x ∈ (-1, 1)` of `T`, the part of its
/// eigenspace vanishing on the boundary, found as the null space of the
/// eigenbasis restricted to boundary rows. Each `g` yields the pair
/// `K*g - e^{±i arccos x} SK*g`, verified against `E_PON`.
pub fn t_per_basis(
    ops: &WalkOperators,
    tg: &TailedGraph,
) -> Result<(Vec<PeriodicMode>, Vec<f64>), SpectralError> {
    let n = ops.vertex_count();
    if ops.arc_count() == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (values, vectors) = symmetric_eigen(&real_part(&ops.t))?;
    let boundary = tg.boundary();
    let k_adj = ops.k.adjoint();
    let sk_adj = &ops.s * &k_adj;
    let mut modes = Vec::new();
    let mut sigma_per = Vec::new();
    let mut i = 0;
    while i < n {
        let x0 = values[i];
        let mut j = i;
        while j < n && (values[j] - x0).abs() < T_CLUSTER_TOL {
            j += 1;
        }
        let cluster: Vec<usize> = (i..j).collect();
        i = j;
        let x = cluster.iter().map(|&c| values[c]).sum::<f64>() / cluster.len() as f64;
        if x.abs() >= 1.0 - T_CLUSTER_TOL {
            continue;
        }
        let g_basis = CMatrix::from_fn(n, cluster.len(), |r, c| real(vectors[(r, cluster[c])]));
        let restricted = CMatrix::from_fn(boundary.len(), cluster.len(), |r, c| {
            g_basis[(boundary[r], c)]
        });
        let combos = null_space(&restricted, BOUNDARY_TOL)?;
        if combos.ncols() == 0 {
            continue;
        }
        sigma_per.push(x);
        let angle = Float::acos(x);
        for combo in combos.column_iter() {
            let g = &g_basis * combo;
            for lambda in [
                Complex64::from_polar(1.0, angle),
                Complex64::from_polar(1.0, -angle),
            ] {
                let v = &k_adj * &g - &sk_adj * &g * lambda;
                check_eigen(ops, &v, lambda, "T_per")?;
                modes.push(PeriodicMode {
                    x,
                    eigenvalue: lambda,
                    vector: v,
                });
            }
        }
    }
    Ok((modes, sigma_per))
}

/// All three families of unit-circle eigenvectors.
pub fn center_basis(
    ops: &WalkOperators,
    tg: &TailedGraph,
    arcs: &ArcSpace,
    cycles: &[OrientedCycle],
) -> Result<CenterBasis, SpectralError> {
    let c_plus = cycle_basis_c_plus(cycles, arcs);
    for v in &c_plus {
        check_eigen(ops, v, real(1.0), "C+")?;
    }
    let c_minus = cycle_basis_c_minus(cycles, arcs, tg.internal(), ops)?;
    let (t_per, sigma_per) = t_per_basis(ops, tg)?;
    Ok(CenterBasis {
        c_plus,
        c_minus,
        t_per,
        sigma_per,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    pub center_dim: usize,
    pub basis_dim: usize,
    pub c_plus_dim: usize,
    pub c_minus_dim: usize,
    pub t_per_dim: usize,
    pub max_principal_sine: f64,
    pub eigenvalues_match: bool,
}

fn multiset_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(
        |x| match (0..b.len()).find(|&j| !used[j] && (b[j] - x).norm() < tol) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        },
    )
}

/// Compares the eigensolver's center space with the explicit basis:
/// dimensions, principal angles and eigenvalue multisets.
pub fn verify_center_space(
    decomp: &SpectralDecomposition,
    basis: &CenterBasis,
    arc_count: usize,
) -> Result<CenterReport, SpectralError> {
    let from_solver = orthonormal_basis(arc_count, &decomp.center_vectors(), 1e-10)?;
    let explicit = orthonormal_basis(arc_count, &basis.vectors(), 1e-10)?;
    let max_sine = max_principal_sine(&from_solver, &explicit)?;
    let labels: Vec<Complex64> = basis.labelled().into_iter().map(|(l, _)| l).collect();
    let report = CenterReport {
        center_dim: decomp.center_dimension(),
        basis_dim: basis.dim(),
        c_plus_dim: basis.c_plus.len(),
        c_minus_dim: basis.c_minus.len(),
        t_per_dim: basis.t_per.len(),
        max_principal_sine: max_sine,
        eigenvalues_match: multiset_match(&decomp.center_eigenvalues(), &labels, SPAN_TOL),
    };
    let independent = explicit.ncols() == basis.dim() && from_solver.ncols() == report.center_dim;
    if !independent
        || report.center_dim != report.basis_dim
        || max_sine >= SPAN_TOL
        || !report.eigenvalues_match
    {
        return Err(SpectralError::SpanMismatch {
            center_dim: report.center_dim,
            basis_dim: report.basis_dim,
            max_sine,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{arc_space, attach_tails, fundamental_cycles, parse_edge_list};
    use crate::operators::build_operators;

    struct Fixture {
        tg: TailedGraph,
        arcs: ArcSpace,
        ops: WalkOperators,
        cycles: Vec<OrientedCycle>,
    }

    fn fixture(text: &str, tails: &[usize]) -> Fixture {
        let g = parse_edge_list(text).unwrap();
        let arcs = arc_space(&g);
        let cycles = fundamental_cycles(&g);
        let tg = attach_tails(g, tails).unwrap();
        let ops = build_operators(&tg, &arcs);
        Fixture {
            tg,
            arcs,
            ops,
            cycles,
        }
    }

    #[test]
    fn c3_center_is_single_plus_one() {
        let f = fixture("0 1\n1 2\n2 0", &[0, 1]);
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        assert_eq!(dec.center.len(), 1);
        assert_eq!(dec.center[0].multiplicity, 1);
        assert!((dec.center[0].eigenvalue - real(1.0)).norm() < 1e-12);
        // same pattern in the canonical arc order 0->1,1->0,0->2,2->0,1->2,2->1
        let gamma = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
        let v = dec.center[0].basis.column(0);
        let scale = v[0];
        for a in 0..6 {
            assert!((v[a] - scale * gamma[a]).norm() < 1e-10);
        }
        let c_plus = cycle_basis_c_plus(&f.cycles, &f.arcs);
        assert_eq!(c_plus.len(), 1);
        assert!(eigen_residual(&f.ops, &c_plus[0], real(1.0)) < 1e-12);
        assert!(
            cycle_basis_c_minus(&f.cycles, &f.arcs, f.tg.internal(), &f.ops)
                .unwrap()
                .is_empty()
        );
        assert!(t_per_basis(&f.ops, &f.tg).unwrap().0.is_empty());
    }

    #[test]
    fn p2_and_path_have_no_center() {
        let f = fixture("0 1", &[0, 1]);
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        assert!(dec.eigenvalues.iter().all(|z| z.norm() < 1e-12));
        assert_eq!(dec.center_dimension(), 0);

        let f = fixture("0 1\n1 2", &[0, 2]);
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        assert_eq!(dec.center_dimension(), 0);
        assert!(dec.spectral_radius() < 1.0);
        assert!(t_per_basis(&f.ops, &f.tg).unwrap().0.is_empty());
    }

    #[test]
    fn epsilon_range() {
        let f = fixture("0 1", &[0, 1]);
        assert!(matches!(
            eigen_classify(&f.ops, 0.0),
            Err(SpectralError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            eigen_classify(&f.ops, 1e-3),
            Err(SpectralError::EpsilonOutOfRange(_))
        ));
    }

    #[test]
    fn four_cycle_families() {
        let f = fixture("0 1\n1 2\n2 3\n3 0", &[0, 2]);
        let c_plus = cycle_basis_c_plus(&f.cycles, &f.arcs);
        assert_eq!(c_plus.len(), 1);
        assert!(eigen_residual(&f.ops, &c_plus[0], real(1.0)) < 1e-12);
        let c_minus = cycle_basis_c_minus(&f.cycles, &f.arcs, f.tg.internal(), &f.ops).unwrap();
        assert_eq!(c_minus.len(), 1);
        for (a, _, _) in f.arcs.iter() {
            assert_eq!(c_minus[0][a], c_minus[0][f.arcs.bar(a)]);
            assert_eq!(c_minus[0][a].norm(), 1.0);
        }
        assert!(eigen_residual(&f.ops, &c_minus[0], real(-1.0)) < 1e-12);

        // opposite tails leave g = δ_1 - δ_3 with x = 0, so λ = ±i
        let (modes, sigma) = t_per_basis(&f.ops, &f.tg).unwrap();
        assert_eq!(sigma.len(), 1);
        assert!(sigma[0].abs() < 1e-12);
        assert_eq!(modes.len(), 2);
        let labels: Vec<Complex64> = modes.iter().map(|m| m.eigenvalue).collect();
        assert!(multiset_match(
            &labels,
            &[Complex64::i(), -Complex64::i()],
            1e-12
        ));

        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        let basis = center_basis(&f.ops, &f.tg, &f.arcs, &f.cycles).unwrap();
        let report = verify_center_space(&dec, &basis, f.arcs.len()).unwrap();
        assert_eq!(
            (
                report.center_dim,
                report.c_plus_dim,
                report.c_minus_dim,
                report.t_per_dim
            ),
            (4, 1, 1, 2)
        );
    }

    #[test]
    fn bowtie_pairs_odd_cycles() {
        // two triangles sharing vertex 0
        let f = fixture("0 1\n1 2\n2 0\n0 3\n3 4\n4 0", &[1, 3]);
        let c_minus = cycle_basis_c_minus(&f.cycles, &f.arcs, f.tg.internal(), &f.ops).unwrap();
        assert_eq!(c_minus.len(), 1);
        assert!(eigen_residual(&f.ops, &c_minus[0], real(-1.0)) < 1e-10);
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        let basis = center_basis(&f.ops, &f.tg, &f.arcs, &f.cycles).unwrap();
        verify_center_space(&dec, &basis, f.arcs.len()).unwrap();
    }

    #[test]
    fn disjoint_odd_cycles_use_doubled_path() {
        // triangles 0-1-2 and 4-5-6 joined by the path 2-3-4
        let f = fixture("0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 6\n6 4", &[0, 5]);
        let c_minus = cycle_basis_c_minus(&f.cycles, &f.arcs, f.tg.internal(), &f.ops).unwrap();
        assert_eq!(c_minus.len(), 1);
        let bridge = f.arcs.find(2, 3).unwrap();
        assert_eq!(c_minus[0][bridge].norm(), 2.0);
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        let basis = center_basis(&f.ops, &f.tg, &f.arcs, &f.cycles).unwrap();
        verify_center_space(&dec, &basis, f.arcs.len()).unwrap();
    }

    #[test]
    fn slowly_leaking_mode_is_certified_stable() {
        // one tail at a vertex where a Dirichlet mode nearly vanishes leaves a
        // stable eigenvalue of modulus ~0.99996
        let f = fixture(
            "0 1\n0 2\n0 5\n1 2\n1 3\n1 4\n1 7\n2 3\n2 6\n2 7\n3 6\n4 7\n5 7\n6 7",
            &[4],
        );
        let dec = eigen_classify(&f.ops, DEFAULT_EPSILON).unwrap();
        let r = dec.stable_radius();
        assert!(r > 1.0 - GUARD_BAND && r < 1.0 - 1e-6, "stable radius {r}");
        let basis = center_basis(&f.ops, &f.tg, &f.arcs, &f.cycles).unwrap();
        verify_center_space(&dec, &basis, f.arcs.len()).unwrap();
    }

    #[test]
    fn guard_rejects_near_defective_cluster() {
        let z = real(1.0 - 1e-5);
        let e = CMatrix::from_row_slice(2, 2, &[z, real(1e4), real(0.0), z]);
        match guard_band_check(&e, z) {
            Err(SpectralError::AmbiguousModulus { separation, .. }) => {
                assert!(separation < GUARD_SEPARATION)
            }
            other => panic!("expected the guard to fire, got {other:?}"),
        }
        let diagonal = CMatrix::from_row_slice(2, 2, &[z, real(0.0), real(0.0), real(0.5)]);
        assert!(guard_band_check(&diagonal, z).is_ok());
    }

    #[test]
    fn zeta_on_unit_circle_is_real_part() {
        let l = Complex64::from_polar(1.0, 0.4);
        assert!((zeta(l) - real(0.4f64.cos())).norm() < 1e-15);
    }
}
