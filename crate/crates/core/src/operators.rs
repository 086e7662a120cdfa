//! Dense operators of the driven Grover walk.
//!
//! Arcs index the columns of `K` and both sides of `S`, `C'` and `E_PON`;
//! vertices index `D`, `T` and the blocks of `E_GON`. Every coin uses the
//! whole-graph degree `d̃(u)`, which is what makes `E_PON` the cut-off of
//! the tailed-graph unitary onto the internal arcs.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;
use thiserror::Error;

use crate::graph::{ArcSpace, TailedGraph};
use crate::linalg::{max_abs, real, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("the Grover matrix needs dimension >= 1")]
    ZeroDimension,
}

/// `Gr(d)` with entries `2/d - δ_ij`.
pub fn grover_matrix(d: usize) -> Result<DMatrix<f64>, OperatorError> {
    if d == 0 {
        return Err(OperatorError::ZeroDimension);
    }
    let off = 2.0 / d as f64;
    Ok(DMatrix::from_fn(
        d,
        d,
        |i, j| if i == j { off - 1.0 } else { off },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperators {
    /// `|V0| x |A0|`, `K[u, a] = 1/sqrt(d̃(u))` when `t(a) = u`.
    pub k: CMatrix,
    /// Arc reversal permutation.
    pub s: CMatrix,
    /// Local coins `2K*K - I`, block-diagonal over terminus classes, built
    /// from the exact entries `2/d̃ - δ`.
    pub c_prime: CMatrix,
    /// `S C'`, the cut-off time evolution on internal arcs.
    pub e_pon: CMatrix,
    /// `KK*`, diagonal `d(u)/d̃(u)`.
    pub d: CMatrix,
    /// `KSK*`, the Dirichlet random walk operator.
    pub t: CMatrix,
    /// `[[0, -I], [2D - I, 2T]]`.
    pub e_gon: CMatrix,
    /// `[K*  SK*]`, `|A0| x 2|V0|`.
    pub l: CMatrix,
    tilde_degree: Vec<usize>,
}

impl WalkOperators {
    pub fn arc_count(&self) -> usize {
        self.e_pon.nrows()
    }

    pub fn vertex_count(&self) -> usize {
        self.t.nrows()
    }

    pub fn tilde_degree(&self, u: usize) -> usize {
        self.tilde_degree[u]
    }

    pub fn tilde_degrees(&self) -> &[usize] {
        &self.tilde_degree
    }

    /// `M^{1/2}` as a diagonal matrix.
    pub fn sqrt_degree(&self) -> CMatrix {
        let n = self.vertex_count();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                real(Float::sqrt(self.tilde_degree[i] as f64))
            } else {
                real(0.0)
            }
        })
    }
}

pub fn build_operators(tg: &TailedGraph, arcs: &ArcSpace) -> WalkOperators {
    let n = tg.internal().vertex_count();
    let m = arcs.len();
    let zero = real(0.0);

    let mut k = CMatrix::zeros(n, m);
    for (a, _, t) in arcs.iter() {
        k[(t, a)] = real(1.0 / Float::sqrt(tg.tilde_degree(t) as f64));
    }
    let mut s = CMatrix::zeros(m, m);
    for a in 0..m {
        s[(arcs.bar(a), a)] = real(1.0);
    }
    let k_adj = k.adjoint();
    let mut c_prime = CMatrix::zeros(m, m);
    for (a, _, t) in arcs.iter() {
        for &b in arcs.in_arcs(t) {
            let diag = if a == b { 1.0 } else { 0.0 };
            c_prime[(a, b)] = real(2.0 / tg.tilde_degree(t) as f64 - diag);
        }
    }
    let e_pon = &s * &c_prime;
    let d = &k * &k_adj;
    let t = &k * &s * &k_adj;

    let identity = CMatrix::identity(n, n);
    let mut e_gon = CMatrix::from_element(2 * n, 2 * n, zero);
    e_gon.view_mut((0, n), (n, n)).copy_from(&(-&identity));
    e_gon
        .view_mut((n, 0), (n, n))
        .copy_from(&(&d * real(2.0) - &identity));
    e_gon.view_mut((n, n), (n, n)).copy_from(&(&t * real(2.0)));

    let mut l = CMatrix::zeros(m, 2 * n);
    l.view_mut((0, 0), (m, n)).copy_from(&k_adj);
    l.view_mut((0, n), (m, n)).copy_from(&(&s * &k_adj));

    WalkOperators {
        k,
        s,
        c_prime,
        e_pon,
        d,
        t,
        e_gon,
        l,
        tilde_degree: tg.tilde_degrees().to_vec(),
    }
}

/// Max-abs entry of `E_PON L - L E_GON`.
pub fn intertwine_check(ops: &WalkOperators) -> f64 {
    max_abs(&(&ops.e_pon * &ops.l - &ops.l * &ops.e_gon))
}

/// `Ξ_0 .. Ξ_{n_max}` from the three-term recursion
/// `Ξ_n = 2TΞ_{n-1} - (2D - I)Ξ_{n-2}`, seeded with `Ξ_0 = T` and
/// `Ξ_1 = 2T² - D`.
pub fn xi_sequence(ops: &WalkOperators, n_max: usize) -> Vec<CMatrix> {
    let n = ops.vertex_count();
    let two = real(2.0);
    let mut seq = Vec::with_capacity(n_max + 1);
    seq.push(ops.t.clone());
    if n_max >= 1 {
        seq.push(&ops.t * &ops.t * two - &ops.d);
    }
    let damping = &ops.d * two - CMatrix::identity(n, n);
    for i in 2..=n_max {
        let next = &ops.t * &seq[i - 1] * two - &damping * &seq[i - 2];
        seq.push(next);
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{arc_space, attach_tails, parse_edge_list};
    use crate::linalg::max_abs;

    fn ops_for(text: &str, tails: &[usize]) -> (WalkOperators, ArcSpace) {
        let g = parse_edge_list(text).unwrap();
        let arcs = arc_space(&g);
        let tg = attach_tails(g, tails).unwrap();
        (build_operators(&tg, &arcs), arcs)
    }

    #[test]
    fn grover_small_cases() {
        assert_eq!(grover_matrix(0), Err(OperatorError::ZeroDimension));
        assert_eq!(grover_matrix(1).unwrap()[(0, 0)], 1.0);
        let g2 = grover_matrix(2).unwrap();
        assert_eq!(g2.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let g3 = grover_matrix(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
                assert!((g3[(i, j)] - expect).abs() < 1e-15);
            }
        }
        for d in 1..7 {
            let g = grover_matrix(d).unwrap();
            assert!((&g * &g - DMatrix::identity(d, d)).amax() < 1e-14);
            for row in g.row_iter() {
                assert!((row.sum() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn p2_cutoff_is_zero() {
        let (ops, _) = ops_for("0 1", &[0, 1]);
        assert!(max_abs(&ops.e_pon) == 0.0);
    }

    #[test]
    fn c3_matches_hand_written_matrix() {
        // tails at 0 (inflow side) and 1; arc order 0->1, 1->0, 0->2, 2->0, 1->2, 2->1
        let (ops, _) = ops_for("0 1\n1 2\n2 0", &[0, 1]);
        let third = 1.0 / 3.0;
        // row a gives E(a, b) = 2/d̃(o(a)) - [b == bar a] for t(b) = o(a)
        #[rustfmt::skip]
        let expect = [
            [0.0, -third, 0.0, 2.0 * third, 0.0, 0.0],
            [-third, 0.0, 0.0, 0.0, 0.0, 2.0 * third],
            [0.0, 2.0 * third, 0.0, -third, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            [2.0 * third, 0.0, 0.0, 0.0, 0.0, -third],
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((ops.e_pon[(i, j)] - real(e)).norm() < 1e-15, "({i},{j})");
            }
        }
        assert!(intertwine_check(&ops) < 1e-12);
    }

    #[test]
    fn kk_star_is_degree_ratio() {
        let (ops, _) = ops_for("0 1\n1 2\n2 3\n3 0\n0 2", &[1, 1, 3]);
        let ratios = [3.0 / 3.0, 2.0 / 4.0, 3.0 / 3.0, 2.0 / 3.0];
        for (u, &ratio) in ratios.iter().enumerate() {
            for v in 0..4 {
                let expect = if u == v { ratio } else { 0.0 };
                assert!((ops.d[(u, v)] - real(expect)).norm() < 1e-15);
            }
        }
        assert!(max_abs(&(&ops.t - ops.t.adjoint())) < 1e-15);
        assert!(max_abs(&(&ops.s * &ops.s - CMatrix::identity(10, 10))) == 0.0);
    }

    #[test]
    fn xi_seeds() {
        let (ops, _) = ops_for("0 1\n1 2\n2 0", &[0, 1]);
        let xi = xi_sequence(&ops, 3);
        assert_eq!(xi.len(), 4);
        assert_eq!(xi[0], ops.t);
        assert!(max_abs(&(&xi[1] - (&ops.t * &ops.t * real(2.0) - &ops.d))) < 1e-15);
        assert_eq!(xi_sequence(&ops, 0).len(), 1);
    }
}
