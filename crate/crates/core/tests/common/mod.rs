#![allow(dead_code)]

use grovertails_core::InternalGraph;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POOL_SEED: u64 = 0x5eed_2024;
pub const POOL_SIZE: usize = 50;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus independently chosen extra edges.
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    min_vertices: usize,
    max_vertices: usize,
) -> InternalGraph {
    let n = rng.random_range(min_vertices..=max_vertices);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    let density: f64 = rng.random_range(0.0..0.6);
    for u in 0..n {
        for v in (u + 1)..n {
            if !edges.contains(&(u, v)) && rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    InternalGraph::new(n, &edges).expect("generated graph is valid")
}

/// The fixed pool of connected graphs with 2 to 8 vertices.
pub fn graph_pool() -> Vec<InternalGraph> {
    let mut r = rng(POOL_SEED);
    (0..POOL_SIZE)
        .map(|_| random_connected_graph(&mut r, 2, 8))
        .collect()
}

/// Distinct vertex pairs `(u, v)` with `u < v`, at most `limit`.
pub fn boundary_pairs(g: &InternalGraph, limit: usize) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .take(limit)
        .collect()
}

pub fn random_attachments(rng: &mut ChaCha8Rng, g: &InternalGraph, r: usize) -> Vec<usize> {
    (0..r)
        .map(|_| rng.random_range(0..g.vertex_count()))
        .collect()
}

pub fn random_inflow(rng: &mut ChaCha8Rng, r: usize) -> Vec<Complex64> {
    (0..r)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn random_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}
