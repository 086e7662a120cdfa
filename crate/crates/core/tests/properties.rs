mod common;

use grovertails_core::dynamics::{evolve, truncated_unitary_evolve, DriveConfig};
use grovertails_core::linalg::{max_abs, real, singular_values, CMatrix};
use grovertails_core::scattering::{check_laws, extend_to_tails, stationarity_residual};
use grovertails_core::spectral::{
    boundary_kirchhoff_residual, center_stable_overlap, quadratic_pencil_residual,
    verify_center_space, DEFAULT_EPSILON,
};
use grovertails_core::{intertwine_check, xi_sequence, Analysis, InternalGraph};
use proptest::prelude::*;

use common::{random_attachments, random_connected_graph, random_inflow, random_phase, rng};

#[derive(Debug)]
struct Case {
    graph: InternalGraph,
    tails: Vec<usize>,
    seed: u64,
}

fn case(seed: u64, max_vertices: usize, max_tails: usize) -> Case {
    let mut r = rng(seed);
    let graph = random_connected_graph(&mut r, 1, max_vertices);
    let count = 1 + (seed as usize % max_tails);
    let tails = random_attachments(&mut r, &graph, count);
    Case { graph, tails, seed }
}

fn arb_case() -> impl Strategy<Value = Case> {
    any::<u64>().prop_map(|seed| case(seed, 8, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arc_space_is_consistent(c in arb_case()) {
        let a = Analysis::new(c.graph.clone(), &c.tails).unwrap();
        let arcs = a.arcs();
        prop_assert_eq!(arcs.len(), 2 * c.graph.edge_count());
        for (e, o, t) in arcs.iter() {
            let b = arcs.bar(e);
            prop_assert_eq!(arcs.bar(b), e);
            prop_assert_eq!(arcs.origin(b), t);
            prop_assert_eq!(arcs.terminus(b), o);
            prop_assert_eq!(arcs.find(o, t), Some(e));
        }
        for u in 0..c.graph.vertex_count() {
            prop_assert_eq!(arcs.in_arcs(u).len(), c.graph.degree(u));
            prop_assert_eq!(arcs.out_arcs(u).len(), c.graph.degree(u));
        }
        let total: usize = a.tailed().tilde_degrees().iter().sum();
        prop_assert_eq!(total, 2 * c.graph.edge_count() + c.tails.len());
    }

    #[test]
    fn fundamental_cycles_are_independent(c in arb_case()) {
        let a = Analysis::new(c.graph.clone(), &c.tails).unwrap();
        prop_assert_eq!(a.cycles().len(), c.graph.cyclomatic_number());
        for cycle in a.cycles() {
            let arcs = cycle.arcs();
            for w in arcs.windows(2) {
                prop_assert_eq!(a.arcs().terminus(w[0]), a.arcs().origin(w[1]));
            }
            prop_assert_eq!(a.arcs().terminus(arcs[arcs.len() - 1]), a.arcs().origin(arcs[0]));
        }
        let plus = &a.center().c_plus;
        if !plus.is_empty() {
            let m = CMatrix::from_columns(plus);
            let sv = singular_values(&m).unwrap();
            prop_assert!(sv[sv.len() - 1] > 1e-8);
        }
    }

    #[test]
    fn operators_intertwine(c in arb_case()) {
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        prop_assert!(intertwine_check(a.operators()) < 1e-12);
    }

    #[test]
    fn xi_recursion_matches_products(c in arb_case()) {
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        let ops = a.operators();
        let xi = xi_sequence(ops, 6);
        let k_adj = ops.k.adjoint();
        let mut power = CMatrix::identity(ops.arc_count(), ops.arc_count());
        for x in &xi {
            let direct = &ops.k * &power * &ops.s * &k_adj;
            prop_assert!(max_abs(&(x - direct)) < 1e-12);
            power = &ops.e_pon * power;
        }
    }

    #[test]
    fn construction_is_deterministic(c in arb_case()) {
        let a = Analysis::new(c.graph.clone(), &c.tails).unwrap();
        let b = Analysis::new(c.graph, &c.tails).unwrap();
        prop_assert_eq!(&a.operators().e_pon, &b.operators().e_pon);
        prop_assert_eq!(a.center(), b.center());
        prop_assert_eq!(a.spectrum(DEFAULT_EPSILON), b.spectrum(DEFAULT_EPSILON));
    }

    #[test]
    fn center_space_matches_explicit_basis(c in arb_case()) {
        let a = Analysis::new(c.graph.clone(), &c.tails).unwrap();
        let dec = a.spectrum(DEFAULT_EPSILON).unwrap();
        prop_assert!(dec.spectral_radius() <= 1.0 + 1e-10);
        let report = verify_center_space(&dec, a.center(), a.arcs().len()).unwrap();
        prop_assert_eq!(report.c_plus_dim, c.graph.cyclomatic_number());
        prop_assert!(center_stable_overlap(a.operators(), &dec).unwrap() < 1e-8);
        prop_assert!(boundary_kirchhoff_residual(&dec, a.tailed(), a.arcs()) < 1e-8);
        let (pencil, _) = quadratic_pencil_residual(a.operators(), &dec).unwrap();
        prop_assert!(pencil < 1e-8, "pencil residual {}", pencil);
    }

    #[test]
    fn truncated_walk_matches_recursion(c in arb_case()) {
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        let mut r = rng(c.seed ^ 0xa5a5);
        let inflow = random_inflow(&mut r, c.tails.len());
        let drive = DriveConfig::new(a.tailed(), inflow, random_phase(&mut r)).unwrap();
        let steps = 20;
        let history = truncated_unitary_evolve(a.tailed(), a.arcs(), &drive, steps + 1, steps).unwrap();
        let traj = grovertails_core::iterate(a.tailed(), a.arcs(), a.operators(), &drive, steps, 0.0);
        for (x, y) in history.restricted().zip(&traj.states) {
            prop_assert!(x.sup_distance(y) < 1e-12);
        }
        prop_assert!(history.norm_defects.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn stationary_state_obeys_flow_laws(c in arb_case()) {
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        let mut r = rng(c.seed ^ 0x5a5a);
        let drive = DriveConfig::stationary(a.tailed(), random_inflow(&mut r, c.tails.len())).unwrap();
        let st = a.stationary(&drive).unwrap();
        let out = grovertails_core::transmission_reflection(a.tailed(), a.arcs(), &st.psi, &drive);
        let full = extend_to_tails(&st.psi, &out, 4);
        prop_assert!(stationarity_residual(a.tailed(), a.arcs(), &full, &out.alpha) < 1e-10);
        let report = check_laws(a.tailed(), a.arcs(), a.operators(), a.cycles(), &full, &out, c.seed).unwrap();
        for check in &report.checks {
            prop_assert!(check.passed, "{} = {:e}", check.name, check.magnitude);
        }
        for (b, al) in out.beta.iter().zip(&out.alpha) {
            prop_assert!((b - (out.c * 2.0 - al)).norm() < 1e-10);
        }
    }

    #[test]
    fn scattering_matrix_is_grover(c in arb_case()) {
        prop_assume!(c.tails.len() >= 2);
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        let m = a.scattering_matrix().unwrap();
        prop_assert!(max_abs(&(&m - m.transpose())) < 1e-8);
        let r = m.nrows();
        prop_assert!(max_abs(&(m.adjoint() * &m - CMatrix::identity(r, r))) < 1e-8);
    }
}

#[test]
fn evolve_converges_to_solve_on_small_graphs() {
    for seed in 0..20 {
        let c = case(seed, 6, 3);
        let a = Analysis::new(c.graph, &c.tails).unwrap();
        let drive = DriveConfig::unit_first(a.tailed());
        let solved = a.stationary(&drive).unwrap();
        let radius = a.spectrum(DEFAULT_EPSILON).unwrap().stable_radius();
        let steps = grovertails_core::dynamics::default_max_steps(a.arcs().len(), radius);
        let traj = evolve(a.tailed(), a.arcs(), a.operators(), &drive, steps, 1e-12).unwrap();
        let limit = traj.limit(real(1.0));
        assert!(limit.sup_distance(&solved.psi) < 1e-8, "seed {seed}");
    }
}
