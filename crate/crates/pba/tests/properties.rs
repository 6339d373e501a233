//! Cross-module invariants: reconstruction round trips, witness ordering
//! and monotonicity, state structure, and the feasibility gadget whose
//! clique constraints contradict each other.

mod common;

use pba::algebra::DEFAULT_ISO_BUDGET;
use pba::quantum::{scenario_chsh, scenario_fig2, scenario_kcbs};
use pba::sample::{random_graph, random_graph_state, random_positive_weights, rng_from_seed};
use pba::scenarios::{algebra_b1, algebra_b2_prime, boolean_algebra};
use pba::state::{
    extend_state, restrict_state, state_feasible, zero_one_states, Substate, STATE_TOL,
};
use pba::witness::{alpha, alpha_star, nc_inequality_report, theta, WeightFunction};
use pba::{are_isomorphic, reconstruct, AtomGraph};

/// Round trip A: rebuilding from the atom graph reproduces every built-in
/// exclusive algebra up to isomorphism.
#[test]
fn reconstruction_round_trip_on_built_ins() {
    let built_ins = vec![
        algebra_b1(),
        algebra_b2_prime(),
        boolean_algebra(&["x", "y", "z", "w"]),
        scenario_fig2().algebra,
        scenario_kcbs().algebra,
    ];
    for algebra in built_ins {
        let graph = algebra.atom_graph();
        let res = reconstruct(&graph).unwrap();
        let (rebuilt, atom_map) = res.realizable().expect("atom graphs of exclusive algebras");
        assert!(
            are_isomorphic(rebuilt, &algebra, DEFAULT_ISO_BUDGET)
                .unwrap()
                .is_some(),
            "{}-element algebra failed its round trip",
            algebra.len()
        );
        // Round trip B: vertex set and adjacency survive exactly.
        for u in 0..graph.len() {
            for v in u + 1..graph.len() {
                assert_eq!(
                    graph.adjacent(u, v),
                    rebuilt.compat(atom_map[u], atom_map[v])
                );
            }
        }
    }
}

/// Every maximal clique of the atom graph is the atom set of exactly one
/// maximal context when the algebra is exclusive.
#[test]
fn cliques_match_context_atoms() {
    for algebra in [
        algebra_b1(),
        scenario_kcbs().algebra,
        scenario_fig2().algebra,
    ] {
        let atoms = algebra.atoms();
        let graph = algebra.atom_graph();
        let cover = graph.maximal_cliques().unwrap();
        let contexts = algebra.maximal_contexts().unwrap();
        for clique in &cover.cliques {
            let clique_atoms: Vec<usize> = clique.iter().map(|&v| atoms[v]).collect();
            let matching: Vec<_> = contexts
                .iter()
                .filter(|ctx| {
                    let mut ctx_atoms = algebra.context_atoms(ctx);
                    ctx_atoms.sort_unstable();
                    let mut sorted = clique_atoms.clone();
                    sorted.sort_unstable();
                    ctx_atoms == sorted
                })
                .collect();
            assert_eq!(matching.len(), 1);
        }
        assert_eq!(cover.cliques.len(), contexts.len());
    }
}

/// The four-context scenario glues its contexts over shared marginals, so
/// it is *not* exclusive, and rebuilding from its atom graph (four disjoint
/// 4-cliques) gives the exclusive algebra instead: four powersets sharing
/// only the bounds, with no marginal identifications.
#[test]
fn four_context_scenario_differs_from_its_reconstruction() {
    let system = scenario_chsh();
    assert!(!system.algebra.satisfies_lep());
    assert!(!system.algebra.is_transitive());
    assert_eq!(system.algebra.len(), 50);

    let graph = system.atom_graph();
    assert_eq!(graph.len(), 16);
    assert_eq!(graph.maximal_cliques().unwrap().cliques.len(), 4);

    let res = reconstruct(&graph).unwrap();
    let (rebuilt, _) = res.realizable().expect("disjoint 4-cliques are realizable");
    assert_eq!(rebuilt.len(), 4 * 14 + 2);
    assert!(rebuilt.satisfies_lep());
    assert!(are_isomorphic(rebuilt, &system.algebra, DEFAULT_ISO_BUDGET)
        .unwrap()
        .is_none());
}

/// Across the projector scenarios, algebra isomorphism and atom-graph
/// isomorphism coincide (including the self pairs).
#[test]
fn scenario_pairs_agree_on_isomorphism() {
    use pba::graphs_isomorphic;

    let systems = [scenario_fig2(), scenario_kcbs(), scenario_chsh()];
    for a in &systems {
        for b in &systems {
            let algebra_iso = are_isomorphic(&a.algebra, &b.algebra, DEFAULT_ISO_BUDGET)
                .unwrap()
                .is_some();
            let graph_iso = graphs_isomorphic(
                &a.atom_graph(),
                &b.atom_graph(),
                pba::graph::DEFAULT_GRAPH_ISO_BUDGET,
            )
            .unwrap()
            .is_some();
            assert_eq!(algebra_iso, graph_iso);
        }
    }
}

#[test]
fn witness_sandwich_and_monotonicity() {
    let mut rng = rng_from_seed(0x5150);
    for round in 0..12 {
        let n = 5 + round % 6;
        let mut graph = random_graph(n, 0.35, &mut rng);
        let weights = random_positive_weights(n, &mut rng);

        let report = nc_inequality_report(&graph, &weights).unwrap();
        assert!(report.alpha.value <= report.theta.value + 1e-4);
        assert!(report.theta.value <= report.alpha_star.value + 2e-4);

        // adding an edge can only shrink all three numbers
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !graph.adjacent(i, j))
            .collect();
        if let Some(&(i, j)) = missing.first() {
            graph.add_edge(i, j);
            let denser = nc_inequality_report(&graph, &weights).unwrap();
            assert!(denser.alpha.value <= report.alpha.value + 1e-9);
            assert!(denser.theta.value <= report.theta.value + 1e-4);
            assert!(denser.alpha_star.value <= report.alpha_star.value + 1e-9);
        }
    }
}

/// On vertex-transitive graphs the Lovász numbers of a graph and its
/// complement multiply to the vertex count — an independent identity the
/// solver must reproduce.
#[test]
fn theta_complement_identity_on_vertex_transitive_graphs() {
    let complement = |g: &AtomGraph| {
        let mut c = AtomGraph::new(g.labels().to_vec());
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if !g.adjacent(i, j) {
                    c.add_edge(i, j);
                }
            }
        }
        c
    };
    let mut cases = vec![
        AtomGraph::cycle(5),
        AtomGraph::cycle(7),
        AtomGraph::cycle(9),
    ];
    {
        let mut petersen = AtomGraph::new((0..10).map(|i| format!("v{i}")).collect());
        for i in 0..5 {
            petersen.add_edge(i, (i + 1) % 5);
            petersen.add_edge(i, i + 5);
            petersen.add_edge(i + 5, (i + 2) % 5 + 5);
        }
        cases.push(petersen);
    }
    for g in &cases {
        let n = g.len() as f64;
        let w = WeightFunction::ones(g.len());
        let t = theta(g, &w).unwrap().value;
        let tc = theta(&complement(g), &w).unwrap().value;
        assert!((t * tc - n).abs() < 2e-3, "theta product {t} * {tc} != {n}");
    }
}

#[test]
fn witness_scaling() {
    let mut rng = rng_from_seed(0x5151);
    let graph = random_graph(8, 0.4, &mut rng);
    let weights = random_positive_weights(8, &mut rng);
    let lambda = 2.5f64;
    let scaled = WeightFunction::new(weights.weights.iter().map(|w| lambda * w).collect()).unwrap();

    let a = alpha(&graph, &weights).unwrap();
    let a2 = alpha(&graph, &scaled).unwrap();
    assert_eq!(a.set, a2.set, "maximizing set is scale invariant");
    assert!((a2.value - lambda * a.value).abs() < 1e-12);

    let t = theta(&graph, &weights).unwrap();
    let t2 = theta(&graph, &scaled).unwrap();
    assert!((t2.value - lambda * t.value).abs() < 1e-4 * lambda.max(1.0));

    let s = alpha_star(&graph, &weights).unwrap();
    let s2 = alpha_star(&graph, &scaled).unwrap();
    assert!((s2.value - lambda * s.value).abs() < 1e-9 * lambda.max(1.0));
}

/// Each 0-1 state selects an independent transversal of the clique cover.
#[test]
fn zero_one_states_are_independent_transversals() {
    let mut rng = rng_from_seed(0x5152);
    let mut graphs = vec![
        algebra_b1().atom_graph(),
        scenario_kcbs().atom_graph(),
        scenario_chsh().atom_graph(),
        AtomGraph::cycle(6),
    ];
    for _ in 0..8 {
        graphs.push(random_graph(9, 0.3, &mut rng));
    }
    for graph in &graphs {
        let cover = graph.maximal_cliques().unwrap();
        for state in zero_one_states(graph).unwrap() {
            let selected: Vec<usize> = (0..graph.len())
                .filter(|&v| state.values[v] == 1.0)
                .collect();
            for (k, &u) in selected.iter().enumerate() {
                for &v in &selected[k + 1..] {
                    assert!(!graph.adjacent(u, v), "selection must be independent");
                }
            }
            for clique in &cover.cliques {
                let hits = clique.iter().filter(|v| selected.contains(v)).count();
                assert_eq!(hits, 1, "each maximal clique holds exactly one pick");
            }
        }
    }
}

/// Graph states are substates; substates with unit sums are graph states.
#[test]
fn substate_relations() {
    let mut rng = rng_from_seed(0x5153);
    let graph = scenario_kcbs().atom_graph();
    for _ in 0..10 {
        let state = random_graph_state(&graph, &mut rng).unwrap();
        let sub = state.as_substate();
        Substate::checked(&graph, sub.values.clone()).expect("states are substates");
        sub.into_state(&graph).expect("unit sums convert back");
    }
    // a strictly slack substate is not a state
    let slack = Substate::checked(&graph, vec![0.1; graph.len()]).unwrap();
    assert!(slack.into_state(&graph).is_err());
}

/// Distinct algebra states restrict to distinct graph states.
#[test]
fn restriction_is_injective() {
    let mut rng = rng_from_seed(0x5154);
    let algebra = algebra_b1();
    let graph = algebra.atom_graph();
    let mut states = Vec::new();
    for _ in 0..20 {
        let q = random_graph_state(&graph, &mut rng).unwrap();
        states.push(extend_state(&algebra, &q).unwrap());
    }
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let differ = states[i]
                .values
                .iter()
                .zip(&states[j].values)
                .any(|(a, b)| (a - b).abs() > STATE_TOL);
            if !differ {
                continue;
            }
            let ri = restrict_state(&algebra, &states[i]).unwrap();
            let rj = restrict_state(&algebra, &states[j]).unwrap();
            let restricted_differ = ri
                .values
                .iter()
                .zip(&rj.values)
                .any(|(a, b)| (a - b).abs() > STATE_TOL);
            assert!(restricted_differ, "distinct states collapsed on the atoms");
        }
    }
}

/// A graph whose clique constraints contradict each other: a maximal edge
/// between two hubs, each hub in a triangle whose other corners are pinned
/// to one half by pendant five-cycles. Both solvers must report emptiness.
#[test]
fn contradictory_clique_constraints_have_no_state() {
    let mut labels: Vec<String> = vec!["u".into(), "w".into()];
    for hub in ["a", "b", "c", "d"] {
        labels.push(hub.to_string());
        for k in 1..=4 {
            labels.push(format!("{hub}{k}"));
        }
    }
    let mut g = AtomGraph::new(labels.clone());
    let at = |name: &str| labels.iter().position(|l| l == name).unwrap();
    g.add_edge(at("u"), at("w"));
    for (hub, peer) in [("a", "u"), ("b", "u"), ("c", "w"), ("d", "w")] {
        g.add_edge(at(hub), at(peer));
    }
    g.add_edge(at("a"), at("b"));
    g.add_edge(at("c"), at("d"));
    for hub in ["a", "b", "c", "d"] {
        let cycle = [
            at(hub),
            at(&format!("{hub}1")),
            at(&format!("{hub}2")),
            at(&format!("{hub}3")),
            at(&format!("{hub}4")),
        ];
        for k in 0..5 {
            g.add_edge(cycle[k], cycle[(k + 1) % 5]);
        }
    }

    assert!(
        state_feasible(&g).unwrap().is_none(),
        "polytope must be empty"
    );
    // pentagon alone is satisfiable, so the contradiction needs the gadget
    assert!(state_feasible(&AtomGraph::cycle(5)).unwrap().is_some());
    // the exact rational phase-one solver agrees; the cover is known by
    // construction (two triangles, the hub edge, the cycle edges)
    let mut cliques: Vec<Vec<usize>> = vec![
        vec![at("u"), at("w")],
        vec![at("u"), at("a"), at("b")],
        vec![at("w"), at("c"), at("d")],
    ];
    for hub in ["a", "b", "c", "d"] {
        let cycle = [
            at(hub),
            at(&format!("{hub}1")),
            at(&format!("{hub}2")),
            at(&format!("{hub}3")),
            at(&format!("{hub}4")),
        ];
        for k in 0..5 {
            cliques.push(vec![cycle[k], cycle[(k + 1) % 5]]);
        }
    }
    assert!(!common::rational_state_feasible_with_cliques(
        g.len(),
        &cliques
    ));
}

/// The interior point solver and the exact oracle agree on feasibility for
/// a sweep of small graphs.
#[test]
fn feasibility_matches_rational_oracle() {
    let mut rng = rng_from_seed(0x5155);
    let mut graphs = vec![
        AtomGraph::cycle(5),
        AtomGraph::cycle(7),
        AtomGraph::path(4),
        AtomGraph::complete((0..5).map(|i| format!("v{i}")).collect()),
    ];
    for _ in 0..12 {
        graphs.push(random_graph(8, 0.35, &mut rng));
    }
    for g in &graphs {
        let fast = state_feasible(g).unwrap().is_some();
        let exact = common::rational_state_feasible(g);
        assert_eq!(
            fast,
            exact,
            "feasibility disagreement on {} vertices",
            g.len()
        );
    }
}
