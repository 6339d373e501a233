//! Acceptance suite: one test per shipping criterion, each printing its own
//! pass line with the measured numbers. Expected values come from the
//! independent oracles in `common` or are pinned constants.

mod common;

use std::time::Instant;

use pba::algebra::{DEFAULT_ELEMENT_CAP, DEFAULT_ISO_BUDGET};
use pba::graph::DEFAULT_GRAPH_ISO_BUDGET;
use pba::quantum::{
    density_to_state, generate_system, scenario_chsh, scenario_fig2, scenario_kcbs, Projector,
    QuantumSystem,
};
use pba::sample::{
    random_density_matrix, random_graph, random_graph_state, random_pba, rng_from_seed,
};
use pba::scenarios::{algebra_b1, algebra_b2, algebra_b2_prime};
use pba::state::{extend_state, restrict_state, AlgebraState};
use pba::witness::{alpha, alpha_star, nc_inequality_report, theta, WeightFunction};
use pba::{
    are_isomorphic, graphs_isomorphic, reconstruct, AtomGraph, PartialBooleanAlgebra,
    ReconstructionResult,
};

/// The five-cycle subgraph of the 10-atom system graph induced on the
/// generators.
fn kcbs_generator_subgraph(system: &QuantumSystem) -> AtomGraph {
    let graph = system.atom_graph();
    let atoms = system.algebra.atoms();
    let vertices: Vec<usize> = (0..5)
        .map(|i| {
            let e = system.algebra.element(&format!("P{i}")).unwrap();
            atoms.iter().position(|&a| a == e).unwrap()
        })
        .collect();
    graph.induced(&vertices)
}

/// The edgeless subgraph induced on the five edge-complement atoms.
fn kcbs_pair_subgraph(system: &QuantumSystem) -> AtomGraph {
    let graph = system.atom_graph();
    let atoms = system.algebra.atoms();
    let vertices: Vec<usize> = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
        .iter()
        .map(|(i, j)| {
            let e = system.algebra.element(&format!("P{i}{j}")).unwrap();
            atoms.iter().position(|&a| a == e).unwrap()
        })
        .collect();
    graph.induced(&vertices)
}

#[test]
fn criterion_01_kcbs_witness_numbers() {
    let started = Instant::now();
    let system = scenario_kcbs();
    let g1 = kcbs_generator_subgraph(&system);
    assert!(
        graphs_isomorphic(&g1, &AtomGraph::cycle(5), DEFAULT_GRAPH_ISO_BUDGET)
            .unwrap()
            .is_some()
    );
    let w = WeightFunction::ones(5);
    let report = nc_inequality_report(&g1, &w).unwrap();
    let elapsed = started.elapsed();

    assert_eq!(report.alpha.value, 2.0, "independence number must be exact");
    assert!(
        (report.theta.value - 5f64.sqrt()).abs() <= 1e-4,
        "theta {} vs sqrt(5)",
        report.theta.value
    );
    assert!(
        (report.alpha_star.value - 2.5).abs() <= 1e-9,
        "alpha* {}",
        report.alpha_star.value
    );
    assert!(report.gap_found);
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "witness took {elapsed:?}, budget 1 s"
    );
    println!(
        "criterion 01 PASS: five-cycle witnesses alpha=2 theta={:.7} alpha*={:.10} in {elapsed:?}",
        report.theta.value, report.alpha_star.value
    );
}

#[test]
fn criterion_02_pair_subgraph_equality() {
    let started = Instant::now();
    let system = scenario_kcbs();
    let g2 = kcbs_pair_subgraph(&system);
    assert_eq!(g2.len(), 5);
    assert_eq!(g2.edge_count(), 0, "pair atoms are mutually incompatible");

    let mut rng = rng_from_seed(0x0202);
    let mut cases = vec![WeightFunction::ones(5)];
    for _ in 0..100 {
        cases.push(pba::sample::random_positive_weights(5, &mut rng));
    }
    for (i, w) in cases.iter().enumerate() {
        let a = alpha(&g2, w).unwrap().value;
        let t = theta(&g2, w).unwrap().value;
        let s = alpha_star(&g2, w).unwrap().value;
        assert!((a - t).abs() <= 1e-4, "case {i}: alpha {a} vs theta {t}");
        assert!((t - s).abs() <= 1e-4, "case {i}: theta {t} vs alpha* {s}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    println!(
        "criterion 02 PASS: alpha=theta=alpha* on the pair subgraph for 101 weight vectors in {elapsed:?}"
    );
}

#[test]
fn criterion_03_exclusivity_equals_transitivity() {
    let mut checked = 0usize;
    let mut verify = |algebra: &PartialBooleanAlgebra| {
        assert_eq!(
            algebra.satisfies_lep(),
            algebra.is_transitive(),
            "disagreement on a {}-element algebra",
            algebra.len()
        );
        checked += 1;
    };
    verify(&algebra_b1());
    verify(&algebra_b2());
    verify(&algebra_b2_prime());
    verify(&scenario_fig2().algebra);
    verify(&scenario_kcbs().algebra);
    verify(&scenario_chsh().algebra);

    let mut rng = rng_from_seed(0x0303);
    for _ in 0..500 {
        let algebra = random_pba(&mut rng);
        assert!(algebra.len() <= 12);
        assert!(algebra.validate(DEFAULT_ELEMENT_CAP).unwrap().ok());
        verify(&algebra);
    }
    println!("criterion 03 PASS: exclusivity == transitivity on {checked} algebras");
}

#[test]
fn criterion_04_atom_anomaly() {
    let b2 = algebra_b2();
    let c = b2.element("c").unwrap();
    let atoms_b2 = b2.atoms();
    assert!(!atoms_b2.contains(&c), "c must not be an atom of b2");

    let holding: Vec<_> = b2
        .maximal_contexts()
        .unwrap()
        .into_iter()
        .filter(|ctx| b2.context_atoms(ctx).contains(&c))
        .collect();
    assert_eq!(holding.len(), 1, "exactly one context has c as an atom");

    let b1 = algebra_b1();
    let mut names: Vec<&str> = b1.atoms().iter().map(|&a| b1.label(a)).collect();
    names.sort_unstable();
    assert_eq!(names, ["a1", "a2", "b1", "b2", "c"]);
    println!("criterion 04 PASS: atoms(b2) omits c, its second context keeps it, atoms(b1) = a1 b1 c a2 b2");
}

#[test]
fn criterion_05_reconstruction_fidelity() {
    for n in 1..=6usize {
        let g = AtomGraph::complete((0..n).map(|i| format!("v{i}")).collect());
        let res = reconstruct(&g).unwrap();
        let (algebra, _) = res.realizable().expect("complete graphs are realizable");
        assert_eq!(algebra.len(), 1 << n, "powerset size for n={n}");
    }

    let res = reconstruct(&algebra_b2().atom_graph()).unwrap();
    let (algebra, _) = res.realizable().unwrap();
    assert_eq!(algebra.len(), 6);
    assert!(
        are_isomorphic(algebra, &algebra_b2_prime(), DEFAULT_ISO_BUDGET)
            .unwrap()
            .is_some()
    );

    let res = reconstruct(&algebra_b1().atom_graph()).unwrap();
    let (algebra, _) = res.realizable().unwrap();
    assert!(are_isomorphic(algebra, &algebra_b1(), DEFAULT_ISO_BUDGET)
        .unwrap()
        .is_some());

    assert!(matches!(
        reconstruct(&AtomGraph::path(3)).unwrap(),
        ReconstructionResult::NotRealizable(_)
    ));
    println!("criterion 05 PASS: 2^n powersets (n=1..6), 6-element rebuild of the b2 graph, b1 round trip, 3-path rejected");
}

/// Disjoint cliques of the given sizes.
fn clique_union_graph(parts: &[usize]) -> AtomGraph {
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut next = 0usize;
    for (ci, &part) in parts.iter().enumerate() {
        for k in 0..part {
            labels.push(format!("p{ci}v{k}"));
        }
        for i in 0..part {
            for j in i + 1..part {
                edges.push((next + i, next + j));
            }
        }
        next += part;
    }
    let mut g = AtomGraph::new(labels);
    for (i, j) in edges {
        g.add_edge(i, j);
    }
    g
}

/// Cliques of sizes `petals[i] + 1` sharing one common hub vertex.
fn flower_graph(petals: &[usize]) -> AtomGraph {
    let total = 1 + petals.iter().sum::<usize>();
    let mut g = AtomGraph::new((0..total).map(|i| format!("v{i}")).collect());
    let mut next = 1usize;
    for &petal in petals {
        let members: Vec<usize> = std::iter::once(0).chain(next..next + petal).collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                g.add_edge(u, v);
            }
        }
        next += petal;
    }
    g
}

/// Triangles linked in a path, consecutive ones sharing a vertex.
fn triangle_chain_graph(length: usize) -> AtomGraph {
    let total = 3 + 2 * (length - 1);
    let mut g = AtomGraph::new((0..total).map(|i| format!("v{i}")).collect());
    for t in 0..length {
        let base = 2 * t;
        g.add_edge(base, base + 1);
        g.add_edge(base, base + 2);
        g.add_edge(base + 1, base + 2);
    }
    g
}

#[test]
fn criterion_06_graph_structure_theorem() {
    // Catalog of realizable graphs: clique unions without singleton parts
    // (a lone vertex forces a two-element algebra), flowers of cliques on a
    // shared hub, triangle chains, and a few cross-family mixtures.
    let mut graphs: Vec<AtomGraph> = Vec::new();
    graphs.push(clique_union_graph(&[1]));
    for n in 2..=9usize {
        for partition in partitions(n) {
            if partition.iter().all(|&p| p >= 2) {
                graphs.push(clique_union_graph(&partition));
            }
        }
    }
    for k in 4..=8usize {
        for petals in partitions(k) {
            if petals.len() >= 2 && petals.iter().all(|&p| p >= 2) {
                graphs.push(flower_graph(&petals));
            }
        }
    }
    graphs.push(triangle_chain_graph(2));
    graphs.push(triangle_chain_graph(3));
    {
        // two 4-cliques sharing an edge
        let mut g = AtomGraph::new((0..6).map(|i| format!("v{i}")).collect());
        for clique in [[0usize, 1, 2, 3], [0, 1, 4, 5]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    g.add_edge(clique[i], clique[j]);
                }
            }
        }
        graphs.push(g);
    }
    {
        // flower plus a far-away triangle
        let mut g = flower_graph(&[2, 2]);
        let base = g.len();
        let mut labels = g.labels().to_vec();
        labels.extend((0..3).map(|i| format!("w{i}")));
        let mut h = AtomGraph::new(labels);
        for (i, j) in g.edges() {
            h.add_edge(i, j);
        }
        h.add_edge(base, base + 1);
        h.add_edge(base, base + 2);
        h.add_edge(base + 1, base + 2);
        g = h;
        graphs.push(g);
    }

    let mut catalog: Vec<PartialBooleanAlgebra> = Vec::new();
    for g in &graphs {
        let res = reconstruct(g).unwrap();
        let (algebra, _) = res.realizable().unwrap_or_else(|| {
            panic!("catalog graph with {} vertices must be realizable", g.len())
        });
        catalog.push(algebra.clone());
    }
    catalog.push(algebra_b1());
    catalog.push(scenario_fig2().algebra);
    let mut rng = rng_from_seed(0x0606);
    for idx in [0usize, 5, 12, 20, 30] {
        let copy = pba::sample::shuffled(&catalog[idx], &mut rng);
        catalog.push(copy);
    }
    assert!(
        catalog.len() >= 50,
        "catalog has {} algebras",
        catalog.len()
    );
    assert!(catalog.iter().all(|b| b.atoms().len() <= 9));

    let graphs: Vec<AtomGraph> = catalog.iter().map(|b| b.atom_graph()).collect();
    let mut pairs = 0usize;
    let mut isomorphic_pairs = 0usize;
    for i in 0..catalog.len() {
        for j in i + 1..catalog.len() {
            let algebra_iso = are_isomorphic(&catalog[i], &catalog[j], DEFAULT_ISO_BUDGET)
                .unwrap()
                .is_some();
            let graph_iso = graphs_isomorphic(&graphs[i], &graphs[j], DEFAULT_GRAPH_ISO_BUDGET)
                .unwrap()
                .is_some();
            assert_eq!(
                algebra_iso, graph_iso,
                "catalog entries {i} and {j} disagree"
            );
            pairs += 1;
            isomorphic_pairs += usize::from(algebra_iso);
        }
    }
    assert!(
        isomorphic_pairs >= 6,
        "expected the planted isomorphic pairs"
    );
    println!(
        "criterion 06 PASS: algebra iso == graph iso on {} catalog entries ({pairs} pairs, {isomorphic_pairs} isomorphic)",
        catalog.len()
    );
}

#[test]
fn criterion_07_state_bijection() {
    let built_ins: Vec<(&str, PartialBooleanAlgebra)> = vec![
        ("b1", algebra_b1()),
        ("b2'", algebra_b2_prime()),
        ("fig2", scenario_fig2().algebra),
        ("kcbs", scenario_kcbs().algebra),
    ];
    let mut rng = rng_from_seed(0x0707);
    for (name, algebra) in &built_ins {
        let graph = algebra.atom_graph();
        for round in 0..100 {
            // graph state -> extend -> restrict
            let q = random_graph_state(&graph, &mut rng).expect("polytope is nonempty");
            let p = extend_state(algebra, &q).unwrap();
            let back = restrict_state(algebra, &p).unwrap();
            for (v, (&x, &y)) in q.values.iter().zip(&back.values).enumerate() {
                assert!(
                    (x - y).abs() <= 1e-9,
                    "{name} round {round}: vertex {v} drifted {x} -> {y}"
                );
            }
            // algebra state -> restrict -> extend
            let seed_state = random_graph_state(&graph, &mut rng).unwrap();
            let p: AlgebraState = extend_state(algebra, &seed_state).unwrap();
            let q2 = restrict_state(algebra, &p).unwrap();
            let p_back = extend_state(algebra, &q2).unwrap();
            for (e, (&x, &y)) in p.values.iter().zip(&p_back.values).enumerate() {
                assert!(
                    (x - y).abs() <= 1e-9,
                    "{name} round {round}: element {e} drifted {x} -> {y}"
                );
            }
        }
    }
    println!("criterion 07 PASS: restriction and extension invert each other on 4 built-ins x 100 states");
}

#[test]
fn criterion_08_chsh_scenario() {
    let system = scenario_chsh();
    let atoms = system.algebra.atoms();
    assert_eq!(atoms.len(), 16, "atom count");
    let contexts = system.algebra.maximal_contexts().unwrap();
    assert_eq!(contexts.len(), 4, "maximal context count");
    for ctx in &contexts {
        let ctx_atoms = system.algebra.context_atoms(ctx);
        assert_eq!(ctx_atoms.len(), 4);
        assert!(ctx_atoms.iter().all(|&a| system.projectors[a].rank() == 1));
    }

    // marginal probabilities agree across the contexts sharing them
    let mut rng = rng_from_seed(0x0808);
    for _ in 0..20 {
        let rho = random_density_matrix(4, &mut rng);
        let state = density_to_state(&rho, &system).unwrap();
        for marginal in ["a+", "a-", "a'+", "a'-", "b+", "b-", "b'+", "b'-"] {
            let e = system.algebra.element(marginal).unwrap();
            let holding: Vec<f64> = contexts
                .iter()
                .filter(|ctx| ctx.members.contains(&e))
                .map(|ctx| {
                    system
                        .algebra
                        .context_atoms(ctx)
                        .iter()
                        .filter(|&&a| system.algebra.leq(a, e))
                        .map(|&a| state.values[a])
                        .sum::<f64>()
                })
                .collect();
            assert_eq!(holding.len(), 2, "marginals sit in two contexts");
            assert!(
                (holding[0] - holding[1]).abs() <= 1e-9,
                "marginal {marginal} differs across contexts"
            );
            assert!((holding[0] - state.values[e]).abs() <= 1e-9);
        }
    }
    println!("criterion 08 PASS: 16 atoms in 4 rank-1 contexts; marginals agree across contexts for 20 mixed states");
}

#[test]
fn criterion_09_quantum_membership() {
    // systems produced by the generating closure
    let mut generated: Vec<(&str, QuantumSystem)> = vec![
        ("fig2", scenario_fig2()),
        ("kcbs", scenario_kcbs()),
        (
            "single",
            generate_system(
                &[(
                    "p".to_string(),
                    Projector::from_real_vector(&[0.6, 0.8]).unwrap(),
                )],
                64,
            )
            .unwrap(),
        ),
    ];
    // two orthonormal triples sharing their first vector
    let shared = [0.0, 0.0, 1.0];
    let angle = 0.3f64;
    generated.push((
        "shared-basis",
        generate_system(
            &[
                (
                    "s".to_string(),
                    Projector::from_real_vector(&shared).unwrap(),
                ),
                (
                    "u1".to_string(),
                    Projector::from_real_vector(&[1.0, 0.0, 0.0]).unwrap(),
                ),
                (
                    "u2".to_string(),
                    Projector::from_real_vector(&[0.0, 1.0, 0.0]).unwrap(),
                ),
                (
                    "v1".to_string(),
                    Projector::from_real_vector(&[angle.cos(), angle.sin(), 0.0]).unwrap(),
                ),
                (
                    "v2".to_string(),
                    Projector::from_real_vector(&[-angle.sin(), angle.cos(), 0.0]).unwrap(),
                ),
            ],
            256,
        )
        .unwrap(),
    ));
    for (name, system) in &generated {
        assert!(
            system.algebra.validate(DEFAULT_ELEMENT_CAP).unwrap().ok(),
            "{name} must validate"
        );
        assert!(system.algebra.satisfies_lep(), "{name} must be exclusive");
        assert!(system.algebra.is_transitive(), "{name} must be transitive");
    }

    // state conditions for derived probabilities on every scenario
    let mut rng = rng_from_seed(0x0909);
    for (name, system) in [
        ("fig2", scenario_fig2()),
        ("kcbs", scenario_kcbs()),
        ("chsh", scenario_chsh()),
    ] {
        for round in 0..100 {
            let rho = random_density_matrix(system.dim(), &mut rng);
            density_to_state(&rho, &system).unwrap_or_else(|e| panic!("{name} round {round}: {e}"));
        }
    }
    println!("criterion 09 PASS: generated systems validate, are exclusive and transitive; trace probabilities are states (3 x 100 mixed states)");
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut graphs: Vec<(String, AtomGraph)> = vec![
        ("cycle5".into(), AtomGraph::cycle(5)),
        ("cycle6".into(), AtomGraph::cycle(6)),
        ("cycle7".into(), AtomGraph::cycle(7)),
        ("path3".into(), AtomGraph::path(3)),
        ("edgeless6".into(), AtomGraph::edgeless(6)),
        ("b1-graph".into(), algebra_b1().atom_graph()),
        ("b2-graph".into(), algebra_b2().atom_graph()),
        ("kcbs-graph".into(), scenario_kcbs().atom_graph()),
    ];
    for n in 1..=6usize {
        graphs.push((
            format!("complete{n}"),
            AtomGraph::complete((0..n).map(|i| format!("v{i}")).collect()),
        ));
    }
    let mut rng = rng_from_seed(0x1010);
    for i in 0..30 {
        let n = 6 + (i % 9);
        let p = 0.2 + 0.6 * (i as f64 / 30.0);
        graphs.push((format!("random{i}"), random_graph(n, p, &mut rng)));
    }

    for (round, (name, graph)) in graphs.iter().enumerate() {
        assert!(graph.len() <= 14);
        // dyadic weights keep the rational oracle exact
        let weights = WeightFunction::new(
            (0..graph.len())
                .map(|v| ((round * 7 + v * 13) % 32 + 1) as f64 / 16.0)
                .collect(),
        )
        .unwrap();

        for w in [&WeightFunction::ones(graph.len()), &weights] {
            let fast = alpha(graph, w).unwrap();
            let (slow_value, slow_set) = common::brute_force_alpha(graph, w);
            assert_eq!(fast.value, slow_value, "{name}: independence value");
            assert_eq!(fast.set, slow_set, "{name}: maximizing set");

            let fast_star = alpha_star(graph, w).unwrap();
            let rational_weights: Vec<common::Q> =
                w.weights.iter().map(|&x| common::q_from_f64(x)).collect();
            let exact = common::rational_alpha_star(graph, &rational_weights);
            let exact_f = common::rational_to_f64(&exact);
            assert!(
                (fast_star.value - exact_f).abs() <= 1e-9,
                "{name}: packing {} vs exact {}",
                fast_star.value,
                exact_f
            );
        }
        // clique enumeration agrees with the subset scan
        let fast_cliques = graph.maximal_cliques().unwrap().cliques;
        assert_eq!(
            fast_cliques,
            common::brute_force_maximal_cliques(graph),
            "{name}: maximal cliques"
        );
    }
    println!(
        "criterion 10 PASS: exact search and rational packing oracle agree on {} graphs x 2 weight vectors",
        graphs.len()
    );
}

/// All partitions of `n` into nonincreasing positive parts.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
