mod common;

use feynpar_core::graph::builders::*;
use feynpar_core::graph::{
    subgraph_satisfies, AllOnePi, FeynmanGraph, GraphDescription, GraphEdit, PowerCounting, Subgraph,
};
use feynpar_core::Error;
use proptest::prelude::*;

fn bubble_json(e2_target: &str) -> String {
    format!(
        r#"{{"name":"bubble","vertices":["v1","v2"],
            "edges":[{{"id":"e1","src":"v1","tgt":"v2"}},{{"id":"e2","src":"v1","tgt":"{e2_target}"}}],
            "external":[{{"id":"p1","vertex":"v1","momentum":"p"}},{{"id":"p2","vertex":"v2","momentum":"-p"}}],
            "theory":{{"power":4,"dimension":4}}}}"#
    )
}

#[test]
fn validate_accepts_bubble() {
    let g = FeynmanGraph::from_json(&bubble_json("v2")).unwrap();
    assert_eq!(g.num_edges(), 2);
    assert_eq!(g.legs().len(), 2);
}

#[test]
fn validate_rejects_dangling_endpoint() {
    assert!(matches!(FeynmanGraph::from_json(&bubble_json("v3")), Err(Error::MalformedGraph(_))));
}

#[test]
fn validate_rejects_disconnected_and_duplicates() {
    let mut d = bubble().description();
    d.vertices.extend(["w1".to_string(), "w2".to_string()]);
    d.edges.push(edge("f1", "w1", "w2"));
    d.edges.push(edge("f2", "w1", "w2"));
    match FeynmanGraph::validate(d) {
        Err(Error::MalformedGraph(msg)) => assert!(msg.contains("disconnected")),
        other => panic!("{other:?}"),
    }
    let mut d = bubble().description();
    d.edges.push(edge("e1", "v1", "v2"));
    assert!(matches!(FeynmanGraph::validate(d), Err(Error::MalformedGraph(_))));
}

#[test]
fn loop_numbers() {
    assert_eq!(bubble().loop_number(), 1);
    assert_eq!(triangle().loop_number(), 1);
    assert_eq!(banana(3).loop_number(), 2);
    assert_eq!(wheel3().loop_number(), 3);
}

#[test]
fn incidence_examples() {
    assert_eq!(bubble().incidence_matrix(), vec![vec![-1, -1], vec![1, 1]]);
    let tad = graph("tadpole", &["v1"], vec![edge("e1", "v1", "v1")], vec![]);
    assert_eq!(tad.incidence_matrix(), vec![vec![0]]);
    for col in 0..3 {
        let c: Vec<i64> = triangle().incidence_matrix().iter().map(|r| r[col]).collect();
        assert_eq!(c.iter().filter(|&&x| x == 1).count(), 1);
        assert_eq!(c.iter().filter(|&&x| x == -1).count(), 1);
    }
}

#[test]
fn circuit_examples() {
    assert_eq!(bubble().circuit_matrix(), vec![vec![1], vec![-1]]);
    let path = graph("path", &["v1", "v2", "v3"], vec![edge("e1", "v1", "v2"), edge("e2", "v2", "v3")], vec![]);
    assert!(path.circuit_matrix().iter().all(|r| r.is_empty()));
    let eta = banana(3).circuit_matrix();
    assert_eq!(eta, vec![vec![1, 1], vec![-1, 0], vec![0, -1]]);
}

#[test]
fn spanning_tree_examples() {
    assert_eq!(bubble().spanning_trees().unwrap(), vec![vec![0], vec![1]]);
    assert_eq!(triangle().spanning_trees().unwrap(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    assert_eq!(banana(3).spanning_trees().unwrap(), vec![vec![0], vec![1], vec![2]]);
    assert_eq!(wheel3().spanning_trees().unwrap().len(), 16);
    assert!(matches!(wheel3().spanning_trees_capped(10), Err(Error::TooLarge { cap: 10 })));
}

#[test]
fn cut_set_examples() {
    let cs = bubble().cut_sets().unwrap();
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].edges, vec![0, 1]);
    assert_eq!((cs[0].side_a.clone(), cs[0].side_b.clone()), (vec![0], vec![1]));

    let cs = banana(3).cut_sets().unwrap();
    assert_eq!(cs.iter().map(|c| c.edges.clone()).collect::<Vec<_>>(), vec![vec![0, 1, 2]]);

    let cs = triangle().cut_sets().unwrap();
    assert_eq!(cs.iter().map(|c| c.edges.clone()).collect::<Vec<_>>(), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    assert!(cs.iter().all(|c| c.side_a.len() == 1 || c.side_b.len() == 1));
}

#[test]
fn one_pi_examples() {
    assert!(bubble().is_one_pi());
    assert!(banana(3).is_one_pi());
    assert!(!bridged_bubbles().is_one_pi());
}

#[test]
fn edit_examples() {
    let g = banana(3).edit(&GraphEdit::Delete("e1".into())).unwrap();
    assert_eq!(g.edges().iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), vec!["e2", "e3"]);
    assert_eq!(g.loop_number(), 1);
    assert!(matches!(banana(3).delete_edge("e9"), Err(Error::UnknownEdge(_))));

    let g2 = nested_two_loop();
    let gamma = Subgraph::from_ids(&g2, &["e2", "e3"]).unwrap();
    let q = g2.contract(&gamma);
    assert_eq!(q.vertices(), &["v1".to_string(), "v2".to_string()]);
    assert_eq!(q.edges().iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), vec!["e1", "e4"]);
    assert_eq!(q.edges()[1].tgt, "v2");
    assert_eq!(q.loop_number(), 1);

    let copy = g2.contract(&Subgraph::empty());
    assert_eq!(copy.canonical_key(), g2.canonical_key());
    assert!(matches!(Subgraph::from_ids(&g2, &["e7"]), Err(Error::NotASubgraph(_))));
}

#[test]
fn divergent_subgraph_examples() {
    let rule = PowerCounting { dimension: 4 };
    assert!(bubble().divergent_subgraphs(&rule).unwrap().is_empty());
    let g2 = nested_two_loop();
    let div = g2.divergent_subgraphs(&rule).unwrap();
    assert_eq!(div.len(), 1);
    assert_eq!(div[0].edge_ids(&g2), vec!["e2", "e3"]);
    // banana-3 has three one-loop bubbles at D = 4
    assert_eq!(banana(3).divergent_subgraphs(&rule).unwrap().len(), 3);
    // trees never qualify
    let tree = Subgraph::from_ids(&g2, &["e1", "e4"]).unwrap();
    assert!(!subgraph_satisfies(&g2, &tree, &rule));
}

#[test]
fn description_roundtrip() {
    for g in corpus() {
        let back = FeynmanGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let d: GraphDescription = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(d.edges.len(), g.num_edges());
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|r| (0..cols).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect())
        .collect()
}

/// Brute-force tree check: |V|-1 edges, acyclic, touching all vertices.
fn is_spanning_tree(g: &FeynmanGraph, edges: &[usize]) -> bool {
    let mut keep = vec![false; g.num_edges()];
    for &e in edges {
        keep[e] = true;
    }
    edges.len() == g.num_vertices() - 1 && g.components_with(Some(&keep)).iter().all(|&c| c == 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incidence_times_circuit_vanishes(g in common::arb_graph(6, 5)) {
        let eta = g.circuit_matrix();
        prop_assert_eq!(eta.first().map_or(0, |r| r.len()), g.loop_number());
        let prod = mat_mul(&g.incidence_matrix(), &eta);
        prop_assert!(prod.iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn tree_count_matches_matrix_tree(g in common::arb_graph(6, 5)) {
        let trees = g.spanning_trees().unwrap();
        prop_assert_eq!(trees.len() as u64, g.matrix_tree_count());
        prop_assert!(trees.iter().all(|t| is_spanning_tree(&g, t)));
        prop_assert!(trees.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(g.loop_number(), g.num_edges() - g.incidence_rank());
    }

    #[test]
    fn cut_sets_come_from_trees(g in common::arb_graph(5, 4)) {
        let trees = g.spanning_trees().unwrap();
        for c in g.cut_sets().unwrap() {
            prop_assert_eq!(c.edges.len(), g.loop_number() + 1);
            let found = trees.iter().any(|t| {
                let comp: Vec<usize> = (0..g.num_edges()).filter(|e| !t.contains(e)).collect();
                t.iter().any(|&ep| {
                    let mut s = comp.clone();
                    s.push(ep);
                    s.sort();
                    s == c.edges
                })
            });
            prop_assert!(found);
            prop_assert!(c.side_a.contains(&0));
        }
    }

    #[test]
    fn deleting_cycle_edge_drops_loop_number(g in common::arb_graph(6, 5)) {
        for e in 0..g.num_edges() {
            let d = g.delete_index(e);
            let on_cycle = !g.is_bridge(e);
            let l = g.loop_number();
            if on_cycle {
                prop_assert_eq!(d.loop_number() + 1, l);
            } else {
                prop_assert_eq!(d.loop_number(), l);
            }
        }
    }

    #[test]
    fn divergent_subgraphs_pass_their_rule(g in common::arb_graph(4, 4), d in prop::sample::select(vec![2i64, 4, 6])) {
        let rule = PowerCounting { dimension: d };
        for s in g.divergent_subgraphs(&rule).unwrap() {
            prop_assert!(subgraph_satisfies(&g, &s, &rule));
            prop_assert!(s.len() < g.num_edges());
        }
        for s in g.divergent_subgraphs(&AllOnePi).unwrap() {
            prop_assert!(subgraph_satisfies(&g, &s, &AllOnePi));
        }
    }

    #[test]
    fn contraction_preserves_loop_balance(g in common::arb_graph(5, 4)) {
        // l(G) = l(gamma) + l(G/gamma) for any subgraph
        for s in g.divergent_subgraphs(&AllOnePi).unwrap() {
            let sub_l: usize = s.components(&g).iter().map(|c| c.to_graph(&g).loop_number()).sum();
            prop_assert_eq!(g.contract(&s).loop_number() + sub_l, g.loop_number());
        }
    }
}
