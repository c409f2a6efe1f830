#![allow(dead_code)]

use feynpar_core::graph::builders::{edge, leg};
use feynpar_core::graph::{FeynmanGraph, GraphDescription, Theory};
use proptest::prelude::*;

/// Random connected multigraph: a random spanning tree plus extra edges
/// (parallel edges and self-loops allowed), random orientations.
pub fn arb_graph(max_vertices: usize, max_extra: usize) -> impl Strategy<Value = FeynmanGraph> {
    (2..=max_vertices)
        .prop_flat_map(move |nv| {
            let parents = (1..nv).map(|v| 0..v).collect::<Vec<_>>();
            let extra = prop::collection::vec((0..nv, 0..nv), 0..=max_extra);
            let flips = prop::collection::vec(any::<bool>(), nv - 1 + max_extra);
            (Just(nv), parents, extra, flips)
        })
        .prop_map(|(nv, parents, extra, flips)| {
            let vname = |v: usize| format!("v{}", v + 1);
            let mut edges = Vec::new();
            for (i, &p) in parents.iter().enumerate() {
                let (a, b) = if flips[i] { (p, i + 1) } else { (i + 1, p) };
                edges.push((a, b));
            }
            edges.extend(extra);
            // shuffle-free but mixed order: interleave tree and extra edges
            edges.sort_by_key(|&(a, b)| (a * 7 + b * 3) % 5);
            let edges = edges
                .into_iter()
                .enumerate()
                .map(|(i, (a, b))| edge(&format!("e{}", i + 1), &vname(a), &vname(b)))
                .collect();
            FeynmanGraph::validate(GraphDescription {
                name: "random".into(),
                vertices: (0..nv).map(vname).collect(),
                edges,
                external: vec![leg("p1", "v1", "p"), leg("p2", &vname(nv - 1), "-p")],
                theory: Theory { power: 4, dimension: Some(4) },
            })
            .expect("random graph is valid")
        })
}

/// Random graph with at least one loop.
pub fn arb_loop_graph(max_vertices: usize, max_extra: usize) -> impl Strategy<Value = FeynmanGraph> {
    arb_graph(max_vertices, max_extra).prop_filter("needs a loop", |g| g.loop_number() >= 1)
}
