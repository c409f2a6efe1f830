use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// External leg. `momentum` is a label with an optional sign, e.g. `p` or `-p1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub id: String,
    pub vertex: String,
    pub momentum: String,
}

impl Leg {
    /// (sign, label) after stripping a leading `+` or `-`.
    pub fn signed_label(&self) -> (i32, &str) {
        let m = self.momentum.trim();
        if let Some(rest) = m.strip_prefix('-') {
            (-1, rest.trim())
        } else if let Some(rest) = m.strip_prefix('+') {
            (1, rest.trim())
        } else {
            (1, m)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub power: u32,
    #[serde(default)]
    pub dimension: Option<i64>,
}

/// Unvalidated graph description, the JSON schema read by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescription {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub external: Vec<Leg>,
    #[serde(default = "default_theory")]
    pub theory: Theory,
}

fn default_theory() -> Theory {
    Theory { power: 4, dimension: Some(4) }
}

/// A validated Feynman graph. Edge `i` carries the Schwinger parameter `t_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    theory: Theory,
    vindex: BTreeMap<String, usize>,
}

impl FeynmanGraph {
    /// Validated construction; rejects duplicates, dangling endpoints and
    /// disconnected graphs.
    pub fn validate(desc: GraphDescription) -> Result<Self> {
        let g = Self::build(desc)?;
        if g.num_components() > 1 {
            return Err(Error::MalformedGraph("graph is disconnected".into()));
        }
        if g.theory.power < 3 {
            return Err(Error::MalformedGraph(format!(
                "theory power {} must be at least 3",
                g.theory.power
            )));
        }
        Ok(g)
    }

    /// Construction that checks ids and endpoints but allows several components
    /// (edge deletion may disconnect a graph).
    pub(crate) fn build(desc: GraphDescription) -> Result<Self> {
        let mut vindex = BTreeMap::new();
        for (i, v) in desc.vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(Error::MalformedGraph(format!("duplicate vertex id `{v}`")));
            }
        }
        let mut ids = BTreeSet::new();
        for e in &desc.edges {
            if !ids.insert(e.id.clone()) {
                return Err(Error::MalformedGraph(format!("duplicate edge id `{}`", e.id)));
            }
            for end in [&e.src, &e.tgt] {
                if !vindex.contains_key(end) {
                    return Err(Error::MalformedGraph(format!(
                        "edge `{}` has dangling endpoint `{end}`",
                        e.id
                    )));
                }
            }
        }
        for l in &desc.external {
            if !ids.insert(l.id.clone()) {
                return Err(Error::MalformedGraph(format!("duplicate leg id `{}`", l.id)));
            }
            if !vindex.contains_key(&l.vertex) {
                return Err(Error::MalformedGraph(format!(
                    "leg `{}` attaches to unknown vertex `{}`",
                    l.id, l.vertex
                )));
            }
        }
        if desc.vertices.is_empty() {
            return Err(Error::MalformedGraph("no vertices".into()));
        }
        Ok(Self {
            name: desc.name,
            vertices: desc.vertices,
            edges: desc.edges,
            legs: desc.external,
            theory: desc.theory,
            vindex,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: GraphDescription =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        Self::validate(desc)
    }

    pub fn description(&self) -> GraphDescription {
        GraphDescription {
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            external: self.legs.clone(),
            theory: self.theory.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.description()).expect("graph serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    /// Number of internal edges `n`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.vindex.get(v).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Endpoint vertex indices (source, target) of edge `i`.
    pub fn endpoints(&self, i: usize) -> (usize, usize) {
        let e = &self.edges[i];
        (self.vindex[&e.src], self.vindex[&e.tgt])
    }

    pub fn is_self_loop(&self, i: usize) -> bool {
        let (s, t) = self.endpoints(i);
        s == t
    }

    /// Component label per vertex using only the edges in `mask` (all if `None`).
    pub fn components_with(&self, mask: Option<&[bool]>) -> Vec<usize> {
        let mut dsu = Dsu::new(self.num_vertices());
        for i in 0..self.num_edges() {
            if mask.map_or(true, |m| m[i]) {
                let (s, t) = self.endpoints(i);
                dsu.union(s, t);
            }
        }
        let mut label = BTreeMap::new();
        (0..self.num_vertices())
            .map(|v| {
                let r = dsu.find(v);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn num_components(&self) -> usize {
        self.components_with(None).into_iter().max().map_or(0, |m| m + 1)
    }

    /// First Betti number `n - |V| + (#components)`; `n - |V| + 1` when connected.
    pub fn loop_number(&self) -> usize {
        self.num_edges() + self.num_components() - self.num_vertices()
    }

    /// Canonical key of the labeled graph: sorted vertices and sorted
    /// `(edge id, source, target)` triples. Legs and the name are ignored.
    pub fn canonical_key(&self) -> String {
        let mut vs: Vec<&String> = self.vertices.iter().collect();
        vs.sort();
        let mut es: Vec<String> = self.edges.iter().map(|e| format!("{}:{}>{}", e.id, e.src, e.tgt)).collect();
        es.sort();
        format!(
            "V[{}]E[{}]",
            vs.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","),
            es.join(",")
        )
    }
}

/// Union-find over vertex indices.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Small builders for tests, examples and the corpus.
pub mod builders {
    use super::*;

    pub fn edge(id: &str, src: &str, tgt: &str) -> Edge {
        Edge { id: id.into(), src: src.into(), tgt: tgt.into() }
    }

    pub fn leg(id: &str, vertex: &str, momentum: &str) -> Leg {
        Leg { id: id.into(), vertex: vertex.into(), momentum: momentum.into() }
    }

    pub fn graph(name: &str, vertices: &[&str], edges: Vec<Edge>, legs: Vec<Leg>) -> FeynmanGraph {
        FeynmanGraph::validate(GraphDescription {
            name: name.into(),
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges,
            external: legs,
            theory: default_theory(),
        })
        .expect("builder graph is valid")
    }

    pub fn bubble() -> FeynmanGraph {
        graph(
            "bubble",
            &["v1", "v2"],
            vec![edge("e1", "v1", "v2"), edge("e2", "v1", "v2")],
            vec![leg("p1", "v1", "p"), leg("p2", "v2", "-p")],
        )
    }

    pub fn triangle() -> FeynmanGraph {
        graph(
            "triangle",
            &["v1", "v2", "v3"],
            vec![edge("e1", "v1", "v2"), edge("e2", "v2", "v3"), edge("e3", "v3", "v1")],
            vec![leg("p1", "v1", "p1"), leg("p2", "v2", "p2"), leg("p3", "v3", "p3")],
        )
    }

    /// Two vertices joined by `k` parallel edges.
    pub fn banana(k: usize) -> FeynmanGraph {
        let edges = (1..=k).map(|i| edge(&format!("e{i}"), "v1", "v2")).collect();
        graph(
            &format!("banana-{k}"),
            &["v1", "v2"],
            edges,
            vec![leg("p1", "v1", "p"), leg("p2", "v2", "-p")],
        )
    }

    /// Wheel with three spokes (the complete graph K4).
    pub fn wheel3() -> FeynmanGraph {
        graph(
            "wheel-3",
            &["v0", "v1", "v2", "v3"],
            vec![
                edge("e1", "v0", "v1"),
                edge("e2", "v0", "v2"),
                edge("e3", "v0", "v3"),
                edge("e4", "v1", "v2"),
                edge("e5", "v2", "v3"),
                edge("e6", "v3", "v1"),
            ],
            vec![leg("p1", "v1", "p"), leg("p2", "v2", "-p")],
        )
    }

    /// Bubble with a one-loop self-energy inserted into one propagator.
    pub fn nested_two_loop() -> FeynmanGraph {
        graph(
            "nested-2loop",
            &["v1", "v2", "v3"],
            vec![
                edge("e1", "v1", "v2"),
                edge("e2", "v3", "v2"),
                edge("e3", "v3", "v2"),
                edge("e4", "v1", "v3"),
            ],
            vec![leg("p1", "v1", "p"), leg("p2", "v2", "-p")],
        )
    }

    /// Two bubbles joined by a bridge edge (not 1PI).
    pub fn bridged_bubbles() -> FeynmanGraph {
        graph(
            "bridged-bubbles",
            &["v1", "v2", "v3", "v4"],
            vec![
                edge("e1", "v1", "v2"),
                edge("e2", "v1", "v2"),
                edge("e3", "v2", "v3"),
                edge("e4", "v3", "v4"),
                edge("e5", "v3", "v4"),
            ],
            vec![leg("p1", "v1", "p"), leg("p2", "v4", "-p")],
        )
    }

    /// Box: four-point one-loop graph.
    pub fn box_graph() -> FeynmanGraph {
        graph(
            "box",
            &["v1", "v2", "v3", "v4"],
            vec![
                edge("e1", "v1", "v2"),
                edge("e2", "v2", "v3"),
                edge("e3", "v3", "v4"),
                edge("e4", "v4", "v1"),
            ],
            vec![leg("p1", "v1", "p"), leg("p2", "v3", "-p")],
        )
    }

    /// The curated corpus used by the exact test suites.
    pub fn corpus() -> Vec<FeynmanGraph> {
        vec![
            bubble(),
            triangle(),
            banana(2).with_name("banana-2"),
            banana(3),
            banana(4),
            banana(5),
            wheel3(),
            nested_two_loop(),
            bridged_bubbles(),
            box_graph(),
        ]
    }
}
