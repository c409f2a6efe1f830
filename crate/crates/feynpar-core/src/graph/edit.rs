use std::collections::BTreeMap;
use std::fmt::Debug;

use super::model::{Dsu, Edge, FeynmanGraph, GraphDescription};
use crate::error::{Error, Result};

/// Subset of a parent's internal edges, stored as sorted edge indices.
/// Induced vertices are always recomputed from the parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgraph {
    edges: Vec<usize>,
}

impl Subgraph {
    pub fn empty() -> Self {
        Self { edges: Vec::new() }
    }

    pub fn from_indices(g: &FeynmanGraph, mut edges: Vec<usize>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if let Some(&bad) = edges.iter().find(|&&i| i >= g.num_edges()) {
            return Err(Error::NotASubgraph(format!("edge index {bad} out of range")));
        }
        Ok(Self { edges })
    }

    pub fn from_ids(g: &FeynmanGraph, ids: &[&str]) -> Result<Self> {
        let idx = ids
            .iter()
            .map(|id| g.edge_index(id).ok_or_else(|| Error::NotASubgraph(format!("no internal edge `{id}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(g, idx)
    }

    pub fn edge_indices(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_ids<'a>(&self, g: &'a FeynmanGraph) -> Vec<&'a str> {
        self.edges.iter().map(|&i| g.edges()[i].id.as_str()).collect()
    }

    /// Vertices touched by the subgraph's edges, in parent order.
    pub fn vertices(&self, g: &FeynmanGraph) -> Vec<usize> {
        let mut touched = vec![false; g.num_vertices()];
        for &i in &self.edges {
            let (s, t) = g.endpoints(i);
            touched[s] = true;
            touched[t] = true;
        }
        (0..g.num_vertices()).filter(|&v| touched[v]).collect()
    }

    /// Split into connected components, ordered by smallest edge index.
    pub fn components(&self, g: &FeynmanGraph) -> Vec<Subgraph> {
        let mut dsu = Dsu::new(g.num_vertices());
        for &i in &self.edges {
            let (s, t) = g.endpoints(i);
            dsu.union(s, t);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &i in &self.edges {
            let (s, _) = g.endpoints(i);
            groups.entry(dsu.find(s)).or_default().push(i);
        }
        let mut comps: Vec<Subgraph> = groups.into_values().map(|edges| Subgraph { edges }).collect();
        comps.sort();
        comps
    }

    /// Standalone graph on the subgraph's edges and touched vertices, without legs.
    pub fn to_graph(&self, g: &FeynmanGraph) -> FeynmanGraph {
        let vertices = self.vertices(g).into_iter().map(|v| g.vertices()[v].clone()).collect();
        let edges = self.edges.iter().map(|&i| g.edges()[i].clone()).collect();
        let name = format!("{}[{}]", g.name(), self.edge_ids(g).join(","));
        FeynmanGraph::build(GraphDescription {
            name,
            vertices,
            edges,
            external: Vec::new(),
            theory: g.theory().clone(),
        })
        .expect("subgraph of a valid graph is well formed")
    }
}

/// Graph edits: edge deletion and contraction of a subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphEdit {
    Delete(String),
    Contract(Vec<String>),
}

impl FeynmanGraph {
    pub fn edit(&self, action: &GraphEdit) -> Result<FeynmanGraph> {
        match action {
            GraphEdit::Delete(id) => self.delete_edge(id),
            GraphEdit::Contract(ids) => {
                let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
                let sub = Subgraph::from_ids(self, &refs)?;
                Ok(self.contract(&sub))
            }
        }
    }

    /// Remove edge `id`, keeping both endpoints. The result may be disconnected.
    pub fn delete_edge(&self, id: &str) -> Result<FeynmanGraph> {
        let i = self.edge_index(id).ok_or_else(|| Error::UnknownEdge(id.to_string()))?;
        Ok(self.delete_index(i))
    }

    pub fn delete_index(&self, i: usize) -> FeynmanGraph {
        let mut d = self.description();
        d.edges.remove(i);
        d.name = format!("{}-{}", self.name(), self.edges()[i].id);
        FeynmanGraph::build(d).expect("deletion keeps ids valid")
    }

    /// Quotient by a subgraph: each component collapses to its smallest
    /// vertex id and its edges disappear; other edges and legs are reattached.
    pub fn contract(&self, sub: &Subgraph) -> FeynmanGraph {
        let mut rep: Vec<usize> = (0..self.num_vertices()).collect();
        for comp in sub.components(self) {
            let vs = comp.vertices(self);
            let target = *vs.iter().min_by_key(|&&v| &self.vertices()[v]).expect("component has vertices");
            for v in vs {
                rep[v] = target;
            }
        }
        let mut in_sub = vec![false; self.num_edges()];
        for &i in sub.edge_indices() {
            in_sub[i] = true;
        }
        let name_of = |v: usize| self.vertices()[rep[v]].clone();
        let vertices = (0..self.num_vertices()).filter(|&v| rep[v] == v).map(|v| self.vertices()[v].clone()).collect();
        let edges = (0..self.num_edges())
            .filter(|&i| !in_sub[i])
            .map(|i| {
                let (s, t) = self.endpoints(i);
                Edge { id: self.edges()[i].id.clone(), src: name_of(s), tgt: name_of(t) }
            })
            .collect();
        let external = self
            .legs()
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.vertex = name_of(self.vertex_index(&l.vertex).expect("leg vertex exists"));
                l
            })
            .collect();
        let name = if sub.is_empty() {
            self.name().to_string()
        } else {
            format!("{}/[{}]", self.name(), sub.edge_ids(self).join(","))
        };
        FeynmanGraph::build(GraphDescription { name, vertices, edges, external, theory: self.theory().clone() })
            .expect("contraction keeps ids valid")
    }

    /// Proper non-empty subgraphs whose every connected component satisfies
    /// `rule`, ordered by size and then lexicographically.
    pub fn divergent_subgraphs(&self, rule: &dyn DivergencePredicate) -> Result<Vec<Subgraph>> {
        let n = self.num_edges();
        if n > MAX_SUBGRAPH_EDGES {
            return Err(Error::TooLarge { cap: 1 << MAX_SUBGRAPH_EDGES });
        }
        let mut out = Vec::new();
        for mask in 1u32..(1u32 << n) - 1 {
            let sub = Subgraph { edges: (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
            if subgraph_satisfies(self, &sub, rule) {
                out.push(sub);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }
}

pub const MAX_SUBGRAPH_EDGES: usize = 20;

/// True when every component of `sub` passes the rule.
pub fn subgraph_satisfies(g: &FeynmanGraph, sub: &Subgraph, rule: &dyn DivergencePredicate) -> bool {
    !sub.is_empty() && sub.components(g).iter().all(|c| rule.component_divergent(&c.to_graph(g)))
}

/// Which connected subgraphs count as divergent.
pub trait DivergencePredicate: Debug + Send + Sync {
    fn name(&self) -> String;
    fn component_divergent(&self, component: &FeynmanGraph) -> bool;
}

/// 1PI with at least one loop and `D l - 2 n >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerCounting {
    pub dimension: i64,
}

impl PowerCounting {
    pub fn superficial_degree(&self, g: &FeynmanGraph) -> i64 {
        self.dimension * g.loop_number() as i64 - 2 * g.num_edges() as i64
    }
}

impl DivergencePredicate for PowerCounting {
    fn name(&self) -> String {
        format!("power-counting(D={})", self.dimension)
    }

    fn component_divergent(&self, c: &FeynmanGraph) -> bool {
        c.loop_number() >= 1 && c.is_one_pi() && self.superficial_degree(c) >= 0
    }
}

/// Every 1PI component with at least one loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AllOnePi;

impl DivergencePredicate for AllOnePi {
    fn name(&self) -> String {
        "all-1pi".into()
    }

    fn component_divergent(&self, c: &FeynmanGraph) -> bool {
        c.loop_number() >= 1 && c.is_one_pi()
    }
}
