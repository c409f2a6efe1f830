use super::model::{Dsu, FeynmanGraph};
use crate::error::{Error, Result};
use crate::linalg::{rank, QMatrix};
use crate::poly::det_rational;
use crate::rational::q;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// A cut set: the removed edges plus the vertex bipartition left behind.
/// `side_a` always contains the first declared vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    pub edges: Vec<usize>,
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl FeynmanGraph {
    /// |V| x n incidence matrix: +1 at the target, -1 at the source.
    pub fn incidence_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.num_edges()]; self.num_vertices()];
        for i in 0..self.num_edges() {
            let (s, t) = self.endpoints(i);
            m[t][i] += 1;
            m[s][i] -= 1;
        }
        m
    }

    /// Lexicographically first spanning tree (greedy over edge order).
    /// For a disconnected graph this is a spanning forest.
    pub fn canonical_tree(&self) -> Vec<usize> {
        let mut dsu = Dsu::new(self.num_vertices());
        (0..self.num_edges())
            .filter(|&i| {
                let (s, t) = self.endpoints(i);
                dsu.union(s, t)
            })
            .collect()
    }

    /// n x l circuit matrix over the fundamental cycles of the canonical tree.
    ///
    /// The cycle of chord `e` runs along the tree path from `src(e)` to
    /// `tgt(e)` and closes through `e` backwards, so the chord entry is -1.
    pub fn circuit_matrix(&self) -> Vec<Vec<i64>> {
        let tree = self.canonical_tree();
        let mut in_tree = vec![false; self.num_edges()];
        for &i in &tree {
            in_tree[i] = true;
        }
        let chords: Vec<usize> = (0..self.num_edges()).filter(|&i| !in_tree[i]).collect();
        let mut eta = vec![vec![0i64; chords.len()]; self.num_edges()];
        for (k, &c) in chords.iter().enumerate() {
            let (s, t) = self.endpoints(c);
            for (edge, sign) in self.tree_path(&tree, s, t) {
                eta[edge][k] += sign;
            }
            eta[c][k] -= 1;
        }
        eta
    }

    /// Oriented path in the tree from `from` to `to` as (edge, ±1) steps.
    pub fn tree_path(&self, tree: &[usize], from: usize, to: usize) -> Vec<(usize, i64)> {
        let nv = self.num_vertices();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for &e in tree {
            let (s, t) = self.endpoints(e);
            adj[s].push((t, e));
            adj[t].push((s, e));
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, e));
                    stack.push(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let (u, e) = prev[v].expect("tree spans both endpoints");
            let (s, _) = self.endpoints(e);
            // stepping u -> v along e
            path.push((e, if s == u { 1 } else { -1 }));
            v = u;
        }
        path.reverse();
        path
    }

    pub fn spanning_trees(&self) -> Result<Vec<Vec<usize>>> {
        self.spanning_trees_capped(DEFAULT_ENUMERATION_CAP)
    }

    /// All spanning trees as sorted edge-index lists in lexicographic order.
    pub fn spanning_trees_capped(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let need = self.num_vertices() - 1;
        let mut chosen = Vec::with_capacity(need);
        self.tree_rec(0, need, &Dsu::new(self.num_vertices()), &mut chosen, &mut out, cap)?;
        Ok(out)
    }

    fn tree_rec(
        &self,
        next: usize,
        need: usize,
        dsu: &Dsu,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if chosen.len() == need {
            if out.len() >= cap {
                return Err(Error::TooLarge { cap });
            }
            out.push(chosen.clone());
            return Ok(());
        }
        if self.num_edges() - next < need - chosen.len() {
            return Ok(());
        }
        let (s, t) = self.endpoints(next);
        let mut with = dsu.clone();
        if with.union(s, t) {
            chosen.push(next);
            self.tree_rec(next + 1, need, &with, chosen, out, cap)?;
            chosen.pop();
        }
        self.tree_rec(next + 1, need, dsu, chosen, out, cap)
    }

    /// Number of spanning trees by the matrix-tree theorem (reduced Laplacian).
    pub fn matrix_tree_count(&self) -> u64 {
        let nv = self.num_vertices();
        if nv == 1 {
            return 1;
        }
        let mut lap: QMatrix = vec![vec![q(0); nv]; nv];
        for i in 0..self.num_edges() {
            let (s, t) = self.endpoints(i);
            if s == t {
                continue;
            }
            lap[s][s] += q(1);
            lap[t][t] += q(1);
            lap[s][t] -= q(1);
            lap[t][s] -= q(1);
        }
        let reduced: QMatrix = lap[1..].iter().map(|r| r[1..].to_vec()).collect();
        let d = det_rational(&reduced);
        d.to_integer().try_into().expect("tree count fits in u64")
    }

    pub fn cut_sets(&self) -> Result<Vec<CutSet>> {
        self.cut_sets_capped(DEFAULT_ENUMERATION_CAP)
    }

    /// All (l+1)-edge sets whose removal leaves exactly two components, in
    /// lexicographic order of edge indices.
    pub fn cut_sets_capped(&self, cap: usize) -> Result<Vec<CutSet>> {
        let n = self.num_edges();
        let size = self.loop_number() + 1;
        let mut out = Vec::new();
        if size > n {
            return Ok(out);
        }
        for comb in Combinations::new(n, size) {
            let mut keep = vec![true; n];
            for &i in &comb {
                keep[i] = false;
            }
            let comp = self.components_with(Some(&keep));
            if comp.iter().any(|&c| c > 1) || !comp.iter().any(|&c| c == 1) {
                continue;
            }
            if out.len() >= cap {
                return Err(Error::TooLarge { cap });
            }
            let side_a = (0..comp.len()).filter(|&v| comp[v] == 0).collect();
            let side_b = (0..comp.len()).filter(|&v| comp[v] == 1).collect();
            out.push(CutSet { edges: comb, side_a, side_b });
        }
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    pub fn is_bridge(&self, e: usize) -> bool {
        let mut keep = vec![true; self.num_edges()];
        keep[e] = false;
        let before = self.num_components();
        let after = self.components_with(Some(&keep)).into_iter().max().map_or(0, |m| m + 1);
        after > before
    }

    /// Connected and without bridges.
    pub fn is_one_pi(&self) -> bool {
        self.is_connected() && (0..self.num_edges()).all(|e| !self.is_bridge(e))
    }

    /// Rank of the incidence matrix, used as an independent loop-number check.
    pub fn incidence_rank(&self) -> usize {
        let m: QMatrix = self
            .incidence_matrix()
            .into_iter()
            .map(|r| r.into_iter().map(q).collect())
            .collect();
        rank(&m)
    }
}

/// k-subsets of 0..n in lexicographic order.
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, cur: if k <= n { Some((0..k).collect()) } else { None } }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let k = cur.len();
        let mut nxt = cur.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if nxt[i] < self.n - k + i {
                nxt[i] += 1;
                for j in i + 1..k {
                    nxt[j] = nxt[j - 1] + 1;
                }
                self.cur = Some(nxt);
                return Some(cur);
            }
        }
        Some(cur)
    }
}
