use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::linalg::QMatrix;
use crate::rational::{q, Q};

/// How external momenta enter `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MomentumMode {
    /// Exactly two legs carry `+p` and `-p`. With `p2 = None` the square
    /// `p^2` is an extra polynomial variable placed after the edge variables.
    TwoLeg { p2: Option<Q> },
    /// Gram matrix of the labelled external momenta.
    Gram { labels: Vec<String>, gram: QMatrix },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentumData {
    pub mode: MomentumMode,
    pub mass2: Q,
}

impl MomentumData {
    pub fn two_leg_symbolic() -> Self {
        Self { mode: MomentumMode::TwoLeg { p2: None }, mass2: Q::zero() }
    }

    pub fn two_leg(p2: Q) -> Self {
        Self { mode: MomentumMode::TwoLeg { p2: Some(p2) }, mass2: Q::zero() }
    }

    pub fn gram(labels: Vec<String>, gram: QMatrix) -> Result<Self> {
        let k = labels.len();
        if gram.len() != k || gram.iter().any(|r| r.len() != k) {
            return Err(Error::Parse(format!("Gram matrix must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Parse("Gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { mode: MomentumMode::Gram { labels, gram }, mass2: Q::zero() })
    }

    pub fn with_mass2(mut self, m2: Q) -> Self {
        self.mass2 = m2;
        self
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.mode, MomentumMode::TwoLeg { p2: None })
    }

    /// Arity of `P` for a graph with `n` edges.
    pub fn poly_arity(&self, n: usize) -> usize {
        if self.is_symbolic() {
            n + 1
        } else {
            n
        }
    }
}

/// Per-vertex incoming momentum `P_v` as a coefficient vector over the
/// momentum labels, together with the Gram matrix (`None`: symbolic `p^2`).
#[derive(Clone, Debug)]
pub(crate) struct VertexMomenta {
    pub per_vertex: Vec<Vec<Q>>,
    pub gram: Option<QMatrix>,
}

impl VertexMomenta {
    pub fn resolve(g: &FeynmanGraph, mom: &MomentumData) -> Result<Self> {
        let nv = g.num_vertices();
        match &mom.mode {
            MomentumMode::TwoLeg { p2 } => {
                let live: Vec<_> = g.legs().iter().filter(|l| l.signed_label().1 != "0").collect();
                if live.len() != 2 {
                    return Err(Error::BadLegConfiguration(format!(
                        "two-leg mode needs exactly two legs with momentum, found {}",
                        live.len()
                    )));
                }
                let (s0, l0) = live[0].signed_label();
                let (s1, l1) = live[1].signed_label();
                if l0 != l1 {
                    return Err(Error::BadLegConfiguration(format!("legs carry `{l0}` and `{l1}`, expected ±p")));
                }
                if s0 + s1 != 0 {
                    return Err(Error::MomentumNotConserved(format!("both legs carry {}{l0}", sign_str(s0))));
                }
                let mut per_vertex = vec![vec![Q::zero()]; nv];
                for (l, s) in [(live[0], s0), (live[1], s1)] {
                    let v = g.vertex_index(&l.vertex).expect("validated leg");
                    per_vertex[v][0] += q(s as i64);
                }
                let gram = p2.as_ref().map(|x| vec![vec![x.clone()]]);
                Ok(Self { per_vertex, gram })
            }
            MomentumMode::Gram { labels, gram } => {
                let k = labels.len();
                let mut per_vertex = vec![vec![Q::zero(); k]; nv];
                let mut total = vec![Q::zero(); k];
                for l in g.legs() {
                    let (s, label) = l.signed_label();
                    if label == "0" {
                        continue;
                    }
                    let j = labels.iter().position(|x| x == label).ok_or_else(|| {
                        Error::BadLegConfiguration(format!("leg `{}` momentum `{label}` not in Gram labels", l.id))
                    })?;
                    let v = g.vertex_index(&l.vertex).expect("validated leg");
                    per_vertex[v][j] += q(s as i64);
                    total[j] += q(s as i64);
                }
                // sum of all momenta must be a null vector of the Gram form
                for row in gram {
                    let x: Q = row.iter().zip(&total).map(|(a, b)| a * b).sum();
                    if !x.is_zero() {
                        return Err(Error::MomentumNotConserved("sum of external momenta is nonzero".into()));
                    }
                }
                Ok(Self { per_vertex, gram: Some(gram.clone()) })
            }
        }
    }

    /// Coefficient vector of the momentum flowing into a vertex set.
    pub fn side_vector(&self, side: &[usize]) -> Vec<Q> {
        let k = self.per_vertex.first().map_or(0, |v| v.len());
        let mut c = vec![Q::zero(); k];
        for &v in side {
            for (a, b) in c.iter_mut().zip(&self.per_vertex[v]) {
                *a += b;
            }
        }
        c
    }

    /// `a^T G b`, or the coefficient of the symbolic `p^2`.
    pub fn pairing(&self, a: &[Q], b: &[Q]) -> Q {
        match &self.gram {
            Some(gm) => {
                let mut s = Q::zero();
                for (i, ai) in a.iter().enumerate() {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate() {
                        s += ai * &gm[i][j] * bj;
                    }
                }
                s
            }
            None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }
}

fn sign_str(s: i32) -> &'static str {
    if s < 0 {
        "-"
    } else {
        "+"
    }
}
