use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::graph_poly::psi;
use crate::linalg::{kernel, row_space, QMatrix};
use crate::poly::{groebner_basis, MonomialOrder, DEFAULT_STEP_BUDGET};
use crate::rational::{fmt_q, Q};

/// A linear subspace of `Q^n`, stored as its RREF row basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    arity: usize,
    basis: QMatrix,
}

impl Atom {
    /// Span of the given rows (dependent rows are fine).
    pub fn span(arity: usize, rows: QMatrix) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != arity) {
            return Err(Error::ArityMismatch { left: arity, right: r.len() });
        }
        Ok(Self { arity, basis: row_space(&rows) })
    }

    pub fn full(arity: usize) -> Self {
        Self { arity, basis: crate::linalg::identity(arity) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    /// The atom with coordinates permuted into edge-id order, so that equal
    /// labeled graphs with different edge orders share keys.
    pub fn key_in_id_order(&self, g: &FeynmanGraph) -> String {
        let mut order: Vec<usize> = (0..g.num_edges()).collect();
        order.sort_by(|&a, &b| g.edges()[a].id.cmp(&g.edges()[b].id));
        let rows: QMatrix = self.basis.iter().map(|r| order.iter().map(|&i| r[i].clone()).collect()).collect();
        let canon = row_space(&rows);
        canon
            .iter()
            .map(|r| r.iter().map(fmt_q).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.basis.iter().map(|r| format!("({})", r.iter().map(fmt_q).collect::<Vec<_>>().join(","))).collect();
        write!(f, "span{}", rows.join(""))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Finite weighted sum of subspace atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceDecoration {
    atoms: Vec<(Q, Atom)>,
}

impl SliceDecoration {
    pub fn new(atoms: Vec<(Q, Atom)>) -> Self {
        Self { atoms }
    }

    pub fn delta(atom: Atom) -> Self {
        Self { atoms: vec![(Q::one(), atom)] }
    }

    pub fn atoms(&self) -> &[(Q, Atom)] {
        &self.atoms
    }
}

/// `Pi cap {t_e = 0 for e not in edges}`, written in the coordinates `edges`.
pub fn restrict_to_coordinates(a: &Atom, edges: &[usize]) -> Atom {
    let outside: Vec<usize> = (0..a.arity).filter(|i| !edges.contains(i)).collect();
    let k = a.dim();
    // combinations c with (c B)[outside] = 0
    let cols: QMatrix = outside.iter().map(|&j| (0..k).map(|r| a.basis[r][j].clone()).collect()).collect();
    let combos = if outside.is_empty() {
        crate::linalg::identity(k)
    } else {
        kernel(&cols, k)
    };
    let rows: QMatrix = combos
        .iter()
        .map(|c| {
            edges
                .iter()
                .map(|&j| (0..k).fold(Q::zero(), |acc, r| acc + &c[r] * &a.basis[r][j]))
                .collect()
        })
        .collect();
    Atom { arity: edges.len(), basis: row_space(&rows) }
}

/// `n - dim V(d_1 Psi, ..., d_n Psi)` (affine dimension), or `n` when the
/// Jacobian ideal is the unit ideal or cuts out only the origin.
pub fn codim_singular_locus(g: &FeynmanGraph) -> Result<usize> {
    let n = g.num_edges();
    let p = psi(g);
    let grads: Vec<_> = p.gradient().into_iter().filter(|d| !d.is_zero()).collect();
    if grads.is_empty() {
        return Ok(0);
    }
    let basis = groebner_basis(&grads, MonomialOrder::Grlex, DEFAULT_STEP_BUDGET)?;
    let leads: Vec<Vec<u32>> = basis.iter().filter_map(|b| b.leading_exps(MonomialOrder::Grlex)).collect();
    if leads.iter().any(|e| e.iter().all(|&k| k == 0)) {
        return Ok(n);
    }
    Ok(n - monomial_ideal_dimension(&leads, n))
}

/// Krull dimension of `Q[x]/(monomials)`: the largest coordinate set that
/// supports no generator.
pub fn monomial_ideal_dimension(leads: &[Vec<u32>], n: usize) -> usize {
    let supports: Vec<u64> =
        leads.iter().map(|e| e.iter().enumerate().filter(|(_, &k)| k > 0).fold(0u64, |m, (i, _)| m | 1 << i)).collect();
    let mut best = 0;
    for s in 0u64..(1u64 << n) {
        let size = s.count_ones() as usize;
        if size > best && supports.iter().all(|&sup| sup & !s != 0) {
            best = size;
        }
    }
    best
}
