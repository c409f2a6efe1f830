use num_traits::Zero;

use super::singular::{find_singular_points, SingularPoint};
use super::slice::{make_slice, restrict, LinearSlice};
use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::graph_poly::psi;
use crate::linalg::{rank, row_space, QMatrix};
use crate::poly::{
    groebner_basis, standard_monomials, MonomialOrder, MultiPoly, PolyIdeal, QuotientDim,
    DEFAULT_STEP_BUDGET,
};
use crate::rational::Q;

/// Cap on the number of products enumerated by `feynman_subspace_dim`.
pub const MAX_H_PRODUCTS: usize = 20_000;

/// Local Milnor number of `f` at an exact point: the dimension of the local
/// Jacobian algebra, or `Infinite` for a non-isolated critical point.
pub fn milnor_number(f: &MultiPoly, point: &[Q]) -> Result<QuotientDim> {
    if point.len() != f.arity() {
        return Err(Error::ArityMismatch { left: f.arity(), right: point.len() });
    }
    let grads = f.gradient();
    if grads.iter().any(|d| !d.eval(point).is_zero()) {
        return Err(Error::NotSingular);
    }
    let local: Vec<MultiPoly> = grads.iter().map(|d| d.translate(point)).collect();
    let ideal = PolyIdeal::new(local, MonomialOrder::LocalDegLex)?;
    ideal.quotient_dimension()
}

/// Global Gröbner count of `J(f) + m^n` at the point (`m` its maximal
/// ideal). Agrees with the Milnor number once `n` exceeds it.
pub fn milnor_number_truncated(f: &MultiPoly, point: &[Q], n: u32) -> Result<usize> {
    let basis = truncated_jacobian_basis(f, point, n)?;
    let leads: Vec<Vec<u32>> = basis.iter().filter_map(|b| b.leading_exps(MonomialOrder::Grlex)).collect();
    Ok(standard_monomials(&leads, f.arity()).map_or(0, |s| s.len()))
}

fn truncated_jacobian_basis(f: &MultiPoly, point: &[Q], n: u32) -> Result<Vec<MultiPoly>> {
    let k = f.arity();
    let mut gens: Vec<MultiPoly> = f.gradient().iter().map(|d| d.translate(point)).collect();
    gens.extend(monomials_of_degree(k, n).into_iter().map(|e| MultiPoly::monomial(e, Q::from_integer(1.into()))));
    groebner_basis(&gens, MonomialOrder::Grlex, DEFAULT_STEP_BUDGET)
}

fn monomials_of_degree(k: usize, d: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in monomials_of_degree(k - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointMilnor {
    pub point: SingularPoint,
    /// `None` for numeric points, which are never fed to the local algebra.
    pub milnor_mu: Option<QuotientDim>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilnorReport {
    pub restricted: MultiPoly,
    pub points: Vec<PointMilnor>,
    /// Dimension of the global Jacobian algebra `Q[u]/J(f)`.
    pub total: QuotientDim,
    pub transversal: bool,
}

/// Restrict `p` to the slice, locate critical points and compute their
/// Milnor numbers. Transversality means a zero-dimensional Jacobian ideal
/// whose total dimension is unchanged on a re-randomized slice.
pub fn milnor_report(p: &MultiPoly, slice: &LinearSlice) -> Result<MilnorReport> {
    let f = restrict(p, slice)?;
    let points = find_singular_points(&f)?;
    let per_point = points
        .into_iter()
        .map(|pt| {
            let mu = match pt.exact() {
                Some(x) => Some(milnor_number(&f, x)?),
                None => None,
            };
            Ok(PointMilnor { point: pt, milnor_mu: mu })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = global_jacobian_dim(&f)?;
    let reroll_seed = slice.seed().map_or(1, |s| s.wrapping_add(1));
    let other = make_slice(slice.ambient(), slice.dim(), reroll_seed)?;
    let other_total = global_jacobian_dim(&restrict(p, &other)?)?;
    let transversal = matches!(total, QuotientDim::Finite(_)) && total == other_total;
    Ok(MilnorReport { restricted: f, points: per_point, total, transversal })
}

pub fn global_jacobian_dim(f: &MultiPoly) -> Result<QuotientDim> {
    let grads: Vec<MultiPoly> = f.gradient().into_iter().filter(|g| !g.is_zero()).collect();
    if grads.is_empty() {
        return Ok(QuotientDim::Infinite);
    }
    PolyIdeal::new(grads, MonomialOrder::Grlex)?.quotient_dimension()
}

/// Dimension of the span of the classes of `hs` in the local Jacobian
/// algebra of `f` at `point`, with the surviving standard monomials.
pub fn local_span_dimension(f: &MultiPoly, point: &[Q], hs: &[MultiPoly]) -> Result<(usize, Vec<Vec<u32>>)> {
    let mu = milnor_number(f, point)?.finite().ok_or(Error::PositiveDimensional)?;
    // m^(mu+1) lies in the local Jacobian ideal, so the truncated global
    // quotient is the local algebra
    let basis = truncated_jacobian_basis(f, point, mu as u32 + 1)?;
    let leads: Vec<Vec<u32>> = basis.iter().filter_map(|b| b.leading_exps(MonomialOrder::Grlex)).collect();
    let staircase = standard_monomials(&leads, f.arity()).unwrap_or_default();
    let ideal = PolyIdeal { generators: basis, order: MonomialOrder::Grlex };
    let rows: QMatrix = hs
        .iter()
        .map(|h| {
            let nf = ideal.normal_form(&h.translate(point));
            staircase.iter().map(|e| nf.coeff(e)).collect()
        })
        .collect();
    if rows.is_empty() || staircase.is_empty() {
        return Ok((0, Vec::new()));
    }
    let r = rank(&rows);
    let echelon = row_space(&rows);
    let pivots: Vec<Vec<u32>> = echelon
        .iter()
        .filter_map(|row| row.iter().position(|c| !c.is_zero()).map(|i| staircase[i].clone()))
        .collect();
    Ok((r, pivots))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanSubspace {
    pub dimension: u32,
    /// `-k + D l / 2`, the number of `L_T` factors in each product.
    pub exponent: u32,
    pub products: usize,
    pub dim: usize,
    /// Standard monomials (in slice coordinates around the point) that
    /// carry the surviving classes.
    pub certificates: Vec<Vec<u32>>,
}

/// `L_T(t) = sum of t_e over the tree path from v1 to v2` (with `p^2 = 1`).
pub fn tree_path_form(g: &FeynmanGraph, tree: &[usize], v1: usize, v2: usize) -> MultiPoly {
    let n = g.num_edges();
    let mut l = MultiPoly::zero(n);
    for (e, _) in g.tree_path(tree, v1, v2) {
        l = &l + &MultiPoly::var(n, e);
    }
    l
}

/// The vertices of the two external legs of a two-point graph.
pub fn two_leg_vertices(g: &FeynmanGraph) -> Result<(usize, usize)> {
    let vs: Vec<usize> = g
        .legs()
        .iter()
        .filter(|l| l.signed_label().1 != "0")
        .map(|l| g.vertex_index(&l.vertex).expect("leg vertex exists"))
        .collect();
    match vs.as_slice() {
        [a, b] if a != b => Ok((*a, *b)),
        _ => Err(Error::BadLegConfiguration("need two legs on distinct vertices".into())),
    }
}

/// For each `D`, the dimension of the span of all products
/// `prod_i L_{T_i} prod_{e not in T_i} t_e` (`-k + D l/2` factors) in the
/// local Jacobian algebra of `Psi` restricted to the slice, at its first
/// exact critical point.
pub fn feynman_subspace_dim(g: &FeynmanGraph, slice: &LinearSlice, dims: &[u32]) -> Result<Vec<FeynmanSubspace>> {
    let k = slice.dim() as i64;
    let l = g.loop_number() as i64;
    let f = restrict(&psi(g), slice)?;
    let point = find_singular_points(&f)?
        .into_iter()
        .find_map(|p| p.exact().map(|x| x.to_vec()))
        .ok_or_else(|| Error::Precondition("the slice has no exact singular point".into()))?;
    let (v1, v2) = two_leg_vertices(g)?;
    let trees = g.spanning_trees()?;
    let n = g.num_edges();
    let terms: Vec<MultiPoly> = trees
        .iter()
        .map(|t| {
            let mut e = vec![1u32; n];
            for &i in t {
                e[i] = 0;
            }
            &tree_path_form(g, t, v1, v2) * &MultiPoly::monomial(e, Q::from_integer(1.into()))
        })
        .collect();
    let mut out = Vec::new();
    for &d in dims {
        if (d as i64 * l) % 2 != 0 {
            return Err(Error::RegimeViolation(format!("D l / 2 is not an integer for D = {d}")));
        }
        let e = -k + d as i64 * l / 2;
        if e < 0 {
            return Err(Error::RegimeViolation(format!("k - D l/2 = {} > 0 for D = {d}", -e)));
        }
        let products = multiset_products(&terms, e as usize, n)?;
        let restricted = products.iter().map(|h| restrict(h, slice)).collect::<Result<Vec<_>>>()?;
        let (dim, certificates) = local_span_dimension(&f, &point, &restricted)?;
        out.push(FeynmanSubspace { dimension: d, exponent: e as u32, products: products.len(), dim, certificates });
    }
    Ok(out)
}

/// All products of `r` factors chosen with repetition from `terms`.
fn multiset_products(terms: &[MultiPoly], r: usize, arity: usize) -> Result<Vec<MultiPoly>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; r];
    if r == 0 {
        return Ok(vec![MultiPoly::one(arity)]);
    }
    if terms.is_empty() {
        return Ok(out);
    }
    loop {
        let mut p = MultiPoly::one(arity);
        for &i in &idx {
            p = &p * &terms[i];
        }
        out.push(p);
        if out.len() > MAX_H_PRODUCTS {
            return Err(Error::TooLarge { cap: MAX_H_PRODUCTS });
        }
        // next nondecreasing index tuple
        let mut pos = r;
        while pos > 0 && idx[pos - 1] == terms.len() - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return Ok(out);
        }
        idx[pos - 1] += 1;
        let v = idx[pos - 1];
        for slot in idx.iter_mut().skip(pos) {
            *slot = v;
        }
    }
}
