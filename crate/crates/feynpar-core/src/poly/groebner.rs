use std::collections::BTreeSet;

use super::division::reduce;
use super::local::{mora_normal_form, standard_basis};
use super::order::{degree, divides, lcm, sub_exps, MonomialOrder};
use super::MultiPoly;
use crate::error::{Error, Result};

/// Generators of an ideal together with the monomial order it is read in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyIdeal {
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientDim {
    Finite(usize),
    Infinite,
}

impl QuotientDim {
    pub fn finite(&self) -> Option<usize> {
        match self {
            QuotientDim::Finite(d) => Some(*d),
            QuotientDim::Infinite => None,
        }
    }
}

pub const DEFAULT_STEP_BUDGET: usize = 20_000;
pub const MAX_ARITY: usize = 4;

impl PolyIdeal {
    pub fn new(generators: Vec<MultiPoly>, order: MonomialOrder) -> Result<Self> {
        if let Some(first) = generators.first() {
            for g in &generators {
                if g.arity() != first.arity() {
                    return Err(Error::ArityMismatch { left: first.arity(), right: g.arity() });
                }
            }
        }
        Ok(Self { generators, order })
    }

    pub fn arity(&self) -> usize {
        self.generators.first().map_or(0, |g| g.arity())
    }

    /// Reduced Gröbner basis (global orders) or standard basis (local order).
    pub fn basis(&self) -> Result<PolyIdeal> {
        self.basis_with_budget(DEFAULT_STEP_BUDGET)
    }

    pub fn basis_with_budget(&self, budget: usize) -> Result<PolyIdeal> {
        if self.arity() > MAX_ARITY {
            return Err(Error::Precondition(format!(
                "Gröbner computations are capped at {MAX_ARITY} variables, got {}",
                self.arity()
            )));
        }
        let generators = if self.order.is_local() {
            standard_basis(&self.generators, self.order, budget)?
        } else {
            groebner_basis(&self.generators, self.order, budget)?
        };
        Ok(PolyIdeal { generators, order: self.order })
    }

    /// Dimension of the quotient (global ring, or local ring at the origin).
    pub fn quotient_dimension(&self) -> Result<QuotientDim> {
        let b = self.basis()?;
        let leads: Vec<Vec<u32>> = b.generators.iter().filter_map(|g| g.leading_exps(b.order)).collect();
        Ok(count_standard_monomials(&leads, self.arity()))
    }

    /// Normal form of `f` modulo this ideal's (already computed) basis.
    pub fn normal_form(&self, f: &MultiPoly) -> MultiPoly {
        if self.order.is_local() {
            mora_normal_form(f, &self.generators, self.order)
        } else {
            reduce(f, &self.generators, self.order)
        }
    }
}

/// Count monomials outside the monomial ideal generated by `leads`.
pub fn count_standard_monomials(leads: &[Vec<u32>], arity: usize) -> QuotientDim {
    match standard_monomials(leads, arity) {
        Some(v) => QuotientDim::Finite(v.len()),
        None => QuotientDim::Infinite,
    }
}

/// The staircase itself, or `None` when it is unbounded.
pub fn standard_monomials(leads: &[Vec<u32>], arity: usize) -> Option<Vec<Vec<u32>>> {
    if leads.iter().any(|e| e.iter().all(|&k| k == 0)) {
        return Some(Vec::new());
    }
    let mut bounds = vec![0u32; arity];
    for i in 0..arity {
        let pure = leads
            .iter()
            .filter(|e| e.iter().enumerate().all(|(j, &k)| j == i || k == 0))
            .map(|e| e[i])
            .min()?;
        bounds[i] = pure;
    }
    let mut out = Vec::new();
    let mut e = vec![0u32; arity];
    loop {
        if !leads.iter().any(|l| divides(l, &e)) {
            out.push(e.clone());
        }
        let mut i = 0;
        loop {
            if i == arity {
                out.sort_by(|a, b| super::order::grlex_cmp(a, b));
                return Some(out);
            }
            e[i] += 1;
            if e[i] < bounds[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

pub fn s_polynomial(f: &MultiPoly, g: &MultiPoly, order: MonomialOrder) -> MultiPoly {
    let (lf, cf) = f.leading(order).map(|(e, c)| (e.clone(), c.clone())).unwrap();
    let (lg, cg) = g.leading(order).map(|(e, c)| (e.clone(), c.clone())).unwrap();
    let l = lcm(&lf, &lg);
    let a = f.mul_monomial(&sub_exps(&l, &lf), &cg);
    let b = g.mul_monomial(&sub_exps(&l, &lg), &cf);
    &a - &b
}

/// Buchberger's algorithm with the product and chain criteria, followed by
/// interreduction to the unique reduced basis.
pub fn groebner_basis(gens: &[MultiPoly], order: MonomialOrder, budget: usize) -> Result<Vec<MultiPoly>> {
    let mut basis: Vec<MultiPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.make_monic(order)).collect();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let lead = |p: &MultiPoly| p.leading_exps(order).unwrap();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((degree(&lcm(&lead(&basis[i]), &lead(&basis[j]))), i, j));
        }
    }
    let mut steps = 0usize;
    while let Some(&(d, i, j)) = pairs.iter().next() {
        pairs.remove(&(d, i, j));
        steps += 1;
        if steps > budget {
            return Err(Error::Timeout { steps, partial: basis });
        }
        let (li, lj) = (lead(&basis[i]), lead(&basis[j]));
        let l = lcm(&li, &lj);
        // product criterion: coprime leading monomials reduce to zero
        if li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        // chain criterion
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(&lead(&basis[k]), &l)
                && !pairs.contains(&pair_key(&basis, order, i, k))
                && !pairs.contains(&pair_key(&basis, order, j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let r = reduce(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = r.make_monic(order);
        let k = basis.len();
        let lr = lead(&r);
        basis.push(r);
        for m in 0..k {
            pairs.insert((degree(&lcm(&lead(&basis[m]), &lr)), m, k));
        }
    }
    Ok(interreduce(basis, order))
}

fn pair_key(basis: &[MultiPoly], order: MonomialOrder, a: usize, b: usize) -> (u32, usize, usize) {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    let l = lcm(&basis[i].leading_exps(order).unwrap(), &basis[j].leading_exps(order).unwrap());
    (degree(&l), i, j)
}

fn interreduce(basis: Vec<MultiPoly>, order: MonomialOrder) -> Vec<MultiPoly> {
    // drop elements whose leading monomial is divisible by another's
    let leads: Vec<Vec<u32>> = basis.iter().map(|g| g.leading_exps(order).unwrap()).collect();
    let mut keep: Vec<MultiPoly> = Vec::new();
    let mut kept_leads: Vec<Vec<u32>> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = leads.iter().enumerate().any(|(j, lj)| {
            j != i && divides(lj, &leads[i]) && (lj != &leads[i] || j < i)
        });
        if !redundant {
            keep.push(g.clone());
            kept_leads.push(leads[i].clone());
        }
    }
    let mut out: Vec<MultiPoly> = (0..keep.len())
        .map(|i| {
            let others: Vec<MultiPoly> =
                keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
            let lt = {
                let (e, c) = keep[i].leading(order).unwrap();
                MultiPoly::monomial(e.clone(), c.clone())
            };
            let tail = &keep[i] - &lt;
            (&lt + &reduce(&tail, &others, order)).make_monic(order)
        })
        .collect();
    out.sort_by(|a, b| order.cmp(&a.leading_exps(order).unwrap(), &b.leading_exps(order).unwrap()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn t(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    fn gb(gens: Vec<MultiPoly>) -> Vec<MultiPoly> {
        PolyIdeal::new(gens, MonomialOrder::Grlex).unwrap().basis().unwrap().generators
    }

    #[test]
    fn spec_examples() {
        let x = t(2, 0);
        let y = t(2, 1);
        assert_eq!(gb(vec![x.scale(&q(2)), y.scale(&q(2))]), vec![y.clone(), x.clone()]);
        let x2 = &x * &x;
        assert_eq!(gb(vec![x2.scale(&q(3)), y.scale(&q(2))]), vec![y.clone(), x2.clone()]);
        assert_eq!(gb(vec![&x + &y, &x - &y]), vec![y.clone(), x.clone()]);
    }

    #[test]
    fn quotient_dimensions() {
        let x = t(2, 0);
        let y = t(2, 1);
        let dim = |g: Vec<MultiPoly>| PolyIdeal::new(g, MonomialOrder::Grlex).unwrap().quotient_dimension().unwrap();
        assert_eq!(dim(vec![x.clone(), y.clone()]), QuotientDim::Finite(1));
        assert_eq!(dim(vec![&x * &x, y.clone()]), QuotientDim::Finite(2));
        assert_eq!(dim(vec![x.clone()]), QuotientDim::Infinite);
    }

    #[test]
    fn lex_elimination_of_circle_and_line() {
        // x^2 + y^2 - 1, x - y: lex basis contains a univariate polynomial in y
        let x = t(2, 0);
        let y = t(2, 1);
        let one = MultiPoly::one(2);
        let f = &(&(&x * &x) + &(&y * &y)) - &one;
        let b = PolyIdeal::new(vec![f, &x - &y], MonomialOrder::Lex).unwrap().basis().unwrap();
        assert!(b.generators.iter().any(|g| g.degree_in(0) == 0 && g.degree_in(1) == 2));
    }

    #[test]
    fn budget_exhaustion_returns_partial_basis() {
        let x = t(3, 0);
        let y = t(3, 1);
        let z = t(3, 2);
        let f1 = &(&(&x * &x) * &y) - &(&z * &z);
        let f2 = &(&(&y * &y) * &z) - &(&x * &x);
        let f3 = &(&(&z * &z) * &x) - &(&y * &y);
        match PolyIdeal::new(vec![f1, f2, f3], MonomialOrder::Grlex).unwrap().basis_with_budget(1) {
            Err(Error::Timeout { partial, .. }) => assert!(!partial.is_empty()),
            other => panic!("expected timeout, got {other:?}"),
        }
    }
}
