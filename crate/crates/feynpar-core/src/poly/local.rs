//! Standard bases for a local monomial order (Mora's tangent cone algorithm).


use super::groebner::s_polynomial;
use super::order::{divides, sub_exps, MonomialOrder};
use super::MultiPoly;
use crate::error::{Error, Result};

fn ecart(f: &MultiPoly, order: MonomialOrder) -> u32 {
    let lead: u32 = f.leading_exps(order).map(|e| e.iter().sum()).unwrap_or(0);
    f.total_degree().unwrap_or(0) - lead
}

/// Mora's weak normal form: returns `h` with `u f - h` in the ideal for a
/// unit `u` of the local ring, and `LM(h)` outside the leading ideal.
pub fn mora_normal_form(f: &MultiPoly, basis: &[MultiPoly], order: MonomialOrder) -> MultiPoly {
    let mut h = f.clone();
    let mut t: Vec<MultiPoly> = basis.iter().filter(|g| !g.is_zero()).cloned().collect();
    // generous cap; Mora's algorithm terminates but guard against misuse
    for _ in 0..200_000 {
        if h.is_zero() {
            return h;
        }
        let lh = h.leading_exps(order).unwrap();
        let candidate = t
            .iter()
            .filter(|g| divides(&g.leading_exps(order).unwrap(), &lh))
            .min_by_key(|g| ecart(g, order))
            .cloned();
        let Some(g) = candidate else {
            return h;
        };
        if ecart(&g, order) > ecart(&h, order) {
            t.push(h.clone());
        }
        let (lg, cg) = g.leading(order).map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let ch = h.leading(order).map(|(_, c)| c.clone()).unwrap();
        let m = sub_exps(&lh, &lg);
        h = &h - &g.mul_monomial(&m, &(&ch / &cg));
    }
    panic!("Mora normal form did not terminate");
}

pub fn standard_basis(gens: &[MultiPoly], order: MonomialOrder, budget: usize) -> Result<Vec<MultiPoly>> {
    let mut basis: Vec<MultiPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.make_monic(order)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut steps = 0;
    while let Some((i, j)) = pairs.pop() {
        steps += 1;
        if steps > budget {
            return Err(Error::Timeout { steps, partial: basis });
        }
        let (li, lj) = (basis[i].leading_exps(order).unwrap(), basis[j].leading_exps(order).unwrap());
        if li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let h = mora_normal_form(&s, &basis, order);
        if h.is_zero() {
            continue;
        }
        let k = basis.len();
        basis.push(h.make_monic(order));
        for m in 0..k {
            pairs.insert(0, (m, k));
        }
    }
    Ok(basis)
}
