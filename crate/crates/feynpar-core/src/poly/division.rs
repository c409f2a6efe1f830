use super::order::{divides, sub_exps, MonomialOrder};
use super::MultiPoly;

/// Exact quotient `a / b`, or `None` when `b` does not divide `a`.
///
/// Division by a single polynomial leaves remainder zero iff `b | a`, so the
/// first leading term that fails to divide decides non-divisibility.
pub fn div_exact(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    assert!(!b.is_zero(), "division by zero polynomial");
    let order = MonomialOrder::Grlex;
    let (lb, cb) = b.leading(order).map(|(e, c)| (e.clone(), c.clone()))?;
    let inv = cb.recip();
    let mut r = a.clone();
    let mut q = MultiPoly::zero(a.arity());
    while let Some((lr, cr)) = r.leading(order).map(|(e, c)| (e.clone(), c.clone())) {
        if !divides(&lb, &lr) {
            return None;
        }
        let m = sub_exps(&lr, &lb);
        let c = &cr * &inv;
        q.add_term(m.clone(), c.clone());
        r = &r - &b.mul_monomial(&m, &c);
    }
    Some(q)
}

pub fn divides_poly(a: &MultiPoly, b: &MultiPoly) -> bool {
    if a.is_zero() {
        return b.is_zero();
    }
    div_exact(b, a).is_some()
}

/// Full reduction of `f` by `basis` under a global order.
pub fn reduce(f: &MultiPoly, basis: &[MultiPoly], order: MonomialOrder) -> MultiPoly {
    debug_assert!(!order.is_local());
    let leads: Vec<_> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let (e, c) = g.leading(order).unwrap();
            (g, e.clone(), c.recip())
        })
        .collect();
    let mut p = f.clone();
    let mut rem = MultiPoly::zero(f.arity());
    while let Some((lp, cp)) = p.leading(order).map(|(e, c)| (e.clone(), c.clone())) {
        match leads.iter().find(|(_, lg, _)| divides(lg, &lp)) {
            Some((g, lg, inv)) => {
                let m = sub_exps(&lp, lg);
                p = &p - &g.mul_monomial(&m, &(&cp * inv));
            }
            None => {
                rem.add_term(lp.clone(), cp.clone());
                let mut t = MultiPoly::zero(f.arity());
                t.add_term(lp, cp);
                p = &p - &t;
            }
        }
    }
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    #[test]
    fn exact_division() {
        let a = &(&t(0) * &t(0)) - &(&t(1) * &t(1));
        let b = &t(0) + &t(1);
        assert_eq!(div_exact(&a, &b).unwrap(), &t(0) - &t(1));
        assert!(div_exact(&(&t(0) * &t(1)), &b).is_none());
        assert!(div_exact(&MultiPoly::zero(2), &b).unwrap().is_zero());
    }
}
