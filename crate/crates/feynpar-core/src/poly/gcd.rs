use super::division::{div_exact, divides_poly};
use super::order::MonomialOrder;
use super::MultiPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdDivides {
    pub gcd: MultiPoly,
    pub a_divides_b: bool,
}

/// Multivariate gcd plus an exact divisibility test of `b` by `a`.
pub fn gcd_divides(a: &MultiPoly, b: &MultiPoly) -> GcdDivides {
    GcdDivides { gcd: gcd(a, b), a_divides_b: divides_poly(a, b) }
}

/// Greatest common divisor, normalized to leading coefficient 1 (graded lex).
///
/// Recursive content / primitive part with a primitive pseudo-remainder
/// sequence in one main variable.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.arity(), b.arity());
    let g = gcd_rec(a, b);
    g.make_monic(MonomialOrder::Grlex)
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.arity();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    let Some(v) = main_variable(a, b) else {
        return MultiPoly::one(n);
    };
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd_rec(&ca, &cb);
    let pa = div_exact(a, &ca).expect("content divides");
    let pb = div_exact(b, &cb).expect("content divides");
    let g = if pa.degree_in(v) == 0 || pb.degree_in(v) == 0 {
        MultiPoly::one(n)
    } else {
        primitive_prs(pa, pb, v)
    };
    &c * &g
}

/// Variable occurring in both, of least maximal degree; else any occurring one.
fn main_variable(a: &MultiPoly, b: &MultiPoly) -> Option<usize> {
    let n = a.arity();
    let both = (0..n)
        .filter(|&i| a.degree_in(i) > 0 && b.degree_in(i) > 0)
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)));
    both.or_else(|| (0..n).find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0))
}

/// Gcd of the coefficients with respect to `v` (a polynomial free of `v`).
pub fn content(p: &MultiPoly, v: usize) -> MultiPoly {
    let mut c = MultiPoly::zero(p.arity());
    for coeff in p.coeffs_in(v) {
        if coeff.is_zero() {
            continue;
        }
        c = gcd_rec(&c, &coeff);
        if c.is_constant() {
            return MultiPoly::one(p.arity());
        }
    }
    c
}

fn primitive_part(p: &MultiPoly, v: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content(p, v);
    div_exact(p, &c).expect("content divides")
}

fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let n = a.arity();
    let db = b.degree_in(v);
    let lb = b.coeffs_in(v).pop().unwrap();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).pop().unwrap();
        let mut shift = vec![0u32; n];
        shift[v] = dr - db;
        let xb = b.mul_monomial(&shift, &num_traits::One::one());
        r = &(&lb * &r) - &(&lr * &xb);
    }
    r
}

fn primitive_prs(a: MultiPoly, b: MultiPoly, v: usize) -> MultiPoly {
    let (mut r0, mut r1) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    loop {
        let r = pseudo_rem(&r0, &r1, v);
        if r.is_zero() {
            return primitive_part(&r1, v);
        }
        if r.degree_in(v) == 0 {
            return MultiPoly::one(r0.arity());
        }
        r0 = r1;
        r1 = primitive_part(&r, v);
    }
}
