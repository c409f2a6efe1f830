use num_traits::{One, Zero};

use super::division::div_exact;
use super::MultiPoly;
use crate::rational::Q;

pub type PolyMatrix = Vec<Vec<MultiPoly>>;

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn det_polynomial(m: &PolyMatrix, arity: usize) -> MultiPoly {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return MultiPoly::one(arity);
    }
    let mut a = m.clone();
    let mut prev = MultiPoly::one(arity);
    let mut sign = Q::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return MultiPoly::zero(arity),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = div_exact(&num, &prev).expect("Bareiss step is an exact division");
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].scale(&sign)
}

/// Laplace expansion along the first row; exponential, for cross-checks.
pub fn det_cofactor(m: &PolyMatrix, arity: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(arity);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = MultiPoly::zero(arity);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: PolyMatrix = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * &det_cofactor(&minor, arity);
        total = if j % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

/// Determinant of an integer-valued rational matrix (for matrix-tree counts).
pub fn det_rational(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Q::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        let inv = a[k][k].recip();
        for i in k + 1..n {
            let f = &a[i][k] * &inv;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}
