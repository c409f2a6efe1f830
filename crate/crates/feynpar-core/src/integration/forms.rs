use std::collections::BTreeMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cubature::{cubature, standard_simplex, QuadOptions};
use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::graph_poly::{case_table_affine, case_table_sliced, psi, second_symanzik, MomentumData, PMethod};
use crate::poly::{CompiledPoly, MultiPoly};
use crate::rational::Q;
use crate::slicing::{restrict, LinearSlice};

/// A `k`-form on `R^n` with polynomial coefficients, keyed by increasing
/// index sets `I` for `dt_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffForm {
    arity: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, MultiPoly>,
}

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in 0..idx.len() - 1 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            } else if idx[j] == idx[j + 1] {
                return 0;
            }
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

impl DiffForm {
    pub fn zero(arity: usize, degree: usize) -> Self {
        Self { arity, degree, terms: BTreeMap::new() }
    }

    /// `c dt_1 ... dt_n`.
    pub fn top(c: MultiPoly) -> Self {
        let n = c.arity();
        let mut f = Self::zero(n, n);
        f.add_term((0..n).collect(), c);
        f
    }

    /// `sum_i (d f / d t_i) dt_i`.
    pub fn differential(f: &MultiPoly) -> Self {
        let mut out = Self::zero(f.arity(), 1);
        for (i, d) in f.gradient().into_iter().enumerate() {
            out.add_term(vec![i], d);
        }
        out
    }

    /// Adds `c dt_{idx}` for an arbitrary index order.
    pub fn add_term(&mut self, mut idx: Vec<usize>, c: MultiPoly) {
        assert_eq!(idx.len(), self.degree, "form degree");
        assert_eq!(c.arity(), self.arity, "form arity");
        let sign = sort_sign(&mut idx);
        if sign == 0 || c.is_zero() {
            return;
        }
        let c = if sign < 0 { -&c } else { c };
        let entry = self.terms.entry(idx).or_insert_with(|| MultiPoly::zero(self.arity));
        *entry = &*entry + &c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, MultiPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale_poly(&self, p: &MultiPoly) -> Self {
        let mut out = Self::zero(self.arity, self.degree);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c * p);
        }
        out
    }

    pub fn wedge(&self, other: &DiffForm) -> Self {
        let mut out = Self::zero(self.arity, self.degree + other.degree);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let mut idx = i.clone();
                idx.extend(j);
                out.add_term(idx, a * b);
            }
        }
        out
    }

    /// Contraction with the Euler field `E = sum t_i d/dt_i`.
    pub fn euler_contraction(&self) -> Self {
        if self.degree == 0 {
            return Self::zero(self.arity, 0);
        }
        let mut out = Self::zero(self.arity, self.degree - 1);
        for (idx, c) in &self.terms {
            for (pos, &i) in idx.iter().enumerate() {
                let mut rest = idx.clone();
                rest.remove(pos);
                let t = MultiPoly::var(self.arity, i);
                let term = &t * c;
                out.add_term(rest, if pos % 2 == 0 { term } else { -&term });
            }
        }
        out
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.arity, self.degree + 1);
        for (idx, c) in &self.terms {
            for (i, d) in c.gradient().into_iter().enumerate() {
                let mut full = vec![i];
                full.extend(idx);
                out.add_term(full, d);
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_derivative().is_zero()
    }

    /// Total weight `deg(coefficient) + k` when every coefficient is
    /// homogeneous of one degree.
    pub fn weight(&self) -> Option<u32> {
        let mut w = None;
        for c in self.terms.values() {
            if !c.is_homogeneous() {
                return None;
            }
            let d = c.total_degree()? + self.degree as u32;
            if w.is_some_and(|x| x != d) {
                return None;
            }
            w = Some(d);
        }
        w
    }
}

fn minor(a: &[Vec<f64>], rows: &[usize]) -> f64 {
    let k = rows.len();
    let mut m: Vec<Vec<f64>> = rows.iter().map(|&r| a[r].clone()).collect();
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..k {
            let fct = m[r][c] / m[c][c];
            for j in c..k {
                m[r][j] -= fct * m[c][j];
            }
        }
    }
    det
}

/// `int_S form / f^p` over the oriented affine `k`-simplex `S` with the
/// given `k+1` vertices in `R^n`: `(value, error)`.
pub fn integrate_form(form: &DiffForm, f: &MultiPoly, p: u32, verts: &[Vec<f64>], opts: &QuadOptions) -> Result<(f64, f64)> {
    let k = form.degree;
    let n = form.arity;
    if verts.len() != k + 1 || verts.iter().any(|v| v.len() != n) {
        return Err(Error::Precondition(format!("a {k}-form needs a simplex with {} vertices in R^{n}", k + 1)));
    }
    // a[r][c] = (v_{c+1} - v_0)_r
    let a: Vec<Vec<f64>> = (0..n).map(|r| (1..=k).map(|c| verts[c][r] - verts[0][r]).collect()).collect();
    let parts: Vec<(CompiledPoly, f64)> =
        form.terms.iter().map(|(idx, c)| (CompiledPoly::new(c), minor(&a, idx))).filter(|(_, d)| *d != 0.0).collect();
    let fc = CompiledPoly::new(f);
    let integrand = |x: &[f64], out: &mut [f64]| {
        let mut u = verts[0].clone();
        for (c, xc) in x.iter().enumerate() {
            for (r, ur) in u.iter_mut().enumerate() {
                *ur += xc * a[r][c];
            }
        }
        let num: f64 = parts.iter().map(|(c, d)| c.eval(&u) * d).sum();
        out[0] = num / fc.eval(&u).powi(p as i32);
    };
    let res = cubature(&standard_simplex(k), &integrand, 1, opts)?.require()?;
    Ok((res.values[0], res.errors[0]))
}

/// `int_{boundary S} form / f^p` with the induced orientation
/// `sum_j (-1)^j [v_0 .. v_j omitted .. v_k]`.
pub fn integrate_form_boundary(form: &DiffForm, f: &MultiPoly, p: u32, verts: &[Vec<f64>], opts: &QuadOptions) -> Result<(f64, f64)> {
    let mut total = (0.0, 0.0);
    for j in 0..verts.len() {
        let facet: Vec<Vec<f64>> = verts.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.clone()).collect();
        let (v, e) = integrate_form(form, f, p, &facet, opts)?;
        total.0 += if j % 2 == 0 { v } else { -v };
        total.1 += e;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `m deg(f) int omega / f^m`.
    pub lhs: f64,
    /// `int_boundary Delta(omega) / f^m`.
    pub boundary: f64,
    /// `m int df ^ Delta(omega) / f^{m+1}`.
    pub interior: f64,
    pub rhs: f64,
    pub residual: f64,
    pub error_estimate: f64,
    pub closed: bool,
    pub m: u32,
    pub deg_f: u32,
}

/// Both sides of the projective integral identity for a homogeneous `f`
/// and a `k`-form `omega` of weight `m deg f`, on an oriented affine
/// `k`-simplex that avoids the zeros of `f`.
pub fn projective_identity_residual(
    f: &MultiPoly,
    m: u32,
    omega: &DiffForm,
    verts: &[Vec<f64>],
    opts: &QuadOptions,
) -> Result<IdentityReport> {
    if !f.is_homogeneous() || f.is_zero() {
        return Err(Error::Precondition("f must be a nonzero homogeneous polynomial".into()));
    }
    let deg_f = f.total_degree().unwrap_or(0);
    if omega.weight().is_some_and(|w| w != m * deg_f) {
        return Err(Error::Precondition(format!("omega has weight {:?}, expected m deg f = {}", omega.weight(), m * deg_f)));
    }
    probe_nonvanishing(f, verts)?;
    let delta = omega.euler_contraction();
    let (lhs, e1) = integrate_form(omega, f, m, verts, opts)?;
    let (boundary, e2) = integrate_form_boundary(&delta, f, m, verts, opts)?;
    let df_delta = DiffForm::differential(f).wedge(&delta);
    let (int_raw, e3) = integrate_form(&df_delta, f, m + 1, verts, opts)?;
    let scale = (m * deg_f) as f64;
    let lhs = scale * lhs;
    let interior = m as f64 * int_raw;
    let rhs = boundary + interior;
    Ok(IdentityReport {
        lhs,
        boundary,
        interior,
        rhs,
        residual: (lhs - rhs).abs(),
        error_estimate: scale * e1 + e2 + m as f64 * e3,
        closed: omega.is_closed(),
        m,
        deg_f,
    })
}

const PROBE_POINTS: usize = 256;

/// Rejects simplices on which `f` changes sign or vanishes at a sample.
fn probe_nonvanishing(f: &MultiPoly, verts: &[Vec<f64>]) -> Result<()> {
    let fc = CompiledPoly::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sign = 0.0;
    for i in 0..PROBE_POINTS + verts.len() {
        let w: Vec<f64> = if i < verts.len() {
            (0..verts.len()).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
        } else {
            let e: Vec<f64> = (0..verts.len()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|x| x / s).collect()
        };
        let u: Vec<f64> =
            (0..verts[0].len()).map(|r| w.iter().zip(verts).map(|(wj, v)| wj * v[r]).sum()).collect();
        let v = fc.eval(&u);
        if v == 0.0 || !v.is_finite() || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::DivergentConfiguration("f vanishes on the integration simplex".into()));
        }
        sign = v.signum();
    }
    Ok(())
}

/// `P + m^2 Psi (t_1 + ... + t_n)`: homogeneous of degree `l + 1` and equal
/// to `P_eff` on the simplex.
pub fn homogeneous_p(g: &FeynmanGraph, mom: &MomentumData) -> Result<MultiPoly> {
    if mom.is_symbolic() {
        return Err(Error::Precondition("numeric momenta are required".into()));
    }
    let n = g.num_edges();
    let p = second_symanzik(g, mom, PMethod::CutSets)?;
    let sum = (0..n).fold(MultiPoly::zero(n), |acc, i| &acc + &MultiPoly::var(n, i));
    Ok(&p + &(&psi(g) * &sum).scale(&mom.mass2))
}

/// The unit-size `k`-simplex at `(1, ..., 1)` in `R^k`.
pub fn shifted_simplex(k: usize) -> Vec<Vec<f64>> {
    standard_simplex(k).into_iter().map(|v| v.into_iter().map(|x| x + 1.0).collect()).collect()
}

/// The identity for the parametric integrand of `g`: `f`, `m` and `omega`
/// come from the affine case table and the top forms are integrated on the
/// shifted simplex inside the positive orthant.
pub fn feynman_identity(g: &FeynmanGraph, mom: &MomentumData, dimension: i64, opts: &QuadOptions) -> Result<IdentityReport> {
    let n = g.num_edges();
    let ct = case_table_affine(n as i64, dimension, g.loop_number() as i64)?;
    let p = homogeneous_p(g, mom)?;
    let ps = psi(g);
    let f = ct.f.build(&p, &ps);
    let omega = DiffForm::top(ct.omega.build(&p, &ps));
    projective_identity_residual(&f, ct.m, &omega, &shifted_simplex(n), opts)
}

/// Sliced variant: `f`, `m` and `h` from the sliced case table, restricted to
/// the slice, with `omega = h du_1 ... du_k` on a small simplex in slice
/// coordinates where the restricted `f` has no zeros.
pub fn feynman_identity_sliced(
    g: &FeynmanGraph,
    mom: &MomentumData,
    dimension: i64,
    slice: &LinearSlice,
    opts: &QuadOptions,
) -> Result<IdentityReport> {
    let k = slice.dim();
    let ct = case_table_sliced(k as i64, dimension, g.loop_number() as i64)?;
    let h = ct.h.ok_or_else(|| Error::Precondition("sliced case table has no numerator".into()))?;
    let p = restrict(&homogeneous_p(g, mom)?, slice)?;
    let ps = restrict(&psi(g), slice)?;
    let f = ct.f.build(&p, &ps);
    let omega = DiffForm::top(h.build(&p, &ps));
    let mut last = None;
    for c in 1..=8 {
        let corner: Vec<f64> = (0..k).map(|i| if (c >> (i % 3)) & 1 == 1 { 1.0 } else { 0.5 + i as f64 * 0.25 }).collect();
        let verts: Vec<Vec<f64>> = standard_simplex(k)
            .into_iter()
            .map(|v| v.iter().zip(&corner).map(|(a, b)| b + 0.25 * a).collect())
            .collect();
        match projective_identity_residual(&f, ct.m, &omega, &verts, opts) {
            Err(e @ Error::DivergentConfiguration(_)) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::DivergentConfiguration("no admissible simplex".into())))
}

/// `ω_n = dt_1 ... dt_n` with coefficient one.
pub fn volume_form(n: usize) -> DiffForm {
    DiffForm::top(MultiPoly::constant(n, Q::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_of_volume_form() {
        // Delta(dt1 dt2) = t1 dt2 - t2 dt1
        let d = volume_form(2).euler_contraction();
        assert_eq!(d.terms()[&vec![1]], MultiPoly::var(2, 0));
        assert_eq!(d.terms()[&vec![0]], -&MultiPoly::var(2, 1));
        assert!(!d.is_closed());
        assert!(DiffForm::differential(&MultiPoly::var(2, 0)).is_closed());
        assert!(volume_form(2).weight() == Some(2));
        assert!(DiffForm::zero(2, 1).is_zero());
    }
}
