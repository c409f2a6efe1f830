use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::graph_poly::{psi, psi_polynomial, PsiMethod};
use crate::poly::{gcd, groebner_basis, CompiledPoly, MonomialOrder, MultiPoly, PolyIdeal, QuotientDim, DEFAULT_STEP_BUDGET};
use crate::rational::{from_f64_approx, to_f64, Q};

pub const MAX_SLICE_VARS: usize = 3;

/// `(d_e Psi : e internal)`, the equations of the singular locus.
pub fn singular_locus_system(g: &FeynmanGraph) -> PolyIdeal {
    PolyIdeal { generators: psi(g).gradient(), order: MonomialOrder::Grlex }
}

/// For each edge: whether `d_e Psi` equals the deletion polynomial `Psi(G - e)`.
pub fn deletion_check(g: &FeynmanGraph) -> Result<Vec<bool>> {
    let grads = psi(g).gradient();
    (0..g.num_edges())
        .map(|e| {
            let del = psi_polynomial(&g.delete_index(e), PsiMethod::Trees)?.insert_var(e);
            Ok(del == grads[e])
        })
        .collect()
}

/// Certified location of a singular point.
#[derive(Clone, Debug, PartialEq)]
pub enum SingularPoint {
    Exact(Vec<Q>),
    Numeric { coords: Vec<f64>, radius: f64 },
}

impl SingularPoint {
    pub fn tag(&self) -> String {
        match self {
            SingularPoint::Exact(_) => "exact".into(),
            SingularPoint::Numeric { radius, .. } => format!("numeric({radius:e})"),
        }
    }

    pub fn approx(&self) -> Vec<f64> {
        match self {
            SingularPoint::Exact(p) => p.iter().map(to_f64).collect(),
            SingularPoint::Numeric { coords, .. } => coords.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[Q]> {
        match self {
            SingularPoint::Exact(p) => Some(p),
            SingularPoint::Numeric { .. } => None,
        }
    }
}

/// Real critical points of `f`: solutions of `d_1 f = ... = d_k f = 0`.
pub fn find_singular_points(f: &MultiPoly) -> Result<Vec<SingularPoint>> {
    check_vars(f)?;
    let eqs: Vec<MultiPoly> = f.gradient();
    solve_system(&eqs)
}

/// Singular points of the projective hypersurface of a homogeneous `f`,
/// searched chart by chart and normalized so that the first nonzero
/// coordinate is 1.
pub fn find_projective_singular_points(f: &MultiPoly) -> Result<Vec<SingularPoint>> {
    check_vars(f)?;
    if !f.is_homogeneous() {
        return Err(Error::Precondition("projective search needs a homogeneous polynomial".into()));
    }
    let k = f.arity();
    let mut found: Vec<SingularPoint> = Vec::new();
    for chart in 0..k {
        let h = f.specialize(chart, &Q::one()).remove_var(chart);
        let mut eqs = vec![h.clone()];
        eqs.extend(h.gradient());
        for p in solve_system(&eqs)? {
            let lift = |c: Vec<Q>| {
                let mut v = c;
                v.insert(chart, Q::one());
                v
            };
            let point = match p {
                SingularPoint::Exact(c) => SingularPoint::Exact(normalize_q(lift(c))),
                SingularPoint::Numeric { coords, radius } => {
                    let mut v = coords;
                    v.insert(chart, 1.0);
                    SingularPoint::Numeric { coords: normalize_f(v), radius }
                }
            };
            if !found.iter().any(|q| same_point(q, &point)) {
                found.push(point);
            }
        }
    }
    sort_points(&mut found);
    Ok(found)
}

fn check_vars(f: &MultiPoly) -> Result<()> {
    if f.arity() == 0 || f.arity() > MAX_SLICE_VARS {
        return Err(Error::Precondition(format!("singular point search supports 1..={MAX_SLICE_VARS} variables")));
    }
    Ok(())
}

fn normalize_q(v: Vec<Q>) -> Vec<Q> {
    let lead = v.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Q::one);
    v.into_iter().map(|x| x / &lead).collect()
}

fn normalize_f(v: Vec<f64>) -> Vec<f64> {
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    v.into_iter().map(|x| x / lead).collect()
}

fn same_point(a: &SingularPoint, b: &SingularPoint) -> bool {
    match (a, b) {
        (SingularPoint::Exact(x), SingularPoint::Exact(y)) => x == y,
        _ => a.approx().iter().zip(b.approx()).all(|(x, y)| (x - y).abs() < 1e-6),
    }
}

fn sort_points(points: &mut [SingularPoint]) {
    points.sort_by(|a, b| {
        let ka = (matches!(a, SingularPoint::Numeric { .. }), a.approx());
        let kb = (matches!(b, SingularPoint::Numeric { .. }), b.approx());
        ka.0.cmp(&kb.0).then_with(|| ka.1.partial_cmp(&kb.1).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Real solutions of a polynomial system with finitely many complex
/// solutions. Rational solutions come from a lex Gröbner basis and are
/// exact; the remaining real ones come from Newton iteration.
pub fn solve_system(eqs: &[MultiPoly]) -> Result<Vec<SingularPoint>> {
    let eqs: Vec<MultiPoly> = eqs.iter().filter(|e| !e.is_zero()).cloned().collect();
    let Some(first) = eqs.first() else {
        return Err(Error::PositiveDimensional);
    };
    let k = first.arity();
    let ideal = PolyIdeal::new(eqs.clone(), MonomialOrder::Grlex)?;
    match ideal.quotient_dimension()? {
        QuotientDim::Infinite => return Err(Error::PositiveDimensional),
        QuotientDim::Finite(0) => return Ok(Vec::new()),
        QuotientDim::Finite(_) => {}
    }
    let lex = groebner_basis(&eqs, MonomialOrder::Lex, DEFAULT_STEP_BUDGET)?;
    let mut exact: Vec<Vec<Q>> = Vec::new();
    back_substitute(&lex, k, k, &mut vec![Q::zero(); k], &mut exact);
    exact.retain(|p| eqs.iter().all(|e| e.eval(p).is_zero()));
    exact.sort();
    exact.dedup();
    let mut out: Vec<SingularPoint> = exact.into_iter().map(SingularPoint::Exact).collect();
    for p in newton_points(&eqs, k) {
        let cand = SingularPoint::Numeric { coords: p.0.clone(), radius: p.1 };
        if out.iter().any(|q| same_point(q, &cand)) {
            continue;
        }
        // rational reconstruction, verified exactly
        let guess: Vec<Q> = p.0.iter().map(|&x| from_f64_approx(x, 10_000)).collect();
        if eqs.iter().all(|e| e.eval(&guess).is_zero()) {
            let pt = SingularPoint::Exact(guess);
            if !out.iter().any(|q| same_point(q, &pt)) {
                out.push(pt);
            }
        } else {
            out.push(cand);
        }
    }
    sort_points(&mut out);
    Ok(out)
}

/// Fix variables `v..k` from the last one down; `assigned[v..]` holds values.
fn back_substitute(lex: &[MultiPoly], k: usize, v: usize, assigned: &mut Vec<Q>, out: &mut Vec<Vec<Q>>) {
    if v == 0 {
        out.push(assigned.clone());
        return;
    }
    let var = v - 1;
    let mut uni: Option<MultiPoly> = None;
    for g in lex {
        if (0..var).any(|i| g.degree_in(i) > 0) {
            continue;
        }
        let mut s = g.clone();
        for i in v..k {
            s = s.specialize(i, &assigned[i]);
        }
        if s.is_zero() {
            continue;
        }
        uni = Some(match uni {
            None => s,
            Some(u) => gcd(&u, &s),
        });
    }
    let Some(u) = uni else {
        return;
    };
    if u.is_constant() {
        return;
    }
    let coeffs: Vec<Q> = (0..=u.degree_in(var))
        .map(|d| {
            let mut e = vec![0u32; k];
            e[var] = d;
            u.coeff(&e)
        })
        .collect();
    for r in rational_roots(&coeffs) {
        assigned[var] = r;
        back_substitute(lex, k, var, assigned, out);
    }
    assigned[var] = Q::zero();
}

/// Rational roots of `sum c_i x^i` by the rational root test.
pub fn rational_roots(coeffs: &[Q]) -> Vec<Q> {
    let mut c: Vec<Q> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let shift = c.iter().position(|x| !x.is_zero()).unwrap();
    if shift > 0 {
        roots.push(Q::zero());
        c.drain(..shift);
    }
    if c.len() > 1 {
        let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
        let (a0, an) = (ints[0].abs(), ints[ints.len() - 1].abs());
        for p in divisors(&a0) {
            for qd in divisors(&an) {
                for sign in [1, -1] {
                    let r = Q::new(BigInt::from(sign) * &p, qd.clone());
                    let val = ints.iter().rev().fold(Q::zero(), |acc, a| acc * &r + Q::from_integer(a.clone()));
                    if val.is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let Some(n) = n.to_u64() else {
        return vec![BigInt::one()];
    };
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n && d <= 2_000_000 {
        if n % d == 0 {
            out.push(BigInt::from(d));
            out.push(BigInt::from(n / d));
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Multi-start Newton (least squares for overdetermined systems) from a grid.
/// Returns converged points with an error radius.
fn newton_points(eqs: &[MultiPoly], k: usize) -> Vec<(Vec<f64>, f64)> {
    let fs: Vec<CompiledPoly> = eqs.iter().map(CompiledPoly::new).collect();
    let jac: Vec<Vec<CompiledPoly>> = eqs.iter().map(|e| e.gradient().iter().map(CompiledPoly::new).collect()).collect();
    let grid = [-2.3, -1.1, -0.37, 0.41, 1.3, 2.7];
    let starts: Vec<Vec<f64>> = (0..grid.len().pow(k as u32))
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let x = grid[idx % grid.len()];
                    idx /= grid.len();
                    x
                })
                .collect()
        })
        .collect();
    let mut found: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .filter_map(|s| newton(&fs, &jac, s.clone()))
        .collect();
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    for p in found {
        if !out.iter().any(|q| q.0.iter().zip(&p.0).all(|(a, b)| (a - b).abs() < 1e-6)) {
            out.push(p);
        }
    }
    out
}

fn newton(fs: &[CompiledPoly], jac: &[Vec<CompiledPoly>], mut x: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let k = x.len();
    let mut last_step = f64::INFINITY;
    for _ in 0..100 {
        let r: Vec<f64> = fs.iter().map(|f| f.eval(&x)).collect();
        let j: Vec<Vec<f64>> = jac.iter().map(|row| row.iter().map(|d| d.eval(&x)).collect()).collect();
        // normal equations J^T J dx = -J^T r
        let mut a = vec![vec![0.0; k]; k];
        let mut b = vec![0.0; k];
        for (ri, row) in r.iter().zip(&j) {
            for p in 0..k {
                b[p] -= row[p] * ri;
                for qq in 0..k {
                    a[p][qq] += row[p] * row[qq];
                }
            }
        }
        let dx = solve_dense(a, b)?;
        let step = dx.iter().map(|d| d.abs()).fold(0.0, f64::max);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        if !x.iter().all(|v| v.is_finite() && v.abs() < 1e6) {
            return None;
        }
        last_step = step;
        if step < 1e-14 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    let res = fs.iter().map(|f| f.eval(&x).abs()).fold(0.0, f64::max);
    (res < 1e-9 && last_step < 1e-6).then(|| (x, last_step.max(1e-15) * 10.0))
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}
