use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    Adaptive,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub method: QuadMethod,
    pub seed: u64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-8, rel_tol: 1e-8, max_evals: 4_000_000, method: QuadMethod::Adaptive, seed: 0 }
    }
}

impl QuadOptions {
    pub fn tolerance(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self { max_evals: samples, method: QuadMethod::MonteCarlo, seed, abs_tol: f64::INFINITY, rel_tol: 0.0 }
    }

    fn accepts(&self, value: f64, err: f64) -> bool {
        err <= self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: usize,
    pub method: QuadMethod,
    pub seed: Option<u64>,
}

/// Component-wise result of a vector-valued integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VecQuadrature {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
    pub method: QuadMethod,
    pub seed: Option<u64>,
    pub converged: bool,
}

impl VecQuadrature {
    pub fn component(&self, j: usize) -> QuadratureResult {
        QuadratureResult {
            value: self.values[j],
            error_estimate: self.errors[j],
            evals: self.evals,
            method: self.method,
            seed: self.seed,
        }
    }

    pub fn require(self) -> Result<Self> {
        if self.converged {
            return Ok(self);
        }
        let worst = (0..self.values.len())
            .max_by(|&a, &b| self.errors[a].partial_cmp(&self.errors[b]).unwrap_or(Ordering::Greater))
            .unwrap_or(0);
        Err(Error::ToleranceNotReached {
            value: self.values.get(worst).copied().unwrap_or(f64::NAN),
            error: self.errors.get(worst).copied().unwrap_or(f64::INFINITY),
        })
    }
}

pub type VecIntegrand<'a> = dyn Fn(&[f64], &mut [f64]) + Sync + 'a;

/// `int_Sigma f` over the simplex `{t >= 0, sum t = 1}` in `R^n`, realized as
/// the integral over the projection that drops `t_n` (unit Jacobian).
pub fn integrate_simplex(f: &(dyn Fn(&[f64]) -> f64 + Sync), n: usize, opts: &QuadOptions) -> Result<QuadratureResult> {
    let g = |t: &[f64], out: &mut [f64]| out[0] = f(t);
    Ok(integrate_simplex_vec(&g, n, 1, opts)?.require()?.component(0))
}

/// Vector-valued variant; `f` receives the full point `t` in `R^n`.
pub fn integrate_simplex_vec(f: &VecIntegrand, n: usize, m: usize, opts: &QuadOptions) -> Result<VecQuadrature> {
    if n == 0 {
        return Err(Error::Precondition("simplex needs at least one coordinate".into()));
    }
    let d = n - 1;
    let lift = |x: &[f64], out: &mut [f64]| {
        let mut t = Vec::with_capacity(n);
        t.extend_from_slice(x);
        t.push(1.0 - x.iter().sum::<f64>());
        f(&t, out)
    };
    match opts.method {
        QuadMethod::Adaptive => cubature(&standard_simplex(d), &lift, m, opts),
        QuadMethod::MonteCarlo => Ok(monte_carlo(&lift, d, m, opts)),
    }
}

/// Vertices of `{x in R^d : x >= 0, sum x <= 1}`.
pub fn standard_simplex(d: usize) -> Vec<Vec<f64>> {
    let mut v = vec![vec![0.0; d]];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        v.push(e);
    }
    v
}

/// Grundmann–Möller points in barycentric coordinates, grouped into the
/// families `|beta| = r`, with the weights of the degree `2s+1` and `2s-1`
/// rules on the standard `d`-simplex (volume `1/d!`).
struct GmRule {
    points: Vec<Vec<f64>>,
    high: Vec<f64>,
    low: Vec<f64>,
}

const GM_S: usize = 3;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn gm_weight(s: usize, i: usize, d: usize) -> f64 {
    let deg = 2 * s + 1;
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    let base = (d + deg - 2 * i) as f64;
    sign * 2f64.powi(-(2 * s as i32)) * base.powi(deg as i32) / (factorial(i) * factorial(d + deg - i))
}

impl GmRule {
    fn new(d: usize) -> Self {
        let mut points = Vec::new();
        let mut high = Vec::new();
        let mut low = Vec::new();
        for r in 0..=GM_S {
            let denom = (d + 2 * r + 1) as f64;
            let wh = gm_weight(GM_S, GM_S - r, d);
            let wl = if r < GM_S { gm_weight(GM_S - 1, GM_S - 1 - r, d) } else { 0.0 };
            for beta in compositions(r, d + 1) {
                points.push(beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect());
                high.push(wh);
                low.push(wl);
            }
        }
        Self { points, high, low }
    }
}

#[derive(Clone, Debug)]
struct Cell {
    verts: Vec<Vec<f64>>,
    values: Vec<f64>,
    errors: Vec<f64>,
    order: usize,
}

impl Cell {
    fn priority(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
    }
}

struct Ranked(Cell);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.priority().total_cmp(&other.0.priority()).then(other.0.order.cmp(&self.0.order))
    }
}

fn simplex_volume(verts: &[Vec<f64>]) -> f64 {
    let d = verts.len() - 1;
    if d == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = (1..=d).map(|i| (0..d).map(|j| verts[i][j] - verts[0][j]).collect()).collect();
    let mut det = 1.0;
    for c in 0..d {
        let p = (c..d).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..d {
            let factor = m[r][c] / m[c][c];
            for k in c..d {
                m[r][k] -= factor * m[c][k];
            }
        }
    }
    det.abs() / factorial(d)
}

fn evaluate_cell(rule: &GmRule, f: &VecIntegrand, verts: Vec<Vec<f64>>, m: usize, order: usize) -> Cell {
    let d = verts.len() - 1;
    let volume = simplex_volume(&verts);
    let scale = volume * factorial(d);
    let mut hi = vec![0.0; m];
    let mut lo = vec![0.0; m];
    let mut x = vec![0.0; d];
    let mut out = vec![0.0; m];
    for (k, bary) in rule.points.iter().enumerate() {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = bary.iter().zip(&verts).map(|(b, v)| b * v[j]).sum();
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        f(&x, &mut out);
        for c in 0..m {
            hi[c] += rule.high[k] * out[c];
            lo[c] += rule.low[k] * out[c];
        }
    }
    let values: Vec<f64> = hi.iter().map(|v| v * scale).collect();
    let errors = hi
        .iter()
        .zip(&lo)
        .map(|(a, b)| {
            let e = ((a - b) * scale).abs();
            if e.is_finite() && a.is_finite() {
                e
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Cell { verts, values, errors, order }
}

fn bisect(verts: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = verts.len();
    let mut best = (0, 1, -1.0);
    for a in 0..k {
        for b in a + 1..k {
            let l: f64 = verts[a].iter().zip(&verts[b]).map(|(x, y)| (x - y) * (x - y)).sum();
            if l > best.2 {
                best = (a, b, l);
            }
        }
    }
    let (a, b, _) = best;
    let mid: Vec<f64> = verts[a].iter().zip(&verts[b]).map(|(x, y)| 0.5 * (x + y)).collect();
    let mut left = verts.to_vec();
    left[b] = mid.clone();
    let mut right = verts.to_vec();
    right[a] = mid;
    (left, right)
}

/// Pairwise sum, so the rounding pattern depends only on the input order.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

const SPLIT_BATCH: usize = 16;

/// Adaptive Grundmann–Möller cubature (degree 7 with an embedded degree 5
/// estimate) on an affine simplex given by `d+1` vertices in `R^d`. Cells
/// with the largest error are bisected along their longest edge; a fixed
/// batch size keeps the refinement sequence independent of thread count.
pub fn cubature(verts: &[Vec<f64>], f: &VecIntegrand, m: usize, opts: &QuadOptions) -> Result<VecQuadrature> {
    let d = verts.len().checked_sub(1).ok_or_else(|| Error::Precondition("empty simplex".into()))?;
    if verts.iter().any(|v| v.len() != d) {
        return Err(Error::Precondition("simplex vertices must have d+1 points in R^d".into()));
    }
    if d == 0 {
        let mut out = vec![0.0; m];
        f(&[], &mut out);
        let converged = out.iter().all(|v| v.is_finite());
        return Ok(VecQuadrature {
            errors: vec![if converged { 0.0 } else { f64::INFINITY }; m],
            values: out,
            evals: 1,
            method: QuadMethod::Adaptive,
            seed: None,
            converged,
        });
    }
    let rule = GmRule::new(d);
    let per_cell = rule.points.len();
    let mut counter = 0usize;
    let root = evaluate_cell(&rule, f, verts.to_vec(), m, counter);
    counter += 1;
    let mut evals = per_cell;
    let mut total_v = root.values.clone();
    let mut total_e = root.errors.clone();
    let mut heap = BinaryHeap::new();
    heap.push(Ranked(root));
    let done = |v: &[f64], e: &[f64]| v.iter().zip(e).all(|(v, e)| opts.accepts(*v, *e));
    while !done(&total_v, &total_e) && evals + 2 * per_cell <= opts.max_evals {
        let mut parents = Vec::new();
        while parents.len() < SPLIT_BATCH && evals + 2 * per_cell * (parents.len() + 1) <= opts.max_evals {
            match heap.pop() {
                Some(Ranked(c)) => parents.push(c),
                None => break,
            }
        }
        if parents.is_empty() {
            break;
        }
        let jobs: Vec<(Vec<Vec<f64>>, usize)> = parents
            .iter()
            .flat_map(|p| {
                let (a, b) = bisect(&p.verts);
                [a, b]
            })
            .enumerate()
            .map(|(i, v)| (v, counter + i))
            .collect();
        counter += jobs.len();
        evals += jobs.len() * per_cell;
        let children: Vec<Cell> = jobs.into_par_iter().map(|(v, o)| evaluate_cell(&rule, f, v, m, o)).collect();
        for p in &parents {
            for c in 0..m {
                total_v[c] -= p.values[c];
                total_e[c] -= p.errors[c];
            }
        }
        for ch in children {
            for c in 0..m {
                total_v[c] += ch.values[c];
                total_e[c] += ch.errors[c];
            }
            heap.push(Ranked(ch));
        }
        if total_e.iter().any(|e| !e.is_finite()) {
            // recompute after infinities, which do not cancel under subtraction
            let cells: Vec<&Cell> = heap.iter().map(|r| &r.0).collect();
            for c in 0..m {
                total_e[c] = cells.iter().map(|x| x.errors[c]).sum();
            }
        }
    }
    let mut cells: Vec<Cell> = heap.into_iter().map(|r| r.0).collect();
    cells.sort_by_key(|c| c.order);
    let values: Vec<f64> =
        (0..m).map(|c| pairwise_sum(&cells.iter().map(|x| x.values[c]).collect::<Vec<_>>())).collect();
    let errors: Vec<f64> =
        (0..m).map(|c| pairwise_sum(&cells.iter().map(|x| x.errors[c]).collect::<Vec<_>>())).collect();
    let converged = values.iter().all(|v| v.is_finite()) && done(&values, &errors);
    Ok(VecQuadrature { values, errors, evals, method: QuadMethod::Adaptive, seed: None, converged })
}

const MC_BATCH: usize = 4096;

/// Uniform (Dirichlet(1,...,1)) sampling of the projected simplex. Each
/// batch draws from its own ChaCha stream, so the estimate does not depend
/// on how batches are scheduled.
fn monte_carlo(f: &VecIntegrand, d: usize, m: usize, opts: &QuadOptions) -> VecQuadrature {
    let total = opts.max_evals.max(1);
    let batches = total.div_ceil(MC_BATCH);
    let sums: Vec<(Vec<f64>, Vec<f64>, usize)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(total - b * MC_BATCH);
            let mut s1 = vec![0.0; m];
            let mut s2 = vec![0.0; m];
            let mut e = vec![0.0; d + 1];
            let mut out = vec![0.0; m];
            for _ in 0..count {
                for x in e.iter_mut() {
                    *x = -(1.0 - rng.gen::<f64>()).ln();
                }
                let norm: f64 = e.iter().sum();
                let x: Vec<f64> = e[..d].iter().map(|v| v / norm).collect();
                out.iter_mut().for_each(|o| *o = 0.0);
                f(&x, &mut out);
                for c in 0..m {
                    s1[c] += out[c];
                    s2[c] += out[c] * out[c];
                }
            }
            (s1, s2, count)
        })
        .collect();
    let vol = 1.0 / factorial(d);
    let n = sums.iter().map(|s| s.2).sum::<usize>() as f64;
    let mut values = vec![0.0; m];
    let mut errors = vec![0.0; m];
    for c in 0..m {
        let s1 = pairwise_sum(&sums.iter().map(|s| s.0[c]).collect::<Vec<_>>());
        let s2 = pairwise_sum(&sums.iter().map(|s| s.1[c]).collect::<Vec<_>>());
        let mean = s1 / n;
        let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        values[c] = mean * vol;
        errors[c] = (var / n).sqrt() * vol;
    }
    let converged = values.iter().all(|v| v.is_finite()) && values.iter().zip(&errors).all(|(v, e)| opts.accepts(*v, *e));
    VecQuadrature { values, errors, evals: total, method: QuadMethod::MonteCarlo, seed: Some(opts.seed), converged }
}
