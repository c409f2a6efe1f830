use std::f64::consts::PI;

use serde::Serialize;

use super::quad1d;
use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, MultiPoly};

/// Integration domains for level-set computations, in slice coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Affine simplex with `k+1` vertices in `R^k`.
    Simplex(Vec<Vec<f64>>),
    Box(Vec<(f64, f64)>),
    Disk { center: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug)]
enum Reference {
    Box(Vec<(f64, f64)>),
    Simplex(usize),
}

#[derive(Clone, Debug)]
enum ChartMap {
    Affine { origin: Vec<f64>, axes: Vec<Vec<f64>>, density: f64 },
    /// `(theta, rho) -> center + rho (cos theta, sin theta)`.
    Polar { center: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
}

/// A parametrized piece of a domain or of its boundary: a reference box or
/// standard simplex mapped into `R^k`, with the volume density of the map.
#[derive(Clone, Debug)]
pub struct Chart {
    reference: Reference,
    map: ChartMap,
}

fn gram_density(axes: &[Vec<f64>]) -> f64 {
    let r = axes.len();
    let mut g: Vec<Vec<f64>> =
        (0..r).map(|i| (0..r).map(|j| axes[i].iter().zip(&axes[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    let mut det = 1.0;
    for c in 0..r {
        let p = (c..r).max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs())).unwrap();
        if g[p][c] == 0.0 {
            return 0.0;
        }
        g.swap(p, c);
        if p != c {
            det = -det;
        }
        det *= g[c][c];
        for i in c + 1..r {
            let k = g[i][c] / g[c][c];
            for j in c..r {
                g[i][j] -= k * g[c][j];
            }
        }
    }
    det.abs().sqrt()
}

fn affine_simplex_chart(verts: &[Vec<f64>]) -> Chart {
    let origin = verts[0].clone();
    let axes: Vec<Vec<f64>> = verts[1..].iter().map(|v| v.iter().zip(&origin).map(|(a, b)| a - b).collect()).collect();
    let density = gram_density(&axes);
    Chart { reference: Reference::Simplex(axes.len()), map: ChartMap::Affine { origin, axes, density } }
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex(v) => v.len().saturating_sub(1),
            Domain::Box(b) => b.len(),
            Domain::Disk { .. } => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Domain::Simplex(v) = self {
            let k = self.dim();
            if v.iter().any(|p| p.len() != k) {
                return Err(Error::Precondition("simplex domain needs k+1 vertices in R^k".into()));
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> Chart {
        match self {
            Domain::Simplex(v) => affine_simplex_chart(v),
            Domain::Box(b) => {
                let k = b.len();
                let axes = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
                Chart {
                    reference: Reference::Box(b.clone()),
                    map: ChartMap::Affine { origin: vec![0.0; k], axes, density: 1.0 },
                }
            }
            Domain::Disk { center, radius } => Chart {
                reference: Reference::Box(vec![(0.0, 2.0 * PI), (0.0, *radius)]),
                map: ChartMap::Polar { center: *center },
            },
        }
    }

    /// Boundary pieces: simplex facets, box faces, or the circle.
    pub fn facets(&self) -> Vec<Chart> {
        match self {
            Domain::Simplex(v) => (0..v.len())
                .map(|j| {
                    let rest: Vec<Vec<f64>> =
                        v.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, p)| p.clone()).collect();
                    affine_simplex_chart(&rest)
                })
                .collect(),
            Domain::Box(b) => {
                let k = b.len();
                let mut out = Vec::new();
                for i in 0..k {
                    for end in [b[i].0, b[i].1] {
                        let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
                        let mut origin = vec![0.0; k];
                        origin[i] = end;
                        let axes =
                            others.iter().map(|&o| (0..k).map(|j| if j == o { 1.0 } else { 0.0 }).collect()).collect();
                        out.push(Chart {
                            reference: Reference::Box(others.iter().map(|&o| b[o]).collect()),
                            map: ChartMap::Affine { origin, axes, density: 1.0 },
                        });
                    }
                }
                out
            }
            Domain::Disk { center, radius } => vec![Chart {
                reference: Reference::Box(vec![(0.0, 2.0 * PI)]),
                map: ChartMap::Circle { center: *center, radius: *radius },
            }],
        }
    }
}

impl Chart {
    fn dim(&self) -> usize {
        match &self.reference {
            Reference::Box(b) => b.len(),
            Reference::Simplex(r) => *r,
        }
    }

    fn bounds(&self, i: usize, prefix: &[f64]) -> (f64, f64) {
        match &self.reference {
            Reference::Box(b) => b[i],
            Reference::Simplex(_) => (0.0, (1.0 - prefix[..i].iter().sum::<f64>()).max(0.0)),
        }
    }

    fn point(&self, x: &[f64]) -> Vec<f64> {
        match &self.map {
            ChartMap::Affine { origin, axes, .. } => {
                let mut u = origin.clone();
                for (xi, a) in x.iter().zip(axes) {
                    for (uj, aj) in u.iter_mut().zip(a) {
                        *uj += xi * aj;
                    }
                }
                u
            }
            ChartMap::Polar { center } => vec![center[0] + x[1] * x[0].cos(), center[1] + x[1] * x[0].sin()],
            ChartMap::Circle { center, radius } => {
                vec![center[0] + radius * x[0].cos(), center[1] + radius * x[0].sin()]
            }
        }
    }

    fn density(&self, x: &[f64]) -> f64 {
        match &self.map {
            ChartMap::Affine { density, .. } => *density,
            ChartMap::Polar { .. } => x[1],
            ChartMap::Circle { radius, .. } => *radius,
        }
    }
}

const ROOT_SAMPLES: usize = 48;

fn bisect_root(phi: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = phi(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = phi(m);
        if (fm <= 0.0) == (fa <= 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Subintervals of `[lo, hi]` on which `phi <= 0`.
fn sublevel_intervals(phi: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..=ROOT_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / ROOT_SAMPLES as f64).collect();
    let inside: Vec<bool> = xs.iter().map(|&x| phi(x) <= 0.0).collect();
    let mut cuts = vec![lo];
    for i in 0..ROOT_SAMPLES {
        if inside[i] != inside[i + 1] {
            cuts.push(bisect_root(phi, xs[i], xs[i + 1]));
        }
    }
    cuts.push(hi);
    cuts.windows(2).filter(|w| w[1] > w[0] && phi(0.5 * (w[0] + w[1])) <= 0.0).map(|w| (w[0], w[1])).collect()
}

struct Sublevel<'a> {
    chart: &'a Chart,
    f: &'a CompiledPoly,
    g: &'a CompiledPoly,
    s: f64,
    tol: f64,
}

impl Sublevel<'_> {
    fn level(&self, i: usize, prefix: &mut Vec<f64>) -> f64 {
        let k = self.chart.dim();
        let (lo, hi) = self.chart.bounds(i, prefix);
        if hi <= lo {
            return 0.0;
        }
        let at = |prefix: &[f64], x: f64| {
            let mut p = prefix.to_vec();
            p.push(x);
            p
        };
        if i + 1 == k {
            let phi = |x: f64| self.f.eval(&self.chart.point(&at(prefix, x))) - self.s;
            let weight = |x: f64| {
                let p = at(prefix, x);
                self.g.eval(&self.chart.point(&p)) * self.chart.density(&p)
            };
            return sublevel_intervals(&phi, lo, hi)
                .into_iter()
                .map(|(a, b)| quad1d::integrate(&weight, a, b, self.tol * 1e-3, 1e-12).0)
                .sum();
        }
        let inner = |x: f64| {
            let mut p = at(prefix, x);
            self.level(i + 1, &mut p)
        };
        let scale = if i == 0 { 1.0 } else { 1e-2 };
        quad1d::integrate(&inner, lo, hi, self.tol * scale, 1e-11).0
    }

    fn value(&self) -> f64 {
        if self.chart.dim() == 0 {
            let u = self.chart.point(&[]);
            return if self.f.eval(&u) <= self.s { self.g.eval(&u) * self.chart.density(&[]) } else { 0.0 };
        }
        self.level(0, &mut Vec::new())
    }
}

/// `A(s) = int_{chart, f <= s} g dvol`.
pub fn sublevel_integral(chart: &Chart, f: &MultiPoly, g: &MultiPoly, s: f64, tol: f64) -> f64 {
    let (fc, gc) = (CompiledPoly::new(f), CompiledPoly::new(g));
    Sublevel { chart, f: &fc, g: &gc, s, tol }.value()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlOptions {
    /// Central-difference step relative to `s`.
    pub step: f64,
    /// Absolute tolerance for each sublevel integral.
    pub quad_tol: f64,
    /// Target error for each `J(s)` sample.
    pub tol: f64,
}

impl Default for GlOptions {
    fn default() -> Self {
        Self { step: 0.04, quad_tol: 1e-10, tol: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn gl_on_chart(chart: &Chart, f: &CompiledPoly, g: &CompiledPoly, s: f64, opts: &GlOptions) -> (f64, f64) {
    let a = |x: f64| Sublevel { chart, f, g, s: x, tol: opts.quad_tol }.value();
    let h = opts.step * s;
    let d1 = (a(s + h) - a(s - h)) / (2.0 * h);
    let d2 = (a(s + h / 2.0) - a(s - h / 2.0)) / h;
    let rich = (4.0 * d2 - d1) / 3.0;
    let err = (rich - d2).abs() / 3.0 + 4.0 * opts.quad_tol / h;
    (rich, err)
}

fn check_arity(f: &MultiPoly, alpha: &MultiPoly, domain: &Domain) -> Result<()> {
    domain.validate()?;
    let k = domain.dim();
    if f.arity() != k || alpha.arity() != k {
        return Err(Error::ArityMismatch { left: k, right: f.arity().max(alpha.arity()) });
    }
    Ok(())
}

/// Gelfand–Leray function `J(s) = d/ds int_{f <= s} alpha` of the density
/// `alpha` (the form `alpha du_1 ... du_k`), by Richardson-refined central
/// differences of sublevel integrals.
pub fn gelfand_leray_j(
    f: &MultiPoly,
    alpha: &MultiPoly,
    domain: &Domain,
    s_grid: &[f64],
    opts: &GlOptions,
) -> Result<Vec<Sample>> {
    check_arity(f, alpha, domain)?;
    if s_grid.iter().any(|&s| s <= 0.0) || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("s grid must be positive and increasing".into()));
    }
    let chart = domain.chart();
    let (fc, gc) = (CompiledPoly::new(f), CompiledPoly::new(alpha));
    Ok(s_grid
        .iter()
        .map(|&s| {
            let (value, error) = gl_on_chart(&chart, &fc, &gc, s, opts);
            Sample { s, value, error, converged: value.is_finite() && error <= opts.tol }
        })
        .collect())
}

/// Gelfand–Leray function of `alpha` on the boundary pieces of the domain,
/// summed; the level sets `f = s` on each facet carry the facet measure.
pub fn boundary_gelfand_leray(f: &MultiPoly, alpha: &MultiPoly, domain: &Domain, s: f64, opts: &GlOptions) -> Result<(f64, f64)> {
    check_arity(f, alpha, domain)?;
    let (fc, gc) = (CompiledPoly::new(f), CompiledPoly::new(alpha));
    let mut total = (0.0, 0.0);
    for chart in domain.facets() {
        if chart.dim() == 0 {
            continue;
        }
        let (v, e) = gl_on_chart(&chart, &fc, &gc, s, opts);
        total.0 += v;
        total.1 += e;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub lambda: f64,
    pub r: u32,
    pub amplitude: f64,
    pub residual: f64,
    /// `-(lambda + 1)`: location of the leading Mellin pole.
    pub pole: f64,
    pub pole_order: u32,
    /// Coefficient of `(z - pole)^{-(r+1)}`: `(-1)^r r! a`.
    pub leading_coefficient: f64,
}

pub const FIT_MIN_SAMPLES: usize = 8;
const FIT_THRESHOLD: f64 = 0.05;

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (icpt, slope, rms)
}

/// Fits `J(s) ~ a s^lambda log(s)^r` for `r` in `{0, 1, 2}` by least squares
/// on `log |J|` against `log s`, keeping the `r` with the smallest residual.
pub fn asymptotic_fit(samples: &[(f64, f64)]) -> Result<AsymptoticFit> {
    if samples.len() < FIT_MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {FIT_MIN_SAMPLES} samples near 0")));
    }
    if samples.iter().any(|&(s, j)| s <= 0.0 || s == 1.0 || j == 0.0 || !j.is_finite()) {
        return Err(Error::FitUnstable(f64::INFINITY));
    }
    let sign = samples[0].1.signum();
    if samples.iter().any(|&(_, j)| j.signum() != sign) {
        return Err(Error::FitUnstable(f64::INFINITY));
    }
    let x: Vec<f64> = samples.iter().map(|&(s, _)| s.ln()).collect();
    let mut best: Option<AsymptoticFit> = None;
    for r in 0..=2u32 {
        let y: Vec<f64> = samples.iter().map(|&(s, j)| j.abs().ln() - r as f64 * s.ln().abs().ln()).collect();
        let (c, lambda, rms) = linear_fit(&x, &y);
        let log_sign = if r % 2 == 1 && samples[0].0 < 1.0 { -1.0 } else { 1.0 };
        let amplitude = sign * log_sign * c.exp();
        let fact: f64 = (1..=r).map(|i| i as f64).product();
        let fit = AsymptoticFit {
            lambda,
            r,
            amplitude,
            residual: rms,
            pole: -(lambda + 1.0),
            pole_order: r + 1,
            leading_coefficient: if r % 2 == 0 { 1.0 } else { -1.0 } * fact * amplitude,
        };
        if best.as_ref().is_none_or(|b| rms < b.residual - 1e-12) {
            best = Some(fit);
        }
    }
    let best = best.expect("three candidates");
    if best.residual > FIT_THRESHOLD {
        return Err(Error::FitUnstable(best.residual));
    }
    Ok(best)
}

/// `int_a^b s^p ds`.
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if (p + 1.0).abs() < 1e-14 {
        (b / a).ln()
    } else {
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

/// `int_0^{s0} s^q log(s)^r ds` for `q > -1`.
fn tail_integral(q: f64, r: u32, s0: f64) -> f64 {
    let p = q + 1.0;
    let l = s0.ln();
    let base = s0.powf(p);
    match r {
        0 => base / p,
        1 => base * (l / p - 1.0 / (p * p)),
        _ => base * (l * l / p - 2.0 * l / (p * p) + 2.0 / (p * p * p)),
    }
}

pub const FIT_WINDOW: usize = 12;

/// `F(z) = int_0^{s_max} s^z J(s) ds`: product integration of the piecewise
/// linear interpolant of the samples, plus the fitted leading term below the
/// smallest sample.
pub fn mellin_transform(samples: &[(f64, f64)], z_list: &[f64]) -> Result<Vec<f64>> {
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) || samples.first().is_none_or(|s| s.0 <= 0.0) {
        return Err(Error::Precondition("samples must have increasing positive s".into()));
    }
    let fit = asymptotic_fit(&samples[..samples.len().min(FIT_WINDOW)])?;
    let bound = fit.pole;
    z_list
        .iter()
        .map(|&z| {
            if z <= bound + 1e-9 {
                return Err(Error::ConvergenceDomain { z, bound });
            }
            let s0 = samples[0].0;
            let mut total = fit.amplitude * tail_integral(z + fit.lambda, fit.r, s0);
            for w in samples.windows(2) {
                let ((a, ja), (b, jb)) = (w[0], w[1]);
                let slope = (jb - ja) / (b - a);
                total += (ja - slope * a) * power_integral(z, a, b) + slope * power_integral(z + 1.0, a, b);
            }
            Ok(total)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeraySample {
    pub eps: f64,
    pub value: f64,
    pub interior: f64,
    pub boundary: f64,
    pub error: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LerayReport {
    pub m: u32,
    pub samples: Vec<LeraySample>,
    /// Fitted blow-up order: `I_eps ~ c eps^{-nu}`.
    pub nu: f64,
    pub amplitude: f64,
    pub fit_residual: f64,
    pub within_bound: bool,
    /// `m = 1`: the boundary form has no pole and is evaluated as is.
    pub degenerate_boundary: bool,
}

pub const LERAY_NU_SLACK: f64 = 0.15;

/// `I_eps` for the form `h du / f^m` on the domain: the level-set integral
/// `eps^{-m} J_h(eps)` plus `eps^{-(m-1)}` times the Gelfand–Leray function
/// of `h` on the boundary pieces. The blow-up order is fitted on the
/// smallest half of the grid.
pub fn leray_i_epsilon(
    f: &MultiPoly,
    h: &MultiPoly,
    m: u32,
    domain: &Domain,
    eps_grid: &[f64],
    opts: &GlOptions,
) -> Result<LerayReport> {
    if m == 0 {
        return Err(Error::Precondition("pole order m must be positive".into()));
    }
    let interior = gelfand_leray_j(f, h, domain, eps_grid, opts)?;
    let mut samples = Vec::new();
    for s in interior {
        let (bj, be) = boundary_gelfand_leray(f, h, domain, s.s, opts)?;
        let pi = s.s.powi(-(m as i32));
        let pb = s.s.powi(-(m as i32 - 1));
        let value = pi * s.value + pb * bj;
        let error = pi * s.error + pb * be;
        samples.push(LeraySample {
            eps: s.s,
            value,
            interior: pi * s.value,
            boundary: pb * bj,
            error,
            converged: value.is_finite() && s.converged && be <= opts.tol,
        });
    }
    let half = (samples.len() / 2).max(3).min(samples.len());
    let window: Vec<&LeraySample> = samples[..half].iter().filter(|s| s.value.abs() > 1e-300).collect();
    let (nu, amplitude, fit_residual) = if window.len() < 2 {
        (0.0, 0.0, 0.0)
    } else {
        let x: Vec<f64> = window.iter().map(|s| s.eps.ln()).collect();
        let y: Vec<f64> = window.iter().map(|s| s.value.abs().ln()).collect();
        let (c, slope, rms) = linear_fit(&x, &y);
        (-slope, c.exp(), rms)
    };
    Ok(LerayReport {
        m,
        within_bound: nu <= m as f64 + LERAY_NU_SLACK,
        samples,
        nu,
        amplitude,
        fit_residual,
        degenerate_boundary: m == 1,
    })
}
