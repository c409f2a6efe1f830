use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::cubature::{cubature, integrate_simplex_vec, QuadOptions, QuadratureResult, VecQuadrature};
use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::graph_poly::{v_function, MomentumData};
use crate::poly::CompiledPoly;
use crate::rational::{fmt_q, q, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanOptions {
    pub quad: QuadOptions,
    /// Skip the probe ladder and integrate regardless.
    pub allow_divergent: bool,
}

impl Default for FeynmanOptions {
    fn default() -> Self {
        Self { quad: QuadOptions::default(), allow_divergent: false }
    }
}

/// `Gamma(a0 + s z) (4 pi)^(b0 + s z)` in dimension `D + z`, kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub gamma_argument: Q,
    pub four_pi_exponent: Q,
    /// Common `z` slope `-l/2` of both arguments.
    pub z_slope: Q,
}

impl Prefactor {
    pub fn new(edges: usize, dimension: i64, loops: usize) -> Self {
        let l = Q::from_integer(loops.into());
        let d = Q::from_integer(dimension.into());
        Self {
            gamma_argument: Q::from_integer(edges.into()) - &d * &l / q(2),
            four_pi_exponent: -(&d * &l) / q(2),
            z_slope: -l / q(2),
        }
    }

    /// `Gamma` has a pole at `z = 0`.
    pub fn has_pole(&self) -> bool {
        self.gamma_argument.is_integer() && !self.gamma_argument.is_positive()
    }

    pub fn display(&self) -> String {
        let lin = |c: &Q| {
            if self.z_slope.is_zero() {
                fmt_q(c)
            } else {
                format!("{} - {} z", fmt_q(c), fmt_q(&-self.z_slope.clone()))
            }
        };
        format!("Gamma({}) (4 pi)^({})", lin(&self.gamma_argument), lin(&self.four_pi_exponent))
    }
}

impl Serialize for Prefactor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Prefactor", 5)?;
        st.serialize_field("gamma_argument", &fmt_q(&self.gamma_argument))?;
        st.serialize_field("four_pi_exponent", &fmt_q(&self.four_pi_exponent))?;
        st.serialize_field("z_slope", &fmt_q(&self.z_slope))?;
        st.serialize_field("gamma_pole", &self.has_pole())?;
        st.serialize_field("display", &self.display())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeynmanIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: usize,
    pub prefactor: Prefactor,
    pub quadrature: QuadratureResult,
}

/// The parametric integrand `G = Psi^{-D/2} V^{-(n - D l/2)}` on the simplex.
struct Parametric {
    n: usize,
    psi: CompiledPoly,
    p_eff: CompiledPoly,
    psi_exp: f64,
    v_exp: f64,
}

impl Parametric {
    fn new(g: &FeynmanGraph, mom: &MomentumData, dimension: i64) -> Result<Self> {
        if mom.is_symbolic() {
            return Err(Error::Precondition("numeric momenta are required for integration".into()));
        }
        let (p_eff, psi) = v_function(g, mom)?;
        let n = g.num_edges();
        let l = g.loop_number() as f64;
        Ok(Self {
            n,
            psi: CompiledPoly::new(&psi),
            p_eff: CompiledPoly::new(&p_eff),
            psi_exp: -(dimension as f64) / 2.0,
            v_exp: -(n as f64 - dimension as f64 * l / 2.0),
        })
    }

    /// `(G, Psi, V)` at `t`.
    fn eval(&self, t: &[f64]) -> (f64, f64, f64) {
        let psi = self.psi.eval(t);
        let v = self.p_eff.eval(t) / psi;
        let g = psi.powf(self.psi_exp) * if self.v_exp == 0.0 { 1.0 } else { v.powf(self.v_exp) };
        (g, psi, v)
    }

    /// Geometric probe ladder: approach the centroid of every proper face
    /// from the simplex centroid and estimate the growth exponent of `G`.
    fn probe(&self) -> Result<()> {
        let n = self.n;
        let centre = vec![1.0 / n as f64; n];
        let (g0, psi0, v0) = self.eval(&centre);
        if !(g0.is_finite() && psi0 > 0.0 && v0 > 0.0) {
            return Err(Error::DivergentConfiguration("integrand is not finite and positive at the centroid".into()));
        }
        for mask in 1u64..(1u64 << n) - 1 {
            let size = mask.count_ones() as usize;
            if n > PROBE_FULL_EDGES && size > 3 && size + 3 < n {
                continue;
            }
            let face: Vec<f64> =
                (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 / size as f64 } else { 0.0 }).collect();
            let codim = (n - size) as f64;
            let mut values = Vec::with_capacity(PROBE_LADDER.len());
            for &delta in &PROBE_LADDER {
                let t: Vec<f64> = face.iter().zip(&centre).map(|(f, c)| (1.0 - delta) * f + delta * c).collect();
                let (g, psi, v) = self.eval(&t);
                if !g.is_finite() || psi <= 0.0 || v <= 0.0 {
                    return Err(Error::DivergentConfiguration(format!("integrand is singular near the face {}", face_name(mask, n))));
                }
                values.push(g.abs());
            }
            let (first, last) = (values[0], values[values.len() - 1]);
            if first > 0.0 && last > 0.0 {
                let growth = (last / first).ln() / (PROBE_LADDER[0] / PROBE_LADDER[PROBE_LADDER.len() - 1]).ln();
                if growth >= codim - PROBE_MARGIN {
                    return Err(Error::DivergentConfiguration(format!(
                        "integrand grows like delta^-{growth:.3} near the face {} of codimension {codim}",
                        face_name(mask, n)
                    )));
                }
            }
        }
        Ok(())
    }
}

const PROBE_LADDER: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];
const PROBE_MARGIN: f64 = 0.05;
/// Above this edge count only faces of size at most 3 or codimension at most 3 are probed.
const PROBE_FULL_EDGES: usize = 10;

fn face_name(mask: u64, n: usize) -> String {
    let idx: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| format!("t{}", i + 1)).collect();
    format!("{{{}}}", idx.join(","))
}

fn prepare(g: &FeynmanGraph, mom: &MomentumData, dimension: i64, opts: &FeynmanOptions) -> Result<Parametric> {
    let par = Parametric::new(g, mom, dimension)?;
    if !opts.allow_divergent {
        par.probe()?;
    }
    Ok(par)
}

/// `int_Sigma Psi^{-D/2} V^{-(n - D l/2)}` with the Gamma and `4 pi`
/// factors reported separately.
pub fn feynman_u(g: &FeynmanGraph, mom: &MomentumData, dimension: i64, opts: &FeynmanOptions) -> Result<FeynmanIntegral> {
    let par = prepare(g, mom, dimension, opts)?;
    let f = |t: &[f64], out: &mut [f64]| out[0] = par.eval(t).0;
    let res = integrate_simplex_vec(&f, par.n, 1, &opts.quad)?.require()?.component(0);
    Ok(FeynmanIntegral {
        value: res.value,
        error_estimate: res.error_estimate,
        evals: res.evals,
        prefactor: Prefactor::new(g.num_edges(), dimension, g.loop_number()),
        quadrature: res,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    /// `c_0, ..., c_K` of the expansion in `z`, mass-scale factor included.
    pub coefficients: Vec<f64>,
    pub errors: Vec<f64>,
    pub log_mu: f64,
    pub loops: usize,
    pub evals: usize,
    pub prefactor: Prefactor,
}

/// Multiplies a truncated series by `exp(-z l log mu)`; errors propagate
/// through the absolute values of the factor's coefficients.
pub fn apply_mass_scale(coeffs: &[f64], errors: &[f64], loops: usize, log_mu: f64) -> (Vec<f64>, Vec<f64>) {
    let a = -(loops as f64) * log_mu;
    let mut e = vec![1.0];
    for j in 1..coeffs.len() {
        e.push(e[j - 1] * a / j as f64);
    }
    let c = (0..coeffs.len()).map(|k| (0..=k).map(|j| e[j] * coeffs[k - j]).sum()).collect();
    let err = (0..coeffs.len()).map(|k| (0..=k).map(|j| e[j].abs() * errors[k - j]).sum()).collect();
    (c, err)
}

/// Coefficients `c_k = int G L^k / k!` with `L = -log(Psi)/2 + (l/2) log V`,
/// times `exp(-z l log mu)`.
pub fn dimreg_series(
    g: &FeynmanGraph,
    mom: &MomentumData,
    dimension: i64,
    mu: f64,
    order: usize,
    opts: &FeynmanOptions,
) -> Result<SeriesResult> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Precondition(format!("mass scale must be positive, got {mu}")));
    }
    let par = prepare(g, mom, dimension, opts)?;
    let half_l = g.loop_number() as f64 / 2.0;
    let f = |t: &[f64], out: &mut [f64]| {
        let (gv, psi, v) = par.eval(t);
        let l = -0.5 * psi.ln() + half_l * v.ln();
        let mut term = gv;
        for (k, o) in out.iter_mut().enumerate() {
            if k > 0 {
                term *= l / k as f64;
            }
            *o = term;
        }
    };
    let res = integrate_simplex_vec(&f, par.n, order + 1, &opts.quad)?.require()?;
    let log_mu = mu.ln();
    let (coefficients, errors) = apply_mass_scale(&res.values, &res.errors, g.loop_number(), log_mu);
    Ok(SeriesResult {
        coefficients,
        errors,
        log_mu,
        loops: g.loop_number(),
        evals: res.evals,
        prefactor: Prefactor::new(g.num_edges(), dimension, g.loop_number()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogKind {
    Psi,
    V,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaResult {
    pub kind: LogKind,
    /// `zeta_0, ..., zeta_N`.
    pub coefficients: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
}

/// `zeta_n = int (log X)^n / n! G` over the full simplex, `X = Psi` or `V`,
/// with `G` the parametric integrand.
pub fn log_zeta_coeffs(
    g: &FeynmanGraph,
    mom: &MomentumData,
    dimension: i64,
    kind: LogKind,
    n_max: usize,
    opts: &FeynmanOptions,
) -> Result<ZetaResult> {
    let par = prepare(g, mom, dimension, opts)?;
    let f = |t: &[f64], out: &mut [f64]| {
        let (gv, psi, v) = par.eval(t);
        let x = match kind {
            LogKind::Psi => psi.ln(),
            LogKind::V => v.ln(),
        };
        let mut term = gv;
        for (k, o) in out.iter_mut().enumerate() {
            if k > 0 {
                term *= x / k as f64;
            }
            *o = term;
        }
    };
    let res: VecQuadrature = integrate_simplex_vec(&f, par.n, n_max + 1, &opts.quad)?.require()?;
    Ok(ZetaResult { kind, coefficients: res.values, errors: res.errors, evals: res.evals })
}

/// `int_{a <= s_1 <= ... <= s_n <= b} ds_1/s_1 ... ds_n/s_n` by cubature on
/// the ordered region, an affine `n`-simplex.
pub fn iterated_log_integral(a: f64, b: f64, n: usize, opts: &QuadOptions) -> Result<QuadratureResult> {
    if !(a > 0.0 && b > a) {
        return Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    let verts: Vec<Vec<f64>> = (0..=n).map(|j| (0..n).map(|i| if i + j >= n { b } else { a }).collect()).collect();
    let f = |s: &[f64], out: &mut [f64]| out[0] = s.iter().map(|x| 1.0 / x).product();
    Ok(cubature(&verts, &f, 1, opts)?.require()?.component(0))
}
