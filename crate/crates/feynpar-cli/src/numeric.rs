//! Numeric commands: regularized integrals, identities, level sets.

use feynpar_core::graph::FeynmanGraph;
use feynpar_core::graph_poly::{case_table_affine, psi};
use feynpar_core::integration::{
    asymptotic_fit, dimreg_series, feynman_identity, feynman_identity_sliced, feynman_u, gelfand_leray_j,
    homogeneous_p, iterated_log_integral, leray_i_epsilon, log_zeta_coeffs, mellin_transform, standard_simplex, Domain,
    FeynmanOptions, GlOptions, LogKind, QuadOptions,
};
use feynpar_core::formats::{case_table_json, parse_poly_lines};
use feynpar_core::integration::levels::FIT_WINDOW;
use feynpar_core::poly::MultiPoly;
use feynpar_core::Error;
use serde_json::{json, Value};

use crate::args::*;
use crate::exact::{load_graph, load_momenta, load_slice, parse_list};
use crate::report::{fmt_f, CmdResult, Failure, Inputs, Outcome, RunInfo, Table, EXIT_TOLERANCE};

const QUAD_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-6;
const LEVEL_TOL: f64 = 1e-4;

fn quad_options(g: &Global, default_tol: f64, run: &mut RunInfo) -> QuadOptions {
    let tol = g.tol.unwrap_or(default_tol);
    run.tolerance = Some(tol);
    run.max_evals = Some(g.max_evals);
    QuadOptions { max_evals: g.max_evals, seed: g.seed, ..QuadOptions::tolerance(tol) }
}

fn gl_options(g: &Global, run: &mut RunInfo) -> GlOptions {
    let tol = g.tol.unwrap_or(LEVEL_TOL);
    run.tolerance = Some(tol);
    GlOptions { tol, ..GlOptions::default() }
}

fn tolerance_failure(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_TOLERANCE, kind: "ToleranceNotReached".into(), message: msg.into() }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn series_table(coeffs: &[f64], errors: &[f64]) -> Table {
    let mut t = Table::new(&["k", "coefficient", "error"]);
    for (k, (c, e)) in coeffs.iter().zip(errors).enumerate() {
        t.push(vec![k.to_string(), fmt_f(*c), fmt_f(*e)]);
    }
    t
}

pub fn dimreg(a: &DimregArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let mom = load_momenta(&a.mom, inputs)?;
    run.order = Some(a.order);
    let opts = FeynmanOptions { quad: quad_options(g, QUAD_TOL, run), allow_divergent: a.allow_divergent };
    let res = dimreg_series(&graph, &mom, a.dimension, a.mu, a.order, &opts)?;
    let table = series_table(&res.coefficients, &res.errors);
    let mut result = to_value(&res);
    result["graph"] = json!(graph.name());
    result["dimension"] = json!(a.dimension);
    result["mu"] = json!(a.mu);
    Ok(Outcome::ok(result).with_table(table))
}

pub fn integrate(a: &IntegrateArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let mom = load_momenta(&a.mom, inputs)?;
    let quad = match a.method {
        MethodArg::Adaptive => quad_options(g, QUAD_TOL, run),
        MethodArg::Mc => {
            run.max_evals = Some(a.samples);
            QuadOptions::monte_carlo(a.samples, g.seed)
        }
    };
    let res = feynman_u(&graph, &mom, a.dimension, &FeynmanOptions { quad, allow_divergent: a.allow_divergent })?;
    let mut result = to_value(&res);
    result["graph"] = json!(graph.name());
    result["dimension"] = json!(a.dimension);
    Ok(Outcome::ok(result))
}

pub fn identity_check(a: &IdentityArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let mom = load_momenta(&a.mom, inputs)?;
    let opts = quad_options(g, IDENTITY_TOL, run);
    let sliced = a.slice.slice.is_some() || a.slice.k.is_some();
    let (report, slice_spec) = if sliced {
        let s = load_slice(&a.slice, graph.num_edges(), g.seed, inputs)?;
        (feynman_identity_sliced(&graph, &mom, a.dimension, &s, &opts)?, Some(s.to_spec()))
    } else {
        (feynman_identity(&graph, &mom, a.dimension, &opts)?, None)
    };
    let passed = report.residual < a.threshold;
    let mut result = to_value(&report);
    result["graph"] = json!(graph.name());
    result["dimension"] = json!(a.dimension);
    result["threshold"] = json!(a.threshold);
    result["passed"] = json!(passed);
    result["slice"] = to_value(&slice_spec);
    let residual = report.residual;
    Ok(Outcome::ok(result).fail_if(!passed, || tolerance_failure(format!("identity residual {residual:e} >= {:e}", a.threshold))))
}

/// `p(x_1, ..., x_{n-1}, 1 - sum x)`: a polynomial on the projected simplex.
fn on_projected_simplex(p: &MultiPoly) -> MultiPoly {
    let n = p.arity();
    let d = n - 1;
    let mut images: Vec<MultiPoly> = (0..d).map(|i| MultiPoly::var(d, i)).collect();
    let mut last = MultiPoly::one(d);
    for i in 0..d {
        last = &last - &MultiPoly::var(d, i);
    }
    images.push(last);
    p.compose(&images)
}

struct LevelProblem {
    label: String,
    f: MultiPoly,
    alpha: MultiPoly,
    domain: Domain,
    /// Pole order and case data when the problem comes from a graph.
    case: Option<(u32, Value)>,
}

fn parse_domain(src: &LevelSource, k: usize) -> CmdResult<Domain> {
    match src.domain {
        Some(DomainArg::Disk) => {
            if k != 2 {
                return Err(Error::ArityMismatch { left: 2, right: k }.into());
            }
            Ok(Domain::Disk { center: [0.0, 0.0], radius: src.radius })
        }
        Some(DomainArg::Box) => {
            let r: Vec<f64> = parse_list(&src.box_range, "box bound")?;
            match r.as_slice() {
                [lo, hi] if lo < hi => Ok(Domain::Box(vec![(*lo, *hi); k])),
                _ => Err(Failure::validation("--box expects `lo,hi` with lo < hi")),
            }
        }
        Some(DomainArg::Simplex) => Ok(Domain::Simplex(standard_simplex(k))),
        None => Err(Failure::validation("--domain is required with --poly")),
    }
}

fn require_positive_grid(lo: f64, hi: f64, points: usize) -> CmdResult<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(Failure::validation("grid needs 0 < min < max and at least 2 points"));
    }
    let r = (hi / lo).ln() / (points - 1) as f64;
    Ok((0..points).map(|i| lo * (r * i as f64).exp()).collect())
}

/// `f` and the density for the level-set commands. In graph mode
/// `gl-mellin` uses `Psi` with density 1, while `leray` uses the affine case
/// table `(f, omega, m)` at dimension `D`.
fn level_problem(src: &LevelSource, case_dim: Option<i64>, inputs: &mut Inputs) -> CmdResult<LevelProblem> {
    if let Some(path) = &src.graph {
        let graph: FeynmanGraph = load_graph(path, inputs)?;
        let n = graph.num_edges();
        if n < 2 {
            return Err(Error::Precondition("level sets need a graph with at least two edges".into()).into());
        }
        let domain = Domain::Simplex(standard_simplex(n - 1));
        let ps = psi(&graph);
        return match case_dim {
            None => Ok(LevelProblem {
                label: graph.name().into(),
                f: on_projected_simplex(&ps),
                alpha: MultiPoly::one(n - 1),
                domain,
                case: None,
            }),
            Some(d) => {
                let mom = load_momenta(&src.mom, inputs)?;
                let ct = case_table_affine(n as i64, d, graph.loop_number() as i64)?;
                let p = homogeneous_p(&graph, &mom)?;
                Ok(LevelProblem {
                    label: graph.name().into(),
                    f: on_projected_simplex(&ct.f.build(&p, &ps)),
                    alpha: on_projected_simplex(&ct.omega.build(&p, &ps)),
                    domain,
                    case: Some((ct.m, case_table_json(&ct))),
                })
            }
        };
    }
    let (label, f) = match (&src.poly, src.toy) {
        (Some(p), _) => ("poly".to_string(), parse_poly_lines(&inputs.read(p)?)?),
        (None, Some(ToyArg::Disk)) => {
            let f = &MultiPoly::var(2, 0).pow(2) + &MultiPoly::var(2, 1).pow(2);
            ("disk".to_string(), f)
        }
        (None, None) => return Err(Failure::validation("give a graph, --poly PATH or --toy")),
    };
    let k = f.arity();
    let alpha = match &src.alpha {
        Some(p) => parse_poly_lines(&inputs.read(p)?)?,
        None => MultiPoly::one(k),
    };
    if alpha.arity() != k {
        return Err(Error::ArityMismatch { left: k, right: alpha.arity() }.into());
    }
    let domain = match (src.toy, src.domain) {
        (Some(ToyArg::Disk), None) => Domain::Disk { center: [0.0, 0.0], radius: src.radius },
        _ => parse_domain(src, k)?,
    };
    Ok(LevelProblem { label, f, alpha, domain, case: None })
}

fn domain_json(d: &Domain) -> Value {
    match d {
        Domain::Simplex(v) => json!({"kind": "simplex", "vertices": v}),
        Domain::Box(b) => json!({"kind": "box", "ranges": b}),
        Domain::Disk { center, radius } => json!({"kind": "disk", "center": center, "radius": radius}),
    }
}

pub fn gl_mellin(a: &GlArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let prob = level_problem(&a.source, None, inputs)?;
    let opts = gl_options(g, run);
    let grid = require_positive_grid(a.s_min, a.s_max, a.points)?;
    let zs: Vec<f64> = parse_list(&a.z, "z")?;
    let samples = gelfand_leray_j(&prob.f, &prob.alpha, &prob.domain, &grid, &opts)?;
    let mut table = Table::new(&["s", "J", "error", "converged"]);
    for s in &samples {
        table.push(vec![fmt_f(s.s), fmt_f(s.value), fmt_f(s.error), s.converged.to_string()]);
    }
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.s, s.value)).collect();
    let names = MultiPoly::default_names(prob.f.arity(), "u");
    let mut result = json!({
        "source": prob.label,
        "f": prob.f.display_with(&names),
        "alpha": prob.alpha.display_with(&names),
        "domain": domain_json(&prob.domain),
        "samples": to_value(&samples),
        "mellin_upper": a.s_max,
        "fit_window": pairs.len().min(FIT_WINDOW),
    });
    let mut failure = None;
    match asymptotic_fit(&pairs[..pairs.len().min(FIT_WINDOW)]) {
        Ok(fit) => result["fit"] = to_value(&fit),
        Err(e) => {
            result["fit"] = Value::Null;
            result["fit_error"] = json!(e.to_string());
            failure = Some(Failure::from(e));
        }
    }
    if failure.is_none() {
        match mellin_transform(&pairs, &zs) {
            Ok(values) => {
                result["mellin"] = Value::Array(zs.iter().zip(&values).map(|(z, v)| json!({"z": z, "value": v})).collect());
            }
            Err(e) => failure = Some(Failure::from(e)),
        }
    }
    let unconverged = samples.iter().filter(|s| !s.converged).count();
    let mut out = Outcome::ok(result).with_table(table);
    out.failure = failure;
    Ok(out.fail_if(unconverged > 0, || tolerance_failure(format!("{unconverged} J(s) samples missed the tolerance"))))
}

pub fn leray(a: &LerayArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let graph_mode = a.source.graph.is_some();
    let prob = level_problem(&a.source, graph_mode.then_some(a.dimension), inputs)?;
    let m = match (&prob.case, a.m) {
        (Some((m, _)), None) => *m,
        (Some(_), Some(_)) => return Err(Failure::validation("--m comes from the case table in graph mode")),
        (None, Some(m)) => m,
        (None, None) => return Err(Failure::validation("--m is required with --poly or --toy")),
    };
    let opts = gl_options(g, run);
    let grid = require_positive_grid(a.eps_min, a.eps_max, a.points)?;
    let report = leray_i_epsilon(&prob.f, &prob.alpha, m, &prob.domain, &grid, &opts)?;
    let mut table = Table::new(&["eps", "I_eps", "interior", "boundary", "error", "converged"]);
    for s in &report.samples {
        table.push(vec![
            fmt_f(s.eps),
            fmt_f(s.value),
            fmt_f(s.interior),
            fmt_f(s.boundary),
            fmt_f(s.error),
            s.converged.to_string(),
        ]);
    }
    let names = MultiPoly::default_names(prob.f.arity(), "u");
    let mut result = to_value(&report);
    result["source"] = json!(prob.label);
    result["f"] = json!(prob.f.display_with(&names));
    result["h"] = json!(prob.alpha.display_with(&names));
    result["domain"] = domain_json(&prob.domain);
    result["case_table"] = prob.case.map(|(_, c)| c).unwrap_or(Value::Null);
    let all_finite = report.samples.iter().all(|s| s.value.is_finite());
    result["all_finite"] = json!(all_finite);
    let unconverged = report.samples.iter().filter(|s| !s.converged).count();
    Ok(Outcome::ok(result)
        .with_table(table)
        .fail_if(unconverged > 0, || tolerance_failure(format!("{unconverged} I_eps samples missed the tolerance"))))
}

pub fn zeta_log(a: &ZetaArgs, g: &Global, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let mom = load_momenta(&a.mom, inputs)?;
    run.order = Some(a.n_max);
    let quad = quad_options(g, QUAD_TOL, run);
    let kind = match a.kind {
        KindArg::Psi => LogKind::Psi,
        KindArg::V => LogKind::V,
    };
    let opts = FeynmanOptions { quad: quad.clone(), allow_divergent: a.allow_divergent };
    let res = log_zeta_coeffs(&graph, &mom, a.dimension, kind, a.n_max, &opts)?;
    if !(a.a > 0.0 && a.b > a.a) {
        return Err(Failure::validation("iterated check needs 0 < a < b"));
    }
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for n in 1..=a.n_max.max(1) {
        let r = iterated_log_integral(a.a, a.b, n, &quad)?;
        let exact = (a.b / a.a).ln().powi(n as i32) / (1..=n).map(|i| i as f64).product::<f64>();
        worst = worst.max((r.value - exact).abs());
        checks.push(json!({"n": n, "value": r.value, "exact": exact, "error_estimate": r.error_estimate}));
    }
    let table = series_table(&res.coefficients, &res.errors);
    let mut result = to_value(&res);
    result["graph"] = json!(graph.name());
    result["dimension"] = json!(a.dimension);
    result["iterated"] = Value::Array(checks);
    result["iterated_max_deviation"] = json!(worst);
    let limit = 10.0 * quad.abs_tol.max(quad.rel_tol) * a.n_max.max(1) as f64;
    Ok(Outcome::ok(result)
        .with_table(table)
        .fail_if(worst > limit, || tolerance_failure(format!("iterated integral deviates by {worst:e}"))))
}
