//! Exact commands: polynomials, Hopf algebra, slicing, point counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use feynpar_core::formats::{
    milnor_json, momenta_from, parse_graph, parse_poly_lines, quotient_json, series_json, subspace_json, CharacterSpec,
};
use feynpar_core::graph::{builders, AllOnePi, DivergencePredicate, FeynmanGraph, PowerCounting};
use feynpar_core::graph_poly::{
    display_poly, exact_invariants, psi, second_symanzik, v_function, variable_names, MomentumData, PMethod,
};
use feynpar_core::hopf::{
    birkhoff, compose_antipode, connection_data, convolution, mu_prefactored, renormalized_value, Element, Grading,
    HopfAlgebra,
};
use feynpar_core::poly::{finite_field_point_count, MultiPoly};
use feynpar_core::rational::{fmt_q, parse_q, Q};
use feynpar_core::slicing::{feynman_subspace_dim, make_slice, milnor_number, milnor_report, LinearSlice, SliceSpec};
use feynpar_core::Error;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::args::*;
use crate::report::{CmdResult, Failure, Inputs, Outcome, Table};

pub fn load_graph(path: &Path, inputs: &mut Inputs) -> CmdResult<FeynmanGraph> {
    Ok(parse_graph(&inputs.read(path)?)?)
}

pub fn load_momenta(a: &MomentumArgs, inputs: &mut Inputs) -> CmdResult<MomentumData> {
    let gram = inputs.read_opt(a.gram.as_ref())?;
    Ok(momenta_from(gram.as_deref(), a.p2.as_deref(), a.m2.as_deref())?)
}

pub fn load_slice(a: &SliceArgs, ambient: usize, seed: u64, inputs: &mut Inputs) -> CmdResult<LinearSlice> {
    match (&a.slice, a.k) {
        (Some(p), _) => {
            let text = inputs.read(p)?;
            let spec: SliceSpec =
                serde_json::from_str(&text).map_err(|e| Failure::from(Error::Parse(format!("slice JSON: {e}"))))?;
            if spec.ambient != ambient {
                return Err(Error::ArityMismatch { left: ambient, right: spec.ambient }.into());
            }
            Ok(LinearSlice::from_spec(&spec)?)
        }
        (None, Some(k)) => Ok(make_slice(ambient, k, seed)?),
        (None, None) => Err(Failure::validation("give --slice PATH or --k K")),
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CmdResult<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| Failure::validation(format!("bad {what} entry `{x}`"))))
        .collect()
}

fn poly_json(p: &MultiPoly, names: &[String]) -> Value {
    let names = &names[..p.arity().min(names.len())];
    json!({"display": display_poly(p, names), "serialized": p.serialize()})
}

pub fn poly(a: &PolyArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let g = load_graph(&a.graph, inputs)?;
    let mom = load_momenta(&a.mom, inputs)?;
    let names = variable_names(g.num_edges(), &mom);
    let ps = psi(&g);
    let p = second_symanzik(&g, &mom, PMethod::CutSets)?;
    let mut result = json!({
        "graph": g.name(),
        "edges": g.num_edges(),
        "vertices": g.num_vertices(),
        "loops": g.loop_number(),
        "variables": names,
        "psi": poly_json(&ps, &names),
        "p": poly_json(&p, &names),
        "mass2": fmt_q(&mom.mass2),
    });
    if !mom.mass2.is_zero() {
        let (p_eff, _) = v_function(&g, &mom)?;
        result["p_eff"] = poly_json(&p_eff, &names);
    }
    Ok(Outcome::ok(result))
}

fn graph_files(path: &Path) -> CmdResult<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Failure::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::validation(format!("no graph JSON files in {}", path.display())));
    }
    Ok(files)
}

pub fn check(a: &CheckArgs, g: &crate::args::Global, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let mut graphs = Vec::new();
    let mut table = Table::new(&["graph", "check", "passed", "detail"]);
    let (mut total, mut failed) = (0usize, 0usize);
    for f in graph_files(&a.path)? {
        let graph = load_graph(&f, inputs)?;
        let checks = exact_invariants(&graph, g.seed, a.points)?;
        total += checks.len();
        failed += checks.iter().filter(|c| !c.passed).count();
        for c in &checks {
            table.push(vec![c.graph.clone(), c.name.clone(), c.passed.to_string(), c.detail.clone().unwrap_or_default()]);
        }
        graphs.push(json!({
            "graph": graph.name(),
            "passed": checks.iter().all(|c| c.passed),
            "checks": checks,
        }));
    }
    let result = json!({"graphs": graphs, "total_checks": total, "failed": failed, "points": a.points});
    Ok(Outcome::ok(result)
        .with_table(table)
        .fail_if(failed > 0, || Failure::validation(format!("{failed} invariant checks failed"))))
}

fn algebra_for(graph: &FeynmanGraph, a: &HopfGraphArgs) -> CmdResult<(HopfAlgebra, Element)> {
    let rule: Arc<dyn DivergencePredicate> = match a.rule {
        RuleArg::PowerCounting => {
            let dimension = a.dimension.or(graph.theory().dimension).unwrap_or(4);
            Arc::new(PowerCounting { dimension })
        }
        RuleArg::All1pi => Arc::new(AllOnePi),
    };
    let mut h = HopfAlgebra::new(rule);
    let x = h.element_of_graph(graph)?;
    Ok((h, x))
}

fn generators_json(h: &HopfAlgebra) -> Value {
    Value::Array(
        (0..h.len())
            .map(|i| {
                let gen = h.generator(i);
                json!({"id": i, "name": gen.name, "grade": gen.grade, "loops": gen.loops})
            })
            .collect(),
    )
}

fn is_unit_multiple(x: &Element, eps: &Q) -> bool {
    let nonzero: Vec<_> = x.iter().filter(|(_, c)| !c.is_zero()).collect();
    match nonzero.as_slice() {
        [] => eps.is_zero(),
        [(m, c)] => m.is_empty() && *c == eps,
        _ => false,
    }
}

pub fn coproduct(a: &HopfGraphArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let (h, x) = algebra_for(&graph, a)?;
    let delta = h.coproduct(&x);
    let result = json!({
        "element": h.display_element(&x),
        "coproduct": h.display_tensor(&delta),
        "terms": delta.len(),
        "coassociative": h.coassoc_left(&x) == h.coassoc_right(&x),
        "counit": fmt_q(&h.counit(&x)),
        "generators": generators_json(&h),
    });
    Ok(Outcome::ok(result))
}

pub fn antipode(a: &HopfGraphArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let (h, x) = algebra_for(&graph, a)?;
    let s = h.antipode(&x);
    let eps = h.counit(&x);
    let left = is_unit_multiple(&h.antipode_left_check(&x), &eps);
    let right = is_unit_multiple(&h.antipode_right_check(&x), &eps);
    let result = json!({
        "element": h.display_element(&x),
        "antipode": h.display_element(&s),
        "terms": s.len(),
        "left_axiom": left,
        "right_axiom": right,
        "generators": generators_json(&h),
    });
    Ok(Outcome::ok(result).fail_if(!(left && right), || Failure::validation("antipode axiom failed")))
}

fn load_spec(path: &Path, inputs: &mut Inputs) -> CmdResult<feynpar_core::formats::BuiltCharacter> {
    Ok(CharacterSpec::parse(&inputs.read(path)?)?.build()?)
}

pub fn birkhoff_cmd(a: &SpecArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let b = load_spec(&a.spec, inputs)?;
    let h = &b.algebra;
    let bk = birkhoff(h, &b.character)?;
    let rebuilt = convolution(h, &compose_antipode(h, &bk.minus)?, &bk.plus)?;
    let mut gens = Vec::new();
    let mut all_ok = true;
    for id in 0..h.len() {
        let gen = h.generator(id);
        let phi = b.character.get(id).expect("spec builds a value for every generator");
        let (minus, plus) = (bk.minus.get(id), bk.plus.get(id));
        let reconstructed = rebuilt.get(&id).is_some_and(|r| r.agrees_with(phi));
        let pole_free = plus.is_some_and(|p| p.is_pole_free());
        all_ok &= reconstructed && pole_free;
        gens.push(json!({
            "id": id,
            "name": gen.name,
            "grade": gen.grade,
            "phi": series_json(phi),
            "minus": minus.map(series_json),
            "plus": plus.map(series_json),
            "reconstructed": reconstructed,
            "plus_pole_free": pole_free,
        }));
    }
    let result = json!({"generators": gens, "consistent": all_ok});
    Ok(Outcome::ok(result).fail_if(!all_ok, || Failure::validation("Birkhoff factorization is inconsistent")))
}

pub fn renorm(a: &RenormArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let b = load_spec(&a.spec, inputs)?;
    let h = &b.algebra;
    let phi = match &a.log_mu {
        Some(l) => mu_prefactored(h, &b.character, &parse_q(l)?),
        None => b.character.clone(),
    };
    let bk = birkhoff(h, &phi)?;
    let mut values = Vec::new();
    let mut table = Table::new(&["name", "value", "counterterm"]);
    for &id in &b.roots {
        let r = renormalized_value(h, &bk, id)?;
        let name = &h.generator(id).name;
        table.push(vec![name.clone(), fmt_q(&r.value), r.counterterm.to_string()]);
        values.push(json!({
            "name": name,
            "value": fmt_q(&r.value),
            "counterterm": series_json(&r.counterterm),
        }));
    }
    let result = json!({"log_mu": a.log_mu, "renormalized": values, "generators": h.len()});
    Ok(Outcome::ok(result).with_table(table))
}

pub fn connection(a: &ConnectionArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let b = load_spec(&a.spec, inputs)?;
    let h = &b.algebra;
    let grading = match a.grading {
        GradingArg::Loops => Grading::Loops,
        GradingArg::Edges => Grading::Edges,
    };
    let cd = connection_data(h, &b.character, grading)?;
    let gens: Vec<Value> = (0..h.len())
        .map(|id| {
            json!({
                "name": h.generator(id).name,
                "a": cd.a.get(id).map(series_json),
                "b": cd.b.get(id).map(series_json),
                "residual": cd.residuals.get(&id).map(series_json),
            })
        })
        .collect();
    let grading_name = match grading {
        Grading::Loops => "loops",
        Grading::Edges => "edges",
    };
    let result = json!({"grading": grading_name, "generators": gens, "residual": cd.residual});
    Ok(Outcome::ok(result))
}

pub fn slice(a: &SliceCmdArgs, g: &crate::args::Global, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let s = make_slice(graph.num_edges(), a.k, g.seed)?;
    let spec = s.to_spec();
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&spec).expect("slice spec serializes") + "\n";
        fs::write(out, text).map_err(|e| Failure::io(out, e))?;
    }
    let names = MultiPoly::default_names(a.k, "u");
    let restricted = feynpar_core::slicing::restrict(&psi(&graph), &s)?;
    let result = json!({
        "graph": graph.name(),
        "slice": spec,
        "restricted_psi": restricted.display_with(&names),
    });
    Ok(Outcome::ok(result))
}

pub fn milnor(a: &MilnorArgs, g: &crate::args::Global, inputs: &mut Inputs) -> CmdResult<Outcome> {
    if let Some(path) = &a.poly {
        let f = parse_poly_lines(&inputs.read(path)?)?;
        if let Some(pt) = &a.point {
            let point = pt.split(',').map(|x| parse_q(x.trim())).collect::<Result<Vec<Q>, _>>()?;
            let mu = milnor_number(&f, &point)?;
            let result = json!({
                "poly": f.display_with(&MultiPoly::default_names(f.arity(), "u")),
                "point": point.iter().map(fmt_q).collect::<Vec<_>>(),
                "milnor_mu": quotient_json(&mu),
            });
            return Ok(Outcome::ok(result));
        }
        let s = load_slice(&a.slice, f.arity(), g.seed, inputs)?;
        let report = milnor_report(&f, &s)?;
        return Ok(Outcome::ok(json!({"slice": s.to_spec(), "report": milnor_json(&report)})));
    }
    let path = a.graph.as_ref().expect("clap requires a graph or --poly");
    let graph = load_graph(path, inputs)?;
    let s = load_slice(&a.slice, graph.num_edges(), g.seed, inputs)?;
    let report = milnor_report(&psi(&graph), &s)?;
    Ok(Outcome::ok(json!({"graph": graph.name(), "slice": s.to_spec(), "report": milnor_json(&report)})))
}

pub fn feynman_subspace(a: &SubspaceArgs, g: &crate::args::Global, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let graph = load_graph(&a.graph, inputs)?;
    let s = load_slice(&a.slice, graph.num_edges(), g.seed, inputs)?;
    let dims: Vec<u32> = parse_list(&a.dims, "dimension")?;
    let subs = feynman_subspace_dim(&graph, &s, &dims)?;
    let result = json!({
        "graph": graph.name(),
        "slice": s.to_spec(),
        "subspaces": subs.iter().map(subspace_json).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(result))
}

pub fn count_points(a: &CountArgs, inputs: &mut Inputs) -> CmdResult<Outcome> {
    let (label, f) = match (&a.graph, &a.poly) {
        (Some(p), _) => {
            let graph = load_graph(p, inputs)?;
            (graph.name().to_string(), psi(&graph))
        }
        (None, Some(p)) => ("poly".to_string(), parse_poly_lines(&inputs.read(p)?)?),
        (None, None) => return Err(Failure::validation("give a graph or --poly")),
    };
    let qs: Vec<u64> = parse_list(&a.q, "field size")?;
    let homogeneous = f.is_homogeneous();
    let mut rows = Vec::new();
    let mut table = Table::new(&["q", "affine", "projective"]);
    let mut consistent = true;
    for &q in &qs {
        let affine = finite_field_point_count(&f, q, false)?;
        let projective = if homogeneous { Some(finite_field_point_count(&f, q, true)?) } else { None };
        if let Some(pr) = projective {
            consistent &= affine - 1 == (q - 1) * pr;
        }
        table.push(vec![q.to_string(), affine.to_string(), projective.map(|p| p.to_string()).unwrap_or_default()]);
        rows.push(json!({"q": q, "affine": affine, "projective": projective}));
    }
    let result = json!({
        "source": label,
        "poly": f.display_with(&MultiPoly::default_names(f.arity(), "t")),
        "homogeneous": homogeneous,
        "counts": rows,
        "cone_identity": if homogeneous { json!(consistent) } else { Value::Null },
    });
    Ok(Outcome::ok(result)
        .with_table(table)
        .fail_if(!consistent, || Failure::validation("affine and projective counts disagree")))
}

/// Character specs, a Gram file and toy polynomials written next to the graphs.
fn corpus_specs() -> Vec<(&'static str, String)> {
    let toy = json!({
        "generators": [
            {"name": "x1", "grade": 1},
            {"name": "x2", "grade": 2, "coproduct": [[["x1"], ["x1"], "1"]]}
        ],
        "values": {
            "x1": {"lo": -1, "coeffs": ["1"]},
            "x2": {"lo": -2, "coeffs": ["1"]}
        }
    });
    let nested = json!({
        "rule": "power-counting",
        "dimension": 4,
        "graphs": [builders::nested_two_loop().description()],
        "default": {"lo": -1, "coeffs": ["1", "1/2", "1/3"]}
    });
    let gram = json!({
        "labels": ["p1", "p2", "p3"],
        "gram": [["2", "-1", "-1"], ["-1", "2", "-1"], ["-1", "-1", "2"]]
    });
    let disk = MultiPoly::from_terms(2, [(vec![2, 0], Q::from_integer(1.into())), (vec![0, 2], Q::from_integer(1.into()))]);
    let cusp = MultiPoly::from_terms(2, [(vec![2, 0], Q::from_integer(1.into())), (vec![0, 3], Q::from_integer(1.into()))]);
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("spec serializes") + "\n";
    vec![
        ("toy-two-generator.json", pretty(&toy)),
        ("nested-character.json", pretty(&nested)),
        ("triangle-gram.json", pretty(&gram)),
        ("disk.poly", disk.serialize()),
        ("cusp.poly", cusp.serialize()),
    ]
}

pub fn corpus(a: &CorpusArgs) -> CmdResult<Outcome> {
    let specs_dir = a.dir.join("specs");
    fs::create_dir_all(&specs_dir).map_err(|e| Failure::io(&specs_dir, e))?;
    let mut written = Vec::new();
    for g in builders::corpus() {
        let path = a.dir.join(format!("{}.json", g.name()));
        fs::write(&path, g.to_json() + "\n").map_err(|e| Failure::io(&path, e))?;
        written.push(format!("{}.json", g.name()));
    }
    for (name, text) in corpus_specs() {
        let path = specs_dir.join(name);
        fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        written.push(format!("specs/{name}"));
    }
    Ok(Outcome::ok(json!({"dir": a.dir.display().to_string(), "files": written})))
}
