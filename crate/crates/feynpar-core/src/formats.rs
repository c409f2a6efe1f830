//! JSON input formats shared by the command line and the Python bindings.
//!
//! Exact rationals are strings `"num/den"` (or plain integers).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{AllOnePi, DivergencePredicate, FeynmanGraph, GraphDescription, PowerCounting};
use crate::graph_poly::{CaseTableResult, MomentumData};
use crate::hopf::{Character, GenId, HopfAlgebra, QSeries, EXACT};
use crate::poly::{MultiPoly, QuotientDim};
use crate::rational::{fmt_q, parse_q, Q};
use crate::slicing::{FeynmanSubspace, MilnorReport, SingularPoint};

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// `{labels: [...], gram: [["num/den", ...], ...], mass2?: "num/den"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramFile {
    pub labels: Vec<String>,
    pub gram: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass2: Option<String>,
}

impl GramFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "Gram JSON")
    }

    pub fn to_momenta(&self) -> Result<MomentumData> {
        let gram = self.gram.iter().map(|r| r.iter().map(|s| parse_q(s)).collect()).collect::<Result<Vec<Vec<Q>>>>()?;
        let mut mom = MomentumData::gram(self.labels.clone(), gram)?;
        if let Some(m2) = &self.mass2 {
            mom = mom.with_mass2(parse_q(m2)?);
        }
        Ok(mom)
    }
}

/// Momenta from a Gram file, or the two-leg shorthand `p2` (symbolic when
/// neither is given); `m2` overrides the mass.
pub fn momenta_from(gram: Option<&str>, p2: Option<&str>, m2: Option<&str>) -> Result<MomentumData> {
    let mut mom = match (gram, p2) {
        (Some(_), Some(_)) => return Err(Error::Parse("give either a Gram matrix or p2, not both".into())),
        (Some(text), None) => GramFile::parse(text)?.to_momenta()?,
        (None, Some(p)) => MomentumData::two_leg(parse_q(p)?),
        (None, None) => MomentumData::two_leg_symbolic(),
    };
    if let Some(m) = m2 {
        mom = mom.with_mass2(parse_q(m)?);
    }
    Ok(mom)
}

pub fn parse_graph(text: &str) -> Result<FeynmanGraph> {
    FeynmanGraph::from_json(text)
}

/// `{lo, coeffs: ["num/den", ...], hi?}`; a missing `hi` means exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub lo: i64,
    pub coeffs: Vec<String>,
    #[serde(default)]
    pub hi: Option<i64>,
}

impl SeriesSpec {
    pub fn to_series(&self) -> Result<QSeries> {
        let coeffs = self.coeffs.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>>>()?;
        Ok(QSeries::from_coeffs(self.lo, coeffs, self.hi.unwrap_or(EXACT)))
    }
}

/// JSON view of a series: exponent/coefficient pairs and the truncation order.
pub fn series_json(s: &QSeries) -> Value {
    let terms: Vec<Value> = s.terms().iter().map(|(k, c)| json!([k, fmt_q(c)])).collect();
    json!({
        "terms": terms,
        "hi": if s.is_exact() { Value::Null } else { json!(s.hi()) },
        "display": s.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSpec {
    PowerCounting,
    All1pi,
}

/// Abstract generator: `coproduct` lists reduced terms `[left, right, coeff]`
/// by generator name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractSpec {
    pub name: String,
    pub grade: usize,
    #[serde(default)]
    pub coproduct: Vec<(Vec<String>, Vec<String>, String)>,
}

/// A character on the algebra generated by the listed graphs and abstract
/// generators. Values are keyed by generator name; generators without an
/// entry take `default`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterSpec {
    #[serde(default = "default_rule")]
    pub rule: RuleSpec,
    #[serde(default = "default_dimension")]
    pub dimension: i64,
    #[serde(default)]
    pub graphs: Vec<GraphDescription>,
    #[serde(default)]
    pub generators: Vec<AbstractSpec>,
    #[serde(default)]
    pub values: BTreeMap<String, SeriesSpec>,
    #[serde(default)]
    pub default: Option<SeriesSpec>,
}

fn default_rule() -> RuleSpec {
    RuleSpec::PowerCounting
}

fn default_dimension() -> i64 {
    4
}

/// Algebra, character and the ids of the top-level inputs, in input order.
pub struct BuiltCharacter {
    pub algebra: HopfAlgebra,
    pub character: Character<Q>,
    pub roots: Vec<GenId>,
}

impl CharacterSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "character spec")
    }

    pub fn build(&self) -> Result<BuiltCharacter> {
        let rule: Arc<dyn DivergencePredicate> = match self.rule {
            RuleSpec::PowerCounting => Arc::new(PowerCounting { dimension: self.dimension }),
            RuleSpec::All1pi => Arc::new(AllOnePi),
        };
        let mut h = HopfAlgebra::new(rule);
        let mut roots = Vec::new();
        for a in &self.generators {
            let find = |names: &[String], h: &HopfAlgebra| -> Result<Vec<GenId>> {
                names
                    .iter()
                    .map(|n| h.find_by_name(n).ok_or_else(|| Error::Parse(format!("unknown generator `{n}`"))))
                    .collect()
            };
            let reduced = a
                .coproduct
                .iter()
                .map(|(l, r, c)| Ok((find(l, &h)?, find(r, &h)?, parse_q(c)?)))
                .collect::<Result<Vec<_>>>()?;
            roots.push(h.add_abstract(&a.name, a.grade, reduced)?);
        }
        for d in &self.graphs {
            let g = FeynmanGraph::validate(d.clone())?;
            let mono = h.insert_graph(&g)?;
            if mono.len() != 1 {
                return Err(Error::Precondition(format!("graph `{}` must be connected", g.name())));
            }
            roots.push(mono[0]);
        }
        for name in self.values.keys() {
            if h.find_by_name(name).is_none() {
                return Err(Error::Parse(format!("value for unknown generator `{name}`")));
            }
        }
        let default = self.default.as_ref().map(SeriesSpec::to_series).transpose()?;
        let mut phi = Character::default();
        for id in 0..h.len() {
            let name = &h.generator(id).name;
            let s = match (self.values.get(name), &default) {
                (Some(v), _) => v.to_series()?,
                (None, Some(d)) => d.clone(),
                (None, None) => return Err(Error::Precondition(format!("no value for generator `{name}`"))),
            };
            phi.set(id, s);
        }
        Ok(BuiltCharacter { algebra: h, character: phi, roots })
    }
}

/// Polynomial from the line format, with the arity read off the first line.
pub fn parse_poly_lines(text: &str) -> Result<MultiPoly> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::Parse("empty polynomial file".into()))?;
    let arity = first.split_once(':').map(|(_, e)| e.split_whitespace().count()).unwrap_or(0);
    MultiPoly::deserialize(text, arity)
}

pub fn quotient_json(d: &QuotientDim) -> Value {
    match d {
        QuotientDim::Finite(k) => json!(k),
        QuotientDim::Infinite => json!("infinite"),
    }
}

pub fn point_json(p: &SingularPoint) -> Value {
    match p {
        SingularPoint::Exact(x) => json!({"kind": "exact", "coords": x.iter().map(fmt_q).collect::<Vec<_>>()}),
        SingularPoint::Numeric { coords, radius } => json!({"kind": "numeric", "coords": coords, "radius": radius}),
    }
}

pub fn milnor_json(r: &MilnorReport) -> Value {
    let names = MultiPoly::default_names(r.restricted.arity(), "u");
    json!({
        "restricted": r.restricted.display_with(&names),
        "points": r.points.iter().map(|p| json!({
            "point": point_json(&p.point),
            "milnor_mu": p.milnor_mu.as_ref().map(quotient_json),
        })).collect::<Vec<_>>(),
        "total": quotient_json(&r.total),
        "transversal": r.transversal,
    })
}

pub fn subspace_json(s: &FeynmanSubspace) -> Value {
    json!({
        "dimension": s.dimension,
        "exponent": s.exponent,
        "products": s.products,
        "dim": s.dim,
        "certificates": s.certificates,
    })
}

pub fn case_table_json(c: &CaseTableResult) -> Value {
    json!({
        "regime": c.regime.tag(),
        "size": c.size,
        "dimension": c.dimension,
        "loops": c.loops,
        "f": c.f.display(),
        "deg_f": c.deg_f(),
        "m": c.m,
        "omega": c.omega.display(),
        "h": c.h.map(|h| h.display()),
        "c": c.c,
        "r_max": c.r_max,
    })
}
