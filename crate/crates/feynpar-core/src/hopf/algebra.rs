use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::decoration::{codim_singular_locus, restrict_to_coordinates, Atom, SliceDecoration};
use crate::error::{Error, Result};
use crate::graph::{DivergencePredicate, FeynmanGraph, PowerCounting, Subgraph};
use crate::rational::Q;

pub type GenId = usize;

/// Commutative monomial in the generators: sorted ids with repetition.
pub type Mono = Vec<GenId>;

/// Linear combination of monomials; the empty monomial is the unit.
pub type Element = BTreeMap<Mono, Q>;

/// Linear combination of pure tensors.
pub type Tensor = BTreeMap<(Mono, Mono), Q>;

pub type Tensor3 = BTreeMap<(Mono, Mono, Mono), Q>;

#[derive(Clone, Debug)]
pub enum GeneratorKind {
    Graph { graph: FeynmanGraph, decoration: Option<Atom> },
    Abstract,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub key: String,
    pub grade: usize,
    pub loops: usize,
    pub kind: GeneratorKind,
    /// `Delta(x) - x (x) 1 - 1 (x) x`.
    pub reduced: Vec<(Mono, Mono, Q)>,
}

/// Which grading a flow or an operator `Y` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Edges,
    Loops,
}

impl Generator {
    pub fn degree(&self, grading: Grading) -> usize {
        match grading {
            Grading::Edges => self.grade,
            Grading::Loops => self.loops,
        }
    }

    pub fn graph(&self) -> Option<&FeynmanGraph> {
        match &self.kind {
            GeneratorKind::Graph { graph, .. } => Some(graph),
            GeneratorKind::Abstract => None,
        }
    }
}

/// Free commutative Hopf algebra on connected (optionally decorated)
/// graphs, with the subgraph/quotient coproduct for a divergence rule.
///
/// Generators are registered together with everything their coproduct
/// mentions, so every generator's reduced coproduct only involves
/// generators with smaller ids.
#[derive(Clone)]
pub struct HopfAlgebra {
    gens: Vec<Generator>,
    index: HashMap<String, GenId>,
    rule: Arc<dyn DivergencePredicate>,
    caps: HashMap<String, usize>,
}

impl fmt::Debug for HopfAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HopfAlgebra").field("rule", &self.rule.name()).field("generators", &self.gens.len()).finish()
    }
}

impl Default for HopfAlgebra {
    fn default() -> Self {
        Self::new(Arc::new(PowerCounting { dimension: 4 }))
    }
}

impl HopfAlgebra {
    pub fn new(rule: Arc<dyn DivergencePredicate>) -> Self {
        Self { gens: Vec::new(), index: HashMap::new(), rule, caps: HashMap::new() }
    }

    pub fn rule(&self) -> &dyn DivergencePredicate {
        self.rule.as_ref()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.gens[id]
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn find(&self, key: &str) -> Option<GenId> {
        self.index.get(key).copied()
    }

    /// Generator id by display name (first match).
    pub fn find_by_name(&self, name: &str) -> Option<GenId> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Register an abstract generator with a prescribed reduced coproduct.
    /// All generators it mentions must already exist.
    pub fn add_abstract(&mut self, name: &str, grade: usize, reduced: Vec<(Mono, Mono, Q)>) -> Result<GenId> {
        let key = format!("abstract:{name}");
        if self.index.contains_key(&key) {
            return Err(Error::Precondition(format!("generator `{name}` already exists")));
        }
        let id = self.gens.len();
        let mut cleaned = Vec::new();
        for (mut l, mut r, c) in reduced {
            if l.is_empty() || r.is_empty() {
                return Err(Error::Precondition("reduced coproduct terms need nontrivial factors".into()));
            }
            if let Some(&bad) = l.iter().chain(&r).find(|&&g| g >= id) {
                return Err(Error::Precondition(format!("unknown generator id {bad}")));
            }
            let gl: usize = l.iter().map(|&g| self.gens[g].grade).sum();
            let gr: usize = r.iter().map(|&g| self.gens[g].grade).sum();
            if gl + gr != grade {
                return Err(Error::Precondition(format!("term of grade {} in a coproduct of grade {grade}", gl + gr)));
            }
            l.sort_unstable();
            r.sort_unstable();
            cleaned.push((l, r, c));
        }
        self.gens.push(Generator {
            name: name.to_string(),
            key: key.clone(),
            grade,
            loops: grade,
            kind: GeneratorKind::Abstract,
            reduced: cleaned,
        });
        self.index.insert(key, id);
        Ok(id)
    }

    /// Add a graph (split into connected components) and return it as a monomial.
    pub fn insert_graph(&mut self, g: &FeynmanGraph) -> Result<Mono> {
        let all = Subgraph::from_indices(g, (0..g.num_edges()).collect())?;
        let mut mono = Vec::new();
        for comp in all.components(g) {
            let cg = if comp.len() == g.num_edges() { g.clone() } else { comp.to_graph(g) };
            mono.push(self.insert_connected(&cg, None)?);
        }
        if mono.is_empty() {
            return Err(Error::Precondition("graph without internal edges is the unit".into()));
        }
        mono.sort_unstable();
        Ok(mono)
    }

    pub fn element_of_graph(&mut self, g: &FeynmanGraph) -> Result<Element> {
        Ok(monomial_element(self.insert_graph(g)?))
    }

    /// Add the decorated element `sum_i w_i (g, Pi_i)` for a connected graph.
    pub fn insert_decorated(&mut self, g: &FeynmanGraph, sigma: &SliceDecoration) -> Result<Element> {
        if g.num_components() != 1 {
            return Err(Error::Precondition("decorated generators must be connected".into()));
        }
        let cap = self.cap(g)?;
        let mut out = Element::new();
        for (w, atom) in sigma.atoms() {
            if atom.arity() != g.num_edges() {
                return Err(Error::ArityMismatch { left: g.num_edges(), right: atom.arity() });
            }
            if atom.dim() == 0 {
                return Err(Error::Precondition("decoration atoms must be nonzero subspaces".into()));
            }
            if atom.dim() > cap {
                return Err(Error::DecorationDimension { dim: atom.dim(), cap });
            }
            let id = self.insert_connected(g, Some(atom.clone()))?;
            add_to(&mut out, vec![id], w.clone());
        }
        Ok(out)
    }

    /// `codim Sing` cap of a connected graph, cached by key.
    pub fn cap(&mut self, g: &FeynmanGraph) -> Result<usize> {
        let key = g.canonical_key();
        if let Some(&c) = self.caps.get(&key) {
            return Ok(c);
        }
        let c = codim_singular_locus(g)?;
        self.caps.insert(key, c);
        Ok(c)
    }

    fn insert_connected(&mut self, g: &FeynmanGraph, decoration: Option<Atom>) -> Result<GenId> {
        let key = match &decoration {
            None => g.canonical_key(),
            Some(a) => format!("{}|{}", g.canonical_key(), a.key_in_id_order(g)),
        };
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let mut reduced = Vec::new();
        for sub in g.divergent_subgraphs(self.rule.as_ref())? {
            let quotient = g.contract(&sub);
            let mut kept = true;
            let mut left = Vec::new();
            let mut pieces = Vec::new();
            for comp in sub.components(g) {
                let cg = comp.to_graph(g);
                let atom = match &decoration {
                    None => None,
                    Some(a) => match self.restricted_atom(a, comp.edge_indices(), &cg)? {
                        Some(r) => Some(r),
                        None => {
                            kept = false;
                            break;
                        }
                    },
                };
                pieces.push((cg, atom));
            }
            if !kept {
                continue;
            }
            let rest: Vec<usize> = (0..g.num_edges()).filter(|i| !sub.edge_indices().contains(i)).collect();
            let qatom = match &decoration {
                None => None,
                Some(a) => match self.restricted_atom(a, &rest, &quotient)? {
                    Some(r) => Some(r),
                    None => continue,
                },
            };
            for (cg, atom) in pieces {
                left.push(self.insert_connected(&cg, atom)?);
            }
            let right = vec![self.insert_connected(&quotient, qatom)?];
            left.sort_unstable();
            reduced.push((left, right, Q::one()));
        }
        let id = self.gens.len();
        let name = match &decoration {
            None => g.name().to_string(),
            Some(a) => format!("{}{{{}}}", g.name(), a),
        };
        self.gens.push(Generator {
            name,
            key: key.clone(),
            grade: g.num_edges(),
            loops: g.loop_number(),
            kind: GeneratorKind::Graph { graph: g.clone(), decoration },
            reduced,
        });
        self.index.insert(key, id);
        Ok(id)
    }

    /// `Pi cap A^{E(piece)}` in the piece's coordinates, or `None` when the
    /// term is dropped (zero subspace, or above the piece's cap).
    fn restricted_atom(&mut self, a: &Atom, edges: &[usize], piece: &FeynmanGraph) -> Result<Option<Atom>> {
        let r = restrict_to_coordinates(a, edges);
        if r.dim() == 0 {
            return Ok(None);
        }
        let cap = self.cap(piece)?;
        Ok((r.dim() <= cap).then_some(r))
    }

    pub fn mono_grade(&self, m: &[GenId]) -> usize {
        m.iter().map(|&g| self.gens[g].grade).sum()
    }

    pub fn mono_degree(&self, m: &[GenId], grading: Grading) -> usize {
        m.iter().map(|&g| self.gens[g].degree(grading)).sum()
    }

    /// Full coproduct of one generator.
    pub fn coproduct_generator(&self, id: GenId) -> Tensor {
        let mut t = Tensor::new();
        add_to2(&mut t, (vec![id], vec![]), Q::one());
        add_to2(&mut t, (vec![], vec![id]), Q::one());
        for (l, r, c) in &self.gens[id].reduced {
            add_to2(&mut t, (l.clone(), r.clone()), c.clone());
        }
        t
    }

    pub fn coproduct_mono(&self, m: &[GenId]) -> Tensor {
        let mut acc = Tensor::new();
        acc.insert((vec![], vec![]), Q::one());
        for &g in m {
            acc = tensor_mul(&acc, &self.coproduct_generator(g));
        }
        acc
    }

    /// Algebra-map extension of the coproduct.
    pub fn coproduct(&self, x: &Element) -> Tensor {
        let mut out = Tensor::new();
        for (m, c) in x {
            for (k, v) in self.coproduct_mono(m) {
                add_to2(&mut out, k, v * c);
            }
        }
        out
    }

    /// `(Delta (x) id) Delta`.
    pub fn coassoc_left(&self, x: &Element) -> Tensor3 {
        let mut out = Tensor3::new();
        for ((a, b), c) in self.coproduct(x) {
            for ((a1, a2), c2) in self.coproduct_mono(&a) {
                add_to3(&mut out, (a1, a2, b.clone()), &c * c2);
            }
        }
        out
    }

    /// `(id (x) Delta) Delta`.
    pub fn coassoc_right(&self, x: &Element) -> Tensor3 {
        let mut out = Tensor3::new();
        for ((a, b), c) in self.coproduct(x) {
            for ((b1, b2), c2) in self.coproduct_mono(&b) {
                add_to3(&mut out, (a.clone(), b1, b2), &c * c2);
            }
        }
        out
    }

    /// Counit: the coefficient of the unit.
    pub fn counit(&self, x: &Element) -> Q {
        x.get(&Vec::new()).cloned().unwrap_or_else(Q::zero)
    }

    /// `S(x) = -x - sum S(x') x''` on every generator, in id order.
    pub fn antipode_table(&self) -> Vec<Element> {
        let mut table: Vec<Element> = Vec::with_capacity(self.gens.len());
        for (id, g) in self.gens.iter().enumerate() {
            let mut s = monomial_element(vec![id]);
            s.values_mut().for_each(|c| *c = -c.clone());
            for (l, r, c) in &g.reduced {
                let sl = antipode_mono_with(&table, l);
                let prod = mul_elements(&sl, &monomial_element(r.clone()));
                for (m, v) in prod {
                    add_to(&mut s, m, -(v * c));
                }
            }
            table.push(s);
        }
        table
    }

    pub fn antipode(&self, x: &Element) -> Element {
        let table = self.antipode_table();
        let mut out = Element::new();
        for (m, c) in x {
            for (k, v) in antipode_mono_with(&table, m) {
                add_to(&mut out, k, v * c);
            }
        }
        out
    }

    /// `m (S (x) id) Delta (x)`; equals `eps(x) 1` by the antipode axiom.
    pub fn antipode_left_check(&self, x: &Element) -> Element {
        let table = self.antipode_table();
        let mut out = Element::new();
        for ((a, b), c) in self.coproduct(x) {
            for (m, v) in mul_elements(&antipode_mono_with(&table, &a), &monomial_element(b)) {
                add_to(&mut out, m, v * &c);
            }
        }
        out
    }

    /// `m (id (x) S) Delta (x)`.
    pub fn antipode_right_check(&self, x: &Element) -> Element {
        let table = self.antipode_table();
        let mut out = Element::new();
        for ((a, b), c) in self.coproduct(x) {
            for (m, v) in mul_elements(&monomial_element(a), &antipode_mono_with(&table, &b)) {
                add_to(&mut out, m, v * &c);
            }
        }
        out
    }

    pub fn display_mono(&self, m: &[GenId]) -> String {
        if m.is_empty() {
            return "1".into();
        }
        m.iter().map(|&g| self.gens[g].name.as_str()).collect::<Vec<_>>().join("*")
    }

    pub fn display_tensor(&self, t: &Tensor) -> String {
        if t.is_empty() {
            return "0".into();
        }
        t.iter()
            .map(|((a, b), c)| {
                let body = format!("{} (x) {}", self.display_mono(a), self.display_mono(b));
                if c.is_one() {
                    body
                } else {
                    format!("{} {}", crate::rational::fmt_q(c), body)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn display_element(&self, x: &Element) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.iter()
            .map(|(m, c)| {
                if c.is_one() {
                    self.display_mono(m)
                } else {
                    format!("{} {}", crate::rational::fmt_q(c), self.display_mono(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn antipode_mono_with(table: &[Element], m: &[GenId]) -> Element {
    let mut acc = monomial_element(vec![]);
    for &g in m {
        acc = mul_elements(&acc, &table[g]);
    }
    acc
}

pub fn monomial_element(m: Mono) -> Element {
    let mut e = Element::new();
    e.insert(m, Q::one());
    e
}

pub fn mono_mul(a: &[GenId], b: &[GenId]) -> Mono {
    let mut m: Mono = a.iter().chain(b).copied().collect();
    m.sort_unstable();
    m
}

pub fn mul_elements(a: &Element, b: &Element) -> Element {
    let mut out = Element::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_to(&mut out, mono_mul(ma, mb), ca * cb);
        }
    }
    out
}

fn tensor_mul(a: &Tensor, b: &Tensor) -> Tensor {
    let mut out = Tensor::new();
    for ((a1, a2), ca) in a {
        for ((b1, b2), cb) in b {
            add_to2(&mut out, (mono_mul(a1, b1), mono_mul(a2, b2)), ca * cb);
        }
    }
    out
}

pub fn add_to(e: &mut Element, m: Mono, c: Q) {
    add_entry(e, m, c);
}

fn add_to2(t: &mut Tensor, k: (Mono, Mono), c: Q) {
    add_entry(t, k, c);
}

fn add_to3(t: &mut Tensor3, k: (Mono, Mono, Mono), c: Q) {
    add_entry(t, k, c);
}

fn add_entry<K: Ord>(map: &mut BTreeMap<K, Q>, k: K, c: Q) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::banana;

    #[test]
    fn restriction_above_piece_cap_is_dropped() {
        let mut h = HopfAlgebra::default();
        let b4 = banana(4);
        let six = Atom::full(6);
        // the four banana coordinates of a 6-dimensional atom: dimension 4 > cap 3
        assert_eq!(h.cap(&b4).unwrap(), 3);
        assert!(h.restricted_atom(&six, &[0, 1, 2, 3], &b4).unwrap().is_none());
        assert!(h.restricted_atom(&six, &[0, 1], &crate::graph::builders::bubble()).unwrap().is_some());
    }
}
