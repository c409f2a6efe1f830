use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::momentum::{MomentumData, MomentumMode, VertexMomenta};
use crate::error::{Error, Result};
use crate::graph::FeynmanGraph;
use crate::linalg::{inverse, QMatrix};
use crate::poly::{det_polynomial, gcd, MultiPoly, PolyMatrix};
use crate::rational::{q, qf, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMethod {
    Det,
    Trees,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PMethod {
    CutSets,
    Trees,
}

/// `M_kr = sum_i t_i eta_ik eta_ir` over the canonical cycle basis.
pub fn kirchhoff_matrix(g: &FeynmanGraph) -> PolyMatrix {
    let n = g.num_edges();
    let eta = g.circuit_matrix();
    let l = g.loop_number();
    let mut m = vec![vec![MultiPoly::zero(n); l]; l];
    for (i, row) in eta.iter().enumerate() {
        let t = MultiPoly::var(n, i);
        for k in 0..l {
            if row[k] == 0 {
                continue;
            }
            for r in 0..l {
                if row[r] != 0 {
                    m[k][r] = &m[k][r] + &t.scale(&q(row[k] * row[r]));
                }
            }
        }
    }
    m
}

pub fn psi(g: &FeynmanGraph) -> MultiPoly {
    psi_polynomial(g, PsiMethod::Det).expect("determinant method cannot fail")
}

/// First Symanzik (Kirchhoff) polynomial.
pub fn psi_polynomial(g: &FeynmanGraph, method: PsiMethod) -> Result<MultiPoly> {
    let n = g.num_edges();
    match method {
        PsiMethod::Det => Ok(det_polynomial(&kirchhoff_matrix(g), n)),
        PsiMethod::Trees => {
            let mut p = MultiPoly::zero(n);
            for t in g.spanning_trees()? {
                p.add_term(complement_exps(n, &t), Q::one());
            }
            Ok(p)
        }
    }
}

fn complement_exps(n: usize, tree: &[usize]) -> Vec<u32> {
    let mut e = vec![1u32; n];
    for &i in tree {
        e[i] = 0;
    }
    e
}

/// Coefficient monomial for `s`: a constant, or `s * p2` in symbolic mode.
fn s_term(n: usize, symbolic: bool, s: Q, edges: Vec<u32>) -> MultiPoly {
    let mut e = edges;
    if symbolic {
        e.push(1);
    }
    debug_assert_eq!(e.len(), n + symbolic as usize);
    MultiPoly::monomial(e, s)
}

/// Second Symanzik polynomial `P = sum_C s_C prod_{e in C} t_e`.
///
/// The tree method sums over pairs (T, e' in T) with weight `1/kappa`, where
/// `kappa` counts the edges of the cut set that join the two sides of
/// `T \ e'`, so that each cut set appears once.
pub fn second_symanzik(g: &FeynmanGraph, mom: &MomentumData, method: PMethod) -> Result<MultiPoly> {
    let vm = VertexMomenta::resolve(g, mom)?;
    let n = g.num_edges();
    let symbolic = mom.is_symbolic();
    let arity = mom.poly_arity(n);
    let mut p = MultiPoly::zero(arity);
    match method {
        PMethod::CutSets => {
            for c in g.cut_sets()? {
                let v = vm.side_vector(&c.side_a);
                let s = vm.pairing(&v, &v);
                if s.is_zero() {
                    continue;
                }
                let mut e = vec![0u32; n];
                for &i in &c.edges {
                    e[i] = 1;
                }
                p = &p + &s_term(n, symbolic, s, e);
            }
        }
        PMethod::Trees => {
            for t in g.spanning_trees()? {
                for &ep in &t {
                    let forest: Vec<bool> = (0..n).map(|i| i != ep && t.contains(&i)).collect();
                    let comp = g.components_with(Some(&forest));
                    let side: Vec<usize> = (0..g.num_vertices()).filter(|&v| comp[v] == comp[0]).collect();
                    let v = vm.side_vector(&side);
                    let s = vm.pairing(&v, &v);
                    if s.is_zero() {
                        continue;
                    }
                    let mut e = complement_exps(n, &t);
                    e[ep] = 1;
                    let kappa = (0..n)
                        .filter(|&i| e[i] == 1)
                        .filter(|&i| {
                            let (a, b) = g.endpoints(i);
                            comp[a] != comp[b]
                        })
                        .count();
                    p = &p + &s_term(n, symbolic, s / q(kappa as i64), e);
                }
            }
        }
    }
    Ok(p)
}

/// `(P_eff, Psi)` with `V = P_eff / Psi` on the simplex; `P_eff = P + m^2 Psi`.
pub fn v_function(g: &FeynmanGraph, mom: &MomentumData) -> Result<(MultiPoly, MultiPoly)> {
    let p = second_symanzik(g, mom, PMethod::CutSets)?;
    let psi = psi(g).extend_arity(p.arity());
    let eff = &p + &psi.scale(&mom.mass2);
    Ok((eff, psi))
}

/// `p^T R(t) p` at a rational point via the reduced vertex matrix (first
/// vertex deleted), `D_vw = sum_e eps_ve eps_we / t_e`.
pub fn r_form_value(g: &FeynmanGraph, mom: &MomentumData, t: &[Q]) -> Result<Q> {
    if mom.is_symbolic() {
        return Err(Error::Precondition("R form needs numeric momenta".into()));
    }
    if t.len() != g.num_edges() {
        return Err(Error::ArityMismatch { left: g.num_edges(), right: t.len() });
    }
    let vm = VertexMomenta::resolve(g, mom)?;
    let nv = g.num_vertices();
    let mut d: QMatrix = vec![vec![Q::zero(); nv - 1]; nv - 1];
    for i in 0..g.num_edges() {
        let (s, tg) = g.endpoints(i);
        if s == tg {
            continue;
        }
        if t[i].is_zero() {
            return Err(Error::SingularAtPoint);
        }
        let w = Q::one() / &t[i];
        for (a, sa) in [(s, -1i64), (tg, 1)] {
            for (b, sb) in [(s, -1i64), (tg, 1)] {
                if a > 0 && b > 0 {
                    d[a - 1][b - 1] += &w * q(sa * sb);
                }
            }
        }
    }
    let dinv = inverse(&d).ok_or(Error::SingularAtPoint)?;
    let mut total = Q::zero();
    for v in 1..nv {
        for w in 1..nv {
            if dinv[v - 1][w - 1].is_zero() {
                continue;
            }
            total += vm.pairing(&vm.per_vertex[v], &vm.per_vertex[w]) * &dinv[v - 1][w - 1];
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericCheck {
    pub label: String,
    pub coprime: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericReport {
    pub holds: bool,
    pub reason: Option<String>,
    pub checks: Vec<GenericCheck>,
}

/// Whether `Psi` and `P` share no common factor.
///
/// Symbolic two-leg mode decides this exactly over `Q[p^2][t]`; Gram mode
/// checks the given momenta plus eight seeded perturbations that keep the
/// conservation law.
pub fn generic_condition(g: &FeynmanGraph, mom: &MomentumData, seed: u64) -> Result<GenericReport> {
    let p = second_symanzik(g, mom, PMethod::CutSets)?;
    if p.is_zero() {
        return Ok(GenericReport { holds: false, reason: Some("P vanishes".into()), checks: vec![] });
    }
    let coprime = |p: &MultiPoly| gcd(&psi(g).extend_arity(p.arity()), p).is_constant();
    let mut checks = vec![GenericCheck {
        label: if mom.is_symbolic() { "symbolic p^2".into() } else { "given momenta".into() },
        coprime: coprime(&p),
    }];
    if let MomentumMode::Gram { labels, gram } = &mom.mode {
        let total = VertexMomenta::resolve(g, mom)?.side_vector(&(0..g.num_vertices()).collect::<Vec<_>>());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..8 {
            let pert = perturb_gram(gram, &total, &mut rng);
            let m2 = MomentumData::gram(labels.clone(), pert)?;
            let pp = second_symanzik(g, &m2, PMethod::CutSets)?;
            checks.push(GenericCheck {
                label: format!("perturbation {trial}"),
                coprime: !pp.is_zero() && coprime(&pp),
            });
        }
    }
    let holds = checks.iter().all(|c| c.coprime);
    let reason = (!holds).then(|| "common factor found".to_string());
    Ok(GenericReport { holds, reason, checks })
}

/// `G + Pi B^T B Pi` with `Pi` the projector orthogonal to the total momentum
/// coefficient vector, so the perturbation keeps `G c = 0`.
fn perturb_gram(gram: &QMatrix, total: &[Q], rng: &mut ChaCha8Rng) -> QMatrix {
    let k = gram.len();
    let cc: Q = total.iter().map(|x| x * x).sum();
    let proj: QMatrix = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let id = if i == j { Q::one() } else { Q::zero() };
                    if cc.is_zero() {
                        id
                    } else {
                        id - &total[i] * &total[j] / &cc
                    }
                })
                .collect()
        })
        .collect();
    let b: QMatrix = (0..k).map(|_| (0..k).map(|_| qf(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect()).collect();
    let bp = crate::linalg::mat_mul(&b, &proj);
    let btb = crate::linalg::mat_mul(&crate::linalg::transpose(&bp), &bp);
    (0..k).map(|i| (0..k).map(|j| &gram[i][j] + &btb[i][j]).collect()).collect()
}

/// Variable names for polynomials produced under `mom`.
pub fn variable_names(n: usize, mom: &MomentumData) -> Vec<String> {
    let mut names = MultiPoly::default_names(n, "t");
    if mom.is_symbolic() {
        names.push("p2".into());
    }
    names
}

/// Render with a trailing `p2` variable printed first in each monomial.
pub fn display_poly(p: &MultiPoly, names: &[String]) -> String {
    let n = p.arity();
    if names.last().map(|s| s.as_str()) == Some("p2") && n >= 1 {
        let images: Vec<MultiPoly> = (0..n).map(|j| MultiPoly::var(n, if j + 1 == n { 0 } else { j + 1 })).collect();
        let mut reordered = vec![names[n - 1].clone()];
        reordered.extend_from_slice(&names[..n - 1]);
        p.compose(&images).display_with(&reordered)
    } else {
        p.display_with(names)
    }
}
