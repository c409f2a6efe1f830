use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::momentum::MomentumData;
use super::symanzik::{psi, psi_polynomial, r_form_value, second_symanzik, PMethod, PsiMethod};
use crate::error::Result;
use crate::graph::FeynmanGraph;
use crate::linalg::{mat_mul, transpose, QMatrix};
use crate::poly::MultiPoly;
use crate::rational::{q, qf, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub graph: String,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Gram data with one label per distinct leg momentum: `Pi B^T B Pi` for a
/// seeded integer `B`, with `Pi` projecting out the total momentum so the
/// conservation law holds.
pub fn auto_gram(g: &FeynmanGraph, seed: u64) -> Result<MomentumData> {
    let mut labels: Vec<String> = Vec::new();
    for l in g.legs() {
        let (_, label) = l.signed_label();
        if label != "0" && !labels.iter().any(|x| x == label) {
            labels.push(label.to_string());
        }
    }
    let k = labels.len();
    let mut total = vec![Q::zero(); k];
    for l in g.legs() {
        let (s, label) = l.signed_label();
        if let Some(j) = labels.iter().position(|x| x == label) {
            total[j] += q(s as i64);
        }
    }
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
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: QMatrix = (0..k).map(|_| (0..k).map(|_| q(rng.gen_range(-4..=4))).collect()).collect();
    let bp = mat_mul(&b, &proj);
    MomentumData::gram(labels, mat_mul(&transpose(&bp), &bp))
}

/// The exact polynomial invariants of one graph: determinant and tree forms
/// of `Psi` agree, `deg Psi = l`, multilinearity, `d_e Psi = Psi(G \ e)`,
/// the Euler identity, cut-set and tree forms of `P` agree (two legs), and
/// `Psi p^T R p = P` at `points` random rational points in Gram mode.
pub fn exact_invariants(g: &FeynmanGraph, seed: u64, points: usize) -> Result<Vec<InvariantCheck>> {
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: Option<String>| {
        out.push(InvariantCheck { graph: g.name().to_string(), name: name.into(), passed, detail })
    };
    let n = g.num_edges();
    let l = g.loop_number() as u32;
    let det = psi_polynomial(g, PsiMethod::Det)?;
    let trees = psi_polynomial(g, PsiMethod::Trees)?;
    push("psi_det_equals_trees", det == trees, None);
    let h = det.homogeneity()?;
    push("psi_degree_is_loop_number", h.is_homogeneous && h.degree == l, Some(format!("degree {}, loops {l}", h.degree)));
    push("psi_multilinear", det.is_multilinear(), None);
    let mut euler = MultiPoly::zero(n);
    let mut bad_edges = Vec::new();
    for e in 0..n {
        let d = det.derivative(e);
        let del = psi_polynomial(&g.delete_index(e), PsiMethod::Trees)?.insert_var(e);
        if d != del {
            bad_edges.push(g.edges()[e].id.clone());
        }
        euler = &euler + &(&MultiPoly::var(n, e) * &d);
    }
    let detail = (!bad_edges.is_empty()).then(|| format!("fails for {}", bad_edges.join(",")));
    push("derivative_is_deletion", bad_edges.is_empty(), detail);
    push("euler_identity", euler == det.scale(&q(l as i64)), None);
    let live = g.legs().iter().filter(|x| x.signed_label().1 != "0").count();
    if live == 2 {
        let sym = MomentumData::two_leg_symbolic();
        let a = second_symanzik(g, &sym, PMethod::CutSets)?;
        let b = second_symanzik(g, &sym, PMethod::Trees)?;
        push("p_cutsets_equal_trees", a == b, None);
    }
    if live >= 2 {
        let mom = auto_gram(g, seed)?;
        let p = second_symanzik(g, &mom, PMethod::CutSets)?;
        let ps = psi(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        for _ in 0..points {
            let t: Vec<Q> = (0..n).map(|_| qf(rng.gen_range(1..=40), rng.gen_range(1..=9))).collect();
            if ps.eval(&t) * r_form_value(g, &mom, &t)? != p.eval(&t) {
                failures += 1;
            }
        }
        push("psi_r_form_equals_p", failures == 0, Some(format!("{points} points, {failures} failures")));
    }
    Ok(out)
}
