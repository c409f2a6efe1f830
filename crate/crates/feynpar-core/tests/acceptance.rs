//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the summary always prints.

use std::f64::consts::{E, PI};
use std::sync::Arc;
use std::time::{Duration, Instant};

use feynpar_core::graph::builders::*;
use feynpar_core::graph::{FeynmanGraph, PowerCounting};
use feynpar_core::graph_poly::*;
use feynpar_core::hopf::{
    birkhoff, compose_antipode, connection_data, convolution, monomial_element, mu_prefactored, rota_baxter_t,
    scaling_check, Atom, Character, Element, GenId, Grading, HopfAlgebra, QSeries, SliceDecoration, DEFAULT_HI, EXACT,
};
use feynpar_core::integration::{
    asymptotic_fit, dimreg_series, feynman_identity, feynman_u, gelfand_leray_j, integrate_interval,
    iterated_log_integral, leray_i_epsilon, log_zeta_coeffs, mellin_transform, projective_identity_residual,
    shifted_simplex, volume_form, DiffForm, Domain, FeynmanOptions, GlOptions, LogKind, QuadOptions,
};
use feynpar_core::poly::{finite_field_point_count, MultiPoly, QuotientDim};
use feynpar_core::rational::{q, qf, Q};
use feynpar_core::slicing::{
    feynman_subspace_dim, local_span_dimension, make_slice, milnor_number, milnor_report, restrict, two_leg_vertices,
};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 10] = [
        ("exact polynomial suite", 10, exact_polynomials),
        ("case tables", 1, case_tables),
        ("Hopf suite", 30, hopf_suite),
        ("DimReg oracle", 60, dimreg_oracle),
        ("projective identity", 120, projective_identity),
        ("Gelfand-Leray and Mellin", 120, gelfand_leray_mellin),
        ("Leray regularization", 180, leray_regularization),
        ("Milnor suite", 60, milnor_suite),
        ("point counts", 10, point_counts),
        ("iterated-integral identity", 30, iterated_integrals),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if took > Duration::from_secs(*budget) {
                Err(format!("over the {budget} s budget"))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS {name} ({:.2} s)", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({:.2} s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// ---- 1 ----

fn gram_for(g: &FeynmanGraph) -> MomentumData {
    if g.legs().len() == 3 {
        let gram = vec![vec![q(2), q(-1), q(-1)], vec![q(-1), q(2), q(-1)], vec![q(-1), q(-1), q(2)]];
        MomentumData::gram(vec!["p1".into(), "p2".into(), "p3".into()], gram).unwrap()
    } else {
        MomentumData::gram(vec!["p".into()], vec![vec![qf(3, 2)]]).unwrap()
    }
}

fn exact_polynomials() -> Check {
    let graphs = corpus();
    ensure!(graphs.len() >= 10, "corpus has {} graphs", graphs.len());
    let two_leg = MomentumData::two_leg_symbolic();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for g in &graphs {
        let name = g.name();
        let n = g.num_edges();
        let l = g.loop_number() as u32;
        let det = psi_polynomial(g, PsiMethod::Det).map_err(|e| e.to_string())?;
        let trees = psi_polynomial(g, PsiMethod::Trees).map_err(|e| e.to_string())?;
        ensure!(det == trees, "{name}: det and tree Psi differ");
        ensure!(det.total_degree() == Some(l) && det.is_homogeneous(), "{name}: deg Psi != b1");
        ensure!(det.is_multilinear(), "{name}: Psi not multilinear");
        let mut euler = MultiPoly::zero(n);
        for e in 0..n {
            let d = det.derivative(e);
            let deleted = psi_polynomial(&g.delete_index(e), PsiMethod::Trees).map_err(|e| e.to_string())?.insert_var(e);
            ensure!(d == deleted, "{name}: d/dt{} Psi != Psi of the deletion", e + 1);
            euler = &euler + &(&MultiPoly::var(n, e) * &d);
        }
        ensure!(euler == det.scale(&q(l as i64)), "{name}: Euler identity fails");
        if g.legs().len() == 2 {
            let a = second_symanzik(g, &two_leg, PMethod::CutSets).map_err(|e| e.to_string())?;
            let b = second_symanzik(g, &two_leg, PMethod::Trees).map_err(|e| e.to_string())?;
            ensure!(a == b, "{name}: cut-set and tree P differ");
        }
        let mom = gram_for(g);
        let p = second_symanzik(g, &mom, PMethod::CutSets).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let t: Vec<Q> = (0..n).map(|_| qf(rng.gen_range(1..=40), rng.gen_range(1..=9))).collect();
            let r = r_form_value(g, &mom, &t).map_err(|e| e.to_string())?;
            ensure!(det.eval(&t) * r == p.eval(&t), "{name}: Psi * pRp != P at {t:?}");
        }
    }
    // the bridge is invisible to Psi
    let bridged = bridged_bubbles();
    ensure!(!bridged.is_one_pi(), "bridged bubbles reported 1PI");
    let p = psi(&bridged);
    ensure!((0..bridged.num_edges()).any(|e| p.degree_in(e) == 0), "no edge of the bridged graph is absent from Psi");
    Ok(())
}

// ---- 2 ----

fn case_tables() -> Check {
    let m_oracle = |n: i64, d: i64, l: i64| {
        let (a, b) = (n - d * (l + 1) / 2, n - d * l / 2);
        if a >= 0 {
            b
        } else if b <= 0 {
            -a
        } else {
            (1..=b.min(d / 2)).rev().find(|g| b % g == 0 && (d / 2) % g == 0).unwrap()
        }
    };
    let r_oracle = |k: i64, d: i64, l: i64, m: i64| {
        let (a, b) = (k - d * (l + 1) / 2, k - d * l / 2);
        if a >= 0 {
            d * l / 2
        } else if b <= 0 {
            2 * k - d * (l + 1) / 2
        } else {
            k - m
        }
    };
    for n in 1..=12 {
        for d in [2, 4, 6, 8] {
            for l in 1..=4 {
                let a = case_table_affine(n, d, l).map_err(|e| e.to_string())?;
                ensure!(a.c == a.m * a.deg_f(), "C != m deg f at ({n}, {d}, {l})");
                ensure!(a.m as i64 == m_oracle(n, d, l), "affine m at ({n}, {d}, {l})");
                let s = case_table_sliced(n, d, l).map_err(|e| e.to_string())?;
                ensure!(s.m as i64 == m_oracle(n, d, l), "sliced m at ({n}, {d}, {l})");
                ensure!(s.r_max == Some(r_oracle(n, d, l, s.m as i64)), "r_max at ({n}, {d}, {l}): {:?}", s.r_max);
            }
        }
    }
    let mono = |p: u32, s: u32| Monomial2 { p_exp: p, psi_exp: s };
    let r = case_table_affine(2, 4, 1).unwrap();
    ensure!((r.f, r.m, r.omega, r.c) == (mono(0, 1), 2, mono(0, 0), 2), "(2, 4, 1) affine");
    let r = case_table_affine(3, 4, 1).unwrap();
    ensure!((r.f, r.m, r.omega, r.c) == (mono(1, 2), 1, mono(0, 1), 4), "(3, 4, 1) affine");
    let r = case_table_affine(6, 4, 1).unwrap();
    ensure!((r.f, r.m, r.omega, r.c) == (mono(1, 0), 4, mono(0, 2), 8), "(6, 4, 1) affine");
    let r = case_table_sliced(2, 4, 1).unwrap();
    ensure!((r.f, r.m, r.h, r.r_max) == (mono(0, 1), 2, Some(mono(0, 0)), Some(0)), "(2, 4, 1) sliced");
    let r = case_table_sliced(3, 4, 1).unwrap();
    ensure!((r.m, r.h, r.r_max) == (1, Some(mono(0, 1)), Some(2)), "(3, 4, 1) sliced");
    let r = case_table_sliced(2, 2, 1).unwrap();
    ensure!((r.f, r.m, r.h, r.r_max) == (mono(1, 0), 1, Some(mono(0, 0)), Some(1)), "(2, 2, 1) sliced");
    Ok(())
}

// ---- 3 ----

fn d4() -> HopfAlgebra {
    HopfAlgebra::new(Arc::new(PowerCounting { dimension: 4 }))
}

fn corpus_algebra() -> (HopfAlgebra, Vec<GenId>) {
    let mut h = d4();
    for g in corpus().iter().filter(|g| g.num_edges() <= 4) {
        h.insert_graph(g).unwrap();
    }
    let ids = (0..h.len()).filter(|&i| h.generator(i).grade <= 4).collect();
    (h, ids)
}

fn random_character(h: &HopfAlgebra, seed: u64) -> Character {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = Character::default();
    for id in 0..h.len() {
        let lo = -(rng.gen_range(0..=2) as i64);
        let coeffs: Vec<Q> = (0..6).map(|_| qf(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
        phi.set(id, QSeries::from_coeffs(lo, coeffs, DEFAULT_HI));
    }
    phi
}

fn random_series(rng: &mut ChaCha8Rng) -> QSeries {
    let lo = rng.gen_range(-3..=1);
    let len = rng.gen_range(0..7);
    let coeffs = (0..len).map(|_| qf(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
    QSeries::from_coeffs(lo, coeffs, rng.gen_range(2..=6))
}

fn is_zero_element(x: &Element) -> bool {
    x.values().all(|c| c.is_zero())
}

fn hopf_suite() -> Check {
    let (h, ids) = corpus_algebra();
    for &id in &ids {
        let name = &h.generator(id).name;
        let x = monomial_element(vec![id]);
        ensure!(h.coassoc_left(&x) == h.coassoc_right(&x), "{name}: coassociativity");
        ensure!(h.counit(&x).is_zero(), "{name}: counit");
        ensure!(is_zero_element(&h.antipode_left_check(&x)), "{name}: m(S x id)Delta");
        ensure!(is_zero_element(&h.antipode_right_check(&x)), "{name}: m(id x S)Delta");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in corpus().into_iter().filter(|g| g.num_edges() <= 4) {
        let mut hd = d4();
        let cap = hd.cap(&g).map_err(|e| e.to_string())?;
        for trial in 0..3 {
            let k = 1 + trial % cap;
            let rows: Vec<Vec<Q>> = (0..k).map(|_| (0..g.num_edges()).map(|_| q(rng.gen_range(-2..=2))).collect()).collect();
            let atom = Atom::span(g.num_edges(), rows).map_err(|e| e.to_string())?;
            if atom.dim() == 0 {
                continue;
            }
            let x = hd.insert_decorated(&g, &SliceDecoration::new(vec![(qf(1, 2), atom)])).map_err(|e| e.to_string())?;
            ensure!(hd.coassoc_left(&x) == hd.coassoc_right(&x), "{}: decorated coassociativity", g.name());
            ensure!(is_zero_element(&hd.antipode_left_check(&x)), "{}: decorated antipode", g.name());
        }
    }

    let t = rota_baxter_t;
    for _ in 0..100 {
        let (a, b) = (random_series(&mut rng), random_series(&mut rng));
        let lhs = t(&a).mul(&t(&b));
        let rhs = t(&a.mul(&t(&b))).add(&t(&t(&a).mul(&b))).sub(&t(&a.mul(&b)));
        ensure!(lhs.agrees_with(&rhs), "Rota-Baxter: {lhs} vs {rhs}");
    }

    for seed in 0..4 {
        let phi = random_character(&h, seed);
        let bk = birkhoff(&h, &phi).map_err(|e| e.to_string())?;
        let rebuilt = convolution(&h, &compose_antipode(&h, &bk.minus).map_err(|e| e.to_string())?, &bk.plus)
            .map_err(|e| e.to_string())?;
        for id in 0..h.len() {
            ensure!(bk.plus.get(id).unwrap().is_pole_free(), "phi_+ has a pole on {}", h.generator(id).name);
            ensure!(rebuilt[&id].agrees_with(phi.get(id).unwrap()), "reconstruction fails on {}", h.generator(id).name);
        }
        for grading in [Grading::Loops, Grading::Edges] {
            let cd = connection_data(&h, &phi, grading).map_err(|e| e.to_string())?;
            ensure!(cd.residual == 0.0, "flatness residual {}", cd.residual);
        }
    }

    let mut toy = d4();
    let x1 = toy.add_abstract("x1", 1, vec![]).unwrap();
    let x2 = toy.add_abstract("x2", 2, vec![(vec![x1], vec![x1], q(1))]).unwrap();
    let mut phi = Character::default();
    phi.set(x1, QSeries::from_pairs(&[(-1, q(1))], EXACT));
    phi.set(x2, QSeries::from_pairs(&[(-2, q(1))], EXACT));
    let bk = birkhoff(&toy, &phi).map_err(|e| e.to_string())?;
    ensure!(bk.minus.get(x2).unwrap().is_zero() && bk.plus.get(x2).unwrap().is_zero(), "toy x2 factors are not zero");

    let family = |log_mu: &Q| {
        let mut base = Character::default();
        for id in 0..h.len() {
            base.set(id, QSeries::from_pairs(&[(-1, q(1))], EXACT));
        }
        Ok(mu_prefactored(&h, &base, log_mu))
    };
    let s = scaling_check(&h, &family, &qf(1, 3), &qf(2, 5)).map_err(|e| e.to_string())?;
    ensure!(s == 0.0, "scaling_check = {s}");

    let mut base = Character::default();
    for id in 0..h.len() {
        let pairs: Vec<(i64, Q)> =
            std::iter::once((-1, q(rng.gen_range(1..=5)))).chain((0..4).map(|k| (k, q(rng.gen_range(-3..=3))))).collect();
        base.set(id, QSeries::from_pairs(&pairs, DEFAULT_HI));
    }
    let minus = |log_mu: Q| birkhoff(&h, &mu_prefactored(&h, &base, &log_mu)).map(|b| b.minus);
    let (m0, m1) = (minus(q(0)).map_err(|e| e.to_string())?, minus(qf(3, 2)).map_err(|e| e.to_string())?);
    for id in (0..h.len()).filter(|&id| h.generator(id).reduced.is_empty() && h.generator(id).loops == 1) {
        ensure!(m0.get(id) == m1.get(id), "counterterm of {} depends on mu", h.generator(id).name);
    }
    Ok(())
}

// ---- 4 ----

fn dimreg_oracle() -> Check {
    let g = bubble();
    let mom = MomentumData::two_leg(q(1));
    let opts = FeynmanOptions::default();
    let base = dimreg_series(&g, &mom, 4, 1.0, 2, &opts).map_err(|e| e.to_string())?;
    let c = &base.coefficients;
    // Gamma(1+z/2)^2 / Gamma(2+z) = 1 - z + (1 - pi^2/24) z^2 + O(z^3)
    ensure!((c[0] - 1.0).abs() < 1e-6, "c0 = {}", c[0]);
    ensure!((c[1] + 1.0).abs() < 1e-6, "c1 = {}", c[1]);
    ensure!((c[2] - (1.0 - PI * PI / 24.0)).abs() < 1e-6, "c2 = {}", c[2]);
    let mu = 3.0f64;
    let shifted = dimreg_series(&g, &mom, 4, mu, 2, &opts).map_err(|e| e.to_string())?;
    let lm = mu.ln();
    let s = &shifted.coefficients;
    ensure!(s[0] == c[0] && s[1] == c[1] - lm * c[0], "mu shift: {s:?}");
    ensure!((s[2] - (c[2] - lm * c[1] + lm * lm / 2.0 * c[0])).abs() < 1e-15, "mu shift at z^2");
    let u = feynman_u(&g, &mom, 4, &opts).map_err(|e| e.to_string())?;
    ensure!((u.value - c[0]).abs() <= u.error_estimate + base.errors[0] + 1e-12, "feynman_U {} vs c0 {}", u.value, c[0]);
    Ok(())
}

// ---- 5 ----

fn projective_identity() -> Check {
    let gram = vec![vec![q(2), q(-1), q(-1)], vec![q(-1), q(2), q(-1)], vec![q(-1), q(-1), q(2)]];
    let mom = MomentumData::gram(vec!["p1".into(), "p2".into(), "p3".into()], gram).unwrap();
    let r = feynman_identity(&triangle(), &mom, 4, &QuadOptions::tolerance(1e-6)).map_err(|e| e.to_string())?;
    ensure!(r.residual < 1e-4, "triangle residual {}", r.residual);

    let f = &MultiPoly::var(2, 0) + &MultiPoly::var(2, 1);
    let opts = QuadOptions::tolerance(1e-10);
    let r = projective_identity_residual(&f, 2, &volume_form(2), &shifted_simplex(2), &opts).map_err(|e| e.to_string())?;
    // the shifted 1-simplex in coordinates s = t1 + t2: 2 * int_2^3 (s - 2)/s^2 ds
    let (oracle, _) = integrate_interval(&|s| (s - 2.0) / (s * s), 2.0, 3.0, 1e-13);
    ensure!(r.residual < 1e-4 && (r.lhs - 2.0 * oracle).abs() < 1e-8, "shifted segment: {r:?}");

    let mut omega = DiffForm::zero(2, 1);
    omega.add_term(vec![1], MultiPoly::var(2, 0));
    let seg = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
    let r = projective_identity_residual(&f, 2, &omega, &seg, &opts).map_err(|e| e.to_string())?;
    ensure!(r.residual > 1e-2, "non-closed control residual only {}", r.residual);
    Ok(())
}

// ---- 6 ----

fn disk_f() -> MultiPoly {
    &MultiPoly::var(2, 0).pow(2) + &MultiPoly::var(2, 1).pow(2)
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn gelfand_leray_mellin() -> Check {
    let one = MultiPoly::one(2);
    let grid: Vec<f64> = (0..16).map(|i| 0.05 + 0.05 * i as f64).collect();
    let j = gelfand_leray_j(&disk_f(), &one, &Domain::unit_disk(), &grid, &GlOptions::default()).map_err(|e| e.to_string())?;
    for s in &j {
        ensure!((s.value - PI).abs() < 1e-3, "J({}) = {}", s.s, s.value);
    }
    // radius 2 so every level circle up to s = 1 stays inside
    let disk = Domain::Disk { center: [0.0, 0.0], radius: 2.0 };
    let j = gelfand_leray_j(&disk_f(), &one, &disk, &geometric(1e-3, 1.0, 24), &GlOptions::default()).map_err(|e| e.to_string())?;
    let samples: Vec<(f64, f64)> = j.iter().map(|s| (s.s, s.value)).collect();
    let fit = asymptotic_fit(&samples[..12]).map_err(|e| e.to_string())?;
    ensure!(fit.lambda.abs() < 1e-2 && fit.r == 0 && (fit.amplitude - PI).abs() < 1e-2, "fit {fit:?}");
    let zs = [0.0, 0.5, 1.0, 2.0];
    let f = mellin_transform(&samples, &[0.0, 0.5, 1.0, 2.0, -0.99]).map_err(|e| e.to_string())?;
    for (z, v) in zs.iter().zip(&f) {
        ensure!((v - PI / (z + 1.0)).abs() < 1e-4, "F({z}) = {v}");
    }
    ensure!((0.01 * f[4] - PI).abs() < 1e-2, "(z+1) F(z) = {} at z = -0.99", 0.01 * f[4]);
    Ok(())
}

// ---- 7 ----

fn leray_regularization() -> Check {
    let one = MultiPoly::one(2);
    let eps = geometric(1e-3, 0.5, 10);
    let r = leray_i_epsilon(&disk_f(), &one, 1, &Domain::unit_disk(), &eps, &GlOptions::default()).map_err(|e| e.to_string())?;
    ensure!((r.nu - r.m as f64).abs() < 0.15, "disk nu = {} vs m = {}", r.nu, r.m);
    ensure!(r.samples.iter().all(|s| s.value.is_finite()), "non-finite I_eps sample");
    let smooth = &one + &MultiPoly::var(2, 0);
    let unit = Domain::Box(vec![(0.0, 1.0), (0.0, 1.0)]);
    let r = leray_i_epsilon(&smooth, &one, 2, &unit, &eps, &GlOptions::default()).map_err(|e| e.to_string())?;
    ensure!(r.nu.abs() < 0.1, "smooth control nu = {}", r.nu);
    ensure!(r.samples.iter().all(|s| s.value.is_finite()), "non-finite I_eps sample");
    Ok(())
}

// ---- 8 ----

fn monomials_up_to(k: usize, top: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(k, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, top, &mut Vec::new(), &mut out);
    out
}

fn gauss_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = &rows[i][c] / &pivot;
                for j in c..cols {
                    let sub = &factor * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        r += 1;
    }
    r
}

/// Rank of the classes of `hs` in `Q[u]/J(f)` for homogeneous `f` with an
/// isolated critical point at the origin. The quotient is graded with top
/// degree `k (deg f - 2)`, so everything is linear algebra on monomials.
fn graded_rank_oracle(f: &MultiPoly, hs: &[MultiPoly]) -> usize {
    let k = f.arity();
    let d = f.total_degree().unwrap();
    let top = k as u32 * (d - 2);
    let monos = monomials_up_to(k, top);
    let index = |e: &[u32]| monos.iter().position(|m| m.as_slice() == e);
    let vector = |p: &MultiPoly| {
        let mut v = vec![Q::zero(); monos.len()];
        for (e, c) in p.terms() {
            if let Some(i) = index(e) {
                v[i] = c.clone();
            }
        }
        v
    };
    let grads = f.gradient();
    let mut jac = Vec::new();
    for m in monomials_up_to(k, top.saturating_sub(d - 1)) {
        if m.iter().sum::<u32>() + d - 1 > top {
            continue;
        }
        for g in &grads {
            jac.push(vector(&g.mul_monomial(&m, &Q::one())));
        }
    }
    let base = gauss_rank(jac.clone());
    jac.extend(hs.iter().map(vector));
    gauss_rank(jac) - base
}

/// The spanning-tree products, rebuilt from the graph's tree paths.
fn subspace_products(g: &FeynmanGraph, exponent: usize) -> Vec<MultiPoly> {
    let n = g.num_edges();
    let (v1, v2) = two_leg_vertices(g).unwrap();
    let terms: Vec<MultiPoly> = g
        .spanning_trees()
        .unwrap()
        .iter()
        .map(|t| {
            let mut l = MultiPoly::zero(n);
            for (e, _) in g.tree_path(t, v1, v2) {
                l = &l + &MultiPoly::var(n, e);
            }
            let off_tree = (0..n).filter(|e| !t.contains(e)).fold(MultiPoly::one(n), |acc, e| &acc * &MultiPoly::var(n, e));
            &l * &off_tree
        })
        .collect();
    let mut out = vec![MultiPoly::one(n)];
    for _ in 0..exponent {
        let mut next = Vec::new();
        for p in &out {
            for t in &terms {
                next.push(p * t);
            }
        }
        out = next;
    }
    out
}

fn milnor_suite() -> Check {
    let u = |k: usize, i: usize| MultiPoly::var(k, i);
    let mu = |f: &MultiPoly| milnor_number(f, &vec![Q::zero(); f.arity()]).map_err(|e| e.to_string());
    let mut table = vec![
        (&u(2, 0).pow(2) + &u(2, 1).pow(2), 1),
        (&u(2, 0).pow(3) - &u(2, 1).pow(2), 2),
        (&(&u(3, 0).pow(3) + &u(3, 1).pow(3)) + &u(3, 2).pow(3), 8),
    ];
    for a in 2..=4u32 {
        for b in 2..=4u32 {
            table.push((&u(2, 0).pow(a) + &u(2, 1).pow(b), ((a - 1) * (b - 1)) as usize));
        }
    }
    for (f, expected) in &table {
        ensure!(mu(f)? == QuotientDim::Finite(*expected), "mu({}) != {expected}", f.display_with(&MultiPoly::default_names(f.arity(), "u")));
    }

    let b3 = banana(3);
    let mut mus = Vec::new();
    for seed in [1u64, 2, 5] {
        let report = milnor_report(&psi(&b3), &make_slice(3, 2, seed).unwrap()).map_err(|e| e.to_string())?;
        mus.push(report.points.iter().map(|p| p.milnor_mu.clone()).collect::<Vec<_>>());
    }
    ensure!(mus.iter().all(|m| m == &mus[0]) && mus[0] == vec![Some(QuotientDim::Finite(1))], "slice-dependent mu: {mus:?}");

    for (g, k, seed) in [(banana(3), 2usize, 7u64), (banana(4), 3, 3), (banana(4), 3, 17)] {
        let slice = make_slice(g.num_edges(), k, seed).unwrap();
        let got = feynman_subspace_dim(&g, &slice, &[2, 4]).map_err(|e| e.to_string())?;
        let again = feynman_subspace_dim(&g, &make_slice(g.num_edges(), k, seed).unwrap(), &[2, 4]).unwrap();
        ensure!(got == again, "{}: feynman_subspace_dim not deterministic", g.name());
        let f = restrict(&psi(&g), &slice).unwrap();
        for s in &got {
            let hs: Vec<MultiPoly> =
                subspace_products(&g, s.exponent as usize).iter().map(|h| restrict(h, &slice).unwrap()).collect();
            let oracle = graded_rank_oracle(&f, &hs);
            ensure!(s.dim == oracle, "{} D={}: dim {} vs oracle {oracle}", g.name(), s.dimension, s.dim);
        }
    }

    // the same oracle on a quotient with room in every degree
    let f = &u(2, 0).pow(3) + &u(2, 1).pow(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..10 {
        let hs: Vec<MultiPoly> = (0..1 + trial % 4)
            .map(|_| {
                let terms = monomials_up_to(2, 2).into_iter().map(|e| (e, q(rng.gen_range(-1..=1))));
                MultiPoly::from_terms(2, terms)
            })
            .collect();
        let (dim, _) = local_span_dimension(&f, &[q(0), q(0)], &hs).map_err(|e| e.to_string())?;
        let oracle = graded_rank_oracle(&f, &hs);
        ensure!(dim == oracle, "local span {dim} vs oracle {oracle}");
    }
    Ok(())
}

// ---- 9 ----

/// Counts zeros directly from the rational coefficients, reducing mod q per point.
fn naive_count(p: &MultiPoly, q: u64) -> u64 {
    let n = p.arity();
    let terms: Vec<(Vec<u32>, i64)> = p
        .terms()
        .map(|(e, c)| {
            assert!(c.denom().is_one(), "integer coefficients");
            (e.clone(), c.numer().to_i64().unwrap())
        })
        .collect();
    let mut count = 0;
    let mut x = vec![0u64; n];
    loop {
        let mut v: i128 = 0;
        for (e, c) in &terms {
            let mut t = *c as i128;
            for (xi, &k) in x.iter().zip(e) {
                t *= (*xi as i128).pow(k);
            }
            v += t;
        }
        if v.rem_euclid(q as i128) == 0 {
            count += 1;
        }
        let Some(i) = x.iter().position(|&xi| xi + 1 < q) else { return count };
        x[i] += 1;
        x[..i].iter_mut().for_each(|xi| *xi = 0);
    }
}

fn point_counts() -> Check {
    let b3 = psi(&banana(3));
    let affine = finite_field_point_count(&b3, 2, false).map_err(|e| e.to_string())?;
    ensure!(affine == 4, "banana-3 over F2: {affine}");
    ensure!(naive_count(&b3, 2) == 4, "naive banana-3 count over F2: {}", naive_count(&b3, 2));
    for g in corpus() {
        let p = psi(&g);
        for qq in [2u64, 3, 5] {
            let a = finite_field_point_count(&p, qq, false).map_err(|e| e.to_string())?;
            let proj = finite_field_point_count(&p, qq, true).map_err(|e| e.to_string())?;
            ensure!(a - 1 == (qq - 1) * proj, "{} q={qq}: affine {a}, projective {proj}", g.name());
            ensure!(a == naive_count(&p, qq), "{} q={qq}: naive count differs", g.name());
        }
    }
    Ok(())
}

// ---- 10 ----

fn iterated_integrals() -> Check {
    let opts = QuadOptions::tolerance(1e-10);
    let mut fact = 1.0;
    for n in 1..=3 {
        fact *= n as f64;
        let r = iterated_log_integral(1.0, E, n, &opts).map_err(|e| e.to_string())?;
        ensure!((r.value - 1.0 / fact).abs() < 1e-6, "Lambda_(1,e)({n}) = {}", r.value);
    }
    let g = bubble();
    let mom = MomentumData::two_leg(q(1));
    let fo = FeynmanOptions::default();
    let c = dimreg_series(&g, &mom, 4, 1.0, 3, &fo).map_err(|e| e.to_string())?.coefficients;
    let zv = log_zeta_coeffs(&g, &mom, 4, LogKind::V, 3, &fo).map_err(|e| e.to_string())?;
    // Psi = 1 on the bubble's simplex, so only V contributes: c_k = (1/2)^k zeta_k
    ensure!((zv.coefficients[0] - c[0]).abs() < 1e-12, "order 0");
    for k in 1..=3 {
        let want = 0.5f64.powi(k as i32) * zv.coefficients[k];
        ensure!((c[k] - want).abs() < 1e-7, "order {k}: dimreg {} vs zeta {want}", c[k]);
    }
    Ok(())
}
