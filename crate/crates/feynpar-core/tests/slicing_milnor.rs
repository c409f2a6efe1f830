mod common;

use feynpar_core::graph::builders::*;
use feynpar_core::graph_poly::psi;
use feynpar_core::poly::{MultiPoly, QuotientDim};
use feynpar_core::rational::{q, Q};
use feynpar_core::slicing::*;
use feynpar_core::Error;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn u(k: usize, i: usize) -> MultiPoly {
    MultiPoly::var(k, i)
}

fn origin(k: usize) -> Vec<Q> {
    vec![Q::zero(); k]
}

fn finite(d: QuotientDim) -> usize {
    d.finite().expect("finite Milnor number")
}

#[test]
fn make_slice_examples() {
    let s = make_slice(3, 2, 7).unwrap();
    assert_eq!(s.dim(), 2);
    assert_eq!(s.normals().len(), 1);
    assert!(s.normals()[0].iter().all(|x| x.is_integer() && x.abs() <= q(9)));
    assert!(s.orthogonality().iter().flatten().all(|x| x.is_zero()));
    assert_eq!(make_slice(3, 2, 7).unwrap(), s);

    let full = make_slice(2, 2, 1).unwrap();
    assert!(full.normals().is_empty());
    assert_eq!(full.dim(), 2);

    assert!(matches!(make_slice(3, 4, 0), Err(Error::Precondition(_))));
    assert!(matches!(make_slice(3, 0, 0), Err(Error::Precondition(_))));
}

#[test]
fn slice_spec_roundtrip() {
    let s = make_slice(4, 2, 3).unwrap();
    let text = serde_json::to_string(&s.to_spec()).unwrap();
    let back = LinearSlice::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn restrict_examples() {
    // plane t = (u1, u2, u1 + u2)
    let plane = LinearSlice::from_basis(3, vec![vec![q(1), q(0), q(1)], vec![q(0), q(1), q(1)]]).unwrap();
    let p = &u(3, 0) + &u(3, 1);
    assert_eq!(restrict(&p, &plane).unwrap(), &u(2, 0) + &u(2, 1));
    let t3 = restrict(&u(3, 2), &plane).unwrap();
    assert_eq!(t3, &u(2, 0) + &u(2, 1));

    let full = LinearSlice::from_basis(2, vec![vec![q(1), q(0)], vec![q(0), q(1)]]).unwrap();
    let f = &(&u(2, 0) * &u(2, 0)) + &u(2, 1);
    assert_eq!(restrict(&f, &full).unwrap(), f);

    let b3 = psi(&banana(3));
    let r = restrict(&b3, &make_slice(3, 2, 7).unwrap()).unwrap();
    assert!(r.is_homogeneous());
    assert_eq!(r.total_degree(), Some(2));

    assert!(matches!(restrict(&u(2, 0), &plane), Err(Error::ArityMismatch { .. })));
}

#[test]
fn singular_locus_system_examples() {
    let sys = singular_locus_system(&banana(3));
    let t = |i| u(3, i);
    assert_eq!(sys.generators, vec![&t(1) + &t(2), &t(0) + &t(2), &t(0) + &t(1)]);
    let bub = singular_locus_system(&bubble());
    assert_eq!(bub.generators, vec![MultiPoly::one(2), MultiPoly::one(2)]);
    let tri = singular_locus_system(&triangle());
    assert!(tri.generators.iter().all(|g| g.is_constant() && !g.is_zero()));
}

#[test]
fn singular_locus_generators_are_deletions() {
    for g in corpus() {
        assert!(deletion_check(&g).unwrap().into_iter().all(|b| b), "{}", g.name());
    }
}

#[test]
fn find_singular_points_examples() {
    let x = u(2, 0);
    let y = u(2, 1);
    let circle = &(&x * &x) + &(&y * &y);
    assert_eq!(find_singular_points(&circle).unwrap(), vec![SingularPoint::Exact(origin(2))]);
    let cusp = &x.pow(3) - &y.pow(2);
    assert_eq!(find_singular_points(&cusp).unwrap(), vec![SingularPoint::Exact(origin(2))]);

    // a line of critical points in three variables
    let (a, b) = (u(3, 0), u(3, 1));
    let d4 = &(&a * &b) * &(&a + &b);
    assert!(matches!(find_singular_points(&d4), Err(Error::PositiveDimensional)));
    // in two variables the same polynomial has an isolated D4 point
    let d4_2 = &(&x * &y) * &(&x + &y);
    assert_eq!(find_singular_points(&d4_2).unwrap(), vec![SingularPoint::Exact(origin(2))]);
    assert_eq!(finite(milnor_number(&d4_2, &origin(2)).unwrap()), 4);
}

#[test]
fn find_singular_points_off_origin() {
    // (x^2 - 1)^2 + (y - 1/2)^2 has critical points (+-1, 1/2) and (0, 1/2)
    let x = u(2, 0);
    let y = u(2, 1);
    let half = MultiPoly::constant(2, Q::new(1.into(), 2.into()));
    let f = &(&(&x * &x) - &MultiPoly::one(2)).pow(2) + &(&y - &half).pow(2);
    let pts = find_singular_points(&f).unwrap();
    assert_eq!(pts.len(), 3);
    for p in &pts {
        let e = p.exact().expect("rational critical point");
        assert!(f.gradient().iter().all(|g| g.eval(e).is_zero()));
    }
    // irrational critical points are numeric: x^3 - 2x has +-sqrt(2/3)
    let g = &(&x.pow(3) - &x.scale(&q(2))) + &y.pow(2);
    let pts = find_singular_points(&g).unwrap();
    assert_eq!(pts.len(), 2);
    for p in pts {
        assert!(matches!(p, SingularPoint::Numeric { .. }));
        assert!(((p.approx()[0]).abs() - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
    }
}

#[test]
fn projective_singular_points() {
    // nodal cubic y^2 z - x^3 - x^2 z: node at (0:0:1)
    let (x, y, z) = (u(3, 0), u(3, 1), u(3, 2));
    let f = &(&(&y * &y) * &z) - &(&x.pow(3) + &(&(&x * &x) * &z));
    let pts = find_projective_singular_points(&f).unwrap();
    assert_eq!(pts, vec![SingularPoint::Exact(vec![q(0), q(0), q(1)])]);
    // smooth conic: none
    let conic = &(&(&x * &x) + &(&y * &y)) - &(&z * &z);
    assert!(find_projective_singular_points(&conic).unwrap().is_empty());
}

#[test]
fn milnor_examples() {
    let x = u(2, 0);
    let y = u(2, 1);
    assert_eq!(finite(milnor_number(&(&(&x * &x) + &(&y * &y)), &origin(2)).unwrap()), 1);
    assert_eq!(finite(milnor_number(&(&x.pow(3) - &y.pow(2)), &origin(2)).unwrap()), 2);
    let (a, b, c) = (u(3, 0), u(3, 1), u(3, 2));
    let f = &(&a.pow(3) + &b.pow(3)) + &c.pow(3);
    assert_eq!(finite(milnor_number(&f, &origin(3)).unwrap()), 8);
    assert_eq!(milnor_number_truncated(&f, &origin(3), 9).unwrap(), 8);
    assert!(matches!(milnor_number(&(&x + &(&y * &y)), &origin(2)), Err(Error::NotSingular)));
    // non-isolated: x^2 in two variables
    assert_eq!(milnor_number(&(&x * &x), &origin(2)).unwrap(), QuotientDim::Infinite);
}

#[test]
fn milnor_brieskorn_oracle() {
    for a in 2..=4u32 {
        for b in 2..=4u32 {
            let f = &u(2, 0).pow(a) + &u(2, 1).pow(b);
            let mu = finite(milnor_number(&f, &origin(2)).unwrap());
            let expected = ((a - 1) * (b - 1)) as usize;
            assert_eq!(mu, expected, "x^{a} + y^{b}");
            assert_eq!(milnor_number_truncated(&f, &origin(2), (a + b) as u32).unwrap(), expected);
        }
    }
}

#[test]
fn milnor_at_a_translated_point() {
    // (x - 1)^3 - (y + 2)^2: a cusp at (1, -2)
    let x = &u(2, 0) - &MultiPoly::one(2);
    let y = &u(2, 1) + &MultiPoly::constant(2, q(2));
    let f = &x.pow(3) - &y.pow(2);
    let p = vec![q(1), q(-2)];
    assert_eq!(finite(milnor_number(&f, &p).unwrap()), 2);
    assert_eq!(milnor_number_truncated(&f, &p, 4).unwrap(), 2);
}

#[test]
fn milnor_invariant_across_slices() {
    // banana-4 on generic hyperplanes: a smooth cubic surface cone, mu = 8
    let p = psi(&banana(4));
    let mut mus = Vec::new();
    for seed in [3u64, 17, 41] {
        let s = make_slice(4, 3, seed).unwrap();
        let report = milnor_report(&p, &s).unwrap();
        assert!(report.transversal);
        let at_origin = report.points.iter().find(|pm| pm.point == SingularPoint::Exact(origin(3))).unwrap();
        let mu = finite(at_origin.milnor_mu.clone().unwrap());
        assert_eq!(milnor_number_truncated(&report.restricted, &origin(3), mu as u32 + 1).unwrap(), mu);
        mus.push(mu);
    }
    assert_eq!(mus, vec![8, 8, 8]);

    // seed 40 draws a normal with a zero entry, so the plane contains the
    // t4 axis, which is a node of the surface: the critical locus is a line
    let s = make_slice(4, 3, 40).unwrap();
    assert!(s.normals()[0][3].is_zero());
    assert!(matches!(milnor_report(&p, &s), Err(Error::PositiveDimensional)));

    // banana-3 on generic planes: a smooth conic cone, mu = 1
    for seed in [1u64, 2, 5] {
        let report = milnor_report(&psi(&banana(3)), &make_slice(3, 2, seed).unwrap()).unwrap();
        assert_eq!(report.points.len(), 1);
        assert_eq!(report.points[0].milnor_mu, Some(QuotientDim::Finite(1)));
    }
}

#[test]
fn feynman_subspace_examples() {
    let g = banana(3);
    let s = make_slice(3, 2, 7).unwrap();
    let res = feynman_subspace_dim(&g, &s, &[2, 4]).unwrap();
    // D = 2: -k + D l/2 = 0, so h = 1
    assert_eq!(res[0].exponent, 0);
    assert_eq!(res[0].dim, 1);
    assert_eq!(res[0].certificates, vec![vec![0, 0]]);
    // D = 4: every product vanishes at the origin, whose local algebra is Q
    assert_eq!(res[1].exponent, 2);
    assert_eq!(res[1].dim, 0);
    assert!(matches!(feynman_subspace_dim(&g, &make_slice(3, 3, 1).unwrap(), &[2]), Err(Error::RegimeViolation(_))));
}

#[test]
fn local_span_on_the_cusp() {
    let x = u(2, 0);
    let y = u(2, 1);
    let cusp = &x.pow(3) - &y.pow(2);
    let (dim, certs) = local_span_dimension(&cusp, &origin(2), &[MultiPoly::one(2), x.clone()]).unwrap();
    assert_eq!(dim, 2);
    assert_eq!(certs.len(), 2);
    let (dim, _) = local_span_dimension(&cusp, &origin(2), &[y.clone(), &x * &x]).unwrap();
    assert_eq!(dim, 0);
}

#[test]
fn rational_roots_examples() {
    // 2x^3 - 3x^2 - 3x + 2 = (x - 2)(2x - 1)(x + 1)
    let roots = rational_roots(&[q(2), q(-3), q(-3), q(2)]);
    assert_eq!(roots, vec![q(-1), Q::new(1.into(), 2.into()), q(2)]);
    assert_eq!(rational_roots(&[q(0), q(0), q(1)]), vec![q(0)]);
    assert!(rational_roots(&[q(-2), q(0), q(1)]).is_empty());
}

fn arb_poly(k: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, k), -4i64..=4), 1..5)
        .prop_map(move |terms| MultiPoly::from_terms(k, terms.into_iter().map(|(e, c)| (e, q(c)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn restrict_is_a_ring_map(a in arb_poly(4), b in arb_poly(4), seed in 0u64..1000, k in 1usize..=3) {
        let s = make_slice(4, k, seed).unwrap();
        prop_assert!(s.orthogonality().iter().flatten().all(|x| x.is_zero()));
        let ra = restrict(&a, &s).unwrap();
        let rb = restrict(&b, &s).unwrap();
        prop_assert_eq!(restrict(&(&a * &b), &s).unwrap(), &ra * &rb);
        prop_assert_eq!(restrict(&(&a + &b), &s).unwrap(), &ra + &rb);
    }

    #[test]
    fn restrict_preserves_homogeneity(g in common::arb_loop_graph(4, 3), seed in 0u64..1000) {
        let p = psi(&g);
        let n = g.num_edges();
        let k = n.min(3);
        let r = restrict(&p, &make_slice(n, k, seed).unwrap()).unwrap();
        if !r.is_zero() {
            prop_assert!(r.is_homogeneous());
            prop_assert_eq!(r.total_degree(), p.total_degree());
        }
    }

    #[test]
    fn exact_points_are_critical(c in prop::collection::vec(-3i64..=3, 4)) {
        // f = (x - a)^2 (x - b) + (y - c)^2 type polynomials with rational data
        let x = u(2, 0);
        let y = u(2, 1);
        let k = |v: i64| MultiPoly::constant(2, q(v));
        let f = &(&(&x - &k(c[0])).pow(2) * &(&x - &k(c[1]))) + &(&y - &k(c[2])).pow(2).scale(&q(c[3].abs() + 1));
        if let Ok(points) = find_singular_points(&f) {
            for p in points {
                if let Some(e) = p.exact() {
                    prop_assert!(f.gradient().iter().all(|g| g.eval(e).is_zero()));
                }
            }
        }
    }
}

