use hypnap_core::certify::{certify, Grid};
use hypnap_core::iteration::{contraction_report, run, StopCriterion, MU_FACTOR, RHO};
use hypnap_core::minkowski::{apply_isometry, random_point, LorentzMap, MVec};
use hypnap_core::napoleon::{
    napoleonic_residual, napoleonize, napoleonize_class, nonexistence_certificate, NapoleonParams, Orientation,
};
use hypnap_core::par::Execution;
use hypnap_core::triangle::{chi_point, congruence_of, realize, CongruenceClass, Triangle, SQRT_3};
use hypnap_core::{hyperbolic_cross, minkowski_inner, triple_product, HPoint};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mvec() -> impl Strategy<Value = MVec> {
    (-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64).prop_map(|(a, b, c)| MVec::new(a, b, c))
}

fn hpoint() -> impl Strategy<Value = HPoint> {
    (0.0..3.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| HPoint::polar(r, a))
}

fn triangle() -> impl Strategy<Value = Triangle> {
    (hpoint(), hpoint(), hpoint()).prop_filter_map("distinct vertices", |(a, b, c)| {
        Triangle::with_tolerance([a, b, c], 1e-6).ok()
    })
}

fn realizable_class(hi: f64) -> impl Strategy<Value = CongruenceClass> {
    let lo = SQRT_3 + 1e-3;
    (lo..hi, lo..hi, lo..hi).prop_filter_map("realizable", |(a, b, c)| {
        let c = CongruenceClass::new([a, b, c]).ok()?;
        (c.radicand() > 0.0).then_some(c)
    })
}

fn lorentz() -> impl Strategy<Value = LorentzMap> {
    any::<u64>().prop_map(|s| LorentzMap::random(&mut ChaCha8Rng::seed_from_u64(s), 1.5))
}

fn norm_scale(xs: &[MVec]) -> f64 {
    xs.iter().map(|v| v.euclid_norm_sq().sqrt()).product::<f64>().max(1.0)
}

proptest! {
    #[test]
    fn binet_cauchy(v in mvec(), w in mvec(), v2 in mvec(), w2 in mvec()) {
        let lhs = minkowski_inner(hyperbolic_cross(v, w), hyperbolic_cross(v2, w2));
        let rhs = -v.inner(v2) * w.inner(w2) + v.inner(w2) * w.inner(v2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * norm_scale(&[v, w, v2, w2]));
    }

    #[test]
    fn cross_is_form_orthogonal(v in mvec(), w in mvec()) {
        let x = hyperbolic_cross(v, w);
        let s = norm_scale(&[v, w]) * (v.euclid_norm_sq().sqrt() + w.euclid_norm_sq().sqrt()).max(1.0);
        prop_assert!(x.inner(v).abs() <= 1e-12 * s);
        prop_assert!(x.inner(w).abs() <= 1e-12 * s);
    }

    #[test]
    fn triple_product_alternates(u in mvec(), v in mvec(), w in mvec()) {
        let t = triple_product(u, v, w);
        let s = norm_scale(&[u, v, w]);
        prop_assert!((t - triple_product(v, w, u)).abs() <= 1e-12 * s);
        prop_assert!((t + triple_product(u, w, v)).abs() <= 1e-12 * s);
    }

    #[test]
    fn isometries_preserve_the_form(l in lorentz(), p in hpoint(), q in hpoint()) {
        let (lp, lq) = (apply_isometry(&l, p).unwrap(), apply_isometry(&l, q).unwrap());
        let before = p.inner(q);
        prop_assert!((lp.inner(lq) - before).abs() <= 1e-10 * before.abs());
    }

    #[test]
    fn reverse_cauchy_schwarz(p in hpoint(), q in hpoint(), r in 0.0..1e-7f64, a in 0.0..6.3f64) {
        let ip = p.inner(q);
        prop_assert!(ip <= -1.0 + 1e-12 * p.vec().x0 * q.vec().x0);
        // a point displaced by at most 1e-7 is equal up to 1e-9
        let l = LorentzMap::rotation(a);
        let near = apply_isometry(&l, HPoint::polar(r, 0.0)).unwrap();
        let far = apply_isometry(&l, HPoint::polar(0.5, 0.0)).unwrap();
        prop_assert!(near.vec().max_abs_diff(HPoint::ORIGIN.vec()) <= 1e-6);
        prop_assert!((near.inner(HPoint::ORIGIN) + 1.0).abs() <= 1e-9);
        prop_assert!((far.inner(HPoint::ORIGIN) + 1.0).abs() > 1e-9);
    }

    #[test]
    fn class_is_isometry_invariant(t in triangle(), l in lorentz()) {
        let a = congruence_of(&t).unwrap().d();
        let b = congruence_of(&t.transformed(&l).unwrap()).unwrap().d();
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-10 * a[i]);
        }
        prop_assert!((chi_point(&t) - chi_point(&t.transformed(&l).unwrap())).abs() <= 1e-9 * chi_point(&t).abs().max(1.0));
    }

    #[test]
    fn triangle_classes_obey_the_side_bounds(t in triangle()) {
        let c = congruence_of(&t).unwrap();
        let q = c.squares();
        prop_assert!(c.d().iter().all(|&x| x >= SQRT_3 - 1e-12));
        for i in 0..3 {
            let bound = (q[(i + 1) % 3] - 1.0) * (q[(i + 2) % 3] - 1.0);
            prop_assert!(q[i] - 1.0 <= bound + 1e-9 * bound.max(1.0));
        }
    }

    #[test]
    fn chi_and_alpha_estimates(c in realizable_class(12.0)) {
        let q = c.squares();
        let est: f64 = (0..3).map(|i| q[i] * (q[(i + 1) % 3] - 3.0) * (q[(i + 2) % 3] - 3.0)).sum::<f64>() / 3.0;
        prop_assert!(c.radicand() <= est + 1e-9 * est.max(1.0));
        let g = c.gamma();
        prop_assert!(-24.0 * c.alpha() * c.chi().unwrap() <= g + 1e-9 * g);
    }

    #[test]
    fn realize_round_trip(c in realizable_class(8.0), l in lorentz()) {
        let t = realize(&c).unwrap();
        prop_assert!(chi_point(&t) >= 0.0);
        let back = congruence_of(&t.transformed(&l).unwrap()).unwrap().d();
        for (x, y) in back.iter().zip(c.d()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn radicand_nonnegative_implies_side_inequalities(
        a in SQRT_3..6.0f64, b in SQRT_3..6.0f64, c in SQRT_3..6.0f64
    ) {
        let k = CongruenceClass::new([a, b, c]).unwrap();
        if k.radicand() >= 0.0 {
            prop_assert!(k.satisfies_side_inequalities(1e-9));
        }
    }

    #[test]
    fn napoleonize_is_equivariant(t in triangle(), l in lorentz(), minus in any::<bool>()) {
        let eps = if minus { Orientation::Minus } else { Orientation::Plus };
        let p = NapoleonParams::new(eps);
        let a = napoleonize(&t, &p).unwrap();
        let b = napoleonize(&t.transformed(&l).unwrap(), &p).unwrap();
        for i in 0..3 {
            let moved = apply_isometry(&l, a.centroids[i]).unwrap().vec();
            prop_assert!(moved.max_abs_diff(b.centroids[i].vec()) <= 1e-9 * moved.x0);
        }
    }

    #[test]
    fn closed_form_matches_points(c in realizable_class(10.0), minus in any::<bool>()) {
        let eps = if minus { Orientation::Minus } else { Orientation::Plus };
        let c = c.canonical();
        let r = napoleonize(&realize(&c).unwrap(), &NapoleonParams::new(eps)).unwrap();
        let mut a = congruence_of(&Triangle::new(r.centroids).unwrap()).unwrap().d();
        let mut b = napoleonize_class(&c, &NapoleonParams::new(eps)).unwrap().d();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn certificate_rhs_is_bounded_below(c in realizable_class(10.0)) {
        let cert = nonexistence_certificate(&c).unwrap();
        let g = c.gap_max();
        prop_assert!(cert.rhs >= 192.0 * g * g * (1.0 - 1e-12));
        prop_assert!(cert.relative_error() <= 1e-9);
        if g > 0.0 {
            prop_assert!(cert.rhs > 0.0);
        }
    }

    /// The residual criterion at the stated absolute tolerances, on generic classes.
    #[test]
    fn residual_criterion(c in realizable_class(10.0)) {
        prop_assume!(c.gap_max() > 1e-9);
        for eps in Orientation::BOTH {
            let p = NapoleonParams::new(eps);
            let e = napoleonize_class(&c, &p).unwrap();
            let residual = napoleonic_residual(&c, &p).unwrap();
            if e.gap_max() <= 1e-8 {
                prop_assert!(residual.abs() <= 1e-6);
            }
            if residual.abs() <= 1e-12 {
                prop_assert!(e.gap_max() <= 1e-8);
            }
        }
    }

    /// `e_k² - e_j² = (8/γ) · residual · (d_k - d_j)`: the residual measures
    /// the e-gaps relative to the d-gaps, at any distance from the diagonal.
    #[test]
    fn residual_scales_the_gaps(
        d in 1.8..6.0f64,
        da in -1e-3..1e-3f64,
        db in -1e-3..1e-3f64,
    ) {
        let c = CongruenceClass::new([d + da, d + db, d]).unwrap();
        prop_assume!(c.radicand() > 0.0 && c.gap_max() > 1e-6);
        let c = c.canonical();
        for eps in Orientation::BOTH {
            let p = NapoleonParams::new(eps);
            let e2 = napoleonize_class(&c, &p).unwrap().squares();
            let factor = 8.0 * napoleonic_residual(&c, &p).unwrap() / c.gamma();
            let dd = c.d();
            for (j, k) in [(0, 1), (1, 2), (2, 0)] {
                let lhs = e2[k] - e2[j];
                let rhs = factor * (dd[k] - dd[j]);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * e2[k].max(1.0), "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn plus_iteration_contracts(c in realizable_class(10.0)) {
        let t = run(&c, Orientation::Plus, &StopCriterion::default()).unwrap();
        let mu0 = t.records[0].mu;
        for (k, r) in t.records.iter().enumerate() {
            prop_assert!(r.mu <= MU_FACTOR.powi(k as i32) * mu0 + k as f64 * 1e-9);
        }
        for w in t.records.windows(2) {
            prop_assert!(w[1].mu <= w[0].mu);
        }
        if t.records.len() >= 2 {
            prop_assert!(contraction_report(&t).unwrap().passed());
        }
    }

    #[test]
    fn minus_iteration_bounds(c in realizable_class(10.0)) {
        let stop = StopCriterion { max_steps: 200, ..StopCriterion::default() };
        let t = run(&c, Orientation::Minus, &stop).unwrap();
        let r = contraction_report(&t).unwrap();
        prop_assert!(r.max_gap_ratio.is_none_or(|m| m <= RHO + 1e-9));
        prop_assert!(r.order_preserved && r.step_bound_ok && r.closure_ok && r.d0_bound_ok);
    }
}

#[test]
fn side_inequalities_do_not_imply_realizability() {
    // (3, 2, 2): every side inequality holds (8 <= 9) yet the radicand is -6
    let c = CongruenceClass::new([3.0, 2.0, 2.0]).unwrap();
    assert!(c.satisfies_side_inequalities(0.0));
    assert!((c.radicand() + 6.0).abs() < 1e-12);
    assert!(realize(&c).is_err());
}

#[test]
fn absolute_gap_form_fails_next_to_the_diagonal() {
    // tiny d-gaps give tiny e-gaps for eps = -1 although the residual is far from 0
    let c = CongruenceClass::new([2.0 + 1e-10, 2.0, 2.0]).unwrap();
    let p = NapoleonParams::new(Orientation::Minus);
    let e = napoleonize_class(&c, &p).unwrap();
    assert!(e.gap_max() <= 1e-8);
    assert!(napoleonic_residual(&c, &p).unwrap().abs() > 20.0);
}

#[test]
fn radicand_and_side_inequalities_on_a_grid() {
    let g = Grid {
        min: SQRT_3,
        max: 6.0,
        step: 0.05,
    };
    let v = g.values();
    let (mut realizable, mut only_sides) = (0, 0);
    for &a in &v {
        for &b in &v {
            for &c in &v {
                let k = CongruenceClass::new([a, b, c]).unwrap();
                let sides = k.satisfies_side_inequalities(1e-9);
                if k.radicand() >= -1e-9 {
                    realizable += 1;
                    assert!(sides, "{:?}", k.d());
                } else if sides {
                    only_sides += 1;
                }
            }
        }
    }
    assert!(realizable > 0);
    // the converse fails on a set of positive measure
    assert!(only_sides > 0);
}

#[test]
fn certify_is_schedule_independent() {
    let g = Grid {
        min: SQRT_3 + 0.01,
        max: 4.5,
        step: 0.07,
    };
    let seq = certify(&g, Execution::Sequential).unwrap();
    let par = hypnap_core::par::with_threads(3, || certify(&g, Execution::Parallel)).unwrap();
    assert_eq!(seq, par);
    assert!(seq.passed());
}

#[test]
fn random_points_are_deterministic() {
    let mut a = ChaCha8Rng::seed_from_u64(9);
    let mut b = a.clone();
    for _ in 0..100 {
        assert_eq!(random_point(&mut a, 2.0).unwrap(), random_point(&mut b, 2.0).unwrap());
    }
    assert_eq!(random_point(&mut a, 0.0).unwrap(), HPoint::ORIGIN);
}
