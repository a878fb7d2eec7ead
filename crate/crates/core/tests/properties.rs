use mono_sgt_core::charmap::{check_weakly_nondecreasing, linspace, MultiMap, Verdict};
use mono_sgt_core::dynsys::{integrate, InputSignal, IntegratorOptions, SystemDef};
use mono_sgt_core::inclusion::{
    find_fixed_points, iterate_paths, make_zorro, membership_residual, replay, PathOptions, PiecewiseLinearMap,
};
use mono_sgt_core::order::OrderCone;
use mono_sgt_core::smallgain::registry;
use proptest::prelude::*;

fn cone_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::bool::ANY, 1..4)
        .prop_map(|v| v.into_iter().map(|b| if b { '+' } else { '-' }).collect())
}

fn coarse(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-2i32..=2).prop_map(|k| k as f64 * 0.5), n)
}

proptest! {
    #[test]
    fn order_is_a_partial_order((signs, a, b, c) in cone_strategy().prop_flat_map(|s| {
        let n = s.len();
        (Just(s), coarse(n), coarse(n), coarse(n))
    })) {
        let k = OrderCone::parse(&signs).unwrap();
        prop_assert!(k.leq(&a, &a).unwrap());
        if k.leq(&a, &b).unwrap() && k.leq(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if k.leq(&a, &b).unwrap() && k.leq(&b, &c).unwrap() {
            prop_assert!(k.leq(&a, &c).unwrap());
        }
        if k.ll(&a, &b).unwrap() {
            prop_assert!(k.leq(&a, &b).unwrap() && a != b);
        }
    }

    #[test]
    fn polyline_values_are_sorted_and_on_the_curve(eps in 0.0f64..4.0, w in 0.0f64..=1.0) {
        let z = make_zorro(eps).unwrap();
        let vals = z.eval(w, 1e-12);
        prop_assert!(!vals.is_empty());
        prop_assert!(vals.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn paths_replay(eps in 0.0f64..3.0, w0 in 0.0f64..=1.0) {
        let f = MultiMap::piecewise_linear(make_zorro(eps).unwrap());
        let set = iterate_paths(&f, w0, &PathOptions { depth: 25, ..PathOptions::default() }).unwrap();
        for p in &set.paths {
            prop_assert!(replay(&f, p, 1e-12).unwrap());
            prop_assert_eq!(p.values.len(), p.branches.len() + 1);
        }
    }

    #[test]
    fn fixed_points_are_members(eps in 0.0f64..3.0, grid in 5usize..200) {
        let f = MultiMap::piecewise_linear(make_zorro(eps).unwrap());
        let fp = find_fixed_points(&f, 0.0, 1.0, grid, 1e-9).unwrap();
        prop_assert!(fp.len() >= 3);
        for w in fp {
            prop_assert!(membership_residual(&f, w).unwrap() < 1e-9);
        }
    }

    #[test]
    fn k2_values_solve_the_cubic(y in 0.0f64..12.0) {
        let k2 = registry::k2().unwrap();
        for z in k2.eval(y).unwrap() {
            let r = z * (2.0 * z * z - 9.0 * z + 12.0) - y;
            prop_assert!(r.abs() < 1e-9, "P({}) - {} = {}", z, y, r);
        }
    }

    #[test]
    fn integrator_matches_linear_solution(a in 0.1f64..3.0, x0 in 0.0f64..5.0, u in 0.0f64..5.0) {
        let sys = SystemDef::from_strs("lin", &[&format!("-{a:?}*x1 + u")], "x1").unwrap();
        let tr = integrate(&sys, &[x0], &InputSignal::Constant(u), 2.0, &IntegratorOptions::default()).unwrap();
        let exact = u / a + (x0 - u / a) * (-2.0 * a).exp();
        prop_assert!((tr.last_state()[0] - exact).abs() < 1e-7);
    }

    #[test]
    fn verdict_and_is_commutative_and_associative(i in 0usize..3, j in 0usize..3, k in 0usize..3) {
        let v = [Verdict::Pass, Verdict::Fail, Verdict::Inconclusive];
        let (a, b, c) = (v[i], v[j], v[k]);
        prop_assert_eq!(a.and(b), b.and(a));
        prop_assert_eq!(a.and(b).and(c), a.and(b.and(c)));
    }
}

#[test]
fn k2_is_weakly_nondecreasing_on_a_fine_grid() {
    let s = OrderCone::standard();
    let r = check_weakly_nondecreasing(&registry::k2().unwrap(), &linspace(0.0, 12.0, 121), &s, &s).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn decreasing_polyline_fails_monotonicity() {
    let f = MultiMap::piecewise_linear(PiecewiseLinearMap::new(vec![(0.0, 1.0), (1.0, 0.0)]).unwrap());
    let s = OrderCone::standard();
    assert!(!check_weakly_nondecreasing(&f, &linspace(0.0, 1.0, 5), &s, &s).unwrap().pass);
    assert!(check_weakly_nondecreasing(&f, &linspace(0.0, 1.0, 5), &s, &OrderCone::opposite()).unwrap().pass);
}
