use mono_sgt_core::charmap::{linspace, Verdict};
use mono_sgt_core::dynsys::{IntegratorOptions, Interval, SystemDef};
use mono_sgt_core::exec::Sequential;
use mono_sgt_core::inclusion::{classify_grid, make_zorro, membership_residual, GridVerdict, PathOptions};
use mono_sgt_core::smallgain::{
    attractive_set, box_grid, builtin_examples, image_check, lookup, loop_equilibria, registry, validate_convergence,
    verify_hypotheses, Budget, Example, Interconnection,
};
use mono_sgt_core::Error;

fn integ() -> IntegratorOptions {
    IntegratorOptions::with_tol(1e-10, 1e-12)
}

#[test]
fn both_coordinate_systems_agree() {
    let pos = registry::sec5_positive_form().unwrap();
    let orig = registry::sec5_original().unwrap();
    let e_pos = loop_equilibria(&pos, 0.0, 8.0, 401, 1e-9).unwrap();
    let e_orig = loop_equilibria(&orig, 0.0, 1.0, 401, 1e-9).unwrap();
    assert_eq!((e_pos.len(), e_orig.len()), (1, 1));
    assert!((1.0 / (1.0 + e_pos[0] * e_pos[0]) - e_orig[0]).abs() < 1e-8);
    let (a, b) = (attractive_set(&pos, &e_pos).unwrap(), attractive_set(&orig, &e_orig).unwrap());
    assert!((a[0].x - b[0].x).abs() < 1e-8);
    assert!((a[0].z_set[0] - b[0].z_set[0]).abs() < 1e-8);
}

#[test]
fn loop_equilibria_are_members() {
    for ic in [registry::sec5_original().unwrap(), registry::multiequil().unwrap()] {
        let m = ic.w_loop().unwrap();
        for w in loop_equilibria(&ic, ic.w_range.lo, ic.w_range.hi, 401, 1e-9).unwrap() {
            assert!(membership_residual(&m, w).unwrap() < 1e-9, "{} at {w}", ic.name);
        }
    }
}

#[test]
fn decoupled_loop_has_one_equilibrium() {
    let x = SystemDef::from_strs("decay", &["-x1"], "x1").unwrap();
    let ic = Interconnection::new("decoupled", x, registry::sec5_z().unwrap())
        .unwrap()
        .with_ranges(Interval::new(0.0, 1.0), Interval::new(0.0, 12.0))
        .unwrap();
    let e = loop_equilibria(&ic, 0.0, 1.0, 101, 1e-9).unwrap();
    assert_eq!(e, [1.0]);
    let set = attractive_set(&ic, &e).unwrap();
    assert_eq!(set.len(), 1);
    assert_eq!(set[0].x, 0.0);
    assert_eq!(set[0].z_set, [0.0]);
}

#[test]
fn multiequil_attractive_pairs_and_convergence() {
    let ic = registry::multiequil().unwrap();
    let e = loop_equilibria(&ic, 0.0, 4.0, 401, 1e-9).unwrap();
    let set = attractive_set(&ic, &e).unwrap();
    assert_eq!(set.len(), 3);
    let s3 = 3f64.sqrt();
    for p in &set {
        assert_eq!(p.x, 4.5);
        assert_eq!(p.z_set.len(), 3);
        for (z, want) in p.z_set.iter().zip([(3.0 - s3) / 2.0, 1.5, (3.0 + s3) / 2.0]) {
            assert!((z - want).abs() < 1e-9);
        }
    }
    let starts = box_grid(&ic.state_box, 5);
    let r = validate_convergence(&ic, &set, &starts, 60.0, 1e-3, &integ(), &Sequential).unwrap();
    assert!(r.pass, "max distance {}", r.max_distance);
    let picked: Vec<f64> = r.starts.iter().filter_map(|s| s.selected.map(|x| x.1)).collect();
    assert!(picked.iter().any(|z| *z < 1.0) && picked.iter().any(|z| *z > 2.0), "both stable members are selected");
}

#[test]
fn start_on_the_attractive_point_stays() {
    let ic = registry::sec5_original().unwrap();
    let e = loop_equilibria(&ic, 0.0, 1.0, 401, 1e-9).unwrap();
    let set = attractive_set(&ic, &e).unwrap();
    let start = vec![set[0].x, set[0].z_set[0]];
    let r = validate_convergence(&ic, &set, &[start], 60.0, 1e-3, &integ(), &Sequential).unwrap();
    assert!(r.starts[0].distance < 1e-9, "{}", r.starts[0].distance);
}

#[test]
fn attractive_set_rejects_multivalued_k_x() {
    let ic = Interconnection::new("swapped", registry::sec5_positive_z().unwrap(), registry::multiequil_x().unwrap())
        .unwrap()
        .with_ranges(Interval::new(4.0, 5.0), Interval::new(0.0, 4.0))
        .unwrap();
    let err = attractive_set(&ic, &[4.5]).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolation(_)), "{err:?}");
}

#[test]
fn image_sequences_converge_on_both_examples() {
    // sec5: every w- and v-sequence converges, and so do the k_y-images.
    let ic = registry::sec5_positive_form().unwrap();
    let opts = PathOptions::default();
    let w_grid = linspace(0.0, 8.0, 9);
    let r = image_check(&ic.w_loop().unwrap(), &ic.k_y().unwrap(), &w_grid, 8, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let v = classify_grid(&ic.v_loop().unwrap(), &linspace(0.0, 12.0, 13), &opts, &Sequential).unwrap();
    assert_eq!(v.verdict, GridVerdict::AllConverge);

    // multiequil: raw w-sequences contain period-2 selections, images still settle at 4.5.
    let ic = registry::multiequil().unwrap();
    let w = classify_grid(&ic.w_loop().unwrap(), &linspace(0.0, 4.0, 9), &opts, &Sequential).unwrap();
    assert_eq!(w.verdict, GridVerdict::PeriodicFound);
    let r = image_check(&ic.w_loop().unwrap(), &ic.k_y().unwrap(), &linspace(0.0, 4.0, 9), 8, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.limits, [4.5]);
}

#[test]
fn verify_reports_routes_and_blocking() {
    let b = Budget::default();
    let r = verify_hypotheses(&registry::sec5_original().unwrap(), &b, &Sequential).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.condition4.route.as_deref(), Some("4"));
    assert_eq!(r.attractive_set.len(), 1);
    assert!(r.blocking.is_none());
    assert!(r.convergence.as_ref().unwrap().pass);

    let r = verify_hypotheses(&registry::multiequil().unwrap(), &b, &Sequential).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.condition4.route.as_deref(), Some("4'"));
    assert_eq!(r.loop_equilibria.len(), 3);
}

#[test]
fn starved_budget_is_inconclusive_not_pass() {
    let b =
        Budget { image_depth: 8, path: PathOptions { branch_cap: 5, ..PathOptions::default() }, ..Budget::default() };
    let r = verify_hypotheses(&registry::multiequil().unwrap(), &b, &Sequential).unwrap();
    assert_eq!(r.condition4.verdict, Verdict::Inconclusive);
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.blocking.unwrap().starts_with("condition4"));
}

#[test]
fn zero_budget_is_rejected() {
    let b = Budget { sweep_grid: vec![0], ..Budget::default() };
    assert!(verify_hypotheses(&registry::sec5_original().unwrap(), &b, &Sequential).is_err());
}

#[test]
fn registry_contents() {
    let names: Vec<String> = builtin_examples().unwrap().into_iter().map(|e| e.name).collect();
    for n in ["sec5-original", "sec5-positive-form", "multiequil", "zorro", "zorro-eps(ε)"] {
        assert!(names.iter().any(|x| x == n), "{n}");
    }
    let Example::Map(m) = lookup("zorro-eps(1.5)").unwrap() else { panic!() };
    assert_eq!(m.as_polyline().unwrap(), &make_zorro(1.5).unwrap());
    let Example::Interconnection(ic) = lookup("multiequil").unwrap() else { panic!() };
    let Example::Map(r) = lookup("R").unwrap() else { panic!() };
    assert_eq!(r.as_polyline().unwrap().vertices(), &[(0.0, 5.0), (0.5, 4.5), (2.5, 4.5), (3.5, 3.0)]);
    assert_eq!(ic.sys_x.eval_output(&[4.5]).unwrap(), 4.5);
    let Example::Interconnection(ic) = lookup("sec5-original").unwrap() else { panic!() };
    assert_eq!(ic.x_bound_offset, Some(6.0));
    assert_eq!(ic.sys_z.eval_output(&[2.0]).unwrap(), 0.2);
    match lookup("nope") {
        Err(Error::UnknownName { available, .. }) => assert!(available.iter().any(|a| a == "multiequil")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn closed_loop_field_matches_wiring() {
    use mono_sgt_core::dynsys::VectorField;
    let ic = registry::sec5_original().unwrap();
    let f = ic.closed_loop();
    let mut d = [0.0; 2];
    f.eval(0.0, &[1.0, 2.0], &mut d).unwrap();
    // ẋ = -1 + 5 + 1/(1+4), ż = -P(2) + 1
    assert!((d[0] - 4.2).abs() < 1e-15);
    assert!((d[1] - (-4.0 + 1.0)).abs() < 1e-15);
    let grid = box_grid(&ic.state_box, 3);
    assert_eq!(grid.len(), 9);
    assert_eq!(grid[5], [5.0, 5.0]);
}
