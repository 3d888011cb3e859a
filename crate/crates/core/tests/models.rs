mod common;

use odimdp::models::{
    imdp_footprint, imdp_scalar_formula, odimdp_footprint, odimdp_scalar_formula, product_imdp,
    product_imdp_lumped, validate_odimdp, Imdp, IntervalAmbiguity, OdImdp, ViolationKind, SINK,
};
use odimdp::Error;
use rand::Rng;

use common::*;

#[test]
fn joint_upper_is_product_of_marginal_uppers() {
    let (model, _, s) = worked_fixture();
    let flat = product_imdp(&model, u128::MAX).unwrap();
    let t = model.layout().index_of(&[1, 1]);
    // 0.8 (horizontal) · 0.5 (vertical)
    assert!((flat.bounds(s, 0).upper[t] - 0.4).abs() < 1e-15);
}

#[test]
fn random_two_by_two_products_match_brute_force() {
    let mut rng = rng(85);
    for _ in 0..200 {
        let a = random_interval(&mut rng, 2);
        let b = random_interval(&mut rng, 2);
        let model = OdImdp::from_fn(vec![2, 2], vec!["u".into()], |s, _, axis| {
            if s.coords[axis] == SINK {
                IntervalAmbiguity::point_mass(2, SINK)
            } else if axis == 0 {
                a.clone()
            } else {
                b.clone()
            }
        })
        .unwrap();
        let flat = product_imdp(&model, u128::MAX).unwrap();
        let s = model.layout().index_of(&[1, 1]);
        let bounds = flat.bounds(s, 0);
        for i in 0..2 {
            for j in 0..2 {
                let t = model.layout().index_of(&[i, j]);
                assert_eq!(bounds.lower[t], a.lower()[i] * b.lower()[j]);
                assert_eq!(bounds.upper[t], a.upper()[i] * b.upper()[j]);
            }
        }
    }
}

#[test]
fn degenerate_marginals_give_the_product_distribution() {
    let p = [0.0, 0.25, 0.75];
    let q = [0.0, 0.6, 0.4];
    let model = OdImdp::from_fn(vec![3, 3], vec!["u".into()], |s, _, axis| {
        if s.coords[axis] == SINK {
            IntervalAmbiguity::point_mass(3, SINK)
        } else {
            IntervalAmbiguity::degenerate(if axis == 0 { p.to_vec() } else { q.to_vec() }).unwrap()
        }
    })
    .unwrap();
    let flat = product_imdp(&model, u128::MAX).unwrap();
    let s = model.layout().index_of(&[2, 1]);
    let b = flat.bounds(s, 0);
    for t in 0..9 {
        let c = model.layout().coords(t);
        assert_eq!(b.lower[t], b.upper[t]);
        assert_eq!(b.lower[t], p[c[0]] * q[c[1]]);
    }
    assert!((b.lower.iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

#[test]
fn validation_reports_the_offending_entry() {
    let (model, _, _) = worked_fixture();
    let mut raw = model.raw().to_vec();
    // source (1,1) = index 4, action 0, axis 1: lower block starts at 3 + 3 = 6
    let row = model.layout().index_of(&[1, 1]) * 2 * model.layout().marginal_total();
    raw[row + 6 + 2] = 0.9; // lower > upper (0.6) at t = 2
    let bad = OdImdp::from_raw_unchecked(vec![3, 3], vec!["a".into()], raw.clone()).unwrap();
    let violations = validate_odimdp(&bad);
    assert_eq!(violations.len(), 2, "{violations:?}"); // entry and lower mass
    let v = &violations[0];
    assert_eq!((v.source, v.action, v.axis), (4, 0, 1));
    assert!(matches!(v.kind, ViolationKind::Bounds(odimdp::models::BoundIssue::Entry { index: 2, .. })));
    assert!(matches!(
        OdImdp::new(vec![3, 3], vec!["a".into()], raw),
        Err(Error::Validation { count: 2, .. })
    ));
}

#[test]
fn stored_scalars_follow_the_closed_forms() {
    // 40×40 grid without sinks, 9 actions: 2·1600·9·2·40
    let model = OdImdp::from_fn(vec![40, 40], (0..9).map(|a| a.to_string()).collect(), |_, _, _| {
        IntervalAmbiguity::unconstrained(40)
    });
    // a sink-free axis still has index 0 as the sink, which must be absorbing
    assert!(model.is_err());
    assert_eq!(odimdp_scalar_formula(1600, 9, 2), Some(2_304_000));
    assert_eq!(odimdp_scalar_formula(1600, 9, 2).unwrap() * 8, 18_432_000);

    let (model, _, _) = worked_fixture();
    let fp = odimdp_footprint(&model);
    assert_eq!(fp.scalars, 2 * 9 * 6);
    assert_eq!(Some(fp.scalars), odimdp_scalar_formula(9, 1, 2));
    assert_eq!(fp.grid_states, 4);
    let flat = product_imdp(&model, u128::MAX).unwrap();
    assert_eq!(imdp_footprint(&flat).scalars, imdp_scalar_formula(9, 1));
    assert_eq!(flat.raw().len() as u128, imdp_scalar_formula(9, 1));
}

#[test]
fn capacity_error_reports_sizes() {
    let (model, _, _) = worked_fixture();
    match product_imdp(&model, 64) {
        Err(Error::Capacity { needed_bytes, budget_bytes, .. }) => {
            assert_eq!(needed_bytes, 2 * 81 * 8);
            assert_eq!(budget_bytes, 64);
        }
        other => panic!("expected capacity error, got {other:?}"),
    }
}

#[test]
fn lumped_product_is_a_valid_imdp_inside_the_odimdp_set() {
    let mut rng = rng(12);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let model = random_odimdp(&mut rng, n, 4, 1);
        let lumped = product_imdp_lumped(&model, u128::MAX).unwrap();
        let check = Imdp::new(lumped.num_states(), lumped.action_labels().to_vec(), lumped.raw().to_vec());
        assert!(check.is_ok(), "{check:?}");
        let layout = model.layout();
        let exit = layout.index_of(&vec![SINK; n]);
        for s in (0..model.num_states()).filter(|&s| !layout.has_sink(s)) {
            let b = lumped.bounds(s, 0);
            for t in (0..model.num_states()).filter(|&t| layout.has_sink(t) && t != exit) {
                assert_eq!((b.lower[t], b.upper[t]), (0.0, 0.0));
            }
            // the exit bound encloses every product of feasible marginals
            for _ in 0..50 {
                let stay: f64 = (0..n)
                    .map(|i| {
                        let m = model.marginal(s, 0, i);
                        1.0 - sample_feasible(&mut rng, m.lower, m.upper)[SINK]
                    })
                    .product();
                assert!(1.0 - stay >= b.lower[exit] - 1e-12 && 1.0 - stay <= b.upper[exit] + 1e-12);
            }
        }
    }
}
