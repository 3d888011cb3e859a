mod common;

use odimdp::abstraction::{marginal_bounds, sink_bounds, AxisMoments};
use odimdp::bellman::{
    evaluate_policy_trace, imdp_bellman, o_maximization, recursive_bellman, value_iteration_trace,
    Adversary, EliminationOrder, IterationOptions, Labeling, PropertyKind, SpecDirection,
    StateLabel,
};
use odimdp::models::{product_imdp, Bounds, IntervalAmbiguity, OdImdp, SINK};
use proptest::prelude::*;

use common::*;

/// Interval set around a random distribution: per entry a weight and two
/// slack fractions.
fn interval(m: usize) -> impl Strategy<Value = IntervalAmbiguity> {
    prop::collection::vec((0.01f64..1.0, 0.0f64..=1.0, 0.0f64..=1.0), m).prop_map(|entries| {
        let total: f64 = entries.iter().map(|e| e.0).sum();
        let (lo, up) = entries
            .iter()
            .map(|&(w, a, b)| {
                let p = w / total;
                (p * a, (p + (1.0 - p) * b).min(1.0))
            })
            .unzip();
        IntervalAmbiguity::new(lo, up).unwrap()
    })
}

/// odIMDP with `1..=3` axes of `2..=4` states and one action; every
/// non-sink source draws its marginals from a pool.
fn odimdp() -> impl Strategy<Value = OdImdp> {
    prop::collection::vec(2usize..=4, 1..=3)
        .prop_flat_map(|sizes| {
            let pools: Vec<_> = sizes.iter().map(|&m| prop::collection::vec(interval(m), 3)).collect();
            (Just(sizes), pools, any::<u64>())
        })
        .prop_map(|(sizes, pools, salt)| {
            let mut k = salt;
            OdImdp::from_fn(sizes.clone(), vec!["a".into()], |s, _, axis| {
                if s.coords[axis] == SINK {
                    return IntervalAmbiguity::point_mass(sizes[axis], SINK);
                }
                k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                pools[axis][(k >> 33) as usize % 3].clone()
            })
            .unwrap()
        })
}

fn with_values(len_hint: usize) -> impl Strategy<Value = (OdImdp, Vec<f64>)> {
    odimdp().prop_flat_map(move |m| {
        let n = m.num_states().max(len_hint);
        let v = prop::collection::vec(0.0f64..=1.0, n);
        (Just(m), v).prop_map(|(m, mut v)| {
            v.truncate(m.num_states());
            (m, v)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn products_of_feasible_marginals_satisfy_product_bounds(model in odimdp(), seed in any::<u64>()) {
        let flat = product_imdp(&model, u128::MAX).unwrap();
        let layout = model.layout();
        let mut rng = rng(seed);
        for s in 0..model.num_states() {
            let gammas: Vec<Vec<f64>> = (0..model.num_axes())
                .map(|i| {
                    let b = model.marginal(s, 0, i);
                    sample_feasible(&mut rng, b.lower, b.upper)
                })
                .collect();
            let b = flat.bounds(s, 0);
            for t in 0..layout.num_states() {
                let c = layout.coords(t);
                let p: f64 = c.iter().enumerate().map(|(i, &ci)| gammas[i][ci]).product();
                prop_assert!(p >= b.lower[t] - 1e-12 && p <= b.upper[t] + 1e-12);
            }
        }
    }

    #[test]
    fn recursive_bound_is_sound_and_dominates((model, v) in with_values(0)) {
        let flat = product_imdp(&model, u128::MAX).unwrap();
        for s in 0..model.num_states() {
            let joint = model.layout().joint(s);
            for order in [EliminationOrder::Forward, EliminationOrder::Reverse] {
                let lo = recursive_bellman(&model, &v, &joint, 0, Adversary::Pessimistic, order).unwrap();
                let hi = recursive_bellman(&model, &v, &joint, 0, Adversary::Optimistic, order).unwrap();
                prop_assert!(lo <= multilinear_opt(&model, &v, s, 0, true) + 1e-9);
                prop_assert!(hi >= multilinear_opt(&model, &v, s, 0, false) - 1e-9);
                prop_assert!(lo >= imdp_bellman(&flat, &v, s, 0, Adversary::Pessimistic).unwrap() - 1e-9);
                prop_assert!(hi <= imdp_bellman(&flat, &v, s, 0, Adversary::Optimistic).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn recursive_bound_is_monotone_in_values((model, v) in with_values(0), bumps in prop::collection::vec(0.0f64..0.5, 64)) {
        let w: Vec<f64> = v.iter().zip(bumps.iter().cycle()).map(|(a, b)| a + b).collect();
        for s in 0..model.num_states() {
            let joint = model.layout().joint(s);
            for adv in [Adversary::Pessimistic, Adversary::Optimistic] {
                let a = recursive_bellman(&model, &v, &joint, 0, adv, EliminationOrder::Forward).unwrap();
                let b = recursive_bellman(&model, &w, &joint, 0, adv, EliminationOrder::Forward).unwrap();
                prop_assert!(a <= b + 1e-12);
            }
        }
    }

    #[test]
    fn value_iteration_is_ordered_and_monotone_in_horizon(model in odimdp(), marks in prop::collection::vec(0u8..5, 64)) {
        let layout = model.layout();
        let labels: Vec<StateLabel> = (0..model.num_states())
            .map(|s| if layout.has_sink(s) {
                StateLabel::Avoid
            } else {
                match marks[s % marks.len()] {
                    0 => StateLabel::Reach,
                    1 => StateLabel::Avoid,
                    _ => StateLabel::Transient,
                }
            })
            .collect();
        let labeling = Labeling::new(labels, PropertyKind::ReachAvoid).unwrap();
        let opts = IterationOptions::default();
        let trace = value_iteration_trace((&model).into(), &labeling, 6, SpecDirection::PESSIMISTIC_MAX, &opts).unwrap();
        for k in 1..trace.history.len() {
            for (a, b) in trace.history[k - 1].iter().zip(&trace.history[k]) {
                prop_assert!(a <= &(b + 1e-12));
            }
        }
        let lower = evaluate_policy_trace((&model).into(), &labeling, &trace.policy, Adversary::Pessimistic, &opts).unwrap();
        let upper = evaluate_policy_trace((&model).into(), &labeling, &trace.policy, Adversary::Optimistic, &opts).unwrap();
        for k in 0..lower.len() {
            for s in 0..model.num_states() {
                prop_assert!(lower[k][s] <= upper[k][s] + 1e-12);
                // the synthesized policy's pessimistic value is the optimum
                prop_assert!((lower[k][s] - trace.history[k][s]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn omax_affine_equivariance(amb in interval(6), values in prop::collection::vec(-5.0f64..5.0, 6), a in 0.01f64..10.0, b in -10.0f64..10.0) {
        for adv in [Adversary::Pessimistic, Adversary::Optimistic] {
            let base = o_maximization(&values, amb.bounds(), adv).unwrap();
            let moved: Vec<f64> = values.iter().map(|v| a * v + b).collect();
            let other = o_maximization(&moved, amb.bounds(), adv).unwrap();
            prop_assert!((other.value - (a * base.value + b)).abs() < 1e-9 * (1.0 + other.value.abs()));
            prop_assert_eq!(&other.witness, &base.witness);
        }
    }

    #[test]
    fn omax_permutation_invariance(amb in interval(6), values in prop::collection::vec(-5.0f64..5.0, 6), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let lo: Vec<f64> = perm.iter().map(|&i| amb.lower()[i]).collect();
        let up: Vec<f64> = perm.iter().map(|&i| amb.upper()[i]).collect();
        let pv: Vec<f64> = perm.iter().map(|&i| values[i]).collect();
        for adv in [Adversary::Pessimistic, Adversary::Optimistic] {
            let base = o_maximization(&values, amb.bounds(), adv).unwrap();
            let other = o_maximization(&pv, Bounds::new(&lo, &up), adv).unwrap();
            prop_assert!((other.value - base.value).abs() < 1e-12);
            prop_assert!((other.value - lp_opt(&values, amb.lower(), amb.upper(), adv == Adversary::Pessimistic)).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_bounds_enclose_every_moment_in_the_box(
        mu in -3.0f64..3.0, mu_w in 0.0f64..2.0,
        var in 0.01f64..3.0, var_w in 0.0f64..3.0,
        a in -4.0f64..4.0, width in 0.0f64..3.0,
        s in 0.0f64..=1.0, t in 0.0f64..=1.0,
    ) {
        let m = AxisMoments { mean: (mu, mu + mu_w), variance: (var, var + var_w) };
        let (lo, hi) = marginal_bounds(&m, (a, a + width)).unwrap();
        let (sink_lo, sink_hi) = sink_bounds(&m, (-4.0, 4.0)).unwrap();
        prop_assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
        prop_assert!(sink_lo <= sink_hi);
        let (x, v) = (mu + s * mu_w, var + t * var_w);
        let p = gaussian_mass(x, v, a, a + width);
        prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
        let q = 1.0 - gaussian_mass(x, v, -4.0, 4.0);
        prop_assert!(q >= sink_lo - 1e-9 && q <= sink_hi + 1e-9);
    }
}
