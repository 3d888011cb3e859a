use odimdp::synthesis::clopper_pearson;
use odimdp::systems::{benchmark, sample_component, sample_step, trajectory_rng, BENCHMARK_NAMES};

#[test]
fn every_listed_benchmark_resolves() {
    for name in BENCHMARK_NAMES {
        let name = name.replace("(n)", "(3)");
        let def = benchmark(&name).unwrap();
        def.kernel.check().unwrap();
        def.spec.check().unwrap();
        assert_eq!(def.horizon(), 10, "{name}");
    }
    assert!(benchmark("no_such_system").is_err());
    assert!(benchmark("linear_nd(0)").is_err());
}

#[test]
fn benchmark_shapes() {
    let car = benchmark("car_parking").unwrap();
    assert_eq!(car.kernel.num_inputs(), 9);
    assert_eq!(car.partition().unwrap().num_cells(), 1600);
    let bas = benchmark("bas4d").unwrap();
    assert_eq!(bas.counts, vec![5, 5, 7, 7]);
    assert_eq!(bas.kernel.num_inputs(), 4);
    let switched = benchmark("switched").unwrap();
    assert_eq!(switched.kernel.num_components(), 2);
    let w: Vec<f64> = switched.kernel.components.iter().map(|c| c.weight.eval(&[0.3, -0.2])).collect();
    assert_eq!(w, vec![0.7, 0.3]);
}

#[test]
fn car_parking_samples_have_the_analytic_mean() {
    let def = benchmark("car_parking").unwrap();
    let n = 100_000;
    let mut rng = trajectory_rng(17, 0);
    let mut sum = [0.0; 2];
    for _ in 0..n {
        let x = sample_step(&def.kernel, &[0.0, 0.0], &[1.0, 1.0], &mut rng);
        sum[0] += x[0];
        sum[1] += x[1];
    }
    // unit variance per axis: 3σ/√N
    let tol = 3.0 / (n as f64).sqrt();
    for s in sum {
        assert!((s / n as f64 - 0.7).abs() < tol, "{}", s / n as f64);
    }
}

#[test]
fn switched_component_frequencies() {
    let def = benchmark("switched").unwrap();
    let n = 100_000u64;
    let mut rng = trajectory_rng(23, 5);
    let first = (0..n).filter(|_| sample_component(&def.kernel, &[0.5, 0.5], &mut rng) == 0).count();
    let (lo, hi) = clopper_pearson(first as u64, n, 0.001);
    assert!(lo <= 0.7 && 0.7 <= hi, "{first}/{n}");
}

#[test]
fn streams_are_reproducible_and_independent() {
    let def = benchmark("car_parking").unwrap();
    let run = |seed, stream| {
        let mut rng = trajectory_rng(seed, stream);
        sample_step(&def.kernel, &[1.0, 2.0], &[0.0, 1.0], &mut rng)
    };
    assert_eq!(run(1, 4), run(1, 4));
    assert_ne!(run(1, 4), run(1, 5));
    assert_ne!(run(1, 4), run(2, 4));
}
