//! Built-in benchmark systems and sampling from Gaussian(-mixture) kernels.



use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::abstraction::{GaussianComponent, GaussianKernelSpec, MeanMap, RectPartition, WeightMap};
use crate::error::{Error, Result};
use crate::synthesis::spec::{Rect, ReachAvoidSpec};

pub const DEFAULT_HORIZON: usize = 10;

/// A named system with its default abstraction grid and specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkDef {
    pub name: String,
    pub kernel: GaussianKernelSpec,
    pub region: Rect,
    pub counts: Vec<usize>,
    pub spec: ReachAvoidSpec,
}

impl BenchmarkDef {
    pub fn horizon(&self) -> usize {
        self.spec.horizon
    }

    pub fn partition(&self) -> Result<RectPartition> {
        RectPartition::new(&self.region, &self.counts)
    }

    pub fn with_counts(mut self, counts: Vec<usize>) -> Self {
        self.counts = counts;
        self
    }
}

/// Names accepted by [`benchmark`]; `linear_nd` takes a dimension, e.g.
/// `linear_nd(6)`.
pub const BENCHMARK_NAMES: &[&str] = &[
    "car_parking",
    "robot_reach",
    "robot_reach_avoid",
    "bas4d",
    "van_der_pol",
    "linear_nd(n)",
    "switched",
];

fn diag(d: &[f64]) -> Vec<Vec<f64>> {
    (0..d.len())
        .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect())
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn labelled(mut kernel: GaussianKernelSpec, labels: Vec<String>) -> GaussianKernelSpec {
    kernel.input_labels = labels;
    kernel
}

fn car_parking() -> Result<BenchmarkDef> {
    let grid = [-1.0, 0.0, 1.0];
    let mut inputs = Vec::new();
    for &u1 in &grid {
        for &u2 in &grid {
            inputs.push(vec![u1, u2]);
        }
    }
    let labels = inputs.iter().map(|u| format!("({},{})", u[0], u[1])).collect();
    let kernel = GaussianKernelSpec::gaussian(
        MeanMap::Affine {
            a: diag(&[0.9, 0.9]),
            b: diag(&[0.7, 0.7]),
            c: vec![],
        },
        vec![1.0, 1.0],
        inputs,
    )?;
    Ok(BenchmarkDef {
        name: "car_parking".into(),
        kernel: labelled(kernel, labels),
        region: vec![(-10.0, 10.0); 2],
        counts: vec![40, 40],
        spec: ReachAvoidSpec::reach_avoid(
            vec![vec![(4.0, 10.0), (-4.0, 0.0)]],
            vec![vec![(4.0, 10.0), (0.0, 4.0)]],
            DEFAULT_HORIZON,
        )?,
    })
}

/// Inputs `(u1 cos u2, u1 sin u2)` over a `k × k` grid of `[-1, 1]²`, so the
/// dynamics become linear in the transformed input. Every grid pair is kept
/// (including coincident images) so actions match `|A1|·|A2|`.
pub fn robot_inputs(k: usize) -> (Vec<Vec<f64>>, Vec<String>) {
    let pts = linspace(-1.0, 1.0, k);
    let mut inputs = Vec::with_capacity(k * k);
    let mut labels = Vec::with_capacity(k * k);
    for &u1 in &pts {
        for &u2 in &pts {
            inputs.push(vec![u1 * u2.cos(), u1 * u2.sin()]);
            labels.push(format!("({u1:.2},{u2:.2})"));
        }
    }
    (inputs, labels)
}

fn robot(avoid: bool) -> Result<BenchmarkDef> {
    let (k, cells) = if avoid { (21, 40) } else { (11, 20) };
    let (inputs, labels) = robot_inputs(k);
    let kernel = GaussianKernelSpec::gaussian(
        MeanMap::Affine {
            a: diag(&[1.0, 1.0]),
            b: diag(&[10.0, 10.0]),
            c: vec![],
        },
        vec![0.75, 0.75],
        inputs,
    )?;
    let o = if avoid {
        vec![vec![(-2.0, 2.0); 2]]
    } else {
        Vec::new()
    };
    Ok(BenchmarkDef {
        name: if avoid { "robot_reach_avoid" } else { "robot_reach" }.into(),
        kernel: labelled(kernel, labels),
        region: vec![(-10.0, 10.0); 2],
        counts: vec![cells, cells],
        spec: ReachAvoidSpec::reach_avoid(vec![vec![(5.0, 7.0); 2]], o, DEFAULT_HORIZON)?,
    })
}

fn bas4d() -> Result<BenchmarkDef> {
    let a = vec![
        vec![0.6682, 0.0, 0.02632, 0.0],
        vec![0.0, 0.683, 0.0, 0.02096],
        vec![1.0005, 0.0, -0.000499, 0.0],
        vec![0.0, 0.8004, 0.0, 0.1996],
    ];
    let b = vec![vec![0.1320], vec![0.1402], vec![0.0], vec![0.0]];
    // constant drift of the affine model; without it the heat-exchange rows
    // map x3, x4 to about 20 and every cell leaves the region in one step
    let c = vec![3.4378, 2.9272, 13.0207, 10.4166];
    let inputs: Vec<Vec<f64>> = [17.0, 18.0, 19.0, 20.0].iter().map(|&u| vec![u]).collect();
    let labels = inputs.iter().map(|u| format!("{}", u[0])).collect();
    let kernel = GaussianKernelSpec::gaussian(
        MeanMap::Affine { a, b, c },
        vec![1.0 / 12.9199, 1.0 / 12.9199, 1.0 / 2.5826, 1.0 / 3.2276],
        inputs,
    )?;
    Ok(BenchmarkDef {
        name: "bas4d".into(),
        kernel: labelled(kernel, labels),
        region: vec![(18.75, 21.25), (18.75, 21.25), (29.5, 36.5), (29.5, 36.5)],
        counts: vec![5, 5, 7, 7],
        spec: ReachAvoidSpec::safety(DEFAULT_HORIZON),
    })
}

fn van_der_pol() -> Result<BenchmarkDef> {
    let inputs: Vec<Vec<f64>> = linspace(-1.0, 1.0, 11).into_iter().map(|u| vec![u]).collect();
    let labels = inputs.iter().map(|u| format!("{:.1}", u[0])).collect();
    let kernel = GaussianKernelSpec::gaussian(MeanMap::VanDerPol { tau: 0.1 }, vec![0.2, 0.2], inputs)?;
    Ok(BenchmarkDef {
        name: "van_der_pol".into(),
        kernel: labelled(kernel, labels),
        region: vec![(-4.0, 4.0); 2],
        counts: vec![50, 50],
        spec: ReachAvoidSpec::reach_avoid(
            vec![vec![(-1.4, -0.7), (-2.9, -2.0)]],
            Vec::new(),
            DEFAULT_HORIZON,
        )?,
    })
}

/// Circulant Toeplitz matrix: 0.7 on the diagonal, −0.1 on the
/// superdiagonal and in the bottom-left corner.
pub fn linear_nd_matrix(n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += 0.7;
        if n > 1 {
            row[(i + 1) % n] += -0.1;
        }
    }
    a
}

fn linear_nd(n: usize) -> Result<BenchmarkDef> {
    if n == 0 {
        return Err(Error::UnknownBenchmark("linear_nd needs n ≥ 1".into()));
    }
    let kernel = GaussianKernelSpec::gaussian(
        MeanMap::Affine {
            a: linear_nd_matrix(n),
            b: vec![vec![]; n],
            c: vec![],
        },
        // Printed as N(0, 0.1 I); read as standard deviation 0.1. With
        // variance 0.1 the true 10-step safety probability is around 0.2.
        vec![0.01; n],
        vec![vec![]],
    )?;
    Ok(BenchmarkDef {
        name: format!("linear_nd({n})"),
        kernel: labelled(kernel, vec!["none".into()]),
        region: vec![(-1.0, 1.0); n],
        counts: vec![8; n],
        spec: ReachAvoidSpec::safety(DEFAULT_HORIZON),
    })
}

fn switched() -> Result<BenchmarkDef> {
    let component = |a: Vec<Vec<f64>>, var: [f64; 2], w: f64| GaussianComponent {
        mean: MeanMap::Affine {
            a,
            b: vec![vec![]; 2],
            c: vec![],
        },
        variance: var.to_vec(),
        weight: WeightMap::Constant { value: w },
    };
    let kernel = GaussianKernelSpec::new(
        vec![
            component(vec![vec![0.1, 0.9], vec![0.8, 0.2]], [0.3 * 0.3, 0.2 * 0.2], 0.7),
            component(vec![vec![0.8, 0.2], vec![0.1, 0.9]], [0.2 * 0.2, 0.1 * 0.1], 0.3),
        ],
        vec![vec![]],
    )?;
    Ok(BenchmarkDef {
        name: "switched".into(),
        kernel: labelled(kernel, vec!["none".into()]),
        // the region of interest is not given; this box holds R and O and
        // keeps both aligned with the grid
        region: vec![(-2.0, 2.0); 2],
        counts: vec![40, 40],
        spec: ReachAvoidSpec::reach_avoid(
            vec![vec![(1.0, 2.0), (0.0, 1.0)]],
            vec![vec![(-1.0, 0.0), (-1.0, 1.0)]],
            DEFAULT_HORIZON,
        )?,
    })
}

/// Parses `linear_nd(6)`, `linear_nd6`, `linear_6d` and `linear6d`.
fn parse_linear(name: &str) -> Option<usize> {
    let rest = name.strip_prefix("linear")?;
    let rest = rest.strip_prefix("_nd").or_else(|| rest.strip_prefix('_')).unwrap_or(rest);
    let digits = rest
        .trim_start_matches('(')
        .trim_end_matches(')')
        .trim_end_matches('d');
    digits.parse().ok()
}

/// Looks up a built-in benchmark by name.
pub fn benchmark(name: &str) -> Result<BenchmarkDef> {
    match name {
        "car_parking" => car_parking(),
        "robot_reach" | "robot_reachability" => robot(false),
        "robot_reach_avoid" => robot(true),
        "bas4d" | "bas" => bas4d(),
        "van_der_pol" | "vanderpol" => van_der_pol(),
        "switched" => switched(),
        _ => match parse_linear(name) {
            Some(n) => linear_nd(n),
            None => Err(Error::UnknownBenchmark(format!(
                "{name}; known: {}",
                BENCHMARK_NAMES.join(", ")
            ))),
        },
    }
}

/// Index of the mixture component drawn at `x`.
pub fn sample_component<R: Rng + ?Sized>(kernel: &GaussianKernelSpec, x: &[f64], rng: &mut R) -> usize {
    if kernel.components.len() == 1 {
        return 0;
    }
    let w: Vec<f64> = kernel.components.iter().map(|c| c.weight.eval(x).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    let mut t = rng.random::<f64>() * total;
    for (r, &wr) in w.iter().enumerate() {
        if t < wr {
            return r;
        }
        t -= wr;
    }
    w.len() - 1
}

/// Draws the next state from the kernel at `(x, u)`.
pub fn sample_step<R: Rng + ?Sized>(kernel: &GaussianKernelSpec, x: &[f64], u: &[f64], rng: &mut R) -> Vec<f64> {
    let c = &kernel.components[sample_component(kernel, x, rng)];
    let mean = c.mean.eval(x, u);
    mean.iter()
        .zip(&c.variance)
        .map(|(&m, &v)| {
            let z: f64 = StandardNormal.sample(rng);
            m + v.sqrt() * z
        })
        .collect()
}

/// Seeded generator for trajectory `stream`: ChaCha8 keyed by `seed`, with
/// the stream id selecting an independent keystream.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
