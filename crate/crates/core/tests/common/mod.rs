//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver code paths it is used to check.
#![allow(dead_code)]

use odimdp::models::{IntervalAmbiguity, OdImdp, SINK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vertices of `{γ : lo ≤ γ ≤ up, Σγ = 1}`. At a vertex every coordinate but
/// (at most) one sits on a bound, so enumerate the free coordinate and the
/// bound pattern of the others.
pub fn interval_vertices(lo: &[f64], up: &[f64]) -> Vec<Vec<f64>> {
    let m = lo.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for free in 0..m {
        for mask in 0u32..(1 << (m - 1)) {
            let mut g = vec![0.0; m];
            let mut bit = 0;
            let mut rest = 0.0;
            for t in (0..m).filter(|&t| t != free) {
                g[t] = if mask >> bit & 1 == 1 { up[t] } else { lo[t] };
                rest += g[t];
                bit += 1;
            }
            let f = 1.0 - rest;
            if f >= lo[free] - 1e-12 && f <= up[free] + 1e-12 {
                g[free] = f.clamp(lo[free], up[free]);
                out.push(g);
            }
        }
    }
    out
}

/// Exact LP optimum of `Σ values·γ` over the interval polytope, by vertex
/// enumeration.
pub fn lp_opt(values: &[f64], lo: &[f64], up: &[f64], minimize: bool) -> f64 {
    let objective = |g: &Vec<f64>| g.iter().zip(values).map(|(a, b)| a * b).sum::<f64>();
    let vals = interval_vertices(lo, up).iter().map(objective).collect::<Vec<_>>();
    assert!(!vals.is_empty(), "empty polytope");
    if minimize {
        vals.into_iter().fold(f64::INFINITY, f64::min)
    } else {
        vals.into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exact optimum of the multilinear objective `Σ_t V(t) ∏_i γ_i(t_i)` over
/// the product of marginal polytopes. Multilinear functions attain their
/// extremes at vertex combinations.
pub fn multilinear_opt(model: &OdImdp, v: &[f64], source: usize, action: usize, minimize: bool) -> f64 {
    let layout = model.layout();
    let verts: Vec<Vec<Vec<f64>>> = (0..model.num_axes())
        .map(|i| {
            let b = model.marginal(source, action, i);
            interval_vertices(b.lower, b.upper)
        })
        .collect();
    let mut pick = vec![0usize; verts.len()];
    let mut best = if minimize { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut coords = vec![0usize; verts.len()];
    loop {
        let mut total = 0.0;
        for (t, &vt) in v.iter().enumerate() {
            layout.coords_into(t, &mut coords);
            let p: f64 = coords.iter().enumerate().map(|(i, &c)| verts[i][pick[i]][c]).product();
            total += vt * p;
        }
        best = if minimize { best.min(total) } else { best.max(total) };
        // odometer over vertex picks
        let mut i = 0;
        loop {
            if i == pick.len() {
                return best;
            }
            pick[i] += 1;
            if pick[i] < verts[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Random non-empty interval ambiguity set of size `m` around a random
/// distribution. Some entries are made degenerate or unconstrained.
pub fn random_interval<R: Rng>(rng: &mut R, m: usize) -> IntervalAmbiguity {
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    let mode = rng.random_range(0..10);
    let (lo, up): (Vec<f64>, Vec<f64>) = p
        .iter()
        .map(|&pt| match mode {
            0 => (pt, pt),
            1 => (0.0, 1.0),
            _ => {
                let lo = pt * rng.random::<f64>();
                let up = (pt + (1.0 - pt) * 0.5 * rng.random::<f64>()).min(1.0);
                (lo, up)
            }
        })
        .unzip();
    IntervalAmbiguity::new(lo, up).expect("generator produces valid sets")
}

/// Random odIMDP with `n` axes of size `2..=max_size`; sink sources are point
/// masses, every other row is random.
pub fn random_odimdp<R: Rng>(rng: &mut R, n: usize, max_size: usize, actions: usize) -> OdImdp {
    let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(2..=max_size)).collect();
    let labels = (0..actions).map(|a| format!("a{a}")).collect();
    OdImdp::from_fn(sizes.clone(), labels, |s, _, axis| {
        if s.coords[axis] == SINK {
            IntervalAmbiguity::point_mass(sizes[axis], SINK)
        } else {
            random_interval(rng, sizes[axis])
        }
    })
    .expect("valid random model")
}

/// A feasible distribution drawn as a random convex combination of polytope
/// vertices.
pub fn sample_feasible<R: Rng>(rng: &mut R, lo: &[f64], up: &[f64]) -> Vec<f64> {
    let verts = interval_vertices(lo, up);
    let w: Vec<f64> = verts.iter().map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut g = vec![0.0; lo.len()];
    for (v, wi) in verts.iter().zip(&w) {
        for (gt, vt) in g.iter_mut().zip(v) {
            *gt += vt * wi / total;
        }
    }
    g
}

/// Standard normal density.
fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_a^b N(y | mean, variance) dy` by adaptive Simpson quadrature of the
/// density in standardized coordinates, clipped to ±40σ.
pub fn gaussian_mass(mean: f64, variance: f64, a: f64, b: f64) -> f64 {
    let sd = variance.sqrt();
    let za = ((a - mean) / sd).max(-40.0);
    let zb = ((b - mean) / sd).min(40.0);
    if zb <= za {
        return 0.0;
    }
    // split at 0 and ±1 so the peak is never skipped by a coarse first panel
    let mut knots = vec![za];
    for k in [-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0] {
        if k > za && k < zb {
            knots.push(k);
        }
    }
    knots.push(zb);
    let f = |z: f64| phi(z);
    knots
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_rec(&f, a, b, fa, fm, fb, whole, 1e-15, 40)
        })
        .sum()
}

/// Grid search of the interval mass over a moment box (`n` points per side,
/// endpoints included).
pub fn grid_extremes(mean: (f64, f64), var: (f64, f64), a: f64, b: f64, n: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mu = mean.0 + (mean.1 - mean.0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let v = var.0 + (var.1 - var.0) * j as f64 / (n - 1) as f64;
            let p = gaussian_mass(mu, v, a, b);
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    (lo, hi)
}

/// Worked two-axis instance (each axis: sink plus two cells). The horizontal
/// axis carries `[.6,.8]`, `[.2,.4]`; the vertical `[.4,.5]`, `[.5,.6]`.
/// Values over (h1v1, h1v2, h2v1, h2v2) are (1, 3, 4, 2); sink states are 0.
pub fn worked_fixture() -> (OdImdp, Vec<f64>, usize) {
    let model = OdImdp::from_fn(vec![3, 3], vec!["a".into()], |s, _, axis| {
        if s.coords[axis] == SINK {
            return IntervalAmbiguity::point_mass(3, SINK);
        }
        if axis == 0 {
            IntervalAmbiguity::new(vec![0.0, 0.6, 0.2], vec![0.0, 0.8, 0.4]).unwrap()
        } else {
            IntervalAmbiguity::new(vec![0.0, 0.4, 0.5], vec![0.0, 0.5, 0.6]).unwrap()
        }
    })
    .unwrap();
    let layout = model.layout();
    let mut v = vec![0.0; layout.num_states()];
    v[layout.index_of(&[1, 1])] = 1.0;
    v[layout.index_of(&[1, 2])] = 3.0;
    v[layout.index_of(&[2, 1])] = 4.0;
    v[layout.index_of(&[2, 2])] = 2.0;
    let source = layout.index_of(&[1, 1]);
    (model, v, source)
}

/// Does a rank-one factorization `p = h ⊗ v` exist with `h`, `v` in the given
/// 2-point interval polytopes? Both polytopes are segments, so scan them
/// finely and report the smallest max-abs residual.
pub fn best_factorization_residual(p: [[f64; 2]; 2], h: ([f64; 2], [f64; 2]), v: ([f64; 2], [f64; 2]), steps: usize) -> f64 {
    let seg = |lo: [f64; 2], up: [f64; 2]| {
        let a = lo[0].max(1.0 - up[1]);
        let b = up[0].min(1.0 - lo[1]);
        (a, b)
    };
    let (ha, hb) = seg(h.0, h.1);
    let (va, vb) = seg(v.0, v.1);
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let h0 = ha + (hb - ha) * i as f64 / steps as f64;
        for j in 0..=steps {
            let v0 = va + (vb - va) * j as f64 / steps as f64;
            let hv = [h0, 1.0 - h0];
            let vv = [v0, 1.0 - v0];
            let mut r: f64 = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    r = r.max((hv[a] * vv[b] - p[a][b]).abs());
                }
            }
            best = best.min(r);
        }
    }
    best
}
