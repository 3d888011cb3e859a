//! Gaussian(-mixture) transition kernels with diagonal covariance.

use serde::{Deserialize, Serialize};

use super::moments::{AxisMoments, Interval, MomentBounds};
use crate::error::{Error, Result};

/// Mean of one mixture component as a function of state and input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MeanMap {
    /// `A x + B u + c`; `a` is `n×n`, `b` is `n×m`, both row-major.
    Affine {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        #[serde(default)]
        c: Vec<f64>,
    },
    /// Van der Pol oscillator, Euler-discretized with step `tau`:
    /// `x1 + tau x2`, `x2 + tau(-x1 + (1 - x1)² x2) + u`.
    VanDerPol { tau: f64 },
}

impl MeanMap {
    pub fn dim(&self) -> usize {
        match self {
            MeanMap::Affine { a, .. } => a.len(),
            MeanMap::VanDerPol { .. } => 2,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            MeanMap::Affine { b, .. } => b.first().map_or(0, Vec::len),
            MeanMap::VanDerPol { .. } => 1,
        }
    }

    fn check(&self) -> Result<()> {
        if let MeanMap::Affine { a, b, c } = self {
            let n = a.len();
            if n == 0 || a.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput("A must be a nonempty square matrix".into()));
            }
            if b.len() != n || b.iter().any(|r| r.len() != b[0].len()) {
                return Err(Error::InvalidInput(format!("B must have {n} rows of equal length")));
            }
            if !c.is_empty() && c.len() != n {
                return Err(Error::InvalidInput(format!("offset must have {n} entries")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        match self {
            MeanMap::Affine { a, b, c } => (0..a.len())
                .map(|i| {
                    let ax: f64 = a[i].iter().zip(x).map(|(p, q)| p * q).sum();
                    let bu: f64 = b[i].iter().zip(u).map(|(p, q)| p * q).sum();
                    ax + bu + c.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
            MeanMap::VanDerPol { tau } => {
                let (x1, x2) = (x[0], x[1]);
                let w = 1.0 - x1;
                vec![x1 + tau * x2, x2 + tau * (-x1 + w * w * x2) + u[0]]
            }
        }
    }

    /// Interval enclosure of each mean coordinate over the box `cell`.
    pub fn enclose(&self, cell: &[(f64, f64)], u: &[f64]) -> Vec<Interval> {
        match self {
            MeanMap::Affine { a, b, c } => (0..a.len())
                .map(|i| {
                    // each term is monotone in its coordinate, so this is the
                    // exact range over the box
                    let (mut lo, mut hi) = (0.0, 0.0);
                    for (&aij, &(l, h)) in a[i].iter().zip(cell) {
                        let (p, q) = (aij * l, aij * h);
                        lo += p.min(q);
                        hi += p.max(q);
                    }
                    let k: f64 = b[i].iter().zip(u).map(|(p, q)| p * q).sum::<f64>()
                        + c.get(i).copied().unwrap_or(0.0);
                    Interval::new(lo + k, hi + k)
                })
                .collect(),
            MeanMap::VanDerPol { tau } => {
                let x1 = Interval::new(cell[0].0, cell[0].1);
                let x2 = Interval::new(cell[1].0, cell[1].1);
                let m1 = x1.add(x2.scale(*tau));
                // x2 (1 + tau (1 - x1)²) - tau x1 + u
                let gain = x1.scale(-1.0).shift(1.0).square().scale(*tau).shift(1.0);
                let m2 = x2.mul(gain).add(x1.scale(-tau)).shift(u[0]);
                vec![m1, m2]
            }
        }
    }
}

/// Mixture weight of one component as a function of the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WeightMap {
    Constant { value: f64 },
    /// `clamp(x[axis], 0, 1)`, or one minus that when `complement` is set.
    ClampedAxis {
        axis: usize,
        #[serde(default)]
        complement: bool,
    },
}

impl WeightMap {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            WeightMap::Constant { value } => value,
            WeightMap::ClampedAxis { axis, complement } => {
                let w = x[axis].clamp(0.0, 1.0);
                if complement {
                    1.0 - w
                } else {
                    w
                }
            }
        }
    }

    pub fn enclose(&self, cell: &[(f64, f64)]) -> Interval {
        match *self {
            WeightMap::Constant { value } => Interval::point(value),
            WeightMap::ClampedAxis { axis, complement } => {
                let w = Interval::new(cell[axis].0, cell[axis].1).clamp(0.0, 1.0);
                if complement {
                    Interval::new(1.0 - w.hi, 1.0 - w.lo)
                } else {
                    w
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: MeanMap,
    /// Diagonal of the (state-independent) covariance.
    pub variance: Vec<f64>,
    pub weight: WeightMap,
}

/// Transition kernel `Σ_r α_r(x) N(μ^r(x, u), diag(σ^r))` with a finite input set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianKernelSpec {
    pub components: Vec<GaussianComponent>,
    pub inputs: Vec<Vec<f64>>,
    #[serde(default)]
    pub input_labels: Vec<String>,
}

impl GaussianKernelSpec {
    pub fn new(components: Vec<GaussianComponent>, inputs: Vec<Vec<f64>>) -> Result<Self> {
        let spec = Self {
            components,
            inputs,
            input_labels: Vec::new(),
        };
        spec.check()?;
        Ok(spec)
    }

    /// Single-component kernel with constant weight one.
    pub fn gaussian(mean: MeanMap, variance: Vec<f64>, inputs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            vec![GaussianComponent {
                mean,
                variance,
                weight: WeightMap::Constant { value: 1.0 },
            }],
            inputs,
        )
    }

    pub fn check(&self) -> Result<()> {
        let first = self
            .components
            .first()
            .ok_or_else(|| Error::InvalidInput("kernel needs at least one component".into()))?;
        let n = first.mean.dim();
        let m = first.mean.input_dim();
        if self.inputs.is_empty() {
            return Err(Error::InvalidInput("kernel needs at least one input".into()));
        }
        for (r, c) in self.components.iter().enumerate() {
            c.mean.check()?;
            if c.mean.dim() != n || c.mean.input_dim() != m {
                return Err(Error::InvalidInput(format!("component {r} has mismatched dimensions")));
            }
            if c.variance.len() != n || c.variance.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidInput(format!(
                    "component {r} needs {n} strictly positive variances"
                )));
            }
            if let WeightMap::ClampedAxis { axis, .. } = c.weight {
                if axis >= n {
                    return Err(Error::InvalidInput(format!("weight axis {axis} out of range")));
                }
            }
        }
        if let Some(u) = self.inputs.iter().find(|u| u.len() != m) {
            return Err(Error::InvalidInput(format!(
                "input {u:?} has {} entries, expected {m}",
                u.len()
            )));
        }
        if !self.input_labels.is_empty() && self.input_labels.len() != self.inputs.len() {
            return Err(Error::InvalidInput("one label per input expected".into()));
        }
        let constant: Option<f64> = self
            .components
            .iter()
            .map(|c| match c.weight {
                WeightMap::Constant { value } => Some(value),
                _ => None,
            })
            .sum();
        if let Some(total) = constant {
            if (total - 1.0).abs() > 1e-9
                || self
                    .components
                    .iter()
                    .any(|c| matches!(c.weight, WeightMap::Constant { value } if value < 0.0)) {
                return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components[0].mean.dim()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn labels(&self) -> Vec<String> {
        if self.input_labels.is_empty() {
            self.inputs.iter().map(|u| format!("{u:?}")).collect()
        } else {
            self.input_labels.clone()
        }
    }
}

/// Sound per-axis mean and variance enclosures of component `r` over `cell`
/// under input `u`.
pub fn bound_moments(
    kernel: &GaussianKernelSpec,
    r: usize,
    cell: &[(f64, f64)],
    u: &[f64],
) -> Result<MomentBounds> {
    let c = kernel
        .components
        .get(r)
        .ok_or_else(|| Error::InvalidInput(format!("no component {r}")))?;
    if cell.len() != c.mean.dim() {
        return Err(Error::Shape(format!(
            "cell has {} axes, kernel has {}",
            cell.len(),
            c.mean.dim()
        )));
    }
    let axes = c
        .mean
        .enclose(cell, u)
        .into_iter()
        .zip(&c.variance)
        .map(|(m, &v)| AxisMoments {
            mean: (m.lo, m.hi),
            variance: (v, v),
        })
        .collect();
    Ok(MomentBounds { axes })
}
