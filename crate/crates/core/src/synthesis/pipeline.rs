//! Benchmark pipeline: abstract, label, synthesize, optionally compare with
//! the product-IMDP baseline.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::spec::label_states;
use super::{compare, synthesize, SynthesisOptions, SynthesisResult};
use crate::abstraction::{build_mixture, build_odimdp, RectPartition};
use crate::error::{Error, Result};
use crate::models::{
    imdp_footprint, odimdp_footprint, product_imdp, product_imdp_lumped, Footprint, Imdp, MixtureOdImdp, ModelRef, OdImdp,
};
use crate::systems::BenchmarkDef;

/// Default cap on the dense product-IMDP table (2 GiB).
pub const DEFAULT_IMDP_BUDGET: u128 = 2 << 30;

/// The abstraction of a benchmark: an odIMDP, or a mixture of them.
#[derive(Clone, Debug, PartialEq)]
pub enum Abstraction {
    OdImdp(OdImdp),
    Mixture(MixtureOdImdp),
}

impl Abstraction {
    pub fn build(def: &BenchmarkDef, part: &RectPartition) -> Result<Self> {
        if def.kernel.num_components() == 1 {
            build_odimdp(&def.kernel, part).map(Abstraction::OdImdp)
        } else {
            build_mixture(&def.kernel, part).map(Abstraction::Mixture)
        }
    }

    pub fn as_model(&self) -> ModelRef<'_> {
        match self {
            Abstraction::OdImdp(m) => m.into(),
            Abstraction::Mixture(m) => m.into(),
        }
    }

    /// Stored scalars, summed over mixture components (plus weight bounds).
    pub fn footprint(&self) -> Footprint {
        match self {
            Abstraction::OdImdp(m) => odimdp_footprint(m),
            Abstraction::Mixture(m) => {
                let mut total = m.components().iter().map(odimdp_footprint).fold(None, |acc: Option<Footprint>, f| {
                    Some(match acc {
                        None => f,
                        Some(a) => Footprint {
                            scalars: a.scalars + f.scalars,
                            bytes: a.bytes + f.bytes,
                            grid_scalars: a.grid_scalars + f.grid_scalars,
                            grid_bytes: a.grid_bytes + f.grid_bytes,
                            ..a
                        },
                    })
                });
                let f = total.as_mut().expect("a mixture has components");
                let w = m.raw_weights().len() as u128;
                f.scalars += w;
                f.bytes += 8 * w;
                *f
            }
        }
    }

    /// Product of the marginal bounds as a dense IMDP.
    pub fn product_imdp(&self, sinks: SinkTreatment, budget_bytes: u128) -> Result<Imdp> {
        match self {
            Abstraction::OdImdp(m) => match sinks {
                SinkTreatment::Product => product_imdp(m, budget_bytes),
                SinkTreatment::Lumped => product_imdp_lumped(m, budget_bytes),
            },
            Abstraction::Mixture(_) => Err(Error::Unsupported(
                "the product-IMDP baseline is only defined for single-Gaussian kernels".into(),
            )),
        }
    }
}

/// How the product-IMDP baseline treats the joint states with a sink
/// coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinkTreatment {
    /// Entrywise products for every joint state.
    Product,
    /// One exit state carrying the bounds of leaving the region.
    #[default]
    Lumped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub synthesis: SynthesisOptions,
    pub baseline: bool,
    pub baseline_sinks: SinkTreatment,
    pub imdp_budget: u128,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            synthesis: SynthesisOptions::default(),
            baseline: false,
            baseline_sinks: SinkTreatment::default(),
            imdp_budget: DEFAULT_IMDP_BUDGET,
        }
    }
}

pub struct BaselineRun {
    pub model: Imdp,
    pub footprint: Footprint,
    pub result: SynthesisResult,
    pub synthesis_secs: f64,
}

pub struct BenchmarkRun {
    pub partition: RectPartition,
    pub abstraction: Abstraction,
    pub footprint: Footprint,
    pub misaligned: bool,
    pub result: SynthesisResult,
    pub abstraction_secs: f64,
    pub synthesis_secs: f64,
    pub baseline: Option<BaselineRun>,
}

/// Runs the benchmark at its configured grid and horizon.
pub fn run_benchmark(def: &BenchmarkDef, options: &RunOptions) -> Result<BenchmarkRun> {
    let partition = def.partition()?;
    let t0 = Instant::now();
    let abstraction = Abstraction::build(def, &partition)?;
    let abstraction_secs = t0.elapsed().as_secs_f64();
    let labels = label_states(&partition, &def.spec)?;
    let t1 = Instant::now();
    let mut result = synthesize(
        abstraction.as_model(),
        &labels.labeling,
        def.spec.horizon,
        &options.synthesis,
    )?;
    let synthesis_secs = t1.elapsed().as_secs_f64();
    let baseline = if options.baseline {
        let model = abstraction.product_imdp(options.baseline_sinks, options.imdp_budget)?;
        let t2 = Instant::now();
        let base = synthesize((&model).into(), &labels.labeling, def.spec.horizon, &options.synthesis)?;
        let secs = t2.elapsed().as_secs_f64();
        result.metrics.delta = Some(compare(&result, &base)?);
        Some(BaselineRun {
            footprint: imdp_footprint(&model),
            model,
            result: base,
            synthesis_secs: secs,
        })
    } else {
        None
    };
    Ok(BenchmarkRun {
        footprint: abstraction.footprint(),
        partition,
        abstraction,
        misaligned: labels.misaligned,
        result,
        abstraction_secs,
        synthesis_secs,
        baseline,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub regions_per_axis: usize,
    pub horizon: usize,
    pub mean_eps: f64,
    /// 2.5% and 97.5% quantiles of the per-cell gap, with every transient
    /// cell weighted equally.
    pub ci_low: f64,
    pub ci_high: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    let next = sorted[(i + 1).min(sorted.len() - 1)];
    sorted[i] + frac * (next - sorted[i])
}

/// Mean error of the benchmark over a sweep of uniform grid resolutions.
pub fn convergence(
    def: &BenchmarkDef,
    regions_per_axis: &[usize],
    horizons: &[usize],
    options: &SynthesisOptions,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &k in regions_per_axis {
        let part = RectPartition::new(&def.region, &vec![k; def.region.len()])?;
        let abstraction = Abstraction::build(def, &part)?;
        let labels = label_states(&part, &def.spec)?;
        for &h in horizons {
            let r = synthesize(abstraction.as_model(), &labels.labeling, h, options)?;
            let mut gaps = r.gaps();
            gaps.sort_by(f64::total_cmp);
            rows.push(ConvergenceRow {
                regions_per_axis: k,
                horizon: h,
                mean_eps: r.metrics.eps,
                ci_low: quantile(&gaps, 0.025),
                ci_high: quantile(&gaps, 0.975),
            });
        }
    }
    Ok(rows)
}
