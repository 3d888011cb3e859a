//! The subcommands. Each writes deterministic files under the output
//! directory and returns a JSON summary (including wall times, which are
//! only printed, never written).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use odimdp::abstraction::RectPartition;
use odimdp::bellman::{IterationOptions, StateLabel};
use odimdp::models::{
    dense_imdp_bytes, human_bytes, imdp_footprint, odimdp_scalar_formula, Footprint, ModelRef,
};
use odimdp::synthesis::{
    compare, convergence, label_states, monte_carlo_validate, sample_initial_states, synthesize,
    Abstraction, ConcretePolicy, RunOptions, SynthesisOptions, SynthesisResult,
};
use odimdp::systems::BenchmarkDef;
use odimdp::Error;

use crate::config::{Baseline, JobConfig};
use crate::format::{self, ModelFile};
use crate::CliError;

pub const MODEL_FILE: &str = "model.odimdp";
pub const BASELINE_FILE: &str = "baseline.imdp";

fn synthesis_options(cfg: &JobConfig) -> SynthesisOptions {
    SynthesisOptions {
        iteration: IterationOptions {
            order: cfg.engine.order.into(),
            ..IterationOptions::default()
        },
        safety_via_dual: !cfg.engine.direct_safety,
    }
}

fn run_options(cfg: &JobConfig) -> Result<RunOptions, CliError> {
    Ok(RunOptions {
        synthesis: synthesis_options(cfg),
        baseline: cfg.engine.baseline == Baseline::Imdp,
        baseline_sinks: cfg.engine.baseline_sinks,
        imdp_budget: cfg.mem_budget()?,
    })
}

fn out_dir(cfg: &JobConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Fails early when the dense baseline cannot fit, before the odIMDP is built.
fn check_baseline_capacity(def: &BenchmarkDef, part: &RectPartition, budget: u128) -> Result<(), CliError> {
    let states = part.layout().num_states();
    let needed = dense_imdp_bytes(states, def.kernel.num_inputs());
    if needed > budget {
        let grid = dense_imdp_bytes(part.num_cells(), def.kernel.num_inputs());
        return Err(Error::Capacity {
            what: format!(
                "dense product IMDP over {states} states x {} actions ({}; grid-only estimate without sinks: {})",
                def.kernel.num_inputs(),
                human_bytes(needed),
                human_bytes(grid)
            ),
            needed_bytes: needed,
            budget_bytes: budget,
        }
        .into());
    }
    Ok(())
}

fn footprint_json(f: &Footprint, n: usize) -> Value {
    json!({
        "states": f.states.to_string(),
        "grid_states": f.grid_states.to_string(),
        "actions": f.actions.to_string(),
        "scalars": f.scalars.to_string(),
        "bytes": f.bytes.to_string(),
        "grid_scalars": f.grid_scalars.to_string(),
        "grid_bytes": f.grid_bytes.to_string(),
        "grid_formula_scalars": odimdp_scalar_formula(f.grid_states, f.actions, n as u32).map(|v| v.to_string()),
        "human": human_bytes(f.bytes),
    })
}

/// Builds the abstraction, writes the model file (and the dense baseline
/// when requested) and a statistics file.
pub fn cmd_abstract(cfg: &JobConfig) -> Result<Value, CliError> {
    let def = cfg.resolve()?;
    let part = def.partition()?;
    let opts = run_options(cfg)?;
    if opts.baseline {
        check_baseline_capacity(&def, &part, opts.imdp_budget)?;
    }
    let dir = out_dir(cfg)?;
    let t0 = Instant::now();
    let abstraction = Abstraction::build(&def, &part)?;
    let abstraction_secs = t0.elapsed().as_secs_f64();
    let file = match &abstraction {
        Abstraction::OdImdp(m) => ModelFile::OdImdp(m.clone()),
        Abstraction::Mixture(m) => ModelFile::Mixture(m.clone()),
    };
    format::save(&dir.join(MODEL_FILE), &file)?;
    let mut stats = json!({
        "benchmark": def.name,
        "grid": def.counts,
        "actions": def.kernel.num_inputs(),
        "components": def.kernel.num_components(),
        "footprint": footprint_json(&abstraction.footprint(), def.region.len()),
    });
    if opts.baseline {
        let imdp = abstraction.product_imdp(opts.baseline_sinks, opts.imdp_budget)?;
        stats["baseline_footprint"] = footprint_json(&imdp_footprint(&imdp), def.region.len());
        format::save(&dir.join(BASELINE_FILE), &ModelFile::Imdp(imdp))?;
    }
    write_json(&dir.join("abstract.json"), &stats)?;
    stats["abstraction_secs"] = json!(abstraction_secs);
    Ok(stats)
}

fn write_values(path: &Path, part: &RectPartition, r: &SynthesisResult) -> Result<(), CliError> {
    let layout = part.layout();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "state")?;
    for i in 0..part.dim() {
        write!(w, ",axis{i}")?;
    }
    writeln!(w, ",label,v_lower,v_upper")?;
    let mut coords = vec![0; part.dim()];
    for s in 0..layout.num_states() {
        layout.coords_into(s, &mut coords);
        write!(w, "{s}")?;
        for c in &coords {
            write!(w, ",{c}")?;
        }
        let label = match r.labels[s] {
            StateLabel::Reach => "reach",
            StateLabel::Avoid => "avoid",
            StateLabel::Transient => "transient",
        };
        writeln!(w, ",{label},{},{}", r.v_lower[s], r.v_upper[s])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (elapsed time, transient state): the action to apply.
fn write_policy(path: &Path, r: &SynthesisResult, labels: &[String]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "time,state,action,label")?;
    for t in 0..r.horizon {
        let step = r.policy.step(r.horizon - t);
        for s in r.transient() {
            let a = step[s] as usize;
            writeln!(w, "{t},{s},{a},\"{}\"", labels[a])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn metrics_json(def: &BenchmarkDef, cfg: &JobConfig, r: &SynthesisResult, misaligned: bool) -> Value {
    json!({
        "benchmark": def.name,
        "grid": def.counts,
        "horizon": r.horizon,
        "order": cfg.engine.order,
        "metrics": r.metrics,
        "upper_bound_flagged": misaligned,
    })
}

/// Synthesizes a policy on a freshly built abstraction or on a model file.
pub fn cmd_synthesize(cfg: &JobConfig, model_path: Option<&Path>) -> Result<Value, CliError> {
    let def = cfg.resolve()?;
    let part = def.partition()?;
    let labels = label_states(&part, &def.spec)?;
    let dir = out_dir(cfg)?;
    let t0 = Instant::now();
    let loaded;
    let built;
    let model: ModelRef<'_> = match model_path {
        Some(p) => {
            loaded = format::load(p)?;
            match &loaded {
                ModelFile::OdImdp(m) => m.into(),
                ModelFile::Imdp(m) => m.into(),
                ModelFile::Mixture(m) => m.into(),
            }
        }
        None => {
            built = Abstraction::build(&def, &part)?;
            built.as_model()
        }
    };
    if model.num_states() != labels.labeling.len() {
        return Err(CliError::Config(format!(
            "model has {} states but the grid {:?} has {}",
            model.num_states(),
            def.counts,
            labels.labeling.len()
        )));
    }
    let load_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let r = synthesize(model, &labels.labeling, def.spec.horizon, &synthesis_options(cfg))?;
    let synthesis_secs = t1.elapsed().as_secs_f64();
    write_values(&dir.join("values.csv"), &part, &r)?;
    write_policy(&dir.join("policy.csv"), &r, &def.kernel.labels())?;
    let mut report = metrics_json(&def, cfg, &r, labels.misaligned);
    write_json(&dir.join("metrics.json"), &report)?;
    report["abstraction_secs"] = json!(load_secs);
    report["synthesis_secs"] = json!(synthesis_secs);
    Ok(report)
}

/// Runs the odIMDP and the product-IMDP baseline on one grid.
pub fn cmd_compare(cfg: &JobConfig) -> Result<Value, CliError> {
    let def = cfg.resolve()?;
    let part = def.partition()?;
    let mut opts = run_options(cfg)?;
    opts.baseline = true;
    check_baseline_capacity(&def, &part, opts.imdp_budget)?;
    let dir = out_dir(cfg)?;
    let run = odimdp::synthesis::run_benchmark(&def, &opts)?;
    let base = run.baseline.as_ref().expect("baseline requested");
    let delta = compare(&run.result, &base.result)?;
    let layout = part.layout();
    let mut w = BufWriter::new(File::create(dir.join("delta.csv"))?);
    writeln!(w, "state,v_odimdp,v_imdp,delta")?;
    for s in run.result.transient() {
        let (a, b) = (run.result.v_lower[s], base.result.v_lower[s]);
        writeln!(w, "{s},{a},{b},{}", a - b)?;
    }
    w.flush()?;
    let mut report = json!({
        "benchmark": def.name,
        "grid": def.counts,
        "states": layout.num_states(),
        "odimdp": run.result.metrics,
        "imdp": base.result.metrics,
        "delta": delta,
        "odimdp_footprint": footprint_json(&run.footprint, part.dim()),
        "imdp_footprint": footprint_json(&base.footprint, part.dim()),
    });
    write_json(&dir.join("compare.json"), &report)?;
    report["abstraction_secs"] = json!(run.abstraction_secs);
    report["synthesis_secs"] = json!(run.synthesis_secs);
    report["baseline_synthesis_secs"] = json!(base.synthesis_secs);
    Ok(report)
}

#[derive(Serialize)]
struct SimRow {
    x0: Vec<f64>,
    state: usize,
    v_lower: f64,
    v_upper: f64,
    estimate: f64,
    ci_low: f64,
    ci_high: f64,
    pass: bool,
}

/// Monte Carlo check that the true satisfaction probability of each
/// configured initial state lies in its synthesized bounds.
pub fn cmd_simulate(cfg: &JobConfig) -> Result<Value, CliError> {
    let def = cfg.resolve()?;
    let part = def.partition()?;
    let labels = label_states(&part, &def.spec)?;
    let abstraction = Abstraction::build(&def, &part)?;
    let r = synthesize(abstraction.as_model(), &labels.labeling, def.spec.horizon, &synthesis_options(cfg))?;
    let policy = ConcretePolicy::new(&r, &part)?;
    let dir = out_dir(cfg)?;
    let seed = cfg.seed();
    let mut x0s = cfg.simulate.initial_states.clone();
    x0s.extend(sample_initial_states(&part, &r.labels, cfg.simulate.random_initial, seed));
    let mut rows = Vec::with_capacity(x0s.len());
    for (i, x0) in x0s.into_iter().enumerate() {
        let state = policy.state_of(&x0)?;
        let est = monte_carlo_validate(&def.kernel, &def.spec, &policy, &x0, cfg.simulate.trials, seed.wrapping_add(i as u64))?;
        let (lo, hi) = (r.v_lower[state], r.v_upper[state]);
        rows.push(SimRow {
            pass: est.overlaps(lo, hi, 1e-9),
            x0,
            state,
            v_lower: lo,
            v_upper: hi,
            estimate: est.estimate,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
        });
    }
    let mut w = BufWriter::new(File::create(dir.join("simulate.csv"))?);
    writeln!(w, "x0,state,v_lower,v_upper,estimate,ci_low,ci_high,pass")?;
    for row in &rows {
        let x0: Vec<String> = row.x0.iter().map(f64::to_string).collect();
        writeln!(
            w,
            "\"{}\",{},{},{},{},{},{},{}",
            x0.join(" "),
            row.state,
            row.v_lower,
            row.v_upper,
            row.estimate,
            row.ci_low,
            row.ci_high,
            row.pass
        )?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let report = json!({
        "benchmark": def.name,
        "trials": cfg.simulate.trials,
        "seed": seed,
        "confidence": 0.99,
        "upper_bound_flagged": labels.misaligned,
        "failed": failed,
        "results": rows,
    });
    write_json(&dir.join("simulate.json"), &report)?;
    if failed > 0 {
        return Err(CliError::Verdict(failed));
    }
    Ok(report)
}

/// Mean error over a sweep of grid resolutions, as CSV.
pub fn cmd_convergence(cfg: &JobConfig) -> Result<Value, CliError> {
    let def = cfg.resolve()?;
    let regions = if cfg.convergence.regions_per_axis.is_empty() {
        vec![def.counts[0]]
    } else {
        cfg.convergence.regions_per_axis.clone()
    };
    let horizons = if cfg.convergence.horizons.is_empty() {
        vec![def.spec.horizon]
    } else {
        cfg.convergence.horizons.clone()
    };
    let dir = out_dir(cfg)?;
    let rows = convergence(&def, &regions, &horizons, &synthesis_options(cfg))?;
    let mut w = BufWriter::new(File::create(dir.join("convergence.csv"))?);
    writeln!(w, "regions_per_axis,horizon,mean_eps,ci_low,ci_high")?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{}", r.regions_per_axis, r.horizon, r.mean_eps, r.ci_low, r.ci_high)?;
    }
    w.flush()?;
    Ok(json!({ "benchmark": def.name, "rows": rows }))
}
