//! Batched Bellman sweeps over all source-action pairs of a model.
//!
//! For odIMDPs the recursive bound of a source-action pair at level `l`
//! depends only on the marginals of the axes eliminated at levels `l..n`
//! and on the outer prefix. Pairs whose suffix marginals coincide bit for
//! bit therefore share every inner subproblem. The planned sweep interns
//! those suffixes once per model and evaluates each shared subproblem once
//! per step, visiting prefixes in the same order and calling the same
//! O-maximization routine as the depth-first evaluator, so both produce
//! identical bits.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bellman::omax::{assign_mass, constant_value, solve_values, sort_order, Adversary};
use crate::bellman::recursive::{tighter, EliminationOrder, RecursiveEvaluator};
use crate::error::{Error, Result};
use crate::models::{Imdp, MixtureOdImdp, ModelRef, OdImdp};

/// Scratch memory allowed for shared-subproblem tables before falling back
/// to per-pair depth-first evaluation.
pub const DEFAULT_TABLE_BUDGET: u128 = 1 << 30;

const NO_CHILD: u32 = u32::MAX;

struct Group {
    child: u32,
    members: Vec<u32>,
}

struct PlanLevel {
    axis: usize,
    size: usize,
    prefix_count: usize,
    /// Representative `(source, action)` holding each entry's marginal.
    reps: Vec<(u32, u32)>,
    groups: Vec<Group>,
}

struct ProductPlan {
    levels: Vec<PlanLevel>,
    row_entry: Vec<u32>,
    inner_base: Vec<usize>,
    inner_stride: usize,
}

impl ProductPlan {
    fn build(model: &OdImdp, perm: &[usize], active: &[bool], budget: u128) -> Option<Self> {
        let n = perm.len();
        let layout = model.layout();
        let num_actions = model.num_actions();
        let sizes: Vec<usize> = perm.iter().map(|&ax| layout.axis_size(ax)).collect();

        let mut interners: Vec<HashMap<Vec<u64>, u32>> = vec![HashMap::new(); n];
        let mut marginal_reps: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut level_maps: Vec<HashMap<(u32, u32), u32>> = vec![HashMap::new(); n];
        let mut level_entries: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut row_entry = vec![NO_CHILD; active.len() * num_actions];
        let mut key = Vec::new();

        for (s, _) in active.iter().enumerate().filter(|(_, &on)| on) {
            for a in 0..num_actions {
                let mut child = NO_CHILD;
                for l in (0..n).rev() {
                    let b = model.marginal(s, a, perm[l]);
                    key.clear();
                    key.extend(b.lower.iter().chain(b.upper).map(|x| x.to_bits()));
                    let mid = match interners[l].get(key.as_slice()) {
                        Some(&id) => id,
                        None => {
                            let id = marginal_reps[l].len() as u32;
                            marginal_reps[l].push((s as u32, a as u32));
                            interners[l].insert(key.clone(), id);
                            id
                        }
                    };
                    let next = level_entries[l].len() as u32;
                    let entry = *level_maps[l].entry((mid, child)).or_insert(next);
                    if entry == next {
                        level_entries[l].push((mid, child));
                    }
                    child = entry;
                }
                row_entry[s * num_actions + a] = child;
            }
        }

        let mut prefix = 1usize;
        let mut cells: u128 = 0;
        let mut levels = Vec::with_capacity(n);
        for l in 0..n {
            let entries = &level_entries[l];
            cells += prefix as u128 * entries.len() as u128;
            let reps = entries
                .iter()
                .map(|&(mid, _)| marginal_reps[l][mid as usize])
                .collect();
            let mut by_child: Vec<(u32, u32)> = entries
                .iter()
                .enumerate()
                .map(|(e, &(_, child))| (child, e as u32))
                .collect();
            by_child.sort_unstable();
            let mut groups: Vec<Group> = Vec::new();
            for (child, e) in by_child {
                match groups.last_mut() {
                    Some(g) if g.child == child => g.members.push(e),
                    _ => groups.push(Group {
                        child,
                        members: vec![e],
                    }),
                }
            }
            levels.push(PlanLevel {
                axis: perm[l],
                size: sizes[l],
                prefix_count: prefix,
                reps,
                groups,
            });
            prefix *= sizes[l];
        }
        if cells * 8 > budget {
            return None;
        }

        // joint offsets of every prefix over the outer n-1 axes
        let mut inner_base = vec![0usize];
        for &ax in &perm[..n - 1] {
            let stride = layout.strides()[ax];
            inner_base = inner_base
                .iter()
                .flat_map(|&b| (0..layout.axis_size(ax)).map(move |t| b + t * stride))
                .collect();
        }
        Some(Self {
            levels,
            row_entry,
            inner_base,
            inner_stride: layout.strides()[perm[n - 1]],
        })
    }

    fn sweep(&self, model: &OdImdp, v_prev: &[f64], adversary: Adversary) -> Vec<f64> {
        let n = self.levels.len();
        let mut child_table: Vec<f64> = Vec::new();
        for l in (0..n).rev() {
            let level = &self.levels[l];
            let width = level.reps.len();
            let mut table = vec![0.0; level.prefix_count * width];
            if width == 0 {
                child_table = table;
                continue;
            }
            let child_width = if l + 1 < n { self.levels[l + 1].reps.len() } else { 0 };
            let child_ref = &child_table;
            table
                .par_chunks_mut(width)
                .enumerate()
                .for_each_init(
                    || (vec![0.0; level.size], Vec::with_capacity(level.size)),
                    |(values, order), (p, out)| {
                        for group in &level.groups {
                            if l + 1 == n {
                                let base = self.inner_base[p];
                                for (t, v) in values.iter_mut().enumerate() {
                                    *v = v_prev[base + t * self.inner_stride];
                                }
                            } else {
                                let c = group.child as usize;
                                for (t, v) in values.iter_mut().enumerate() {
                                    *v = child_ref[(p * level.size + t) * child_width + c];
                                }
                            }
                            if let Some(c) = constant_value(values) {
                                for &e in &group.members {
                                    out[e as usize] = c;
                                }
                                continue;
                            }
                            sort_order(values, adversary, order);
                            for &e in &group.members {
                                let (s, a) = level.reps[e as usize];
                                let b = model.marginal(s as usize, a as usize, level.axis);
                                out[e as usize] = assign_mass(values, b, order, None);
                            }
                        }
                    },
                );
            child_table = table;
        }
        self.row_entry
            .par_iter()
            .map(|&e| {
                if e == NO_CHILD {
                    f64::NAN
                } else {
                    child_table[e as usize]
                }
            })
            .collect()
    }
}

enum Pass {
    Planned(ProductPlan),
    Direct(Vec<usize>),
}

struct OdSweep<'m> {
    model: &'m OdImdp,
    passes: Vec<Pass>,
}

impl<'m> OdSweep<'m> {
    fn new(model: &'m OdImdp, active: &[bool], order: EliminationOrder, budget: u128) -> Self {
        let passes = order
            .permutations(model.num_axes())
            .into_iter()
            .map(|perm| match ProductPlan::build(model, &perm, active, budget) {
                Some(plan) => Pass::Planned(plan),
                None => {
                    log::info!("shared-subproblem tables exceed budget; using depth-first sweep");
                    Pass::Direct(perm)
                }
            })
            .collect();
        Self { model, passes }
    }

    fn sweep(&self, v_prev: &[f64], active: &[bool], adversary: Adversary) -> Vec<f64> {
        let mut combined: Option<Vec<f64>> = None;
        for pass in &self.passes {
            let values = match pass {
                Pass::Planned(plan) => plan.sweep(self.model, v_prev, adversary),
                Pass::Direct(perm) => self.direct(perm, v_prev, active, adversary),
            };
            combined = Some(match combined {
                None => values,
                Some(prev) => prev
                    .iter()
                    .zip(&values)
                    .map(|(&x, &y)| tighter(x, y, adversary))
                    .collect(),
            });
        }
        combined.unwrap_or_default()
    }

    fn direct(&self, perm: &[usize], v_prev: &[f64], active: &[bool], adversary: Adversary) -> Vec<f64> {
        let num_actions = self.model.num_actions();
        let mut out = vec![f64::NAN; active.len() * num_actions];
        out.par_chunks_mut(num_actions)
            .enumerate()
            .for_each_init(
                || RecursiveEvaluator::new(self.model, perm.to_vec()),
                |eval, (s, row)| {
                    if !active[s] {
                        return;
                    }
                    for (a, slot) in row.iter_mut().enumerate() {
                        *slot = eval.evaluate(v_prev, s, a, adversary).value;
                    }
                },
            );
        out
    }
}

enum Kind<'m> {
    Od(OdSweep<'m>),
    Imdp(&'m Imdp),
    Mixture {
        model: &'m MixtureOdImdp,
        parts: Vec<OdSweep<'m>>,
    },
}

/// Prepared Bellman sweep: evaluates the robust expectation of every action
/// at every active source in one call per step.
pub struct Sweeper<'m> {
    kind: Kind<'m>,
    active: Vec<bool>,
    num_actions: usize,
}

impl<'m> Sweeper<'m> {
    pub fn new(
        model: ModelRef<'m>,
        active: Vec<bool>,
        order: EliminationOrder,
        table_budget: u128,
    ) -> Result<Self> {
        if active.len() != model.num_states() {
            return Err(Error::Shape(format!(
                "active mask has {} entries, model has {} states",
                active.len(),
                model.num_states()
            )));
        }
        let kind = match model {
            ModelRef::OdImdp(m) => Kind::Od(OdSweep::new(m, &active, order, table_budget)),
            ModelRef::Imdp(m) => Kind::Imdp(m),
            ModelRef::Mixture(m) => Kind::Mixture {
                model: m,
                parts: m
                    .components()
                    .iter()
                    .map(|c| OdSweep::new(c, &active, order, table_budget))
                    .collect(),
            },
        };
        Ok(Self {
            kind,
            active,
            num_actions: model.num_actions(),
        })
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Row-major `[source][action]` robust expectations of `v_prev`; rows
    /// of inactive sources are NaN.
    pub fn sweep(&self, v_prev: &[f64], adversary: Adversary) -> Vec<f64> {
        match &self.kind {
            Kind::Od(od) => od.sweep(v_prev, &self.active, adversary),
            Kind::Imdp(m) => imdp_sweep(m, v_prev, &self.active, adversary),
            Kind::Mixture { model, parts } => {
                let per_component: Vec<Vec<f64>> = parts
                    .iter()
                    .map(|p| p.sweep(v_prev, &self.active, adversary))
                    .collect();
                let num_actions = self.num_actions;
                let k = per_component.len();
                (0..self.active.len() * num_actions)
                    .into_par_iter()
                    .map_init(
                        || (vec![0.0; k], Vec::with_capacity(k)),
                        |(values, order), row| {
                            if !self.active[row / num_actions] {
                                return f64::NAN;
                            }
                            for (v, comp) in values.iter_mut().zip(&per_component) {
                                *v = comp[row];
                            }
                            let b = model.weight_bounds(row / num_actions, row % num_actions);
                            solve_values(values, b, adversary, order)
                        },
                    )
                    .collect()
            }
        }
    }
}

fn imdp_sweep(model: &Imdp, v_prev: &[f64], active: &[bool], adversary: Adversary) -> Vec<f64> {
    let num_actions = model.num_actions();
    let constant = constant_value(v_prev);
    let mut order = Vec::new();
    if constant.is_none() {
        sort_order(v_prev, adversary, &mut order);
    }
    let mut out = vec![f64::NAN; active.len() * num_actions];
    out.par_chunks_mut(num_actions)
        .enumerate()
        .for_each(|(s, row)| {
            if !active[s] {
                return;
            }
            for (a, slot) in row.iter_mut().enumerate() {
                *slot = match constant {
                    Some(c) => c,
                    None => assign_mass(v_prev, model.bounds(s, a), &order, None),
                };
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::recursive::recursive_bellman;
    use crate::models::{IntervalAmbiguity, SINK};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_marginal(rng: &mut ChaCha8Rng, m: usize) -> IntervalAmbiguity {
        loop {
            let lower: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 0.3).collect();
            let upper: Vec<f64> = lower.iter().map(|l| l + rng.random::<f64>() * 0.7).collect();
            if let Ok(amb) = IntervalAmbiguity::new(lower, upper.iter().map(|u| u.min(1.0)).collect()) {
                return amb;
            }
        }
    }

    fn random_model(seed: u64, sizes: Vec<usize>, actions: usize) -> OdImdp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // only a few distinct marginals per axis so that sharing kicks in
        let pools: Vec<Vec<IntervalAmbiguity>> = sizes
            .iter()
            .map(|&m| (0..3).map(|_| random_marginal(&mut rng, m)).collect())
            .collect();
        let labels = (0..actions).map(|a| a.to_string()).collect();
        OdImdp::from_fn(sizes.clone(), labels, |s, _, axis| {
            if s.coords[axis] == SINK {
                IntervalAmbiguity::point_mass(sizes[axis], SINK)
            } else {
                pools[axis][rng.random_range(0..3)].clone()
            }
        })
        .unwrap()
    }

    #[test]
    fn planned_sweep_matches_depth_first_bitwise() {
        for (seed, sizes) in [(1, vec![3, 4]), (2, vec![3, 3, 3]), (3, vec![4, 2, 3])] {
            let model = random_model(seed, sizes, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let v: Vec<f64> = (0..model.num_states()).map(|_| rng.random()).collect();
            let active: Vec<bool> = (0..model.num_states()).map(|s| !model.layout().has_sink(s)).collect();
            for order in [EliminationOrder::Forward, EliminationOrder::Reverse, EliminationOrder::Best] {
                for adv in [Adversary::Pessimistic, Adversary::Optimistic] {
                    let planned = Sweeper::new((&model).into(), active.clone(), order, u128::MAX).unwrap();
                    let direct = Sweeper::new((&model).into(), active.clone(), order, 0).unwrap();
                    let a = planned.sweep(&v, adv);
                    let b = direct.sweep(&v, adv);
                    for s in 0..model.num_states() {
                        for act in 0..2 {
                            let row = s * 2 + act;
                            if !active[s] {
                                assert!(a[row].is_nan() && b[row].is_nan());
                                continue;
                            }
                            let r = recursive_bellman(&model, &v, &model.layout().joint(s), act, adv, order).unwrap();
                            assert_eq!(a[row].to_bits(), b[row].to_bits());
                            assert_eq!(a[row].to_bits(), r.to_bits());
                        }
                    }
                }
            }
        }
    }
}
