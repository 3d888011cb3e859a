//! Reach-avoid specifications over the concrete state space and their
//! labeling of grid cells.

use serde::{Deserialize, Serialize};

use crate::abstraction::RectPartition;
use crate::bellman::{Labeling, PropertyKind, StateLabel};
use crate::error::{Error, Result};

/// Closed axis-aligned box, one `(lo, hi)` per axis.
pub type Rect = Vec<(f64, f64)>;

pub fn rect_contains(rect: &[(f64, f64)], x: &[f64]) -> bool {
    rect.len() == x.len() && rect.iter().zip(x).all(|(&(l, h), &v)| l <= v && v <= h)
}

/// `inner ⊆ outer` for closed boxes.
pub fn rect_subset(inner: &[(f64, f64)], outer: &[(f64, f64)]) -> bool {
    inner.iter().zip(outer).all(|(&(a, b), &(l, h))| l <= a && b <= h)
}

/// Open-interior intersection: touching boundaries do not count.
pub fn interiors_overlap(p: &[(f64, f64)], q: &[(f64, f64)]) -> bool {
    p.iter().zip(q).all(|(&(a, b), &(l, h))| a.max(l) < b.min(h))
}

/// Reach set `R` and avoid set `O` (unions of boxes) with a horizon.
/// `Safety` specs have no reach set and are satisfied by staying in the
/// region of interest (and out of `O`) for the whole horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachAvoidSpec {
    #[serde(default)]
    pub reach: Vec<Rect>,
    #[serde(default)]
    pub avoid: Vec<Rect>,
    pub horizon: usize,
    #[serde(default)]
    pub kind: PropertyKind,
}

impl ReachAvoidSpec {
    pub fn reach_avoid(reach: Vec<Rect>, avoid: Vec<Rect>, horizon: usize) -> Result<Self> {
        let spec = Self {
            reach,
            avoid,
            horizon,
            kind: PropertyKind::ReachAvoid,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Stay inside the region of interest for `horizon` steps.
    pub fn safety(horizon: usize) -> Self {
        Self {
            reach: Vec::new(),
            avoid: Vec::new(),
            horizon,
            kind: PropertyKind::Safety,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.kind == PropertyKind::Safety && !self.reach.is_empty() {
            return Err(Error::InvalidInput("safety specs take no reach set".into()));
        }
        for r in &self.reach {
            if r.iter().any(|&(l, h)| !(l <= h)) {
                return Err(Error::InvalidInput(format!("malformed reach box {r:?}")));
            }
            for o in &self.avoid {
                if interiors_overlap(r, o) {
                    return Err(Error::InvalidInput(format!(
                        "reach box {r:?} overlaps avoid box {o:?}"
                    )));
                }
            }
        }
        if let Some(o) = self.avoid.iter().find(|o| o.iter().any(|&(l, h)| !(l <= h))) {
            return Err(Error::InvalidInput(format!("malformed avoid box {o:?}")));
        }
        Ok(())
    }

    pub fn in_reach(&self, x: &[f64]) -> bool {
        self.reach.iter().any(|r| rect_contains(r, x))
    }

    pub fn in_avoid(&self, x: &[f64]) -> bool {
        self.avoid.iter().any(|o| rect_contains(o, x))
    }
}

/// Labeling of a grid plus whether the spec boundaries miss grid edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CellLabels {
    pub labeling: Labeling,
    /// Some reach/avoid boundary inside the region is not a grid edge; the
    /// optimistic bound is then not guaranteed sound.
    pub misaligned: bool,
}

/// Reach iff the cell lies inside one reach box; avoid iff it meets the
/// interior of an avoid box, or is a sink. Avoid wins.
pub fn label_states(part: &RectPartition, spec: &ReachAvoidSpec) -> Result<CellLabels> {
    spec.check()?;
    let dim = part.dim();
    if let Some(b) = spec.reach.iter().chain(&spec.avoid).find(|b| b.len() != dim) {
        return Err(Error::Shape(format!("box {b:?} does not have {dim} axes")));
    }
    let layout = part.layout();
    let mut labels = Vec::with_capacity(layout.num_states());
    let mut coords = vec![0; dim];
    for s in 0..layout.num_states() {
        layout.coords_into(s, &mut coords);
        let label = match part.cell_box(&coords) {
            None => StateLabel::Avoid,
            Some(cell) => {
                if spec.avoid.iter().any(|o| interiors_overlap(&cell, o)) {
                    StateLabel::Avoid
                } else if spec.reach.iter().any(|r| rect_subset(&cell, r)) {
                    StateLabel::Reach
                } else {
                    StateLabel::Transient
                }
            }
        };
        labels.push(label);
    }
    let misaligned = spec.reach.iter().chain(&spec.avoid).any(|b| {
        b.iter().zip(part.axes()).any(|(&(l, h), g)| {
            [l, h]
                .iter()
                .any(|&e| e > g.lower && e < g.upper && !g.is_aligned(e, 1e-9))
        })
    });
    if misaligned {
        log::warn!("reach/avoid boundaries are not aligned with the grid; upper bounds may be unsound");
    }
    Ok(CellLabels {
        labeling: Labeling::new(labels, spec.kind)?,
        misaligned,
    })
}
