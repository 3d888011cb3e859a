//! Interval arithmetic and per-axis moment enclosures.

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "[{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn shift(self, c: f64) -> Self {
        Self::new(self.lo + c, self.hi + c)
    }

    pub fn scale(self, c: f64) -> Self {
        if c >= 0.0 {
            Self::new(c * self.lo, c * self.hi)
        } else {
            Self::new(c * self.hi, c * self.lo)
        }
    }

    pub fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi)
    }

    /// `x²`, tight when the interval straddles zero.
    pub fn square(self) -> Self {
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        if self.lo <= 0.0 && self.hi >= 0.0 {
            Self::new(0.0, a.max(b))
        } else {
            Self::new(a.min(b), a.max(b))
        }
    }

    pub fn clamp(self, lo: f64, hi: f64) -> Self {
        Self::new(self.lo.clamp(lo, hi), self.hi.clamp(lo, hi))
    }
}

/// Enclosure of one axis' mean and variance over a source cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisMoments {
    pub mean: (f64, f64),
    pub variance: (f64, f64),
}

impl AxisMoments {
    pub fn check(&self) -> Result<()> {
        let (ml, mh) = self.mean;
        let (vl, vh) = self.variance;
        if !(ml <= mh) || !ml.is_finite() || !mh.is_finite() {
            return Err(Error::InvalidInput(format!("invalid mean interval [{ml}, {mh}]")));
        }
        if !(vl > 0.0) || !(vl <= vh) || !vh.is_finite() {
            return Err(Error::InvalidInput(format!(
                "variance interval [{vl}, {vh}] must be positive and ordered"
            )));
        }
        Ok(())
    }

    /// Bit pattern used to share bound computations between cells.
    pub(crate) fn key(&self) -> [u64; 4] {
        [
            self.mean.0.to_bits(),
            self.mean.1.to_bits(),
            self.variance.0.to_bits(),
            self.variance.1.to_bits(),
        ]
    }
}

/// Per-axis moment enclosures of one kernel component.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentBounds {
    pub axes: Vec<AxisMoments>,
}

impl MomentBounds {
    pub fn check(&self) -> Result<()> {
        self.axes.iter().try_for_each(AxisMoments::check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_straddling_zero() {
        assert_eq!(Interval::new(-1.0, 2.0).square(), Interval::new(0.0, 4.0));
        assert_eq!(Interval::new(-3.0, -1.0).square(), Interval::new(1.0, 9.0));
    }

    #[test]
    fn mul_and_scale_signs() {
        let a = Interval::new(-1.0, 2.0);
        assert_eq!(a.mul(Interval::new(-3.0, 1.0)), Interval::new(-6.0, 3.0));
        assert_eq!(a.scale(-2.0), Interval::new(-4.0, 2.0));
    }
}
