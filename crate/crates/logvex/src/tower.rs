//! Level-index ("tower") arithmetic for positive quantities far beyond
//! f64 range.
//!
//! A `Tower { level, x }` represents exp applied `level` times to `x`.
//! Canonical form demotes whenever the top exponent still fits in f64
//! (level >= 1 implies x > 709), so a canonical value at level >= 1 exceeds
//! e^709 ~ 8.2e307. The piecewise-quadratic construction in `phi` needs
//! exactly two operations to extreme precision: ordering and
//! absorb-dominant addition; both are implemented by recursing through
//! logarithms, which terminates because levels strictly decrease.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Demotion threshold: e^x at or below this stays finite in f64.
const DEMOTE_MAX: f64 = 709.0;

/// exp^level(x); level 0 is a plain f64.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub level: u32,
    pub x: f64,
}

impl Tower {
    pub fn from_f64(x: f64) -> Self {
        Tower { level: 0, x }
    }

    /// exp(self), canonicalized.
    pub fn exp(self) -> Self {
        Tower { level: self.level + 1, x: self.x }.canonical()
    }

    /// ln(self); requires a positive value (always true at level >= 1).
    pub fn ln(self) -> Self {
        if self.level == 0 {
            assert!(self.x > 0.0, "ln of nonpositive tower level 0");
            Tower { level: 0, x: self.x.ln() }
        } else {
            Tower { level: self.level - 1, x: self.x }
        }
    }

    fn canonical(mut self) -> Self {
        while self.level >= 1 && self.x <= DEMOTE_MAX {
            self.x = self.x.exp();
            self.level -= 1;
        }
        self
    }

    pub fn is_finite_f64(self) -> bool {
        self.level == 0 && self.x.is_finite()
    }

    /// Collapse to f64, saturating to +inf above range.
    pub fn to_f64_saturating(self) -> f64 {
        if self.level == 0 {
            self.x
        } else {
            f64::INFINITY
        }
    }

    /// ln(self/other) as f64 when the ratio is f64-representable.
    /// Returns -inf/+inf when the two values live at unbridgeable scales
    /// (the ratio would under- or overflow every f64).
    pub fn ln_ratio_f64(self, other: Tower) -> f64 {
        let a = self.ln_chain();
        let b = other.ln_chain();
        match (a, b) {
            (Some(la), Some(lb)) => la - lb,
            _ => match self.cmp_tower(&other) {
                Ordering::Less => f64::NEG_INFINITY,
                Ordering::Greater => f64::INFINITY,
                Ordering::Equal => 0.0,
            },
        }
    }

    /// ln of the value as a plain f64 if level allows (level 0 positive, or
    /// level 1, whose ln is the stored f64 exponent).
    fn ln_chain(self) -> Option<f64> {
        match self.level {
            0 if self.x > 0.0 => Some(self.x.ln()),
            1 => Some(self.x),
            _ => None,
        }
    }

    /// Total order on positive towers (level-0 values may be any f64; a
    /// level >= 1 tower always exceeds any nonpositive f64).
    pub fn cmp_tower(&self, other: &Tower) -> Ordering {
        match (self.level, other.level) {
            (0, 0) => self.x.partial_cmp(&other.x).unwrap_or(Ordering::Equal),
            (_, 0) => {
                if other.x <= 0.0 {
                    Ordering::Greater
                } else {
                    self.ln().cmp_tower(&Tower::from_f64(other.x.ln()))
                }
            }
            (0, _) => other.cmp_tower(self).reverse(),
            _ => self.ln().cmp_tower(&other.ln()),
        }
    }

    /// self + other for positive towers. Exact to one f64 rounding at the
    /// dominant scale: when the smaller term is below the dominant term's
    /// ulp (in particular whenever their scales differ by a whole level)
    /// it is absorbed.
    pub fn add(self, other: Tower) -> Tower {
        if self.level == 0 && other.level == 0 {
            let s = self.x + other.x;
            if s.is_finite() {
                return Tower::from_f64(s);
            }
            // Both near f64 max: route through logs.
            let (hi, lo) = if self.x >= other.x { (self.x, other.x) } else { (other.x, self.x) };
            let ln_sum = hi.ln() + (lo / hi).ln_1p();
            return Tower { level: 1, x: ln_sum }.canonical();
        }
        let (hi, lo) = if self.cmp_tower(&other) != Ordering::Less {
            (self, other)
        } else {
            (other, self)
        };
        let d = lo.ln_ratio_f64(hi); // <= 0
        let corr = d.exp().ln_1p(); // ln(1 + lo/hi) in [0, ln 2]
        if corr == 0.0 {
            return hi;
        }
        // hi = exp(y): result = exp(y + corr); recurse one level down.
        let y = hi.ln();
        y.add(Tower::from_f64(corr)).exp()
    }

    /// self * other for positive towers.
    pub fn mul(self, other: Tower) -> Tower {
        if self.level == 0 && other.level == 0 {
            let p = self.x * other.x;
            if p.is_finite() {
                return Tower::from_f64(p);
            }
        }
        self.ln().add(other.ln()).exp()
    }

    /// Smallest representable strict increase: bump the top-level mantissa.
    pub fn next_up(self) -> Tower {
        Tower { level: self.level, x: next_after_up(self.x) }
    }
}

fn next_after_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}
