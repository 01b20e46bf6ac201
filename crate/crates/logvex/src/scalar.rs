//! Scalar abstraction: every numeric kernel is generic over `Scalar`,
//! instantiated at f32 or f64. The crate root exports f64 aliases.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by all kernels in this crate.
///
/// The certified tolerances quoted in the documentation (1e-10 relative
/// quadrature targets, 1e-13 truncation) assume f64; f32 instantiations
/// compile and run but deliver f32-grade accuracy.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an f64 constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    /// Lower to f64 (lossless for f32/f64).
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Lift a usize exactly where possible.
    fn of_usize(k: usize) -> Self {
        Self::from_usize(k).expect("usize must be representable")
    }

    /// ln(1 + e^x), overflow-safe.
    fn ln_1p_exp(self) -> Self {
        if self > Self::zero() {
            self + self.neg().exp().ln_1p()
        } else {
            self.exp().ln_1p()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// log(e^a + e^b), tolerating -inf on either side.
pub fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(sum e^{x_i}) over a slice, tolerating -inf entries.
pub fn log_sum_exp<T: Scalar>(xs: &[T]) -> T {
    let m = xs.iter().cloned().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || m.is_nan() {
        return m;
    }
    let s: T = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_exp_matches_direct() {
        let a = 0.3f64.ln();
        let b = 0.7f64.ln();
        assert!((log_add_exp(a, b) - 0.0).abs() < 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, b), b);
        assert_eq!(log_add_exp(a, f64::NEG_INFINITY), a);
    }

    #[test]
    fn log_sum_exp_handles_spread_scales() {
        let xs = [-700.0f64, -700.0 + 2f64.ln()];
        let got = log_sum_exp(&xs);
        assert!((got - (-700.0 + 3f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_1p_exp_extremes() {
        assert!((800f64.ln_1p_exp() - 800.0).abs() < 1e-12);
        assert!((-800f64).ln_1p_exp().abs() < 1e-300);
    }
}
