//! The profile family phi: increasing convex phi : [0, inf) -> [0, inf)
//! with evaluation, left derivative, generalized inverse, diagnostics, and
//! the pathological piecewise-quadratic construction whose knots satisfy
//! ln phi'(t_k) > phi(t_k).

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tower::Tower;

/// One quadratic segment on [k, k+1): phi(k + s) = alpha s^2/2 + b s + a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSegment<T> {
    pub a: T,
    pub b: T,
    pub alpha: T,
}

/// Increasing convex profile.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFunction<T: Scalar> {
    /// phi(t) = (t/scale)^p / p + offset, p >= 1.
    Power { p: T, scale: T, offset: T },
    /// phi(t) = slope * t + offset.
    Linear { slope: T, offset: T },
    /// phi(t) = t^2/2 + (n/2) ln(2 pi): the standard Gaussian in R^n has
    /// normalizer exactly 1 with this profile.
    GaussianNormalized { n: usize },
    /// Segment k lives on [k, k+1); the last segment extrapolates to +inf.
    PiecewiseQuadratic { knots: Vec<QuadSegment<T>> },
}

impl<T: Scalar> PhiFunction<T> {
    pub fn power(p: T, scale: T, offset: T) -> Result<Self> {
        if !(p >= T::one()) {
            return Err(Error::InvalidPhi(format!("power exponent must be >= 1, got {p}")));
        }
        if !(scale > T::zero()) {
            return Err(Error::InvalidPhi(format!("power scale must be positive, got {scale}")));
        }
        if !(offset >= T::zero()) {
            return Err(Error::InvalidPhi(format!("power offset must be >= 0, got {offset}")));
        }
        Ok(PhiFunction::Power { p, scale, offset })
    }

    pub fn linear(slope: T, offset: T) -> Result<Self> {
        if !(slope > T::zero()) {
            return Err(Error::InvalidPhi(format!("linear slope must be positive, got {slope}")));
        }
        if !(offset >= T::zero()) {
            return Err(Error::InvalidPhi(format!("linear offset must be >= 0, got {offset}")));
        }
        Ok(PhiFunction::Linear { slope, offset })
    }

    pub fn gaussian_normalized(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPhi("gaussian dimension must be >= 1".into()));
        }
        Ok(PhiFunction::GaussianNormalized { n })
    }

    /// Structural construction only; mathematical soundness (monotone,
    /// convex, continuous) is checked by [`PhiFunction::validate`], which
    /// is deliberately able to receive broken knot lists and report the
    /// first violation.
    pub fn piecewise_quadratic(knots: Vec<QuadSegment<T>>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidPhi("piecewise phi needs at least one segment".into()));
        }
        Ok(PhiFunction::PiecewiseQuadratic { knots })
    }

    /// Largest t with phi(t) = phi(0); 0 for the strictly increasing
    /// variants, the length of the leading flat run for piecewise phi.
    pub fn plateau(&self) -> T {
        match self {
            PhiFunction::PiecewiseQuadratic { knots } => {
                let mut t0 = T::zero();
                for seg in knots {
                    if seg.alpha == T::zero() && seg.b == T::zero() {
                        t0 += T::one();
                    } else {
                        break;
                    }
                }
                t0
            }
            _ => T::zero(),
        }
    }

    /// phi(t) for t >= 0.
    pub fn eval(&self, t: T) -> T {
        match self {
            PhiFunction::Power { p, scale, offset } => {
                let r = t / *scale;
                r.powf(*p) / *p + *offset
            }
            PhiFunction::Linear { slope, offset } => *slope * t + *offset,
            PhiFunction::GaussianNormalized { n } => {
                t * t / T::of(2.0) + T::of_usize(*n) / T::of(2.0) * (T::of(2.0) * T::PI()).ln()
            }
            PhiFunction::PiecewiseQuadratic { knots } => {
                let (seg, s) = self.segment_at(t, knots);
                if s == T::zero() {
                    // Avoid 0 * inf on saturated segments.
                    seg.a
                } else {
                    seg.a + s * (seg.b + s * seg.alpha / T::of(2.0))
                }
            }
        }
    }

    /// Left derivative of phi at t (at a knot, the slope of the segment
    /// ending there; at 0, the first segment's slope).
    pub fn dphi_left(&self, t: T) -> T {
        match self {
            PhiFunction::Power { p, scale, offset: _ } => {
                let r = t / *scale;
                if *p == T::one() {
                    scale.recip()
                } else {
                    r.powf(*p - T::one()) / *scale
                }
            }
            PhiFunction::Linear { slope, .. } => *slope,
            PhiFunction::GaussianNormalized { .. } => t,
            PhiFunction::PiecewiseQuadratic { knots } => {
                let (seg, s) = self.segment_at(t, knots);
                if s == T::zero() {
                    seg.b
                } else {
                    seg.alpha * s + seg.b
                }
            }
        }
    }

    /// Segment containing t, with the left-derivative convention: an exact
    /// interior knot t = k resolves to the segment ending at k.
    fn segment_at<'a>(&self, t: T, knots: &'a [QuadSegment<T>]) -> (&'a QuadSegment<T>, T) {
        let kmax = knots.len() - 1;
        let mut k = t.floor().to_usize().unwrap_or(0);
        if t > T::zero() && t == t.floor() && k >= 1 {
            k -= 1; // left segment at a knot
        }
        if k > kmax {
            k = kmax; // extrapolate the last segment
        }
        (&knots[k], t - T::of_usize(k))
    }

    /// Checked public evaluation: (value, left derivative).
    pub fn eval_pair(&self, t: T) -> Result<(T, T)> {
        if !(t >= T::zero()) {
            return Err(Error::InvalidPhi(format!("phi argument must be >= 0, got {t}")));
        }
        Ok((self.eval(t), self.dphi_left(t)))
    }

    /// Generalized inverse sup{v >= 0 : phi(v) < u} (sup of the empty set
    /// is 0), with the plateau convention at u = phi(0): the inverse jumps
    /// to the plateau endpoint there.
    pub fn inverse(&self, u: T) -> T {
        let phi0 = self.eval(T::zero());
        if u < phi0 {
            return T::zero();
        }
        if u == phi0 {
            return self.plateau();
        }
        match self {
            PhiFunction::Power { p, scale, offset } => {
                *scale * ((*p * (u - *offset)).max(T::zero())).powf(p.recip())
            }
            PhiFunction::Linear { slope, offset } => (u - *offset) / *slope,
            PhiFunction::GaussianNormalized { n } => {
                let c = T::of_usize(*n) / T::of(2.0) * (T::of(2.0) * T::PI()).ln();
                (T::of(2.0) * (u - c)).max(T::zero()).sqrt()
            }
            PhiFunction::PiecewiseQuadratic { .. } => {
                // Monotone bisection on phi(v) < u to 1e-12 relative.
                let mut hi = T::one();
                let mut guard = 0;
                while self.eval(hi) < u {
                    hi = hi * T::of(2.0);
                    guard += 1;
                    if guard > 600 {
                        return T::infinity();
                    }
                }
                let mut lo = T::zero();
                for _ in 0..200 {
                    let mid = (lo + hi) / T::of(2.0);
                    if self.eval(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= T::of(1e-13) * hi.max(T::one()) {
                        break;
                    }
                }
                lo
            }
        }
    }

    /// True when phi cannot make e^{-phi} integrable (flat tail).
    pub fn tail_divergent(&self) -> bool {
        match self {
            PhiFunction::PiecewiseQuadratic { knots } => {
                let last = knots.last().unwrap();
                !(last.alpha > T::zero() || last.b > T::zero())
            }
            _ => false,
        }
    }

    /// Grid diagnostics: nonnegativity, monotone values, monotone left
    /// derivatives, and (piecewise) C^1 continuity across knots. Reports
    /// the first violation instead of erroring.
    pub fn validate(&self, grid: &[T]) -> PhiDiagnostics {
        for i in 1..grid.len() {
            if grid[i] < grid[i - 1] || grid[0] < T::zero() {
                return PhiDiagnostics::fail(0, "grid must be sorted nonnegative".into());
            }
        }
        let mut prev_v = T::neg_infinity();
        let mut prev_d = T::neg_infinity();
        for (i, &t) in grid.iter().enumerate() {
            let v = self.eval(t);
            let d = self.dphi_left(t);
            if v.is_nan() || v < T::zero() {
                return PhiDiagnostics::fail(i, format!("phi({t}) = {v} is not nonnegative"));
            }
            if v < prev_v {
                return PhiDiagnostics::fail(i, format!("phi decreases at grid index {i}"));
            }
            if d < prev_d {
                return PhiDiagnostics::fail(i, format!("left derivative decreases at grid index {i}"));
            }
            prev_v = v;
            prev_d = d;
        }
        if let PhiFunction::PiecewiseQuadratic { knots } = self {
            for k in 0..knots.len().saturating_sub(1) {
                let seg = &knots[k];
                let next = &knots[k + 1];
                if seg.alpha < T::zero() {
                    return PhiDiagnostics::fail(k, format!("segment {k} has negative curvature"));
                }
                let end_v = seg.a + seg.b + seg.alpha / T::of(2.0);
                let end_d = seg.alpha + seg.b;
                if !close_or_both_inf(end_v, next.a) {
                    return PhiDiagnostics::fail(k, format!("value jump at knot {}", k + 1));
                }
                if !close_or_both_inf(end_d, next.b) {
                    return PhiDiagnostics::fail(k, format!("slope jump at knot {}", k + 1));
                }
            }
            if let Some(k) = knots.iter().position(|s| s.alpha < T::zero()) {
                return PhiDiagnostics::fail(k, format!("segment {k} has negative curvature"));
            }
        }
        PhiDiagnostics { ok: true, first_violation: None }
    }
}

fn close_or_both_inf<T: Scalar>(x: T, y: T) -> bool {
    if x == T::infinity() || y == T::infinity() {
        return x == y;
    }
    (x - y).abs() <= T::of(1e-9) * (x.abs() + y.abs() + T::one())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiDiagnostics {
    pub ok: bool,
    pub first_violation: Option<(usize, String)>,
}

impl PhiDiagnostics {
    fn fail(idx: usize, msg: String) -> Self {
        PhiDiagnostics { ok: false, first_violation: Some((idx, msg)) }
    }
}

/// One knot of the pathological construction, reported in tower form
/// because the quantities outgrow f64 after two steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathologicalKnot {
    pub k: usize,
    /// alpha_k = 2^j; the exact exponent when it fits an integer search.
    pub log2_alpha: Option<u64>,
    pub alpha: Tower,
    pub a: Tower,
    pub b: Tower,
    /// t_k = k + alpha_k^{-1/2}; the fractional part underflows f64 for
    /// k >= 3 and the field then saturates to exactly k.
    pub t_k: f64,
    /// log2 of t_k - k, i.e. -log2(alpha_k)/2; -inf once alpha leaves f64.
    pub t_k_frac_log2: f64,
    pub phi_t_k: Tower,
    pub ln_dphi_t_k: Tower,
    /// t_k in (k, k+1); equivalent to alpha_k > 1.
    pub t_k_interior: bool,
    /// ln phi'(t_k) > phi(t_k), the defining inequality.
    pub sharp: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathologicalReport {
    pub k_max: usize,
    pub knots: Vec<PathologicalKnot>,
}

/// Build the pathological piecewise-quadratic phi: a_0 = b_0 = 1 and on
/// each [k, k+1) the segment alpha_k (t-k)^2/2 + b_k (t-k) + a_k, where
/// alpha_k is the smallest power of two with
/// sqrt(alpha_k) + b_k > exp(1/2 + b_k/sqrt(alpha_k) + a_k),
/// then a_{k+1} = alpha_k/2 + b_k + a_k and b_{k+1} = alpha_k + b_k.
///
/// The search scans exponents j = log2(alpha) linearly while small and by
/// monotone bisection up to u64 range; beyond that (a_k no longer fits a
/// f64) the boundary ln alpha = 2 a_k + 1 is taken in tower arithmetic and
/// nudged up by top-level ulps until the defining inequality verifies
/// strictly at tower resolution. The returned PhiFunction saturates
/// segments to f64 infinity once the coefficients leave f64 range; the
/// report carries the tower values.
pub fn build_pathological_phi(k_max: usize) -> Result<(PhiFunction<f64>, PathologicalReport)> {
    if k_max < 1 {
        return Err(Error::InvalidPhi("pathological construction needs k_max >= 1".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    let mut a = Tower::from_f64(1.0);
    let mut b = Tower::from_f64(1.0);
    let mut segments: Vec<QuadSegment<f64>> = Vec::with_capacity(k_max + 1);
    let mut knots: Vec<PathologicalKnot> = Vec::with_capacity(k_max + 1);

    for k in 0..=k_max {
        let (alpha, sqrt_alpha, log2_alpha) = if a.is_finite_f64() && a.x < 3.0e17 {
            // Integer-exponent regime: the defining condition is monotone
            // in j (LHS grows, RHS shrinks), so scan then bisect.
            let cond = |j: u64| defining_condition(j_sqrt_tower(j, ln2), a, b);
            let mut j = None;
            for cand in 0..=64u64 {
                if cond(cand) {
                    j = Some(cand);
                    break;
                }
            }
            let j = match j {
                Some(j) => j,
                None => {
                    let mut lo = 64u64; // cond(lo) false
                    let mut hi = 128u64;
                    while !cond(hi) {
                        lo = hi;
                        hi = hi.checked_mul(2).ok_or_else(|| {
                            Error::InvalidPhi("pathological alpha search overflowed u64".into())
                        })?;
                    }
                    while hi - lo > 1 {
                        let mid = lo + (hi - lo) / 2;
                        if cond(mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi
                }
            };
            (alpha_tower_from_j(j, ln2), j_sqrt_tower(j, ln2), Some(j))
        } else {
            // Tower regime: ln alpha = 2 a + 1 up to sub-ulp corrections;
            // nudge until strictly sharp. Integrality of the exponent is
            // below tower resolution here.
            let mut ln_alpha = a.mul(Tower::from_f64(2.0)).add(Tower::from_f64(1.0));
            let mut guard = 0;
            loop {
                let s = ln_alpha.mul(Tower::from_f64(0.5)).exp();
                if defining_condition_t(s, a, b) {
                    break;
                }
                ln_alpha = ln_alpha.next_up();
                guard += 1;
                if guard > 64 {
                    return Err(Error::InvalidPhi(
                        "pathological alpha bump failed to verify strictly".into(),
                    ));
                }
            }
            let s = ln_alpha.mul(Tower::from_f64(0.5)).exp();
            (ln_alpha.exp(), s, None)
        };

        // Knot quantities at t_k = k + 1/sqrt(alpha).
        let inv_sqrt = if sqrt_alpha.is_finite_f64() { 1.0 / sqrt_alpha.x } else { 0.0 };
        let t_k = k as f64 + inv_sqrt;
        let ratio = ratio_f64(b, sqrt_alpha); // b/sqrt(alpha)
        let phi_t_k = a.add(Tower::from_f64(0.5 + ratio));
        let dphi_t_k = sqrt_alpha.add(b);
        let ln_dphi = dphi_t_k.ln();
        let sharp = ln_dphi.cmp_tower(&phi_t_k) == Ordering::Greater;
        let interior = alpha.cmp_tower(&Tower::from_f64(1.0)) == Ordering::Greater;
        let frac_log2 = if alpha.is_finite_f64() { -alpha.x.log2() / 2.0 } else { f64::NEG_INFINITY };

        segments.push(QuadSegment {
            a: a.to_f64_saturating(),
            b: b.to_f64_saturating(),
            alpha: alpha.to_f64_saturating(),
        });
        knots.push(PathologicalKnot {
            k,
            log2_alpha,
            alpha,
            a,
            b,
            t_k,
            t_k_frac_log2: frac_log2,
            phi_t_k,
            ln_dphi_t_k: ln_dphi,
            t_k_interior: interior,
            sharp,
        });

        // a_{k+1} = alpha/2 + b + a; b_{k+1} = alpha + b.
        let alpha_half = if alpha.is_finite_f64() {
            Tower::from_f64(alpha.x / 2.0)
        } else {
            alpha.mul(Tower::from_f64(0.5))
        };
        a = alpha_half.add(b).add(a);
        b = alpha.add(b);
    }

    let phi = PhiFunction::piecewise_quadratic(segments)?;
    Ok((phi, PathologicalReport { k_max, knots }))
}

/// sqrt(2^j) as an exact power of two when possible, else through exp.
fn j_sqrt_tower(j: u64, ln2: f64) -> Tower {
    if j % 2 == 0 && j / 2 <= 1023 {
        Tower::from_f64(2f64.powi((j / 2) as i32))
    } else {
        Tower::from_f64(j as f64 * 0.5 * ln2).exp()
    }
}

/// 2^j exactly when representable, else level-1.
fn alpha_tower_from_j(j: u64, ln2: f64) -> Tower {
    if j <= 1023 {
        Tower::from_f64(2f64.powi(j as i32))
    } else {
        // j >= 1024: j ln2 > 709, already canonical at level 1.
        Tower { level: 1, x: j as f64 * ln2 }
    }
}

/// b / sqrt_alpha as f64: exact division at level 0, log route otherwise,
/// saturating to 0 when the scales are unbridgeable.
fn ratio_f64(b: Tower, sqrt_alpha: Tower) -> f64 {
    if b.is_finite_f64() && sqrt_alpha.is_finite_f64() {
        b.x / sqrt_alpha.x
    } else {
        let d = b.ln_ratio_f64(sqrt_alpha);
        if d == f64::NEG_INFINITY {
            0.0
        } else {
            d.exp()
        }
    }
}

fn defining_condition(sqrt_alpha: Tower, a: Tower, b: Tower) -> bool {
    defining_condition_t(sqrt_alpha, a, b)
}

/// sqrt(alpha) + b > exp(1/2 + b/sqrt(alpha) + a), in tower arithmetic.
fn defining_condition_t(sqrt_alpha: Tower, a: Tower, b: Tower) -> bool {
    let lhs = sqrt_alpha.add(b);
    let rhs = a.add(Tower::from_f64(0.5 + ratio_f64(b, sqrt_alpha))).exp();
    lhs.cmp_tower(&rhs) == Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let g3 = PhiFunction::gaussian_normalized(3).unwrap();
        let (v, d) = g3.eval_pair(0.0).unwrap();
        assert_eq!(v, 1.5 * (2.0 * std::f64::consts::PI).ln());
        assert_eq!(d, 0.0);
        assert!((v - 2.7568155996140182).abs() < 1e-15);

        let lin = PhiFunction::linear(1.0, 0.0).unwrap();
        assert_eq!(lin.eval_pair(5.0).unwrap(), (5.0, 1.0));

        assert!(g3.eval_pair(-1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let g2: PhiFunction<f64> = PhiFunction::gaussian_normalized(2).unwrap();
        assert!(g2.inverse(g2.eval(0.0) - 0.5) == 0.0);
        assert!((g2.inverse(g2.eval(3.0)) - 3.0).abs() < 1e-12);
        let p: PhiFunction<f64> = PhiFunction::power(1.0, 1.0, 0.0).unwrap();
        assert!((p.inverse(7.0) - 7.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip_above_plateau() {
        let phis: Vec<PhiFunction<f64>> = vec![
            PhiFunction::power(2.5, 1.3, 0.2).unwrap(),
            PhiFunction::linear(0.7, 1.0).unwrap(),
            PhiFunction::gaussian_normalized(4).unwrap(),
        ];
        for phi in &phis {
            for &t in &[0.1, 0.5, 1.0, 2.0, 7.5] {
                let u = phi.eval(t);
                assert!(
                    (phi.inverse(u) - t).abs() <= 1e-10 * t.max(1.0),
                    "round trip failed at t = {t}"
                );
            }
        }
    }

    #[test]
    fn plateau_and_inverse_jump() {
        // Flat at 1 on [0, 1], then rises quadratically.
        let phi = PhiFunction::piecewise_quadratic(vec![
            QuadSegment { a: 1.0, b: 0.0, alpha: 0.0 },
            QuadSegment { a: 1.0, b: 0.0, alpha: 2.0 },
        ])
        .unwrap();
        assert_eq!(phi.plateau(), 1.0);
        assert_eq!(phi.inverse(0.5), 0.0);
        assert_eq!(phi.inverse(1.0), 1.0); // plateau convention
        let v = phi.inverse(1.5);
        assert!((v - (1.0 + 0.5f64.sqrt())).abs() < 1e-9, "got {v}");
        assert!(phi.validate(&grid(0.0, 3.0, 100)).ok);
    }

    #[test]
    fn validate_detects_bad_curvature() {
        let phi = PhiFunction::piecewise_quadratic(vec![
            QuadSegment { a: 1.0, b: 1.0, alpha: 1.0 },
            QuadSegment { a: 2.5, b: 2.0, alpha: -3.0 },
        ])
        .unwrap();
        let d = phi.validate(&grid(0.0, 2.0, 50));
        assert!(!d.ok);
    }

    #[test]
    fn pathological_first_knots_exact() {
        let (phi, report) = build_pathological_phi(3).unwrap();
        let k0 = &report.knots[0];
        assert_eq!(k0.log2_alpha, Some(5), "alpha_0 must be 32");
        assert_eq!(k0.alpha, Tower::from_f64(32.0));
        assert!((k0.t_k - 0.17677669529663688).abs() < 1e-16);

        // phi_0(t) = 16 t^2 + t + 1 at t_0, and left derivative 32 t_0 + 1.
        let (v, d) = phi.eval_pair(k0.t_k).unwrap();
        assert!((v - 1.6767766952966369).abs() < 1e-14, "got {v}");
        assert!((d - (32f64.sqrt() + 1.0)).abs() < 1e-13, "got {d}");

        let k1 = &report.knots[1];
        assert_eq!(k1.log2_alpha, Some(54), "alpha_1 must be 2^54");
        assert_eq!(k1.a, Tower::from_f64(18.0));
        assert_eq!(k1.b, Tower::from_f64(33.0));

        // k = 2: a_2 = 2^53 + 51 rounded to f64 addition order, and
        // ln alpha_2 = 2 a_2 + 1 up to the ceiling step.
        let k2 = &report.knots[2];
        assert_eq!(k2.a, Tower::from_f64(9007199254741042.0));
        assert_eq!(k2.b, Tower::from_f64(18014398509482016.0));
        let j2 = k2.log2_alpha.expect("still in integer regime") as f64;
        let ln_alpha2 = j2 * std::f64::consts::LN_2;
        assert!(
            (ln_alpha2 - (2.0 * 9007199254741042.0 + 1.0)).abs() <= 8.0,
            "ln alpha_2 = {ln_alpha2}"
        );

        // k = 3 leaves f64 entirely.
        let k3 = &report.knots[3];
        assert!(k3.log2_alpha.is_none());
        assert!(k3.alpha.level >= 1);
        assert_eq!(k3.t_k, 3.0); // fractional part underflows

        for knot in &report.knots {
            assert!(knot.sharp, "knot {} lost sharpness", knot.k);
            assert!(knot.t_k_interior, "knot {} left (k, k+1)", knot.k);
        }
    }

    #[test]
    fn pathological_phi_saturates_cleanly() {
        let (phi, _) = build_pathological_phi(10).unwrap();
        // Finite on the first two segments, +inf beyond, never NaN.
        assert!(phi.eval(0.0) == 1.0);
        assert!(phi.eval(1.5).is_finite());
        assert_eq!(phi.eval(2.0), 9007199254741042.0);
        assert_eq!(phi.eval(2.5), f64::INFINITY);
        assert_eq!(phi.eval(7.0), f64::INFINITY);
        let d = phi.validate(&grid(0.0, 11.0, 10_000));
        assert!(d.ok, "{:?}", d.first_violation);
    }

    fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }
}
