//! Log-space integration: adaptive Gauss-Kronrod quadrature for radial
//! integrals of the form (v - shift)^m e^{-phi(v)}, with certified tail
//! truncation, and chunked-deterministic importance-sampling Monte Carlo.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phi::PhiFunction;
use crate::rng::CounterRng;
use crate::scalar::{log_add_exp, log_sum_exp, Scalar};

/// How a quantity was computed. Exact means closed form (error bound 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
}

/// Logarithm of a nonnegative quantity with an error bound on the log.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate<T> {
    pub log_value: T,
    /// Bound on |log_value - true log|; 0 for exact values, +inf when the
    /// estimate is degenerate (e.g. no Monte Carlo acceptances).
    pub abs_log_error: T,
    pub method: Method,
    /// Integrand evaluations or samples consumed.
    pub count: u64,
    /// No usable information (all samples rejected).
    pub degenerate: bool,
}

impl<T: Scalar> Estimate<T> {
    pub fn exact(log_value: T) -> Self {
        Estimate { log_value, abs_log_error: T::zero(), method: Method::Exact, count: 0, degenerate: false }
    }
}

// QUADPACK qk15 nodes on [-1, 1] (symmetric; odd indices are the embedded
// 7-point Gauss nodes).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One quadrature panel, everything in log scale.
#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    log_val: T,
    log_err: T,
}

/// log of integral over [a, b] of e^{g(v)} by GK15, plus log |GK15 - G7|.
pub(crate) fn gk15_log<T: Scalar, G: Fn(T) -> T>(g: &G, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::of(2.0);
    let mid = (a + b) / T::of(2.0);
    let mut gv = [T::neg_infinity(); 15];
    for (i, &x) in XGK.iter().enumerate() {
        let x = T::of(x);
        if i == 7 {
            gv[7] = g(mid);
        } else {
            gv[i] = g(mid - half * x);
            gv[14 - i] = g(mid + half * x);
        }
    }
    let m = gv.iter().cloned().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || half <= T::zero() {
        return (T::neg_infinity(), T::neg_infinity());
    }
    let mut s15 = T::zero();
    let mut s7 = T::zero();
    for i in 0..8 {
        let wk = T::of(WGK[i]);
        let e_lo = (gv[i] - m).exp();
        if i == 7 {
            s15 += wk * e_lo;
            s7 += T::of(WG[3]) * e_lo;
        } else {
            let e_hi = (gv[14 - i] - m).exp();
            s15 += wk * (e_lo + e_hi);
            if i % 2 == 1 {
                s7 += T::of(WG[i / 2]) * (e_lo + e_hi);
            }
        }
    }
    let log_scale = m + half.ln();
    let log_val = log_scale + s15.ln();
    let diff = (s15 - s7).abs();
    let log_err = if diff == T::zero() { T::neg_infinity() } else { log_scale + diff.ln() };
    (log_val, log_err)
}

/// Adaptive refinement given initial panel edges. Returns the estimate of
/// log integral of e^g plus the achieved log of the absolute error.
pub(crate) fn adaptive_log<T: Scalar, G: Fn(T) -> T>(
    g: &G,
    edges: &[T],
    rel_tol: T,
    max_panels: usize,
) -> (T, T, u64) {
    let mut panels: Vec<Panel<T>> = Vec::new();
    let mut count = 0u64;
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15_log(g, w[0], w[1]);
        count += 15;
        panels.push(Panel { a: w[0], b: w[1], log_val: v, log_err: e });
    }
    loop {
        let total = log_sum_exp(&panels.iter().map(|p| p.log_val).collect::<Vec<_>>());
        let err = log_sum_exp(&panels.iter().map(|p| p.log_err).collect::<Vec<_>>());
        if err == T::neg_infinity()
            || total == T::neg_infinity()
            || (err - total).exp() <= rel_tol
            || panels.len() >= max_panels
        {
            return (total, err, count);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.log_err.partial_cmp(&y.1.log_err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) / T::of(2.0);
        if !(mid > p.a && mid < p.b) {
            // Panel no longer splittable at this precision; keep as is.
            panels.push(p);
            return finish(&panels, count);
        }
        let (v1, e1) = gk15_log(g, p.a, mid);
        let (v2, e2) = gk15_log(g, mid, p.b);
        count += 30;
        panels.push(Panel { a: p.a, b: mid, log_val: v1, log_err: e1 });
        panels.push(Panel { a: mid, b: p.b, log_val: v2, log_err: e2 });
    }

    fn finish<T: Scalar>(panels: &[Panel<T>], count: u64) -> (T, T, u64) {
        let total = log_sum_exp(&panels.iter().map(|p| p.log_val).collect::<Vec<_>>());
        let err = log_sum_exp(&panels.iter().map(|p| p.log_err).collect::<Vec<_>>());
        (total, err, count)
    }
}

/// The log integrand m ln(v - shift) - phi(v), with the conventions that
/// make it total: at v <= shift it is -inf unless m = 0.
pub(crate) fn log_integrand<T: Scalar>(phi: &PhiFunction<T>, m: u32, shift: T) -> impl Fn(T) -> T + '_ {
    let m_t = T::of_usize(m as usize);
    move |v: T| {
        if v < T::zero() {
            return T::neg_infinity();
        }
        let p = phi.eval(v);
        if m == 0 {
            -p
        } else if v <= shift {
            T::neg_infinity()
        } else {
            m_t * (v - shift).ln() - p
        }
    }
}

/// Initial panel edges: knots, the integrand max, and level-set landmarks
/// where the integrand has dropped by e^{-2}, e^{-8}, ... so sharp decay
/// (quadratic coefficients up to 2^53, or saturated to inf) is bracketed
/// before adaptivity starts.
pub(crate) fn landmark_edges<T: Scalar>(phi: &PhiFunction<T>, lo: T, hi: T, vmax: T) -> Vec<T> {
    let mut edges = vec![lo, hi];
    if vmax > lo && vmax < hi {
        edges.push(vmax);
    }
    if let PhiFunction::PiecewiseQuadratic { knots } = phi {
        for k in 1..=knots.len() {
            let t = T::of_usize(k);
            if t > lo && t < hi {
                edges.push(t);
            }
        }
    }
    let u0 = phi.eval(vmax.max(lo));
    if u0.is_finite() {
        for d in [2.0, 8.0, 32.0, 128.0, 512.0] {
            let t = phi.inverse(u0 + T::of(d));
            if t.is_finite() && t > lo && t < hi {
                edges.push(t);
            }
        }
        // Underflow cliff of e^{-phi} in f64.
        for level in [700.0, 745.0] {
            if u0 < T::of(level) {
                let t = phi.inverse(T::of(level));
                if t.is_finite() && t > lo && t < hi {
                    edges.push(t);
                }
            }
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    edges
}

/// Maximizer of m ln(v - shift) - phi(v) on [lo, inf). The derivative
/// m/(v - shift) - phi'(v) is nonincreasing (phi convex), so bisect.
pub(crate) fn locate_vmax<T: Scalar>(phi: &PhiFunction<T>, m: u32, shift: T, lo: T) -> T {
    let m_t = T::of_usize(m as usize);
    let gprime = |v: T| -> T {
        let d = phi.dphi_left(v);
        if m == 0 {
            -d
        } else {
            m_t / (v - shift) - d
        }
    };
    // Start just right of the singular point.
    let base = if m == 0 { lo } else { lo.max(shift) };
    let mut a = base + T::of(1e-12) * (base.abs() + T::one());
    if gprime(a) <= T::zero() {
        return a.max(lo);
    }
    let mut b = a + T::one();
    let mut guard = 0;
    while gprime(b) > T::zero() {
        a = b;
        b = base + (b - base) * T::of(2.0);
        guard += 1;
        if guard > 300 {
            return b;
        }
    }
    for _ in 0..200 {
        let mid = (a + b) / T::of(2.0);
        if gprime(mid) > T::zero() {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= T::of(1e-12) * b.max(T::one()) {
            break;
        }
    }
    (a + b) / T::of(2.0)
}

/// ln of integral over [T0, inf) of (v - shift)^m e^{-c (v - T0) - phi0},
/// the exact linearized tail: sum_i C(m, i) d^{m-i} i! / c^{i+1} with
/// d = T0 - shift, assembled in log space.
pub(crate) fn linear_tail_log<T: Scalar>(m: u32, d: T, c: T, phi0: T) -> T {
    if c <= T::zero() {
        return T::infinity();
    }
    let ln_c = c.ln();
    let ln_d = if d > T::zero() { d.ln() } else { T::neg_infinity() };
    let mut terms = Vec::with_capacity(m as usize + 1);
    let mut ln_binom = T::zero(); // ln C(m, 0)
    let mut ln_fact = T::zero(); // ln 0!
    for i in 0..=m {
        if i > 0 {
            let i_t = T::of_usize(i as usize);
            ln_binom = ln_binom + (T::of_usize((m - i + 1) as usize)).ln() - i_t.ln();
            ln_fact = ln_fact + i_t.ln();
        }
        let pow_term = if m == i {
            T::zero()
        } else {
            T::of_usize((m - i) as usize) * ln_d
        };
        terms.push(ln_binom + pow_term + ln_fact - T::of_usize((i + 1) as usize) * ln_c);
    }
    log_sum_exp(&terms) - phi0
}

/// Certified lower bound on the log integral: a width delta around the
/// max where the log integrand stays within 2 of its peak.
fn certified_log_lower<T: Scalar, G: Fn(T) -> T>(g: &G, vmax: T, lo: T, m_peak: T) -> T {
    for side in [T::one(), -T::one()] {
        let mut delta = T::one();
        for _ in 0..90 {
            let cand = vmax + side * delta;
            if cand >= lo && g(cand) >= m_peak - T::of(2.0) {
                return m_peak - T::of(2.0) + delta.ln();
            }
            delta = delta / T::of(2.0);
        }
    }
    m_peak - T::of(700.0)
}

/// log of integral over [lo, inf) of (v - shift)^m e^{-phi(v)} dv, with the
/// truncation point certified against the convex tangent bound
/// phi(v) >= phi(T) + phi'(T)(v - T) so the discarded tail is below
/// 1e-13 of a certified lower bound for the integral.
pub fn log_tail_integral<T: Scalar>(
    phi: &PhiFunction<T>,
    m: u32,
    shift: T,
    lo: T,
    rel_tol: T,
) -> Result<Estimate<T>> {
    if phi.tail_divergent() {
        return Err(Error::Divergent("phi has a flat tail; e^{-phi} is not integrable".into()));
    }
    if lo < T::zero() || !lo.is_finite() {
        return Err(Error::InvalidPhi(format!("lower limit must be finite nonnegative, got {lo}")));
    }
    let g = log_integrand(phi, m, shift);
    let vmax = locate_vmax(phi, m, shift, lo);
    let m_peak = g(vmax);
    if m_peak == T::neg_infinity() {
        // Integrand is flat zero at f64 resolution.
        return Ok(Estimate {
            log_value: T::neg_infinity(),
            abs_log_error: T::zero(),
            method: Method::Quadrature,
            count: 1,
            degenerate: false,
        });
    }
    let log_lower = certified_log_lower(&g, vmax, lo, m_peak);
    let trunc_target = T::of(1e-13).ln() + log_lower;

    let mut t_end = vmax.max(lo) + T::one();
    let mut tail_log = T::infinity();
    for _ in 0..200 {
        let c = phi.dphi_left(t_end);
        if c > T::zero() {
            let phi0 = phi.eval(t_end);
            tail_log = linear_tail_log(m, t_end - shift, c, phi0);
            if tail_log <= trunc_target {
                break;
            }
        }
        t_end = vmax.max(lo) + (t_end - vmax.max(lo)) * T::of(2.0);
    }
    if tail_log > trunc_target {
        return Err(Error::Divergent(
            "could not certify a truncation point; phi grows too slowly".into(),
        ));
    }

    let edges = landmark_edges(phi, lo, t_end, vmax);
    let (log_val, quad_err, count) = adaptive_log(&g, &edges, rel_tol, 4000);
    let err_total = log_add_exp(quad_err, tail_log);
    let abs_log_error = if log_val == T::neg_infinity() {
        T::zero()
    } else {
        (err_total - log_val).exp()
    };
    Ok(Estimate { log_value: log_val, abs_log_error, method: Method::Quadrature, count, degenerate: false })
}

/// Finite-range companion: log of integral over [lo, hi] of
/// (v - shift)^m e^{-phi(v)} dv.
pub fn log_partial_integral<T: Scalar>(
    phi: &PhiFunction<T>,
    m: u32,
    shift: T,
    lo: T,
    hi: T,
    rel_tol: T,
) -> Result<Estimate<T>> {
    if !(hi >= lo) || lo < T::zero() {
        return Err(Error::InvalidPhi(format!("bad integration range [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Estimate {
            log_value: T::neg_infinity(),
            abs_log_error: T::zero(),
            method: Method::Quadrature,
            count: 0,
            degenerate: false,
        });
    }
    let g = log_integrand(phi, m, shift);
    let vmax = locate_vmax(phi, m, shift, lo).min(hi);
    let edges = landmark_edges(phi, lo, hi, vmax);
    let (log_val, quad_err, count) = adaptive_log(&g, &edges, rel_tol, 4000);
    let abs_log_error = if log_val == T::neg_infinity() {
        T::zero()
    } else {
        (quad_err - log_val).exp()
    };
    Ok(Estimate { log_value: log_val, abs_log_error, method: Method::Quadrature, count, degenerate: false })
}

/// Importance-sampling proposal: a sampler producing points and the log of
/// its density at a point.
pub struct ProposalSpec<'a, T> {
    pub sample: Box<dyn Fn(&mut CounterRng) -> Vec<T> + Sync + 'a>,
    pub log_pdf: Box<dyn Fn(&[T]) -> T + Sync + 'a>,
}

const CHUNK: u64 = 4096;

/// Monte Carlo mass of {x : indicator(x)} under the unnormalized density
/// e^{log_density(x)}, by importance sampling from the proposal.
///
/// Deterministic for a fixed (seed, stream, budget) regardless of thread
/// count: samples are generated in fixed 4096-sample chunks, each chunk
/// keyed by its index, and chunk statistics are folded in chunk order.
pub fn mc_region_measure<T, D, I>(
    log_density: D,
    indicator: I,
    proposal: &ProposalSpec<T>,
    budget: u64,
    seed: u64,
    stream: u64,
) -> Estimate<T>
where
    T: Scalar,
    D: Fn(&[T]) -> T + Sync,
    I: Fn(&[T]) -> bool + Sync,
{
    let n_chunks = budget.div_ceil(CHUNK);
    let stats: Vec<(T, T, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = CounterRng::for_chunk(seed, stream, c);
            let take = if (c + 1) * CHUNK <= budget { CHUNK } else { budget - c * CHUNK };
            let mut logs: Vec<T> = Vec::with_capacity(take as usize);
            let mut accepted = 0u64;
            for _ in 0..take {
                let x = (proposal.sample)(&mut rng);
                if indicator(&x) {
                    let lw = log_density(&x) - (proposal.log_pdf)(&x);
                    logs.push(lw);
                    accepted += 1;
                }
            }
            let lse1 = log_sum_exp(&logs);
            for l in logs.iter_mut() {
                *l = *l * T::of(2.0);
            }
            let lse2 = log_sum_exp(&logs);
            (lse1, lse2, accepted)
        })
        .collect();

    let mut lse1 = T::neg_infinity();
    let mut lse2 = T::neg_infinity();
    let mut accepted = 0u64;
    for (a, b, k) in stats {
        lse1 = log_add_exp(lse1, a);
        lse2 = log_add_exp(lse2, b);
        accepted += k;
    }
    if accepted == 0 {
        return Estimate {
            log_value: T::neg_infinity(),
            abs_log_error: T::infinity(),
            method: Method::MonteCarlo,
            count: budget,
            degenerate: true,
        };
    }
    let ln_n = T::of(budget as f64).ln();
    let log_mean = lse1 - ln_n;
    // Var = E[w^2] - E[w]^2, guarded against cancellation to zero.
    let ln_e2 = lse2 - ln_n;
    let d = T::of(2.0) * log_mean - ln_e2;
    let rel = if d >= T::zero() {
        T::zero()
    } else {
        // stderr / mean = sqrt((E2 - E1^2)/N) / E1
        let ln_var = ln_e2 + (T::one() - d.exp()).ln_nonneg();
        ((ln_var - ln_n) / T::of(2.0) - log_mean).exp()
    };
    let abs_log_error = rel + rel * rel / T::of(2.0);
    Estimate {
        log_value: log_mean,
        abs_log_error,
        method: Method::MonteCarlo,
        count: budget,
        degenerate: false,
    }
}

/// ln of a quantity that should be >= 0; rounding to an exact zero or a
/// tiny negative maps to -inf rather than NaN.
trait LnGuard {
    fn ln_nonneg(self) -> Self;
}
impl<T: Scalar> LnGuard for T {
    fn ln_nonneg(self) -> Self {
        if self <= T::zero() {
            T::neg_infinity()
        } else {
            self.ln()
        }
    }
}
