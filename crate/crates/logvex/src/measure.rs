//! The measure d mu = (1/Z) e^{-phi(||x||_L)} dx and the uniform measure
//! on a body: normalizers, masses of dilated bodies, tail brackets with a
//! certified sandwich, and deterministic sampling.

use rayon::prelude::*;
use std::sync::OnceLock;

use crate::bodies::{
    dilation_bracket, exact_pairable, log_intersection_volume, ConvexBody, DilationBracket,
};
use crate::error::{Error, Result};
use crate::integrate::{
    adaptive_log, locate_vmax, log_integrand, log_tail_integral, mc_region_measure, Estimate,
    Method, ProposalSpec,
};
use crate::phi::PhiFunction;
use crate::rng::CounterRng;
use crate::scalar::{log_add_exp, log_sum_exp, Scalar};

/// e^{-phi(||x||_L)} dx / Z on R^n.
#[derive(Debug)]
pub struct NormMeasure<T: Scalar> {
    pub phi: PhiFunction<T>,
    pub body: ConvexBody<T>,
    radial_total: OnceLock<Result<Estimate<T>>>,
}

impl<T: Scalar> NormMeasure<T> {
    pub fn new(phi: PhiFunction<T>, body: ConvexBody<T>) -> Result<Self> {
        if phi.tail_divergent() {
            return Err(Error::Divergent(
                "phi has a flat tail: e^{-phi(||x||)} is not integrable".into(),
            ));
        }
        Ok(NormMeasure { phi, body, radial_total: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// ln of the radial normalizer integral int_0^inf v^{n-1} e^{-phi(v)} dv.
    pub fn log_radial_total(&self) -> Result<Estimate<T>> {
        self.radial_total
            .get_or_init(|| {
                log_tail_integral(&self.phi, self.dim() as u32 - 1, T::zero(), T::zero(), T::of(1e-11))
            })
            .clone()
    }

    /// ln Z = ln n + ln |L| + ln of the radial integral. The body volume is
    /// exact except for polytopes above dimension 3, where a fixed-seed
    /// Monte Carlo volume feeds the estimate (and its error bar).
    pub fn log_z(&self) -> Result<Estimate<T>> {
        let radial = self.log_radial_total()?;
        let n = self.dim();
        let (log_vol, vol_err) = match self.body.log_volume() {
            Ok(v) => (v, T::zero()),
            Err(Error::Unsupported(_)) => {
                let est = self.body.volume_mc(2_000_000, 0x5a);
                (est.log_value, est.abs_log_error)
            }
            Err(e) => return Err(e),
        };
        Ok(Estimate {
            log_value: T::of_usize(n).ln() + log_vol + radial.log_value,
            abs_log_error: radial.abs_log_error + vol_err,
            method: radial.method,
            count: radial.count,
            degenerate: false,
        })
    }

    /// ln mu(cL): the dilates of L itself reduce to one radial integral.
    pub fn log_mass_radial(&self, c: T) -> Result<Estimate<T>> {
        if !(c >= T::zero()) {
            return Err(Error::InvalidBody(format!("dilation factor must be >= 0, got {c}")));
        }
        let total = self.log_radial_total()?;
        if c == T::zero() {
            return Ok(Estimate {
                log_value: T::neg_infinity(),
                abs_log_error: T::zero(),
                method: Method::Quadrature,
                count: 0,
                degenerate: false,
            });
        }
        let part = crate::integrate::log_partial_integral(
            &self.phi,
            self.dim() as u32 - 1,
            T::zero(),
            T::zero(),
            c,
            T::of(1e-11),
        )?;
        Ok(Estimate {
            log_value: part.log_value - total.log_value,
            abs_log_error: part.abs_log_error + total.abs_log_error,
            method: Method::Quadrature,
            count: part.count + total.count,
            degenerate: false,
        })
    }

    /// ln mu((cL)^c), the complement of a dilate of L, exact radial.
    pub fn log_tail_radial(&self, c: T) -> Result<Estimate<T>> {
        if !(c >= T::zero()) {
            return Err(Error::InvalidBody(format!("dilation factor must be >= 0, got {c}")));
        }
        let total = self.log_radial_total()?;
        let tail = log_tail_integral(&self.phi, self.dim() as u32 - 1, T::zero(), c, T::of(1e-11))?;
        Ok(Estimate {
            log_value: tail.log_value - total.log_value,
            abs_log_error: tail.abs_log_error + total.abs_log_error,
            method: Method::Quadrature,
            count: tail.count + total.count,
            degenerate: false,
        })
    }

    /// ln mu(tK) for a general body K: radial when K is an exact dilate of
    /// L, else the layered representation when every slice volume
    /// |tK cap sL| has a closed form, else direct sampling Monte Carlo.
    pub fn log_mass(&self, k: &ConvexBody<T>, t: T, budget: u64, seed: u64) -> Result<Estimate<T>> {
        if k.dim() != self.dim() {
            return Err(Error::InvalidBody("body dimension mismatch with the measure".into()));
        }
        if !(t >= T::zero()) {
            return Err(Error::InvalidBody(format!("dilation must be >= 0, got {t}")));
        }
        if t == T::zero() {
            return Ok(Estimate::exact(T::neg_infinity()));
        }
        let bracket = dilation_bracket(k, &self.body)?;
        let certified_ratio = bracket.inner_cert.exact
            && bracket.outer_cert.exact
            && (bracket.r_out - bracket.r_in).abs() <= T::of(1e-12) * bracket.r_out;
        if certified_ratio {
            return self.log_mass_radial(t * bracket.r_in);
        }
        if exact_pairable(k, &self.body) {
            return self.log_mass_layered(k, t, &bracket);
        }
        self.log_mass_mc(k, t, budget, seed)
    }

    /// Layered representation: mu(tK) = (1/Z) [ int_{u0}^{u1} e^{-u}
    /// |tK cap phi^{-1}(u) L| du + |tK| e^{-u1} ] with u1 = phi(t r_out),
    /// beyond which tK sits inside the sublevel body. Public so the path
    /// can be exercised directly against the radial shortcut.
    pub fn log_mass_layered(
        &self,
        k: &ConvexBody<T>,
        t: T,
        bracket: &DilationBracket<T>,
    ) -> Result<Estimate<T>> {
        let tk = ConvexBody::dilate(k.clone(), t)?.absorb_dilation();
        let u0 = self.phi.eval(T::zero());
        let u1 = self.phi.eval(t * bracket.r_out);
        let log_vol_tk = tk.log_volume()?;
        let g = |u: T| -> T {
            let s = self.phi.inverse(u);
            if s <= T::zero() {
                return T::neg_infinity();
            }
            let scaled_l = ConvexBody::dilate(self.body.clone(), s)
                .expect("positive scale")
                .absorb_dilation();
            match log_intersection_volume(&tk, &scaled_l) {
                Some(v) => v - u,
                None => T::neg_infinity(),
            }
        };
        let mut edges = vec![u0, u1];
        let inner_touch = self.phi.eval(t * bracket.r_in);
        if inner_touch > u0 && inner_touch < u1 {
            edges.push(inner_touch);
        }
        // A few interior seeds so adaptivity has contrast to work with.
        for i in 1..16 {
            let u = u0 + (u1 - u0) * T::of_usize(i) / T::of(16.0);
            edges.push(u);
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        let (quad_log, quad_err, count) = adaptive_log(&g, &edges, T::of(1e-10), 1200);
        let closed_tail = log_vol_tk - u1;
        let numer = log_add_exp(quad_log, closed_tail);
        let z = self.log_z()?;
        let err = if numer == T::neg_infinity() {
            T::zero()
        } else {
            (quad_err - numer).exp() + z.abs_log_error
        };
        Ok(Estimate {
            log_value: numer - z.log_value,
            abs_log_error: err,
            method: Method::Quadrature,
            count: count + z.count,
            degenerate: false,
        })
    }

    /// Direct-sampling Monte Carlo: fraction of mu-samples inside tK.
    pub fn log_mass_mc(&self, k: &ConvexBody<T>, t: T, budget: u64, seed: u64) -> Result<Estimate<T>> {
        let sampler = self.sampler(T::zero())?;
        let body = &self.body;
        let proposal = ProposalSpec {
            sample: Box::new(move |rng: &mut CounterRng| sampler.draw(body, rng)),
            log_pdf: Box::new(|_: &[T]| T::zero()),
        };
        Ok(mc_region_measure(
            |_: &[T]| T::zero(),
            |x: &[T]| k.norm(x) <= t,
            &proposal,
            budget,
            seed,
            0x6d617373, // "mass"
        ))
    }

    /// Sandwich for ln mu((tK)^c):
    ///   lower = radial tail at t r_out  (tK inside t r_out L),
    ///   upper = radial tail at t r_in   (t r_in L inside tK),
    ///   point = self-normalized importance sampling from the radial law
    ///           restricted to ||x||_L >= t r_in, never above upper.
    /// If sampling noise drags the point below the certified lower bound
    /// it is clamped there and flagged.
    pub fn tail_log_bracket(
        &self,
        k: &ConvexBody<T>,
        t: T,
        budget: u64,
        seed: u64,
    ) -> Result<TailBracket<T>> {
        if !(t > T::zero()) {
            return Err(Error::InvalidBody(format!("tail bracket needs t > 0, got {t}")));
        }
        let bracket = dilation_bracket(k, &self.body)?;
        let v0 = t * bracket.r_in;
        let v1 = t * bracket.r_out;
        let lower = self.log_tail_radial(v1)?;
        let upper = self.log_tail_radial(v0)?;
        if (bracket.r_out - bracket.r_in).abs() <= T::of(1e-12) * bracket.r_out {
            // Exact dilate: the sandwich is tight, no sampling needed.
            return Ok(TailBracket { lower, point: upper, upper, clamped: false });
        }

        let sampler = self.sampler(v0)?;
        let n_chunks = budget.div_ceil(SAMPLE_CHUNK);
        let stats: Vec<(T, T, T)> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = CounterRng::for_chunk(seed, 0x7461696c, c); // "tail"
                let take = if (c + 1) * SAMPLE_CHUNK <= budget {
                    SAMPLE_CHUNK
                } else {
                    budget - c * SAMPLE_CHUNK
                };
                let mut w_all: Vec<T> = Vec::with_capacity(take as usize);
                let mut w_hit: Vec<T> = Vec::new();
                for _ in 0..take {
                    let (x, log_w) = sampler.draw_weighted(&self.body, &mut rng);
                    w_all.push(log_w);
                    if k.norm(&x) > t {
                        w_hit.push(log_w);
                    }
                }
                let lse_all = log_sum_exp(&w_all);
                let lse_hit = log_sum_exp(&w_hit);
                for v in w_all.iter_mut() {
                    *v = *v * T::of(2.0);
                }
                (lse_all, lse_hit, log_sum_exp(&w_all))
            })
            .collect();
        let mut lse_all = T::neg_infinity();
        let mut lse_hit = T::neg_infinity();
        let mut lse_all2 = T::neg_infinity();
        for (a, h, a2) in stats {
            lse_all = log_add_exp(lse_all, a);
            lse_hit = log_add_exp(lse_hit, h);
            lse_all2 = log_add_exp(lse_all2, a2);
        }

        let mut clamped = false;
        let mut point = if lse_hit == T::neg_infinity() {
            clamped = true;
            Estimate {
                log_value: lower.log_value,
                abs_log_error: T::infinity(),
                method: Method::MonteCarlo,
                count: budget,
                degenerate: true,
            }
        } else {
            // Ratio of weighted sums never exceeds 1, so point <= upper.
            let ratio = lse_hit - lse_all;
            let ln_n = T::of(budget as f64).ln();
            let rel_all = relative_stderr(lse_all, lse_all2, ln_n);
            // Hit-count noise: binomial-style bound from the hit fraction.
            let frac = ratio.exp();
            let rel_hit = if frac > T::zero() {
                ((T::one() - frac) / (frac * T::of(budget as f64))).sqrt()
            } else {
                T::infinity()
            };
            Estimate {
                log_value: upper.log_value + ratio,
                abs_log_error: upper.abs_log_error + rel_all + rel_hit,
                method: Method::MonteCarlo,
                count: budget,
                degenerate: false,
            }
        };
        if point.log_value < lower.log_value {
            let deficit = lower.log_value - point.log_value;
            point.log_value = lower.log_value;
            point.abs_log_error = point.abs_log_error.max(deficit) + lower.abs_log_error;
            clamped = true;
        }
        Ok(TailBracket { lower, point, upper, clamped })
    }

    /// Deterministic batch of samples from mu (radius by inverse CDF on a
    /// quadrature grid, direction by the cone measure of L).
    pub fn sample_batch(&self, count: u64, seed: u64) -> Result<Vec<Vec<T>>> {
        let sampler = self.sampler(T::zero())?;
        let n_chunks = count.div_ceil(SAMPLE_CHUNK);
        let chunks: Vec<Vec<Vec<T>>> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = CounterRng::for_chunk(seed, 0x73616d70, c); // "samp"
                let take = if (c + 1) * SAMPLE_CHUNK <= count {
                    SAMPLE_CHUNK
                } else {
                    count - c * SAMPLE_CHUNK
                };
                (0..take).map(|_| sampler.draw(&self.body, &mut rng)).collect()
            })
            .collect();
        Ok(chunks.into_iter().flatten().collect())
    }

    /// Radial inverse-CDF sampler for the law v^{n-1} e^{-phi(v)} on
    /// [v0, inf), gridded on the quadrature landmarks.
    fn sampler(&self, v0: T) -> Result<RadialSampler<'_, T>> {
        RadialSampler::build(&self.phi, self.dim() as u32 - 1, v0)
    }

    /// Exact complement mass of the slab {|<x, xi>| <= c} when the profile
    /// is purely quadratic and L is a Euclidean ball: the measure is then
    /// an isotropic Gaussian with scale sigma = scale * rho, so the answer
    /// is 2 Qbar(c / sigma), evaluated with this library's own quadrature.
    pub fn slab_complement_log(&self, c: T) -> Result<T> {
        let sigma = self.gaussian_sigma()?;
        if !(c >= T::zero()) {
            return Err(Error::InvalidBody(format!("slab half-width must be >= 0, got {c}")));
        }
        Ok(T::of(2.0).ln() + log_gaussian_upper_tail(c / sigma)?)
    }

    /// The isotropic Gaussian scale of the measure, when it is one.
    pub fn gaussian_sigma(&self) -> Result<T> {
        let rho = match self.body.absorb_dilation() {
            ConvexBody::EuclideanBall { radius, .. } => radius,
            _ => {
                return Err(Error::Unsupported(
                    "exact slab masses need L to be a Euclidean ball".into(),
                ))
            }
        };
        let scale = match &self.phi {
            PhiFunction::Power { p, scale, .. } if *p == T::of(2.0) => *scale,
            PhiFunction::GaussianNormalized { .. } => T::one(),
            _ => {
                return Err(Error::Unsupported(
                    "exact slab masses need a purely quadratic profile".into(),
                ))
            }
        };
        Ok(scale * rho)
    }
}

/// ln Qbar(z) = ln P(N(0,1) > z) for z >= 0, via the library quadrature:
/// Qbar(z) = e^{-z^2/2} ... computed as int_z^inf e^{-v^2/2} / sqrt(2 pi).
pub fn log_gaussian_upper_tail<T: Scalar>(z: T) -> Result<T> {
    let phi = PhiFunction::power(T::of(2.0), T::one(), T::zero())?;
    let est = log_tail_integral(&phi, 0, T::zero(), z.max(T::zero()), T::of(1e-12))?;
    Ok(est.log_value - (T::of(2.0) * T::PI()).ln() / T::of(2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailBracket<T> {
    pub lower: Estimate<T>,
    pub point: Estimate<T>,
    pub upper: Estimate<T>,
    /// True when the sampled point collapsed onto a bound (no hits, or
    /// noise below the certified lower bound).
    pub clamped: bool,
}

const SAMPLE_CHUNK: u64 = 4096;

/// Piecewise-exponential inverse-CDF representation of the radial law
/// v^{n-1} e^{-phi(v)} on [v0, t_end], gridded on quadrature landmarks.
struct RadialSampler<'a, T: Scalar> {
    phi: &'a PhiFunction<T>,
    xs: Vec<T>,
    g: Vec<T>,
    /// Per-cell log masses and their running logsumexp prefix.
    cell_log_mass: Vec<T>,
    prefix: Vec<T>,
    log_total: T,
    n_pow: u32,
}

impl<'a, T: Scalar> RadialSampler<'a, T> {
    fn build(phi: &'a PhiFunction<T>, n_pow: u32, v0: T) -> Result<Self> {
        if phi.tail_divergent() {
            return Err(Error::Divergent("radial law is not normalizable".into()));
        }
        let g = log_integrand(phi, n_pow, T::zero());
        let vmax = locate_vmax(phi, n_pow, T::zero(), v0).max(v0);
        let m_peak = g(vmax);
        if m_peak == T::neg_infinity() {
            return Err(Error::Degenerate("radial density vanishes beyond the cutoff".into()));
        }
        // Truncation where the integrand has dropped 80 e-folds below the
        // peak and phi is already increasing.
        let mut t_end = vmax + T::one();
        let mut guard = 0;
        while !(g(t_end) <= m_peak - T::of(80.0) && phi.dphi_left(t_end) > T::zero()) {
            t_end = vmax + (t_end - vmax) * T::of(2.0);
            guard += 1;
            if guard > 400 {
                return Err(Error::Divergent("radial law tail refuses to decay".into()));
            }
        }
        let landmarks = crate::integrate::landmark_edges(phi, v0, t_end, vmax);
        // Fill cells between landmarks proportionally to width.
        let total_w = t_end - v0;
        let mut xs: Vec<T> = Vec::with_capacity(4500);
        for w in landmarks.windows(2) {
            let width = w[1] - w[0];
            let cells = ((width / total_w * T::of(4096.0)).to_f64_lossy() as usize).clamp(16, 4096);
            for i in 0..cells {
                xs.push(w[0] + width * T::of_usize(i) / T::of_usize(cells));
            }
        }
        xs.push(t_end);
        xs.dedup();
        let gv: Vec<T> = xs.iter().map(|&x| g(x)).collect();
        let mut cell_log_mass = Vec::with_capacity(xs.len() - 1);
        for i in 0..xs.len() - 1 {
            cell_log_mass.push(cell_mass(gv[i], gv[i + 1], xs[i + 1] - xs[i]));
        }
        let mut prefix = Vec::with_capacity(cell_log_mass.len());
        let mut acc = T::neg_infinity();
        for &m in &cell_log_mass {
            acc = log_add_exp(acc, m);
            prefix.push(acc);
        }
        let log_total = acc;
        if log_total == T::neg_infinity() {
            return Err(Error::Degenerate("radial grid mass is zero".into()));
        }
        Ok(RadialSampler { phi, xs, g: gv, cell_log_mass, prefix, log_total, n_pow })
    }

    /// One radius draw by inverse CDF (cellwise exponential interpolation).
    fn radius(&self, rng: &mut CounterRng) -> T {
        let u = T::of(rng.next_f64_open());
        let target = self.log_total + u.ln();
        let mut lo = 0usize;
        let mut hi = self.prefix.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.prefix[mid] >= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let i = lo;
        let before = if i == 0 { T::neg_infinity() } else { self.prefix[i - 1] };
        // Mass that must land inside cell i, as a fraction of its mass.
        let log_into = if before == T::neg_infinity() {
            target
        } else {
            target + (T::one() - (before - target).exp()).max(T::zero()).ln()
        };
        let p = (log_into - self.cell_log_mass[i]).exp().min(T::one()).max(T::zero());
        let lam = self.g[i + 1] - self.g[i];
        let w = self.xs[i + 1] - self.xs[i];
        // Invert the exponential-interpolant CDF within the cell.
        let f = if lam.abs() < T::of(1e-9) { p } else { (p * lam.exp_m1()).ln_1p() / lam };
        self.xs[i] + w * f.max(T::zero()).min(T::one())
    }

    /// Interpolated log density of the proposal at radius v (normalized on
    /// the grid).
    fn log_pdf(&self, v: T) -> T {
        let mut lo = 0usize;
        let mut hi = self.xs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = self.xs[lo + 1] - self.xs[lo];
        let f = (v - self.xs[lo]) / w;
        let ghat = self.g[lo] + (self.g[lo + 1] - self.g[lo]) * f;
        ghat - self.log_total
    }

    /// Full sample x = v theta with theta on the boundary of L by the cone
    /// measure (normalized uniform draw).
    fn draw(&self, l: &ConvexBody<T>, rng: &mut CounterRng) -> Vec<T> {
        let v = self.radius(rng);
        let theta = cone_direction(l, rng);
        theta.iter().map(|&d| d * v).collect()
    }

    /// Sample plus the log importance weight against the exact radial law
    /// (up to a normalization shared by all draws, which cancels in
    /// self-normalized ratios).
    fn draw_weighted(&self, l: &ConvexBody<T>, rng: &mut CounterRng) -> (Vec<T>, T) {
        let v = self.radius(rng);
        let log_q = self.log_pdf(v);
        let g_exact = log_integrand(self.phi, self.n_pow, T::zero())(v);
        let theta = cone_direction(l, rng);
        let x: Vec<T> = theta.iter().map(|&d| d * v).collect();
        (x, g_exact - log_q)
    }
}

fn cone_direction<T: Scalar>(l: &ConvexBody<T>, rng: &mut CounterRng) -> Vec<T> {
    for _ in 0..64 {
        let y = l.sample_uniform(rng).expect("sampling validated at build");
        let ny = l.norm(&y);
        if ny > T::zero() {
            return y.iter().map(|&v| v / ny).collect();
        }
    }
    // Probability zero in exact arithmetic; fall back to an axis point.
    let n = l.dim();
    let mut e = vec![T::zero(); n];
    e[0] = T::one();
    let nn = l.norm(&e);
    e.iter().map(|&v| v / nn).collect()
}

/// ln of the integral of the exponential interpolant between (0, g0) and
/// (w, g1). Cells with an underflowed endpoint get zero proposal mass:
/// their true relative mass is below f64 resolution (they sit past the
/// e^{-745} cliff or a saturated profile segment).
fn cell_mass<T: Scalar>(g0: T, g1: T, w: T) -> T {
    if w <= T::zero() || !g0.is_finite() || !g1.is_finite() {
        return T::neg_infinity();
    }
    let lam = g1 - g0;
    if lam.abs() < T::of(1e-9) {
        g0 + w.ln() + lam / T::of(2.0)
    } else if lam > T::zero() {
        // ln((e^lam - 1)/lam) = lam + ln(1 - e^{-lam}) - ln lam
        g0 + w.ln() + lam + (T::one() - (-lam).exp()).ln() - lam.ln()
    } else {
        g0 + w.ln() + (T::one() - lam.exp()).ln() - (-lam).ln()
    }
}

fn relative_stderr<T: Scalar>(lse1: T, lse2: T, ln_n: T) -> T {
    let log_mean = lse1 - ln_n;
    let ln_e2 = lse2 - ln_n;
    let d = T::of(2.0) * log_mean - ln_e2;
    if d >= T::zero() {
        return T::zero();
    }
    let ln_var = ln_e2 + (T::one() - d.exp()).max(T::zero()).ln();
    if ln_var == T::neg_infinity() {
        return T::zero();
    }
    ((ln_var - ln_n) / T::of(2.0) - log_mean).exp()
}

/// Normalized Lebesgue measure on a fixed body Omega.
#[derive(Debug, Clone)]
pub struct UniformMeasure<T: Scalar> {
    pub omega: ConvexBody<T>,
}

impl<T: Scalar> UniformMeasure<T> {
    pub fn new(omega: ConvexBody<T>) -> Self {
        UniformMeasure { omega }
    }

    /// ln of |Omega cap tK| / |Omega|.
    pub fn log_mass(&self, k: &ConvexBody<T>, t: T, budget: u64, seed: u64) -> Result<Estimate<T>> {
        if k.dim() != self.omega.dim() {
            return Err(Error::InvalidBody("body dimension mismatch with the measure".into()));
        }
        if !(t >= T::zero()) {
            return Err(Error::InvalidBody(format!("dilation must be >= 0, got {t}")));
        }
        if t == T::zero() {
            return Ok(Estimate::exact(T::neg_infinity()));
        }
        let tk = ConvexBody::dilate(k.clone(), t)?;
        if let Some(log_inter) = log_intersection_volume(&self.omega, &tk) {
            let log_omega = self.omega.log_volume()?;
            return Ok(Estimate::exact(log_inter - log_omega));
        }
        let omega = self.omega.clone();
        let proposal = ProposalSpec {
            sample: Box::new(move |rng: &mut CounterRng| {
                omega.sample_uniform(rng).expect("uniform sampling")
            }),
            log_pdf: Box::new(|_: &[T]| T::zero()),
        };
        Ok(mc_region_measure(
            |_: &[T]| T::zero(),
            |x: &[T]| k.norm(x) <= t,
            &proposal,
            budget,
            seed,
            0x756e69, // "uni"
        ))
    }
}
