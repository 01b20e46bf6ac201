//! Hyperplane-section measures mu_{n-1}(rK cap xi-perp), the section
//! dominance checker and dilation comparison experiment built on them, the
//! exact disc-versus-rectangle demo, and the volume-majorization fact
//! checker.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{exact_pairable, inradius, log_intersection_volume, ConvexBody};
use crate::error::{Error, Result};
use crate::geom::{
    self, circle_box_area, direction_net, dot, enumerate_vertices, norm2, normalize,
    orthonormal_basis_perp, Halfspace,
};
use crate::integrate::{
    adaptive_log, log_partial_integral, mc_region_measure, Estimate, Method, ProposalSpec,
};
use crate::measure::{NormMeasure, UniformMeasure};
use crate::rng::CounterRng;
use crate::scalar::Scalar;

/// ln of the section measure mu_{n-1}(rK cap xi-perp), the integral of the
/// density of mu over the central hyperplane slice of the dilate rK.
///
/// Closed radial form when K and L are both Euclidean balls; exact 1-D
/// quadrature along the chord in dimension 2 and over the slice polygon
/// angles for polyhedral K in dimension 3; Monte Carlo on the slice plane
/// otherwise.
pub fn section_measure<T: Scalar>(
    mu: &NormMeasure<T>,
    k: &ConvexBody<T>,
    xi: &[T],
    r: T,
    budget: u64,
    seed: u64,
) -> Result<Estimate<T>> {
    let n = mu.dim();
    if n < 2 {
        return Err(Error::Unsupported("section measures need dimension >= 2".into()));
    }
    if k.dim() != n {
        return Err(Error::InvalidBody("body dimension mismatch with the measure".into()));
    }
    if xi.len() != n || !(norm2(xi) > T::zero()) {
        return Err(Error::InvalidBody("section direction must be a nonzero n-vector".into()));
    }
    if !(r >= T::zero()) {
        return Err(Error::InvalidBody(format!("section dilation must be >= 0, got {r}")));
    }
    if r == T::zero() {
        return Ok(Estimate::exact(T::neg_infinity()));
    }
    let xi = normalize(xi);
    let z = mu.log_z()?;

    let kb = k.absorb_dilation();
    let lb = mu.body.absorb_dilation();
    if let (
        ConvexBody::EuclideanBall { radius: rho_k, .. },
        ConvexBody::EuclideanBall { radius: rho_l, .. },
    ) = (&kb, &lb)
    {
        // Rotation invariant: polar coordinates in the slice plane give
        // |S^{n-2}| rho_L^{n-1} int_0^{r rho_K / rho_L} e^{-phi} w^{n-2} dw.
        let part = log_partial_integral(
            &mu.phi,
            n as u32 - 2,
            T::zero(),
            T::zero(),
            r * *rho_k / *rho_l,
            T::of(1e-11),
        )?;
        return Ok(Estimate {
            log_value: geom::unit_sphere_area::<T>(n - 1).ln()
                + T::of_usize(n - 1) * rho_l.ln()
                + part.log_value
                - z.log_value,
            abs_log_error: part.abs_log_error + z.abs_log_error,
            method: Method::Quadrature,
            count: part.count + z.count,
            degenerate: false,
        });
    }

    if n == 2 {
        // The slice is the chord {s v : |s| <= r / ||v||_K} with v the unit
        // vector perpendicular to xi; along it ||s v||_L = |s| ||v||_L.
        let v = vec![-xi[1], xi[0]];
        let nu = mu.body.norm(&v);
        let half = r / k.norm(&v);
        let part =
            log_partial_integral(&mu.phi, 0, T::zero(), T::zero(), half * nu, T::of(1e-11))?;
        return Ok(Estimate {
            log_value: T::of(2.0).ln() - nu.ln() + part.log_value - z.log_value,
            abs_log_error: part.abs_log_error + z.abs_log_error,
            method: Method::Quadrature,
            count: part.count + z.count,
            degenerate: false,
        });
    }

    if n == 3 {
        if let Some(hs) = k.as_halfspaces() {
            return section_polygon_quadrature(mu, &hs, &xi, r, &z);
        }
    }
    section_mc(mu, k, &xi, r, budget, seed, &z)
}

/// Angular-radial quadrature over the slice polygon of a 3-dimensional
/// polyhedral body: for each plane angle theta the ray hits the polygon
/// boundary at R(theta), and along the ray ||s u(theta)||_L = s nu(theta),
/// so the radial factor integrates to a 1-D partial integral. The outer
/// integral runs over [0, pi) (central symmetry) with panel edges at the
/// polygon vertex angles.
fn section_polygon_quadrature<T: Scalar>(
    mu: &NormMeasure<T>,
    hs: &[Halfspace<T>],
    xi: &[T],
    r: T,
    z: &Estimate<T>,
) -> Result<Estimate<T>> {
    let basis = orthonormal_basis_perp(xi);
    let planar: Vec<Halfspace<T>> = hs
        .iter()
        .map(|h| Halfspace {
            normal: vec![dot(&h.normal, &basis[0]), dot(&h.normal, &basis[1])],
            offset: h.offset * r,
        })
        .collect();
    let verts = enumerate_vertices(&planar)?;
    if verts.is_empty() {
        return Err(Error::Degenerate("slice polygon is empty".into()));
    }
    let mut edges: Vec<T> = verts
        .iter()
        .map(|v| {
            let a = v[1].atan2(v[0]);
            if a < T::zero() {
                a + T::PI()
            } else {
                a
            }
        })
        .collect();
    edges.push(T::zero());
    edges.push(T::PI());
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < T::of(1e-13));

    let g = |theta: T| -> T {
        let u = [theta.cos(), theta.sin()];
        let mut reach = T::infinity();
        for h in &planar {
            let d = h.normal[0] * u[0] + h.normal[1] * u[1];
            if d > T::zero() {
                reach = reach.min(h.offset / d);
            }
        }
        if !(reach > T::zero()) || !reach.is_finite() {
            return T::neg_infinity();
        }
        let dir: Vec<T> = basis[0].iter().zip(basis[1].iter()).map(|(&a, &b)| a * u[0] + b * u[1]).collect();
        let nu = mu.body.norm(&dir);
        let part = log_partial_integral(&mu.phi, 1, T::zero(), T::zero(), reach * nu, T::of(1e-11));
        match part {
            Ok(p) => p.log_value - T::of(2.0) * nu.ln(),
            Err(_) => T::neg_infinity(),
        }
    };
    let (log_val, log_err, count) = adaptive_log(&g, &edges, T::of(1e-10), 600);
    let err = if log_val == T::neg_infinity() {
        T::zero()
    } else {
        (log_err - log_val).exp() + z.abs_log_error
    };
    Ok(Estimate {
        log_value: T::of(2.0).ln() + log_val - z.log_value,
        abs_log_error: err,
        method: Method::Quadrature,
        count: count + z.count,
        degenerate: false,
    })
}

/// Monte Carlo section measure: uniform proposal on the slice-plane
/// bounding box, weighted by the density.
fn section_mc<T: Scalar>(
    mu: &NormMeasure<T>,
    k: &ConvexBody<T>,
    xi: &[T],
    r: T,
    budget: u64,
    seed: u64,
    z: &Estimate<T>,
) -> Result<Estimate<T>> {
    let n = mu.dim();
    let basis = orthonormal_basis_perp(xi);
    let half: Vec<T> = basis.iter().map(|b| r * k.support(b)).collect();
    let ln_box: T = half.iter().map(|h| (T::of(2.0) * *h).ln()).sum();
    let basis_c = basis.clone();
    let embed = move |coords: &[T]| -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (c, b) in coords.iter().zip(basis_c.iter()) {
            for (xj, bj) in x.iter_mut().zip(b.iter()) {
                *xj += *c * *bj;
            }
        }
        x
    };
    let half_c = half.clone();
    let proposal = ProposalSpec {
        sample: Box::new(move |rng: &mut CounterRng| {
            half_c
                .iter()
                .map(|&h| (T::of(2.0) * T::of(rng.next_f64()) - T::one()) * h)
                .collect()
        }),
        log_pdf: Box::new(move |_: &[T]| -ln_box),
    };
    let embed2 = embed.clone();
    let mut est = mc_region_measure(
        |coords: &[T]| -mu.phi.eval(mu.body.norm(&embed(coords))),
        |coords: &[T]| k.norm(&embed2(coords)) <= r,
        &proposal,
        budget,
        seed,
        0x78736563, // "xsec"
    );
    est.log_value = est.log_value - z.log_value;
    est.abs_log_error = est.abs_log_error + z.abs_log_error;
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    /// Certified section_K <= section_L.
    Holds,
    /// Certified section_K > section_L.
    Fails,
    /// Error intervals overlap.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionPair<T> {
    pub r: T,
    /// Section direction; empty for dilate-mass rows of the uniform
    /// variant, which have no direction.
    pub xi: Vec<T>,
    pub k: Estimate<T>,
    pub l: Estimate<T>,
    pub status: PairStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DominanceVerdict<T> {
    /// Every grid pair certified section_K <= section_L.
    Holds,
    /// At least one certified strict violation; the witnessing pair.
    FailsAt { r: T, xi: Vec<T> },
    /// No violation certified, but some pairs unresolved.
    Inconclusive { unresolved: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassConclusion {
    KAtMostL,
    KExceedsL,
    Inconclusive,
}

/// Certified witness that K is not contained in L: a direction where the
/// support of K strictly exceeds the support of L.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonInclusion<T> {
    pub direction: Vec<T>,
    pub h_k: T,
    pub h_l: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DominanceReport<T> {
    pub rows: Vec<SectionPair<T>>,
    pub hypothesis: DominanceVerdict<T>,
    pub mass_k: Option<Estimate<T>>,
    pub mass_l: Option<Estimate<T>>,
    pub conclusion: Option<MassConclusion>,
    /// Hypothesis certified on the whole grid while mu(K) > mu(L) (or,
    /// for the uniform dilate variant, K not contained in L): the supplied
    /// bodies certify a counterexample instance.
    pub counterexample_certified: bool,
    pub non_inclusion: Option<NonInclusion<T>>,
}

/// The non-strict comparison cannot be certified from overlapping error
/// intervals, with one exception: when the two bodies are the same body
/// (after absorbing dilations) the quantities compared are the same
/// integral, so "<=" holds with equality as an identity, independent of
/// quadrature error.
fn same_body<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> bool {
    a.absorb_dilation() == b.absorb_dilation()
}

/// Rounding slack for certifying a strict violation: closed-form "exact"
/// values still round their last bits, and the same quantity reached
/// through two different formulas (say a disc area as pi r^2 versus a
/// product of edge lengths) can land an ulp apart. A Fails verdict must
/// clear this guard; the non-strict Holds side needs none, since an
/// ulp-level underestimate of a true equality is still a true "<=".
fn rounding_guard<T: Scalar>(a: T, b: T) -> T {
    T::of(8.0) * T::epsilon() * T::one().max(a.abs()).max(b.abs())
}

fn compare_pair<T: Scalar>(k: &Estimate<T>, l: &Estimate<T>) -> PairStatus {
    let k_hi = k.log_value + k.abs_log_error;
    let k_lo = k.log_value - k.abs_log_error;
    let l_hi = l.log_value + l.abs_log_error;
    let l_lo = l.log_value - l.abs_log_error;
    if k_hi <= l_lo {
        PairStatus::Holds
    } else if k_lo > l_hi + rounding_guard(k.log_value, l.log_value) {
        PairStatus::Fails
    } else {
        PairStatus::Inconclusive
    }
}

fn verdict_from_rows<T: Scalar>(rows: &[SectionPair<T>]) -> DominanceVerdict<T> {
    if let Some(bad) = rows.iter().find(|p| p.status == PairStatus::Fails) {
        return DominanceVerdict::FailsAt { r: bad.r, xi: bad.xi.clone() };
    }
    let unresolved = rows.iter().filter(|p| p.status == PairStatus::Inconclusive).count();
    if unresolved > 0 {
        DominanceVerdict::Inconclusive { unresolved }
    } else {
        DominanceVerdict::Holds
    }
}

/// Check the section dominance hypothesis
/// mu_{n-1}(rK cap xi-perp) <= mu_{n-1}(rL cap xi-perp) over a grid of
/// dilations and a deterministic direction net. Verdicts come only from
/// non-overlapping certified intervals; unresolved pairs are listed, never
/// guessed.
pub fn dominance_check<T: Scalar>(
    mu: &NormMeasure<T>,
    k: &ConvexBody<T>,
    l: &ConvexBody<T>,
    r_grid: &[T],
    net_size: usize,
    budget: u64,
    seed: u64,
) -> Result<DominanceReport<T>> {
    if r_grid.is_empty() || net_size == 0 {
        return Err(Error::InvalidConfig("dominance check needs a nonempty r grid and net".into()));
    }
    let identical = same_body(k, l);
    let net = direction_net::<T>(mu.dim(), net_size);
    let pairs: Vec<(T, Vec<T>)> = r_grid
        .iter()
        .flat_map(|&r| net.iter().map(move |xi| (r, xi.clone())))
        .collect();
    let rows: Vec<SectionPair<T>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (r, xi))| -> Result<SectionPair<T>> {
            let s = seed.wrapping_add(i as u64);
            let sk = section_measure(mu, k, xi, *r, budget, s)?;
            let sl = section_measure(mu, l, xi, *r, budget, s.wrapping_add(0x9e37))?;
            let status = if identical { PairStatus::Holds } else { compare_pair(&sk, &sl) };
            Ok(SectionPair { r: *r, xi: xi.clone(), k: sk, l: sl, status })
        })
        .collect::<Result<_>>()?;
    let hypothesis = verdict_from_rows(&rows);
    Ok(DominanceReport {
        rows,
        hypothesis,
        mass_k: None,
        mass_l: None,
        conclusion: None,
        counterexample_certified: false,
        non_inclusion: None,
    })
}

/// Full dilation comparison experiment: the section dominance hypothesis
/// plus the conclusion comparison mu(K) vs mu(L). A run where the
/// hypothesis holds everywhere while mu(K) > mu(L) certifies the supplied
/// bodies as a counterexample instance.
pub fn bp_experiment<T: Scalar>(
    mu: &NormMeasure<T>,
    k: &ConvexBody<T>,
    l: &ConvexBody<T>,
    r_grid: &[T],
    net_size: usize,
    budget: u64,
    seed: u64,
) -> Result<DominanceReport<T>> {
    let mut report = dominance_check(mu, k, l, r_grid, net_size, budget, seed)?;
    let mk = mu.log_mass(k, T::one(), budget, seed.wrapping_add(0x6b))?;
    let ml = mu.log_mass(l, T::one(), budget, seed.wrapping_add(0x6c))?;
    let conclusion = if same_body(k, l) {
        MassConclusion::KAtMostL
    } else {
        match compare_pair(&mk, &ml) {
            PairStatus::Holds => MassConclusion::KAtMostL,
            PairStatus::Fails => MassConclusion::KExceedsL,
            PairStatus::Inconclusive => MassConclusion::Inconclusive,
        }
    };
    report.counterexample_certified = matches!(report.hypothesis, DominanceVerdict::Holds)
        && conclusion == MassConclusion::KExceedsL;
    report.mass_k = Some(mk);
    report.mass_l = Some(ml);
    report.conclusion = Some(conclusion);
    Ok(report)
}

/// Dilate-mass variant of the experiment for a uniform measure: the
/// hypothesis rows compare mu(rK) <= mu(rL) over the dilation grid (exact
/// where the intersection volumes are closed-form), and the conclusion is
/// the inclusion K subset L, probed on a support net. A grid where the
/// hypothesis holds while some direction certifies h_K > h_L reproduces
/// the dilate-version counterexample.
pub fn bp_experiment_uniform<T: Scalar>(
    uni: &UniformMeasure<T>,
    k: &ConvexBody<T>,
    l: &ConvexBody<T>,
    r_grid: &[T],
    net_size: usize,
    budget: u64,
    seed: u64,
) -> Result<DominanceReport<T>> {
    if r_grid.is_empty() || net_size == 0 {
        return Err(Error::InvalidConfig("the experiment needs a nonempty r grid and net".into()));
    }
    // Regime certificates that sidestep formula-level rounding. When rK
    // and rL both sit inside Omega (exact inradius certs), the row
    // comparison is r^n|K| <= r^n|L|, i.e. the r-free volume comparison:
    // the t -> 0 limit of the hypothesis. When Omega sits inside both
    // dilates, both masses are the identical quantity |Omega|/|Omega|, so
    // the non-strict row holds outright: the t -> infinity limit.
    let identical = same_body(k, l);
    let fit = |body: &ConvexBody<T>| inradius(&uni.omega, body).ok().filter(|c| c.exact);
    let cover = |body: &ConvexBody<T>| inradius(body, &uni.omega).ok().filter(|c| c.exact);
    let (fit_k, fit_l) = (fit(k), fit(l));
    let (cover_k, cover_l) = (cover(k), cover(l));
    let vol_status = match (k.log_volume(), l.log_volume()) {
        (Ok(vk), Ok(vl)) => {
            if vk <= vl {
                Some(PairStatus::Holds)
            } else if vk > vl + rounding_guard(vk, vl) {
                Some(PairStatus::Fails)
            } else {
                Some(PairStatus::Inconclusive)
            }
        }
        _ => None,
    };
    let rows: Vec<SectionPair<T>> = r_grid
        .par_iter()
        .enumerate()
        .map(|(i, &r)| -> Result<SectionPair<T>> {
            let s = seed.wrapping_add(i as u64);
            let mk = uni.log_mass(k, r, budget, s)?;
            let ml = uni.log_mass(l, r, budget, s.wrapping_add(0x9e37))?;
            let small = matches!((&fit_k, &fit_l), (Some(a), Some(b)) if r <= a.r && r <= b.r);
            let big =
                matches!((&cover_k, &cover_l), (Some(a), Some(b)) if r * a.r >= T::one() && r * b.r >= T::one());
            let status = if identical || big {
                PairStatus::Holds
            } else if small {
                vol_status.unwrap_or_else(|| compare_pair(&mk, &ml))
            } else {
                compare_pair(&mk, &ml)
            };
            Ok(SectionPair { r, xi: Vec::new(), k: mk, l: ml, status })
        })
        .collect::<Result<_>>()?;
    let hypothesis = verdict_from_rows(&rows);
    let non_inclusion = direction_net::<T>(k.dim(), net_size)
        .into_iter()
        .map(|dir| {
            let hk = k.support(&dir);
            let hl = l.support(&dir);
            (dir, hk, hl)
        })
        .filter(|(_, hk, hl)| hk > hl)
        .max_by(|a, b| (a.1 - a.2).partial_cmp(&(b.1 - b.2)).unwrap())
        .map(|(direction, h_k, h_l)| NonInclusion { direction, h_k, h_l });
    let counterexample_certified =
        matches!(hypothesis, DominanceVerdict::Holds) && non_inclusion.is_some();
    Ok(DominanceReport {
        rows,
        hypothesis,
        mass_k: None,
        mass_l: None,
        conclusion: None,
        counterexample_certified,
        non_inclusion,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectRow<T> {
    pub t: T,
    /// |t B_2^2 cap Omega|, exact closed form.
    pub area_ball: T,
    /// |t Omega cap Omega| = min(t, 1)^2 |Omega|, exact.
    pub area_omega: T,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectangleReport<T> {
    pub rows: Vec<RectRow<T>>,
    pub all_pass: bool,
    /// |B_2^2| and |Omega|, both equal to pi.
    pub vol_ball: T,
    pub vol_omega: T,
    /// Support values at (0, 1): 1 for the disc, 1/2 for Omega, so the
    /// disc is not contained in Omega.
    pub h_ball_e2: T,
    pub h_omega_e2: T,
    pub ball_not_subset: bool,
}

/// Exact verification that |t B_2^2 cap Omega| <= |t Omega cap Omega| on a
/// grid, for the rectangle Omega = [-pi/2, pi/2] x [-1/2, 1/2] of the same
/// area as the unit disc. Every quantity is closed-form arithmetic and the
/// comparison carries zero tolerance: in the two saturated regimes both
/// sides are produced by the same floating-point expressions
/// (pi * (t * t) and 4 * w * h), so equality is exact, and in between the
/// clipped area is smaller by a margin that dwarfs rounding.
pub fn rectangle_demo<T: Scalar>(t_grid: &[T]) -> Result<RectangleReport<T>> {
    if t_grid.iter().any(|t| !(*t > T::zero())) {
        return Err(Error::InvalidConfig("rectangle demo grid must be positive".into()));
    }
    let w = T::PI() / T::of(2.0);
    let h = T::of(0.5);
    let box_area = T::of(4.0) * w * h;
    let rows: Vec<RectRow<T>> = t_grid
        .iter()
        .map(|&t| {
            let area_ball = circle_box_area(t, w, h);
            let area_omega =
                if t >= T::one() { box_area } else { T::PI() * (t * t) };
            RectRow { t, area_ball, area_omega, pass: area_ball <= area_omega }
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    let h_ball = T::one();
    let h_omega = h;
    Ok(RectangleReport {
        rows,
        all_pass,
        vol_ball: T::PI(),
        vol_omega: box_area,
        h_ball_e2: h_ball,
        h_omega_e2: h_omega,
        ball_not_subset: h_ball > h_omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactStatus {
    /// Certified mu(K) <= mu(RL).
    Holds,
    /// The volume hypothesis |K| <= |RL| failed, so the fact does not
    /// apply.
    HypothesisViolated,
    /// Certified mu(K) > mu(RL) (would contradict the fact).
    Fails,
    /// Mass intervals overlap.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactInnerRow<T> {
    /// Sublevel scale s = phi^{-1}(u).
    pub s: T,
    /// ln |K cap sL|.
    pub lhs: Estimate<T>,
    /// ln |RL cap sL| = n ln min(R, s) + ln |L|, exact.
    pub rhs: T,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactReport<T> {
    pub r: T,
    pub log_vol_k: Estimate<T>,
    pub log_vol_rl: T,
    pub mass_k: Estimate<T>,
    pub mass_rl: Estimate<T>,
    pub status: FactStatus,
    /// Replay of the proof's slicewise comparison |K cap sL| <= |RL cap sL|
    /// on a scale grid.
    pub inner: Vec<FactInnerRow<T>>,
    pub inner_ok: bool,
}

/// Verify the volume-majorization fact: |K| <= |RL| implies
/// mu(K) <= mu(RL). Checks the hypothesis first, then compares the masses
/// with certified intervals, and replays the slicewise inequality
/// |K cap sL| <= |RL cap sL| = min(R, s)^n |L| that drives the proof.
pub fn fact_check<T: Scalar>(
    mu: &NormMeasure<T>,
    k: &ConvexBody<T>,
    r: T,
    budget: u64,
    seed: u64,
) -> Result<FactReport<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidBody(format!("fact check needs R > 0, got {r}")));
    }
    let n = mu.dim();
    if k.dim() != n {
        return Err(Error::InvalidBody("body dimension mismatch with the measure".into()));
    }
    let log_vol_l = match mu.body.log_volume() {
        Ok(v) => Estimate::exact(v),
        Err(Error::Unsupported(_)) => mu.body.volume_mc(budget.max(100_000), seed ^ 0x4c),
        Err(e) => return Err(e),
    };
    let log_vol_rl = T::of_usize(n) * r.ln() + log_vol_l.log_value;
    let log_vol_k = match k.log_volume() {
        Ok(v) => Estimate::exact(v),
        Err(Error::Unsupported(_)) => k.volume_mc(budget.max(100_000), seed ^ 0x4b),
        Err(e) => return Err(e),
    };
    if log_vol_k.log_value - log_vol_k.abs_log_error > log_vol_rl + log_vol_l.abs_log_error {
        return Ok(FactReport {
            r,
            log_vol_k,
            log_vol_rl,
            mass_k: Estimate::exact(T::nan()),
            mass_rl: Estimate::exact(T::nan()),
            status: FactStatus::HypothesisViolated,
            inner: Vec::new(),
            inner_ok: false,
        });
    }
    let mass_k = mu.log_mass(k, T::one(), budget, seed)?;
    let mass_rl = mu.log_mass_radial(r)?;
    let rl = ConvexBody::dilate(mu.body.clone(), r)?;
    let status = if same_body(k, &rl) {
        FactStatus::Holds
    } else {
        match compare_pair(&mass_k, &mass_rl) {
            PairStatus::Holds => FactStatus::Holds,
            PairStatus::Fails => FactStatus::Fails,
            PairStatus::Inconclusive => FactStatus::Inconclusive,
        }
    };

    // Slicewise replay on a geometric scale grid around R.
    let mut inner = Vec::new();
    let mut inner_ok = true;
    for i in 0..=16u32 {
        let s = r * T::of(2.0).powf(T::of(i as f64) / T::of(4.0) - T::of(2.0));
        let sl = ConvexBody::dilate(mu.body.clone(), s)?.absorb_dilation();
        let lhs = match log_intersection_volume(k, &sl) {
            Some(v) => Estimate::exact(v),
            None => intersection_volume_mc(k, &sl, budget.max(100_000), seed ^ (i as u64)),
        };
        let rhs = T::of_usize(n) * r.min(s).ln() + log_vol_l.log_value;
        let ok = lhs.log_value - lhs.abs_log_error
            <= rhs + log_vol_l.abs_log_error + T::of(1e-9);
        inner_ok &= ok;
        inner.push(FactInnerRow { s, lhs, rhs, ok });
    }
    Ok(FactReport { r, log_vol_k, log_vol_rl, mass_k, mass_rl, status, inner, inner_ok })
}

/// Monte Carlo volume of an intersection, for pairs without a closed form:
/// uniform proposal on the axis bounding box of the first body.
fn intersection_volume_mc<T: Scalar>(
    a: &ConvexBody<T>,
    b: &ConvexBody<T>,
    budget: u64,
    seed: u64,
) -> Estimate<T> {
    let n = a.dim();
    let half: Vec<T> = (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            a.support(&e)
        })
        .collect();
    let ln_box: T = half.iter().map(|h| (T::of(2.0) * *h).ln()).sum();
    let half_c = half.clone();
    let proposal = ProposalSpec {
        sample: Box::new(move |rng: &mut CounterRng| {
            half_c
                .iter()
                .map(|&h| (T::of(2.0) * T::of(rng.next_f64()) - T::one()) * h)
                .collect()
        }),
        log_pdf: Box::new(move |_: &[T]| -ln_box),
    };
    mc_region_measure(
        |_: &[T]| T::zero(),
        |x: &[T]| a.norm(x) <= T::one() && b.norm(x) <= T::one(),
        &proposal,
        budget,
        seed,
        0x697378, // "isx"
    )
}

/// True when the fact-check mass comparison for this (K, L) pair runs on
/// closed-form intersections end to end (no Monte Carlo anywhere).
pub fn fact_check_exact_pair<T: Scalar>(k: &ConvexBody<T>, l: &ConvexBody<T>) -> bool {
    exact_pairable(k, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::PhiFunction;

    fn gaussian3() -> NormMeasure<f64> {
        NormMeasure::new(
            PhiFunction::gaussian_normalized(3).unwrap(),
            ConvexBody::euclidean_ball(3, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn section_zero_radius_is_empty() {
        let mu = gaussian3();
        let ball = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let s = section_measure(&mu, &ball, &[0.0, 0.0, 1.0], 0.0, 0, 1).unwrap();
        assert_eq!(s.log_value, f64::NEG_INFINITY);
    }

    #[test]
    fn section_full_hyperplane_gaussian() {
        // r -> infinity exhausts the plane integral: (2 pi)^{-1/2}.
        let mu = gaussian3();
        let ball = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let s = section_measure(&mu, &ball, &[0.0, 0.0, 1.0], 40.0, 0, 1).unwrap();
        let want = (2.0 * std::f64::consts::PI).sqrt().recip().ln();
        assert!((s.log_value - want).abs() < 1e-10, "got {}", s.log_value);
    }

    #[test]
    fn section_rotation_invariance() {
        let mu = gaussian3();
        let ball = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let dirs = direction_net::<f64>(3, 50);
        let base = section_measure(&mu, &ball, &dirs[0], 1.5, 0, 1).unwrap().log_value;
        for d in &dirs[1..] {
            let v = section_measure(&mu, &ball, d, 1.5, 0, 1).unwrap().log_value;
            assert!((v - base).abs() < 1e-9 * base.abs());
        }
    }

    #[test]
    fn section_box_polygon_vs_ball_paths() {
        // A huge box slices to the full plane too; the polygon path must
        // agree with the closed radial form on the saturated value.
        let mu = gaussian3();
        let cube = ConvexBody::box_body(vec![40.0, 40.0, 40.0]).unwrap();
        let ball = ConvexBody::euclidean_ball(3, 40.0).unwrap();
        let xi = [0.3, -0.2, 0.93];
        let a = section_measure(&mu, &cube, &xi, 1.0, 0, 1).unwrap();
        let b = section_measure(&mu, &ball, &xi, 1.0, 0, 1).unwrap();
        assert!((a.log_value - b.log_value).abs() < 1e-8, "{} vs {}", a.log_value, b.log_value);
    }

    #[test]
    fn section_chord_2d_box() {
        // n = 2, K = L = unit square, xi = e2: the slice is the x-axis
        // segment [-1, 1]; along it ||(s,0)||_L = |s|, so the measure is
        // 2 int_0^1 e^{-phi} / Z with phi(v) = v.
        let mu = NormMeasure::new(
            PhiFunction::linear(1.0, 0.0).unwrap(),
            ConvexBody::box_body(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let k = ConvexBody::box_body(vec![1.0, 1.0]).unwrap();
        let s = section_measure(&mu, &k, &[0.0, 1.0], 1.0, 0, 1).unwrap();
        // Z = 2 |L| int_0^inf v e^{-v} dv = 8; numerator 2 (1 - e^{-1}).
        let want = (2.0 * (1.0 - (-1.0f64).exp()) / 8.0).ln();
        assert!((s.log_value - want).abs() < 1e-10, "got {}", s.log_value);
    }

    #[test]
    fn section_mc_agrees_with_polygon_path() {
        let mu = gaussian3();
        let cube = ConvexBody::box_body(vec![1.0, 1.0, 1.0]).unwrap();
        let xi = [0.0, 0.0, 1.0];
        let exact = section_measure(&mu, &cube, &xi, 1.0, 0, 1).unwrap();
        let z = mu.log_z().unwrap();
        let mc = section_mc(&mu, &cube, &[0.0, 0.0, 1.0], 1.0, 400_000, 5, &z).unwrap();
        assert!(
            (exact.log_value - mc.log_value).abs() < 3.0 * mc.abs_log_error,
            "exact {} mc {} err {}",
            exact.log_value,
            mc.log_value,
            mc.abs_log_error
        );
    }

    #[test]
    fn dominance_nested_balls() {
        let mu = gaussian3();
        let small = ConvexBody::euclidean_ball(3, 0.5).unwrap();
        let big = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let grid = [0.5, 1.0, 2.0];
        let rep = dominance_check(&mu, &small, &big, &grid, 12, 0, 1).unwrap();
        assert!(matches!(rep.hypothesis, DominanceVerdict::Holds));
        // Swapped order fails at every r with a certified gap.
        let rep = dominance_check(&mu, &big, &small, &grid, 12, 0, 1).unwrap();
        assert!(matches!(rep.hypothesis, DominanceVerdict::FailsAt { .. }));
    }

    #[test]
    fn dominance_equal_bodies() {
        let mu = gaussian3();
        let ball = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let rep = dominance_check(&mu, &ball, &ball, &[1.0, 3.0], 8, 0, 1).unwrap();
        assert!(matches!(rep.hypothesis, DominanceVerdict::Holds));
        for row in &rep.rows {
            assert_eq!(row.k.log_value, row.l.log_value);
        }
    }

    #[test]
    fn bp_experiment_equal_bodies_no_counterexample() {
        let mu = gaussian3();
        let ball = ConvexBody::euclidean_ball(3, 1.0).unwrap();
        let rep = bp_experiment(&mu, &ball, &ball, &[0.5, 1.0, 2.0], 8, 0, 1).unwrap();
        assert!(matches!(rep.hypothesis, DominanceVerdict::Holds));
        assert!(!rep.counterexample_certified);
        let mk = rep.mass_k.unwrap();
        let ml = rep.mass_l.unwrap();
        assert_eq!(mk.log_value, ml.log_value);
    }

    #[test]
    fn bp_uniform_rectangle_counterexample() {
        // Remark-3 shape: uniform on Omega, K = unit disc, L = Omega. The
        // dilate masses satisfy mu(tK) <= mu(tL) for every t while the
        // disc is not inside Omega.
        let omega = ConvexBody::box_body(vec![std::f64::consts::PI / 2.0, 0.5]).unwrap();
        let uni = UniformMeasure::new(omega.clone());
        let disc = ConvexBody::euclidean_ball(2, 1.0).unwrap();
        let grid: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
        let rep = bp_experiment_uniform(&uni, &disc, &omega, &grid, 64, 0, 1).unwrap();
        assert!(matches!(rep.hypothesis, DominanceVerdict::Holds));
        let ni = rep.non_inclusion.as_ref().expect("disc sticks out of the rectangle");
        assert!(ni.h_k > ni.h_l);
        assert!(rep.counterexample_certified);
    }

    #[test]
    fn rectangle_demo_exact() {
        let grid: Vec<f64> = (0..200)
            .map(|i| 0.01 * 1000f64.powf(i as f64 / 199.0))
            .collect();
        let rep = rectangle_demo(&grid).unwrap();
        assert!(rep.all_pass);
        assert!((rep.vol_ball - std::f64::consts::PI).abs() < 1e-12);
        assert!((rep.vol_omega - std::f64::consts::PI).abs() < 1e-12);
        assert!(rep.ball_not_subset);
        // The equality regimes really are bitwise equalities.
        let small = &rep.rows[0];
        assert!(small.t < 0.5);
        assert_eq!(small.area_ball, small.area_omega);
        let large = rep.rows.last().unwrap();
        assert_eq!(large.area_ball, large.area_omega);
    }

    #[test]
    fn fact_equal_dilate() {
        // K = R L: equality through the radial shortcut on both sides.
        let mu: NormMeasure<f64> = NormMeasure::new(
            PhiFunction::power(2.0, 1.0, 0.0).unwrap(),
            ConvexBody::box_body(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let k = ConvexBody::dilate(ConvexBody::box_body(vec![1.0, 1.0]).unwrap(), 1.3).unwrap();
        let rep = fact_check(&mu, &k, 1.3, 100_000, 7).unwrap();
        assert_eq!(rep.status, FactStatus::Holds);
        assert!(
            (rep.mass_k.log_value - rep.mass_rl.log_value).abs()
                < 1e-8 * rep.mass_rl.log_value.abs().max(1.0)
        );
        assert!(rep.inner_ok);
    }

    #[test]
    fn fact_quadrilateral_vs_square() {
        // A fixed symmetric quadrilateral against the unit square with R
        // matched to equal volumes.
        let mu: NormMeasure<f64> = NormMeasure::new(
            PhiFunction::power(2.0, 1.0, 0.0).unwrap(),
            ConvexBody::box_body(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let k: ConvexBody<f64> = ConvexBody::symmetric_polytope(
            vec![vec![1.0, 0.2], vec![-0.3, 1.0]],
            vec![0.9, 1.1],
        )
        .unwrap();
        let vol_k: f64 = k.log_volume().unwrap().exp();
        let r = (vol_k / 4.0).sqrt() * (1.0 + 1e-12);
        let rep = fact_check(&mu, &k, r, 100_000, 7).unwrap();
        assert_eq!(rep.status, FactStatus::Holds);
        assert!(rep.inner_ok);
    }

    #[test]
    fn fact_hypothesis_violation_detected() {
        let mu = NormMeasure::new(
            PhiFunction::power(2.0, 1.0, 0.0).unwrap(),
            ConvexBody::box_body(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        let k = ConvexBody::box_body(vec![3.0, 3.0]).unwrap();
        let rep = fact_check(&mu, &k, 1.0, 0, 7).unwrap();
        assert_eq!(rep.status, FactStatus::HypothesisViolated);
    }
}
