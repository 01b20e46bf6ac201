//! Origin-symmetric convex bodies: Minkowski functional, support function,
//! relative inradius with certificates, volumes, central sections, and
//! uniform sampling.

use crate::error::{Error, Result};
use crate::geom::{
    self, convex_polygon_area, direction_net, dot, enumerate_vertices, norm2, normalize,
    orthonormal_basis_perp, Halfspace,
};
use crate::integrate::{mc_region_measure, Estimate, ProposalSpec};
use crate::rng::CounterRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody<T: Scalar> {
    EuclideanBall { dim: usize, radius: T },
    /// {x : sum |x_i / a_i|^p <= 1}; p = +inf is the axis box.
    LpBall { p: T, semi_axes: Vec<T> },
    Box { half_widths: Vec<T> },
    /// {x : |<a_i, x>| <= b_i} with unit normals (normalized on build).
    SymmetricPolytope { normals: Vec<Vec<T>>, offsets: Vec<T> },
    Dilate { inner: Box<ConvexBody<T>>, factor: T },
}

impl<T: Scalar> ConvexBody<T> {
    pub fn euclidean_ball(dim: usize, radius: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("ball dimension must be >= 1".into()));
        }
        if !(radius > T::zero()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody::EuclideanBall { dim, radius })
    }

    pub fn lp_ball(p: T, semi_axes: Vec<T>) -> Result<Self> {
        if semi_axes.is_empty() {
            return Err(Error::InvalidBody("lp ball needs at least one semi-axis".into()));
        }
        if !(p >= T::one()) {
            return Err(Error::InvalidBody(format!("lp exponent must be >= 1, got {p}")));
        }
        if semi_axes.iter().any(|a| !(*a > T::zero()) || !a.is_finite()) {
            return Err(Error::InvalidBody("lp semi-axes must be positive finite".into()));
        }
        Ok(ConvexBody::LpBall { p, semi_axes })
    }

    pub fn box_body(half_widths: Vec<T>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(Error::InvalidBody("box needs at least one half-width".into()));
        }
        if half_widths.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidBody("box half-widths must be positive finite".into()));
        }
        Ok(ConvexBody::Box { half_widths })
    }

    /// |<a_i, x>| <= b_i. Rows are rescaled so each normal is unit; the
    /// normals must span (otherwise the set is unbounded).
    pub fn symmetric_polytope(normals: Vec<Vec<T>>, offsets: Vec<T>) -> Result<Self> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(Error::InvalidBody("polytope needs matching normals and offsets".into()));
        }
        let dim = normals[0].len();
        if dim < 2 {
            return Err(Error::InvalidBody("polytope dimension must be >= 2".into()));
        }
        let mut unit_normals = Vec::with_capacity(normals.len());
        let mut unit_offsets = Vec::with_capacity(normals.len());
        for (a, &b) in normals.iter().zip(offsets.iter()) {
            if a.len() != dim {
                return Err(Error::InvalidBody("polytope normals have mixed dimensions".into()));
            }
            let len = norm2(a);
            if !(len > T::zero()) || !len.is_finite() {
                return Err(Error::InvalidBody("polytope normal must be nonzero finite".into()));
            }
            if !(b > T::zero()) || !b.is_finite() {
                return Err(Error::InvalidBody(format!("polytope offset must be positive, got {b}")));
            }
            unit_normals.push(a.iter().map(|&v| v / len).collect::<Vec<_>>());
            unit_offsets.push(b / len);
        }
        if rank(&unit_normals) < dim {
            return Err(Error::InvalidBody(
                "polytope normals do not span the space; the body is unbounded".into(),
            ));
        }
        Ok(ConvexBody::SymmetricPolytope { normals: unit_normals, offsets: unit_offsets })
    }

    pub fn dilate(inner: ConvexBody<T>, factor: T) -> Result<Self> {
        if !(factor > T::zero()) || !factor.is_finite() {
            return Err(Error::InvalidBody(format!("dilation factor must be positive, got {factor}")));
        }
        Ok(ConvexBody::Dilate { inner: Box::new(inner), factor })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::EuclideanBall { dim, .. } => *dim,
            ConvexBody::LpBall { semi_axes, .. } => semi_axes.len(),
            ConvexBody::Box { half_widths } => half_widths.len(),
            ConvexBody::SymmetricPolytope { normals, .. } => normals[0].len(),
            ConvexBody::Dilate { inner, .. } => inner.dim(),
        }
    }

    /// Minkowski functional ||x||_K = inf{t > 0 : x in tK}.
    pub fn norm(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            ConvexBody::EuclideanBall { radius, .. } => norm2(x) / *radius,
            ConvexBody::LpBall { p, semi_axes } => {
                if p.is_finite() {
                    let mut s = T::zero();
                    for (xi, ai) in x.iter().zip(semi_axes.iter()) {
                        s += (xi.abs() / *ai).powf(*p);
                    }
                    s.powf(p.recip())
                } else {
                    x.iter()
                        .zip(semi_axes.iter())
                        .map(|(xi, ai)| xi.abs() / *ai)
                        .fold(T::zero(), T::max)
                }
            }
            ConvexBody::Box { half_widths } => x
                .iter()
                .zip(half_widths.iter())
                .map(|(xi, wi)| xi.abs() / *wi)
                .fold(T::zero(), T::max),
            ConvexBody::SymmetricPolytope { normals, offsets } => normals
                .iter()
                .zip(offsets.iter())
                .map(|(a, b)| dot(a, x).abs() / *b)
                .fold(T::zero(), T::max),
            ConvexBody::Dilate { inner, factor } => inner.norm(x) / *factor,
        }
    }

    /// Support function h_K(u) = sup{<u, x> : x in K}.
    pub fn support(&self, u: &[T]) -> T {
        debug_assert_eq!(u.len(), self.dim());
        match self {
            ConvexBody::EuclideanBall { radius, .. } => *radius * norm2(u),
            ConvexBody::LpBall { p, semi_axes } => {
                // Dual norm of the weighted coordinates.
                let scaled: Vec<T> = u.iter().zip(semi_axes.iter()).map(|(ui, ai)| *ui * *ai).collect();
                if *p == T::one() {
                    scaled.iter().map(|v| v.abs()).fold(T::zero(), T::max)
                } else if p.is_finite() {
                    let q = *p / (*p - T::one());
                    scaled.iter().map(|v| v.abs().powf(q)).sum::<T>().powf(q.recip())
                } else {
                    scaled.iter().map(|v| v.abs()).sum()
                }
            }
            ConvexBody::Box { half_widths } => u
                .iter()
                .zip(half_widths.iter())
                .map(|(ui, wi)| ui.abs() * *wi)
                .sum(),
            ConvexBody::SymmetricPolytope { .. } => {
                let dim = self.dim();
                if dim <= 3 {
                    let verts = self.vertices().expect("validated polytope has vertices");
                    verts.iter().map(|v| dot(u, v)).fold(T::neg_infinity(), T::max)
                } else {
                    let (rows, rhs) = self.signed_rows();
                    geom::simplex_max(u, &rows, &rhs).expect("bounded polytope LP")
                }
            }
            ConvexBody::Dilate { inner, factor } => *factor * inner.support(u),
        }
    }

    /// Both-sign halfspace representation when the body is polyhedral.
    pub fn as_halfspaces(&self) -> Option<Vec<Halfspace<T>>> {
        match self {
            ConvexBody::Box { half_widths } => {
                let n = half_widths.len();
                let mut hs = Vec::with_capacity(2 * n);
                for (i, &w) in half_widths.iter().enumerate() {
                    let mut a = vec![T::zero(); n];
                    a[i] = T::one();
                    hs.push(Halfspace { normal: a.clone(), offset: w });
                    let neg: Vec<T> = a.iter().map(|&v| -v).collect();
                    hs.push(Halfspace { normal: neg, offset: w });
                }
                Some(hs)
            }
            ConvexBody::SymmetricPolytope { normals, offsets } => {
                let mut hs = Vec::with_capacity(2 * normals.len());
                for (a, &b) in normals.iter().zip(offsets.iter()) {
                    hs.push(Halfspace { normal: a.clone(), offset: b });
                    hs.push(Halfspace { normal: a.iter().map(|&v| -v).collect(), offset: b });
                }
                Some(hs)
            }
            ConvexBody::LpBall { p, semi_axes } if !p.is_finite() => {
                ConvexBody::Box { half_widths: semi_axes.clone() }.as_halfspaces()
            }
            ConvexBody::Dilate { inner, factor } => inner.as_halfspaces().map(|hs| {
                hs.into_iter()
                    .map(|h| Halfspace { normal: h.normal, offset: h.offset * *factor })
                    .collect()
            }),
            _ => None,
        }
    }

    fn signed_rows(&self) -> (Vec<Vec<T>>, Vec<T>) {
        let hs = self.as_halfspaces().expect("polyhedral body");
        let rows = hs.iter().map(|h| h.normal.clone()).collect();
        let rhs = hs.iter().map(|h| h.offset).collect();
        (rows, rhs)
    }

    /// Vertices of a polyhedral body, dimensions 2 and 3 only.
    pub fn vertices(&self) -> Result<Vec<Vec<T>>> {
        let hs = self
            .as_halfspaces()
            .ok_or_else(|| Error::Unsupported("vertex enumeration needs a polyhedral body".into()))?;
        if self.dim() > 3 {
            return Err(Error::Unsupported("vertex enumeration supports dimensions 2 and 3".into()));
        }
        enumerate_vertices(&hs)
    }

    /// Euclidean circumradius max{|x|_2 : x in K}. Exact except for
    /// polytopes in dimension >= 4, where it is a certified upper bound
    /// (Euclidean norm of the axis supports).
    pub fn circumradius(&self) -> T {
        self.circumradius_with_direction().0
    }

    /// Circumradius together with a direction attaining it (the direction
    /// is a unit vector; for the dimension >= 4 polytope bound it is the
    /// first axis and only the radius is meaningful).
    pub fn circumradius_with_direction(&self) -> (T, Vec<T>) {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => {
                let mut d = vec![T::zero(); n];
                d[0] = T::one();
                (*radius, d)
            }
            ConvexBody::Box { half_widths } => {
                let r = norm2(half_widths);
                (r, half_widths.iter().map(|&w| w / r).collect())
            }
            ConvexBody::LpBall { p, semi_axes } => {
                if !p.is_finite() {
                    return ConvexBody::Box { half_widths: semi_axes.clone() }
                        .circumradius_with_direction();
                }
                if *p <= T::of(2.0) {
                    // Extreme point sits on the longest axis.
                    let (i, &a) = semi_axes
                        .iter()
                        .enumerate()
                        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
                        .unwrap();
                    let mut d = vec![T::zero(); n];
                    d[i] = T::one();
                    (a, d)
                } else {
                    // Lagrange point: weights t_i proportional to
                    // a_i^{2p/(p-2)}, radius (sum a_i^{2p/(p-2)})^{(p-2)/(2p)}.
                    let expo = T::of(2.0) * *p / (*p - T::of(2.0));
                    let s: T = semi_axes.iter().map(|a| a.powf(expo)).sum();
                    let r = s.powf((*p - T::of(2.0)) / (T::of(2.0) * *p));
                    let mut x: Vec<T> = semi_axes
                        .iter()
                        .map(|&a| {
                            let t = a.powf(expo) / s;
                            a * t.powf(p.recip())
                        })
                        .collect();
                    let len = norm2(&x);
                    for v in x.iter_mut() {
                        *v = *v / len;
                    }
                    (r, x)
                }
            }
            ConvexBody::SymmetricPolytope { .. } => {
                if n <= 3 {
                    let verts = self.vertices().expect("validated polytope");
                    let (best, r) = verts
                        .iter()
                        .map(|v| (v, norm2(v)))
                        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                        .unwrap();
                    (r, normalize(best))
                } else {
                    // Upper bound from the axis supports; exact value would
                    // need vertex enumeration in high dimension.
                    let mut s = T::zero();
                    for i in 0..n {
                        let mut e = vec![T::zero(); n];
                        e[i] = T::one();
                        let h = self.support(&e);
                        s += h * h;
                    }
                    let mut d = vec![T::zero(); n];
                    d[0] = T::one();
                    (s.sqrt(), d)
                }
            }
            ConvexBody::Dilate { inner, factor } => {
                let (r, d) = inner.circumradius_with_direction();
                (r * *factor, d)
            }
        }
    }

    /// ln of the Lebesgue volume, exact closed forms only. Polytopes above
    /// dimension 3 are not triangulated here; use volume_mc.
    pub fn log_volume(&self) -> Result<T> {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => {
                Ok(geom::unit_ball_volume::<T>(n).ln() + T::of_usize(n) * radius.ln())
            }
            ConvexBody::LpBall { p, semi_axes } => Ok(geom::ln_lp_ball_volume(*p, semi_axes)),
            ConvexBody::Box { half_widths } => {
                Ok(half_widths.iter().map(|w| (T::of(2.0) * *w).ln()).sum())
            }
            ConvexBody::SymmetricPolytope { .. } => {
                if n > 3 {
                    return Err(Error::Unsupported(
                        "exact polytope volume supports dimensions 2 and 3; use volume_mc".into(),
                    ));
                }
                let hs = self.as_halfspaces().unwrap();
                let v = geom::h_polytope_volume(&hs)?;
                Ok(v.ln())
            }
            ConvexBody::Dilate { inner, factor } => {
                Ok(inner.log_volume()? + T::of_usize(n) * factor.ln())
            }
        }
    }

    /// Monte Carlo volume (log scale) by uniform sampling in the axis
    /// bounding box. Deterministic per (budget, seed).
    pub fn volume_mc(&self, budget: u64, seed: u64) -> Estimate<T> {
        let n = self.dim();
        let mut half = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            half.push(self.support(&e));
        }
        let ln_box: T = half.iter().map(|h| (T::of(2.0) * *h).ln()).sum();
        let half_f: Vec<T> = half.clone();
        let proposal = ProposalSpec {
            sample: Box::new(move |rng: &mut CounterRng| {
                half_f
                    .iter()
                    .map(|&h| {
                        let u = T::of(rng.next_f64());
                        (T::of(2.0) * u - T::one()) * h
                    })
                    .collect()
            }),
            log_pdf: Box::new(move |_: &[T]| -ln_box),
        };
        mc_region_measure(
            |_: &[T]| T::zero(),
            |x: &[T]| self.norm(x) <= T::one(),
            &proposal,
            budget,
            seed,
            0x766f6c, // "vol"
        )
    }

    /// ln of the (n-1)-volume of the central section K cap xi-perp.
    /// Exact for balls, any body in dimension 2 (chord length), polyhedral
    /// bodies in dimension 3 (polygon slice), and axis sections of lp
    /// balls; Monte Carlo in the section plane otherwise.
    pub fn log_central_section(&self, xi: &[T], budget: u64, seed: u64) -> Result<Estimate<T>> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Unsupported("central sections need dimension >= 2".into()));
        }
        if xi.len() != n {
            return Err(Error::InvalidBody("direction dimension mismatch".into()));
        }
        if !(norm2(xi) > T::zero()) {
            return Err(Error::InvalidBody("section direction must be nonzero".into()));
        }
        let xi = normalize(xi);
        match self {
            ConvexBody::EuclideanBall { radius, .. } => Ok(Estimate::exact(
                geom::unit_ball_volume::<T>(n - 1).ln() + T::of_usize(n - 1) * radius.ln(),
            )),
            ConvexBody::Dilate { inner, factor } => {
                let mut est = inner.log_central_section(&xi, budget, seed)?;
                est.log_value = est.log_value + T::of_usize(n - 1) * factor.ln();
                Ok(est)
            }
            _ if n == 2 => {
                // The section is the chord {s v : |s| ||v||_K <= 1}.
                let v = vec![-xi[1], xi[0]];
                Ok(Estimate::exact((T::of(2.0) / self.norm(&v)).ln()))
            }
            ConvexBody::LpBall { p, semi_axes } if axis_index(&xi).is_some() => {
                let i = axis_index(&xi).unwrap();
                let axes: Vec<T> = semi_axes
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &a)| a)
                    .collect();
                Ok(Estimate::exact(geom::ln_lp_ball_volume(*p, &axes)))
            }
            _ if n == 3 && self.as_halfspaces().is_some() => {
                let poly = self.section_polygon(&xi)?;
                Ok(Estimate::exact(convex_polygon_area(&poly).ln()))
            }
            _ => Ok(self.section_mc(&xi, budget, seed)),
        }
    }

    /// Vertices (in plane coordinates) of the polygon K cap xi-perp for a
    /// 3-dimensional polyhedral body.
    pub fn section_polygon(&self, xi: &[T]) -> Result<Vec<Vec<T>>> {
        let hs = self
            .as_halfspaces()
            .ok_or_else(|| Error::Unsupported("polygon sections need a polyhedral body".into()))?;
        let basis = orthonormal_basis_perp(xi);
        let planar: Vec<Halfspace<T>> = hs
            .iter()
            .map(|h| Halfspace {
                normal: vec![dot(&h.normal, &basis[0]), dot(&h.normal, &basis[1])],
                offset: h.offset,
            })
            .collect();
        enumerate_vertices(&planar)
    }

    /// Monte Carlo section area in the plane basis.
    fn section_mc(&self, xi: &[T], budget: u64, seed: u64) -> Estimate<T> {
        let n = self.dim();
        let basis = orthonormal_basis_perp(xi);
        let k = basis.len();
        debug_assert_eq!(k, n - 1);
        let mut half = Vec::with_capacity(k);
        for b in &basis {
            half.push(self.support(b)); // overestimates the slice support
        }
        let ln_box: T = half.iter().map(|h| (T::of(2.0) * *h).ln()).sum();
        let basis_c = basis.clone();
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
            |coords: &[T]| {
                let mut x = vec![T::zero(); n];
                for (c, b) in coords.iter().zip(basis_c.iter()) {
                    for (xj, bj) in x.iter_mut().zip(b.iter()) {
                        *xj += *c * *bj;
                    }
                }
                self.norm(&x) <= T::one()
            },
            &proposal,
            budget,
            seed,
            0x736563, // "sec"
        )
    }

    /// One uniform sample from the body. Polytopes use rejection from the
    /// circumscribed ball; persistent rejection (acceptance below roughly
    /// 1e-4) aborts with Inefficient.
    pub fn sample_uniform(&self, rng: &mut CounterRng) -> Result<Vec<T>> {
        let n = self.dim();
        match self {
            ConvexBody::EuclideanBall { radius, .. } => {
                let mut x: Vec<T> = (0..n).map(|_| T::of(rng.next_normal())).collect();
                let len = norm2(&x);
                let r = *radius * T::of(rng.next_f64_open()).powf(T::of_usize(n).recip());
                for v in x.iter_mut() {
                    *v = *v / len * r;
                }
                Ok(x)
            }
            ConvexBody::Box { half_widths } => Ok(half_widths
                .iter()
                .map(|&w| (T::of(2.0) * T::of(rng.next_f64()) - T::one()) * w)
                .collect()),
            ConvexBody::LpBall { p, semi_axes } => {
                if !p.is_finite() {
                    return ConvexBody::Box { half_widths: semi_axes.clone() }.sample_uniform(rng);
                }
                // Generalized normal trick: y_i = sign * G_i^{1/p} with
                // G_i ~ Gamma(1/p) makes y/||y||_p * U^{1/n} uniform on the
                // unit ball of ||.||_p.
                let pf = p.to_f64_lossy();
                let mut y: Vec<T> = (0..n)
                    .map(|_| {
                        let g = rng.next_gamma(1.0 / pf);
                        let s = if rng.next_u64() & 1 == 0 { T::one() } else { -T::one() };
                        s * T::of(g).powf(p.recip())
                    })
                    .collect();
                let mut s = T::zero();
                for v in &y {
                    s += v.abs().powf(*p);
                }
                let len = s.powf(p.recip());
                let r = T::of(rng.next_f64_open()).powf(T::of_usize(n).recip());
                for (v, a) in y.iter_mut().zip(semi_axes.iter()) {
                    *v = *v / len * r * *a;
                }
                Ok(y)
            }
            ConvexBody::SymmetricPolytope { .. } => {
                let ball = ConvexBody::EuclideanBall { dim: n, radius: self.circumradius() };
                for attempt in 0..100_000u64 {
                    let x = ball.sample_uniform(rng)?;
                    if self.norm(&x) <= T::one() {
                        return Ok(x);
                    }
                    let _ = attempt;
                }
                Err(Error::Inefficient { acceptance: 1e-5 })
            }
            ConvexBody::Dilate { inner, factor } => {
                let mut x = inner.sample_uniform(rng)?;
                for v in x.iter_mut() {
                    *v = *v * *factor;
                }
                Ok(x)
            }
        }
    }
}

impl<T: Scalar> ConvexBody<T> {
    /// Fold any Dilate wrappers into the base body's parameters.
    pub fn absorb_dilation(&self) -> ConvexBody<T> {
        let (base, f) = peel(self);
        if f == T::one() {
            return base.clone();
        }
        match base {
            ConvexBody::EuclideanBall { dim, radius } => {
                ConvexBody::EuclideanBall { dim: *dim, radius: *radius * f }
            }
            ConvexBody::LpBall { p, semi_axes } => ConvexBody::LpBall {
                p: *p,
                semi_axes: semi_axes.iter().map(|&a| a * f).collect(),
            },
            ConvexBody::Box { half_widths } => ConvexBody::Box {
                half_widths: half_widths.iter().map(|&w| w * f).collect(),
            },
            ConvexBody::SymmetricPolytope { normals, offsets } => ConvexBody::SymmetricPolytope {
                normals: normals.clone(),
                offsets: offsets.iter().map(|&b| b * f).collect(),
            },
            ConvexBody::Dilate { .. } => unreachable!("peel removes dilations"),
        }
    }
}

/// Whether log_intersection_volume has a closed form for every pair of
/// dilates of these two bodies (needed when intersections are evaluated
/// along a whole family of scales).
pub fn exact_pairable<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> bool {
    let a = a.absorb_dilation();
    let b = b.absorb_dilation();
    let n = a.dim();
    if matches!(a, ConvexBody::EuclideanBall { .. }) && matches!(b, ConvexBody::EuclideanBall { .. }) {
        return true;
    }
    if a.as_halfspaces().is_some() && b.as_halfspaces().is_some() && n <= 3 {
        return true;
    }
    if n == 2 {
        let ball_box = |x: &ConvexBody<T>, y: &ConvexBody<T>| {
            matches!(x, ConvexBody::EuclideanBall { .. }) && matches!(y, ConvexBody::Box { .. })
        };
        if ball_box(&a, &b) || ball_box(&b, &a) {
            return true;
        }
    }
    false
}

/// ln |A intersect B| for concentric symmetric bodies, exact paths only.
pub fn log_intersection_volume<T: Scalar>(a: &ConvexBody<T>, b: &ConvexBody<T>) -> Option<T> {
    let a = a.absorb_dilation();
    let b = b.absorb_dilation();
    let n = a.dim();
    if n != b.dim() {
        return None;
    }
    match (&a, &b) {
        (
            ConvexBody::EuclideanBall { radius: ra, .. },
            ConvexBody::EuclideanBall { radius: rb, .. },
        ) => {
            let r = ra.min(*rb);
            Some(geom::unit_ball_volume::<T>(n).ln() + T::of_usize(n) * r.ln())
        }
        (ConvexBody::Box { half_widths: wa }, ConvexBody::Box { half_widths: wb }) => Some(
            wa.iter()
                .zip(wb.iter())
                .map(|(&x, &y)| (T::of(2.0) * x.min(y)).ln())
                .sum(),
        ),
        _ => {
            if let (Some(ha), Some(hb)) = (a.as_halfspaces(), b.as_halfspaces()) {
                if n <= 3 {
                    let mut merged = ha;
                    merged.extend(hb);
                    return geom::h_polytope_volume(&merged).ok().map(|v| v.ln());
                }
            }
            if n == 2 {
                if let (ConvexBody::EuclideanBall { radius, .. }, ConvexBody::Box { half_widths }) =
                    (&a, &b)
                {
                    let area = geom::circle_box_area(*radius, half_widths[0], half_widths[1]);
                    return Some(area.ln());
                }
                if let (ConvexBody::Box { half_widths }, ConvexBody::EuclideanBall { radius, .. }) =
                    (&a, &b)
                {
                    let area = geom::circle_box_area(*radius, half_widths[0], half_widths[1]);
                    return Some(area.ln());
                }
            }
            // Exact nesting: r(A, B) >= 1 certifies B inside A.
            if let (Ok(ca), Ok(cb)) = (inradius(&a, &b), inradius(&b, &a)) {
                if ca.exact && ca.r >= T::one() {
                    return b.log_volume().ok();
                }
                if cb.exact && cb.r >= T::one() {
                    return a.log_volume().ok();
                }
            }
            None
        }
    }
}

fn axis_index<T: Scalar>(u: &[T]) -> Option<usize> {
    let mut idx = None;
    for (i, &v) in u.iter().enumerate() {
        if v.abs() > T::of(1e-14) {
            if idx.is_some() {
                return None;
            }
            idx = Some(i);
        }
    }
    idx
}

fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let dim = rows[0].len();
    let mut basis: Vec<Vec<T>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for b in &basis {
            let c = dot(&v, b);
            for (vj, bj) in v.iter_mut().zip(b.iter()) {
                *vj -= c * *bj;
            }
        }
        let len = norm2(&v);
        if len > T::of(1e-10) {
            basis.push(v.iter().map(|&x| x / len).collect());
            if basis.len() == dim {
                break;
            }
        }
    }
    basis.len()
}

/// Relative inradius r(K, L) = max{r : r L subset K} with a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct InradiusCert<T> {
    pub r: T,
    /// Direction witnessing tightness: for polyhedral K the unit normal of
    /// the touching facet; for ball K the direction where L attains its
    /// circumradius; for the search fallback the minimizing direction.
    pub touching_normal: Vec<T>,
    /// Closed-form (facet or circumradius) computation; false for the
    /// direction-net search, whose result is an upper bound refined
    /// locally.
    pub exact: bool,
}

pub fn inradius<T: Scalar>(k: &ConvexBody<T>, l: &ConvexBody<T>) -> Result<InradiusCert<T>> {
    if k.dim() != l.dim() {
        return Err(Error::InvalidBody(format!(
            "inradius needs matching dimensions, got {} and {}",
            k.dim(),
            l.dim()
        )));
    }
    let (k0, fk) = peel(k);
    let (l0, fl) = peel(l);
    let mut cert = inradius_base(k0, l0)?;
    cert.r = cert.r * fk / fl;
    Ok(cert)
}

fn peel<T: Scalar>(body: &ConvexBody<T>) -> (&ConvexBody<T>, T) {
    let mut cur = body;
    let mut f = T::one();
    while let ConvexBody::Dilate { inner, factor } = cur {
        f = f * *factor;
        cur = inner;
    }
    (cur, f)
}

fn inradius_base<T: Scalar>(k: &ConvexBody<T>, l: &ConvexBody<T>) -> Result<InradiusCert<T>> {
    // Polyhedral K: r = min_i b_i / h_L(a_i), smallest index on ties.
    if let Some(hs) = k.as_halfspaces() {
        let mut best: Option<(T, usize)> = None;
        for (i, h) in hs.iter().enumerate().step_by(2) {
            // Symmetric L: h_L(a) = h_L(-a), one sign suffices.
            let ratio = h.offset / l.support(&h.normal);
            if best.map_or(true, |(r, _)| ratio < r) {
                best = Some((ratio, i));
            }
        }
        let (r, i) = best.expect("polyhedral body has facets");
        return Ok(InradiusCert { r, touching_normal: hs[i].normal.clone(), exact: true });
    }
    if let ConvexBody::EuclideanBall { radius, .. } = k {
        let (circ, dir) = l.circumradius_with_direction();
        let exact = !matches!(l, ConvexBody::SymmetricPolytope { .. } if l.dim() >= 4);
        return Ok(InradiusCert { r: *radius / circ, touching_normal: dir, exact });
    }
    // General fallback: r = inf_u ||u||_L / ||u||_K over a direction net,
    // refined by local pattern search. Upper bound, marked inexact.
    let n = k.dim();
    let ratio = |u: &[T]| -> T {
        let nk = k.norm(u);
        if nk == T::zero() {
            T::infinity()
        } else {
            l.norm(u) / nk
        }
    };
    let net = direction_net::<T>(n, 4096 * n);
    let mut best_u = net[0].clone();
    let mut best = ratio(&best_u);
    for u in &net[1..] {
        let v = ratio(u);
        if v < best {
            best = v;
            best_u = u.clone();
        }
    }
    let mut step = T::of(0.1);
    while step > T::of(1e-7) {
        let mut improved = false;
        for i in 0..n {
            for sign in [T::one(), -T::one()] {
                let mut cand = best_u.clone();
                cand[i] += sign * step;
                let len = norm2(&cand);
                if len == T::zero() {
                    continue;
                }
                for v in cand.iter_mut() {
                    *v = *v / len;
                }
                let val = ratio(&cand);
                if val < best {
                    best = val;
                    best_u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / T::of(2.0);
        }
    }
    Ok(InradiusCert { r: best, touching_normal: best_u, exact: false })
}

/// Sandwich r_in L subset K subset r_out L.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationBracket<T> {
    pub r_in: T,
    pub r_out: T,
    pub inner_cert: InradiusCert<T>,
    pub outer_cert: InradiusCert<T>,
}

pub fn dilation_bracket<T: Scalar>(k: &ConvexBody<T>, l: &ConvexBody<T>) -> Result<DilationBracket<T>> {
    let inner = inradius(k, l)?;
    let outer = inradius(l, k)?;
    Ok(DilationBracket { r_in: inner.r, r_out: outer.r.recip(), inner_cert: inner, outer_cert: outer })
}
