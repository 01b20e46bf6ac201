//! Geometric primitives shared by the body and section machinery:
//! vector helpers, unit-ball volumes, H-representation vertex enumeration
//! (n <= 3), a dense simplex solver for support functions in higher
//! dimension, the exact circle-rectangle overlap area, and deterministic
//! direction nets.

use crate::error::{Error, Result};
use crate::rng::{derive_key, CounterRng};
use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn normalize<T: Scalar>(a: &[T]) -> Vec<T> {
    let n = norm2(a);
    a.iter().map(|&x| x / n).collect()
}

/// Volume of the n-dimensional Euclidean unit ball.
///
/// kappa_1 = 2, kappa_2 = pi, kappa_n = kappa_{n-2} * 2 pi / n. The
/// recurrence keeps kappa_2 = pi bit-exact, which the rectangle demo
/// relies on.
pub fn unit_ball_volume<T: Scalar>(n: usize) -> T {
    assert!(n >= 1);
    let (mut k, mut val) = if n % 2 == 0 {
        (2usize, T::PI())
    } else {
        (1usize, T::of(2.0))
    };
    while k < n {
        k += 2;
        val = val * (T::of(2.0) * T::PI()) / T::of_usize(k);
    }
    if n == 0 {
        T::one()
    } else {
        val
    }
}

/// Surface measure of the unit sphere S^{n-1}: n * kappa_n.
pub fn unit_sphere_area<T: Scalar>(n: usize) -> T {
    T::of_usize(n) * unit_ball_volume::<T>(n)
}

/// ln volume of the l_p ball {sum |x_i/a_i|^p <= 1}; p = +inf is the box.
pub fn ln_lp_ball_volume<T: Scalar>(p: T, semi_axes: &[T]) -> T {
    use statrs::function::gamma::ln_gamma;
    let n = semi_axes.len();
    let ln_axes: T = semi_axes.iter().map(|&a| a.ln()).sum();
    if p == T::infinity() {
        return T::of_usize(n) * T::of(2.0).ln() + ln_axes;
    }
    let pf = p.to_f64_lossy();
    let nf = n as f64;
    let ln_shape = nf * ln_gamma(1.0 + 1.0 / pf) - ln_gamma(1.0 + nf / pf);
    T::of_usize(n) * T::of(2.0).ln() + T::of(ln_shape) + ln_axes
}

/// Orthonormal basis of the hyperplane xi-perp (n-1 vectors), via the
/// Householder reflector taking e_k to xi (k = argmax |xi_k|).
pub fn orthonormal_basis_perp<T: Scalar>(xi: &[T]) -> Vec<Vec<T>> {
    let n = xi.len();
    let u = normalize(xi);
    let k = (0..n)
        .max_by(|&i, &j| {
            u[i].abs()
                .partial_cmp(&u[j].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    // v = u - sign(u_k) e_k; H = I - 2 vv^T/|v|^2 maps sign(u_k) e_k to u,
    // so the remaining columns of H span u-perp.
    let sign = if u[k] >= T::zero() { T::one() } else { -T::one() };
    let mut v = u.clone();
    v[k] -= sign;
    let vv = dot(&v, &v);
    let mut basis = Vec::with_capacity(n - 1);
    for j in 0..n {
        if j == k {
            continue;
        }
        let mut col = vec![T::zero(); n];
        col[j] = T::one();
        if vv > T::zero() {
            let c = T::of(2.0) * v[j] / vv;
            for i in 0..n {
                col[i] -= c * v[i];
            }
        }
        basis.push(col);
    }
    basis
}

/// A halfspace <c, x> <= d with unit normal c.
#[derive(Debug, Clone)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

/// Enumerate the vertices of {x : <c_j, x> <= d_j} in dimension 2 or 3 by
/// solving all normal-system intersections and keeping feasible points.
/// Duplicate vertices (within a relative tolerance) are merged.
pub fn enumerate_vertices<T: Scalar>(hs: &[Halfspace<T>]) -> Result<Vec<Vec<T>>> {
    let n = hs.first().map(|h| h.normal.len()).unwrap_or(0);
    if n != 2 && n != 3 {
        return Err(Error::Unsupported(format!(
            "vertex enumeration implemented for n <= 3, got n = {n}"
        )));
    }
    let scale = hs
        .iter()
        .map(|h| h.offset.abs())
        .fold(T::one(), T::max);
    let tol = T::of(1e-9) * scale;
    let m = hs.len();
    let mut verts: Vec<Vec<T>> = Vec::new();
    let mut push = |v: Vec<T>| {
        for w in &verts {
            let d: T = v
                .iter()
                .zip(w.iter())
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            if d.sqrt() < tol {
                return;
            }
        }
        verts.push(v);
    };
    let feasible = |x: &[T]| hs.iter().all(|h| dot(&h.normal, x) <= h.offset + tol);
    if n == 2 {
        for i in 0..m {
            for j in (i + 1)..m {
                if let Some(x) = solve2(&hs[i], &hs[j]) {
                    if feasible(&x) {
                        push(x);
                    }
                }
            }
        }
    } else {
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    if let Some(x) = solve3(&hs[i], &hs[j], &hs[k]) {
                        if feasible(&x) {
                            push(x);
                        }
                    }
                }
            }
        }
    }
    if verts.is_empty() {
        return Err(Error::Degenerate("H-representation has no vertices".into()));
    }
    Ok(verts)
}

fn solve2<T: Scalar>(a: &Halfspace<T>, b: &Halfspace<T>) -> Option<Vec<T>> {
    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
    if det.abs() < T::of(1e-12) {
        return None;
    }
    let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
    let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
    Some(vec![x, y])
}

fn solve3<T: Scalar>(a: &Halfspace<T>, b: &Halfspace<T>, c: &Halfspace<T>) -> Option<Vec<T>> {
    let m = [&a.normal, &b.normal, &c.normal];
    let d = [a.offset, b.offset, c.offset];
    let det = det3(m[0], m[1], m[2]);
    if det.abs() < T::of(1e-12) {
        return None;
    }
    // Cramer's rule, replacing one column at a time.
    let mut x = vec![T::zero(); 3];
    for col in 0..3 {
        let mut cols: Vec<Vec<T>> = (0..3).map(|r| m[r].clone()).collect();
        for (r, row) in cols.iter_mut().enumerate() {
            row[col] = d[r];
        }
        x[col] = det3(&cols[0], &cols[1], &cols[2]) / det;
    }
    Some(x)
}

fn det3<T: Scalar>(r0: &[T], r1: &[T], r2: &[T]) -> T {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// Area of a 2-D convex vertex set (sorted internally by angle around the
/// centroid, then shoelace).
pub fn convex_polygon_area<T: Scalar>(verts: &[Vec<T>]) -> T {
    if verts.len() < 3 {
        return T::zero();
    }
    let sorted = sort_ccw(verts);
    let mut area = T::zero();
    for i in 0..sorted.len() {
        let a = &sorted[i];
        let b = &sorted[(i + 1) % sorted.len()];
        area += a[0] * b[1] - b[0] * a[1];
    }
    (area / T::of(2.0)).abs()
}

fn sort_ccw<T: Scalar>(verts: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = T::of_usize(verts.len());
    let cx: T = verts.iter().map(|v| v[0]).sum::<T>() / n;
    let cy: T = verts.iter().map(|v| v[1]).sum::<T>() / n;
    let mut vs: Vec<Vec<T>> = verts.to_vec();
    vs.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
    });
    vs
}

/// Volume of a bounded H-polytope containing the origin, n <= 3, by fan
/// decomposition from the origin: V = (1/n) * sum_j offset_j * facet_area_j
/// (unit normals). Facets that carry fewer than n vertices are redundant
/// and contribute nothing.
pub fn h_polytope_volume<T: Scalar>(hs: &[Halfspace<T>]) -> Result<T> {
    let n = hs.first().map(|h| h.normal.len()).unwrap_or(0);
    let verts = enumerate_vertices(hs)?;
    let scale = hs.iter().map(|h| h.offset.abs()).fold(T::one(), T::max);
    let tol = T::of(1e-8) * scale;
    let mut vol = T::zero();
    for h in hs {
        let on: Vec<Vec<T>> = verts
            .iter()
            .filter(|v| (dot(&h.normal, v) - h.offset).abs() < tol)
            .cloned()
            .collect();
        if on.len() < n {
            continue;
        }
        let facet = if n == 2 {
            // Segment length.
            let d: T = on
                .iter()
                .skip(1)
                .map(|v| {
                    let dx = v[0] - on[0][0];
                    let dy = v[1] - on[0][1];
                    (dx * dx + dy * dy).sqrt()
                })
                .fold(T::zero(), T::max);
            d
        } else {
            // Project facet vertices onto a basis of the facet plane.
            let basis = orthonormal_basis_perp(&h.normal);
            let flat: Vec<Vec<T>> = on
                .iter()
                .map(|v| vec![dot(&basis[0], v), dot(&basis[1], v)])
                .collect();
            convex_polygon_area(&flat)
        };
        vol += h.offset * facet;
    }
    Ok(vol / T::of_usize(n))
}

/// Maximize <c, x> subject to A x <= b (b >= 0, feasible at the origin)
/// with a dense simplex tableau and Bland's rule. Free variables are split
/// x = u - w. Small systems only; this backs polytope support functions in
/// n >= 4 where vertex enumeration is unavailable.
pub fn simplex_max<T: Scalar>(c: &[T], a_rows: &[Vec<T>], b: &[T]) -> Result<T> {
    let m = a_rows.len();
    let n = c.len();
    debug_assert_eq!(b.len(), m);
    let cols = 2 * n + m; // u, w, slacks
    let mut tab = vec![vec![T::zero(); cols + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            tab[i][j] = a_rows[i][j];
            tab[i][n + j] = -a_rows[i][j];
        }
        tab[i][2 * n + i] = T::one();
        tab[i][cols] = b[i];
    }
    for j in 0..n {
        tab[m][j] = -c[j];
        tab[m][n + j] = c[j];
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * n + i).collect();
    let eps = T::of(1e-12);
    for _pivots in 0..20_000 {
        // Bland: entering = smallest index with negative reduced cost.
        let mut enter = None;
        for (j, &cost) in tab[m][..cols].iter().enumerate() {
            if cost < -eps {
                enter = Some(j);
                break;
            }
        }
        let Some(e) = enter else {
            return Ok(tab[m][cols]);
        };
        // Ratio test, Bland tie-break on smallest basis index.
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if tab[i][e] > eps {
                let ratio = tab[i][cols] / tab[i][e];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr - eps
                            || (ratio < *lr + eps && basis[i] < basis[*li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, _)) = leave else {
            return Err(Error::InvalidBody(
                "support LP unbounded: facet normals do not span the space".into(),
            ));
        };
        // Pivot on (l, e).
        let piv = tab[l][e];
        for v in tab[l].iter_mut() {
            *v /= piv;
        }
        for i in 0..=m {
            if i != l {
                let f = tab[i][e];
                if f != T::zero() {
                    let row_l = tab[l].clone();
                    for (v, &rv) in tab[i].iter_mut().zip(row_l.iter()) {
                        *v -= f * rv;
                    }
                }
            }
        }
        basis[l] = e;
    }
    Err(Error::Unsupported("simplex iteration limit exceeded".into()))
}

/// integral_0^c sqrt(t^2 - x^2) dx for 0 <= c <= t.
fn circle_segment_integral<T: Scalar>(t: T, c: T) -> T {
    let c = c.min(t);
    let s = (t * t - c * c).max(T::zero()).sqrt();
    let ratio = (c / t).min(T::one());
    (c * s + t * t * ratio.asin()) / T::of(2.0)
}

/// Exact area of the disc of radius t intersected with the origin-centered
/// rectangle of half-widths (w, h). The saturated branches return
/// pi * t * t and 4 * w * h without touching the trigonometric path, so
/// they are bitwise-stable for downstream equality checks.
pub fn circle_box_area<T: Scalar>(t: T, w: T, h: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t <= w.min(h) {
        return T::PI() * (t * t);
    }
    let rr = t * t;
    if rr >= w * w + h * h {
        return T::of(4.0) * w * h;
    }
    let xmax = w.min(t);
    let quadrant = if t <= h {
        circle_segment_integral(t, xmax)
    } else {
        // Circle crosses the top edge at x_s; left of it the box cap is
        // flat at height h, right of it the arc takes over.
        let xs = (rr - h * h).sqrt();
        h * xs + circle_segment_integral(t, xmax) - circle_segment_integral(t, xs)
    };
    T::of(4.0) * quadrant
}

/// Deterministic unit-direction net of the requested size.
///
/// n = 2 uses equally spaced angles over the half-circle (directions are
/// only ever consumed through even functionals), n = 3 the Fibonacci
/// spiral, and n >= 4 normalized Gaussian vectors from a fixed-key counter
/// stream, so the net never depends on run-time state.
pub fn direction_net<T: Scalar>(n: usize, count: usize) -> Vec<Vec<T>> {
    assert!(n >= 1 && count >= 1);
    if n == 1 {
        return vec![vec![T::one()]];
    }
    let mut net = Vec::with_capacity(count);
    match n {
        2 => {
            for j in 0..count {
                let theta = T::PI() * T::of_usize(j) / T::of_usize(count);
                net.push(vec![theta.cos(), theta.sin()]);
            }
        }
        3 => {
            let golden = T::of(1.618033988749894848);
            for j in 0..count {
                let z = T::one()
                    - T::of(2.0) * (T::of_usize(j) + T::of(0.5)) / T::of_usize(count);
                let r = (T::one() - z * z).max(T::zero()).sqrt();
                let phi = T::of(2.0) * T::PI() * T::of_usize(j) / golden;
                net.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
        }
        _ => {
            let mut rng = CounterRng::new(derive_key(0x6e65745f6469, n as u64));
            for _ in 0..count {
                loop {
                    let v: Vec<T> = (0..n).map(|_| T::of(rng.next_normal())).collect();
                    let len = norm2(&v);
                    if len > T::of(1e-6) {
                        net.push(v.iter().map(|&x| x / len).collect());
                        break;
                    }
                }
            }
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert_eq!(unit_ball_volume::<f64>(2), std::f64::consts::PI);
        assert!((unit_ball_volume::<f64>(3) - 4.188790204786391).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
        assert!((unit_sphere_area::<f64>(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn lp_volume_oracles() {
        // p = 2 recovers kappa_n, p = inf the box, p = 1 the cross-polytope.
        let v2 = ln_lp_ball_volume(2.0f64, &[1.0, 1.0, 1.0]).exp();
        assert!((v2 - unit_ball_volume::<f64>(3)).abs() < 1e-12);
        let vinf = ln_lp_ball_volume(f64::INFINITY, &[1.0, 2.0]).exp();
        assert!((vinf - 8.0).abs() < 1e-12);
        let v1 = ln_lp_ball_volume(1.0f64, &[1.0, 1.0, 1.0]).exp();
        assert!((v1 - 8.0 / 6.0).abs() < 1e-12);
        // Frozen oracle: p = 1.5 in the plane, unit axes.
        let v15 = ln_lp_ball_volume(1.5f64, &[1.0, 1.0]).exp();
        assert!((v15 - 2.7378536239189029).abs() < 1e-12, "got {v15}");
    }

    #[test]
    fn square_vertices_and_volume() {
        let hs: Vec<Halfspace<f64>> = vec![
            Halfspace { normal: vec![1.0, 0.0], offset: 1.0 },
            Halfspace { normal: vec![-1.0, 0.0], offset: 1.0 },
            Halfspace { normal: vec![0.0, 1.0], offset: 1.0 },
            Halfspace { normal: vec![0.0, -1.0], offset: 1.0 },
        ];
        let vs = enumerate_vertices(&hs).unwrap();
        assert_eq!(vs.len(), 4);
        assert!((h_polytope_volume(&hs).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cube_and_octahedron_volume() {
        let mut cube: Vec<Halfspace<f64>> = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut nv = vec![0.0; 3];
                nv[k] = s;
                cube.push(Halfspace { normal: nv, offset: 1.0 });
            }
        }
        assert!((h_polytope_volume(&cube).unwrap() - 8.0).abs() < 1e-10);

        let mut octa: Vec<Halfspace<f64>> = Vec::new();
        let s3 = 3f64.sqrt().recip();
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    octa.push(Halfspace {
                        normal: vec![sx * s3, sy * s3, sz * s3],
                        offset: s3,
                    });
                }
            }
        }
        // Octahedron with vertices at +-e_i: volume 4/3.
        assert!((h_polytope_volume(&octa).unwrap() - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn simplex_matches_vertex_support() {
        // Support of the unit square in direction (1, 2): |1| + |2| = 3.
        let rows = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let b = vec![1.0, 1.0, 1.0, 1.0];
        let v: f64 = simplex_max(&[1.0, 2.0], &rows, &b).unwrap();
        assert!((v - 3.0).abs() < 1e-10);
        // Rotated direction on a diamond |x|+|y| <= 1: support = max |u_i|.
        let rows2 = vec![
            vec![0.5f64.sqrt(), 0.5f64.sqrt()],
            vec![-(0.5f64.sqrt()), 0.5f64.sqrt()],
            vec![0.5f64.sqrt(), -(0.5f64.sqrt())],
            vec![-(0.5f64.sqrt()), -(0.5f64.sqrt())],
        ];
        let b2 = vec![0.5f64.sqrt(); 4];
        let v2 = simplex_max(&[1.0, 0.0], &rows2, &b2).unwrap();
        assert!((v2 - 1.0).abs() < 1e-10, "got {v2}");
    }

    #[test]
    fn circle_box_oracles() {
        let w = std::f64::consts::FRAC_PI_2;
        let h = 0.5;
        // Disc inside the rectangle: exactly pi t^2.
        let t = 0.25;
        assert_eq!(circle_box_area(t, w, h), std::f64::consts::PI * (t * t));
        // Rectangle inside the disc: exactly the box area.
        assert_eq!(circle_box_area(2.0, w, h), 4.0 * w * h);
        // Frozen oracle at t = 1 (Remark-3 rectangle).
        let a = circle_box_area(1.0, w, h);
        assert!((a - 1.9132229549810364).abs() < 1e-14, "got {a}");
        // Corner distance threshold.
        let corner = (w * w + h * h).sqrt();
        assert!((corner - 1.6484541547378076).abs() < 1e-14);
        assert_eq!(circle_box_area(corner, w, h), 4.0 * w * h);
    }

    #[test]
    fn perp_basis_orthonormal() {
        let xi = vec![0.3f64, -1.2, 0.5];
        let basis = orthonormal_basis_perp(&xi);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(dot(b, &xi).abs() < 1e-12);
            assert!((norm2(b) - 1.0).abs() < 1e-12);
        }
        assert!(dot(&basis[0], &basis[1]).abs() < 1e-12);
    }

    #[test]
    fn nets_are_unit_and_deterministic() {
        for n in [2usize, 3, 4, 5] {
            let net = direction_net::<f64>(n, 32);
            let net2 = direction_net::<f64>(n, 32);
            assert_eq!(net.len(), 32);
            for (u, v) in net.iter().zip(net2.iter()) {
                assert_eq!(u, v);
                assert!((norm2(u) - 1.0).abs() < 1e-12);
            }
        }
    }
}
