//! Hyperbolic space of curvature -1, stored in the hyperboloid model.
//!
//! Points live on the upper sheet of `-x0^2 + x1^2 + ... + xd^2 = -1`.
//! Conversions to the Poincare ball, the upper half-space and the Klein
//! model are provided; in the half-space model the last coordinate is the
//! height.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points farther than this from the model origin are rejected.
pub const MAX_RADIUS: f64 = 34.0;

const SHEET_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-12;

/// Minkowski form with signature (-,+,...,+).
#[inline]
pub fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = -a[0] * b[0];
    for i in 1..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Hyperboloid,
    Ball,
    Halfspace,
    Klein,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Model::Hyperboloid => "hyperboloid",
            Model::Ball => "ball",
            Model::Halfspace => "halfspace",
            Model::Klein => "klein",
        };
        f.write_str(s)
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hyperboloid" => Ok(Model::Hyperboloid),
            "ball" => Ok(Model::Ball),
            "halfspace" => Ok(Model::Halfspace),
            "klein" => Ok(Model::Klein),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

/// A point of d-dimensional hyperbolic space (hyperboloid coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    coords: Vec<f64>,
}

impl HPoint {
    /// Validates hyperboloid coordinates `(x0, x1, ..., xd)`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidArgument("need d >= 2".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        if coords[0] < 1.0 - SHEET_TOL {
            return Err(Error::InvalidArgument("point not on the upper sheet".into()));
        }
        let q = minkowski(&coords, &coords);
        if (q + 1.0).abs() > SHEET_TOL * coords[0] * coords[0] {
            return Err(Error::InvalidArgument(format!("<x,x> = {q}, expected -1")));
        }
        Self::from_spatial(&coords[1..])
    }

    /// The point whose spatial hyperboloid coordinates are `x`; `x0` is recomputed.
    pub fn from_spatial(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::InvalidArgument("need d >= 2".into()));
        }
        let n2: f64 = x.iter().map(|v| v * v).sum();
        if !n2.is_finite() {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let x0 = (1.0 + n2).sqrt();
        let r = x0.acosh();
        if r > MAX_RADIUS {
            return Err(Error::OutOfRange(r));
        }
        let mut coords = Vec::with_capacity(x.len() + 1);
        coords.push(x0);
        coords.extend_from_slice(x);
        Ok(HPoint { coords })
    }

    pub fn origin(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[0] = 1.0;
        HPoint { coords }
    }

    /// Point at distance `r` from the origin in the direction of `dir` (normalized here).
    pub fn from_polar(r: f64, dir: &[f64]) -> Result<Self> {
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 || r < 0.0 {
            return Err(Error::InvalidArgument("bad polar coordinates".into()));
        }
        let s = r.sinh() / n;
        let x: Vec<f64> = dir.iter().map(|v| v * s).collect();
        Self::from_spatial(&x)
    }

    /// Planar polar coordinates around the origin.
    pub fn polar2(r: f64, phi: f64) -> Result<Self> {
        Self::from_polar(r, &[phi.cos(), phi.sin()])
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn spatial(&self) -> &[f64] {
        &self.coords[1..]
    }

    /// Distance to the model origin.
    pub fn radius(&self) -> f64 {
        let s = self.spatial().iter().map(|v| v * v).sum::<f64>().sqrt();
        s.asinh()
    }

    pub fn to_ball(&self) -> Result<Vec<f64>> {
        let b: Vec<f64> = self.spatial().iter().map(|v| v / (1.0 + self.coords[0])).collect();
        let n = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1.0 - BOUNDARY_TOL {
            return Err(Error::Precision(format!("ball norm {n} too close to 1")));
        }
        Ok(b)
    }

    pub fn from_ball(b: &[f64]) -> Result<Self> {
        let n2: f64 = b.iter().map(|v| v * v).sum();
        if n2.sqrt() > 1.0 - BOUNDARY_TOL {
            return Err(Error::Precision("ball point too close to the boundary".into()));
        }
        let den = 1.0 - n2;
        let x: Vec<f64> = b.iter().map(|v| 2.0 * v / den).collect();
        Self::from_spatial(&x)
    }

    /// Klein coordinates without the boundary check.
    pub fn klein_unchecked(&self) -> Vec<f64> {
        self.spatial().iter().map(|v| v / self.coords[0]).collect()
    }

    pub fn to_klein(&self) -> Result<Vec<f64>> {
        let k = self.klein_unchecked();
        let n = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1.0 - BOUNDARY_TOL {
            return Err(Error::Precision(format!("klein norm {n} too close to 1")));
        }
        Ok(k)
    }

    pub fn from_klein(k: &[f64]) -> Result<Self> {
        let n2: f64 = k.iter().map(|v| v * v).sum();
        if n2.sqrt() > 1.0 - BOUNDARY_TOL {
            return Err(Error::Precision("klein point too close to the boundary".into()));
        }
        let x0 = 1.0 / (1.0 - n2).sqrt();
        let x: Vec<f64> = k.iter().map(|v| v * x0).collect();
        Self::from_spatial(&x)
    }

    /// Upper half-space coordinates `(u1, ..., u_{d-1}, h)` with `h > 0`.
    pub fn to_halfspace(&self) -> Vec<f64> {
        let d = self.dim();
        let x = &self.coords;
        // x0 - xd, computed without cancellation when xd > 0
        let w = if x[d] > 0.0 {
            let lat: f64 = x[1..d].iter().map(|v| v * v).sum();
            (1.0 + lat) / (x[0] + x[d])
        } else {
            x[0] - x[d]
        };
        let mut out: Vec<f64> = x[1..d].iter().map(|v| v / w).collect();
        out.push(1.0 / w);
        out
    }

    pub fn from_halfspace(u: &[f64]) -> Result<Self> {
        let d = u.len();
        if d < 2 {
            return Err(Error::InvalidArgument("need d >= 2".into()));
        }
        let h = u[d - 1];
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument("half-space height must be positive".into()));
        }
        let lat: f64 = u[..d - 1].iter().map(|v| v * v).sum();
        let mut x: Vec<f64> = u[..d - 1].iter().map(|v| v / h).collect();
        x.push((h * h + lat - 1.0) / (2.0 * h));
        Self::from_spatial(&x)
    }

    pub fn to_model(&self, model: Model) -> Result<Vec<f64>> {
        match model {
            Model::Hyperboloid => Ok(self.coords.clone()),
            Model::Ball => self.to_ball(),
            Model::Halfspace => Ok(self.to_halfspace()),
            Model::Klein => self.to_klein(),
        }
    }

    pub fn from_model(model: Model, c: &[f64]) -> Result<Self> {
        match model {
            Model::Hyperboloid => Self::new(c.to_vec()),
            Model::Ball => Self::from_ball(c),
            Model::Halfspace => Self::from_halfspace(c),
            Model::Klein => Self::from_klein(c),
        }
    }
}

/// Hyperbolic distance. Panics on a dimension mismatch; see [`checked_dist`].
#[inline]
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    assert_eq!(p.coords.len(), q.coords.len(), "dimension mismatch");
    raw_dist(&p.coords, &q.coords)
}

pub fn checked_dist(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(raw_dist(&p.coords, &q.coords))
}

#[inline]
pub(crate) fn raw_dist(a: &[f64], b: &[f64]) -> f64 {
    let c = -minkowski(a, b);
    if c < 2.0 {
        // chord form, accurate for nearby points
        let mut m = -(a[0] - b[0]) * (a[0] - b[0]);
        for i in 1..a.len() {
            m += (a[i] - b[i]) * (a[i] - b[i]);
        }
        2.0 * (m.max(0.0).sqrt() / 2.0).asinh()
    } else {
        c.acosh()
    }
}

/// Distance computed from Poincare ball coordinates.
pub fn ball_dist(a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let na: f64 = a.iter().map(|v| v * v).sum();
    let nb: f64 = b.iter().map(|v| v * v).sum();
    let arg = 2.0 * d2 / ((1.0 - na) * (1.0 - nb));
    // acosh(1 + t) = 2 asinh(sqrt(t/2))
    2.0 * (arg / 2.0).sqrt().asinh()
}

/// Distance computed from half-space coordinates.
pub fn halfspace_dist(a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let ha = a[a.len() - 1];
    let hb = b[b.len() - 1];
    let arg = d2 / (2.0 * ha * hb);
    2.0 * (arg / 2.0).sqrt().asinh()
}

/// A totally geodesic hyperplane `{x : <x, normal> = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub basepoint: HPoint,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, basepoint: HPoint) -> Result<Self> {
        if normal.len() != basepoint.coords.len() {
            return Err(Error::DimensionMismatch(normal.len() - 1, basepoint.dim()));
        }
        let nn = minkowski(&normal, &normal);
        if nn <= 0.0 {
            return Err(Error::InvalidArgument("normal must be spacelike".into()));
        }
        let s = nn.sqrt();
        let normal: Vec<f64> = normal.iter().map(|v| v / s).collect();
        let off = minkowski(&normal, basepoint.coords());
        if off.abs() > 1e-9 * basepoint.coords[0] {
            return Err(Error::InvalidArgument("basepoint not on hyperplane".into()));
        }
        Ok(Hyperplane { normal, basepoint })
    }

    pub fn dim(&self) -> usize {
        self.basepoint.dim()
    }

    /// Mirror image of `p` in this hyperplane.
    pub fn reflect(&self, p: &HPoint) -> HPoint {
        let t = 2.0 * minkowski(p.coords(), &self.normal);
        let x: Vec<f64> = p.coords[1..].iter().zip(&self.normal[1..]).map(|(a, n)| a - t * n).collect();
        HPoint::from_spatial(&x).expect("reflection stays in range")
    }
}

/// Uniformly random unit vector in R^d.
pub fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Hyperplane through `p` with a uniformly random normal direction in the tangent space at `p`.
pub fn random_hyperplane_through<R: Rng + ?Sized>(p: &HPoint, rng: &mut R) -> Hyperplane {
    let d = p.dim();
    let u = random_direction(d, rng);
    let mut t = vec![0.0; d + 1];
    t[1..].copy_from_slice(&u);
    let normal = Isometry::boost_to(p).apply_vec(&t);
    Hyperplane { normal, basepoint: p.clone() }
}

/// Signed distance from `p` to `h`; the sign tells the side.
pub fn dist_to_hyperplane(p: &HPoint, h: &Hyperplane) -> Result<f64> {
    if p.dim() != h.dim() {
        return Err(Error::DimensionMismatch(p.dim(), h.dim()));
    }
    Ok(minkowski(p.coords(), &h.normal).asinh())
}

/// Linear map of Minkowski space preserving the form and the upper sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    n: usize,
    m: Vec<f64>,
}

impl Isometry {
    pub fn identity(d: usize) -> Self {
        let n = d + 1;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        Isometry { n, m }
    }

    /// Wraps a row-major `(d+1) x (d+1)` matrix after checking `M^T J M = J`.
    pub fn from_matrix(d: usize, m: Vec<f64>) -> Result<Self> {
        let n = d + 1;
        if m.len() != n * n {
            return Err(Error::InvalidArgument("matrix has wrong size".into()));
        }
        let iso = Isometry { n, m };
        if iso.form_defect() > 1e-8 || iso.m[0] < 0.0 {
            return Err(Error::InvalidArgument("matrix is not an isometry".into()));
        }
        Ok(iso)
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    /// Maximal entry of `|M^T J M - J|`, scaled by the matrix size.
    pub fn form_defect(&self) -> f64 {
        let n = self.n;
        let scale = self.m.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = -self.m[i] * self.m[j];
                for k in 1..n {
                    s += self.m[k * n + i] * self.m[k * n + j];
                }
                let target = if i != j {
                    0.0
                } else if i == 0 {
                    -1.0
                } else {
                    1.0
                };
                worst = worst.max((s - target).abs());
            }
        }
        worst / (scale * scale)
    }

    /// Boost taking the origin to `p`.
    pub fn boost_to(p: &HPoint) -> Self {
        let n = p.coords.len();
        let x0 = p.coords[0];
        let x = &p.coords[1..];
        let mut m = vec![0.0; n * n];
        m[0] = x0;
        for i in 1..n {
            m[i] = x[i - 1];
            m[i * n] = x[i - 1];
            for j in 1..n {
                m[i * n + j] = x[i - 1] * x[j - 1] / (1.0 + x0) + if i == j { 1.0 } else { 0.0 };
            }
        }
        Isometry { n, m }
    }

    /// Euclidean translation `u -> u + a` of the half-space model (`a` has d-1 entries).
    pub fn halfspace_translation(a: &[f64]) -> Self {
        let d = a.len() + 1;
        let n = d + 1;
        let a2: f64 = a.iter().map(|v| v * v).sum();
        let mut iso = Self::identity(d);
        let m = &mut iso.m;
        // w = x0 - xd is invariant; xi += ai w; x0, xd += a.y + |a|^2 w / 2
        for r in [0, d] {
            for i in 1..d {
                m[r * n + i] += a[i - 1];
            }
            m[r * n] += a2 / 2.0;
            m[r * n + d] -= a2 / 2.0;
        }
        for i in 1..d {
            m[i * n] += a[i - 1];
            m[i * n + d] -= a[i - 1];
        }
        iso
    }

    /// Homothety `p -> lambda p` of the half-space model.
    pub fn halfspace_scaling(d: usize, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let n = d + 1;
        let t = lambda.ln();
        let mut iso = Self::identity(d);
        iso.m[0] = t.cosh();
        iso.m[d] = t.sinh();
        iso.m[d * n] = t.sinh();
        iso.m[d * n + d] = t.cosh();
        iso
    }

    /// Reflection in a hyperplane.
    pub fn reflection(h: &Hyperplane) -> Self {
        let n = h.normal.len();
        let mut iso = Self::identity(n - 1);
        // x -> x - 2 <x,n> n, with <x,n> = -x0 n0 + sum xi ni
        for i in 0..n {
            for j in 0..n {
                let jn = if j == 0 { -h.normal[0] } else { h.normal[j] };
                iso.m[i * n + j] -= 2.0 * h.normal[i] * jn;
            }
        }
        iso
    }

    /// Rotation of the plane spanned by spatial axes `i`, `j` (1-based) by `theta`.
    pub fn rotation(d: usize, i: usize, j: usize, theta: f64) -> Self {
        let n = d + 1;
        let mut iso = Self::identity(d);
        let (c, s) = (theta.cos(), theta.sin());
        iso.m[i * n + i] = c;
        iso.m[i * n + j] = -s;
        iso.m[j * n + i] = s;
        iso.m[j * n + j] = c;
        iso
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.m[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m[i * n + j] += a * other.m[k * n + j];
                }
            }
        }
        Isometry { n, m }
    }

    pub fn inverse(&self) -> Isometry {
        // M^{-1} = J M^T J
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let s = if (i == 0) != (j == 0) { -1.0 } else { 1.0 };
                m[i * n + j] = s * self.m[j * n + i];
            }
        }
        Isometry { n, m }
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.m[i * n + j] * v[j]).sum()).collect()
    }

    pub fn apply(&self, p: &HPoint) -> Result<HPoint> {
        if p.coords.len() != self.n {
            return Err(Error::DimensionMismatch(p.dim(), self.dim()));
        }
        let v = self.apply_vec(&p.coords);
        HPoint::from_spatial(&v[1..])
    }
}

fn gamma_half(k: usize) -> f64 {
    // Gamma(k/2)
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Surface area of the unit sphere in R^d.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

fn simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with relative tolerance `rel`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // split into unit pieces so the exponential integrand is resolved
    let pieces = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let lo = a + i as f64 * h;
        let hi = lo + h;
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = h / 6.0 * (fa + 4.0 * fm + fb);
        let tol = (whole.abs() * rel).max(f64::MIN_POSITIVE);
        total += simpson(&f, lo, hi, fa, fm, fb, whole, tol, 48);
    }
    total
}

/// Volume of a radius-`r` ball in d-dimensional hyperbolic space.
pub fn ball_volume(d: usize, r: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative radius {r}")));
    }
    let k = (d - 1) as i32;
    Ok(sphere_area(d) * integrate(|x| x.sinh().powi(k), 0.0, r, 1e-13))
}

/// `int_0^r sinh^k`, by the reduction formula.
pub fn sinh_power_integral(k: usize, r: f64) -> f64 {
    match k {
        0 => r,
        1 => r.cosh() - 1.0,
        _ => {
            let kf = k as f64;
            r.sinh().powi(k as i32 - 1) * r.cosh() / kf - (kf - 1.0) / kf * sinh_power_integral(k - 2, r)
        }
    }
}

/// Radius of a point drawn uniformly from the ball of radius `big_r`.
pub fn sample_uniform_radius<R: Rng + ?Sized>(d: usize, big_r: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if d == 2 {
        return (1.0 + u * (big_r.cosh() - 1.0)).acosh();
    }
    let target = u * sinh_power_integral(d - 1, big_r);
    let (mut lo, mut hi) = (0.0, big_r);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sinh_power_integral(d - 1, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Uniform point in the ball of radius `big_r` about the origin.
pub fn sample_uniform_ball<R: Rng + ?Sized>(d: usize, big_r: f64, rng: &mut R) -> Result<HPoint> {
    if big_r > MAX_RADIUS {
        return Err(Error::OutOfRange(big_r));
    }
    let r = sample_uniform_radius(d, big_r, rng);
    let dir = random_direction(d, rng);
    HPoint::from_polar(r, &dir)
}

/// Point of the horosphere at height `t` of the half-space model with Euclidean coordinates `x`.
pub fn horosphere_embed(x: &[f64], t: f64) -> Result<HPoint> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("horosphere height must be positive, got {t}")));
    }
    let mut u = x.to_vec();
    u.push(t);
    HPoint::from_halfspace(&u)
}

/// Hyperbolic distance between horosphere points at Euclidean distance `e`.
pub fn horosphere_distance(e: f64, t: f64) -> f64 {
    2.0 * (e / (2.0 * t)).asinh()
}
