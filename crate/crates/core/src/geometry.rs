//! Points of the unit ball and sphere of C^n, Möbius automorphisms and
//! hyperbolic distances.
//!
//! The automorphism `φ_a` swaps `0` and `a`:
//!
//! ```text
//! φ_a(z) = (a - P_a z - sqrt(1 - |a|²) (z - P_a z)) / (1 - ⟨z, a⟩),   P_a z = a ⟨z, a⟩ / ⟨a, a⟩
//! ```
//!
//! `P_a` is undefined at `a = 0`. We use `φ_0(z) = -z`, the limit that keeps
//! `φ_a(0) = a` and the identity
//! `1 - |φ_a(z)|² = (1 - |z|²)(1 - |a|²) / |1 - ⟨z, a⟩|²` valid.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_dim, invalid, Error, Result};

/// Tolerance on `| |ζ| - 1 |` for sphere points.
pub const SPHERE_TOL: f64 = 1e-12;

/// `Σ z_k conj(w_k)` on raw coordinate slices. Caller guarantees equal length.
#[inline]
pub(crate) fn inner_raw(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

#[inline]
pub(crate) fn norm_sqr_raw(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

#[inline]
pub(crate) fn dist_sqr_raw(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// Standard Hermitian product `⟨z, w⟩ = Σ z_k conj(w_k)`.
pub fn hermitian_inner(z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    check_dim(z.len(), w.len())?;
    Ok(inner_raw(z, w))
}

/// Euclidean norm `|z|`.
pub fn norm(z: &[Complex64]) -> f64 {
    norm_sqr_raw(z).sqrt()
}

/// A point of the open unit ball of C^n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("ball point needs dimension n >= 1");
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("ball point coordinate".into()));
        }
        let r = norm(&coords);
        if r >= 1.0 {
            return Err(Error::OutsideBall { norm: r });
        }
        Ok(Self { coords })
    }

    /// Skips validation; only for results that lie in the ball by construction.
    pub(crate) fn from_raw(coords: Vec<Complex64>) -> Self {
        debug_assert!(norm(&coords) < 1.0 + 1e-12);
        Self { coords }
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Convenience for real-coordinate points of the disc.
    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_raw(&self.coords)
    }
}

/// A point of the unit sphere `∂B^n`. Normalized on construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePoint {
    coords: Vec<Complex64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("sphere point needs dimension n >= 1");
        }
        let r = norm(&coords);
        if !r.is_finite() {
            return Err(Error::NonFinite("sphere point coordinate".into()));
        }
        if r == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            coords: coords.into_iter().map(|c| c / r).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }
}

/// A point `x` of the real ball `B_R^m(a, r)`, kept together with its ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealBallPoint {
    coords: Vec<f64>,
    center: Vec<f64>,
    radius: f64,
}

impl RealBallPoint {
    pub fn new(coords: Vec<f64>, center: Vec<f64>, radius: f64) -> Result<Self> {
        check_dim(center.len(), coords.len())?;
        if coords.is_empty() {
            return invalid("real ball point needs dimension m >= 1");
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid(format!("radius must be positive, got {radius}"));
        }
        let distance = real_dist(&coords, &center);
        if !(distance < radius) {
            return Err(Error::OutsideRealBall { distance, radius });
        }
        Ok(Self {
            coords,
            center,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `x - a`.
    pub fn offset(&self) -> Vec<f64> {
        self.coords
            .iter()
            .zip(&self.center)
            .map(|(x, a)| x - a)
            .collect()
    }
}

pub(crate) fn real_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Orthogonal projection of `z` onto the complex line through `a`.
pub fn projection_onto(a: &BallPoint, z: &BallPoint) -> Result<Vec<Complex64>> {
    check_dim(a.dim(), z.dim())?;
    projection_raw(a.coords(), z.coords())
}

fn projection_raw(a: &[Complex64], z: &[Complex64]) -> Result<Vec<Complex64>> {
    let aa = norm_sqr_raw(a);
    if aa == 0.0 {
        return Err(Error::UndefinedProjection);
    }
    let coef = inner_raw(z, a) / aa;
    Ok(a.iter().map(|ak| ak * coef).collect())
}

/// `φ_a(z)` on raw coordinates, with `φ_0(z) = -z`.
pub(crate) fn mobius_raw(a: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    let aa = norm_sqr_raw(a);
    if aa == 0.0 {
        return z.iter().map(|c| -c).collect();
    }
    let coef = inner_raw(z, a) / aa;
    let s = (1.0 - aa).sqrt();
    let denom = Complex64::new(1.0, 0.0) - inner_raw(z, a);
    a.iter()
        .zip(z)
        .map(|(ak, zk)| {
            let pk = ak * coef;
            (ak - pk - (zk - pk) * s) / denom
        })
        .collect()
}

/// The Möbius automorphism `φ_a(z)`.
pub fn mobius(a: &BallPoint, z: &BallPoint) -> Result<BallPoint> {
    check_dim(a.dim(), z.dim())?;
    Ok(BallPoint::from_raw(mobius_raw(a.coords(), z.coords())))
}

/// Residual of `1 - |φ_a(z)|² = (1 - |z|²)(1 - |a|²) / |1 - ⟨z, a⟩|²`.
pub fn mobius_identity_residual(a: &BallPoint, z: &BallPoint) -> Result<f64> {
    check_dim(a.dim(), z.dim())?;
    let phi = mobius_raw(a.coords(), z.coords());
    let lhs = 1.0 - norm_sqr_raw(&phi);
    let denom = (Complex64::new(1.0, 0.0) - inner_raw(z.coords(), a.coords())).norm_sqr();
    let rhs = (1.0 - z.norm_sqr()) * (1.0 - a.norm_sqr()) / denom;
    Ok((lhs - rhs).abs())
}

/// Pseudo-hyperbolic distance `|(z - w) / (1 - conj(z) w)|` in the disc.
pub fn pseudo_hyperbolic_scalar(z: Complex64, w: Complex64) -> f64 {
    ((z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)).norm()
}

/// Hyperbolic distance `arctanh |(z - w) / (1 - conj(z) w)|` on raw disc points.
pub fn hyp_dist_scalar(z: Complex64, w: Complex64) -> f64 {
    pseudo_hyperbolic_scalar(z, w).min(1.0).atanh()
}

/// Hyperbolic distance between two points of the disc (`n = 1` only).
pub fn hyperbolic_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    check_dim(1, z.dim())?;
    check_dim(1, w.dim())?;
    Ok(hyp_dist_scalar(z.coords()[0], w.coords()[0]))
}

/// Membership in the pseudo-hyperbolic ball `E(a, r) = {z : |φ_a(z)| < r}`.
pub fn in_pseudo_ball(a: &BallPoint, r: f64, z: &BallPoint) -> Result<bool> {
    if !(r > 0.0 && r < 1.0) {
        return invalid(format!("pseudo-ball radius must lie in (0, 1), got {r}"));
    }
    check_dim(a.dim(), z.dim())?;
    Ok(norm(&mobius_raw(a.coords(), z.coords())) < r)
}
