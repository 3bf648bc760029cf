//! Closed-form kernels.
//!
//! * `poisson_h`: the hyperbolic Poisson kernel `((1 - |z|²) / |z - ζ|²)^(2n-1)`
//!   of the unit ball of C^n, and its Wirtinger derivatives in `z`.
//! * `real_kernel_k`: the kernel `K(x, t)` of a real ball `B_R^m(a, r)`
//!   integrated against the unnormalized surface measure, and its gradient.
//!
//! Powers are taken as `exp(p * ln(q))` so large exponents near the boundary
//! do not overflow before the ratio is formed.

use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::{norm_sqr_raw, BallPoint, RealBallPoint, SpherePoint};

/// Squared distances below this are treated as a kernel singularity.
pub const SINGULAR_DIST_SQR: f64 = 1e-300;

const VOLUME_TABLE_LEN: usize = 21;

static VOLUME_TABLE: LazyLock<[f64; VOLUME_TABLE_LEN]> = LazyLock::new(|| {
    let mut v = [0.0; VOLUME_TABLE_LEN];
    v[0] = 1.0;
    v[1] = 2.0;
    for m in 2..VOLUME_TABLE_LEN {
        v[m] = 2.0 * PI / m as f64 * v[m - 2];
    }
    v
});

/// Volume `V(m) = π^(m/2) / Γ(m/2 + 1)` of the unit ball of R^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    if m < VOLUME_TABLE_LEN {
        VOLUME_TABLE[m]
    } else {
        2.0 * PI / m as f64 * unit_ball_volume(m - 2)
    }
}

/// Area `m V(m) r^(m-1)` of the sphere of radius `r` in R^m.
pub fn sphere_area(m: usize, r: f64) -> f64 {
    m as f64 * unit_ball_volume(m) * r.powi(m as i32 - 1)
}

fn singular(d2: f64) -> Error {
    Error::NearSingular(format!("|z - ζ|² = {d2:e} below {SINGULAR_DIST_SQR:e}"))
}

/// The kernel for a fixed interior point `z`, evaluated against many nodes.
#[derive(Debug, Clone)]
pub struct PoissonAt<'a> {
    z: &'a [Complex64],
    /// `2n - 1`
    exponent: i32,
    one_minus: f64,
}

impl<'a> PoissonAt<'a> {
    pub fn new(z: &'a [Complex64]) -> Result<Self> {
        let one_minus = 1.0 - norm_sqr_raw(z);
        if !(one_minus > 0.0) {
            return Err(Error::OutsideBall {
                norm: (1.0 - one_minus).sqrt(),
            });
        }
        Ok(Self {
            z,
            exponent: 2 * z.len() as i32 - 1,
            one_minus,
        })
    }

    fn dist_sqr(&self, zeta: &[Complex64]) -> Result<f64> {
        let d2: f64 = self
            .z
            .iter()
            .zip(zeta)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        if d2 < SINGULAR_DIST_SQR {
            return Err(singular(d2));
        }
        Ok(d2)
    }

    #[inline]
    pub fn value(&self, zeta: &[Complex64]) -> Result<f64> {
        let d2 = self.dist_sqr(zeta)?;
        Ok((self.one_minus / d2).powi(self.exponent))
    }

    /// Kernel value together with `∂/∂z_k` and `∂/∂z̄_k` for every `k`,
    /// written into `dz` and `dzbar`.
    #[inline]
    pub fn value_and_wirtinger(
        &self,
        zeta: &[Complex64],
        dz: &mut [Complex64],
        dzbar: &mut [Complex64],
    ) -> Result<f64> {
        let d2 = self.dist_sqr(zeta)?;
        let ratio = self.one_minus / d2;
        let value = ratio.powi(self.exponent);
        // (2n-1)(1-|z|²)^(2n-2) / |z-ζ|^(4n)
        let coef = self.exponent as f64 * ratio.powi(self.exponent - 1) / (d2 * d2);
        for (k, (zk, zetak)) in self.z.iter().zip(zeta).enumerate() {
            let zbk = zk.conj();
            dz[k] = -coef * (zbk * d2 + (zbk - zetak.conj()) * self.one_minus);
            dzbar[k] = -coef * (zk * d2 + (zk - zetak) * self.one_minus);
        }
        Ok(value)
    }
}

/// Hyperbolic Poisson kernel `P_h(z, ζ)`.
pub fn poisson_h(z: &BallPoint, zeta: &SpherePoint) -> Result<f64> {
    check_dim(z.dim(), zeta.dim())?;
    PoissonAt::new(z.coords())?.value(zeta.coords())
}

/// `(∂P_h/∂z_k, ∂P_h/∂z̄_k)` for a 1-based coordinate index `k`.
pub fn poisson_h_wirtinger(
    z: &BallPoint,
    zeta: &SpherePoint,
    k: usize,
) -> Result<(Complex64, Complex64)> {
    check_dim(z.dim(), zeta.dim())?;
    if k == 0 || k > z.dim() {
        return invalid(format!("coordinate index {k} outside 1..={}", z.dim()));
    }
    let n = z.dim();
    let mut dz = vec![Complex64::default(); n];
    let mut dzbar = vec![Complex64::default(); n];
    PoissonAt::new(z.coords())?.value_and_wirtinger(zeta.coords(), &mut dz, &mut dzbar)?;
    Ok((dz[k - 1], dzbar[k - 1]))
}

fn real_kernel_parts(x: &RealBallPoint, t: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    let m = x.dim();
    check_dim(m, t.len())?;
    if m < 2 {
        return invalid("real kernel needs dimension m >= 2");
    }
    let r = x.radius();
    let xo = x.offset();
    let to: Vec<f64> = t.iter().zip(x.center()).map(|(ti, ai)| ti - ai).collect();
    let t_norm = to.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (t_norm - r).abs() > 1e-9 * r.max(1.0) {
        return invalid(format!("boundary point has |t - a| = {t_norm}, expected r = {r}"));
    }
    let d2: f64 = xo.iter().zip(&to).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 < SINGULAR_DIST_SQR {
        return Err(singular(d2));
    }
    let gap = r * r - xo.iter().map(|v| v * v).sum::<f64>();
    Ok((xo, to, d2, gap))
}

/// `K(x, t) = ((r² - |x|²) / |x - t|²)^(m-1) / (m r^(m-1) V(m))`, with `x`, `t`
/// measured from the center of the ball.
pub fn real_kernel_k(x: &RealBallPoint, t: &[f64]) -> Result<f64> {
    let (_, _, d2, gap) = real_kernel_parts(x, t)?;
    let m = x.dim();
    let p = (m - 1) as f64;
    Ok((p * (gap.ln() - d2.ln())).exp() / sphere_area(m, x.radius()))
}

/// Closed-form gradient of `K(·, t)` at `x`.
pub fn real_kernel_k_grad(x: &RealBallPoint, t: &[f64]) -> Result<Vec<f64>> {
    let (xo, to, d2, gap) = real_kernel_parts(x, t)?;
    let m = x.dim();
    let mf = m as f64;
    // -2(m-1)(r²-|x|²)^(m-2) / (m r^(m-1) V(m)) / |x-t|^(2m)
    let coef = -2.0 * (mf - 1.0) * ((mf - 2.0) * gap.ln() - mf * d2.ln()).exp()
        / sphere_area(m, x.radius());
    Ok(xo
        .iter()
        .zip(&to)
        .map(|(xi, ti)| coef * (d2 * xi + gap * (xi - ti)))
        .collect())
}
