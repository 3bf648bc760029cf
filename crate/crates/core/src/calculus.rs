//! Wirtinger calculus and Jacobian machinery.
//!
//! Real coordinates are always ordered `(x_1, y_1, ..., x_n, y_n)` with
//! `z_k = x_k + i y_k`, and Jacobian rows `(u_1, v_1, ..., u_d, v_d)` with
//! `f_j = u_j + i v_j`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::norm;

/// Anything that maps points of `B^n` to `C^d`.
pub trait Mapping: Send + Sync {
    fn complex_dim(&self) -> usize;

    fn out_dim(&self) -> usize;

    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>>;

    /// Value with an estimate of its discretization error (zero for closed forms).
    fn eval_with_error(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        Ok((self.eval(z)?, 0.0))
    }

    /// Exact or quadrature-based derivatives, when the mapping has them.
    fn analytic_wirtinger(&self, _z: &[Complex64]) -> Option<Result<WirtingerEstimate>> {
        None
    }

    fn label(&self) -> String {
        "anonymous".to_string()
    }
}

/// A mapping given by a closure.
pub struct FnMapping<F> {
    n: usize,
    d: usize,
    label: String,
    f: F,
}

impl<F> FnMapping<F>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync,
{
    pub fn new(label: impl Into<String>, n: usize, d: usize, f: F) -> Self {
        Self {
            n,
            d,
            label: label.into(),
            f,
        }
    }
}

impl<F> Mapping for FnMapping<F>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync,
{
    fn complex_dim(&self) -> usize {
        self.n
    }

    fn out_dim(&self) -> usize {
        self.d
    }

    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.n, z.len())?;
        let v = (self.f)(z);
        check_dim(self.d, v.len())?;
        Ok(v)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `f_z` and `f_z̄` at a point: row `j` holds `∇̂f_j` resp. `∇̂f̄_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerData {
    pub fz: DMatrix<Complex64>,
    pub fzbar: DMatrix<Complex64>,
}

/// Derivatives together with their error budget.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerEstimate {
    pub data: WirtingerData,
    /// Finite-difference truncation estimate (max abs entry).
    pub fd_error: f64,
    /// Quadrature error estimate (Frobenius norm over entries).
    pub quad_error: f64,
}

impl WirtingerData {
    pub fn new(fz: DMatrix<Complex64>, fzbar: DMatrix<Complex64>) -> Result<Self> {
        if fz.shape() != fzbar.shape() {
            return invalid("f_z and f_zbar must have the same shape");
        }
        if fz.iter().chain(fzbar.iter()).any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Wirtinger derivative".into()));
        }
        Ok(Self { fz, fzbar })
    }

    /// Output dimension `d`.
    pub fn rows(&self) -> usize {
        self.fz.nrows()
    }

    /// Input dimension `n`.
    pub fn cols(&self) -> usize {
        self.fz.ncols()
    }

    /// `(|∇̂f|, |∇̂f̄|)` for a scalar function.
    pub fn gradient_norms(&self) -> Result<(f64, f64)> {
        check_dim(1, self.rows())?;
        Ok((self.fz.norm(), self.fzbar.norm()))
    }

    /// `|f_z| + |f_z̄|` with operator norms; for `d = 1` this is
    /// `|∇̂f| + |∇̂f̄|`.
    pub fn bloch_density(&self) -> f64 {
        operator_norm(&self.fz) + operator_norm(&self.fzbar)
    }

    pub fn to_real_jacobian(&self) -> RealJacobian {
        let (d, n) = self.fz.shape();
        let i = Complex64::new(0.0, 1.0);
        let mut j = DMatrix::zeros(2 * d, 2 * n);
        for r in 0..d {
            for k in 0..n {
                let a = self.fz[(r, k)];
                let b = self.fzbar[(r, k)];
                let fx = a + b;
                let fy = i * (a - b);
                j[(2 * r, 2 * k)] = fx.re;
                j[(2 * r, 2 * k + 1)] = fy.re;
                j[(2 * r + 1, 2 * k)] = fx.im;
                j[(2 * r + 1, 2 * k + 1)] = fy.im;
            }
        }
        RealJacobian { matrix: j }
    }

    /// `f_z θ + f_z̄ θ̄`.
    pub fn apply(&self, theta: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows())
            .map(|r| {
                (0..self.cols())
                    .map(|k| self.fz[(r, k)] * theta[k] + self.fzbar[(r, k)] * theta[k].conj())
                    .sum()
            })
            .collect()
    }
}

/// Real Jacobian of `(u_1, v_1, ...)` in `(x_1, y_1, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealJacobian {
    pub matrix: DMatrix<f64>,
}

impl RealJacobian {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() % 2 != 0 || matrix.ncols() % 2 != 0 {
            return invalid("real Jacobian needs even row and column counts");
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Jacobian entry".into()));
        }
        Ok(Self { matrix })
    }

    pub fn to_wirtinger(&self) -> WirtingerData {
        let (d, n) = (self.matrix.nrows() / 2, self.matrix.ncols() / 2);
        let mut fz = DMatrix::zeros(d, n);
        let mut fzbar = DMatrix::zeros(d, n);
        for r in 0..d {
            for k in 0..n {
                let m = &self.matrix;
                let (a, b) = wirtinger_from_real(
                    m[(2 * r, 2 * k)],
                    m[(2 * r, 2 * k + 1)],
                    m[(2 * r + 1, 2 * k)],
                    m[(2 * r + 1, 2 * k + 1)],
                );
                fz[(r, k)] = a;
                fzbar[(r, k)] = b;
            }
        }
        WirtingerData { fz, fzbar }
    }

    /// `(|∇u|, |∇v|)` for a scalar function.
    pub fn gradient_norms(&self) -> Result<(f64, f64)> {
        check_dim(2, self.matrix.nrows())?;
        Ok((self.matrix.row(0).norm(), self.matrix.row(1).norm()))
    }

    pub fn determinant(&self) -> Result<f64> {
        if !self.matrix.is_square() {
            return invalid("determinant needs a square Jacobian");
        }
        Ok(self.matrix.determinant())
    }
}

/// `(f_{z_k}, f_{z̄_k})` from the real partials of `u` and `v`.
pub fn wirtinger_from_real(ux: f64, uy: f64, vx: f64, vy: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(0.5 * (ux + vy), 0.5 * (vx - uy)),
        Complex64::new(0.5 * (ux - vy), 0.5 * (vx + uy)),
    )
}

/// Default Jacobian step `1e-4 (1 - |z|)`.
pub fn default_jacobian_step(z: &[Complex64]) -> f64 {
    1e-4 * (1.0 - norm(z))
}

fn check_stencil(z: &[Complex64], step: f64) -> Result<()> {
    let r = norm(z);
    if !(step > 0.0) || r + 2.0 * step >= 1.0 {
        return Err(Error::StepTooLarge { step, norm: r });
    }
    Ok(())
}

/// Central differences `(∂f/∂x_k, ∂f/∂y_k)` for all `k`, Richardson
/// extrapolated over steps `h` and `h/2`. Returns the partials as complex
/// vectors per coordinate plus a truncation estimate.
fn partials(f: &dyn Mapping, z: &[Complex64], h: f64) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let n = f.complex_dim();
    check_dim(n, z.len())?;
    check_stencil(z, h)?;
    let d = f.out_dim();
    let central = |k: usize, dir: Complex64, step: f64| -> Result<Vec<Complex64>> {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[k] += dir * step;
        zm[k] -= dir * step;
        let fp = f.eval(&zp)?;
        let fm = f.eval(&zm)?;
        Ok(fp
            .iter()
            .zip(&fm)
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let mut out = Vec::with_capacity(2 * n);
    let mut err: f64 = 0.0;
    for k in 0..n {
        for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let coarse = central(k, dir, h)?;
            let fine = central(k, dir, h / 2.0)?;
            let rich: Vec<Complex64> = (0..d)
                .map(|j| (fine[j] * 4.0 - coarse[j]) / 3.0)
                .collect();
            for j in 0..d {
                err = err.max((rich[j] - fine[j]).norm());
            }
            out.push(rich);
        }
    }
    Ok((out, err))
}

/// Central-difference real Jacobian with its truncation estimate.
pub fn jacobian_real_with_error(
    f: &dyn Mapping,
    z: &[Complex64],
    step: f64,
) -> Result<(RealJacobian, f64)> {
    let (p, err) = partials(f, z, step)?;
    let n = f.complex_dim();
    let d = f.out_dim();
    let mut m = DMatrix::zeros(2 * d, 2 * n);
    for (col, fcol) in p.iter().enumerate() {
        for j in 0..d {
            m[(2 * j, col)] = fcol[j].re;
            m[(2 * j + 1, col)] = fcol[j].im;
        }
    }
    Ok((RealJacobian::new(m)?, err))
}

/// Central-difference `2d × 2n` real Jacobian of `f` at `z`.
pub fn jacobian_real(f: &dyn Mapping, z: &[Complex64], step: f64) -> Result<RealJacobian> {
    Ok(jacobian_real_with_error(f, z, step)?.0)
}

/// Direct Wirtinger differences `½(∂_x ∓ i ∂_y) f`.
pub fn wirtinger_fd(f: &dyn Mapping, z: &[Complex64], step: f64) -> Result<WirtingerEstimate> {
    let (p, err) = partials(f, z, step)?;
    let n = f.complex_dim();
    let d = f.out_dim();
    let i = Complex64::new(0.0, 1.0);
    let mut fz = DMatrix::zeros(d, n);
    let mut fzbar = DMatrix::zeros(d, n);
    for k in 0..n {
        for j in 0..d {
            let fx = p[2 * k][j];
            let fy = p[2 * k + 1][j];
            fz[(j, k)] = (fx - i * fy) * 0.5;
            fzbar[(j, k)] = (fx + i * fy) * 0.5;
        }
    }
    Ok(WirtingerEstimate {
        data: WirtingerData::new(fz, fzbar)?,
        fd_error: err,
        quad_error: 0.0,
    })
}

/// Wirtinger derivatives of `f` at `z`: analytic when the mapping provides
/// them, otherwise finite differences with the default step.
pub fn wirtinger(f: &dyn Mapping, z: &[Complex64]) -> Result<WirtingerEstimate> {
    match f.analytic_wirtinger(z) {
        Some(r) => r,
        None => wirtinger_fd(f, z, default_jacobian_step(z)),
    }
}

fn singular_values_real(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn singular_values_complex(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `(Λ, λ)`: max and min of `|Jθ|` over the real unit sphere. `λ = 0` when
/// `J` has more columns than rows.
pub fn lambda_bounds(j: &RealJacobian) -> (f64, f64) {
    let s = singular_values_real(&j.matrix);
    let big = s.first().copied().unwrap_or(0.0);
    let small = if j.matrix.nrows() >= j.matrix.ncols() {
        s.last().copied().unwrap_or(0.0)
    } else {
        0.0
    };
    (big, small)
}

/// `(Λ_f, λ_f)` from `f_z`, `f_z̄` via the real Jacobian.
pub fn lambda_bounds_wirtinger(w: &WirtingerData) -> Result<(f64, f64)> {
    if w.rows() != w.cols() {
        return invalid(format!(
            "Λ/λ need a square derivative, got {}×{}",
            w.rows(),
            w.cols()
        ));
    }
    Ok(lambda_bounds(&w.to_real_jacobian()))
}

/// Operator norm `|A| = max_{|θ|=1} |Aθ|`.
pub fn operator_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values_complex(a).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(a: &DMatrix<Complex64>) -> Result<f64> {
    if !a.is_square() || a.is_empty() {
        return invalid("smallest singular value needs a non-empty square matrix");
    }
    Ok(singular_values_complex(a).last().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example_map() -> FnMapping<impl Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync> {
        FnMapping::new("z^2+conj(z)", 1, 1, |z: &[Complex64]| vec![z[0] * z[0] + z[0].conj()])
    }

    #[test]
    fn wirtinger_from_real_example() {
        // u = x² + x - y², v = 2xy - y at 0: u_x = 1, u_y = 0, v_x = 0, v_y = -1
        let (a, b) = wirtinger_from_real(1.0, 0.0, 0.0, -1.0);
        assert!((a.norm() + b.norm() - 1.0).abs() < 1e-15);
        let (a, b) = wirtinger_from_real(1.0, 0.0, 0.0, 1.0);
        assert_eq!((a, b), (c(1.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn jacobian_of_example_at_origin() {
        let f = example_map();
        let z = [c(0.0, 0.0)];
        let j = jacobian_real(&f, &z, default_jacobian_step(&z)).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!((&j.matrix - expect).abs().max() < 1e-10);
        assert!((j.determinant().unwrap() + 1.0).abs() < 1e-10);
        let (gu, gv) = j.gradient_norms().unwrap();
        assert!((gu + gv - 2.0).abs() < 1e-9);
        let w = j.to_wirtinger();
        let (a, b) = w.gradient_norms().unwrap();
        assert!((a + b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_jacobian() {
        let f = FnMapping::new("id", 2, 2, |z: &[Complex64]| z.to_vec());
        let z = [c(0.1, 0.2), c(-0.3, 0.1)];
        let j = jacobian_real(&f, &z, default_jacobian_step(&z)).unwrap();
        assert!((&j.matrix - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-10);
    }

    #[test]
    fn two_path_consistency() {
        let f = FnMapping::new("mix", 2, 2, |z: &[Complex64]| {
            vec![z[0] * z[1].conj() + z[0], (z[1] * z[1]).conj() + c(0.3, 0.0) * z[0]]
        });
        let z = [c(0.2, -0.1), c(0.05, 0.4)];
        let h = default_jacobian_step(&z);
        let via_real = jacobian_real(&f, &z, h).unwrap().to_wirtinger();
        let direct = wirtinger_fd(&f, &z, h).unwrap().data;
        assert!((&via_real.fz - &direct.fz).norm() < 1e-9);
        assert!((&via_real.fzbar - &direct.fzbar).norm() < 1e-9);
        // exact: f1_z1 = conj(z2) + 1, f1_zbar2 = z1
        assert!((direct.fz[(0, 0)] - (z[1].conj() + 1.0)).norm() < 1e-9);
        assert!((direct.fzbar[(0, 1)] - z[0]).norm() < 1e-9);
    }

    #[test]
    fn stencil_guard() {
        let f = FnMapping::new("id", 1, 1, |z: &[Complex64]| z.to_vec());
        assert!(matches!(
            jacobian_real(&f, &[c(0.99, 0.0)], 0.01),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn lambda_examples() {
        let id = RealJacobian::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(lambda_bounds(&id), (1.0, 1.0));
        let d = RealJacobian::new(DMatrix::from_diagonal(&nalgebra::dvector![2.0, 0.5])).unwrap();
        let (big, small) = lambda_bounds(&d);
        assert!((big - 2.0).abs() < 1e-15 && (small - 0.5).abs() < 1e-15);

        let w = WirtingerData::new(DMatrix::identity(2, 2), DMatrix::zeros(2, 2)).unwrap();
        let (big, small) = lambda_bounds_wirtinger(&w).unwrap();
        assert!((big - 1.0).abs() < 1e-14 && (small - 1.0).abs() < 1e-14);

        let a = c(0.3, 0.4);
        let b = c(-0.1, 0.2);
        let w = WirtingerData::new(DMatrix::from_element(1, 1, a), DMatrix::from_element(1, 1, b))
            .unwrap();
        let (big, small) = lambda_bounds_wirtinger(&w).unwrap();
        assert!((big - (a.norm() + b.norm())).abs() < 1e-14);
        assert!((small - (a.norm() - b.norm()).abs()).abs() < 1e-14);

        let rect = WirtingerData::new(DMatrix::zeros(1, 2), DMatrix::zeros(1, 2)).unwrap();
        assert!(lambda_bounds_wirtinger(&rect).is_err());
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&DMatrix::identity(3, 3)) - 1.0).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&nalgebra::dvector![c(3.0, 0.0), c(0.0, 1.0)]);
        assert!((operator_norm(&d) - 3.0).abs() < 1e-14);
        assert!((min_singular_value(&d).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wirtinger_data_roundtrip_preserves_det() {
        let j = RealJacobian::new(DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 0.2, -0.3, 0.1, 0.0, 0.9, 0.4, -0.2, 0.5, 0.1, 1.1, 0.3, -0.1, 0.2, 0.0, 0.8],
        ))
        .unwrap();
        let back = j.to_wirtinger().to_real_jacobian();
        let d0 = j.determinant().unwrap();
        let d1 = back.determinant().unwrap();
        assert!((d0 - d1).abs() <= 1e-9 * d0.abs());
    }
}
