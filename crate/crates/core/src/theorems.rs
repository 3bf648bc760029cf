//! Inequality checks. Each check evaluates both sides of one stated
//! inequality at concrete inputs and reports `pass ⇔ lhs ≤ rhs + tolerance`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::calculus::{
    default_jacobian_step, jacobian_real_with_error, lambda_bounds, min_singular_value,
    operator_norm, wirtinger, Mapping, WirtingerData, WirtingerEstimate,
};
use crate::error::{check_dim, invalid, Error, Result};
use crate::extension::HExtension;
use crate::geometry::{norm, BallPoint};
use crate::kernel::{sphere_area, unit_ball_volume};
use crate::norms::{alpha_bloch_seminorm, bloch_seminorm, directions, weighted_lipschitz_sup, PairSet, SampleSet, SupEstimate};
use crate::quadrature::{seeded_stream, RealSphereRule, RuleMeta};

/// Absolute slack for floating-point rounding in closed-form comparisons.
pub const ROUNDING: f64 = 1e-12;

/// Tolerance budget: `total = analytic + 10·quadrature + 10·finite_difference`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub analytic: f64,
    pub quadrature: f64,
    pub finite_difference: f64,
    pub total: f64,
}

impl Tolerance {
    pub fn new(analytic: f64, quadrature: f64, finite_difference: f64) -> Self {
        Self {
            analytic,
            quadrature,
            finite_difference,
            total: analytic + 10.0 * quadrature + 10.0 * finite_difference,
        }
    }

    pub fn exact(analytic: f64) -> Self {
        Self::new(analytic, 0.0, 0.0)
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
    pub seed: Option<u64>,
    pub rule: Option<RuleMeta>,
    /// Number of individual evaluations this report stands for (worst case kept).
    pub samples: usize,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, lhs: f64, rhs: f64, tolerance: Tolerance, inputs: Value) -> Self {
        Self {
            check_id: check_id.into(),
            inputs,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass: lhs <= rhs + tolerance.total,
            tolerance,
            seed: None,
            rule: None,
            samples: 1,
            note: None,
        }
    }

    pub fn with_rule(mut self, rule: &RuleMeta) -> Self {
        self.seed = rule.seed;
        self.rule = Some(rule.clone());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// `rhs + tolerance - lhs`; negative exactly when the check fails.
    pub fn slack(&self) -> f64 {
        let s = self.rhs + self.tolerance.total - self.lhs;
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    }
}

/// Collapses reports into the one with the least slack, counting samples.
pub fn worst_case(reports: Vec<CheckReport>) -> Result<CheckReport> {
    let total: usize = reports.iter().map(|r| r.samples).sum();
    let mut worst: Option<CheckReport> = None;
    for r in reports {
        if worst.as_ref().is_none_or(|w| r.slack() < w.slack()) {
            worst = Some(r);
        }
    }
    let mut w = worst.ok_or(Error::EmptySamples)?;
    w.samples = total;
    Ok(w)
}

fn jz(z: &[Complex64]) -> Value {
    serde_json::to_value(z).expect("complex vectors serialize")
}

/// Central-difference gradient of a real function on R^m with one
/// Richardson level; returns the gradient and a truncation estimate.
fn real_gradient<F>(f: &F, x: &[f64], h: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let mut grad = Vec::with_capacity(x.len());
    let mut err: f64 = 0.0;
    for k in 0..x.len() {
        let diff = |s: f64| -> Result<f64> {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[k] += s;
            m[k] -= s;
            Ok((f(&p)? - f(&m)?) / (2.0 * s))
        };
        let coarse = diff(h)?;
        let fine = diff(h / 2.0)?;
        let rich = (4.0 * fine - coarse) / 3.0;
        err = err.max((rich - fine).abs());
        grad.push(rich);
    }
    Ok((grad, err))
}

/// Gradient bound for a real function represented on `B(a, r) ⊂ R^m`:
/// `|∇f(a)| ≤ 2(m-1)√m / (m V(m) r^m) ∫_{∂B(a,r)} |f(a) - f(t)| dσ(t)`
/// with `dσ` the unnormalized surface measure. `rule` supplies nodes on the
/// unit sphere of R^m.
pub fn check_lemma21(
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    label: &str,
    a: &[f64],
    r: f64,
    rule: &RealSphereRule,
) -> Result<CheckReport> {
    let m = a.len();
    if m < 2 {
        return invalid("the gradient bound needs m >= 2");
    }
    check_dim(m, rule.dim())?;
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    let fa = f(a)?;
    let (grad, fd) = real_gradient(f, a, 1e-3 * r)?;
    let lhs = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let (avg, avg_err) = rule.integrate(|t| {
        let x: Vec<f64> = a.iter().zip(t).map(|(ai, ti)| ai + r * ti).collect();
        Ok((fa - f(&x)?).abs())
    })?;
    let mf = m as f64;
    let scale = 2.0 * (mf - 1.0) * mf.sqrt() / (mf * unit_ball_volume(m) * r.powi(m as i32)) * sphere_area(m, r);
    let rhs = scale * avg;
    let tol = Tolerance::new(ROUNDING, scale * avg_err, fd);
    Ok(CheckReport::new(
        "lemma21",
        lhs,
        rhs,
        tol,
        json!({"function": label, "m": m, "a": a, "r": r}),
    )
    .with_rule(rule.meta()))
}

/// `|∇̂f(z)| + |∇̂f̄(z)| ≤ |∇u(z)| + |∇v(z)|`. The left side comes from
/// [`wirtinger`] (analytic when available); the right side from real finite
/// differences of `u` and `v`.
pub fn check_lemma22(f: &dyn Mapping, z: &BallPoint) -> Result<CheckReport> {
    check_dim(1, f.out_dim())?;
    check_dim(f.complex_dim(), z.dim())?;
    let w = wirtinger(f, z.coords())?;
    let (a, b) = w.data.gradient_norms()?;
    let (j, fd_real) = jacobian_real_with_error(f, z.coords(), default_jacobian_step(z.coords()))?;
    let (gu, gv) = j.gradient_norms()?;
    // both sides describe the same (possibly discretized) mapping, so only
    // differentiation errors enter the budget
    let tol = Tolerance::new(ROUNDING, 0.0, w.fd_error + 2.0 * fd_real);
    Ok(CheckReport::new(
        "lemma22",
        a + b,
        gu + gv,
        tol,
        json!({"function": f.label(), "n": z.dim(), "z": jz(z.coords())}),
    ))
}

/// `max L_f ≤ π√n ‖f‖` with both sides estimated on samples: the pair
/// supremum over `pairs` against the Bloch estimate on its radial grid.
pub fn check_thm24_necessity(f: &dyn Mapping, pairs: &PairSet) -> Result<CheckReport> {
    let n = f.complex_dim();
    let lip = weighted_lipschitz_sup(f, pairs)?;
    let bloch = bloch_seminorm(f, &pairs.grid()?)?;
    let factor = std::f64::consts::PI * (n as f64).sqrt();
    let tol = Tolerance::new(ROUNDING + lip.rounding, 0.0, factor * bloch.fd_error);
    Ok(CheckReport::new(
        "thm24",
        lip.value,
        factor * bloch.value,
        tol,
        json!({
            "function": f.label(),
            "n": n,
            "lipschitz_witness": lip.witness,
            "bloch_witness": bloch.witness,
            "bloch": bloch.value,
            "pairs": pairs.len(),
            "grid": bloch.samples,
            "sample_spec": pairs.spec(),
        }),
    ))
}

fn kernel_ratio(num: f64, den: f64, n: usize) -> f64 {
    (num / den).powi(2 * n as i32 - 1)
}

fn declared_bound(ext: &HExtension) -> Result<f64> {
    ext.bound()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no declared bound", ext.label())))
}

/// `|f(z) - κ f(0)| ≤ M (1 - κ)` with `κ = ((1-|z|)/(1+|z|))^{2n-1}`.
pub fn check_schwarz_pick_value(ext: &HExtension, z: &BallPoint) -> Result<CheckReport> {
    let n = ext.complex_dim();
    check_dim(n, z.dim())?;
    let m = declared_bound(ext)?;
    let r = z.norm();
    let kappa = kernel_ratio(1.0 - r, 1.0 + r, n);
    let (fz, ez) = ext.eval_with_error(z.coords())?;
    let (f0, e0) = ext.eval_with_error(&vec![Complex64::default(); n])?;
    let diff: Vec<Complex64> = fz.iter().zip(&f0).map(|(a, b)| a - b * kappa).collect();
    let tol = Tolerance::new(ROUNDING, ez + kappa * e0, 0.0);
    Ok(CheckReport::new(
        "schwarzpick.value",
        norm(&diff),
        m * (1.0 - kappa),
        tol,
        json!({"function": ext.label(), "n": n, "z": jz(z.coords()), "M": m}),
    )
    .with_rule(ext.rule().meta()))
}

/// `Λ_f(z) ≤ 2(2n-1) M / (1-|z|)²`, with `Λ_f` from the under-integral derivatives.
pub fn check_schwarz_pick_gradient(ext: &HExtension, z: &BallPoint) -> Result<CheckReport> {
    let n = ext.complex_dim();
    check_dim(n, z.dim())?;
    let m = declared_bound(ext)?;
    let w = ext.gradient(z.coords())?;
    let (big, _) = lambda_bounds(&w.data.to_real_jacobian());
    let rhs = 2.0 * (2 * n - 1) as f64 * m / (1.0 - z.norm()).powi(2);
    // entries of the real Jacobian are sums of two Wirtinger entries
    let tol = Tolerance::new(ROUNDING, 2.0 * w.quad_error, w.fd_error);
    Ok(CheckReport::new(
        "schwarzpick.gradient",
        big,
        rhs,
        tol,
        json!({"function": ext.label(), "n": n, "z": jz(z.coords()), "M": m}),
    )
    .with_rule(ext.rule().meta()))
}

/// A matrix-valued mapping on `B^n(r)` with `A(0) = 0` and `|A| ≤ M`.
pub trait MatrixMapping: Send + Sync {
    fn complex_dim(&self) -> usize;

    fn radius(&self) -> f64;

    fn bound(&self) -> f64;

    /// `A(z)` and an error estimate for its operator norm.
    fn eval(&self, z: &[Complex64]) -> Result<(DMatrix<Complex64>, f64)>;

    fn label(&self) -> String;

    fn rule(&self) -> Option<RuleMeta> {
        None
    }
}

/// `A(z) = diag(1, 1/2, ..., 1/n) · (g(z/r) - g(0))` for a scalar extension `g`
/// with bound `M_g`; then `|A| ≤ M_g + |g(0)|` on `B^n(r)`.
pub struct DilatedDiagonal {
    ext: Arc<HExtension>,
    r: f64,
    g0: Complex64,
    e0: f64,
    bound: f64,
}

impl DilatedDiagonal {
    pub fn new(ext: Arc<HExtension>, r: f64) -> Result<Self> {
        check_dim(1, ext.out_dim())?;
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("radius must be positive, got {r}"));
        }
        let mg = declared_bound(&ext)?;
        let n = ext.complex_dim();
        let (v, e) = ext.eval_with_error(&vec![Complex64::default(); n])?;
        Ok(Self {
            g0: v[0],
            e0: e,
            bound: mg + v[0].norm(),
            ext,
            r,
        })
    }
}

impl MatrixMapping for DilatedDiagonal {
    fn complex_dim(&self) -> usize {
        self.ext.complex_dim()
    }

    fn radius(&self) -> f64 {
        self.r
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn eval(&self, z: &[Complex64]) -> Result<(DMatrix<Complex64>, f64)> {
        let w: Vec<Complex64> = z.iter().map(|c| c / self.r).collect();
        let (v, e) = self.ext.eval_with_error(&w)?;
        let g = v[0] - self.g0;
        let n = self.complex_dim();
        let diag: Vec<Complex64> = (0..n).map(|k| g / (k + 1) as f64).collect();
        Ok((DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)), e + self.e0))
    }

    fn label(&self) -> String {
        format!("diag[{}](r={})", self.ext.label(), self.r)
    }

    fn rule(&self) -> Option<RuleMeta> {
        Some(self.ext.rule().meta().clone())
    }
}

/// `|A(z)| ≤ M [1 - ((r-|z|)/(r+|z|))^{2n-1}]` for `|z| < r`.
pub fn check_lemma33(a: &dyn MatrixMapping, z: &BallPoint) -> Result<CheckReport> {
    let n = a.complex_dim();
    check_dim(n, z.dim())?;
    let r = a.radius();
    let s = z.norm();
    if s >= r {
        return invalid(format!("|z| = {s} must be below the radius {r}"));
    }
    let (mat, err) = a.eval(z.coords())?;
    let kappa = kernel_ratio(r - s, r + s, n);
    let m = a.bound();
    let report = CheckReport::new(
        "lemma33",
        operator_norm(&mat),
        m * (1.0 - kappa),
        Tolerance::new(ROUNDING, err, 0.0),
        json!({"function": a.label(), "n": n, "z": jz(z.coords()), "r": r, "M": m}),
    );
    Ok(match a.rule() {
        Some(meta) => report.with_rule(&meta),
        None => report,
    })
}

/// `|det A| |A|^{1-n} ≤ σ_min(A)`.
pub fn check_lemma_b(a: &DMatrix<Complex64>) -> Result<CheckReport> {
    let n = a.nrows();
    let sigma = min_singular_value(a)?;
    let op = operator_norm(a);
    let det = a.clone().determinant().norm();
    let lhs = if op == 0.0 { 0.0 } else { det * op.powi(1 - n as i32) };
    Ok(CheckReport::new(
        "lemmaB",
        lhs,
        sigma,
        Tolerance::exact(ROUNDING),
        json!({"n": n, "operator_norm": op, "abs_det": det}),
    ))
}

/// `count` matrices with independent standard complex Gaussian entries.
pub fn random_matrices(n: usize, count: usize, seed: u64) -> Vec<DMatrix<Complex64>> {
    let mut rng = seeded_stream(seed, 0x1e33a_b000 + n as u64);
    (0..count)
        .map(|_| {
            DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            })
        })
        .collect()
}

/// Univalence and covering radii for normalized α-Bloch mappings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauConstants {
    pub n: usize,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub rho: f64,
    pub half_rho: f64,
    #[serde(rename = "R_lower")]
    pub r_lower: f64,
}

/// `ρ = 3^α / ((2M)^{2n} (3^α + 4^α))`, `ρ/2` and `R ≥ ρ / (4 M^{2n-1})`.
pub fn landau_constants(n: usize, alpha: f64, m: f64) -> Result<LandauConstants> {
    if n < 1 {
        return invalid("n must be >= 1");
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    if !(m >= 1.0 && m.is_finite()) {
        return invalid(format!("M must be >= 1, got {m}"));
    }
    let three = 3f64.powf(alpha);
    let four = 4f64.powf(alpha);
    let rho = three / ((2.0 * m).powi(2 * n as i32) * (three + four));
    Ok(LandauConstants {
        n,
        alpha,
        m,
        rho,
        half_rho: rho / 2.0,
        r_lower: rho / (4.0 * m.powi(2 * n as i32 - 1)),
    })
}

/// Checks the two closing identities of the univalence argument at the
/// computed `ρ`: `M^{1-2n} = 2^{2n}(3^α+4^α) M ρ / 3^α` and
/// `ρ (M^{1-2n} - 2^{2n-1}(3^α+4^α) M ρ / 3^α) = ρ / (2 M^{2n-1})`.
pub fn check_landau(n: usize, alpha: f64, m: f64) -> Result<Vec<CheckReport>> {
    let c = landau_constants(n, alpha, m)?;
    let k = (3f64.powf(alpha) + 4f64.powf(alpha)) / 3f64.powf(alpha);
    let inv = m.powi(1 - 2 * n as i32);
    let two = |p: usize| 2f64.powi(p as i32);
    let univalence = (inv - two(2 * n) * k * m * c.rho).abs() / inv;
    let covered = (c.rho * (inv - two(2 * n - 1) * k * m * c.rho) - c.rho * inv / 2.0).abs() / (c.rho * inv);
    let inputs = json!({
        "n": n, "alpha": alpha, "M": m,
        "rho": c.rho, "half_rho": c.half_rho, "R_lower": c.r_lower,
    });
    Ok(vec![
        CheckReport::new("landau.univalence_identity", univalence, 0.0, Tolerance::exact(1e-14), inputs.clone()),
        CheckReport::new("landau.covered_identity", covered, 0.0, Tolerance::exact(1e-14), inputs),
    ])
}

/// Sampled injectivity evidence: passes iff
/// `|f(ζ') - f(ζ'')| ≥ floor · |ζ' - ζ''|` strictly (by more than rounding)
/// for every pair. Reports `lhs = floor`, `rhs = worst ratio`.
pub fn univalence_probe(f: &dyn Mapping, radius: f64, pairs: &PairSet, floor: f64) -> Result<CheckReport> {
    check_dim(f.complex_dim(), pairs.spec().n)?;
    if pairs.is_empty() {
        return Err(Error::EmptySamples);
    }
    let limit = radius * (1.0 + 1e-12);
    if let Some(p) = pairs.pool().iter().find(|p| p.norm() > limit) {
        return invalid(format!("sample |z| = {} lies outside the radius {radius}", p.norm()));
    }
    let values: Vec<Vec<Complex64>> = {
        use rayon::prelude::*;
        pairs
            .pool()
            .par_iter()
            .map(|p| f.eval(p.coords()))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<_>>()?
    };
    let mut worst = f64::INFINITY;
    let mut witness = 0;
    for (k, &(i, j)) in pairs.pairs().iter().enumerate() {
        let (z, w) = (pairs.pool()[i].coords(), pairs.pool()[j].coords());
        let dz: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
        let df: Vec<Complex64> = values[i].iter().zip(&values[j]).map(|(a, b)| a - b).collect();
        let ratio = norm(&df) / norm(&dz);
        if !ratio.is_finite() {
            return Err(Error::NonFinite(format!("separation ratio at pair {k}")));
        }
        if ratio < worst {
            worst = ratio;
            witness = k;
        }
    }
    let (i, j) = pairs.pairs()[witness];
    Ok(CheckReport::new(
        "landau.univalence_probe",
        floor,
        worst,
        Tolerance::exact(-ROUNDING),
        json!({
            "function": f.label(),
            "n": f.complex_dim(),
            "radius": radius,
            "floor": floor,
            "pairs": pairs.len(),
            "witness": [jz(pairs.pool()[i].coords()), jz(pairs.pool()[j].coords())],
            "sample_spec": pairs.spec(),
        }),
    )
    .with_note("sampled evidence of injectivity, not a proof"))
}

/// `f` shifted and scaled so that `f(0) = 0` and `det J_f(0) = 1`.
pub struct NormalizedMapping {
    inner: Arc<dyn Mapping>,
    offset: Vec<Complex64>,
    scale: f64,
    det0: f64,
}

impl NormalizedMapping {
    pub fn new(inner: Arc<dyn Mapping>) -> Result<Self> {
        let n = inner.complex_dim();
        check_dim(n, inner.out_dim())?;
        let origin = vec![Complex64::default(); n];
        let offset = inner.eval(&origin)?;
        let det0 = wirtinger(inner.as_ref(), &origin)?.data.to_real_jacobian().determinant()?;
        if !(det0 > 1e-12) {
            return invalid(format!("{}: det J(0) = {det0} is not positive", inner.label()));
        }
        Ok(Self {
            scale: det0.powf(-1.0 / (2 * n) as f64),
            inner,
            offset,
            det0,
        })
    }

    /// Determinant of the real Jacobian of the unnormalized mapping at 0.
    pub fn original_determinant(&self) -> f64 {
        self.det0
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Mapping for NormalizedMapping {
    fn complex_dim(&self) -> usize {
        self.inner.complex_dim()
    }

    fn out_dim(&self) -> usize {
        self.inner.out_dim()
    }

    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self
            .inner
            .eval(z)?
            .iter()
            .zip(&self.offset)
            .map(|(v, o)| (v - o) * self.scale)
            .collect())
    }

    fn eval_with_error(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let (v, e) = self.inner.eval_with_error(z)?;
        let v = v.iter().zip(&self.offset).map(|(v, o)| (v - o) * self.scale).collect();
        Ok((v, e * self.scale))
    }

    fn analytic_wirtinger(&self, z: &[Complex64]) -> Option<Result<WirtingerEstimate>> {
        let s = self.scale;
        self.inner.analytic_wirtinger(z).map(|r| {
            r.and_then(|w| {
                Ok(WirtingerEstimate {
                    data: WirtingerData::new(w.data.fz * Complex64::from(s), w.data.fzbar * Complex64::from(s))?,
                    fd_error: w.fd_error * s,
                    quad_error: w.quad_error * s,
                })
            })
        })
    }

    fn label(&self) -> String {
        format!("normalized[{}]", self.inner.label())
    }
}

/// The Landau data of a normalized mapping: its α-Bloch estimate, the
/// admissible `M = max(1, estimate)` and the resulting constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauSetting {
    pub bloch: SupEstimate,
    pub constants: LandauConstants,
    /// `λ_f(0)`; the argument needs `λ_f(0) ≥ M^{1-2n}`.
    pub lambda0: f64,
    pub lambda_condition: bool,
}

pub fn landau_setting(f: &dyn Mapping, alpha: f64, samples: &SampleSet) -> Result<LandauSetting> {
    let n = f.complex_dim();
    let bloch = alpha_bloch_seminorm(f, alpha, samples)?;
    let constants = landau_constants(n, alpha, bloch.value.max(1.0))?;
    let w = wirtinger(f, &vec![Complex64::default(); n])?;
    let (_, lambda0) = lambda_bounds(&w.data.to_real_jacobian());
    let lambda_condition = lambda0 >= constants.m.powi(1 - 2 * n as i32) - ROUNDING;
    Ok(LandauSetting {
        bloch,
        constants,
        lambda0,
        lambda_condition,
    })
}

/// `|F(ζ) - F(0)| ≥ ρ / (2 M^{2n-1})` on `|ζ| = ρ` for `F(ζ) = 2 f(ζ/2)`,
/// sampled at `count` directions. Reports `lhs = ρ/(2M^{2n-1})`, `rhs = min |F(ζ) - F(0)|`.
pub fn covered_ball_probe(f: &dyn Mapping, c: &LandauConstants, count: usize) -> Result<CheckReport> {
    let n = f.complex_dim();
    check_dim(n, c.n)?;
    let f0 = f.eval(&vec![Complex64::default(); n])?;
    let mut worst = f64::INFINITY;
    let mut witness = Vec::new();
    for d in directions(n, count)? {
        let half: Vec<Complex64> = d.iter().map(|x| x * (c.rho / 2.0)).collect();
        let v = f.eval(&half)?;
        let gap = 2.0 * norm(&v.iter().zip(&f0).map(|(a, b)| a - b).collect::<Vec<_>>());
        if gap < worst {
            worst = gap;
            witness = d.iter().map(|x| x * c.rho).collect();
        }
    }
    let lhs = c.rho / (2.0 * c.m.powi(2 * n as i32 - 1));
    Ok(CheckReport::new(
        "landau.covered_ball",
        lhs,
        worst,
        Tolerance::exact(ROUNDING),
        json!({
            "function": f.label(),
            "n": n,
            "alpha": c.alpha,
            "M": c.m,
            "rho": c.rho,
            "directions": count,
            "witness": jz(&witness),
        }),
    ))
}
