//! Dirichlet solver: the hyperbolic-harmonic extension
//! `f(z) = ∫ P_h(z, ζ) ψ(ζ) dσ(ζ)` of boundary data `ψ`, its Wirtinger
//! derivatives by differentiation under the integral, and a finite-difference
//! Laplace-Beltrami residual
//! `Δ_h = (1 - |z|²)² Δ + 4(n - 1)(1 - |z|²) Σ (x_k ∂_{x_k} + y_k ∂_{y_k})`.
//!
//! A quadrature-discretized extension is itself a positive combination of
//! kernels `P_h(·, ζ_i)`, each annihilated by `Δ_h`, so residuals measure the
//! finite-difference error only.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::calculus::{Mapping, WirtingerData, WirtingerEstimate};
use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::norm;
use crate::kernel::PoissonAt;
use crate::quadrature::{integrate_vec, sphere_rule_mc, QuadratureRule};

/// Default guard radius for extension evaluation.
pub const DEFAULT_GUARD: f64 = 0.8;

/// Extra radius beyond the guard that finite-difference stencils may reach.
pub const STENCIL_MARGIN: f64 = 2e-3;

const CACHE_LIMIT: usize = 1 << 16;

type BoundaryEval = dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync;

/// Continuous data `ψ: ∂B^n → C^d`, optionally with a declared sup bound `M`.
#[derive(Clone)]
pub struct BoundaryFunction {
    label: String,
    n: usize,
    d: usize,
    bound: Option<f64>,
    eval: Arc<BoundaryEval>,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("d", &self.d)
            .field("bound", &self.bound)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn new<F>(label: impl Into<String>, n: usize, d: usize, eval: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        if n == 0 || d == 0 {
            return invalid("boundary function needs n >= 1 and d >= 1");
        }
        Ok(Self {
            label: label.into(),
            n,
            d,
            bound: None,
            eval: Arc::new(eval),
        })
    }

    /// Declares `|ψ| ≤ M`, spot-checked on 2000 seeded sphere nodes.
    pub fn with_bound(mut self, m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return invalid(format!("bound M must be finite and >= 0, got {m}"));
        }
        let probe = sphere_rule_mc(self.n, 2000, 0x5eed)?;
        for zeta in probe.nodes() {
            let v = norm(&(self.eval)(zeta));
            if v > m * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::BoundViolated { value: v, bound: m });
            }
        }
        self.bound = Some(m);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn out_dim(&self) -> usize {
        self.d
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn eval(&self, zeta: &[Complex64]) -> Vec<Complex64> {
        (self.eval)(zeta)
    }
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    crate::cli::parse::parse_complex(s)
        .map_err(|e| Error::InvalidArgument(format!("boundary constant: {e}")))
}

fn parse_index(s: Option<&str>, n: usize) -> Result<usize> {
    let k = match s {
        None => 1,
        Some(t) => t
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("bad coordinate index '{t}'")))?,
    };
    if k == 0 || k > n {
        return invalid(format!("coordinate index {k} outside 1..={n}"));
    }
    Ok(k)
}

/// Smooth bump centered at `e_1`: `exp(-2 |ζ - e_1|²)`.
fn bump(zeta: &[Complex64]) -> f64 {
    let d2: f64 = zeta
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k == 0 {
                (c - 1.0).norm_sqr()
            } else {
                c.norm_sqr()
            }
        })
        .sum();
    (-2.0 * d2).exp()
}

/// Named boundary data. Scalar specs: `const:<c>`, `coord:<k>`, `re[:<k>]`,
/// `fourier` (n = 1), `prod` (n ≥ 2), `bump`. Vector specs (d = n):
/// `id`, `mix`, `shear`, `vconst:<c>`.
pub fn boundary_from_spec(spec: &str, n: usize) -> Result<BoundaryFunction> {
    if n == 0 {
        return invalid("n must be >= 1");
    }
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    match head {
        "const" => {
            let c = parse_complex(arg.unwrap_or("1"))?;
            BoundaryFunction::new(format!("const:{}", fmt_c(c)), n, 1, move |_| vec![c])?
                .with_bound(c.norm())
        }
        "coord" => {
            let k = parse_index(arg, n)?;
            BoundaryFunction::new(format!("coord:{k}"), n, 1, move |z| vec![z[k - 1]])?
                .with_bound(1.0)
        }
        "re" => {
            let k = parse_index(arg, n)?;
            BoundaryFunction::new(format!("re:{k}"), n, 1, move |z| vec![cplx(z[k - 1].re, 0.0)])?
                .with_bound(1.0)
        }
        "fourier" => {
            if n != 1 {
                return invalid("fourier boundary data is defined for n = 1");
            }
            BoundaryFunction::new("fourier", 1, 1, |z| {
                let w = z[0];
                vec![w * 0.4 + (w * w).conj() * 0.3 + w * w * w * cplx(0.0, 0.3)]
            })?
            .with_bound(1.0)
        }
        "prod" => {
            if n < 2 {
                return invalid("prod boundary data needs n >= 2");
            }
            BoundaryFunction::new("prod", n, 1, |z| vec![z[0] * z[1].conj()])?.with_bound(0.5)
        }
        "bump" => BoundaryFunction::new("bump", n, 1, |z| vec![cplx(bump(z), 0.0)])?.with_bound(1.0),
        "id" => BoundaryFunction::new("id", n, n, |z| z.to_vec())?.with_bound(1.0),
        "mix" => BoundaryFunction::new("mix", n, n, |z| {
            let mut v = z.to_vec();
            v[0] = cplx(z[0].re, 0.0);
            if z.len() > 1 {
                v[1] = z[0] * z[1].conj();
            } else {
                v[0] = cplx(z[0].re, 0.0) * 0.5 + z[0] * 0.5;
            }
            v
        })?
        .with_bound(1.0),
        "shear" => BoundaryFunction::new("shear", n, n, |z| {
            let n = z.len();
            (0..n).map(|j| z[j] + z[(j + 1) % n].conj() * 0.3).collect()
        })?
        .with_bound(1.3),
        "vconst" => {
            let c = parse_complex(arg.unwrap_or("1"))?;
            BoundaryFunction::new(format!("vconst:{}", fmt_c(c)), n, n, move |z| {
                let mut v = vec![Complex64::default(); z.len()];
                v[0] = c;
                v
            })?
            .with_bound(c.norm())
        }
        _ => invalid(format!("unknown boundary spec '{spec}'")),
    }
}

fn fmt_c(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

/// Scalar boundary data shipped with the harness for dimension `n`.
pub fn scalar_registry(n: usize) -> Result<Vec<BoundaryFunction>> {
    let mut specs = vec!["const:1", "coord:1", "re:1", "bump"];
    if n == 1 {
        specs.push("fourier");
    } else {
        specs.push("prod");
        specs.push("coord:2");
    }
    specs.into_iter().map(|s| boundary_from_spec(s, n)).collect()
}

/// Vector boundary data `ψ: ∂B^n → C^n` for dimension `n`.
pub fn vector_registry(n: usize) -> Result<Vec<BoundaryFunction>> {
    ["vconst:1", "id", "mix", "shear"]
        .into_iter()
        .map(|s| boundary_from_spec(s, n))
        .collect()
}

/// The hyperbolic-harmonic extension of boundary data through a rule.
pub struct HExtension {
    boundary: BoundaryFunction,
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
    guard: f64,
    cache: Mutex<HashMap<Vec<u64>, (Vec<Complex64>, Vec<f64>)>>,
}

impl fmt::Debug for HExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HExtension")
            .field("boundary", &self.boundary)
            .field("rule", self.rule.meta())
            .field("guard", &self.guard)
            .finish()
    }
}

/// Builds the extension of `psi`; boundary values are sampled once per node.
pub fn h_extend(psi: &BoundaryFunction, rule: Arc<QuadratureRule>) -> Result<HExtension> {
    check_dim(psi.complex_dim(), rule.complex_dim())?;
    let d = psi.out_dim();
    let mut values = Vec::with_capacity(rule.len() * d);
    for zeta in rule.nodes() {
        let v = psi.eval(zeta);
        check_dim(d, v.len())?;
        values.extend(v);
    }
    Ok(HExtension {
        boundary: psi.clone(),
        rule,
        values,
        guard: DEFAULT_GUARD,
        cache: Mutex::new(HashMap::new()),
    })
}

impl HExtension {
    pub fn with_guard(mut self, guard: f64) -> Result<Self> {
        if !(guard > 0.0 && guard < 1.0) {
            return invalid(format!("guard radius must lie in (0, 1), got {guard}"));
        }
        self.guard = guard;
        Ok(self)
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.boundary
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn bound(&self) -> Option<f64> {
        self.boundary.bound()
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        check_dim(self.boundary.complex_dim(), z.len())?;
        let r = norm(z);
        if r > self.guard + STENCIL_MARGIN {
            return Err(Error::NearSingular(format!(
                "|z| = {r} exceeds the guard radius {}",
                self.guard
            )));
        }
        Ok(())
    }

    /// `f(z)` with per-component quadrature error estimates.
    pub fn eval_components(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
        self.check_point(z)?;
        let key: Vec<u64> = z.iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect();
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let d = self.boundary.out_dim();
        let kernel = PoissonAt::new(z)?;
        let r = integrate_vec(&self.rule, d, |i, zeta, out| {
            let p = kernel.value(zeta)?;
            for (j, o) in out.iter_mut().enumerate() {
                *o = self.values[i * d + j] * p;
            }
            Ok(())
        })?;
        let value = (r.value, r.std_error);
        let mut cache = self.cache.lock().expect("cache poisoned");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, value.clone());
        Ok(value)
    }

    /// Wirtinger derivatives by differentiating the kernel under the integral.
    pub fn gradient(&self, z: &[Complex64]) -> Result<WirtingerEstimate> {
        self.check_point(z)?;
        let n = self.boundary.complex_dim();
        let d = self.boundary.out_dim();
        let kernel = PoissonAt::new(z)?;
        let r = integrate_vec(&self.rule, 2 * n * d, |i, zeta, out| {
            let mut dz = [Complex64::default(); 8];
            let mut dzb = [Complex64::default(); 8];
            let (dz, dzb) = if n <= 8 {
                (&mut dz[..n], &mut dzb[..n])
            } else {
                return invalid("under-integral gradient supports n <= 8");
            };
            kernel.value_and_wirtinger(zeta, dz, dzb)?;
            for j in 0..d {
                let psi = self.values[i * d + j];
                for k in 0..n {
                    out[j * n + k] = psi * dz[k];
                    out[n * d + j * n + k] = psi * dzb[k];
                }
            }
            Ok(())
        })?;
        let fz = DMatrix::from_row_slice(d, n, &r.value[..n * d]);
        let fzbar = DMatrix::from_row_slice(d, n, &r.value[n * d..]);
        Ok(WirtingerEstimate {
            data: WirtingerData::new(fz, fzbar)?,
            fd_error: 0.0,
            quad_error: r.error_norm(),
        })
    }
}

impl Mapping for HExtension {
    fn complex_dim(&self) -> usize {
        self.boundary.complex_dim()
    }

    fn out_dim(&self) -> usize {
        self.boundary.out_dim()
    }

    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.eval_components(z)?.0)
    }

    fn eval_with_error(&self, z: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
        let (v, e) = self.eval_components(z)?;
        Ok((v, e.iter().map(|x| x * x).sum::<f64>().sqrt()))
    }

    fn analytic_wirtinger(&self, z: &[Complex64]) -> Option<Result<WirtingerEstimate>> {
        Some(self.gradient(z))
    }

    fn label(&self) -> String {
        format!("ext[{}]", self.boundary.label())
    }
}

/// Default Laplace-Beltrami step `1e-3 (1 - |z|)`.
pub fn default_lb_step(z: &[Complex64]) -> f64 {
    1e-3 * (1.0 - norm(z))
}

/// `Δ_h f(z)` per output component, from second-order central differences
/// on the `2n` real coordinates with one Richardson level (`step`, `step/2`).
pub fn laplace_beltrami_residual(
    f: &dyn Mapping,
    z: &[Complex64],
    step: f64,
) -> Result<Vec<Complex64>> {
    let n = f.complex_dim();
    check_dim(n, z.len())?;
    let r = norm(z);
    if !(step > 0.0) || r + 2.0 * step >= 1.0 {
        return Err(Error::StepTooLarge { step, norm: r });
    }
    let d = f.out_dim();
    let center = f.eval(z)?;
    let one_minus = 1.0 - r * r;

    let operator = |h: f64| -> Result<Vec<Complex64>> {
        let mut lap = vec![Complex64::default(); d];
        let mut drift = vec![Complex64::default(); d];
        for k in 0..n {
            for (dir, coord) in [(cplx(1.0, 0.0), z[k].re), (cplx(0.0, 1.0), z[k].im)] {
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[k] += dir * h;
                zm[k] -= dir * h;
                let fp = f.eval(&zp)?;
                let fm = f.eval(&zm)?;
                for j in 0..d {
                    lap[j] += (fp[j] - center[j] * 2.0 + fm[j]) / (h * h);
                    drift[j] += (fp[j] - fm[j]) / (2.0 * h) * coord;
                }
            }
        }
        let nm1 = (n - 1) as f64;
        Ok((0..d)
            .map(|j| lap[j] * (one_minus * one_minus) + drift[j] * (4.0 * nm1 * one_minus))
            .collect())
    };

    let coarse = operator(step)?;
    let fine = operator(step / 2.0)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (f * 4.0 - c) / 3.0)
        .collect())
}
