//! Quadrature for the normalized surface measure `σ` on the unit sphere of
//! C^n (viewed as `S^(2n-1)`), and on real spheres `S^(m-1)`.
//!
//! Randomness comes from ChaCha8 seeded with the rule seed; node chunk `c`
//! draws from stream `c`, so a rule depends only on `(n, N, seed)` and never
//! on the thread count. Integration reduces fixed chunks of
//! [`CHUNK`] nodes and folds the chunk partials in index order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::SpherePoint;

/// Nodes per reduction chunk.
pub const CHUNK: usize = 1024;

/// Name of the generator recorded in rule metadata.
pub const RNG_NAME: &str = "chacha8-stream-per-chunk";

/// Generator for stream `stream` of `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Circle,
    MonteCarlo,
    /// Caller-supplied nodes and weights; errors use the sample formula.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleMeta {
    pub kind: RuleKind,
    /// Complex dimension for rules on `∂B^n`, real dimension for real spheres.
    pub dim: usize,
    pub nodes: usize,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
}

/// Nodes and weights approximating `σ` on `∂B^n ⊂ C^n`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    n: usize,
    coords: Vec<Complex64>,
    weights: Vec<f64>,
    meta: RuleMeta,
}

impl QuadratureRule {
    /// Builds a rule from explicit nodes and weights.
    pub fn from_parts(nodes: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return invalid("rule needs equally many nodes and weights, at least one");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("rule weights must be positive");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("rule weights sum to {total}, expected 1"));
        }
        let n = nodes[0].dim();
        let mut coords = Vec::with_capacity(n * nodes.len());
        for p in &nodes {
            crate::error::check_dim(n, p.dim())?;
            coords.extend_from_slice(p.coords());
        }
        let count = nodes.len();
        Ok(Self {
            n,
            coords,
            weights,
            meta: RuleMeta {
                kind: RuleKind::Custom,
                dim: n,
                nodes: count,
                seed: None,
                rng: None,
            },
        })
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[Complex64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[Complex64]> {
        self.coords.chunks_exact(self.n)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> &RuleMeta {
        &self.meta
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.meta.kind != RuleKind::Circle
    }
}

/// `m` equally spaced nodes `e^(2πij/m)` on the unit circle, weights `1/m`.
pub fn circle_rule(m: usize) -> Result<QuadratureRule> {
    if m < 4 {
        return invalid(format!("circle rule needs at least 4 nodes, got {m}"));
    }
    let coords = (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect();
    Ok(QuadratureRule {
        n: 1,
        coords,
        weights: vec![1.0 / m as f64; m],
        meta: RuleMeta {
            kind: RuleKind::Circle,
            dim: 1,
            nodes: m,
            seed: None,
            rng: None,
        },
    })
}

/// Standard Gaussian draws for chunk `chunk`, `len` values per node.
fn gaussian_chunk(seed: u64, chunk: usize, nodes: usize, len: usize) -> Vec<f64> {
    let mut rng = seeded_stream(seed, chunk as u64);
    (0..nodes * len)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

fn unit_vectors(seed: u64, count: usize, len: usize) -> Vec<f64> {
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let nodes = CHUNK.min(count - c * CHUNK);
            let mut g = gaussian_chunk(seed, c, nodes, len);
            for v in g.chunks_exact_mut(len) {
                let mut r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if r == 0.0 {
                    // probability zero; keep the node on the sphere anyway
                    v[0] = 1.0;
                    r = 1.0;
                }
                v.iter_mut().for_each(|x| *x /= r);
            }
            g
        })
        .collect();
    parts.concat()
}

/// `count` i.i.d. uniform points on `S^(2n-1)` from normalized Gaussians.
pub fn sphere_rule_mc(n: usize, count: usize, seed: u64) -> Result<QuadratureRule> {
    if n < 1 {
        return invalid("sphere rule needs n >= 1");
    }
    if count < 100 {
        return invalid(format!("Monte Carlo rule needs at least 100 nodes, got {count}"));
    }
    let flat = unit_vectors(seed, count, 2 * n);
    let coords = flat
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    Ok(QuadratureRule {
        n,
        coords,
        weights: vec![1.0 / count as f64; count],
        meta: RuleMeta {
            kind: RuleKind::MonteCarlo,
            dim: n,
            nodes: count,
            seed: Some(seed),
            rng: Some(RNG_NAME),
        },
    })
}

/// Default rule: circle for `n = 1`, Monte Carlo otherwise.
pub fn default_rule(n: usize, nodes: Option<usize>, seed: u64) -> Result<QuadratureRule> {
    match n {
        1 => circle_rule(nodes.unwrap_or(4096)),
        _ => sphere_rule_mc(n, nodes.unwrap_or(200_000), seed),
    }
}

/// Value of a vector integral with a per-component error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegral {
    pub value: Vec<Complex64>,
    /// Per-component error estimate: the sample standard error for Monte
    /// Carlo rules, a half-rule difference plus a rounding floor otherwise.
    pub std_error: Vec<f64>,
}

impl VecIntegral {
    /// Euclidean norm of the per-component errors.
    pub fn error_norm(&self) -> f64 {
        self.std_error.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

/// Scalar integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub std_error: f64,
}

#[derive(Clone)]
struct Partial {
    sum: Vec<Complex64>,
    even: Vec<Complex64>,
    sq: Vec<f64>,
    abs: Vec<f64>,
}

impl Partial {
    fn zeros(d: usize) -> Self {
        Self {
            sum: vec![Complex64::default(); d],
            even: vec![Complex64::default(); d],
            sq: vec![0.0; d],
            abs: vec![0.0; d],
        }
    }

    fn absorb(&mut self, other: &Partial) {
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.even[k] += other.even[k];
            self.sq[k] += other.sq[k];
            self.abs[k] += other.abs[k];
        }
    }
}

/// Integrates the `d`-component evaluator `g(i, ζ_i, out)` against the rule.
///
/// The result is bit-stable regardless of how rayon schedules the chunks.
pub fn integrate_vec<G>(rule: &QuadratureRule, d: usize, g: G) -> Result<VecIntegral>
where
    G: Fn(usize, &[Complex64], &mut [Complex64]) -> Result<()> + Sync,
{
    let count = rule.len();
    let chunks = count.div_ceil(CHUNK);
    let mc = rule.is_monte_carlo();
    let at = |i: usize, e: Error| Error::AtNode {
        index: i,
        source: Box::new(e),
    };
    let partials: Vec<Result<Partial>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut p = Partial::zeros(d);
            let mut buf = vec![Complex64::default(); d];
            let start = c * CHUNK;
            let end = (start + CHUNK).min(count);
            for i in start..end {
                g(i, rule.node(i), &mut buf).map_err(|e| at(i, e))?;
                let w = rule.weights[i];
                for k in 0..d {
                    let v = buf[k];
                    let wv = v * w;
                    p.sum[k] += wv;
                    if mc {
                        p.sq[k] += w * v.norm_sqr();
                    } else {
                        if i % 2 == 0 {
                            p.even[k] += wv;
                        }
                        p.abs[k] += w * v.norm();
                    }
                }
            }
            // a non-finite value poisons the chunk sums; rescan to name it
            let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
            if !(p.sum.iter().all(finite) && p.sq.iter().chain(&p.abs).all(|x| x.is_finite())) {
                for i in start..end {
                    g(i, rule.node(i), &mut buf).map_err(|e| at(i, e))?;
                    if !buf.iter().all(finite) {
                        return Err(at(i, Error::NonFinite("integrand".into())));
                    }
                }
                return Err(at(start, Error::NonFinite("chunk sum overflow".into())));
            }
            Ok(p)
        })
        .collect();

    let mut total = Partial::zeros(d);
    for p in partials {
        total.absorb(&p?);
    }

    let std_error = (0..d)
        .map(|k| {
            if rule.is_monte_carlo() {
                let var = (total.sq[k] - total.sum[k].norm_sqr()).max(0.0);
                (var / count as f64).sqrt()
            } else {
                let floor = (count as f64).sqrt() * f64::EPSILON * total.abs[k];
                let half = if count % 2 == 0 {
                    (total.sum[k] - total.even[k] * 2.0).norm()
                } else {
                    0.0
                };
                half.max(floor)
            }
        })
        .collect();

    Ok(VecIntegral {
        value: total.sum,
        std_error,
    })
}

/// Integrates a scalar evaluator.
pub fn integrate<G>(rule: &QuadratureRule, g: G) -> Result<Integral>
where
    G: Fn(&[Complex64]) -> Result<Complex64> + Sync,
{
    let r = integrate_vec(rule, 1, |_, zeta, out| {
        out[0] = g(zeta)?;
        Ok(())
    })?;
    Ok(Integral {
        value: r.value[0],
        std_error: r.std_error[0],
    })
}

/// Nodes and weights for the normalized measure on the unit sphere `S^(m-1)`
/// of R^m. Scale by the surface area for the unnormalized measure.
#[derive(Debug, Clone)]
pub struct RealSphereRule {
    m: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    meta: RuleMeta,
}

impl RealSphereRule {
    /// Equally spaced nodes on the unit circle of R².
    pub fn circle(count: usize) -> Result<Self> {
        let rule = circle_rule(count)?;
        let coords = rule.coords.iter().flat_map(|c| [c.re, c.im]).collect();
        Ok(Self {
            m: 2,
            coords,
            weights: rule.weights,
            meta: RuleMeta {
                dim: 2,
                ..rule.meta
            },
        })
    }

    /// Uniform Monte Carlo nodes on `S^(m-1)`.
    pub fn monte_carlo(m: usize, count: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return invalid("real sphere rule needs m >= 2");
        }
        if count < 100 {
            return invalid(format!("Monte Carlo rule needs at least 100 nodes, got {count}"));
        }
        Ok(Self {
            m,
            coords: unit_vectors(seed, count, m),
            weights: vec![1.0 / count as f64; count],
            meta: RuleMeta {
                kind: RuleKind::MonteCarlo,
                dim: m,
                nodes: count,
                seed: Some(seed),
                rng: Some(RNG_NAME),
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.m..(i + 1) * self.m]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn meta(&self) -> &RuleMeta {
        &self.meta
    }

    /// Normalized integral of a real integrand with its error estimate.
    pub fn integrate<G>(&self, g: G) -> Result<(f64, f64)>
    where
        G: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let count = self.len();
        let chunks = count.div_ceil(CHUNK);
        let partials: Vec<Result<[f64; 4]>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = [0.0; 4];
                for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    let v = g(self.node(i)).map_err(|e| Error::AtNode {
                        index: i,
                        source: Box::new(e),
                    })?;
                    let w = self.weights[i];
                    acc[0] += w * v;
                    if i % 2 == 0 {
                        acc[1] += w * v;
                    }
                    acc[2] += w * v * v;
                    acc[3] += w * v.abs();
                }
                Ok(acc)
            })
            .collect();
        let mut t = [0.0; 4];
        for p in partials {
            let p = p?;
            for k in 0..4 {
                t[k] += p[k];
            }
        }
        let err = if self.meta.kind == RuleKind::MonteCarlo {
            ((t[2] - t[0] * t[0]).max(0.0) / count as f64).sqrt()
        } else {
            let floor = (count as f64).sqrt() * f64::EPSILON * t[3];
            let half = if count % 2 == 0 { (t[0] - 2.0 * t[1]).abs() } else { 0.0 };
            half.max(floor)
        };
        Ok((t[0], err))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: &[Complex64]) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn circle_rule_exactness() {
        let rule = circle_rule(256).unwrap();
        let i1 = integrate(&rule, one).unwrap();
        assert!((i1.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let re = integrate(&rule, |z| Ok(Complex64::new(z[0].re, 0.0))).unwrap();
        assert!(re.value.norm() < 1e-15);
        let cos2 = integrate(&rule, |z| Ok(Complex64::new(z[0].re * z[0].re, 0.0))).unwrap();
        assert!((cos2.value.re - 0.5).abs() < 1e-14);
        assert!(circle_rule(3).is_err());
    }

    #[test]
    fn mc_rule_basics() {
        let rule = sphere_rule_mc(2, 20_000, 3).unwrap();
        let s: f64 = rule.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        for node in rule.nodes() {
            let r: f64 = node.iter().map(|c| c.norm_sqr()).sum();
            assert!((r.sqrt() - 1.0).abs() < 1e-12);
        }
        let m = integrate(&rule, |z| Ok(Complex64::new(z[0].norm_sqr(), 0.0))).unwrap();
        assert!((m.value.re - 0.5).abs() < 3.0 * m.std_error, "{m:?}");
        assert!(sphere_rule_mc(2, 99, 0).is_err());
    }

    #[test]
    fn mc_rule_is_deterministic() {
        let a = sphere_rule_mc(2, 5000, 11).unwrap();
        let b = sphere_rule_mc(2, 5000, 11).unwrap();
        let c = sphere_rule_mc(2, 5000, 12).unwrap();
        assert_eq!(a.coords, b.coords);
        assert_ne!(a.coords, c.coords);
        assert_eq!(a.meta().seed, Some(11));
    }

    #[test]
    fn errors_carry_node_index() {
        let rule = circle_rule(8).unwrap();
        let err = integrate(&rule, |z| {
            if z[0].im < -0.5 {
                Err(Error::NearSingular("test".into()))
            } else {
                Ok(z[0])
            }
        })
        .unwrap_err();
        // first failing node in index order is j = 5 (angle 5π/4)
        assert!(matches!(err, Error::AtNode { index: 5, .. }), "{err:?}");
    }

    #[test]
    fn real_circle_rule() {
        let rule = RealSphereRule::circle(64).unwrap();
        let (v, _) = rule.integrate(|t| Ok(t[0].abs())).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-3);
        let mc = RealSphereRule::monte_carlo(3, 10_000, 1).unwrap();
        let (v, e) = mc.integrate(|t| Ok(t[2] * t[2])).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 4.0 * e);
    }

    #[test]
    fn from_parts_validation() {
        let p = SpherePoint::new(vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(QuadratureRule::from_parts(vec![p.clone()], vec![0.5]).is_err());
        assert!(QuadratureRule::from_parts(vec![p.clone(), p.clone()], vec![1.5, -0.5]).is_err());
        assert!(QuadratureRule::from_parts(vec![p.clone(), p], vec![0.5, 0.5]).is_ok());
    }
}
