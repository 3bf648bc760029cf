//! Bloch-type functionals as sup estimates over explicit sample sets.
//!
//! Every estimate is a lower bound of the true supremum: it is the maximum of
//! the functional over the samples, reported with the sample(s) attaining it.
//! Ties go to the lowest sample index.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{wirtinger, Mapping};
use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::{dist_sqr_raw, hyp_dist_scalar, norm, norm_sqr_raw, BallPoint};
use crate::quadrature::seeded_stream;

/// Radii `0, 0.1, ..., 0.7`.
pub fn default_radii() -> Vec<f64> {
    (0..8).map(|i| i as f64 / 10.0).collect()
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `count` unit directions in C^n: equally spaced angles for `n = 1`, a
/// Halton sequence pushed through Box-Muller and normalized otherwise.
pub fn directions(n: usize, count: usize) -> Result<Vec<Vec<Complex64>>> {
    if n == 0 || count == 0 {
        return invalid("directions need n >= 1 and count >= 1");
    }
    if n == 1 {
        return Ok((0..count)
            .map(|j| vec![Complex64::from_polar(1.0, 2.0 * PI * j as f64 / count as f64)])
            .collect());
    }
    if 2 * n > PRIMES.len() {
        return invalid(format!("low-discrepancy directions support n <= {}", PRIMES.len() / 2));
    }
    Ok((1..=count as u64)
        .map(|i| {
            let mut v: Vec<Complex64> = (0..n)
                .map(|k| {
                    // radical inverses are in [0, 1); shift off zero for the log
                    let u1 = 1.0 - radical_inverse(i, PRIMES[2 * k]);
                    let u2 = radical_inverse(i, PRIMES[2 * k + 1]);
                    Complex64::from_polar((-2.0 * u1.ln()).sqrt(), 2.0 * PI * u2)
                })
                .collect();
            let r = norm(&v);
            v.iter_mut().for_each(|c| *c /= r);
            v
        })
        .collect())
}

/// Seeded uniform points of the ball of radius `rmax` in C^n.
pub fn uniform_points(n: usize, count: usize, rmax: f64, seed: u64) -> Result<Vec<BallPoint>> {
    if !(rmax > 0.0 && rmax < 1.0) {
        return invalid(format!("rmax must lie in (0, 1), got {rmax}"));
    }
    let mut rng = seeded_stream(seed, 0x00b0_11a5);
    let unit = Uniform::new(0.0f64, 1.0).expect("valid range");
    (0..count)
        .map(|_| {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let r = norm(&v).max(f64::MIN_POSITIVE);
            let radius = rmax * unit.sample(&mut rng).powf(1.0 / (2 * n) as f64);
            v.iter_mut().for_each(|c| *c *= radius / r);
            BallPoint::new(v)
        })
        .collect()
}

/// How a sample set was generated; enough to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSpec {
    pub kind: String,
    pub n: usize,
    pub radii: Vec<f64>,
    pub directions: usize,
    pub offsets: Vec<f64>,
    pub offset_directions: usize,
    pub random: usize,
    pub antipodal: bool,
    pub rmax: Option<f64>,
    pub seed: Option<u64>,
}

impl SampleSpec {
    fn new(kind: &str, n: usize) -> Self {
        Self {
            kind: kind.to_string(),
            n,
            radii: Vec::new(),
            directions: 0,
            offsets: Vec::new(),
            offset_directions: 0,
            random: 0,
            antipodal: false,
            rmax: None,
            seed: None,
        }
    }
}

/// Points at which a pointwise functional is maximized.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<BallPoint>,
    spec: SampleSpec,
}

impl SampleSet {
    /// Radii × directions; radius 0 contributes the origin once.
    pub fn radial_grid(n: usize, radii: &[f64], dirs: usize) -> Result<Self> {
        let ds = directions(n, dirs)?;
        let mut points = Vec::new();
        for &r in radii {
            if r == 0.0 {
                points.push(BallPoint::origin(n)?);
                continue;
            }
            for d in &ds {
                points.push(BallPoint::new(d.iter().map(|c| c * r).collect())?);
            }
        }
        let mut spec = SampleSpec::new("radial_grid", n);
        spec.radii = radii.to_vec();
        spec.directions = dirs;
        Ok(Self { points, spec })
    }

    /// Seeded uniform points in the ball of radius `rmax`.
    pub fn uniform(n: usize, count: usize, rmax: f64, seed: u64) -> Result<Self> {
        let mut spec = SampleSpec::new("uniform", n);
        spec.random = count;
        spec.rmax = Some(rmax);
        spec.seed = Some(seed);
        Ok(Self {
            points: uniform_points(n, count, rmax, seed)?,
            spec,
        })
    }

    pub fn from_points(points: Vec<BallPoint>) -> Result<Self> {
        let n = points.first().map(BallPoint::dim).ok_or(Error::EmptySamples)?;
        for p in &points {
            check_dim(n, p.dim())?;
        }
        Ok(Self {
            points,
            spec: SampleSpec::new("explicit", n),
        })
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    pub fn spec(&self) -> &SampleSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pairs of distinct points, stored as indices into a shared pool so each
/// point is evaluated once.
#[derive(Debug, Clone)]
pub struct PairSet {
    pool: Vec<BallPoint>,
    pairs: Vec<(usize, usize)>,
    grid_len: usize,
    spec: SampleSpec,
}

/// Parameters of [`PairSet::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub radii: Vec<f64>,
    pub directions: usize,
    /// Partner distances `|w - z|` for near pairs.
    pub offsets: Vec<f64>,
    pub offset_directions: usize,
    pub random_pairs: usize,
    /// Also pair every nonzero grid point `z` with `-z`.
    pub antipodal: bool,
    pub rmax: f64,
    pub seed: u64,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            directions: 16,
            offsets: vec![1e-3, 0.05],
            offset_directions: 16,
            random_pairs: 200,
            antipodal: false,
            rmax: 0.7,
            seed: 0,
        }
    }
}

impl PairSet {
    /// Grid points paired with nearby partners `z + δu`, plus seeded uniform
    /// pairs. The first [`PairSet::grid_len`] pool points form the radial grid.
    pub fn build(n: usize, cfg: &PairConfig) -> Result<Self> {
        let grid = SampleSet::radial_grid(n, &cfg.radii, cfg.directions)?;
        let offs = directions(n, cfg.offset_directions)?;
        let mut pool = grid.points.clone();
        let grid_len = pool.len();
        let mut pairs = Vec::new();
        let limit = cfg.rmax.max(cfg.radii.iter().copied().fold(0.0, f64::max));
        for i in 0..grid_len {
            for &delta in &cfg.offsets {
                for u in &offs {
                    let w: Vec<Complex64> = pool[i]
                        .coords()
                        .iter()
                        .zip(u)
                        .map(|(a, b)| a + b * delta)
                        .collect();
                    if norm(&w) > limit {
                        continue;
                    }
                    pool.push(BallPoint::new(w)?);
                    pairs.push((i, pool.len() - 1));
                }
            }
        }
        if cfg.antipodal {
            for i in 0..grid_len {
                if pool[i].norm() == 0.0 {
                    continue;
                }
                let w = pool[i].coords().iter().map(|c| -c).collect();
                pool.push(BallPoint::new(w)?);
                pairs.push((i, pool.len() - 1));
            }
        }
        let random = uniform_points(n, 2 * cfg.random_pairs, cfg.rmax, cfg.seed)?;
        for chunk in random.chunks_exact(2) {
            if dist_sqr_raw(chunk[0].coords(), chunk[1].coords()) == 0.0 {
                continue;
            }
            pool.push(chunk[0].clone());
            pool.push(chunk[1].clone());
            pairs.push((pool.len() - 2, pool.len() - 1));
        }
        let spec = SampleSpec {
            kind: "pairs".into(),
            n,
            radii: cfg.radii.clone(),
            directions: cfg.directions,
            offsets: cfg.offsets.clone(),
            offset_directions: cfg.offset_directions,
            random: cfg.random_pairs,
            antipodal: cfg.antipodal,
            rmax: Some(cfg.rmax),
            seed: Some(cfg.seed),
        };
        Ok(Self {
            pool,
            pairs,
            grid_len,
            spec,
        })
    }

    /// Explicit pairs; rejects coincident points.
    pub fn from_pairs(pairs: Vec<(BallPoint, BallPoint)>) -> Result<Self> {
        let n = pairs.first().map(|p| p.0.dim()).ok_or(Error::EmptySamples)?;
        let mut pool = Vec::with_capacity(2 * pairs.len());
        let mut idx = Vec::with_capacity(pairs.len());
        for (z, w) in pairs {
            check_dim(n, z.dim())?;
            check_dim(n, w.dim())?;
            if dist_sqr_raw(z.coords(), w.coords()) == 0.0 {
                return Err(Error::DegeneratePair);
            }
            pool.push(z);
            pool.push(w);
            idx.push((pool.len() - 2, pool.len() - 1));
        }
        Ok(Self {
            pool,
            pairs: idx,
            grid_len: 0,
            spec: SampleSpec::new("explicit_pairs", n),
        })
    }

    pub fn pool(&self) -> &[BallPoint] {
        &self.pool
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// The radial grid the pairs are anchored on, as a sample set.
    pub fn grid(&self) -> Result<SampleSet> {
        let mut spec = self.spec.clone();
        spec.kind = "radial_grid".into();
        if self.grid_len == 0 {
            return Err(Error::EmptySamples);
        }
        Ok(SampleSet {
            points: self.pool[..self.grid_len].to_vec(),
            spec,
        })
    }

    /// All pool points as a sample set.
    pub fn pool_samples(&self) -> SampleSet {
        let mut spec = self.spec.clone();
        spec.kind = "pair_pool".into();
        SampleSet {
            points: self.pool.clone(),
            spec,
        }
    }

    pub fn spec(&self) -> &SampleSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A lower estimate of a supremum, with the sample(s) attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEstimate {
    pub value: f64,
    pub witness: Vec<Vec<Complex64>>,
    pub witness_index: usize,
    pub samples: usize,
    pub sample_spec: SampleSpec,
    /// Largest finite-difference truncation estimate over the samples.
    pub fd_error: f64,
    /// Largest quadrature error estimate over the samples.
    pub quad_error: f64,
    /// Largest floating-point rounding bound over the samples.
    pub rounding: f64,
}

struct Scored {
    value: f64,
    fd: f64,
    quad: f64,
    rounding: f64,
}

/// Relative rounding allowance for a difference of two computed values.
const DIFF_ROUNDING: f64 = 64.0 * f64::EPSILON;

/// Arg-max with lowest-index tie breaking.
fn argmax(scores: &[Scored]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if !s.value.is_finite() {
            return Err(Error::NonFinite(format!("functional value at sample {i}")));
        }
        if best.is_none_or(|b| s.value > scores[b].value) {
            best = Some(i);
        }
    }
    best.ok_or(Error::EmptySamples)
}

fn finish(
    scores: Vec<Scored>,
    witness: impl Fn(usize) -> Vec<Vec<Complex64>>,
    spec: &SampleSpec,
) -> Result<SupEstimate> {
    let i = argmax(&scores)?;
    Ok(SupEstimate {
        value: scores[i].value,
        witness: witness(i),
        witness_index: i,
        samples: scores.len(),
        sample_spec: spec.clone(),
        fd_error: scores.iter().map(|s| s.fd).fold(0.0, f64::max),
        quad_error: scores.iter().map(|s| s.quad).fold(0.0, f64::max),
        rounding: scores.iter().map(|s| s.rounding).fold(0.0, f64::max),
    })
}

fn weighted_density(f: &dyn Mapping, z: &[Complex64], alpha: f64) -> Result<Scored> {
    let w = wirtinger(f, z)?;
    let weight = (1.0 - norm_sqr_raw(z)).powf(alpha);
    Ok(Scored {
        value: weight * w.data.bloch_density(),
        fd: weight * w.fd_error,
        quad: weight * w.quad_error,
        rounding: 0.0,
    })
}

fn density_sup(f: &dyn Mapping, samples: &SampleSet, alpha: f64) -> Result<SupEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    check_dim(f.complex_dim(), samples.spec.n)?;
    let scores = samples
        .points
        .par_iter()
        .map(|p| weighted_density(f, p.coords(), alpha))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    finish(scores, |i| vec![samples.points[i].coords().to_vec()], &samples.spec)
}

/// `max (1 - |z|²)(|∇̂f(z)| + |∇̂f̄(z)|)` over the samples, for scalar `f`.
pub fn bloch_seminorm(f: &dyn Mapping, samples: &SampleSet) -> Result<SupEstimate> {
    check_dim(1, f.out_dim())?;
    density_sup(f, samples, 1.0)
}

/// `max (1 - |z|²)^α (|f_z(z)| + |f_z̄(z)|)` with operator norms.
pub fn alpha_bloch_seminorm(f: &dyn Mapping, alpha: f64, samples: &SampleSet) -> Result<SupEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    density_sup(f, samples, alpha)
}

fn lipschitz_weight(z: &[Complex64], w: &[Complex64]) -> Result<f64> {
    let d2 = dist_sqr_raw(z, w);
    if d2 == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(((1.0 - norm_sqr_raw(z)) * (1.0 - norm_sqr_raw(w))).sqrt() / d2.sqrt())
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    dist_sqr_raw(a, b).sqrt()
}

/// `L_f(z, w) = (1 - |z|²)^½ (1 - |w|²)^½ |f(z) - f(w)| / |z - w|`.
pub fn weighted_lipschitz(f: &dyn Mapping, z: &BallPoint, w: &BallPoint) -> Result<f64> {
    check_dim(f.complex_dim(), z.dim())?;
    check_dim(f.complex_dim(), w.dim())?;
    let weight = lipschitz_weight(z.coords(), w.coords())?;
    Ok(weight * diff_norm(&f.eval(z.coords())?, &f.eval(w.coords())?))
}

type PoolValues = Vec<(Vec<Complex64>, f64)>;

fn eval_pool(f: &dyn Mapping, pairs: &PairSet) -> Result<PoolValues> {
    check_dim(f.complex_dim(), pairs.spec.n)?;
    pairs
        .pool
        .par_iter()
        .map(|p| f.eval_with_error(p.coords()))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn pair_sup<Q>(pairs: &PairSet, values: &PoolValues, quotient: Q) -> Result<SupEstimate>
where
    Q: Fn(&[Complex64], &[Complex64]) -> Result<f64>,
{
    if pairs.is_empty() {
        return Err(Error::EmptySamples);
    }
    let scores = pairs
        .pairs
        .iter()
        .map(|&(i, j)| {
            let (z, w) = (pairs.pool[i].coords(), pairs.pool[j].coords());
            let q = quotient(z, w)?;
            let scale = norm(&values[i].0) + norm(&values[j].0);
            Ok(Scored {
                value: q * diff_norm(&values[i].0, &values[j].0),
                fd: 0.0,
                quad: q * (values[i].1 + values[j].1),
                rounding: q * DIFF_ROUNDING * scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    finish(
        scores,
        |k| {
            let (i, j) = pairs.pairs[k];
            vec![pairs.pool[i].coords().to_vec(), pairs.pool[j].coords().to_vec()]
        },
        &pairs.spec,
    )
}

/// `max L_f(z, w)` over the pairs.
pub fn weighted_lipschitz_sup(f: &dyn Mapping, pairs: &PairSet) -> Result<SupEstimate> {
    let values = eval_pool(f, pairs)?;
    pair_sup(pairs, &values, lipschitz_weight)
}

/// Both estimates of the Lipschitz number `β_f` of a planar mapping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzNumber {
    /// `max |f(z) - f(w)| / ρ(z, w)` over the pairs.
    pub quotient: SupEstimate,
    /// `max (1 - |z|²)(|f_z| + |f_z̄|)` over the pair pool.
    pub derivative: SupEstimate,
}

impl LipschitzNumber {
    /// `|quotient - derivative| / max(quotient, derivative)`; zero when both vanish.
    pub fn relative_gap(&self) -> f64 {
        let big = self.quotient.value.max(self.derivative.value);
        if big == 0.0 {
            0.0
        } else {
            (self.quotient.value - self.derivative.value).abs() / big
        }
    }
}

/// Lipschitz number of a planar (`n = 1`) mapping with its derivative cross-check.
pub fn lipschitz_number(f: &dyn Mapping, pairs: &PairSet) -> Result<LipschitzNumber> {
    check_dim(1, f.complex_dim())?;
    let values = eval_pool(f, pairs)?;
    let quotient = pair_sup(pairs, &values, |z, w| {
        let rho = hyp_dist_scalar(z[0], w[0]);
        if rho == 0.0 {
            return Err(Error::DegeneratePair);
        }
        Ok(1.0 / rho)
    })?;
    let derivative = density_sup(f, &pairs.pool_samples(), 1.0)?;
    Ok(LipschitzNumber {
        quotient,
        derivative,
    })
}
