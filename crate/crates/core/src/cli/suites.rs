//! Check suites behind `hballs verify`. Each suite sweeps registry functions
//! over seeded samples and keeps the worst case per (check, function, n).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::Mapping;
use crate::error::{invalid, Result};
use crate::extension::{h_extend, scalar_registry, vector_registry, HExtension, DEFAULT_GUARD};
use crate::geometry::BallPoint;
use crate::norms::{default_radii, uniform_points, PairConfig, PairSet, SampleSet};
use crate::quadrature::{default_rule, seeded_stream, RealSphereRule};
use crate::theorems::{
    check_landau, check_lemma21, check_lemma22, check_lemma33, check_lemma_b,
    check_schwarz_pick_gradient, check_schwarz_pick_value, check_thm24_necessity,
    covered_ball_probe, landau_setting, random_matrices, univalence_probe, worst_case,
    CheckReport, DilatedDiagonal, NormalizedMapping,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma21,
    Lemma22,
    Thm24,
    Schwarzpick,
    Lemma33,
    #[value(name = "lemmaB")]
    #[serde(rename = "lemmaB")]
    LemmaB,
    Landau,
    All,
}

impl Suite {
    const ORDER: [Suite; 7] = [
        Suite::Lemma21,
        Suite::Lemma22,
        Suite::Thm24,
        Suite::Schwarzpick,
        Suite::Lemma33,
        Suite::LemmaB,
        Suite::Landau,
    ];

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Suite as ValueEnum>::from_str(s, false)
    }
}

/// Resolved parameters of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n: Vec<usize>,
    /// Quadrature nodes; `None` means 4096 (circle) for n = 1, 200000 (Monte Carlo) otherwise.
    pub nodes: Option<usize>,
    pub seed: u64,
    pub rmax: f64,
    /// Random matrices per size in the Lemma B suite.
    pub trials: usize,
    /// Overrides the per-suite sample counts.
    pub samples: Option<usize>,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            n: vec![1],
            nodes: None,
            seed: 0,
            rmax: DEFAULT_GUARD,
            trials: 10_000,
            samples: None,
            alpha: 1.0,
            m: 1.0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.n.iter().any(|&n| n == 0 || n > 8) {
            return invalid("n must lie in 1..=8");
        }
        if !(self.rmax > 0.0 && self.rmax < 1.0) {
            return invalid(format!("rmax must lie in (0, 1), got {}", self.rmax));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return invalid(format!("M must be >= 1, got {}", self.m));
        }
        if self.trials == 0 || self.samples == Some(0) {
            return invalid("trials and samples must be positive");
        }
        Ok(())
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn sub_seed(&self, tag: u64) -> u64 {
        self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

/// Registry extensions for one dimension, built once per run.
struct Extensions {
    scalar: Vec<Arc<HExtension>>,
    vector: Vec<Arc<HExtension>>,
}

struct Runner<'a> {
    cfg: &'a SuiteConfig,
    cache: Mutex<HashMap<usize, Arc<Extensions>>>,
}

impl<'a> Runner<'a> {
    fn extensions(&self, n: usize) -> Result<Arc<Extensions>> {
        if let Some(e) = self.cache.lock().expect("cache poisoned").get(&n) {
            return Ok(e.clone());
        }
        let rule = Arc::new(default_rule(n, self.cfg.nodes, self.cfg.seed)?);
        let guard = self.cfg.rmax.max(DEFAULT_GUARD);
        let build = |psi| -> Result<Arc<HExtension>> {
            Ok(Arc::new(h_extend(psi, rule.clone())?.with_guard(guard)?))
        };
        let e = Arc::new(Extensions {
            scalar: scalar_registry(n)?.iter().map(build).collect::<Result<_>>()?,
            vector: vector_registry(n)?.iter().map(build).collect::<Result<_>>()?,
        });
        self.cache.lock().expect("cache poisoned").insert(n, e.clone());
        Ok(e)
    }

    fn run(&self, suite: Suite) -> Result<Vec<CheckReport>> {
        if suite == Suite::All {
            let mut out = Vec::new();
            for s in Suite::ORDER {
                out.extend(self.run(s)?);
            }
            return Ok(out);
        }
        if suite == Suite::LemmaB {
            return self.lemma_b();
        }
        let mut out = Vec::new();
        for &n in &self.cfg.n {
            match suite {
                Suite::Lemma21 => out.extend(self.lemma21(n)?),
                Suite::Lemma22 => out.extend(self.lemma22(n)?),
                Suite::Thm24 => out.extend(self.thm24(n)?),
                Suite::Schwarzpick => out.extend(self.schwarz_pick(n)?),
                Suite::Lemma33 => out.extend(self.lemma33(n)?),
                Suite::Landau => out.extend(self.landau(n)?),
                Suite::LemmaB | Suite::All => unreachable!(),
            }
        }
        Ok(out)
    }

    fn points(&self, n: usize, count: usize, rmax: f64, tag: u64) -> Result<Vec<BallPoint>> {
        uniform_points(n, count, rmax, self.cfg.sub_seed(tag))
    }

    /// Real and imaginary parts of planar extensions on random discs inside
    /// the guard radius. Skipped for n ≥ 2, where the real-ball kernel does
    /// not represent the extensions.
    fn lemma21(&self, n: usize) -> Result<Vec<CheckReport>> {
        if n != 1 {
            return Ok(Vec::new());
        }
        let exts = self.extensions(1)?;
        let rule = RealSphereRule::circle(512)?;
        let rmax = self.cfg.rmax;
        let mut rng = seeded_stream(self.cfg.sub_seed(Suite::Lemma21.tag()), 0);
        let unit = Uniform::new(0.0f64, 1.0).expect("valid range");
        let balls: Vec<([f64; 2], f64)> = (0..self.cfg.samples_or(4))
            .map(|_| {
                let r = (0.1 + 0.3 * unit.sample(&mut rng)).min(rmax / 2.0);
                let rho = (rmax - r) * unit.sample(&mut rng).sqrt();
                let t = std::f64::consts::TAU * unit.sample(&mut rng);
                ([rho * t.cos(), rho * t.sin()], r)
            })
            .collect();
        let mut out = Vec::new();
        for ext in &exts.scalar {
            for (part, pick) in [("re", 0usize), ("im", 1)] {
                let u = |x: &[f64]| -> Result<f64> {
                    let v = ext.eval(&[Complex64::new(x[0], x[1])])?[0];
                    Ok(if pick == 0 { v.re } else { v.im })
                };
                let label = format!("{part}({})", ext.label());
                let reports = balls
                    .par_iter()
                    .map(|(a, r)| check_lemma21(&u, &label, a, *r, &rule))
                    .collect::<Result<Vec<_>>>()?;
                out.push(worst_case(reports)?.with_rule(ext.rule().meta()));
            }
        }
        Ok(out)
    }

    fn lemma22(&self, n: usize) -> Result<Vec<CheckReport>> {
        let exts = self.extensions(n)?;
        let pts = self.points(n, self.cfg.samples_or(100), self.cfg.rmax, Suite::Lemma22.tag())?;
        exts.scalar
            .iter()
            .map(|ext| {
                let reports = pts
                    .par_iter()
                    .map(|z| check_lemma22(ext.as_ref(), z))
                    .collect::<Result<Vec<_>>>()?;
                Ok(worst_case(reports)?.with_rule(ext.rule().meta()))
            })
            .collect()
    }

    fn thm24(&self, n: usize) -> Result<Vec<CheckReport>> {
        let exts = self.extensions(n)?;
        let rmax = self.cfg.rmax;
        let cfg = PairConfig {
            radii: default_radii().into_iter().filter(|&r| r <= rmax).collect(),
            directions: 16,
            offset_directions: if n == 1 { 16 } else { 8 },
            rmax,
            seed: self.cfg.sub_seed(Suite::Thm24.tag()),
            ..PairConfig::default()
        };
        let pairs = PairSet::build(n, &cfg)?;
        exts.scalar
            .iter()
            .map(|ext| Ok(check_thm24_necessity(ext.as_ref(), &pairs)?.with_rule(ext.rule().meta())))
            .collect()
    }

    fn schwarz_pick(&self, n: usize) -> Result<Vec<CheckReport>> {
        let exts = self.extensions(n)?;
        let pts = self.points(n, self.cfg.samples_or(200), self.cfg.rmax, Suite::Schwarzpick.tag())?;
        let mut out = Vec::new();
        for ext in exts.scalar.iter().chain(&exts.vector) {
            let pairs = pts
                .par_iter()
                .map(|z| Ok((check_schwarz_pick_value(ext, z)?, check_schwarz_pick_gradient(ext, z)?)))
                .collect::<Result<Vec<_>>>()?;
            let (values, grads): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            out.push(worst_case(values)?);
            out.push(worst_case(grads)?);
        }
        Ok(out)
    }

    fn lemma33(&self, n: usize) -> Result<Vec<CheckReport>> {
        let exts = self.extensions(n)?;
        let guard = self.cfg.rmax.max(DEFAULT_GUARD);
        let mut out = Vec::new();
        for r in [0.5, 0.9] {
            let pts = self.points(n, self.cfg.samples_or(50), guard * r, Suite::Lemma33.tag())?;
            for ext in &exts.scalar {
                let a = DilatedDiagonal::new(ext.clone(), r)?;
                let reports = pts
                    .par_iter()
                    .map(|z| check_lemma33(&a, z))
                    .collect::<Result<Vec<_>>>()?;
                out.push(worst_case(reports)?);
            }
        }
        Ok(out)
    }

    /// Random complex matrices of sizes 2, 3, 4 plus the diagonal equality
    /// cases `diag(2, ..., 2, 1/2)`.
    fn lemma_b(&self) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for size in 2..=4 {
            let mats = random_matrices(size, self.cfg.trials, self.cfg.sub_seed(Suite::LemmaB.tag()));
            let reports = mats.par_iter().map(check_lemma_b).collect::<Result<Vec<_>>>()?;
            out.push(worst_case(reports)?.with_seed(self.cfg.seed));
            let mut d = DMatrix::<Complex64>::identity(size, size) * Complex64::from(2.0);
            d[(size - 1, size - 1)] = Complex64::from(0.5);
            let mut eq = check_lemma_b(&d)?;
            eq.check_id = "lemmaB.diagonal".into();
            out.push(eq);
        }
        Ok(out)
    }

    /// Constant identities at the configured `(α, M)`, then the univalence
    /// and covered-ball probes on normalized registry mappings. Mappings with
    /// a degenerate Jacobian at 0 cannot be normalized and are skipped.
    fn landau(&self, n: usize) -> Result<Vec<CheckReport>> {
        let mut out = check_landau(n, self.cfg.alpha, self.cfg.m)?;
        let exts = self.extensions(n)?;
        let radii: Vec<f64> = (0..=16).map(|i| i as f64 * 0.05).filter(|&r| r <= self.cfg.rmax).collect();
        let grid = SampleSet::radial_grid(n, &radii, 16)?;
        for ext in &exts.vector {
            let inner: Arc<dyn Mapping> = ext.clone();
            let Ok(f) = NormalizedMapping::new(inner) else {
                continue;
            };
            let setting = landau_setting(&f, self.cfg.alpha, &grid)?;
            let c = setting.constants;
            let h = c.half_rho;
            let pairs = PairSet::build(
                n,
                &PairConfig {
                    radii: [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|t| t * h).collect(),
                    directions: 16,
                    offsets: vec![0.01 * h, 0.3 * h],
                    offset_directions: 16,
                    random_pairs: 200,
                    antipodal: true,
                    rmax: h,
                    seed: self.cfg.sub_seed(Suite::Landau.tag()),
                },
            )?;
            let note = if setting.lambda_condition {
                format!("M = {} from the alpha-Bloch estimate", c.m)
            } else {
                format!("lambda_F(0) = {} is below M^(1-2n) = {}", setting.lambda0, c.m.powi(1 - 2 * n as i32))
            };
            let probe = univalence_probe(&f, h, &pairs, 0.0)?;
            let probe_note = format!("{}; {note}", probe.note.clone().unwrap_or_default());
            out.push(probe.with_note(probe_note).with_rule(ext.rule().meta()));
            out.push(covered_ball_probe(&f, &c, 100)?.with_note(note).with_rule(ext.rule().meta()));
        }
        Ok(out)
    }
}

/// Runs the configured suite; reports come back in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    cfg.validate()?;
    let runner = Runner {
        cfg,
        cache: Mutex::new(HashMap::new()),
    };
    runner.run(cfg.suite)
}
