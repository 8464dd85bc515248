//! Monte Carlo check that the barrier embeds `mu`.
//!
//! Paths start from `nu` and run until they leave `(-s_-(t), s_+(t))`; the
//! law of the stopped values is compared with `mu` restricted to the part of
//! its support the barrier reaches by the horizon.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::MeasureError;
use crate::par::{map_indexed, Execution};
use crate::solver::{fmt_sig12, BarrierProblem, BoundaryPair, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("nu cannot be sampled: {0}")]
    Sampling(#[from] MeasureError),
    #[error("need at least {needed} stopped paths, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid Monte Carlo config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MCConfig {
    pub n_paths: usize,
    pub dt: f64,
    /// Path `i` draws from the ChaCha8 stream `i` of this seed.
    pub seed: u64,
    /// Time steps on the first boundary segment are `dt / first_segment_refinement`.
    pub first_segment_refinement: usize,
    pub execution: Execution,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self { n_paths: 100_000, dt: 1e-4, seed: 0x5eed, first_segment_refinement: 64, execution: Execution::Parallel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopSide {
    Upper,
    Lower,
    Censored,
}

impl StopSide {
    pub fn as_str(self) -> &'static str {
        match self {
            StopSide::Upper => "upper",
            StopSide::Lower => "lower",
            StopSide::Censored => "censored",
        }
    }
}

/// One simulated path. Censored paths have `sigma = T` and `w_stop = W_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingSample {
    pub path: usize,
    pub sigma: f64,
    pub w_stop: f64,
    pub side: StopSide,
}

/// Forward monitoring times with the boundary values at each.
struct Schedule {
    times: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

fn schedule(bp: &BoundaryPair, prob: &BarrierProblem, cfg: &MCConfig) -> Schedule {
    let horizon = bp.grid.horizon();
    let h = bp.grid.h();
    let fine = (h / (cfg.dt / cfg.first_segment_refinement as f64)).ceil().max(1.0) as usize;
    let coarse = ((horizon - h) / cfg.dt).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..fine).map(|i| h * i as f64 / fine as f64).collect();
    times.extend((0..=coarse).map(|i| h + (horizon - h) * i as f64 / coarse as f64));
    let upper = times.iter().map(|t| bp.forward(prob, Side::Plus, *t)).collect();
    let lower = times.iter().map(|t| bp.forward(prob, Side::Minus, *t)).collect();
    Schedule { times, upper, lower }
}

/// Probability that a Brownian bridge over a step of length `dt` touches a
/// linear boundary at distances `d0 > 0` and `d1 > 0` at its ends.
#[inline]
fn bridge_crossing(d0: f64, d1: f64, dt: f64) -> f64 {
    (-2.0 * d0 * d1 / dt).exp()
}

/// Simulate the first exit of `W^nu` from the barrier, one path per entry.
pub fn simulate_embedding(bp: &BoundaryPair, prob: &BarrierProblem, cfg: &MCConfig) -> Result<Vec<EmbeddingSample>, VerifyError> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) || cfg.first_segment_refinement == 0 {
        return Err(VerifyError::InvalidConfig("dt must be positive and the refinement at least 1".into()));
    }
    if cfg.dt > bp.grid.h() {
        return Err(VerifyError::InvalidConfig(format!("dt {} exceeds the boundary grid step {}", cfg.dt, bp.grid.h())));
    }
    if !prob.nu.is_sampleable() {
        return Err(VerifyError::Sampling(MeasureError::UnsupportedSampling));
    }
    let sched = schedule(bp, prob, cfg);
    let horizon = bp.grid.horizon();
    let samples = map_indexed(cfg.n_paths, cfg.execution, |path| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path as u64);
        let w0 = prob.nu.sample(&mut rng).expect("sampleable");
        run_path(path, w0, &sched, horizon, &mut rng)
    });
    Ok(samples)
}

fn run_path(path: usize, w0: f64, sched: &Schedule, horizon: f64, rng: &mut ChaCha8Rng) -> EmbeddingSample {
    let mut w = w0;
    for m in 1..sched.times.len() {
        let (t0, t1) = (sched.times[m - 1], sched.times[m]);
        let dt = t1 - t0;
        let z: f64 = rng.sample(StandardNormal);
        let w1 = w + dt.sqrt() * z;
        let (u0, u1) = (sched.upper[m - 1], sched.upper[m]);
        let (l0, l1) = (sched.lower[m - 1], sched.lower[m]);
        let (d0, d1) = (u0 - w, u1 - w1);
        let (e0, e1) = (w + l0, w1 + l1);
        let mut hit = None;
        if d1 <= 0.0 {
            hit = Some((StopSide::Upper, crossing_fraction(d0, d1)));
        } else if e1 <= 0.0 {
            hit = Some((StopSide::Lower, crossing_fraction(e0, e1)));
        } else {
            let pu = if d0 > 0.0 && d1.is_finite() { bridge_crossing(d0, d1, dt) } else { 0.0 };
            let pl = if e0 > 0.0 && e1.is_finite() { bridge_crossing(e0, e1, dt) } else { 0.0 };
            if pu > 0.0 || pl > 0.0 {
                let v: f64 = rng.gen();
                if v < pu {
                    hit = Some((StopSide::Upper, 0.5));
                } else if v < pu + pl {
                    hit = Some((StopSide::Lower, 0.5));
                }
            }
        }
        if let Some((side, frac)) = hit {
            let sigma = t0 + frac * dt;
            let w_stop = match side {
                StopSide::Upper => u0 + (u1 - u0) * frac,
                _ => -(l0 + (l1 - l0) * frac),
            };
            return EmbeddingSample { path, sigma, w_stop, side };
        }
        w = w1;
    }
    EmbeddingSample { path, sigma: horizon, w_stop: w, side: StopSide::Censored }
}

/// Where on the step a straight line from distance `d0` to `d1 <= 0` reaches zero.
fn crossing_fraction(d0: f64, d1: f64) -> f64 {
    if d0 <= 0.0 || !d0.is_finite() {
        0.0
    } else {
        d0 / (d0 - d1)
    }
}

pub fn samples_to_csv(samples: &[EmbeddingSample]) -> String {
    let mut out = String::from("path,sigma,w_stop,side\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{}", s.path, fmt_sig12(s.sigma), fmt_sig12(s.w_stop), s.side.as_str());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub ks: f64,
    pub n_stopped: usize,
    pub n_censored: usize,
    pub censor_pred: f64,
    pub censor_obs: f64,
}

impl EmbeddingReport {
    /// Binomial standard error of the observed censoring fraction under the prediction.
    pub fn censor_se(&self) -> f64 {
        let n = (self.n_stopped + self.n_censored) as f64;
        (self.censor_pred * (1.0 - self.censor_pred) / n).sqrt()
    }

    pub fn censor_z(&self) -> f64 {
        let se = self.censor_se();
        let diff = (self.censor_obs - self.censor_pred).abs();
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub const MIN_STOPPED: usize = 1000;

/// The target law seen by the horizon: `mu` restricted to
/// `[-s_-(T), s_+(T)]` and renormalized. Returns the CDF and the mass.
pub fn restricted_target<'a>(prob: &'a BarrierProblem, bp: &BoundaryPair) -> (impl Fn(f64) -> f64 + 'a, f64) {
    let lo = -bp.minus[0];
    let hi = bp.plus[0];
    let f_lo = if lo.is_finite() { prob.mu.cdf(lo) } else { 0.0 };
    let f_hi = if hi.is_finite() { prob.mu.cdf(hi) } else { 1.0 };
    let mass = f_hi - f_lo;
    let cdf = move |x: f64| {
        if x < lo {
            0.0
        } else if x >= hi {
            1.0
        } else {
            (prob.mu.cdf(x) - f_lo) / mass
        }
    };
    (cdf, mass)
}

/// Two-sided Kolmogorov–Smirnov statistic of `xs` against `cdf`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let f = cdf(*x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

pub fn embedding_test(samples: &[EmbeddingSample], prob: &BarrierProblem, bp: &BoundaryPair) -> Result<EmbeddingReport, VerifyError> {
    let mut stopped: Vec<f64> = samples.iter().filter(|s| s.side != StopSide::Censored).map(|s| s.w_stop).collect();
    if stopped.len() < MIN_STOPPED {
        return Err(VerifyError::TooFewSamples { needed: MIN_STOPPED, got: stopped.len() });
    }
    let (cdf, mass) = restricted_target(prob, bp);
    let ks = ks_statistic(&mut stopped, cdf);
    let n_stopped = stopped.len();
    let n_censored = samples.len() - n_stopped;
    Ok(EmbeddingReport {
        ks,
        n_stopped,
        n_censored,
        censor_pred: (1.0 - mass).max(0.0),
        censor_obs: n_censored as f64 / samples.len() as f64,
    })
}
