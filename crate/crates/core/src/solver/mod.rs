//! Backward recursion for the barrier boundaries.
//!
//! At each grid node `t_k`, from `t_{N-1}` down to `t_0`, the boundary values
//! `b_+(t_k)` and `b_-(t_k)` are the roots of
//!
//! ```text
//! R_±(x) = ∫_{t_k}^T ∫_{-b_-(u)}^{b_+(u)} p(t_k, ±x, u, y) (nu - mu)(dy) du
//! ```
//!
//! where the boundaries on `[t_k, T]` are the continuous path model of
//! [`BoundaryPair`] with the candidate `x` at `t_k`. Both equations share the
//! segment `[t_k, t_{k+1}]`, so two-sided problems alternate between the
//! sides until the pair stops moving.

mod boundary;
mod grid;
mod inverse;
mod problem;
mod residual;
mod root;

pub use boundary::{fmt_sig12, interpolate, interpolate_inverse, profile_weight, start_profile, BoundaryPair, CsvError, PathView};
pub use grid::Grid;
pub use inverse::GeneralizedInverse;
pub use problem::{BarrierProblem, Mode, Side};
pub use residual::{kernel_mass, rectangle_residual, residual, signed_kernel_mass, time_integral, TimeRule};
pub use root::{find_root, find_root_near, Root, RootFailure};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::Execution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("no sign change for the {side} boundary at node {k}: {detail}")]
    NoSignChange { k: usize, side: Side, detail: String },
    #[error("alternating sweeps at node {k} did not settle within {sweeps} sweeps")]
    SweepDivergence { k: usize, sweeps: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

impl SolverError {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverError::NoSignChange { .. } => "NoSignChange",
            SolverError::SweepDivergence { .. } => "SweepDivergence",
            SolverError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Sweeps stop once neither boundary value moves more than this.
    pub root_abs_tol: f64,
    /// Every accepted node must have `|residual|` below this.
    pub residual_tol: f64,
    pub max_bisection_iters: usize,
    pub newton_polish_iters: usize,
    /// Bracket width at which bisection hands over to Newton.
    pub bisection_width: f64,
    /// Finite-difference step for the Newton slope.
    pub fd_step: f64,
    /// Root bracket cap: support edge plus this many `sqrt(T)`.
    pub cap_sigmas: f64,
    /// Alternate between the two sides at each node until they settle.
    pub sweeps: bool,
    pub max_sweeps: usize,
    pub near_nodes: usize,
    pub far_nodes: usize,
    /// Geometric refinement levels on the first time segment.
    pub first_segment_grading: usize,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            root_abs_tol: 1e-10,
            residual_tol: 1e-9,
            max_bisection_iters: 200,
            newton_polish_iters: 5,
            bisection_width: 1e-6,
            fd_step: 1e-7,
            cap_sigmas: 6.0,
            sweeps: true,
            max_sweeps: 50,
            near_nodes: 12,
            far_nodes: 4,
            first_segment_grading: 20,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("root_abs_tol", self.root_abs_tol),
            ("residual_tol", self.residual_tol),
            ("bisection_width", self.bisection_width),
            ("fd_step", self.fd_step),
            ("cap_sigmas", self.cap_sigmas),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SolverError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_sweeps == 0 || self.near_nodes < 2 || self.far_nodes < 2 || self.near_nodes > 64 || self.far_nodes > 64 {
            return Err(SolverError::InvalidConfig("max_sweeps >= 1 and node counts in 2..=64 required".into()));
        }
        if self.first_segment_grading > 60 {
            return Err(SolverError::InvalidConfig("first_segment_grading must be at most 60".into()));
        }
        Ok(())
    }

    pub fn time_rule(&self) -> TimeRule {
        TimeRule { near: self.near_nodes, far: self.far_nodes, grade: self.first_segment_grading }
    }
}

/// Per-node solver record. Residuals are `None` for absent boundaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub residual_plus: Vec<Option<f64>>,
    pub residual_minus: Vec<Option<f64>>,
    pub sweeps: Vec<usize>,
    pub max_abs_residual: f64,
    pub residual_evaluations: usize,
    pub cap_plus: f64,
    pub cap_minus: f64,
    /// Nodes whose residual was already negative at the previous boundary
    /// value and were held there.
    pub clamped: Vec<(usize, Side)>,
}

impl Diagnostics {
    /// Whether every solved node meets `tol`.
    pub fn certified(&self, tol: f64) -> bool {
        self.residual_plus.iter().chain(&self.residual_minus).flatten().all(|r| r.abs() < tol)
    }
}

struct SideState {
    values: Vec<f64>,
    cap: f64,
}

/// Solve for both boundaries on `grid`.
pub fn solve_boundaries(
    prob: &BarrierProblem,
    grid: Grid,
    cfg: &SolverConfig,
) -> Result<(BoundaryPair, Diagnostics), SolverError> {
    cfg.validate()?;
    let n = grid.steps();
    let h = grid.h();
    let rule = cfg.time_rule();
    let exec = cfg.execution;
    let mut sides = [Side::Plus, Side::Minus].map(|side| SideState {
        values: vec![if prob.is_active(side) { prob.hat_b(side) } else { f64::INFINITY }; n + 1],
        cap: if prob.is_active(side) { prob.cap(side, grid.horizon(), cfg.cap_sigmas) } else { f64::INFINITY },
    });
    let profile_plus = prob.has_start_profile(Side::Plus);
    let profile_minus = prob.has_start_profile(Side::Minus);
    let mut diag = Diagnostics {
        residual_plus: vec![None; n + 1],
        residual_minus: vec![None; n + 1],
        sweeps: vec![0; n + 1],
        max_abs_residual: 0.0,
        residual_evaluations: 0,
        cap_plus: sides[0].cap,
        cap_minus: sides[1].cap,
        clamped: Vec::new(),
    };
    let active: Vec<Side> = [Side::Plus, Side::Minus].into_iter().filter(|s| prob.is_active(*s)).collect();
    let idx = |s: Side| match s {
        Side::Plus => 0,
        Side::Minus => 1,
    };

    for k in (0..n).rev() {
        // initial values at t_k: extrapolate from the two previous nodes
        let mut current = [f64::INFINITY; 2];
        for &side in &active {
            let v = &sides[idx(side)].values;
            current[idx(side)] = if k + 2 <= n { v[k + 1] + (v[k + 1] - v[k + 2]).max(0.0) } else { v[k + 1] + h.sqrt() };
        }
        let mut solved = [false; 2];
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut moved: f64 = 0.0;
            for &side in &active {
                let i = idx(side);
                let other = current[1 - i];
                let state = &sides[i];
                let view = PathView {
                    prob,
                    grid: &grid,
                    plus: &sides[0].values,
                    minus: &sides[1].values,
                    profile_plus,
                    profile_minus,
                    replaced: None,
                };
                let f = |x: f64| residual(prob, &view, k, side, x, other, rule, exec);
                let lower = state.values[k + 1];
                let result = if solved[i] {
                    find_root_near(f, current[i], lower, state.cap * 1.5, cfg)
                } else {
                    let prev_step = if k + 2 <= n { state.values[k + 1] - state.values[k + 2] } else { 0.0 };
                    let first = if prev_step > 0.0 { prev_step } else { h.sqrt() / 8.0 };
                    find_root(f, lower, state.cap, first, h.sqrt() / 4.0, cfg)
                };
                // Just after a jump the discrete root can sit marginally below
                // the previous value; hold the boundary there.
                let root = match result {
                    Ok(root) => root,
                    Err(RootFailure::NegativeAtLower(r)) => {
                        if !diag.clamped.contains(&(k, side)) {
                            diag.clamped.push((k, side));
                        }
                        Root { x: lower, residual: r, evaluations: 1 }
                    }
                    Err(RootFailure::NoSignChange) => {
                        return Err(SolverError::NoSignChange {
                            k,
                            side,
                            detail: format!("residual stays positive up to {}", state.cap * 1.5),
                        })
                    }
                };
                diag.residual_evaluations += root.evaluations;
                if solved[i] {
                    moved = moved.max((root.x - current[i]).abs());
                } else {
                    moved = f64::INFINITY;
                }
                current[i] = root.x;
                solved[i] = true;
            }
            if active.len() < 2 || !cfg.sweeps || moved < cfg.root_abs_tol {
                break;
            }
            if sweeps >= cfg.max_sweeps {
                return Err(SolverError::SweepDivergence { k, sweeps });
            }
        }
        for &side in &active {
            sides[idx(side)].values[k] = current[idx(side)];
        }
        // certify against the final pair
        let view = PathView {
            prob,
            grid: &grid,
            plus: &sides[0].values,
            minus: &sides[1].values,
            profile_plus,
            profile_minus,
            replaced: None,
        };
        for &side in &active {
            let i = idx(side);
            let r = residual(prob, &view, k, side, current[i], current[1 - i], rule, exec);
            diag.residual_evaluations += 1;
            diag.max_abs_residual = diag.max_abs_residual.max(r.abs());
            match side {
                Side::Plus => diag.residual_plus[k] = Some(r),
                Side::Minus => diag.residual_minus[k] = Some(r),
            }
        }
        diag.sweeps[k] = sweeps;
    }
    let [plus, minus] = sides.map(|s| s.values);
    Ok((BoundaryPair { grid, plus, minus, profile_plus, profile_minus }, diag))
}

#[cfg(test)]
mod tests;
