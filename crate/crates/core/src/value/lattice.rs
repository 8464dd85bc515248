use std::fmt::Write as _;

use serde::Serialize;

use super::payoff_g;
use crate::par::{fill_indexed, Execution};
use crate::solver::{fmt_sig12, BarrierProblem, BoundaryPair, Grid, Side};

/// Symmetric random-walk lattice: time step `h` from `grid`, space step
/// `sqrt(h)`, nodes `x_j = j dx` for `|j| <= J` with reflection at `±J dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub grid: Grid,
    pub radius: f64,
}

impl LatticeSpec {
    /// Radius covering both measures plus `margin_sigmas * sqrt(T)`, the
    /// same truncation as the solver's root bracket.
    pub fn for_problem(prob: &BarrierProblem, grid: Grid, margin_sigmas: f64) -> Self {
        let (mlo, mhi) = prob.mu.effective_hull();
        let (nlo, nhi) = prob.nu.effective_hull();
        let reach = [mlo, mhi, nlo, nhi].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Self { grid, radius: reach + margin_sigmas * grid.horizon().sqrt() }
    }

    pub fn dx(&self) -> f64 {
        self.grid.h().sqrt()
    }

    pub fn half_width(&self) -> usize {
        (self.radius / self.dx()).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct LatticeSolution {
    pub spec: LatticeSpec,
    pub xs: Vec<f64>,
    pub payoff: Vec<f64>,
    /// `values[k][j]`, `k` indexing backward grid time.
    pub values: Vec<Vec<f64>>,
    /// Outermost continuation node on each side per time level; `inf` when
    /// the continuation region reaches the lattice edge or the side has no
    /// boundary, the initial boundary value when the region is empty.
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Whether each level's continuation set is a single run of nodes.
    pub single_interval: bool,
}

const SLACK: f64 = 1e-12;

/// Backward induction `V_k = max(G, (V_{k+1}(x - dx) + V_{k+1}(x + dx)) / 2)`
/// from `V_N = G`.
pub fn lattice_value(prob: &BarrierProblem, spec: LatticeSpec, exec: Execution) -> LatticeSolution {
    let n = spec.grid.steps();
    let big_j = spec.half_width();
    let width = 2 * big_j + 1;
    let dx = spec.dx();
    let xs: Vec<f64> = (0..width).map(|i| (i as f64 - big_j as f64) * dx).collect();
    let payoff: Vec<f64> = xs.iter().map(|x| payoff_g(*x, prob)).collect();
    let values = backward_induction(&payoff, n, exec);

    let mut plus = vec![0.0; n + 1];
    let mut minus = vec![0.0; n + 1];
    let mut single_interval = true;
    // On a side without a boundary the walk's light cone, not the payoff,
    // limits the continuation region.
    let active = [prob.is_active(Side::Plus), prob.is_active(Side::Minus)];
    for k in 0..=n {
        let cont: Vec<usize> = (0..width).filter(|&i| values[k][i] > payoff[i] + SLACK).collect();
        if let (Some(&first), Some(&last)) = (cont.first(), cont.last()) {
            single_interval &= last - first + 1 == cont.len();
            plus[k] = if last + 1 == width || !active[0] { f64::INFINITY } else { xs[last] };
            minus[k] = if first == 0 || !active[1] { f64::INFINITY } else { -xs[first] };
        } else {
            plus[k] = prob.hat_b(Side::Plus);
            minus[k] = prob.hat_b(Side::Minus);
        }
    }
    LatticeSolution { spec, xs, payoff, values, plus, minus, single_interval }
}

/// Random-walk optimal stopping of `payoff` over `steps` levels, reflecting at both ends.
pub fn backward_induction(payoff: &[f64], steps: usize, exec: Execution) -> Vec<Vec<f64>> {
    let width = payoff.len();
    let mut values = vec![Vec::new(); steps + 1];
    values[steps] = payoff.to_vec();
    for k in (0..steps).rev() {
        let next = &values[k + 1];
        let mut cur = vec![0.0; width];
        fill_indexed(&mut cur, exec, |i, v| {
            let left = if i == 0 { next[1] } else { next[i - 1] };
            let right = if i + 1 == width { next[width - 2] } else { next[i + 1] };
            *v = payoff[i].max(0.5 * (left + right));
        });
        values[k] = cur;
    }
    values
}

impl LatticeSolution {
    pub fn dominates_payoff(&self) -> bool {
        self.values.iter().all(|row| row.iter().zip(&self.payoff).all(|(v, g)| v >= g))
    }

    /// `U = V - G` at level `k`, linearly interpolated in `x`.
    pub fn u_at(&self, k: usize, x: f64) -> f64 {
        let dx = self.spec.dx();
        let big_j = self.spec.half_width() as f64;
        let pos = (x / dx + big_j).clamp(0.0, (self.xs.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.xs.len() - 2);
        let w = pos - i as f64;
        let u = |i: usize| self.values[k][i] - self.payoff[i];
        u(i) * (1.0 - w) + u(i + 1) * w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub t: f64,
    pub solver_s_plus: f64,
    pub lattice_s_plus: f64,
    pub solver_s_minus: f64,
    pub lattice_s_minus: f64,
    pub abs_diff_plus: f64,
    pub abs_diff_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    /// Sup distance over forward times in `[0.1 T, 0.9 T]`.
    pub sup_plus: f64,
    pub sup_minus: f64,
    pub single_interval: bool,
}

fn gap(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        (a - b).abs()
    }
}

pub fn compare_with_lattice(bp: &BoundaryPair, lat: &LatticeSolution) -> OracleReport {
    let n = bp.grid.steps();
    let horizon = bp.grid.horizon();
    let rows: Vec<OracleRow> = (0..=n)
        .rev()
        .map(|k| OracleRow {
            t: horizon - bp.grid.time(k),
            solver_s_plus: bp.plus[k],
            lattice_s_plus: lat.plus[k],
            solver_s_minus: bp.minus[k],
            lattice_s_minus: lat.minus[k],
            abs_diff_plus: gap(bp.plus[k], lat.plus[k]),
            abs_diff_minus: gap(bp.minus[k], lat.minus[k]),
        })
        .collect();
    let window = rows.iter().filter(|r| r.t >= 0.1 * horizon - 1e-12 && r.t <= 0.9 * horizon + 1e-12);
    let (mut sup_plus, mut sup_minus) = (0.0f64, 0.0f64);
    for r in window {
        sup_plus = sup_plus.max(r.abs_diff_plus);
        sup_minus = sup_minus.max(r.abs_diff_minus);
    }
    OracleReport { rows, sup_plus, sup_minus, single_interval: lat.single_interval }
}

impl OracleReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,solver_s_plus,lattice_s_plus,solver_s_minus,lattice_s_minus,abs_diff_plus,abs_diff_minus\n");
        for r in &self.rows {
            let cols = [r.t, r.solver_s_plus, r.lattice_s_plus, r.solver_s_minus, r.lattice_s_minus, r.abs_diff_plus, r.abs_diff_minus];
            let line: Vec<String> = cols.iter().map(|v| fmt_sig12(*v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}
