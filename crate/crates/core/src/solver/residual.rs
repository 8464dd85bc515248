use crate::par::{chunked_sum, Execution};
use crate::quadrature::gl_rule;

use super::boundary::{BoundaryPair, PathView};
use super::problem::{BarrierProblem, Side};

/// Gauss–Legendre node counts for the time integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRule {
    /// Nodes on the two segments next to the start time and on the last one.
    pub near: usize,
    /// Nodes on every other segment.
    pub far: usize,
    /// The first segment is cut geometrically into `grade + 1` panels in
    /// `r`, down to `r1 2^-grade`, so the kernel's onset at `r ~ |x - y|`
    /// is resolved for atoms close to `x`.
    pub grade: usize,
}

impl Default for TimeRule {
    fn default() -> Self {
        Self { near: 12, far: 4, grade: 20 }
    }
}

/// `∫_{[lo, hi]} p(sigma; x, y) (nu - mu)(dy)` for a Gaussian kernel of width `sigma`.
#[inline]
pub fn signed_kernel_mass(prob: &BarrierProblem, x: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    prob.nu.kernel_mass(x, sigma, lo, hi) - prob.mu.kernel_mass(x, sigma, lo, hi)
}

/// `∫_{t0}^T ∫_{-b_-(u)}^{b_+(u)} p(t0, x, u, y) (nu - mu)(dy) du` over the
/// continuous boundary `path`.
///
/// The substitution `u = t0 + r^2` removes the kernel singularity at
/// `u = t0`; each grid segment after `t0` gets its own Gauss–Legendre rule in
/// `r`.
pub fn time_integral(
    prob: &BarrierProblem,
    path: &PathView<'_>,
    t0: f64,
    x: f64,
    rule: TimeRule,
    exec: Execution,
) -> f64 {
    let grid = path.grid;
    let n = grid.steps();
    let horizon = grid.horizon();
    if t0 >= horizon {
        return 0.0;
    }
    let first = grid.segment(t0);
    let segments: Vec<usize> = (first..n).collect();
    let near = gl_rule(rule.near);
    let far = gl_rule(rule.far);
    chunked_sum(&segments, exec, |&l| {
        let a = grid.time(l).max(t0);
        let b = grid.time(l + 1);
        if b <= a {
            return 0.0;
        }
        let r0 = (a - t0).sqrt();
        let r1 = (b - t0).sqrt();
        let gl = if l <= first + 1 || l == n - 1 { near } else { far };
        let panel = |p0: f64, p1: f64| {
            gl.mapped(p0, p1)
                .map(|(r, w)| {
                    if r <= 0.0 {
                        return 0.0;
                    }
                    let u = t0 + r * r;
                    let (lo, hi) = path.interval(u);
                    w * 2.0 * r * signed_kernel_mass(prob, x, r, lo, hi)
                })
                .sum::<f64>()
        };
        if l == first && r0 == 0.0 && rule.grade > 0 {
            let mut edge = r1 * 0.5f64.powi(rule.grade as i32);
            let mut total = panel(0.0, edge);
            for _ in 0..rule.grade {
                total += panel(edge, 2.0 * edge);
                edge *= 2.0;
            }
            total
        } else {
            panel(r0, r1)
        }
    })
}

/// Residual of the boundary equation at node `k` for a candidate value on
/// `side`, with `other` as the value of the opposite boundary at `t_k`.
#[allow(clippy::too_many_arguments)]
pub fn residual(
    prob: &BarrierProblem,
    path: &PathView<'_>,
    k: usize,
    side: Side,
    candidate: f64,
    other: f64,
    rule: TimeRule,
    exec: Execution,
) -> f64 {
    let (p, m) = match side {
        Side::Plus => (candidate, other),
        Side::Minus => (other, candidate),
    };
    let view = path.with_node(k, p, m);
    time_integral(prob, &view, path.grid.time(k), side.sign() * candidate, rule, exec)
}

/// Signed kernel mass between node times `t_k` and `t_l` over the stored
/// interval `[-b_-(t_l), b_+(t_l)]`, evaluated at `x`.
pub fn kernel_mass(prob: &BarrierProblem, bp: &BoundaryPair, k: usize, x: f64, l: usize) -> f64 {
    assert!(l > k, "kernel_mass needs l > k");
    let sigma = (bp.grid.time(l) - bp.grid.time(k)).sqrt();
    signed_kernel_mass(prob, x, sigma, -bp.minus[l], bp.plus[l])
}

/// Right-endpoint rectangle rule `h * sum_{l > k} kernel_mass(k, ±candidate, l)`
/// with the stored boundaries. Reported for comparison; the solver uses
/// [`residual`].
pub fn rectangle_residual(prob: &BarrierProblem, bp: &BoundaryPair, k: usize, side: Side, candidate: f64) -> f64 {
    let n = bp.grid.steps();
    let x = side.sign() * candidate;
    bp.grid.h() * ((k + 1)..=n).map(|l| kernel_mass(prob, bp, k, x, l)).sum::<f64>()
}
