//! The value function `U^T = V^T - G` and an optimal-stopping lattice oracle.
//!
//! `U^T` has two representations in terms of the boundaries: a time integral
//! of the heat kernel over the barrier interval ([`value_u_kernel`]) and a
//! single Stieltjes integral of expected local times against the
//! generalized inverse of the barrier ([`value_u_localtime`]).

mod lattice;

pub use lattice::{backward_induction, compare_with_lattice, lattice_value, LatticeSolution, LatticeSpec, OracleReport, OracleRow};

use thiserror::Error;

use crate::kernel::elt;
use crate::measures::{Measure, MeasureError};
use crate::par::Execution;
use crate::quadrature::QuadConfig;
use crate::solver::{time_integral, BarrierProblem, BoundaryPair, GeneralizedInverse, TimeRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueError {
    #[error("query time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("query point must be finite, got {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A point `(t, x)` with `0 <= t <= T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueQuery {
    pub t: f64,
    pub x: f64,
}

impl ValueQuery {
    pub fn new(t: f64, x: f64, horizon: f64) -> Result<Self, ValueError> {
        if !(0.0..=horizon).contains(&t) {
            return Err(ValueError::TimeOutOfRange { t, horizon });
        }
        if !x.is_finite() {
            return Err(ValueError::NonFinite(x));
        }
        Ok(Self { t, x })
    }
}

/// `G(x) = 2 ∫_0^x (F_nu - F_mu)(z) dz`.
pub fn payoff_g(x: f64, prob: &BarrierProblem) -> f64 {
    let a = |m: &Measure, z: f64| m.cdf_integral(z);
    let d = |z: f64| a(&prob.nu, z) - a(&prob.mu, z);
    2.0 * (d(x) - d(0.0))
}

/// `U^T(t, x)` as `∫_t^T ∫_{-s_-(T-u)}^{s_+(T-u)} p(t, x, u, y) (nu - mu)(dy) du`.
///
/// With the solver's [`TimeRule`] this is exactly the residual function at
/// grid nodes.
pub fn value_u_kernel(q: ValueQuery, bp: &BoundaryPair, prob: &BarrierProblem, rule: TimeRule, exec: Execution) -> f64 {
    time_integral(prob, &bp.view(prob), q.t, q.x, rule, exec)
}

/// `U^T(t, x)` as `∫ 1{phi(y) < T - t} E_x[L^y_{T - t - phi(y)}] (nu - mu)(dy)`.
pub fn value_u_localtime(
    q: ValueQuery,
    bp: &BoundaryPair,
    prob: &BarrierProblem,
    phi: &GeneralizedInverse,
) -> Result<f64, ValueError> {
    let tau = bp.grid.horizon() - q.t;
    if tau <= 0.0 {
        return Ok(0.0);
    }
    // phi(y) < tau exactly on (-s_-(tau), s_+(tau)); atoms at either end drop out
    let (lo, hi) = bp.view(prob).interval(q.t);
    let f = |y: f64| {
        let p = phi.eval(y);
        if p < tau {
            elt(q.x - y, tau - p)
        } else {
            0.0
        }
    };
    let cfg = QuadConfig { tol: 1e-10, resolution: 0.05, max_depth: 40 };
    let mut total = 0.0;
    for (m, sign) in [(&prob.nu, 1.0), (&prob.mu, -1.0)] {
        let (elo, ehi) = m.effective_hull();
        let a = lo.max(elo - 1.0);
        let b = hi.min(ehi);
        if b <= a {
            continue;
        }
        let mut cuts = vec![a];
        cuts.extend(phi.breakpoints(a, b));
        if q.x > a && q.x < b {
            cuts.push(q.x);
        }
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            total += sign * m.integrate(f, w[0], w[1], &cfg)?;
        }
    }
    Ok(total)
}
