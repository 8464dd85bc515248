use serde::{Deserialize, Serialize};

use crate::measures::{hat_b, support_info, MassLayout, Measure, SupportError, SupportInfo};

/// Which boundary: `Plus` is the upper curve `s_+`, `Minus` the lower curve
/// `s_-` (stored as a positive distance below the origin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` or `-1`: the spatial point of a boundary value `b` is `sign * b`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    TwoSided,
    UpperOnly,
    LowerOnly,
}

/// A validated starting law `nu` and target law `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierProblem {
    pub mu: Measure,
    pub nu: Measure,
    pub support: SupportInfo,
    pub hat_b_minus: f64,
    pub hat_b_plus: f64,
    pub mode: Mode,
    layout: MassLayout,
}

impl BarrierProblem {
    pub fn new(mu: Measure, nu: Measure) -> Result<Self, SupportError> {
        let support = support_info(&mu, &nu)?;
        let (hat_b_minus, hat_b_plus) = hat_b(&mu, &nu)?;
        let mode = match (hat_b_plus.is_finite(), hat_b_minus.is_finite()) {
            (true, true) => Mode::TwoSided,
            (true, false) => Mode::UpperOnly,
            (false, true) => Mode::LowerOnly,
            (false, false) => unreachable!("a probability measure charges some side"),
        };
        let layout = mu.layout();
        Ok(Self { mu, nu, support, hat_b_minus, hat_b_plus, mode, layout })
    }

    pub fn hat_b(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.hat_b_plus,
            Side::Minus => self.hat_b_minus,
        }
    }

    /// Whether `mu` has a density throughout the boundary range `[lo, hi]` on `side`.
    pub fn is_smooth_on(&self, side: Side, lo: f64, hi: f64) -> bool {
        match side {
            Side::Plus => self.layout.is_smooth_on(lo, hi),
            Side::Minus => self.layout.is_smooth_on(-hi, -lo),
        }
    }

    /// `mu`-mass swept by the boundary on `side`, up to an additive constant;
    /// nondecreasing in the boundary value `b`.
    #[inline]
    pub fn swept_mass(&self, side: Side, b: f64) -> f64 {
        match side {
            Side::Plus => self.mu.cdf(b),
            Side::Minus => -self.mu.cdf(-b),
        }
    }

    pub fn is_active(&self, side: Side) -> bool {
        self.hat_b(side).is_finite()
    }

    /// Whether `nu` has an atom exactly at the starting point of this boundary.
    /// Such boundaries leave their initial value like a square root and use
    /// the start profile on the first time step.
    pub fn has_start_profile(&self, side: Side) -> bool {
        let start = side.sign() * self.hat_b(side);
        self.is_active(side) && self.nu.atoms().any(|(x, _)| x == start)
    }

    /// Upper end of the root bracket: the far edge of the (effective) support
    /// of `mu` on this side, plus `margin_sigmas * sqrt(T)`.
    pub fn cap(&self, side: Side, horizon: f64, margin_sigmas: f64) -> f64 {
        let (lo, hi) = self.mu.effective_hull();
        let reach = match side {
            Side::Plus => hi,
            Side::Minus => -lo,
        };
        reach.max(self.hat_b(side)) + margin_sigmas * horizon.sqrt()
    }
}
