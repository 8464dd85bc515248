use serde::{Deserialize, Serialize};

use super::SolverError;

/// Uniform grid `t_l = l * h` on `[0, T]` with `t_N = T` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    horizon: f64,
    steps: usize,
}

impl Grid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, SolverError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SolverError::InvalidConfig(format!("horizon must be positive, got {horizon}")));
        }
        if steps < 2 {
            return Err(SolverError::InvalidConfig(format!("need at least 2 steps, got {steps}")));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// Node time `t_l`.
    #[inline]
    pub fn time(&self, l: usize) -> f64 {
        if l >= self.steps {
            self.horizon
        } else {
            l as f64 * self.h()
        }
    }

    /// Index of the segment `[t_l, t_{l+1}]` containing `u`.
    #[inline]
    pub fn segment(&self, u: f64) -> usize {
        let f = (u / self.h()).floor();
        let mut l = if f <= 0.0 { 0 } else { (f as usize).min(self.steps - 1) };
        if l + 1 < self.steps && self.time(l + 1) <= u {
            l += 1;
        } else if l > 0 && self.time(l) > u {
            l -= 1;
        }
        l
    }
}
