use super::boundary::{interpolate_inverse, profile_weight_inverse, BoundaryPair};
use super::problem::{BarrierProblem, Side};

/// First time the barrier reaches level `x`: `phi(x) = inf{tau : s_+(tau) > x}`
/// for `x >= 0` and `inf{tau : s_-(tau) > -x}` for `x < 0`, with `phi = 0`
/// strictly between the initial boundary values and `phi = T` beyond the
/// terminal ones.
#[derive(Debug, Clone)]
pub struct GeneralizedInverse {
    prob: BarrierProblem,
    bp: BoundaryPair,
    forward_plus: Vec<f64>,
    forward_minus: Vec<f64>,
}

impl GeneralizedInverse {
    pub fn new(bp: &BoundaryPair, prob: &BarrierProblem) -> Self {
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        Self { prob: prob.clone(), bp: bp.clone(), forward_plus: rev(&bp.plus), forward_minus: rev(&bp.minus) }
    }

    pub fn horizon(&self) -> f64 {
        self.bp.grid.horizon()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (side, level) = if x >= 0.0 { (Side::Plus, x) } else { (Side::Minus, -x) };
        let (s, profile) = match side {
            Side::Plus => (&self.forward_plus, self.bp.profile_plus),
            Side::Minus => (&self.forward_minus, self.bp.profile_minus),
        };
        let n = s.len() - 1;
        let h = self.bp.grid.h();
        if s[0].is_infinite() || level < s[0] {
            return 0.0;
        }
        if level >= s[n] {
            return self.horizon();
        }
        let j = s.partition_point(|v| *v <= level);
        let (lo, hi) = (s[j - 1], s[j]);
        let start = (j - 1) as f64 * h;
        let w = interpolate_inverse(&self.prob, side, lo, hi, level);
        if j == 1 && profile {
            start + h * profile_weight_inverse(w, h, hi - lo)
        } else {
            start + h * w
        }
    }

    /// Node values of both boundaries strictly inside `(lo, hi)`, as signed
    /// spatial points. These are the kinks of `phi`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .forward_plus
            .iter()
            .copied()
            .chain(self.forward_minus.iter().map(|v| -v))
            .filter(|y| y.is_finite() && *y > lo && *y < hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Measure;
    use crate::solver::Grid;

    fn prob() -> BarrierProblem {
        BarrierProblem::new(Measure::uniform(-2.0, 2.0), Measure::dirac(0.0)).unwrap()
    }

    fn sample() -> BoundaryPair {
        BoundaryPair {
            grid: Grid::new(1.0, 4).unwrap(),
            plus: vec![0.9, 0.7, 0.5, 0.2, 0.1],
            minus: vec![1.0, 0.8, 0.6, 0.4, 0.3],
            profile_plus: false,
            profile_minus: false,
        }
    }

    #[test]
    fn inside_maps_to_zero_and_beyond_to_horizon() {
        let phi = GeneralizedInverse::new(&sample(), &prob());
        assert_eq!(phi.eval(0.05), 0.0);
        assert_eq!(phi.eval(-0.25), 0.0);
        assert_eq!(phi.eval(0.95), 1.0);
        assert_eq!(phi.eval(-2.0), 1.0);
    }

    #[test]
    fn nodes_invert_to_their_times() {
        let bp = sample();
        let phi = GeneralizedInverse::new(&bp, &prob());
        for k in 0..4 {
            let t = 1.0 - bp.grid.time(k);
            assert!((phi.eval(bp.plus[k]) - t).abs() < 1e-12);
            assert!((phi.eval(-bp.minus[k]) - t).abs() < 1e-12);
        }
        assert!((phi.eval(0.6) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn flat_inverse_across_jumps() {
        let mut bp = sample();
        bp.plus = vec![1.0, 0.9, 0.3, 0.2, 0.1];
        let phi = GeneralizedInverse::new(&bp, &prob());
        let a = phi.eval(0.45);
        let b = phi.eval(0.75);
        assert!(a > 0.5 && b < 0.75 && (b - a) < 0.25);
    }
}
