//! Cantor distribution of finite depth.
//!
//! The depth-`D` Cantor law on `[0, 1]` puts mass `2^-D` uniformly on each of
//! the `2^D` intervals kept after `D` rounds of removing middle thirds. Its
//! CDF differs from the exact Cantor function by at most `2^-D`.

use crate::quadrature::QuadConfig;
use crate::special::norm_interval;

/// Weights and offset of a three-point rule that integrates polynomials of
/// degree five exactly against the Cantor law on an interval of length `L`
/// centred at `c`: nodes `c` and `c ± GAMMA * L`.
const W_CENTRE: f64 = 2.0 / 7.0;
const W_OUTER: f64 = 5.0 / 14.0;
// sqrt(7/40)
const GAMMA: f64 = 0.418_330_013_267_037_9;

/// Kernel nodes farther than this many standard deviations are dropped.
const PRUNE_SIGMAS: f64 = 12.0;
/// A node whose length is below `sigma * ACCEPT_RATIO` uses the three-point rule.
const ACCEPT_RATIO: f64 = 0.05;

/// CDF of the depth-`depth` Cantor law on `[0, 1]`.
pub fn unit_cdf(z: f64, depth: u32) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 1.0;
    }
    let mut z = z;
    let mut acc = 0.0;
    let mut scale = 1.0;
    for _ in 0..depth {
        if z < 1.0 / 3.0 {
            z *= 3.0;
        } else if z <= 2.0 / 3.0 {
            return acc + 0.5 * scale;
        } else {
            acc += 0.5 * scale;
            z = 3.0 * z - 2.0;
        }
        scale *= 0.5;
    }
    acc + scale * z.clamp(0.0, 1.0)
}

/// `∫_0^z F(u) du` for the unit Cantor CDF `F`.
pub fn unit_cdf_integral(z: f64, depth: u32) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= 1.0 {
        return 0.5 + (z - 1.0);
    }
    if depth == 0 {
        return 0.5 * z * z;
    }
    if z <= 1.0 / 3.0 {
        unit_cdf_integral(3.0 * z, depth - 1) / 6.0
    } else if z <= 2.0 / 3.0 {
        1.0 / 12.0 + 0.5 * (z - 1.0 / 3.0)
    } else {
        0.25 + 0.5 * (z - 2.0 / 3.0) + unit_cdf_integral(3.0 * z - 2.0, depth - 1) / 6.0
    }
}

/// Cantor law of depth `depth` on `[a, b]` carrying total mass `weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cantor {
    pub a: f64,
    pub b: f64,
    pub depth: u32,
    pub weight: f64,
}

impl Cantor {
    pub fn cdf(&self, x: f64) -> f64 {
        self.weight * unit_cdf((x - self.a) / (self.b - self.a), self.depth)
    }

    /// `∫_{-inf}^x F(z) dz` where `F` is this component's (sub-probability) CDF.
    pub fn cdf_integral(&self, x: f64) -> f64 {
        let len = self.b - self.a;
        self.weight * len * unit_cdf_integral((x - self.a) / len, self.depth)
    }

    /// `∫_{(lo, hi]} N(y; x, sigma^2) m(dy)` by recursion over the Cantor tree.
    pub fn kernel_mass(&self, x: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo || hi <= self.a || lo >= self.b {
            return 0.0;
        }
        let mut acc = 0.0;
        self.kernel_node(x, sigma, lo, hi, self.a, self.b - self.a, self.weight, 0, &mut acc);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn kernel_node(
        &self,
        x: f64,
        sigma: f64,
        lo: f64,
        hi: f64,
        left: f64,
        len: f64,
        mass: f64,
        level: u32,
        acc: &mut f64,
    ) {
        let right = left + len;
        if right <= lo || left >= hi {
            return;
        }
        let gap = if x < left {
            left - x
        } else if x > right {
            x - right
        } else {
            0.0
        };
        if gap > PRUNE_SIGMAS * sigma {
            return;
        }
        let inside = lo <= left && right <= hi;
        if level == self.depth {
            let l = left.max(lo);
            let r = right.min(hi);
            if r > l {
                *acc += mass / len * norm_interval((l - x) / sigma, (r - x) / sigma);
            }
            return;
        }
        if inside && len <= ACCEPT_RATIO * sigma {
            *acc += mass * three_point(len, left + 0.5 * len, |y| gauss(y - x, sigma));
            return;
        }
        let child = len / 3.0;
        let m = 0.5 * mass;
        self.kernel_node(x, sigma, lo, hi, left, child, m, level + 1, acc);
        self.kernel_node(x, sigma, lo, hi, right - child, child, m, level + 1, acc);
    }

    /// `∫_{(lo, hi]} f dm` by adaptive refinement of the three-point rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: &mut F, lo: f64, hi: f64, cfg: &QuadConfig) -> f64 {
        if hi <= lo || hi <= self.a || lo >= self.b {
            return 0.0;
        }
        self.integrate_node(f, lo, hi, self.a, self.b - self.a, self.weight, 0, cfg)
    }

    #[allow(clippy::too_many_arguments)]
    fn integrate_node<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        lo: f64,
        hi: f64,
        left: f64,
        len: f64,
        mass: f64,
        level: u32,
        cfg: &QuadConfig,
    ) -> f64 {
        let right = left + len;
        if right <= lo || left >= hi {
            return 0.0;
        }
        let inside = lo <= left && right <= hi;
        if level == self.depth {
            let l = left.max(lo);
            let r = right.min(hi);
            let rule = crate::quadrature::gl_rule(8);
            return mass / len * rule.integrate(l, r, &mut *f);
        }
        let child = len / 3.0;
        let m = 0.5 * mass;
        if inside && len <= cfg.resolution {
            let whole = mass * three_point(len, left + 0.5 * len, &mut *f);
            let halves = m * three_point(child, left + 0.5 * child, &mut *f)
                + m * three_point(child, right - 0.5 * child, &mut *f);
            if (whole - halves).abs() <= cfg.tol * mass / self.weight || level + 1 >= cfg.max_depth as u32 {
                return halves;
            }
        }
        self.integrate_node(f, lo, hi, left, child, m, level + 1, cfg)
            + self.integrate_node(f, lo, hi, right - child, child, m, level + 1, cfg)
    }
}

#[inline]
fn gauss(d: f64, sigma: f64) -> f64 {
    crate::special::gauss_density(d, sigma)
}

#[inline]
fn three_point<F: FnMut(f64) -> f64>(len: f64, centre: f64, mut f: F) -> f64 {
    let off = GAMMA * len;
    W_CENTRE * f(centre) + W_OUTER * (f(centre - off) + f(centre + off))
}

/// Reference integration by parts,
/// `f(hi) F(hi) - f(lo) F(lo) - ∫_lo^hi F(y) f'(y) dy`, with the remaining
/// integral by dense composite Gauss–Legendre. Slow; intended for
/// cross-checking.
pub fn integrate_by_parts<F, D>(c: &Cantor, f: F, df: D, lo: f64, hi: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let lo = lo.max(c.a - 1.0);
    let hi = hi.min(c.b + 1.0);
    if hi <= lo {
        return 0.0;
    }
    let rule = crate::quadrature::gl_rule(4);
    let width = (hi - lo) / panels as f64;
    let mut inner = 0.0;
    for i in 0..panels {
        let a = lo + i as f64 * width;
        inner += rule.integrate(a, a + width, |y| c.cdf(y) * df(y));
    }
    f(hi) * c.cdf(hi) - f(lo) * c.cdf(lo) - inner
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_self_similarity() {
        assert_eq!(unit_cdf(1.0 / 3.0, 20), 0.5);
        assert_eq!(unit_cdf(0.5, 20), 0.5);
        assert!((unit_cdf(1.0 / 9.0, 20) - 0.25).abs() < 1e-15);
        assert!((unit_cdf(0.8, 30) - (0.5 + 0.5 * unit_cdf(0.4, 30))).abs() < 1e-12);
    }

    #[test]
    fn cdf_integral_matches_symmetry() {
        assert!((unit_cdf_integral(1.0, 30) - 0.5).abs() < 1e-15);
        assert!((unit_cdf_integral(1.0 / 3.0, 30) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_rule_matches_moments() {
        let c = Cantor { a: 0.0, b: 1.0, depth: 30, weight: 1.0 };
        let cfg = QuadConfig { tol: 1e-13, resolution: 1.0, max_depth: 40 };
        let mean = c.integrate(&mut |y| y, 0.0, 1.0, &cfg);
        let second = c.integrate(&mut |y| y * y, 0.0, 1.0, &cfg);
        assert!((mean - 0.5).abs() < 1e-13);
        assert!((second - 0.375).abs() < 1e-12);
    }
}
