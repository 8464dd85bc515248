//! Gauss–Legendre rules and an adaptive driver used by the Stieltjes
//! integrators.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Nodes and weights of a Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(n.max(2)).expect("degree >= 2");
        let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

const MAX_CACHED: usize = 64;

/// Shared Gauss–Legendre rule with `n` points (cached for `n <= 64`).
pub fn gl_rule(n: usize) -> &'static GlRule {
    static CACHE: OnceLock<Vec<GlRule>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=MAX_CACHED).map(GlRule::new).collect());
    &cache[n.clamp(2, MAX_CACHED)]
}

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute error target for one call.
    pub tol: f64,
    /// Upper bound on the width of any accepted subinterval.
    pub resolution: f64,
    /// Maximum bisection depth below the resolution level.
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            resolution: 0.25,
            max_depth: 40,
        }
    }
}

impl QuadConfig {
    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }
}

const ADAPTIVE_POINTS: usize = 10;

/// Adaptive Gauss–Legendre integration of `f` over the finite interval
/// `[a, b]`. The interval is first cut into pieces no wider than
/// `cfg.resolution`; each piece is then bisected until the two-half estimate
/// agrees with the whole-piece estimate to the local share of `cfg.tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, cfg: &QuadConfig) -> f64 {
    if b <= a {
        return 0.0;
    }
    debug_assert!(a.is_finite() && b.is_finite());
    let rule = gl_rule(ADAPTIVE_POINTS);
    let pieces = ((b - a) / cfg.resolution).ceil().clamp(1.0, 1e6) as usize;
    let width = (b - a) / pieces as f64;
    let local_tol = cfg.tol / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + width };
            let whole = rule.integrate(lo, hi, &mut *f);
            refine(f, rule, lo, hi, whole, local_tol, cfg.max_depth)
        })
        .sum()
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GlRule,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, &mut *f);
    let right = rule.integrate(mid, b, &mut *f);
    let split = left + right;
    if depth == 0 || !split.is_finite() || (split - whole).abs() <= tol.max(1e-300) || mid <= a || mid >= b {
        return split;
    }
    refine(f, rule, a, mid, left, 0.5 * tol, depth - 1)
        + refine(f, rule, mid, b, right, 0.5 * tol, depth - 1)
}
