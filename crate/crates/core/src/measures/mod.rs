//! Probability measures on the real line as finite mixtures of named
//! families, with exact CDFs and Stieltjes integration.
//!
//! Mass conventions: `cdf` is right-continuous and `mass(lo, hi)` and
//! [`Measure::integrate`] use half-open intervals `(lo, hi]`. The Gaussian
//! kernel integrals in [`Measure::kernel_mass`] treat atoms sitting exactly on
//! an interval endpoint as inside.

mod cantor;
mod spec;

pub use cantor::{integrate_by_parts as cantor_integrate_by_parts, Cantor};
pub use spec::{ComponentSpec, MeasureSpec};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use thiserror::Error;

use crate::quadrature::{adaptive, QuadConfig};
use crate::special::{gauss_density, norm_cdf, norm_interval, norm_pdf};

/// Tolerance on the total mass of a measure.
pub const MASS_TOL: f64 = 1e-10;

/// Normal and exponential tails beyond this many scale units are ignored by
/// generic quadrature.
const TAIL_SCALES: f64 = 40.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("measure has no components")]
    Empty,
    #[error("component {index}: {reason}")]
    InvalidComponent { index: usize, reason: String },
    #[error("total mass {0} differs from 1")]
    MassNotOne(f64),
    #[error("cannot sample from a singular component")]
    UnsupportedSampling,
    #[error("integrand is not finite at y = {0}")]
    NumericalDomain(f64),
}

/// Polynomial density on `[a, b]` with coefficients scaled to the component weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub a: f64,
    pub b: f64,
    pub weight: f64,
    coeffs: Vec<f64>,
}

impl Polynomial {
    fn density(&self, y: f64) -> f64 {
        if y < self.a || y > self.b {
            return 0.0;
        }
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    /// `∫_a^x y^p * density(y) dy` for `x` clamped to `[a, b]`.
    fn moment_to(&self, x: f64, p: i32) -> f64 {
        let x = x.clamp(self.a, self.b);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = i as i32 + p + 1;
                c * (x.powi(n) - self.a.powi(n)) / n as f64
            })
            .sum()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.a {
            0.0
        } else if x >= self.b {
            self.weight
        } else {
            self.moment_to(x, 0)
        }
    }

    fn cdf_integral(&self, x: f64) -> f64 {
        if x <= self.a {
            return 0.0;
        }
        let xc = x.min(self.b);
        let inner = xc * self.moment_to(xc, 0) - self.moment_to(xc, 1);
        inner + (x - xc) * self.weight
    }
}

/// One validated mixture component.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Atom { x: f64, w: f64 },
    Uniform { a: f64, b: f64, w: f64 },
    Normal { mean: f64, sd: f64, w: f64 },
    Exponential { rate: f64, w: f64 },
    Cantor(Cantor),
    Polynomial(Polynomial),
}

impl Component {
    fn from_spec(index: usize, spec: &ComponentSpec) -> Result<Self, MeasureError> {
        let bad = |reason: &str| MeasureError::InvalidComponent { index, reason: reason.to_string() };
        let check_w = |w: f64| {
            if w.is_finite() && w > 0.0 {
                Ok(())
            } else {
                Err(bad("weight must be finite and positive"))
            }
        };
        let check_ab = |a: f64, b: f64| {
            if a.is_finite() && b.is_finite() && a < b {
                Ok(())
            } else {
                Err(bad("interval must satisfy a < b with finite ends"))
            }
        };
        Ok(match *spec {
            ComponentSpec::Atom { x, w } => {
                check_w(w)?;
                if !x.is_finite() {
                    return Err(bad("atom location must be finite"));
                }
                Component::Atom { x, w }
            }
            ComponentSpec::Uniform { a, b, w } => {
                check_w(w)?;
                check_ab(a, b)?;
                Component::Uniform { a, b, w }
            }
            ComponentSpec::Normal { mean, var, w } => {
                check_w(w)?;
                if !(mean.is_finite() && var.is_finite() && var > 0.0) {
                    return Err(bad("normal needs a finite mean and positive variance"));
                }
                Component::Normal { mean, sd: var.sqrt(), w }
            }
            ComponentSpec::Exponential { rate, w } => {
                check_w(w)?;
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(bad("exponential rate must be positive"));
                }
                Component::Exponential { rate, w }
            }
            ComponentSpec::Cantor { a, b, depth, w } => {
                check_w(w)?;
                check_ab(a, b)?;
                if depth == 0 || depth > 60 {
                    return Err(bad("cantor depth must lie in 1..=60"));
                }
                Component::Cantor(Cantor { a, b, depth, weight: w })
            }
            ComponentSpec::Polynomial { a, b, ref coeffs, w } => {
                check_w(w)?;
                check_ab(a, b)?;
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(bad("polynomial needs finite coefficients"));
                }
                let raw = Polynomial { a, b, weight: 1.0, coeffs: coeffs.clone() };
                let total = raw.moment_to(b, 0);
                let scale = (b - a).abs().max(1.0);
                let negative = (0..=1000).any(|i| {
                    let y = a + (b - a) * i as f64 / 1000.0;
                    raw.density(y) < -1e-12 * scale
                });
                if negative || total.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(bad("polynomial density must be nonnegative with positive integral"));
                }
                let coeffs = coeffs.iter().map(|c| c * w / total).collect();
                Component::Polynomial(Polynomial { a, b, weight: w, coeffs })
            }
        })
    }

    fn to_spec(&self) -> ComponentSpec {
        match self {
            Component::Atom { x, w } => ComponentSpec::Atom { x: *x, w: *w },
            Component::Uniform { a, b, w } => ComponentSpec::Uniform { a: *a, b: *b, w: *w },
            Component::Normal { mean, sd, w } => ComponentSpec::Normal { mean: *mean, var: sd * sd, w: *w },
            Component::Exponential { rate, w } => ComponentSpec::Exponential { rate: *rate, w: *w },
            Component::Cantor(c) => ComponentSpec::Cantor { a: c.a, b: c.b, depth: c.depth, w: c.weight },
            Component::Polynomial(p) => ComponentSpec::Polynomial {
                a: p.a,
                b: p.b,
                coeffs: p.coeffs.iter().map(|c| c / p.weight).collect(),
                w: p.weight,
            },
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            Component::Atom { w, .. }
            | Component::Uniform { w, .. }
            | Component::Normal { w, .. }
            | Component::Exponential { w, .. } => *w,
            Component::Cantor(c) => c.weight,
            Component::Polynomial(p) => p.weight,
        }
    }

    /// Closed hull of the support.
    pub fn hull(&self) -> (f64, f64) {
        match self {
            Component::Atom { x, .. } => (*x, *x),
            Component::Uniform { a, b, .. } => (*a, *b),
            Component::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Component::Exponential { .. } => (0.0, f64::INFINITY),
            Component::Cantor(c) => (c.a, c.b),
            Component::Polynomial(p) => (p.a, p.b),
        }
    }

    /// Finite interval outside which the component carries negligible mass.
    fn effective_hull(&self) -> (f64, f64) {
        match self {
            Component::Normal { mean, sd, .. } => (mean - TAIL_SCALES * sd, mean + TAIL_SCALES * sd),
            Component::Exponential { rate, .. } => (0.0, TAIL_SCALES / rate),
            other => other.hull(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Component::Atom { x: z, w } => {
                if x >= *z {
                    *w
                } else {
                    0.0
                }
            }
            Component::Uniform { a, b, w } => w * ((x - a) / (b - a)).clamp(0.0, 1.0),
            Component::Normal { mean, sd, w } => w * norm_cdf((x - mean) / sd),
            Component::Exponential { rate, w } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -w * (-rate * x).exp_m1()
                }
            }
            Component::Cantor(c) => c.cdf(x),
            Component::Polynomial(p) => p.cdf(x),
        }
    }

    /// `∫_{-inf}^x F(z) dz` for this component's CDF `F`.
    pub fn cdf_integral(&self, x: f64) -> f64 {
        match self {
            Component::Atom { x: z, w } => w * (x - z).max(0.0),
            Component::Uniform { a, b, w } => {
                if x <= *a {
                    0.0
                } else if x <= *b {
                    w * (x - a) * (x - a) / (2.0 * (b - a))
                } else {
                    w * (0.5 * (b - a) + (x - b))
                }
            }
            Component::Normal { mean, sd, w } => {
                let z = (x - mean) / sd;
                w * ((x - mean) * norm_cdf(z) + sd * norm_pdf(z))
            }
            Component::Exponential { rate, w } => {
                if x <= 0.0 {
                    0.0
                } else {
                    w * (x + (-rate * x).exp_m1() / rate)
                }
            }
            Component::Cantor(c) => c.cdf_integral(x),
            Component::Polynomial(p) => p.cdf_integral(x),
        }
    }

    /// `∫ N(y; x, sigma^2) c(dy)` over `[lo, hi]` (atoms on the ends count).
    pub fn kernel_mass(&self, x: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match self {
            Component::Atom { x: z, w } => {
                if lo <= *z && *z <= hi {
                    w * gauss_density(x - z, sigma)
                } else {
                    0.0
                }
            }
            Component::Uniform { a, b, w } => {
                let l = lo.max(*a);
                let r = hi.min(*b);
                if r <= l {
                    return 0.0;
                }
                w / (b - a) * norm_interval((l - x) / sigma, (r - x) / sigma)
            }
            Component::Normal { mean, sd, w } => {
                let v = sigma * sigma + sd * sd;
                let c = (x * sd * sd + mean * sigma * sigma) / v;
                let tau = sigma * sd / v.sqrt();
                w * gauss_density(x - mean, v.sqrt()) * norm_interval((lo - c) / tau, (hi - c) / tau)
            }
            Component::Exponential { rate, w } => {
                let l = lo.max(0.0);
                if hi <= l {
                    return 0.0;
                }
                let shift = x - rate * sigma * sigma;
                let zl = (l - shift) / sigma;
                let zh = (hi - shift) / sigma;
                if zl <= 5.0 {
                    let exponent = -rate * x + 0.5 * rate * rate * sigma * sigma;
                    w * rate * exponent.exp() * norm_interval(zl, zh)
                } else {
                    // exp(exponent) * phi(zl) simplifies; the rest is a Mills ratio
                    let head = (-rate * l - (l - x) * (l - x) / (2.0 * sigma * sigma)).exp();
                    let tail = if zh.is_finite() { (-0.5 * (zh - zl) * (zh + zl)).exp() * mills(zh) } else { 0.0 };
                    w * rate * crate::special::INV_SQRT_2PI * head * (mills(zl) - tail)
                }
            }
            Component::Cantor(c) => c.kernel_mass(x, sigma, lo, hi),
            Component::Polynomial(p) => {
                let l = lo.max(p.a).max(x - 12.0 * sigma);
                let r = hi.min(p.b).min(x + 12.0 * sigma);
                if r <= l {
                    return 0.0;
                }
                let cfg = QuadConfig { tol: 1e-13, ..QuadConfig::default() }.with_resolution(0.5 * sigma);
                adaptive(&mut |y: f64| p.density(y) * gauss_density(y - x, sigma), l, r, &cfg)
            }
        }
    }

    /// `∫_{(lo, hi]} f dc`.
    fn integrate<F: FnMut(f64) -> f64>(&self, f: &mut F, lo: f64, hi: f64, cfg: &QuadConfig) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let (ha, hb) = self.effective_hull();
        match self {
            Component::Atom { x, w } => {
                if lo < *x && *x <= hi {
                    w * f(*x)
                } else {
                    0.0
                }
            }
            Component::Cantor(c) => c.integrate(f, lo, hi, cfg),
            _ => {
                let l = lo.max(ha);
                let r = hi.min(hb);
                if r <= l {
                    return 0.0;
                }
                let mut g = |y: f64| f(y) * self.density(y);
                adaptive(&mut g, l, r, cfg)
            }
        }
    }

    fn density(&self, y: f64) -> f64 {
        match self {
            Component::Uniform { a, b, w } => {
                if *a <= y && y <= *b {
                    w / (b - a)
                } else {
                    0.0
                }
            }
            Component::Normal { mean, sd, w } => w * gauss_density(y - mean, *sd),
            Component::Exponential { rate, w } => {
                if y >= 0.0 {
                    w * rate * (-rate * y).exp()
                } else {
                    0.0
                }
            }
            Component::Polynomial(p) => p.density(y),
            Component::Atom { .. } | Component::Cantor(_) => 0.0,
        }
    }

    /// Smallest `z >= y` such that every interval `(y, z + eps]` carries mass.
    fn support_min_ge(&self, y: f64) -> Option<f64> {
        match self {
            Component::Atom { x, .. } => (y <= *x).then_some(*x),
            Component::Cantor(c) => cantor_min_ge(c, y),
            other => {
                let (a, b) = other.hull();
                if y <= a {
                    Some(a)
                } else if y < b {
                    Some(y)
                } else {
                    None
                }
            }
        }
    }

    /// Largest `z <= y` such that every interval `[z - eps, y)` carries mass.
    fn support_max_le(&self, y: f64) -> Option<f64> {
        match self {
            Component::Atom { x, .. } => (y >= *x).then_some(*x),
            Component::Cantor(c) => {
                let mirrored = Cantor { a: -c.b, b: -c.a, ..*c };
                cantor_min_ge(&mirrored, -y).map(|z| -z)
            }
            other => {
                let (a, b) = other.hull();
                if y >= b {
                    Some(b)
                } else if y > a {
                    Some(y)
                } else {
                    None
                }
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, MeasureError> {
        Ok(match self {
            Component::Atom { x, .. } => *x,
            Component::Uniform { a, b, .. } => a + (b - a) * rng.gen::<f64>(),
            Component::Normal { mean, sd, .. } => Normal::new(*mean, *sd).expect("validated").sample(rng),
            Component::Exponential { rate, .. } => Exp::new(*rate).expect("validated").sample(rng),
            Component::Polynomial(p) => {
                let target = p.weight * rng.gen::<f64>();
                let (mut lo, mut hi) = (p.a, p.b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if p.cdf(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            Component::Cantor(_) => return Err(MeasureError::UnsupportedSampling),
        })
    }
}

/// Smallest point of the (depth-limited) Cantor support at or right of `y`.
fn cantor_min_ge(c: &Cantor, y: f64) -> Option<f64> {
    if y <= c.a {
        return Some(c.a);
    }
    if y >= c.b {
        return None;
    }
    let mut left = c.a;
    let mut len = c.b - c.a;
    for _ in 0..c.depth {
        let third = len / 3.0;
        if y < left + third {
            len = third;
        } else if y < left + 2.0 * third {
            return Some(left + 2.0 * third);
        } else {
            left += 2.0 * third;
            len = third;
        }
    }
    Some(y.max(left))
}

/// Where a measure has a density: merged hulls of its absolutely continuous
/// components and the hulls of its singular components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassLayout {
    smooth: Vec<(f64, f64)>,
    singular: Vec<(f64, f64)>,
}

impl MassLayout {
    /// Whether `[a, b]` lies inside one absolutely continuous stretch and
    /// misses the interior of every singular component.
    pub fn is_smooth_on(&self, a: f64, b: f64) -> bool {
        self.smooth.iter().any(|(l, r)| *l <= a && b <= *r) && !self.singular.iter().any(|(l, r)| a < *r && b > *l)
    }
}

/// A probability measure: a validated finite mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    components: Vec<Component>,
}

impl Measure {
    pub fn from_spec(spec: &MeasureSpec) -> Result<Self, MeasureError> {
        if spec.components.is_empty() {
            return Err(MeasureError::Empty);
        }
        let components = spec
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| Component::from_spec(i, c))
            .collect::<Result<Vec<_>, _>>()?;
        let total: f64 = components.iter().map(Component::weight).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(MeasureError::MassNotOne(total));
        }
        Ok(Self { components })
    }

    pub fn spec(&self) -> MeasureSpec {
        MeasureSpec { components: self.components.iter().map(Component::to_spec).collect() }
    }

    pub fn dirac(x: f64) -> Self {
        Self { components: vec![Component::Atom { x, w: 1.0 }] }
    }

    pub fn uniform(a: f64, b: f64) -> Self {
        Self::from_spec(&MeasureSpec { components: vec![ComponentSpec::Uniform { a, b, w: 1.0 }] })
            .expect("valid uniform")
    }

    pub fn normal(mean: f64, var: f64) -> Self {
        Self::from_spec(&MeasureSpec { components: vec![ComponentSpec::Normal { mean, var, w: 1.0 }] })
            .expect("valid normal")
    }

    pub fn exponential(rate: f64) -> Self {
        Self::from_spec(&MeasureSpec { components: vec![ComponentSpec::Exponential { rate, w: 1.0 }] })
            .expect("valid exponential")
    }

    pub fn cantor(a: f64, b: f64, depth: u32) -> Self {
        Self::from_spec(&MeasureSpec { components: vec![ComponentSpec::Cantor { a, b, depth, w: 1.0 }] })
            .expect("valid cantor")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// `m((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        self.components.iter().map(|c| c.cdf(x)).sum::<f64>().clamp(0.0, 1.0)
    }

    /// `m((lo, hi])`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.components.iter().map(|c| (c.cdf(hi) - c.cdf(lo)).max(0.0)).sum()
    }

    /// `∫_{-inf}^x F(z) dz`.
    pub fn cdf_integral(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.cdf_integral(x)).sum()
    }

    /// Closed hull of the support, possibly infinite.
    pub fn hull(&self) -> (f64, f64) {
        self.components.iter().map(Component::hull).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, r), (a, b)| {
            (l.min(a), r.max(b))
        })
    }

    /// Finite interval carrying all but a negligible part of the mass.
    pub fn effective_hull(&self) -> (f64, f64) {
        self.components
            .iter()
            .map(Component::effective_hull)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, r), (a, b)| (l.min(a), r.max(b)))
    }

    pub fn layout(&self) -> MassLayout {
        let mut smooth: Vec<(f64, f64)> = self
            .components
            .iter()
            .filter(|c| !matches!(c, Component::Atom { .. } | Component::Cantor(_)))
            .map(Component::hull)
            .collect();
        smooth.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in smooth {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let singular = self
            .components
            .iter()
            .filter_map(|c| match c {
                Component::Cantor(k) => Some((k.a, k.b)),
                _ => None,
            })
            .collect();
        MassLayout { smooth: merged, singular }
    }

    pub fn has_atoms(&self) -> bool {
        self.components.iter().any(|c| matches!(c, Component::Atom { .. }))
    }

    /// Atom locations and weights.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.components.iter().filter_map(|c| match c {
            Component::Atom { x, w } => Some((*x, *w)),
            _ => None,
        })
    }

    pub fn is_sampleable(&self) -> bool {
        !self.components.iter().any(|c| matches!(c, Component::Cantor(_)))
    }

    /// `∫_{[lo, hi]} N(y; x, sigma^2) m(dy)`, in closed form except for
    /// polynomial pieces.
    pub fn kernel_mass(&self, x: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
        self.components.iter().map(|c| c.kernel_mass(x, sigma, lo, hi)).sum()
    }

    /// `∫_{(lo, hi]} f dm`. Infinite limits are clipped to the support.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<f64, MeasureError> {
        let mut bad = None;
        let mut guarded = |y: f64| {
            let v = f(y);
            if !v.is_finite() && bad.is_none() {
                bad = Some(y);
            }
            v
        };
        let share = QuadConfig { tol: cfg.tol / self.components.len() as f64, ..*cfg };
        let total: f64 = self.components.iter().map(|c| c.integrate(&mut guarded, lo, hi, &share)).sum();
        match bad {
            Some(y) => Err(MeasureError::NumericalDomain(y)),
            None => Ok(total),
        }
    }

    /// Smallest `z >= y` at which mass begins to the right of `y`.
    pub fn support_min_ge(&self, y: f64) -> Option<f64> {
        self.components.iter().filter_map(|c| c.support_min_ge(y)).min_by(f64::total_cmp)
    }

    /// Largest `z <= y` at which mass begins to the left of `y`.
    pub fn support_max_le(&self, y: f64) -> Option<f64> {
        self.components.iter().filter_map(|c| c.support_max_le(y)).max_by(f64::total_cmp)
    }

    /// Draw one sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, MeasureError> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let last = self.components.len() - 1;
        for (i, c) in self.components.iter().enumerate() {
            acc += c.weight();
            if u < acc || i == last {
                return c.sample(rng);
            }
        }
        unreachable!("measure has at least one component")
    }
}

/// `∫_{(lo, hi]} f d(nu - mu)`.
pub fn signed_stieltjes<F: FnMut(f64) -> f64>(
    mut f: F,
    nu: &Measure,
    mu: &Measure,
    lo: f64,
    hi: f64,
    cfg: &QuadConfig,
) -> Result<f64, MeasureError> {
    Ok(nu.integrate(&mut f, lo, hi, cfg)? - mu.integrate(&mut f, lo, hi, cfg)?)
}

/// Support extrema of the pair (mu, nu), written as nonnegative distances
/// from the origin where applicable: `a_plus = sup supp nu`,
/// `a_minus = -inf supp nu`, and likewise for `mu`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupportInfo {
    pub a_plus: f64,
    pub a_minus: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SupportError {
    #[error("the support of nu must contain or touch the origin from both sides (a_plus = {a_plus}, a_minus = {a_minus})")]
    NegativeSupportBound { a_plus: f64, a_minus: f64 },
    #[error("mu must be atom-less")]
    MuHasAtoms,
    #[error("mu charges the hull of supp nu with mass {0}")]
    MuChargesNuHull(f64),
}

pub fn support_info(mu: &Measure, nu: &Measure) -> Result<SupportInfo, SupportError> {
    let (nl, nr) = nu.hull();
    let (ml, mr) = mu.hull();
    let info = SupportInfo { a_plus: nr, a_minus: -nl, mu_plus: mr, mu_minus: -ml };
    if info.a_plus < 0.0 || info.a_minus < 0.0 {
        return Err(SupportError::NegativeSupportBound { a_plus: info.a_plus, a_minus: info.a_minus });
    }
    Ok(info)
}

/// Ends `(hat_b_minus, hat_b_plus)` of the largest mu-null open interval
/// `(-hat_b_minus, hat_b_plus)` containing the hull of supp nu. An infinite
/// value means mu puts no mass on that side.
pub fn hat_b(mu: &Measure, nu: &Measure) -> Result<(f64, f64), SupportError> {
    let info = support_info(mu, nu)?;
    if mu.has_atoms() {
        return Err(SupportError::MuHasAtoms);
    }
    let inside = mu.cdf(info.a_plus) - mu.cdf(-info.a_minus);
    if inside > 1e-14 {
        return Err(SupportError::MuChargesNuHull(inside));
    }
    let plus = mu.support_min_ge(info.a_plus).unwrap_or(f64::INFINITY);
    let minus = mu.support_max_le(-info.a_minus).map(|z| -z).unwrap_or(f64::INFINITY);
    Ok((minus, plus))
}

/// Reference `∫_{(lo, hi]} f dm` as a Riemann–Stieltjes sum over `n`
/// equal CDF increments on `[lo, hi]`, plus exact atom contributions.
/// Slow and first-order accurate; used to cross-check [`Measure::integrate`].
pub fn riemann_stieltjes<F: Fn(f64) -> f64>(m: &Measure, f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let (el, er) = m.effective_hull();
    let l = lo.max(el);
    let r = hi.min(er);
    if r <= l {
        return 0.0;
    }
    let width = (r - l) / n as f64;
    let continuous = |x: f64| {
        m.components
            .iter()
            .filter(|c| !matches!(c, Component::Atom { .. }))
            .map(|c| c.cdf(x))
            .sum::<f64>()
    };
    let mut prev = continuous(l);
    let mut acc = 0.0;
    for i in 1..=n {
        let x = l + i as f64 * width;
        let cur = continuous(x);
        acc += f(x - 0.5 * width) * (cur - prev);
        prev = cur;
    }
    acc + m.atoms().filter(|(x, _)| lo < *x && *x <= hi).map(|(x, w)| w * f(x)).sum::<f64>()
}

/// Mills ratio `Q(z) / phi(z)` for `z >= 5` by continued fraction.
fn mills(z: f64) -> f64 {
    let mut acc = z;
    for k in (1..=40).rev() {
        acc = z + k as f64 / acc;
    }
    1.0 / acc
}
