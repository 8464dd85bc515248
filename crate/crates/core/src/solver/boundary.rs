use std::fmt::Write as _;

use thiserror::Error;

use super::grid::Grid;
use super::problem::{BarrierProblem, Side};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsvError {
    #[error("missing or malformed header, expected `t,s_plus,s_minus`")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error("need at least 3 rows, found {0}")]
    TooShort(usize),
    #[error("forward times are not a uniform grid starting at 0")]
    NonUniform,
}

/// Solved boundary values on the backward grid, `plus[k] = s_+(T - t_k)` and
/// `minus[k] = s_-(T - t_k)`. Absent boundaries hold `f64::INFINITY`.
///
/// Between nodes a boundary moves from `s0` to `s1` by a weight `w` in
/// `[0, 1]`: `w = r = (tau - tau0) / h`, except on the first forward step of a
/// boundary that starts from an atom of `nu`, where
/// `w = sqrt(r (1 + beta ln(1/r)))` with `beta = min(h / (s1 - s0)^2, 1)`.
/// Where `mu` has a density on `[s0, s1]` the value is `s0 + w (s1 - s0)`;
/// otherwise the weight is applied to the swept `mu`-mass, so the boundary
/// crosses `mu`-null gaps instantly.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub grid: Grid,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub profile_plus: bool,
    pub profile_minus: bool,
}

impl BoundaryPair {
    pub fn values(&self, side: Side) -> &[f64] {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn view<'a>(&'a self, prob: &'a BarrierProblem) -> PathView<'a> {
        PathView {
            prob,
            grid: &self.grid,
            plus: &self.plus,
            minus: &self.minus,
            profile_plus: self.profile_plus,
            profile_minus: self.profile_minus,
            replaced: None,
        }
    }

    /// Boundary at backward time `u` (`b(u) = s(T - u)`).
    pub fn backward(&self, prob: &BarrierProblem, side: Side, u: f64) -> f64 {
        self.view(prob).at(side, u)
    }

    /// Boundary at forward time `tau`.
    pub fn forward(&self, prob: &BarrierProblem, side: Side, tau: f64) -> f64 {
        self.view(prob).at(side, self.grid.horizon() - tau)
    }

    /// CSV with header `t,s_plus,s_minus`, one row per node in increasing
    /// forward time, 12 significant digits, `inf` for absent values.
    pub fn to_csv(&self) -> String {
        let n = self.grid.steps();
        let mut out = String::from("t,s_plus,s_minus\n");
        for j in 0..=n {
            let k = n - j;
            let t = self.grid.horizon() - self.grid.time(k);
            let _ = writeln!(out, "{},{},{}", fmt_sig12(t), fmt_sig12(self.plus[k]), fmt_sig12(self.minus[k]));
        }
        out
    }

    /// Parse [`BoundaryPair::to_csv`] output; start profiles are taken from `prob`.
    pub fn from_csv(text: &str, prob: &BarrierProblem) -> Result<Self, CsvError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "t,s_plus,s_minus" => {}
            _ => return Err(CsvError::Header),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(CsvError::Row { line: i + 1, reason: format!("expected 3 fields, found {}", fields.len()) });
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = parse_value(f).ok_or_else(|| CsvError::Row { line: i + 1, reason: format!("bad number `{f}`") })?;
            }
            rows.push(vals);
        }
        if rows.len() < 3 {
            return Err(CsvError::TooShort(rows.len()));
        }
        let n = rows.len() - 1;
        let horizon = rows[n][0];
        let grid = Grid::new(horizon, n).map_err(|_| CsvError::NonUniform)?;
        for (j, row) in rows.iter().enumerate() {
            let expected = horizon - grid.time(n - j);
            if (row[0] - expected).abs() > 1e-9 * horizon.max(1.0) {
                return Err(CsvError::NonUniform);
            }
        }
        let plus = (0..=n).map(|k| rows[n - k][1]).collect();
        let minus = (0..=n).map(|k| rows[n - k][2]).collect();
        Ok(Self {
            grid,
            plus,
            minus,
            profile_plus: prob.has_start_profile(Side::Plus),
            profile_minus: prob.has_start_profile(Side::Minus),
        })
    }
}

fn parse_value(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Format with 12 significant digits in the style of C's `%.12g`.
pub fn fmt_sig12(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Continuous boundary model over stored node values, optionally with the
/// values at one node replaced (used while solving that node).
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    pub prob: &'a BarrierProblem,
    pub grid: &'a Grid,
    pub plus: &'a [f64],
    pub minus: &'a [f64],
    pub profile_plus: bool,
    pub profile_minus: bool,
    pub replaced: Option<(usize, f64, f64)>,
}

impl<'a> PathView<'a> {
    pub fn with_node(mut self, k: usize, plus: f64, minus: f64) -> Self {
        self.replaced = Some((k, plus, minus));
        self
    }

    #[inline]
    pub fn node(&self, side: Side, l: usize) -> f64 {
        if let Some((k, p, m)) = self.replaced {
            if k == l {
                return match side {
                    Side::Plus => p,
                    Side::Minus => m,
                };
            }
        }
        match side {
            Side::Plus => self.plus[l],
            Side::Minus => self.minus[l],
        }
    }

    fn profile(&self, side: Side) -> bool {
        match side {
            Side::Plus => self.profile_plus,
            Side::Minus => self.profile_minus,
        }
    }

    /// Boundary value at backward time `u`.
    #[inline]
    pub fn at(&self, side: Side, u: f64) -> f64 {
        let n = self.grid.steps();
        let l = self.grid.segment(u);
        let left = self.node(side, l);
        let right = self.node(side, l + 1);
        if left.is_infinite() || right.is_infinite() {
            return f64::INFINITY;
        }
        let h = self.grid.h();
        let frac = ((u - self.grid.time(l)) / h).clamp(0.0, 1.0);
        let w = if l == n - 1 && self.profile(side) {
            profile_weight(1.0 - frac, h, left - right)
        } else {
            1.0 - frac
        };
        interpolate(self.prob, side, right, left, w)
    }

    /// Both boundaries at backward time `u` as the interval `[lo, hi]`.
    #[inline]
    pub fn interval(&self, u: f64) -> (f64, f64) {
        (-self.at(Side::Minus, u), self.at(Side::Plus, u))
    }

    pub fn has_profile(&self, side: Side) -> bool {
        self.profile(side)
    }
}

/// Boundary value a weight `w` of the way from `lo` to `hi` (see [`BoundaryPair`]).
#[inline]
pub fn interpolate(prob: &BarrierProblem, side: Side, lo: f64, hi: f64, w: f64) -> f64 {
    if w <= 0.0 || hi <= lo {
        return lo;
    }
    if w >= 1.0 {
        return hi;
    }
    if prob.is_smooth_on(side, lo, hi) {
        return lo + (hi - lo) * w;
    }
    let (m0, m1) = (prob.swept_mass(side, lo), prob.swept_mass(side, hi));
    if m1 - m0 <= MASS_FLOOR {
        return lo + (hi - lo) * w;
    }
    let target = m0 + (m1 - m0) * w;
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return b;
        }
        if prob.swept_mass(side, mid) >= target {
            b = mid;
        } else {
            a = mid;
        }
    }
}

/// Weight at which [`interpolate`] reaches `x`; the smallest one across a jump.
pub fn interpolate_inverse(prob: &BarrierProblem, side: Side, lo: f64, hi: f64, x: f64) -> f64 {
    if x <= lo || hi <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    if prob.is_smooth_on(side, lo, hi) {
        return (x - lo) / (hi - lo);
    }
    let (m0, m1) = (prob.swept_mass(side, lo), prob.swept_mass(side, hi));
    if m1 - m0 <= MASS_FLOOR {
        return (x - lo) / (hi - lo);
    }
    ((prob.swept_mass(side, x) - m0) / (m1 - m0)).clamp(0.0, 1.0)
}

const MASS_FLOOR: f64 = 1e-14;

/// Start-profile weight at relative forward time `r` for a first step of size `rise`.
#[inline]
pub fn profile_weight(r: f64, h: f64, rise: f64) -> f64 {
    if rise <= 0.0 || r <= 0.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return 1.0;
    }
    let beta = (h / (rise * rise)).min(1.0);
    (r * (1.0 - beta * r.ln())).sqrt()
}

/// Inverse of [`profile_weight`] in `r`.
pub fn profile_weight_inverse(w: f64, h: f64, rise: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    if w >= 1.0 || rise <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if profile_weight(mid, h, rise) > w {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Start profile from `s0` to `s1` at relative forward time `r`, for a target with a density.
#[inline]
pub fn start_profile(s0: f64, s1: f64, r: f64, h: f64) -> f64 {
    s0 + (s1 - s0) * profile_weight(r, h, s1 - s0)
}


#[cfg(test)]
mod mass_tests {
    use super::*;
    use crate::measures::{Measure, MeasureSpec};

    fn gapped() -> BarrierProblem {
        let spec: MeasureSpec = serde_json::from_str(
            r#"{"components":[{"kind":"uniform","a":0.0,"b":0.4,"w":0.5},{"kind":"uniform","a":0.6,"b":2.2,"w":0.5}]}"#,
        )
        .unwrap();
        BarrierProblem::new(Measure::from_spec(&spec).unwrap(), Measure::dirac(0.0)).unwrap()
    }

    #[test]
    fn crosses_gaps_instantly() {
        let prob = gapped();
        // 0.1 of mass below the gap, 0.1 above: the gap is crossed at w = 1/2.
        let (lo, hi) = (0.32, 0.92);
        assert!((interpolate(&prob, Side::Plus, lo, hi, 0.25) - 0.36).abs() < 1e-12);
        assert!((interpolate(&prob, Side::Plus, lo, hi, 0.75) - 0.76).abs() < 1e-12);
        let just = interpolate(&prob, Side::Plus, lo, hi, 0.5 + 1e-9);
        assert!(just > 0.6 && just < 0.6 + 1e-6);
        assert!((interpolate_inverse(&prob, Side::Plus, lo, hi, 0.5) - 0.5).abs() < 1e-12);
        assert!((interpolate_inverse(&prob, Side::Plus, lo, hi, 0.76) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn linear_where_mu_has_a_density() {
        let prob = gapped();
        assert_eq!(interpolate(&prob, Side::Plus, 0.1, 0.3, 0.5), 0.2);
        let cantor = BarrierProblem::new(Measure::cantor(1.0, 2.0, 30), Measure::uniform(-0.5, 0.5)).unwrap();
        assert!(!cantor.is_smooth_on(Side::Plus, 1.1, 1.2));
        let x = interpolate(&cantor, Side::Plus, 1.0, 2.0, 0.5);
        assert!((x - 1.0 / 3.0 - 1.0).abs() < 1e-8 || (x - 5.0 / 3.0).abs() < 1e-8);
    }
}
