//! Bracketing root search for a residual that is positive below the root
//! and nonpositive above it.

use super::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootFailure {
    /// The residual is already negative at the lower end.
    NegativeAtLower(f64),
    /// No sign change up to the (extended) cap.
    NoSignChange,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(f64) -> f64> Counted<F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }
}

/// Search `[lower, cap]` for the root, scanning upward from `lower` with steps
/// starting at `first_step` and doubling up to `max_step`, then bisecting and
/// polishing with a chord Newton iteration.
pub fn find_root<F: FnMut(f64) -> f64>(
    f: F,
    lower: f64,
    cap: f64,
    first_step: f64,
    max_step: f64,
    cfg: &SolverConfig,
) -> Result<Root, RootFailure> {
    let mut f = Counted { f, evaluations: 0 };
    let f_lower = f.eval(lower);
    if f_lower <= 0.0 {
        return if f_lower.abs() < cfg.residual_tol {
            Ok(Root { x: lower, residual: f_lower, evaluations: f.evaluations })
        } else {
            Err(RootFailure::NegativeAtLower(f_lower))
        };
    }
    let mut a = lower;
    let mut fa = f_lower;
    let mut step = first_step.min(max_step);
    let mut limit = cap;
    let mut extended = false;
    let (c, fc) = loop {
        let c = (a + step).min(limit);
        let fc = f.eval(c);
        if fc <= 0.0 {
            break (c, fc);
        }
        a = c;
        fa = fc;
        if c >= limit {
            if extended {
                return Err(RootFailure::NoSignChange);
            }
            extended = true;
            limit = lower + 1.5 * (cap - lower);
        }
        step = (2.0 * step).min(max_step);
    };
    Ok(refine(&mut f, a, fa, c, fc, cfg))
}

/// Like [`find_root`] but starting from a nearby estimate `guess`: the bracket
/// grows geometrically around it, never below `lower`.
pub fn find_root_near<F: FnMut(f64) -> f64>(
    f: F,
    guess: f64,
    lower: f64,
    cap: f64,
    cfg: &SolverConfig,
) -> Result<Root, RootFailure> {
    let mut f = Counted { f, evaluations: 0 };
    let g = guess.max(lower);
    let fg = f.eval(g);
    let mut delta = 1e-7;
    if fg > 0.0 {
        let (mut a, mut fa) = (g, fg);
        loop {
            let c = (a + delta).min(cap);
            let fc = f.eval(c);
            if fc <= 0.0 {
                return Ok(refine(&mut f, a, fa, c, fc, cfg));
            }
            if c >= cap {
                return Err(RootFailure::NoSignChange);
            }
            a = c;
            fa = fc;
            delta *= 4.0;
        }
    } else {
        let (mut c, mut fc) = (g, fg);
        loop {
            if c <= lower {
                return if fc.abs() < cfg.residual_tol {
                    Ok(Root { x: lower, residual: fc, evaluations: f.evaluations })
                } else {
                    Err(RootFailure::NegativeAtLower(fc))
                };
            }
            let a = (c - delta).max(lower);
            let fa = f.eval(a);
            if fa > 0.0 {
                return Ok(refine(&mut f, a, fa, c, fc, cfg));
            }
            c = a;
            fc = fa;
            delta *= 4.0;
        }
    }
}

/// Bisection of `[a, c]` (`f(a) > 0 >= f(c)`) to `cfg.bisection_width`,
/// then chord Newton; falls back to further bisection until the residual
/// is certified or the iteration budget runs out.
fn refine<F: FnMut(f64) -> f64>(f: &mut Counted<F>, mut a: f64, mut fa: f64, mut c: f64, mut fc: f64, cfg: &SolverConfig) -> Root {
    let mut iters = 0;
    while c - a > cfg.bisection_width && iters < cfg.max_bisection_iters {
        let m = 0.5 * (a + c);
        let fm = f.eval(m);
        if fm > 0.0 {
            a = m;
            fa = fm;
        } else {
            c = m;
            fc = fm;
        }
        iters += 1;
    }
    let mut best = if fa.abs() < fc.abs() { (a, fa) } else { (c, fc) };
    // secant point inside the bracket, then chord Newton
    let mut x = if fa - fc > 0.0 { a + (c - a) * fa / (fa - fc) } else { 0.5 * (a + c) };
    let mut fx = f.eval(x);
    let mut slope = None;
    for _ in 0..cfg.newton_polish_iters {
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx > 0.0 {
            a = x;
        } else {
            c = x;
        }
        if fx.abs() < 1e-3 * cfg.residual_tol || c - a < cfg.root_abs_tol {
            break;
        }
        let d = match slope {
            Some(d) => d,
            None => {
                let probe = x + cfg.fd_step;
                let d = (f.eval(probe) - fx) / cfg.fd_step;
                slope = Some(d);
                d
            }
        };
        let mut next = if d < 0.0 { x - fx / d } else { 0.5 * (a + c) };
        if !(next > a && next < c) {
            next = 0.5 * (a + c);
        }
        if (next - x).abs() < 1e-3 * cfg.root_abs_tol {
            break;
        }
        x = next;
        fx = f.eval(x);
    }
    if fx.abs() < best.1.abs() {
        best = (x, fx);
    }
    if fx > 0.0 {
        a = a.max(x);
    } else {
        c = c.min(x);
    }
    while best.1.abs() >= cfg.residual_tol && iters < cfg.max_bisection_iters {
        let m = 0.5 * (a + c);
        if m <= a || m >= c {
            break;
        }
        let fm = f.eval(m);
        if fm.abs() < best.1.abs() {
            best = (m, fm);
        }
        if fm > 0.0 {
            a = m;
        } else {
            c = m;
        }
        iters += 1;
    }
    Root { x: best.0, residual: best.1, evaluations: f.evaluations }
}
