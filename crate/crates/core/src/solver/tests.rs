use super::*;
use crate::measures::{riemann_stieltjes, ComponentSpec, Measure, MeasureSpec};
use crate::quadrature::{adaptive, QuadConfig};
use crate::special::gauss_density;

fn uniform_problem() -> BarrierProblem {
    BarrierProblem::new(Measure::uniform(0.0, 2.0), Measure::dirac(0.0)).unwrap()
}

fn normal_problem() -> BarrierProblem {
    BarrierProblem::new(Measure::normal(1.0, 1.0), Measure::dirac(0.0)).unwrap()
}

fn gap_problem() -> BarrierProblem {
    let mu = Measure::from_spec(&MeasureSpec {
        components: vec![
            ComponentSpec::Uniform { a: 0.0, b: 0.4, w: 0.5 },
            ComponentSpec::Uniform { a: 0.6, b: 2.2, w: 0.5 },
        ],
    })
    .unwrap();
    BarrierProblem::new(mu, Measure::dirac(0.0)).unwrap()
}

fn flat_pair(grid: Grid, plus: f64, minus: f64) -> BoundaryPair {
    let n = grid.steps();
    BoundaryPair { grid, plus: vec![plus; n + 1], minus: vec![minus; n + 1], profile_plus: false, profile_minus: false }
}

#[test]
fn modes_follow_target_support() {
    assert_eq!(uniform_problem().mode, Mode::UpperOnly);
    assert_eq!(normal_problem().mode, Mode::TwoSided);
    let lower = BarrierProblem::new(Measure::uniform(-2.0, -0.5), Measure::dirac(0.0)).unwrap();
    assert_eq!(lower.mode, Mode::LowerOnly);
    assert_eq!(lower.hat_b(Side::Minus), 0.5);
    assert!(uniform_problem().has_start_profile(Side::Plus));
    assert!(!lower.has_start_profile(Side::Minus));
}

#[test]
fn kernel_mass_terminal_interval_sees_only_the_atom() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 10).unwrap();
    let mut bp = flat_pair(grid, 0.5, f64::INFINITY);
    bp.plus[10] = 0.0;
    for k in [0, 5, 9] {
        let x = 0.3;
        let want = gauss_density(x, (1.0 - grid.time(k)).sqrt());
        assert!((kernel_mass(&prob, &bp, k, x, 10) - want).abs() < 1e-15);
    }
}

#[test]
fn kernel_mass_vanishes_off_support() {
    let prob = BarrierProblem::new(Measure::uniform(1.0, 2.0), Measure::dirac(0.0)).unwrap();
    let grid = Grid::new(1.0, 10).unwrap();
    // interval (-inf, 0.5] holds the atom; shift it to exclude everything
    let bp = BoundaryPair {
        grid,
        plus: vec![-0.5; 11],
        minus: vec![0.25; 11],
        profile_plus: false,
        profile_minus: false,
    };
    assert_eq!(kernel_mass(&prob, &bp, 0, 0.0, 3), 0.0);
}

#[test]
fn kernel_mass_first_step_against_riemann_sum() {
    let prob = normal_problem();
    let grid = Grid::new(1.0, 100).unwrap();
    let cap = prob.cap(Side::Plus, 1.0, 6.0);
    let bp = flat_pair(grid, cap, cap);
    let h = grid.h();
    let sigma = h.sqrt();
    let got = kernel_mass(&prob, &bp, 0, 0.0, 1);
    let mu_part = riemann_stieltjes(&prob.mu, |y| gauss_density(y, sigma), -cap, cap, 1_000_000);
    let want = gauss_density(0.0, sigma) - mu_part;
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn rectangle_residual_last_node() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 200).unwrap();
    let mut bp = flat_pair(grid, 0.3, f64::INFINITY);
    bp.plus[200] = 0.0;
    let r = rectangle_residual(&prob, &bp, 199, Side::Plus, 0.0);
    let want = grid.h() * gauss_density(0.0, grid.h().sqrt());
    assert!(r > 0.0 && (r - want).abs() < 1e-15);
}

/// Independent double integral: adaptive quadrature in `r` with `u = t0 + r^2`
/// around adaptive Stieltjes integration in `y`.
fn brute_time_integral(prob: &BarrierProblem, bp: &BoundaryPair, t0: f64, x: f64) -> f64 {
    let horizon = bp.grid.horizon();
    let inner_cfg = QuadConfig { tol: 1e-12, ..QuadConfig::default() };
    let mut outer = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let u = t0 + r * r;
        let hi = bp.backward(&prob, Side::Plus, u);
        let lo = -bp.backward(&prob, Side::Minus, u);
        let cfg = inner_cfg.with_resolution(r / 2.0);
        let nu = prob.nu.kernel_mass(x, r, lo, hi);
        let mu = prob.mu.integrate(|y| gauss_density(y - x, r), lo, hi, &cfg).unwrap();
        2.0 * r * (nu - mu)
    };
    let cfg = QuadConfig { tol: 1e-11, ..QuadConfig::default() }.with_resolution(0.01);
    adaptive(&mut outer, 0.0, (horizon - t0).sqrt(), &cfg)
}

#[test]
fn time_integral_matches_nested_quadrature() {
    let grid = Grid::new(1.0, 20).unwrap();
    let n = grid.steps();
    let plus: Vec<f64> = (0..=n).map(|k| 1.1 * (1.0 - grid.time(k)).sqrt()).collect();
    let minus: Vec<f64> = (0..=n).map(|k| 1.8 * (1.0 - grid.time(k)).sqrt()).collect();
    let bp = BoundaryPair { grid, plus, minus, profile_plus: false, profile_minus: false };
    let prob = normal_problem();
    for &(k, x) in &[(0usize, 0.2), (5, -0.7), (15, 1.1)] {
        let t0 = grid.time(k);
        let fast = time_integral(&prob, &bp.view(&prob), t0, x, TimeRule { near: 24, far: 12, grade: 20 }, Execution::Sequential);
        let slow = brute_time_integral(&prob, &bp, t0, x);
        assert!((fast - slow).abs() < 1e-7, "{fast} vs {slow}");
    }
}

#[test]
fn solves_uniform_target() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 50).unwrap();
    let cfg = SolverConfig::default();
    let (bp, diag) = solve_boundaries(&prob, grid, &cfg).unwrap();
    assert!(diag.certified(cfg.residual_tol));
    assert_eq!(bp.plus[50], 0.0);
    assert!(bp.minus.iter().all(|v| v.is_infinite()));
    assert!(bp.plus.windows(2).all(|w| w[0] > w[1]));
    assert!(bp.plus[0] > 0.8 && bp.plus[0] < 1.3);
}

#[test]
fn residual_matches_certified_value() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 20).unwrap();
    let cfg = SolverConfig::default();
    let (bp, diag) = solve_boundaries(&prob, grid, &cfg).unwrap();
    for k in [0, 7, 19] {
        let r = residual(&prob, &bp.view(&prob), k, Side::Plus, bp.plus[k], bp.minus[k], cfg.time_rule(), cfg.execution);
        assert_eq!(Some(r), diag.residual_plus[k]);
    }
}

#[test]
fn tail_residual_is_negative_and_matches_quadrature() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 20).unwrap();
    let cfg = SolverConfig::default();
    let (bp, _) = solve_boundaries(&prob, grid, &cfg).unwrap();
    let k = 10;
    let cap = prob.cap(Side::Plus, 1.0, cfg.cap_sigmas);
    let r = residual(&prob, &bp.view(&prob), k, Side::Plus, cap, f64::INFINITY, cfg.time_rule(), Execution::Sequential);
    let mut moved = bp.clone();
    moved.plus[k] = cap;
    let slow = brute_time_integral(&prob, &moved, grid.time(k), cap);
    assert!(r < 0.0);
    assert!((r - slow).abs() < 1e-7, "{r} vs {slow}");
}

#[test]
fn solves_two_sided_normal_target() {
    let prob = normal_problem();
    let grid = Grid::new(1.0, 40).unwrap();
    let cfg = SolverConfig::default();
    let (bp, diag) = solve_boundaries(&prob, grid, &cfg).unwrap();
    assert!(diag.certified(cfg.residual_tol));
    assert_eq!((bp.plus[40], bp.minus[40]), (0.0, 0.0));
    assert!(bp.plus.windows(2).all(|w| w[0] > w[1]));
    assert!(bp.minus.windows(2).all(|w| w[0] > w[1]));
    assert!(diag.sweeps[..40].iter().all(|s| *s >= 2 && *s < 50));
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let prob = normal_problem();
    let grid = Grid::new(0.5, 30).unwrap();
    let seq = SolverConfig { execution: Execution::Sequential, ..SolverConfig::default() };
    let par = SolverConfig { execution: Execution::Parallel, ..SolverConfig::default() };
    let (a, _) = solve_boundaries(&prob, grid, &seq).unwrap();
    let (b, _) = solve_boundaries(&prob, grid, &par).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gap_produces_steep_segment() {
    let prob = gap_problem();
    let grid = Grid::new(0.25, 125).unwrap();
    let (bp, diag) = solve_boundaries(&prob, grid, &SolverConfig::default()).unwrap();
    let jump = (0..125).find(|&k| bp.plus[k + 1] < 0.4 && bp.plus[k] > 0.6).expect("one-step jump");
    assert!(!diag.clamped.is_empty());
    for &(k, side) in &diag.clamped {
        assert_eq!(side, Side::Plus);
        assert!(k < jump && jump - k <= 3, "clamp at {k}, jump at {jump}");
        assert!(diag.residual_plus[k].unwrap().abs() < 1e-6);
    }
    let uncertified = diag.residual_plus.iter().flatten().filter(|r| r.abs() >= 1e-9).count();
    assert_eq!(uncertified, diag.clamped.len());
    let steps: Vec<f64> = bp.plus.windows(2).map(|w| w[0] - w[1]).collect();
    let biggest = steps.iter().cloned().fold(0.0, f64::max);
    assert!(biggest > 0.1, "largest step {biggest}");
    let phi = GeneralizedInverse::new(&bp, &prob);
    let (a, b) = (phi.eval(0.45), phi.eval(0.55));
    assert!((b - a).abs() <= grid.h());
}

#[test]
fn inverse_on_solved_nodes() {
    let prob = uniform_problem();
    let grid = Grid::new(1.0, 40).unwrap();
    let (bp, _) = solve_boundaries(&prob, grid, &SolverConfig::default()).unwrap();
    let phi = GeneralizedInverse::new(&bp, &prob);
    for k in 0..40 {
        let want = 1.0 - grid.time(k);
        assert!((phi.eval(bp.plus[k]) - want).abs() < grid.h());
    }
    assert_eq!(phi.eval(-3.0), 0.0);
    assert_eq!(phi.eval(5.0), 1.0);
}

#[test]
fn rejects_bad_config() {
    let cfg = SolverConfig { residual_tol: 0.0, ..SolverConfig::default() };
    let r = solve_boundaries(&uniform_problem(), Grid::new(1.0, 4).unwrap(), &cfg);
    assert!(matches!(r, Err(SolverError::InvalidConfig(_))));
}

#[test]
fn config_round_trips_through_json() {
    let cfg = SolverConfig::default();
    let text = serde_json::to_string(&cfg).unwrap();
    let back: SolverConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
    assert!(serde_json::from_str::<SolverConfig>(r#"{"bogus":1}"#).is_err());
    let partial: SolverConfig = serde_json::from_str(r#"{"residual_tol":1e-8}"#).unwrap();
    assert_eq!(partial.residual_tol, 1e-8);
}

#[test]
fn singular_target_solves_without_clamping() {
    let mu = Measure::from_spec(&MeasureSpec {
        components: vec![
            ComponentSpec::Cantor { a: 1.0, b: 2.0, depth: 30, w: 0.5 },
            ComponentSpec::Uniform { a: -2.0, b: -1.0, w: 0.5 },
        ],
    })
    .unwrap();
    let prob = BarrierProblem::new(mu, Measure::dirac(0.0)).unwrap();
    let grid = Grid::new(1.0, 40).unwrap();
    let (bp, diag) = solve_boundaries(&prob, grid, &SolverConfig::default()).unwrap();
    assert!(diag.clamped.is_empty());
    assert!(diag.certified(1e-9));
    assert!(bp.plus.windows(2).all(|w| w[0] >= w[1]));
    assert!(bp.minus.windows(2).all(|w| w[0] >= w[1]));
    assert!(bp.plus[0] > 1.0 && bp.plus[0] < 2.0);
}
