//! `rost`: solve for Rost barrier boundaries, evaluate the value function and
//! verify the result against a lattice oracle and Monte Carlo.

mod config;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rost_barrier::solver::{solve_boundaries, BarrierProblem, BoundaryPair, GeneralizedInverse, SolverError};
use rost_barrier::value::{compare_with_lattice, lattice_value, value_u_kernel, value_u_localtime, LatticeSpec, ValueQuery};
use rost_barrier::verify::{embedding_test, samples_to_csv, simulate_embedding};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "rost", version, about = "Rost reversed-barrier boundaries for the Skorokhod embedding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo seed; overrides `mc.seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary equations and write `boundaries.csv` and `diagnostics.json`.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Compare boundaries with the lattice oracle and/or a Monte Carlo embedding.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Boundaries CSV from `solve`; solved in-run when absent.
        #[arg(long)]
        boundaries: Option<PathBuf>,
        #[arg(long, overrides_with = "no_oracle")]
        oracle: bool,
        #[arg(long)]
        no_oracle: bool,
        #[arg(long, overrides_with = "no_mc")]
        mc: bool,
        #[arg(long)]
        no_mc: bool,
    },
    /// Print U^T(t, x) by both representations.
    Value {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        boundaries: Option<PathBuf>,
    },
}

/// A failed run: exit code plus a machine-readable kind.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    pub fn config(message: impl Display) -> Self {
        Self { code: 2, kind: "ConfigInvalid", message: message.to_string() }
    }

    pub fn io(path: &Path, err: impl Display) -> Self {
        Self { code: 2, kind: "IO", message: format!("{}: {err}", path.display()) }
    }

    fn numerical(kind: &'static str, message: impl Display) -> Self {
        Self { code: 3, kind, message: message.to_string() }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidConfig(m) => Failure::config(m),
            other => Failure::numerical(other.kind(), other),
        }
    }
}

struct Run {
    cfg: RunConfig,
    prob: BarrierProblem,
    out: PathBuf,
}

impl Run {
    fn new(common: &Common) -> Result<Self, Failure> {
        let mut cfg = RunConfig::load(&common.config)?;
        if let Some(seed) = common.seed {
            cfg.mc.seed = seed;
        }
        if let Some(out) = &common.out {
            cfg.out = Some(out.clone());
        }
        let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        let prob = cfg.problem()?;
        Ok(Self { cfg, prob, out })
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| Failure::io(&self.out, e))?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| Failure::io(&path, e))
    }

    fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<(), Failure> {
        self.write(name, &(serde_json::to_string_pretty(value).expect("json") + "\n"))
    }

    fn write_resolved_config(&self) -> Result<(), Failure> {
        let mut resolved = self.cfg.clone();
        resolved.out = Some(self.out.clone());
        self.write_json("config.resolved.json", &serde_json::to_value(&resolved).expect("json"))
    }

    /// Boundaries from a CSV file, or solved now. Either way they pass
    /// through the CSV text so both paths see identical values.
    fn boundaries(&self, file: Option<&Path>) -> Result<BoundaryPair, Failure> {
        let text = match file {
            Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?,
            None => {
                let (bp, _) = solve_boundaries(&self.prob, self.cfg.grid()?, &self.cfg.solver)?;
                let text = bp.to_csv();
                self.write("boundaries.csv", &text)?;
                text
            }
        };
        let bp = BoundaryPair::from_csv(&text, &self.prob).map_err(|e| Failure::config(format!("boundaries: {e}")))?;
        let grid = self.cfg.grid()?;
        if bp.grid.steps() != grid.steps() || (bp.grid.horizon() - grid.horizon()).abs() > 1e-9 * grid.horizon() {
            return Err(Failure::config(format!(
                "boundaries are on T = {}, N = {} but the config has T = {}, N = {}",
                bp.grid.horizon(),
                bp.grid.steps(),
                grid.horizon(),
                grid.steps()
            )));
        }
        Ok(bp)
    }
}

fn cmd_solve(common: &Common) -> Result<u8, Failure> {
    let run = Run::new(common)?;
    run.write_resolved_config()?;
    let (bp, diag) = solve_boundaries(&run.prob, run.cfg.grid()?, &run.cfg.solver)?;
    run.write("boundaries.csv", &bp.to_csv())?;
    let certified = diag.certified(run.cfg.solver.residual_tol);
    let mut report = serde_json::to_value(&diag).expect("json");
    report["certified"] = json!(certified);
    report["mode"] = json!(run.prob.mode);
    run.write_json("diagnostics.json", &report)?;
    println!(
        "solved {} steps: s_+(T) = {}, s_-(T) = {}, max |residual| = {:.3e}{}",
        bp.grid.steps(),
        bp.plus[0],
        bp.minus[0],
        diag.max_abs_residual,
        if diag.clamped.is_empty() { String::new() } else { format!(", {} nodes held after a jump", diag.clamped.len()) }
    );
    Ok(0)
}

fn cmd_verify(common: &Common, boundaries: Option<&Path>, oracle: bool, mc: bool) -> Result<u8, Failure> {
    let run = Run::new(common)?;
    run.write_resolved_config()?;
    let bp = run.boundaries(boundaries)?;
    let mut report = serde_json::Map::new();
    let mut pass = true;
    if oracle {
        let spec = LatticeSpec::for_problem(&run.prob, bp.grid, run.cfg.solver.cap_sigmas);
        let lat = lattice_value(&run.prob, spec, run.cfg.solver.execution);
        let cmp = compare_with_lattice(&bp, &lat);
        run.write("oracle.csv", &cmp.to_csv())?;
        let tol = run.cfg.gates.oracle_tol.unwrap_or_else(|| (3.0 * bp.grid.h().sqrt()).max(0.05));
        let ok = cmp.sup_plus <= tol && cmp.sup_minus <= tol;
        pass &= ok;
        report.insert(
            "oracle".into(),
            json!({ "sup_plus": cmp.sup_plus, "sup_minus": cmp.sup_minus, "tol": tol, "single_interval": cmp.single_interval, "pass": ok }),
        );
        println!("oracle: sup distance {:.4} / {:.4} (tolerance {tol:.4}) {}", cmp.sup_plus, cmp.sup_minus, verdict(ok));
    }
    if mc {
        let samples = simulate_embedding(&bp, &run.prob, &run.cfg.mc).map_err(|e| Failure::numerical("MonteCarlo", e))?;
        run.write("mc_samples.csv", &samples_to_csv(&samples))?;
        let r = embedding_test(&samples, &run.prob, &bp).map_err(|e| Failure::numerical("MonteCarlo", e))?;
        let gates = run.cfg.gates;
        let ok = r.ks < gates.ks_max && r.censor_z() <= gates.censor_se_max;
        pass &= ok;
        report.insert(
            "mc".into(),
            json!({ "ks": r.ks, "n_stopped": r.n_stopped, "n_censored": r.n_censored, "censor_pred": r.censor_pred, "censor_obs": r.censor_obs, "pass": ok }),
        );
        println!(
            "mc: KS {:.4}, censored {:.4} vs predicted {:.4} ({:.2} SE) {}",
            r.ks,
            r.censor_obs,
            r.censor_pred,
            r.censor_z(),
            verdict(ok)
        );
    }
    report.insert("pass".into(), json!(pass));
    run.write_json("verify.json", &serde_json::Value::Object(report))?;
    Ok(if pass { 0 } else { 1 })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_value(common: &Common, t: f64, x: f64, boundaries: Option<&Path>) -> Result<u8, Failure> {
    let run = Run::new(common)?;
    let q = ValueQuery::new(t, x, run.cfg.horizon).map_err(Failure::config)?;
    let bp = run.boundaries(boundaries)?;
    let kernel = value_u_kernel(q, &bp, &run.prob, run.cfg.solver.time_rule(), run.cfg.solver.execution);
    let phi = GeneralizedInverse::new(&bp, &run.prob);
    let local = value_u_localtime(q, &bp, &run.prob, &phi).map_err(|e| Failure::numerical("Quadrature", e))?;
    println!("kernel    {kernel:.9e}");
    println!("localtime {local:.9e}");
    println!("difference {:.9e}", kernel - local);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { common } => cmd_solve(common),
        Command::Verify { common, boundaries, no_oracle, no_mc, .. } => cmd_verify(common, boundaries.as_deref(), !no_oracle, !no_mc),
        Command::Value { common, t, x, boundaries } => cmd_value(common, *t, *x, boundaries.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
