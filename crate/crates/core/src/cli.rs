//! Command-line front end.
//!
//! Exit codes: 0 success, 1 characterization check failed (report still
//! written), 2 I/O failure, 3 invalid input, 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::envelope::{upper_concave_envelope, ConcaveEnvelope};
use crate::error::{Error, Result};
use crate::game::{DerivedParams, GameSpec};
use crate::io::{csv_string, read_spec, write_json, SolutionFile};
use crate::oracle::{UOracle, DEFAULT_RESOLUTION};
use crate::sim::{build_policy, estimate_value, sample_trajectory, SimOptions};
use crate::solver::{solve_limit_value, SolveOptions, DEFAULT_ODE_STEP};
use crate::value::PiecewiseValue;
use crate::verify::{check_characterization, compare_to_oracle, discrete_oracle_value, CharTolerances, OracleOptions};

/// Points of the exported curves.
const CURVE_POINTS: usize = 1001;

#[derive(Debug, Parser)]
#[command(name = "revelation", version, about = "Limit values of two-state Markov games with one informed player")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the limit value; writes solution.json and curve.csv.
    Solve(Common),
    /// Check a solution against the characterization; writes check.json.
    Check {
        #[command(flatten)]
        common: Common,
        /// Previously written solution.json (solved afresh when omitted).
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Discrete-time value iteration; writes oracle.csv and oracle_summary.json.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Stage count per unit of time.
        #[arg(long, default_value_t = 256.0)]
        n: f64,
        /// Uniform belief grid size.
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        /// Solution to compare against.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Simulate the optimal belief process; writes estimate.json or trajectory.csv.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Initial belief.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trajectories: usize,
        /// Simulation horizon (defaults to 12 / r).
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `json`: Monte-Carlo estimate; `csv`: one trajectory.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Export u and its concave envelope; writes curve.csv.
    Curve(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Game specification (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Uniform samples of the one-shot value.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// RK4 step of the sliding equation.
    #[arg(long = "ode-step", default_value_t = DEFAULT_ODE_STEP)]
    pub ode_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Common {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            resolution: self.resolution,
            ode_step: self.ode_step,
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

/// Rejects out-of-range overrides before any computation.
fn validate(cmd: &Command) -> Result<()> {
    let common = match cmd {
        Command::Solve(c) | Command::Curve(c) => c,
        Command::Check { common, .. } => common,
        Command::Oracle { common, n, grid, .. } => {
            if !(*n > 0.0 && n.is_finite()) {
                return Err(Error::NonPositiveStep(*n));
            }
            if *grid < 3 {
                return Err(invalid(format!("--grid must be at least 3, got {grid}")));
            }
            common
        }
        Command::Simulate {
            common,
            p,
            trajectories,
            horizon,
            ..
        } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::ProbabilityOutOfRange(*p));
            }
            if *trajectories == 0 {
                return Err(invalid("--trajectories must be at least 1".into()));
            }
            if let Some(h) = horizon {
                if !(*h > 0.0 && h.is_finite()) {
                    return Err(invalid(format!("--horizon must be positive, got {h}")));
                }
            }
            common
        }
    };
    common.solve_options().validate()
}

fn curve_grid() -> impl Iterator<Item = f64> {
    (0..CURVE_POINTS).map(|i| i as f64 / (CURVE_POINTS - 1) as f64)
}

fn curve_csv(oracle: &UOracle, env: &ConcaveEnvelope, value: Option<&PiecewiseValue>) -> String {
    let mut header = vec!["p", "u", "cav_u"];
    if value.is_some() {
        header.push("v");
    }
    let rows = curve_grid().map(|p| {
        let mut row = vec![p, oracle.u(p), env.eval(p)];
        if let Some(v) = value {
            row.push(v.eval(p));
        }
        (row, None)
    });
    csv_string(&header, rows)
}

/// Loads a stored solution or solves afresh.
fn value_for(spec: &GameSpec, params: &DerivedParams, common: &Common, solution: Option<&Path>) -> Result<(PiecewiseValue, UOracle)> {
    match solution {
        Some(path) => {
            let value = SolutionFile::read(path)?.to_value(params)?;
            let oracle = UOracle::build(spec, common.resolution, 1e-6 * params.scale)?;
            Ok((value, oracle))
        }
        None => {
            let sol = solve_limit_value(spec, &common.solve_options())?;
            Ok((sol.value, sol.oracle))
        }
    }
}

#[derive(Serialize)]
struct OracleSummary {
    n: f64,
    grid_size: usize,
    iterations: usize,
    residual: f64,
    max_contraction_ratio: f64,
    modulus: f64,
    sup_diff: Option<f64>,
}

/// Runs one command; returns the process exit code.
fn execute(cmd: &Command) -> Result<i32> {
    validate(cmd)?;
    let common = match cmd {
        Command::Solve(c) | Command::Curve(c) => c,
        Command::Check { common, .. } | Command::Oracle { common, .. } | Command::Simulate { common, .. } => common,
    };
    let (spec, params) = read_spec(&common.input)?;
    fs::create_dir_all(&common.out)?;
    let out = |name: &str| common.out.join(name);

    match cmd {
        Command::Solve(_) => {
            let sol = solve_limit_value(&spec, &common.solve_options())?;
            write_json(&out("solution.json"), &SolutionFile::new(&sol, spec.name()))?;
            fs::write(out("curve.csv"), curve_csv(&sol.oracle, &sol.envelope, Some(&sol.value)))?;
        }
        Command::Curve(_) => {
            let mut oracle = UOracle::build(&spec, common.resolution, 1e-6 * params.scale)?;
            let env = upper_concave_envelope(&mut oracle);
            fs::write(out("curve.csv"), curve_csv(&oracle, &env, None))?;
        }
        Command::Check { solution, .. } => {
            let (value, oracle) = value_for(&spec, &params, common, solution.as_deref())?;
            let report = check_characterization(&value, &oracle, &CharTolerances::for_oracle(&oracle));
            write_json(&out("check.json"), &report)?;
            return Ok(if report.pass { 0 } else { 1 });
        }
        Command::Oracle { n, grid, solution, .. } => {
            let og = discrete_oracle_value(
                &spec,
                &OracleOptions {
                    n: *n,
                    grid_size: *grid,
                    ..Default::default()
                },
            )?;
            let sup_diff = match solution {
                Some(path) => Some(compare_to_oracle(&SolutionFile::read(path)?.to_value(&params)?, &og)),
                None => None,
            };
            let rows = og.grid.iter().zip(&og.values).map(|(&p, &v)| (vec![p, v], None));
            fs::write(out("oracle.csv"), csv_string(&["p", "v_n"], rows))?;
            write_json(
                &out("oracle_summary.json"),
                &OracleSummary {
                    n: og.n,
                    grid_size: og.grid.len(),
                    iterations: og.iterations,
                    residual: og.residual,
                    max_contraction_ratio: og.max_contraction_ratio,
                    modulus: og.modulus,
                    sup_diff,
                },
            )?;
        }
        Command::Simulate {
            p,
            trajectories,
            horizon,
            seed,
            format,
            solution,
            ..
        } => {
            let (value, oracle) = value_for(&spec, &params, common, solution.as_deref())?;
            let policy = build_policy(&value);
            match format {
                Format::Json => {
                    let opts = SimOptions {
                        num_traj: *trajectories,
                        horizon: *horizon,
                        seed: *seed,
                    };
                    write_json(&out("estimate.json"), &estimate_value(&policy, &oracle, *p, &opts)?)?;
                }
                Format::Csv => {
                    let h = horizon.unwrap_or(12.0 / params.r);
                    let traj = sample_trajectory(&policy, *p, h, *seed)?;
                    let rows = traj.events.iter().map(|e| (vec![e.t, e.p], Some(e.kind.as_str())));
                    fs::write(out("trajectory.csv"), csv_string(&["t", "p", "event"], rows))?;
                }
            }
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => 2,
                ref e if e.is_validation() => 3,
                _ => 4,
            }
        }
    }
}
