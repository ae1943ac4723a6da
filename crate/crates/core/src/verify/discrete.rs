//! Value iteration for the discrete-time splitting game with stage length `1/n`.
//!
//! Each stage the informed player splits the current belief (concavification
//! of the continuation), then the stage payoff `u` is collected and the
//! belief drifts with the chain. This is a belief-level proxy for the game
//! with stage length `1/n`, not an action-level solver; its values converge
//! to the same limit as `n` grows.

use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::upper_hull;
use crate::error::{Error, Result};
use crate::game::{discrete_step_params, GameSpec};
use crate::oracle::eval_u;
use crate::value::PiecewiseValue;

/// Iterations ignored before the contraction ratio is recorded.
const TRANSIENT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub n: f64,
    pub grid_size: usize,
    pub max_iter: usize,
    /// Stop once the sup-norm of an update falls below this.
    pub stop_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            n: 256.0,
            grid_size: 2001,
            max_iter: 200_000,
            stop_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleGrid {
    pub n: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm of the last update.
    pub residual: f64,
    /// Largest ratio of successive update norms after the transient.
    pub max_contraction_ratio: f64,
    /// The theoretical modulus `exp(-r/n)`.
    pub modulus: f64,
}

impl OracleGrid {
    /// Linear interpolation of the grid values.
    pub fn eval(&self, p: f64) -> f64 {
        interp_uniform(&self.values, p)
    }
}

fn interp_uniform(values: &[f64], p: f64) -> f64 {
    let last = values.len() - 1;
    let x = p.clamp(0.0, 1.0) * last as f64;
    let i = (x.floor() as usize).min(last - 1);
    let t = x - i as f64;
    values[i] + t * (values[i + 1] - values[i])
}

/// Upper concave hull of grid values, evaluated back on the grid.
fn concavify(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let hull = upper_hull(&pts);
    let mut out = Vec::with_capacity(values.len());
    for w in hull.windows(2) {
        let (a, b) = (pts[w[0]], pts[w[1]]);
        for &(p, _) in &pts[w[0]..w[1]] {
            out.push(a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0));
        }
    }
    out.push(pts[pts.len() - 1].1);
    out
}

/// Fixed point of `V = Cav[ delta u + (1 - delta) V(drift) ]` on a uniform grid,
/// where `delta = 1 - exp(-r/n)` and `drift(p) = p e^{-lambda1/n} + (1-p)(1 - e^{-lambda2/n})`.
pub fn discrete_oracle_value(spec: &GameSpec, opts: &OracleOptions) -> Result<OracleGrid> {
    if opts.grid_size < 3 {
        return Err(Error::InvalidArgument(format!("grid_size must be at least 3, got {}", opts.grid_size)));
    }
    if !(opts.stop_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("stop_tol must be positive, got {}", opts.stop_tol)));
    }
    let dp = discrete_step_params(spec, opts.n)?;
    let last = (opts.grid_size - 1) as f64;
    let grid: Vec<f64> = (0..opts.grid_size).map(|i| i as f64 / last).collect();
    let u: Vec<f64> = grid.par_iter().map(|&p| eval_u(spec, p)).collect::<Result<_>>()?;
    let (stay1, enter1) = (1.0 - dp.pi1, dp.pi2);
    let drifted: Vec<f64> = grid.iter().map(|&p| p * stay1 + (1.0 - p) * enter1).collect();
    let keep = 1.0 - dp.delta;

    let mut values = concavify(&grid, &u);
    let mut prev_residual = f64::NAN;
    let mut max_ratio = 0.0f64;
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let stage: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| dp.delta * u[i] + keep * interp_uniform(&values, drifted[i]))
            .collect();
        let next = concavify(&grid, &stage);
        residual = next
            .iter()
            .zip(&values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        values = next;
        if iter > TRANSIENT && prev_residual > 0.0 {
            max_ratio = max_ratio.max(residual / prev_residual);
        }
        prev_residual = residual;
        if residual < opts.stop_tol {
            return Ok(OracleGrid {
                n: opts.n,
                grid,
                values,
                iterations: iter,
                residual,
                max_contraction_ratio: max_ratio,
                modulus: keep,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

/// Sup-norm distance between `pv` and the oracle values on the oracle grid.
pub fn compare_to_oracle(pv: &PiecewiseValue, og: &OracleGrid) -> f64 {
    og.grid
        .iter()
        .zip(&og.values)
        .map(|(&p, &v)| (pv.eval(p) - v).abs())
        .fold(0.0, f64::max)
}
