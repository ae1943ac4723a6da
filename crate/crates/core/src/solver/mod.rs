//! The finite alternating construction of the limit value `w`.
//!
//! Starting from the affine piece around `p*`, each pass moves away from
//! `p*` and at each breakpoint either reveals (a linear piece with slope
//! `a(p, w)` up to the largest maximizer `rho`) or slides (a piece following
//! the nonrevealing ODE until revealing becomes optimal).

mod frame;
mod ode;
mod passes;

use serde::{Deserialize, Serialize};

pub use frame::{Direction, SlopeSup};
pub use ode::{solve_nonrevealing, DEFAULT_ODE_STEP};
pub use passes::find_regime_switch;

use crate::envelope::{initial_interval, initial_segment, upper_concave_envelope, ConcaveEnvelope, InitialSegment};
use crate::error::{Error, Result};
use crate::game::{DerivedParams, GameSpec};
use crate::oracle::{UOracle, DEFAULT_RESOLUTION};
use crate::value::{PiecewiseValue, Segment, SegmentKind};
use frame::{Frame, AT_STAR};

/// Numerical thresholds that make the branch decisions deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Maximizers this close to `p` count as `p`.
    pub rho: f64,
    /// Equality of values.
    pub eq: f64,
    /// Agreement of one-sided slopes at a joint.
    pub slope: f64,
    /// Continuity at joints.
    pub join: f64,
    /// Minimal advance of a breakpoint.
    pub progress: f64,
    /// Near-maximal values considered when picking the largest maximizer.
    pub argmax: f64,
}

impl Tolerances {
    pub fn for_params(params: &DerivedParams) -> Self {
        let s = params.scale;
        Tolerances {
            rho: 1e-6,
            eq: 1e-6 * s,
            slope: 1e-5 * s * params.lipschitz_u.max(1.0),
            join: 1e-7 * s,
            progress: 1e-7,
            argmax: 1e-8 * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Uniform samples in the `u` oracle.
    pub resolution: usize,
    pub ode_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            resolution: DEFAULT_RESOLUTION,
            ode_step: DEFAULT_ODE_STEP,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if !(self.ode_step > 0.0 && self.ode_step <= 0.01) {
            return Err(Error::InvalidArgument(format!(
                "ode_step must lie in (0, 0.01], got {}",
                self.ode_step
            )));
        }
        Ok(())
    }
}

/// One breakpoint step of a pass, in original belief coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Breakpoint the step starts from.
    pub lo: f64,
    /// Breakpoint the step ends at.
    pub hi: f64,
    pub kind: SegmentKind,
    /// `a(p_k, w)` (or its mirror); `None` when infinite.
    pub a: Option<f64>,
    /// `rho(p_k, w)` (or its mirror).
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgorithmTrace {
    pub p_tilde0: f64,
    pub p0: f64,
    /// Steps of the pass moving up from `p0`.
    pub increasing: Vec<TraceStep>,
    /// Steps of the pass moving down from `p~0`.
    pub decreasing: Vec<TraceStep>,
    pub diagnostics: Vec<String>,
}

impl AlgorithmTrace {
    /// `p0 < p1 < ... <= 1`.
    pub fn increasing_breakpoints(&self) -> Vec<f64> {
        std::iter::once(self.p0).chain(self.increasing.iter().map(|s| s.hi)).collect()
    }

    /// `p~0 > p~1 > ... >= 0`.
    pub fn decreasing_breakpoints(&self) -> Vec<f64> {
        std::iter::once(self.p_tilde0)
            .chain(self.decreasing.iter().map(|s| s.lo))
            .collect()
    }
}

/// Segments produced by one pass, ordered by increasing belief.
#[derive(Debug, Clone, PartialEq)]
pub struct PassResult {
    pub segments: Vec<Segment>,
    /// Steps in the order they were taken.
    pub steps: Vec<TraceStep>,
    pub diagnostics: Vec<String>,
}

/// Full output of [`solve_limit_value`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub value: PiecewiseValue,
    pub trace: AlgorithmTrace,
    pub initialization: InitialSegment,
    pub envelope: ConcaveEnvelope,
    pub oracle: UOracle,
}

/// `a(p, f)` and the largest maximizer over `p' in (p, 1]`. Needs `p* <= p < 1`.
pub fn slope_sup(oracle: &UOracle, p: f64, f_at_p: f64) -> Result<SlopeSup> {
    let ps = oracle.params().p_star;
    if !(p < 1.0) || p < ps - AT_STAR {
        return Err(Error::InvalidArgument(format!(
            "slope_sup needs p* <= p < 1, got p = {p} with p* = {ps}"
        )));
    }
    let tol = Tolerances::for_params(oracle.params());
    Ok(Frame::new(oracle, Direction::Increasing).slope_sup(p, f_at_p, &tol))
}

/// Mirror of [`slope_sup`] over `p' in [0, p)`: the infimum slope and the
/// smallest minimizer. Needs `0 < p <= p*`.
pub fn slope_inf(oracle: &UOracle, p: f64, f_at_p: f64) -> Result<SlopeSup> {
    let ps = oracle.params().p_star;
    if !(p > 0.0) || p > ps + AT_STAR {
        return Err(Error::InvalidArgument(format!(
            "slope_inf needs 0 < p <= p*, got p = {p} with p* = {ps}"
        )));
    }
    let tol = Tolerances::for_params(oracle.params());
    let s = Frame::new(oracle, Direction::Decreasing).slope_sup(1.0 - p, f_at_p, &tol);
    Ok(SlopeSup {
        a: -s.a,
        rho: 1.0 - s.rho,
    })
}

fn pass(oracle: &UOracle, direction: Direction, p_start: f64, w_start: f64, opts: &SolveOptions) -> Result<PassResult> {
    let tol = Tolerances::for_params(oracle.params());
    let frame = Frame::new(oracle, direction);
    let out = passes::run_pass(&frame, frame.map(p_start), w_start, opts, &tol)?;
    if !frame.reflected() {
        return Ok(PassResult {
            segments: out.segments,
            steps: out.steps,
            diagnostics: out.diagnostics,
        });
    }
    // `1 - (1 - p)` can be off by an ulp; keep the starting point exact.
    let exact = |x: f64| if x == 1.0 - frame.map(p_start) { p_start } else { x };
    let mut segments: Vec<Segment> = out.segments.iter().rev().map(Segment::reflected).collect();
    for seg in &mut segments {
        seg.hi = exact(seg.hi);
        seg.jump_target = seg.jump_target.map(exact);
    }
    Ok(PassResult {
        segments,
        steps: out
            .steps
            .iter()
            .map(|s| TraceStep {
                lo: 1.0 - s.hi,
                hi: exact(1.0 - s.lo),
                kind: s.kind,
                a: s.a.map(|a| -a),
                rho: 1.0 - s.rho,
            })
            .collect(),
        diagnostics: out.diagnostics,
    })
}

/// Extends `w` from `(p0, w(p0))` up to 1.
pub fn increasing_pass(oracle: &UOracle, p0: f64, w_at_p0: f64, opts: &SolveOptions) -> Result<PassResult> {
    pass(oracle, Direction::Increasing, p0, w_at_p0, opts)
}

/// Extends `w` from `(p~0, w(p~0))` down to 0.
pub fn decreasing_pass(oracle: &UOracle, p_tilde0: f64, w_at_p_tilde0: f64, opts: &SolveOptions) -> Result<PassResult> {
    pass(oracle, Direction::Decreasing, p_tilde0, w_at_p_tilde0, opts)
}

/// Solves for the limit value of `spec`.
pub fn solve_limit_value(spec: &GameSpec, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    let params = spec.derived();
    let tol = Tolerances::for_params(&params);
    let mut oracle = UOracle::build(spec, opts.resolution, 1e-6 * params.scale)?;
    let envelope = upper_concave_envelope(&mut oracle);
    let (pt0, p0) = initial_interval(&envelope, &params);
    let init = initial_segment(&oracle, &params, pt0, p0);

    let mut trace = AlgorithmTrace {
        p_tilde0: init.p_tilde0,
        p0: init.p0,
        ..Default::default()
    };
    let mut segments = Vec::new();
    if init.p_tilde0 > 0.0 {
        let down = decreasing_pass(&oracle, init.p_tilde0, init.value(init.p_tilde0), opts)?;
        segments.extend(down.segments);
        trace.decreasing = down.steps;
        trace.diagnostics.extend(down.diagnostics);
    }
    if !init.is_anchor() {
        segments.push(Segment::affine(
            init.p_tilde0,
            init.p0,
            SegmentKind::InitialSplit,
            init.slope,
            init.intercept,
            None,
        ));
    }
    if init.p0 < 1.0 {
        let up = increasing_pass(&oracle, init.p0, init.value(init.p0), opts)?;
        segments.extend(up.segments);
        trace.increasing = up.steps;
        trace.diagnostics.extend(up.diagnostics);
    }
    let anchor = init.is_anchor().then_some((init.p0, init.intercept));
    let value = PiecewiseValue::new(segments, params, anchor)?;

    for w in value.segments().windows(2) {
        let p = w[1].lo;
        let jump = (w[0].eval(p) - w[1].eval(p)).abs();
        if jump > tol.join {
            trace.diagnostics.push(format!("discontinuity {jump:e} at joint {p}"));
        }
        let kink = (w[0].deriv(p) - w[1].deriv(p)).abs();
        if (p - params.p_star).abs() > tol.rho && kink > tol.slope {
            trace.diagnostics.push(format!("slope mismatch {kink:e} at joint {p}"));
        }
    }

    Ok(Solution {
        value,
        trace,
        initialization: init,
        envelope,
        oracle,
    })
}

#[cfg(test)]
mod tests;
