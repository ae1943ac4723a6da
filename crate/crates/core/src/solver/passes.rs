//! The alternating construction from the initial interval outward.

use super::frame::{Direction, Frame};
use super::ode::OdeMarch;
use super::{SolveOptions, Tolerances, TraceStep};
use crate::error::{Error, Result};
use crate::oracle::UOracle;
use crate::value::{DenseCurve, Segment, SegmentKind, JOINT_EPS};

/// ODE steps between two evaluations of the switch condition.
const CHECK_EVERY: usize = 10;
/// Bracket width at which switch bisection stops.
const SWITCH_WIDTH: f64 = 1e-9;
/// Hard cap on segments per pass.
const MAX_SEGMENTS: usize = 10_000;

pub(crate) struct PassOutput {
    pub segments: Vec<Segment>,
    pub steps: Vec<TraceStep>,
    pub diagnostics: Vec<String>,
}

fn switches(frame: &Frame, q: f64, v: f64, tol: &Tolerances) -> bool {
    frame.slope_sup(q, v, tol).rho > q
}

/// Slides from `(q_k, w_k)` until revealing becomes optimal. Returns the
/// sliding curve (frame coordinates) ending at the switch point, which is 1
/// when the slide never stops.
pub(crate) fn switch_in_frame(
    frame: &Frame,
    q_k: f64,
    w_k: f64,
    ode_step: f64,
    tol: &Tolerances,
) -> (DenseCurve, f64) {
    let mut march = OdeMarch::new(frame, q_k, w_k, ode_step);
    let mut last_false = q_k;
    loop {
        let mut moved = false;
        for _ in 0..CHECK_EVERY {
            if !march.advance(1.0) {
                break;
            }
            moved = true;
        }
        if !moved {
            return (march.curve, 1.0);
        }
        let (q, v) = march.last();
        if switches(frame, q, v, tol) {
            let (mut lo, mut hi) = (last_false, q);
            while hi - lo > SWITCH_WIDTH {
                let mid = 0.5 * (lo + hi);
                if switches(frame, mid, march.curve.eval(mid), tol) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let v_hi = march.curve.eval(hi);
            let d_hi = march.rhs(hi, v_hi);
            let mut curve = march.curve;
            curve.truncate_at(hi, v_hi, d_hi);
            return (curve, hi);
        }
        last_false = q;
    }
}

/// Runs one pass from `(q0, w0)` to the right edge of the frame.
pub(crate) fn run_pass(frame: &Frame, q0: f64, w0: f64, opts: &SolveOptions, tol: &Tolerances) -> Result<PassOutput> {
    let mut out = PassOutput {
        segments: Vec::new(),
        steps: Vec::new(),
        diagnostics: Vec::new(),
    };
    let (mut q, mut w) = (q0, w0);
    while q < 1.0 {
        let step = out.segments.len();
        if step >= MAX_SEGMENTS {
            return Err(Error::ProgressStall {
                at: frame.map(q),
                step,
                detail: format!("more than {MAX_SEGMENTS} segments"),
            });
        }
        let sup = frame.slope_sup(q, w, tol);
        let (segment, next, next_w) = if sup.rho > q {
            let hi = if 1.0 - sup.rho < JOINT_EPS { 1.0 } else { sup.rho };
            let seg = Segment::affine(q, hi, SegmentKind::Linear, sup.a, w - sup.a * q, Some(q));
            let next_w = seg.eval(hi);
            (seg, hi, next_w)
        } else {
            let (curve, hi) = switch_in_frame(frame, q, w, opts.ode_step, tol);
            let next_w = curve.v[curve.len() - 1];
            (Segment::dense(curve), hi, next_w)
        };
        if next - q < tol.progress {
            return Err(Error::ProgressStall {
                at: frame.map(q),
                step,
                detail: format!("{:?} step advanced only {:e}", segment.kind, next - q),
            });
        }
        if let Some(prev) = out.segments.last() {
            if prev.kind == segment.kind {
                out.diagnostics.push(format!(
                    "consecutive {:?} segments at belief {}",
                    segment.kind,
                    frame.map(q)
                ));
            }
        }
        out.steps.push(TraceStep {
            lo: q,
            hi: next,
            kind: segment.kind,
            a: sup.a.is_finite().then_some(sup.a),
            rho: sup.rho,
        });
        out.segments.push(segment);
        q = next;
        w = next_w;
    }
    Ok(out)
}

/// Slides from `(p_k, w_k)` in `direction` until revealing becomes optimal.
/// Returns the sliding curve (ordered by increasing belief) and the switch
/// belief, which is the far edge of `[0, 1]` when no switch occurs.
pub fn find_regime_switch(
    oracle: &UOracle,
    direction: Direction,
    p_k: f64,
    w_k: f64,
    opts: &SolveOptions,
) -> Result<(DenseCurve, f64)> {
    if !(0.0..=1.0).contains(&p_k) {
        return Err(Error::ProbabilityOutOfRange(p_k));
    }
    let tol = Tolerances::for_params(oracle.params());
    let frame = Frame::new(oracle, direction);
    let q_k = frame.map(p_k);
    if q_k < frame.q_star - super::frame::AT_STAR {
        return Err(Error::InvalidArgument(format!(
            "belief {p_k} lies on the wrong side of p* for a {direction:?} pass"
        )));
    }
    let (curve, q_next) = switch_in_frame(&frame, q_k, w_k, opts.ode_step, &tol);
    Ok(if frame.reflected() {
        (curve.reflected(), 1.0 - q_next)
    } else {
        (curve, q_next)
    })
}
