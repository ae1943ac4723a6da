//! Fixed-step RK4 for the sliding equation `phi' = mu (u - phi) / (p - p*)`.

use super::frame::{Direction, Frame, AT_STAR};
use crate::error::{Error, Result};
use crate::oracle::UOracle;
use crate::value::DenseCurve;

/// Default RK4 step.
pub const DEFAULT_ODE_STEP: f64 = 1e-4;

/// Integrates the sliding equation in frame coordinates, one step at a time.
pub(crate) struct OdeMarch<'f, 'a> {
    frame: &'f Frame<'a>,
    step: f64,
    origin: f64,
    steps: usize,
    pub(crate) curve: DenseCurve,
}

impl<'f, 'a> OdeMarch<'f, 'a> {
    pub(crate) fn new(frame: &'f Frame<'a>, q0: f64, v0: f64, step: f64) -> Self {
        let mut m = OdeMarch {
            frame,
            step,
            origin: q0,
            steps: 0,
            curve: DenseCurve::default(),
        };
        let d0 = m.rhs(q0, v0);
        m.curve.push(q0, v0, d0);
        m
    }

    /// Right-hand side; at `p*` itself the regularized limit slope is used.
    pub(crate) fn rhs(&self, q: f64, v: f64) -> f64 {
        let fr = self.frame;
        let dq = q - fr.q_star;
        if dq.abs() <= AT_STAR {
            fr.mu / (1.0 + fr.mu) * fr.u_slope_right(q)
        } else {
            fr.mu * (fr.u(q) - v) / dq
        }
    }

    pub(crate) fn last(&self) -> (f64, f64) {
        let n = self.curve.len() - 1;
        (self.curve.p[n], self.curve.v[n])
    }

    /// One RK4 step toward `q_end`; false once `q_end` is reached.
    pub(crate) fn advance(&mut self, q_end: f64) -> bool {
        let (q, v) = self.last();
        if q >= q_end {
            return false;
        }
        let next = (self.origin + (self.steps + 1) as f64 * self.step).min(q_end);
        let h = next - q;
        let k1 = self.curve.dv[self.curve.len() - 1];
        let k2 = self.rhs(q + 0.5 * h, v + 0.5 * h * k1);
        let k3 = self.rhs(q + 0.5 * h, v + 0.5 * h * k2);
        let k4 = self.rhs(next, v + h * k3);
        let v_next = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let d_next = self.rhs(next, v_next);
        self.curve.push(next, v_next, d_next);
        self.steps += 1;
        true
    }
}

/// Solves the sliding equation from `(p_start, v_start)` to `p_stop` with
/// fixed step `ode_step`, in whichever direction `p_stop` lies.
///
/// The returned curve is ordered by increasing belief.
pub fn solve_nonrevealing(
    oracle: &UOracle,
    p_start: f64,
    v_start: f64,
    p_stop: f64,
    ode_step: f64,
) -> Result<DenseCurve> {
    for p in [p_start, p_stop] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
    }
    if !(ode_step > 0.0) {
        return Err(Error::InvalidArgument(format!("ode_step must be positive, got {ode_step}")));
    }
    let ps = oracle.params().p_star;
    let (lo, hi) = (p_start.min(p_stop), p_start.max(p_stop));
    if lo < ps - AT_STAR && ps + AT_STAR < hi {
        return Err(Error::StraddlesInvariant { lo, hi, p_star: ps });
    }
    let direction = if p_stop >= p_start {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let frame = Frame::new(oracle, direction);
    let mut march = OdeMarch::new(&frame, frame.map(p_start), v_start, ode_step);
    let end = frame.map(p_stop);
    while march.advance(end) {}
    Ok(if frame.reflected() {
        march.curve.reflected()
    } else {
        march.curve
    })
}
