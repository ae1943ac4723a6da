//! Checks a candidate value function against the conditions that pin down
//! the limit value uniquely.

use serde::Serialize;

use crate::oracle::UOracle;
use crate::value::{Payload, PiecewiseValue};

/// Points where the slope condition is sampled.
const G2_POINTS: usize = 2000;
/// Uniform grid for the discrete concavity test.
const CONCAVITY_POINTS: usize = 2001;
/// Half-width of the local chord test for strict concavity.
const CHORD_HALF: f64 = 1e-3;
/// Violations kept in the report.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharTolerances {
    /// Concavity (chord) slack.
    pub concavity: f64,
    /// `w(p*) - u(p*)` tolerance in the first condition.
    pub g1: f64,
    /// Lower slack of the slope inequality.
    pub g2: f64,
    /// Allowed residual of the slope equality at extreme points.
    pub g3: f64,
    /// Mismatch of one-sided slopes that counts as a kink.
    pub slope: f64,
    /// Strict-concavity threshold of the local chord test.
    pub strict: f64,
}

impl CharTolerances {
    pub fn for_oracle(oracle: &UOracle) -> Self {
        let p = oracle.params();
        let s = p.scale;
        CharTolerances {
            concavity: 1e-7 * s,
            g1: 1e-4 * s,
            g2: 1e-5 * s,
            g3: 1e-4 * s,
            slope: 1e-5 * s * p.lipschitz_u.max(1.0),
            strict: 1e-10 * s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharReport {
    /// Up to 20 triples `p1 < p2 < p3` whose chord lies above the middle value.
    pub concavity_violations: Vec<([f64; 3], f64)>,
    /// `w(p*) - u(p*)`.
    pub g1_residual: f64,
    /// Whether `(p*, w(p*))` is an extreme point, so that equality is required.
    pub g1_equality_required: bool,
    /// Smallest value of `w'(p)(p - p*) + mu (w(p) - u(p))` and where it occurs.
    pub g2_worst: (f64, f64),
    /// Largest absolute residual of the equality at extreme points.
    pub g3_worst: (f64, f64),
    pub extreme_points_checked: usize,
    /// Joints where the one-sided slopes disagree.
    pub kink_locations: Vec<f64>,
    pub tolerances: CharTolerances,
    pub pass: bool,
}

/// Residual of the slope equation with derivative `d`.
fn residual(oracle: &UOracle, p: f64, w: f64, d: f64) -> f64 {
    let params = oracle.params();
    d * (p - params.p_star) + params.mu * (w - oracle.u(p))
}

/// Local chord test: `w(p)` strictly above the chord over `[p - h, p + h]`.
fn strictly_concave_at(pv: &PiecewiseValue, p: f64, tol: f64) -> bool {
    let (a, b) = ((p - CHORD_HALF).max(0.0), (p + CHORD_HALF).min(1.0));
    if a >= p || b <= p {
        return true;
    }
    let chord = pv.eval(a) + (pv.eval(b) - pv.eval(a)) * (p - a) / (b - a);
    pv.eval(p) - chord > tol
}

/// Extreme points of the hypograph: the corners, every sample of a curved
/// piece where `w` is strictly concave, and strictly concave joints.
fn extreme_points(pv: &PiecewiseValue, tol: &CharTolerances) -> Vec<f64> {
    let mut pts = vec![0.0, 1.0];
    for seg in pv.segments() {
        if let Payload::Dense(c) = &seg.payload {
            pts.extend(c.p.iter().copied().filter(|&p| strictly_concave_at(pv, p, tol.strict)));
        }
    }
    pts.extend(
        pv.joints()
            .into_iter()
            .filter(|&p| strictly_concave_at(pv, p, tol.strict)),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Runs the concavity, slope-inequality, slope-equality and smoothness checks.
pub fn check_characterization(pv: &PiecewiseValue, oracle: &UOracle, tol: &CharTolerances) -> CharReport {
    let params = oracle.params();
    let ps = params.p_star;
    let at_star = |p: f64| (p - ps).abs() <= 1e-9;

    // Concavity over consecutive triples of a grid refined by the joints.
    let mut grid: Vec<f64> = (0..CONCAVITY_POINTS)
        .map(|i| i as f64 / (CONCAVITY_POINTS - 1) as f64)
        .chain(pv.joints())
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let vals: Vec<f64> = grid.iter().map(|&p| pv.eval(p)).collect();
    let mut concavity_violations = Vec::new();
    let mut concave = true;
    for i in 1..grid.len() - 1 {
        let (a, b, c) = (grid[i - 1], grid[i], grid[i + 1]);
        let chord = vals[i - 1] + (vals[i + 1] - vals[i - 1]) * (b - a) / (c - a);
        let excess = chord - vals[i];
        if excess > tol.concavity {
            concave = false;
            if concavity_violations.len() < MAX_LISTED {
                concavity_violations.push(([a, b, c], excess));
            }
        }
    }

    // G.1
    let g1_residual = pv.eval(ps) - oracle.u(ps);
    let g1_equality_required = ps <= 0.0 || ps >= 1.0 || strictly_concave_at(pv, ps, tol.strict);
    let g1_ok = g1_residual >= -tol.g1 && (!g1_equality_required || g1_residual.abs() <= tol.g1);

    // G.2 with both one-sided derivatives at samples and joints.
    let mut g2_worst = (f64::NAN, f64::INFINITY);
    let samples = (0..G2_POINTS)
        .map(|i| (i as f64 + 0.5) / G2_POINTS as f64)
        .chain(pv.breakpoints());
    for p in samples.filter(|&p| !at_star(p)) {
        let w = pv.eval(p);
        for d in [pv.deriv_left(p), pv.deriv_right(p)] {
            let r = residual(oracle, p, w, d);
            if r < g2_worst.1 {
                g2_worst = (p, r);
            }
        }
    }
    let g2_ok = g2_worst.1 >= -tol.g2;

    // G.3 at extreme points other than p*.
    let extremes = extreme_points(pv, tol);
    let mut g3_worst = (f64::NAN, 0.0f64);
    let mut checked = 0;
    for &p in extremes.iter().filter(|&&p| !at_star(p)) {
        checked += 1;
        let w = pv.eval(p);
        let r = [pv.deriv_left(p), pv.deriv_right(p)]
            .into_iter()
            .map(|d| residual(oracle, p, w, d).abs())
            .fold(0.0, f64::max);
        if r > g3_worst.1 {
            g3_worst = (p, r);
        }
    }
    let g3_ok = g3_worst.1 <= tol.g3;

    let kink_locations: Vec<f64> = pv
        .joints()
        .into_iter()
        .filter(|&p| (pv.deriv_left(p) - pv.deriv_right(p)).abs() > tol.slope)
        .collect();
    let smooth = kink_locations.iter().all(|&p| at_star(p));

    CharReport {
        concavity_violations,
        g1_residual,
        g1_equality_required,
        g2_worst,
        g3_worst,
        extreme_points_checked: checked,
        kink_locations,
        tolerances: *tol,
        pass: concave && g1_ok && g2_ok && g3_ok && smooth,
    }
}
